"""Render the laboratory's standard panels from emitted CSV/JSON.

Panels:

* ``energy_profile``  E(t) per run with the blow-up marker at t = 1;
* ``cascade``         dominant shell index against time per run;
* ``drag_bound``      drag against Reynolds number with the fitted
                      c1 + c2/Re envelope overlay;
* ``shell_heatmap``   log shell energies against (t, q) for one run.

Rendering is read-only and deterministic: fixed style, pinned PNG metadata,
no timestamps.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

PANEL_KINDS = ("energy_profile", "cascade", "drag_bound", "shell_heatmap")

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 130,
    "savefig.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "lines.linewidth": 1.4,
}
_METADATA = {"Software": "anomalylab-figures"}


class FigureInputError(ValueError):
    """Missing column, empty input, or unreadable file."""


@dataclass
class FigureSpec:
    kind: str
    inputs: list
    output: Path
    xlim: tuple | None = None
    ylim: tuple | None = None
    title: str = ""
    labels: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in PANEL_KINDS:
            raise FigureInputError(f"unknown panel kind {self.kind!r}")
        if not self.inputs:
            raise FigureInputError("no input files given")
        self.inputs = [Path(p) for p in self.inputs]
        self.output = Path(self.output)


def read_ledger(path: Path) -> dict:
    """Parse a ledger CSV into named float arrays."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FigureInputError(f"{path}: {exc}") from exc
    if len(rows) < 2:
        raise FigureInputError(f"{path}: empty ledger")
    header, data = rows[0], rows[1:]
    cols = {name: np.array([float(r[i]) for r in data]) for i, name in enumerate(header)}
    for required in ("t", "E"):
        if required not in cols:
            raise FigureInputError(f"{path}: missing column {required!r}")
    return cols


def _shell_matrix(cols: dict, path: Path) -> np.ndarray:
    names = sorted((k for k in cols if k.startswith("shell_")),
                   key=lambda s: int(s.split("_")[1]))
    if not names:
        raise FigureInputError(f"{path}: no shell_q columns")
    return np.stack([cols[k] for k in names], axis=1)


def _label(spec: FigureSpec, i: int) -> str:
    if i < len(spec.labels):
        return spec.labels[i]
    return spec.inputs[i].stem


def render(spec: FigureSpec) -> Path:
    """Render the panel and return the output path."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        if spec.kind == "energy_profile":
            _energy_profile(spec, ax)
        elif spec.kind == "cascade":
            _cascade(spec, ax)
        elif spec.kind == "drag_bound":
            _drag_bound(spec, ax)
        else:
            _shell_heatmap(spec, ax, fig)
        if spec.xlim:
            ax.set_xlim(*spec.xlim)
        if spec.ylim:
            ax.set_ylim(*spec.ylim)
        if spec.title:
            ax.set_title(spec.title)
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output, metadata=dict(_METADATA), format="png")
        plt.close(fig)
    return spec.output


def _energy_profile(spec: FigureSpec, ax) -> None:
    t_max = 0.0
    for i, path in enumerate(spec.inputs):
        cols = read_ledger(path)
        ax.plot(cols["t"], cols["E"], label=_label(spec, i))
        t_max = max(t_max, float(cols["t"][-1]))
    if t_max >= 1.0:
        ax.axvline(1.0, color="k", linestyle="--", linewidth=0.9, label="t = 1")
    ax.set_xlabel("t")
    ax.set_ylabel("E(t)")
    ax.legend(loc="best", fontsize=8)


def _dominant_shell(shells: np.ndarray) -> np.ndarray:
    # ties break toward the lower shell, matching the ledger convention
    best = shells >= (shells.max(axis=1, keepdims=True) * (1.0 - 1e-12))
    return np.argmax(best, axis=1)


def _cascade(spec: FigureSpec, ax) -> None:
    for i, path in enumerate(spec.inputs):
        cols = read_ledger(path)
        shells = _shell_matrix(cols, path)
        ax.step(cols["t"], _dominant_shell(shells), where="post", label=_label(spec, i))
    ax.axvline(1.0, color="k", linestyle="--", linewidth=0.9)
    ax.set_xlabel("t")
    ax.set_ylabel("dominant shell index")
    ax.legend(loc="best", fontsize=8)


def _drag_bound(spec: FigureSpec, ax) -> None:
    points = []
    c1 = c2 = None
    for path in spec.inputs:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FigureInputError(f"{path}: {exc}") from exc
        reports = doc if isinstance(doc, list) else [doc]
        for rep in reports:
            if "Re" not in rep or "drag" not in rep:
                raise FigureInputError(f"{path}: missing Re/drag fields")
            points.append((rep["Re"], rep["drag"]))
            c1 = rep.get("c1_fit", c1)
            c2 = rep.get("c2_fit", c2)
    if not points:
        raise FigureInputError("no drag points found")
    re_vals = np.array([p[0] for p in points])
    drags = np.array([p[1] for p in points])
    ax.semilogx(re_vals, drags, "o", label="measured")
    if c1 is not None and c2 is not None:
        grid = np.geomspace(re_vals.min() / 2, re_vals.max() * 2, 200)
        ax.semilogx(grid, c1 + c2 / grid, "-", label=f"c1 + c2/Re")
    ax.set_xlabel("Re")
    ax.set_ylabel("drag  eps l / U^3")
    ax.legend(loc="best", fontsize=8)


def _shell_heatmap(spec: FigureSpec, ax, fig) -> None:
    if len(spec.inputs) != 1:
        raise FigureInputError("shell_heatmap takes exactly one ledger")
    cols = read_ledger(spec.inputs[0])
    shells = _shell_matrix(cols, spec.inputs[0])
    with np.errstate(divide="ignore"):
        img = np.log10(np.maximum(shells, 1e-30)).T
    t = cols["t"]
    mesh = ax.pcolormesh(t, np.arange(shells.shape[1]), img, shading="nearest",
                         vmin=-16, vmax=0, cmap="viridis")
    ax.axvline(1.0, color="w", linestyle="--", linewidth=0.9)
    ax.set_xlabel("t")
    ax.set_ylabel("shell q")
    fig.colorbar(mesh, ax=ax, label="log10 shell energy")
