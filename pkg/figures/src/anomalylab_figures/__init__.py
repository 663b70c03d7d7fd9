"""Figure rendering for the mixing-cascade laboratory's output files.

Consumes ledger CSVs (columns t, E, D, W, mixnorm, optional shell_q) and
drag-report JSONs; never recomputes physics and never modifies its inputs.
"""

__version__ = "0.1.0"

from .render import FigureSpec, FigureInputError, render
