import os

from anomalylab.fields import set_fft_workers

set_fft_workers(int(os.environ.get("ANOMALYLAB_THREADS", "2")))
