"""Error-bounded binary32 preprocessing for better compression."""

from ._fpprep import *  # noqa: F401,F403
from ._fpprep import Error, ErrorBound, bench_csv, transform_csv  # noqa: F401

__version__ = "0.1.0"
