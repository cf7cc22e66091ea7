"""Sandboxed executor for candidate plotting scripts.

Each candidate runs in a fresh capped subprocess; the figure it draws is
introspected back into a chart spec document, and the outcome travels as a
line-delimited JSON execution report.  This package deliberately shares no
code with the scoring library: the wire protocol and the spec schema are
the whole interface.
"""

from .protocol import serve
from .runner import run_candidate

__version__ = "0.1.0"

__all__ = ["run_candidate", "serve", "__version__"]
