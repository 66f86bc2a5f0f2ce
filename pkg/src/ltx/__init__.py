"""Lubin-Tate formal groups and the determinant identities behind local epsilon elements."""
from .padic_core import PadicElement, make_ring, teichmuller
from .plinalg import PMatrix, det, inverse
from .report import AuditReport

__version__ = "0.1.0"

__all__ = ["AuditReport", "PMatrix", "PadicElement", "det", "inverse", "make_ring", "teichmuller"]
