"""Exact and numerical audits of correlation inequalities for monotone families.

The Boolean side works with exact truth tables and rational statistics; the
Gaussian side with halfspaces, orthant integrals and monotone step functions
of correlated projections.
"""

from .bounds import AuditReport
from .cube import BooleanFamily, FamilyDescriptor, generate
from .errors import AuditError, DescriptorError, DimensionError, PreconditionError, QuadratureError
from .gauss import GaussianPair, Halfspace
from .quadrature import QuadratureConfig
from .stieltjes import MonotoneStep

__version__ = "0.1.0"

__all__ = [
    "AuditError",
    "AuditReport",
    "BooleanFamily",
    "DescriptorError",
    "DimensionError",
    "FamilyDescriptor",
    "GaussianPair",
    "Halfspace",
    "MonotoneStep",
    "PreconditionError",
    "QuadratureConfig",
    "QuadratureError",
    "generate",
]
