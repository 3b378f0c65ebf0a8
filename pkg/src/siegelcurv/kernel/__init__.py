from .linalg import RankDecision, cholesky_hpd, decide_rank, nullspace
from .quadrature import QuadratureResult, QuadratureSpec, Singularity, integrate_plane

__all__ = [
    "QuadratureResult",
    "QuadratureSpec",
    "RankDecision",
    "Singularity",
    "cholesky_hpd",
    "decide_rank",
    "integrate_plane",
    "nullspace",
]
