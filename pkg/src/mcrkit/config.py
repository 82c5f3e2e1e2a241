"""Numeric tolerances shared by every solver.

Tolerances travel as an explicit value; nothing here is global mutable state.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

# relative factor applied to the instance diameter when eps_len is not given
EPS_LEN_REL = 1e-9


@dataclass(frozen=True)
class Tolerances:
    """Absolute length tolerance, angular tolerance and derived bands.

    ``eps_len=None`` means "scale with the instance": call :meth:`resolve`
    with the instance diameter to get a concrete value.
    """

    eps_len: float | None = None
    eps_ang: float = 1e-10
    eps_area: float = 1e-12
    eps_disc: float = 1e-12
    tol_omega: float = 1e-7

    def resolve(self, diameter: float) -> "Tolerances":
        if self.eps_len is not None:
            return self
        return replace(self, eps_len=EPS_LEN_REL * max(float(diameter), 1.0))

    @property
    def length(self) -> float:
        if self.eps_len is None:
            raise ValueError("tolerances not resolved; call resolve(diameter)")
        return self.eps_len

    def to_dict(self) -> dict:
        return {
            "eps_len": self.eps_len,
            "eps_ang": self.eps_ang,
            "eps_area": self.eps_area,
            "eps_disc": self.eps_disc,
            "tol_omega": self.tol_omega,
        }


DEFAULT = Tolerances()


def diameter(*point_sets) -> float:
    """Largest axis extent of the union of the given point arrays."""
    chunks = [np.asarray(p, dtype=float).reshape(-1, np.asarray(p).shape[-1])
              for p in point_sets if np.size(p)]
    if not chunks:
        return 1.0
    dim = max(c.shape[1] for c in chunks)
    pts = np.vstack([np.pad(c, ((0, 0), (0, dim - c.shape[1]))) for c in chunks])
    ext = pts.max(axis=0) - pts.min(axis=0)
    return float(np.linalg.norm(ext))


def resolve(tol: Tolerances | None, *point_sets) -> Tolerances:
    return (tol or DEFAULT).resolve(diameter(*point_sets))
