"""Horn satisfiability by positive unit resolution.

Each clause keeps a counter of negated variables not yet implied; when the
counter reaches zero the clause fires and its positive literal joins the
queue (Dowling-Gallier).  Every variable enters the queue at most once and
every body literal is decremented at most once, so a solve is linear in the
number of literals.

The backbone here is the least fixpoint of the definite clauses: variables
forced true from the positive units, ignoring clauses with no positive
literal.  The formula is unsatisfiable exactly when some clause without a
positive literal has all of its variables in the backbone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formula import HornFormula
from .kernels import propagate


@dataclass(frozen=True)
class SolveResult:
    satisfiable: bool
    backbone: np.ndarray  # sorted variable ids, read-only
    steps: int

    @property
    def backbone_size(self) -> int:
        return int(self.backbone.size)

    @property
    def backbone_set(self) -> frozenset[int]:
        return frozenset(self.backbone.tolist())

    @property
    def verdict(self) -> str:
        return "SATISFIABLE" if self.satisfiable else "UNSATISFIABLE"


def solve(f: HornFormula, backend: str | None = None, shuffle_seed: int | None = None) -> SolveResult:
    """Decide ``f`` and return its backbone.

    ``shuffle_seed`` pops pending variables in a seeded random order instead
    of FIFO (numba backend only); the verdict and backbone are unaffected.
    """
    implied, _, rounds, conflict = propagate(
        f.n, f.heads, f.body_ptr, f.body, backend=backend,
        shuffle_seed=-1 if shuffle_seed is None else int(shuffle_seed),
    )
    backbone = np.flatnonzero(implied).astype(np.int64)
    backbone.setflags(write=False)
    return SolveResult(satisfiable=not conflict, backbone=backbone, steps=int(rounds))


def backbone_fraction(f: HornFormula, backend: str | None = None) -> float:
    if f.n == 0:
        return 0.0
    _, size, _, _ = propagate(f.n, f.heads, f.body_ptr, f.body, backend=backend)
    return size / f.n


def least_model(f: HornFormula) -> np.ndarray:
    """Boolean assignment (length n+1) making exactly the backbone true."""
    a = np.zeros(f.n + 1, dtype=bool)
    a[solve(f).backbone] = True
    return a


__all__ = ["SolveResult", "backbone_fraction", "least_model", "solve"]
