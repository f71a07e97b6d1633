"""Labeled Fisher information matrices and bound-report containers.

FimMatrix validates the symmetry/positive-semidefiniteness every assembled
information matrix must satisfy; schur_complement eliminates trailing
nuisance-parameter blocks; Bound/BoundPair/CrbReport carry bound values
together with an explicit singularity flag so that rank-deficient scenarios
(no unbiased estimator) produce flagged results instead of exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.linalg

SYMMETRY_RTOL = 1e-12
PSD_RTOL = 1e-10
SINGULAR_COND = 1e12

METHOD_CLOSED_FORM = "closed_form"
METHOD_SCHUR_NUMERIC = "schur_numeric"
METHOD_ORACLE = "oracle"
METHOD_MONTE_CARLO = "monte_carlo"


class SingularFimError(np.linalg.LinAlgError):
    """Raised when a nuisance block that must be inverted is singular."""


@dataclass(frozen=True)
class FimMatrix:
    """Real symmetric PSD Fisher information matrix with parameter labels."""

    entries: np.ndarray
    labels: tuple[str, ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        labels = tuple(self.labels)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("FIM must be square")
        if len(labels) != entries.shape[0]:
            raise ValueError("one label per parameter required")
        scale = float(np.max(np.abs(entries))) if entries.size else 0.0
        asym = float(np.max(np.abs(entries - entries.T))) if entries.size else 0.0
        if asym > SYMMETRY_RTOL * max(scale, 1e-300):
            raise ValueError(f"FIM not symmetric: |A - A^T| = {asym:.3e}")
        eigs = np.linalg.eigvalsh(entries)
        eigmin = float(eigs[0])
        spec = float(np.max(np.abs(eigs))) if scale else 0.0
        if eigmin < -PSD_RTOL * max(spec, 1e-300):
            raise ValueError(f"FIM not positive semidefinite: lambda_min = {eigmin:.3e}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def submatrix(self, labels) -> np.ndarray:
        idx = [self.index(lbl) for lbl in labels]
        return self.entries[np.ix_(idx, idx)]

    def drop(self, label: str) -> "FimMatrix":
        """FIM with one parameter removed (treated as known, not eliminated)."""
        keep = [i for i, lbl in enumerate(self.labels) if lbl != label]
        return FimMatrix(self.entries[np.ix_(keep, keep)],
                         tuple(self.labels[i] for i in keep), dict(self.meta))


def schur_complement(fim: FimMatrix, keep: int = 2) -> np.ndarray:
    """Eliminate the trailing nuisance block: A - B C^{-1} B^T.

    keep is the size of the leading parameter block that survives. Raises
    SingularFimError when the nuisance block C is not invertible
    (condition estimate above 1e12); a singular *result* is legitimate
    and left to the caller to detect.
    """
    e = fim.entries
    if keep < 1 or keep > fim.dim:
        raise ValueError("keep must be between 1 and the FIM dimension")
    a = e[:keep, :keep]
    if keep == fim.dim:
        return a.copy()
    b = e[:keep, keep:]
    c = e[keep:, keep:]
    c_eigs = np.linalg.eigvalsh(c)
    if c_eigs[0] <= abs(c_eigs[-1]) / SINGULAR_COND:
        raise SingularFimError("nuisance block is singular")
    x = scipy.linalg.solve(c, b.T, assume_a="sym")
    out = a - b @ x
    return 0.5 * (out + out.T)


def schur_complement_2x2(fim: FimMatrix) -> np.ndarray:
    """Schur complement keeping the leading (tau0, f0) block."""
    return schur_complement(fim, keep=2)


def invert_bound_matrix(reduced: np.ndarray, scale: float | None = None) -> np.ndarray | None:
    """Invert an eliminated parameter block; None when it is singular.

    scale sets the magnitude against which "singular" is judged (pass the
    parent FIM's leading-block norm so that an exactly-eliminated block,
    left as rounding noise, is recognized); defaults to the block's own norm.
    """
    if not np.all(np.isfinite(reduced)):
        return None
    if scale is None:
        scale = float(np.max(np.abs(reduced)))
    sym = 0.5 * (reduced + reduced.T)
    eigs = np.linalg.eigvalsh(sym)
    if np.min(eigs) <= max(scale, 1e-300) / SINGULAR_COND:
        return None
    return np.linalg.inv(sym)


@dataclass(frozen=True)
class Bound:
    """A single variance lower bound; infinite and flagged when singular."""

    value: float
    singular: bool = False
    note: str = ""

    def __float__(self) -> float:
        return self.value

    @classmethod
    def singular_bound(cls, note: str) -> "Bound":
        return cls(value=float("inf"), singular=True, note=note)


@dataclass(frozen=True)
class BoundPair:
    """Delay and Doppler bounds from one formula path."""

    tau0: float
    f0: float
    singular: bool = False
    note: str = ""

    def __iter__(self) -> Iterator[float]:
        return iter((self.tau0, self.f0))

    def scaled(self, factor: float) -> "BoundPair":
        return BoundPair(self.tau0 * factor, self.f0 * factor,
                         self.singular, self.note)

    @classmethod
    def singular_pair(cls, note: str) -> "BoundPair":
        return cls(tau0=float("inf"), f0=float("inf"), singular=True, note=note)


@dataclass(frozen=True)
class CrbReport:
    """Named bound values plus provenance of the formula path that made them.

    All values are positive and finite unless the singular flag is set, in
    which case no unbiased estimator exists and values are infinite.
    """

    values: dict
    method: str
    singular: bool = False
    scenario: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.singular:
            for name, value in self.values.items():
                if not (np.isfinite(value) and value > 0):
                    raise ValueError(
                        f"bound {name}={value} not positive finite and not flagged singular")
