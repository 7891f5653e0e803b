"""Quasi-probabilities for a pair of yes-no measurements.

Conventions: ``a`` is the projector measured first, ``b`` second. The
Kirkwood-Dirac value is ``Tr(rho a b)`` with the first-measured projector
leftmost; swapping the arguments conjugates it. The Margenau-Hill value is
its real part, written in the manifestly order-symmetric form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import MarginalityViolation, NonRealTrace
from .hilbert import Pvm, _check_dims, as_matrix
from .measurement import (
    IMAG_TOL,
    _trace_product,
    luders_map,
    phase_rotate,
    probability,
    wigner_joint,
)

TABLE_TOL = 1e-10

Kind = Literal["margenau_hill", "kirkwood_dirac", "wigner_rule", "factorized"]
KINDS: tuple[str, ...] = ("margenau_hill", "kirkwood_dirac", "wigner_rule", "factorized")

__all__ = [
    "TABLE_TOL",
    "KINDS",
    "QuasiProbTable",
    "mh",
    "disturbance",
    "mh_via_disturbance",
    "kd",
    "kd_imag_via_phase",
    "factorized_joint",
    "mh_table",
    "kd_table",
    "wigner_table",
    "factorized_table",
]


def mh(rho, a, b) -> float:
    """Margenau-Hill value ``Tr[rho (ab + ba)] / 2``."""
    r, pa, pb = as_matrix(rho), as_matrix(a), as_matrix(b)
    _check_dims(r, pa, pb)
    raw = 0.5 * _trace_product(r, pa @ pb + pb @ pa)
    if abs(raw.imag) > IMAG_TOL:
        raise NonRealTrace(f"Margenau-Hill value has imaginary part {raw.imag:.3e}", value=raw.imag)
    return raw.real


def disturbance(rho, a, b) -> float:
    """Half the change of the ``b`` probability caused by measuring ``a`` first."""
    return 0.5 * (probability(rho, b) - probability(luders_map(rho, a), b))


def mh_via_disturbance(rho, a, b) -> float:
    """Sequential probability plus disturbance correction; equals :func:`mh`."""
    return wigner_joint(rho, a, b) + disturbance(rho, a, b)


def kd(rho, a, b) -> complex:
    """Kirkwood-Dirac value ``Tr(rho a b)``."""
    r, pa, pb = as_matrix(rho), as_matrix(a), as_matrix(b)
    _check_dims(r, pa, pb)
    return _trace_product(r, pa @ pb)


def kd_imag_via_phase(rho, a, b) -> float:
    """Imaginary part of :func:`kd` rebuilt from a quarter-turn selective phase rotation."""
    rotated = phase_rotate(rho, a, np.pi / 2)
    return 0.5 * (probability(rotated, b) - probability(luders_map(rho, a), b))


def factorized_joint(rho, a, b) -> float:
    """Product of marginals; correct marginals but not the sequential rule."""
    return probability(rho, a) * probability(rho, b)


# -- tables ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuasiProbTable:
    """Quasi-probabilities over two PVMs.

    ``values[i, j]`` pairs element ``i`` of ``pvm_a`` (measured first) with
    element ``j`` of ``pvm_b``. ``row_probs``/``col_probs`` are the state's
    marginal probabilities the table is checked against.
    """

    kind: str
    values: np.ndarray
    row_probs: np.ndarray
    col_probs: np.ndarray
    pvm_a: Pvm | None = field(default=None, repr=False)
    pvm_b: Pvm | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown table kind {self.kind!r}")
        for name in ("values", "row_probs", "col_probs"):
            arr = np.array(getattr(self, name), dtype=np.complex128 if name == "values" else float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        if self.pvm_a is not None:
            return self.pvm_a.dim
        return int(max(self.values.shape))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def row_sums(self) -> np.ndarray:
        return self.values.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.values.sum(axis=0)

    @property
    def total(self) -> complex:
        return complex(self.values.sum())

    def violations(self) -> dict[str, float]:
        """Magnitude of each invariant's violation (0 for a perfect table)."""
        out = {
            "total": abs(self.total - 1.0),
            "row_marginals": float(np.max(np.abs(self.row_sums - self.row_probs))),
            "col_marginals": float(np.max(np.abs(self.col_sums - self.col_probs))),
            "imaginary": float(np.max(np.abs(self.values.imag))),
            "negativity": float(max(0.0, -np.min(self.values.real))),
        }
        return out

    def check(self, tol: float = TABLE_TOL) -> "QuasiProbTable":
        """Enforce the invariants of this table's kind; returns self."""
        v = self.violations()
        checked = ["total", "row_marginals"]
        if self.kind != "wigner_rule":
            checked.append("col_marginals")
        if self.kind != "kirkwood_dirac":
            checked.append("imaginary")
        if self.kind == "wigner_rule":
            checked.append("negativity")
        for name in checked:
            if v[name] > tol:
                raise MarginalityViolation(
                    f"{self.kind} table violates {name} by {v[name]:.3e}", value=v[name], invariant=name
                )
        return self

    def min_entry(self) -> float:
        return float(np.min(self.values.real))

    def max_imag(self) -> float:
        return float(np.max(np.abs(self.values.imag)))


def _fill(rho, pa: Pvm, pb: Pvm, kind: str, fn) -> QuasiProbTable:
    r = as_matrix(rho)
    _check_dims(r, pa[0].matrix, pb[0].matrix)
    vals = np.array([[fn(r, ai.matrix, bj.matrix) for bj in pb] for ai in pa], dtype=np.complex128)
    rows = np.array([probability(r, ai) for ai in pa])
    cols = np.array([probability(r, bj) for bj in pb])
    return QuasiProbTable(kind, vals, rows, cols, pa, pb)


def mh_table(rho, pa: Pvm, pb: Pvm, tol: float = TABLE_TOL) -> QuasiProbTable:
    return _fill(rho, pa, pb, "margenau_hill", mh).check(tol)


def kd_table(rho, pa: Pvm, pb: Pvm, tol: float = TABLE_TOL) -> QuasiProbTable:
    return _fill(rho, pa, pb, "kirkwood_dirac", kd).check(tol)


def wigner_table(rho, pa: Pvm, pb: Pvm, tol: float = TABLE_TOL) -> QuasiProbTable:
    """Sequential-rule table; its column sums differ from ``Tr(rho b_j)`` under disturbance."""
    return _fill(rho, pa, pb, "wigner_rule", wigner_joint).check(tol)


def factorized_table(rho, pa: Pvm, pb: Pvm, tol: float = TABLE_TOL) -> QuasiProbTable:
    return _fill(rho, pa, pb, "factorized", factorized_joint).check(tol)
