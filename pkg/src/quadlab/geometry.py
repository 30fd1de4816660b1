"""Norm geometry probes.

Two questions about a normed space are answered numerically: does the
norm come from an inner product (parallelogram law, with recovery of the
Gram matrix when it does), and which exponent patterns in the weighted
norm identity can vanish identically (only the all-squares pattern can).
"""

from __future__ import annotations

from itertools import product
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ParameterError, UndefinedValueError
from .quadratic import EquationParams
from .space import Sampler, SpaceSpec, norm_eval, sample_pairs_restricted


def parallelogram_defect(space: SpaceSpec, x, y):
    """``norm(x+y)^2 + norm(x-y)^2 - 2 norm(x)^2 - 2 norm(y)^2``.

    Zero for all pairs exactly when the norm comes from an inner product.
    Accepts single vectors (-> float) or equal-shape batches (-> array).
    """
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.shape != ys.shape:
        raise DimensionMismatchError(
            f"x and y must have equal shapes, got {xs.shape} and {ys.shape}"
        )
    out = (
        norm_eval(space, xs + ys) ** 2
        + norm_eval(space, xs - ys) ** 2
        - 2.0 * norm_eval(space, xs) ** 2
        - 2.0 * norm_eval(space, ys) ** 2
    )
    return out


@dataclass
class InnerProductVerdict:
    """Outcome of inner-product detection on a space.

    ``accepted`` means the normalized parallelogram defect stayed within
    tolerance on every tested pair.  On acceptance the Gram matrix is
    recovered from polarization of the basis vectors, cross-checked
    against the norm (``bilinearity_defect``), and its least eigenvalue
    reported.  ``basis_witness_max`` is the largest raw defect among
    basis-vector pairs; for common non-inner-product norms it is a clean
    nonzero witness (4 for the 1-norm plane).
    """

    accepted: bool
    max_defect: float
    max_normalized_defect: float
    basis_witness_max: float
    recovered_gram: np.ndarray | None
    bilinearity_defect: float | None
    gram_min_eigenvalue: float | None
    tol: float
    sample_count: int
    seed: int
    space: dict

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "max_defect": self.max_defect,
            "max_normalized_defect": self.max_normalized_defect,
            "basis_witness_max": self.basis_witness_max,
            "recovered_gram": None
            if self.recovered_gram is None
            else self.recovered_gram.tolist(),
            "bilinearity_defect": self.bilinearity_defect,
            "gram_min_eigenvalue": self.gram_min_eigenvalue,
            "tol": self.tol,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "space": dict(self.space),
        }


def recover_gram(space: SpaceSpec) -> np.ndarray:
    """Polarization of the basis: G[i, j] = (n(ei+ej)^2 - n(ei-ej)^2) / 4.

    Recovers the inner-product matrix exactly when the norm satisfies the
    parallelogram law; meaningless otherwise.
    """
    eye = np.eye(space.dim)
    plus = norm_eval(space, eye[:, None, :] + eye[None, :, :]) ** 2
    minus = norm_eval(space, eye[:, None, :] - eye[None, :, :]) ** 2
    return (plus - minus) / 4.0


def detect_inner_product(
    space: SpaceSpec, sampler: Sampler, tol: float = 1e-9
) -> InnerProductVerdict:
    """Decide whether the space's norm satisfies the parallelogram law.

    Tests all basis pairs plus sampled pairs; the decision statistic is the
    defect normalized by ``1 + norm(x)^2 + norm(y)^2``.  On acceptance the
    Gram matrix is recovered and cross-checked against the norm on the
    sampled points.
    """
    if not np.isfinite(tol) or tol <= 0:
        raise ParameterError(f"tol must be finite and > 0, got {tol!r}")
    xs, ys = sample_pairs_restricted(space, 0.0, sampler)

    eye = np.eye(space.dim)
    bi, bj = np.triu_indices(space.dim, k=1)
    basis_x = eye[bi]
    basis_y = eye[bj]

    all_x = np.vstack([basis_x, xs]) if basis_x.size else xs
    all_y = np.vstack([basis_y, ys]) if basis_y.size else ys

    defects = parallelogram_defect(space, all_x, all_y)
    defects = np.atleast_1d(defects)
    scales = 1.0 + norm_eval(space, all_x) ** 2 + norm_eval(space, all_y) ** 2
    normalized = np.abs(defects) / scales

    basis_witness_max = float(np.abs(defects[: basis_x.shape[0]]).max()) if basis_x.size else 0.0
    accepted = bool(normalized.max() <= tol)

    gram = None
    bil_defect = None
    min_eig = None
    if accepted:
        gram = recover_gram(space)
        quad = np.einsum("ni,ij,nj->n", xs, gram, xs)
        norms_sq = norm_eval(space, xs) ** 2
        bil_defect = float(
            (np.abs(norms_sq - quad) / (1.0 + norms_sq)).max()
        )
        min_eig = float(np.linalg.eigvalsh(gram).min())

    summary = space.describe()
    summary["quasi_norm"] = space.is_quasi_norm
    return InnerProductVerdict(
        accepted=accepted,
        max_defect=float(np.abs(defects).max()),
        max_normalized_defect=float(normalized.max()),
        basis_witness_max=basis_witness_max,
        recovered_gram=gram,
        bilinearity_defect=bil_defect,
        gram_min_eigenvalue=min_eig,
        tol=float(tol),
        sample_count=sampler.count,
        seed=sampler.seed,
        space=summary,
    )


@dataclass(frozen=True)
class Exponents:
    """Exponent pattern (p, q, u, v) for the weighted norm identity.

    All four must be nonzero; zero exponents would turn a power into a
    constant and are rejected up front.
    """

    p: float
    q: float
    u: float
    v: float

    def __post_init__(self):
        for name in ("p", "q", "u", "v"):
            value = getattr(self, name)
            if not np.isfinite(value) or value == 0.0:
                raise ParameterError(
                    f"exponent {name} must be finite and nonzero, got {value}"
                )
            object.__setattr__(self, name, float(value))

    def astuple(self) -> tuple[float, float, float, float]:
        return (self.p, self.q, self.u, self.v)

    def label(self) -> str:
        return ",".join(f"{e:g}" for e in self.astuple())


def _powers(base: np.ndarray, exponent: float, what: str) -> np.ndarray:
    """base ** exponent with an explicit error for 0 ** negative."""
    if exponent < 0 and np.any(base == 0.0):
        raise UndefinedValueError(
            f"{what} is zero and its exponent {exponent:g} is negative"
        )
    return base**exponent


def gq_norm_defect(
    space: SpaceSpec, params: EquationParams, exps: Exponents, x, y
):
    """Defect of the weighted norm identity with the given exponent pattern:

    ``n(rx+sy)^p + rs n(x-y)^q - r n(x)^u - s n(y)^v``

    With all exponents equal to 2 on an inner-product norm this vanishes
    identically; any other pattern admits pairs where it does not.
    Raises :class:`UndefinedValueError` when a zero norm meets a negative
    exponent.  Accepts single vectors (-> float) or batches (-> array).
    """
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.shape != ys.shape:
        raise DimensionMismatchError(
            f"x and y must have equal shapes, got {xs.shape} and {ys.shape}"
        )
    a = norm_eval(space, params.r * xs + params.s * ys)
    b = norm_eval(space, xs - ys)
    c = norm_eval(space, xs)
    d = norm_eval(space, ys)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    out = (
        _powers(a, exps.p, "norm(r x + s y)")
        + params.rs * _powers(b, exps.q, "norm(x - y)")
        - params.r * _powers(c, exps.u, "norm(x)")
        - params.s * _powers(d, exps.v, "norm(y)")
    )
    if out.ndim == 0:
        return float(out)
    return out


@dataclass
class ScanEntry:
    """One exponent pattern's scan result.

    ``sup_defect`` is None when every tested pair hit an undefined value;
    ``error`` carries the recorded undefined-value message, if any.
    """

    exponents: Exponents
    sup_defect: float | None
    excluded_witness_count: int
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "exponents": list(self.exponents.astuple()),
            "sup_defect": self.sup_defect,
            "excluded_witnesses": self.excluded_witness_count,
            "error": self.error,
        }


@dataclass
class ExponentScanTable:
    """Scan results over a grid of exponent patterns.

    ``flagged()`` lists the patterns whose sup defect stayed at or below
    ``tol`` — callers assert that only the all-squares pattern appears
    there (and that on non-inner-product norms nothing does).
    """

    entries: list[ScanEntry]
    tol: float
    sample_count: int
    seed: int

    def flagged(self) -> list[Exponents]:
        return [
            e.exponents
            for e in self.entries
            if e.sup_defect is not None and e.sup_defect <= self.tol
        ]

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "flagged": [list(e.astuple()) for e in self.flagged()],
            "tol": self.tol,
            "sample_count": self.sample_count,
            "seed": self.seed,
        }


def default_exponent_grid() -> list[Exponents]:
    """All 81 patterns with entries in {1, 2, 3}."""
    return [
        Exponents(p, q, u, v)
        for p, q, u, v in product((1.0, 2.0, 3.0), repeat=4)
    ]


def _scan_witness_pairs(space: SpaceSpec) -> list[tuple[np.ndarray, np.ndarray]]:
    """Structured pairs that separate exponent patterns at several scales.

    Built from a unit vector w (in the space's norm): (w, 0) and (0, w)
    expose the x- and y-exponents, (w, w) kills the difference term and
    ties the mixed-term exponent, each at scales 1/2, 1, 2 so that scale
    dependence rules out any pattern that merely coincides at one radius.
    """
    base = np.zeros(space.dim)
    base[0] = 1.0
    unit = base / norm_eval(space, base)
    zero = np.zeros(space.dim)
    pairs = []
    for t in (0.5, 1.0, 2.0):
        w = t * unit
        pairs.extend([(w, zero), (w, w), (zero, w)])
    return pairs


def exponent_scan(
    space: SpaceSpec,
    params: EquationParams,
    grid: list[Exponents],
    sampler: Sampler,
    tol: float = 1e-9,
) -> ExponentScanTable:
    """Sup of |weighted norm identity defect| per exponent pattern.

    Every pattern sees the same structured witnesses plus one shared batch
    of sampled pairs.  Witness pairs that hit a zero norm under a negative
    exponent are skipped and counted; an undefined value on the sampled
    batch is recorded as the pattern's error and the scan moves on.
    """
    if not grid:
        raise ParameterError("exponent grid must be nonempty")
    if not np.isfinite(tol) or tol <= 0:
        raise ParameterError(f"tol must be finite and > 0, got {tol!r}")
    xs, ys = sample_pairs_restricted(space, 0.0, sampler)
    witnesses = _scan_witness_pairs(space)

    entries = []
    for exps in grid:
        sup = 0.0
        excluded = 0
        error = None
        for wx, wy in witnesses:
            try:
                sup = max(sup, abs(gq_norm_defect(space, params, exps, wx, wy)))
            except UndefinedValueError:
                excluded += 1
        try:
            defects = gq_norm_defect(space, params, exps, xs, ys)
            sup = max(sup, float(np.abs(defects).max()))
            entries.append(ScanEntry(exps, sup, excluded))
        except UndefinedValueError as exc:
            entries.append(ScanEntry(exps, None, excluded, error=str(exc)))
    return ExponentScanTable(
        entries=entries,
        tol=float(tol),
        sample_count=sampler.count,
        seed=sampler.seed,
    )
