"""Stability machinery for the weighted functional equation.

Given a map whose weighted-equation residual is small on the restricted
region ``norm(x) + norm(y) >= d``, an exactly quadratic map sits nearby.
This module computes the explicit closed-form constants of that guarantee,
extracts the nearby quadratic map pointwise by a dyadic limit, estimates
the restricted defect by sampling, and bundles everything into a
pass/fail certificate.  A separate routine checks the classical
(unweighted) half-defect bound and the t^2-homogeneity of the extracted
limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, ExtractionError, ParameterError
from .quadratic import EquationParams, as_map, residual_gq, residual_q
from .space import (
    STREAM_PROBES,
    Sampler,
    SpaceSpec,
    _unit_rows,
    generator,
    sample_pairs_restricted,
)

# Slack applied to pass/fail comparisons so a bound met exactly in real
# arithmetic is not rejected over the last float of either side.
_PASS_SLACK = 1e-9

# How many of the restricted sample points join the unit-sphere probes.
_RESTRICTED_PROBES = 32


@dataclass(frozen=True)
class StabilityConstants:
    """Closed-form constants attached to one (d, delta, weights) instance.

    ``near_origin_bound`` (M) bounds the defect of the classical equation
    on the missing region ``norm(x) + norm(y) < d`` once the weighted
    residual is bounded by delta outside it; ``global_q_bound`` (K = 4 M)
    is the resulting everywhere-bound used by the unrestricted argument.
    ``c_restricted`` and ``c_global`` bound the distance from the map to
    its extracted quadratic limit when the defect bound holds on the
    restricted region / everywhere, and ``c_approx`` is the sharpened
    half of ``c_global`` delivered by the certification path.
    """

    d: float
    delta: float
    near_origin_bound: float
    global_q_bound: float
    c_restricted: float
    c_global: float
    c_approx: float

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "delta": self.delta,
            "M": self.near_origin_bound,
            "K": self.global_q_bound,
            "C_restricted": self.c_restricted,
            "C_global": self.c_global,
            "C_approx": self.c_approx,
        }


def stability_constants(params: EquationParams, d: float, delta: float) -> StabilityConstants:
    """Evaluate the closed-form stability constants.

    With weights (r, s) and shape factor ``(2 + |r| + |s|) / |r s|``:

    * ``M = 4 d (1/|r| + |1 - 1/|r||)``
    * ``K = 4 M``
    * ``C_restricted = 4 * shape * delta``
    * ``C_global     = 19 * shape * delta``
    * ``C_approx     = C_global / 2``
    """
    if not np.isfinite(d) or d < 0:
        raise ParameterError(f"restriction threshold d must be finite and >= 0, got {d!r}")
    if not np.isfinite(delta) or delta < 0:
        raise ParameterError(f"defect bound delta must be finite and >= 0, got {delta!r}")
    inv_r = 1.0 / abs(params.r)
    near = 4.0 * d * (inv_r + abs(1.0 - inv_r))
    shape = (2.0 + abs(params.r) + abs(params.s)) / abs(params.rs)
    c_global = 19.0 * shape * delta
    return StabilityConstants(
        d=float(d),
        delta=float(delta),
        near_origin_bound=near,
        global_q_bound=4.0 * near,
        c_restricted=4.0 * shape * delta,
        c_global=c_global,
        c_approx=c_global / 2.0,
    )


@dataclass
class ExtractionDiagnostics:
    """Convergence record of one dyadic limit extraction.

    ``deviations[n-1]`` is the distance between iterates n and n-1;
    ``converged`` holds exactly when the final deviation is at or below
    ``tol * (1 + norm(limit))``.  ``tail_estimate`` extrapolates the
    remaining error assuming the quarter-ratio decay that bounded
    perturbations produce.
    """

    iterations: int
    deviations: list[float] = field(default_factory=list)
    converged: bool = False
    tol: float = 0.0
    tail_estimate: float = float("nan")


def extract_quadratic(f, x, max_iters: int = 26, tol: float = 1e-10):
    """Pointwise dyadic limit ``lim_n f(2^n x) / 4^n``.

    Returns ``(value, diagnostics)``.  The iteration stops once successive
    iterates agree to relative ``tol``, or after ``max_iters`` doublings.
    Tabulated maps are rejected (they cannot be evaluated at scaled
    arguments); a non-finite evaluation raises :class:`ExtractionError`
    carrying the diagnostics gathered so far.
    """
    handle = as_map(f)
    if handle.tabulated:
        raise ParameterError(
            "cannot extract a limit from a tabulated map: scaled arguments "
            "fall outside its table"
        )
    if not isinstance(max_iters, (int, np.integer)) or max_iters < 1:
        raise ParameterError(f"max_iters must be a positive integer, got {max_iters!r}")
    if not np.isfinite(tol) or tol <= 0:
        raise ParameterError(f"tol must be finite and > 0, got {tol!r}")
    point = np.asarray(x, dtype=np.float64)
    if point.ndim != 1 or point.shape[0] != handle.domain_dim:
        raise DimensionMismatchError(
            f"extraction point must be a vector of length {handle.domain_dim}, "
            f"got shape {point.shape}"
        )
    prev = handle(point)
    diag = ExtractionDiagnostics(iterations=0, tol=float(tol))
    if not np.all(np.isfinite(prev)):
        raise ExtractionError("map value at the base point is not finite", diag)
    converged = False
    current = prev
    for n in range(1, max_iters + 1):
        value = handle(point * 2.0**n)
        diag.iterations = n
        if not np.all(np.isfinite(value)):
            raise ExtractionError(
                f"map value became non-finite at scale 2**{n}", diag
            )
        current = value / 4.0**n
        dev = float(np.linalg.norm(current - prev))
        diag.deviations.append(dev)
        prev = current
        scale = float(np.linalg.norm(current))
        # Norms of huge finite iterates can overflow to inf; an infinite
        # deviation or scale must read as divergence, not convergence.
        if np.isfinite(dev) and np.isfinite(scale) and dev <= tol * (1.0 + scale):
            converged = True
            break
    diag.converged = converged
    # Quarter-ratio geometric tail: sum_{k>=1} dev * 4^-k = dev / 3.
    diag.tail_estimate = diag.deviations[-1] / 3.0 if diag.deviations else 0.0
    return current, diag


def _codomain_norms(values: np.ndarray, codomain: SpaceSpec | None) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(values, dtype=np.float64))
    if codomain is None:
        return np.sqrt(np.sum(rows * rows, axis=-1))
    return np.atleast_1d(codomain.norm(rows))


def estimate_delta_restricted(
    f,
    params: EquationParams,
    d: float,
    space: SpaceSpec,
    sampler: Sampler,
    codomain: SpaceSpec | None = None,
) -> float:
    """Empirical sup of the weighted residual norm over sampled restricted pairs.

    This is a lower estimate of the true restricted sup: it sees only pairs
    inside the sampler's ball.  For noise with a known sup it lands within
    the triangle-inequality ceiling ``(1 + |rs| + |r| + |s|) * sup``.
    """
    handle = as_map(f)
    if handle.domain_dim != space.dim:
        raise DimensionMismatchError(
            f"map domain {handle.domain_dim} does not match space dim {space.dim}"
        )
    xs, ys = sample_pairs_restricted(space, d, sampler)
    res = residual_gq(handle, params, xs, ys)
    return float(_codomain_norms(res, codomain).max())


@dataclass
class StabilityCertificate:
    """Outcome of one certification run.

    ``passed`` is True/False for a completed comparison and None when the
    run was inconclusive (some probe's limit extraction failed).  The
    comparison is ``max_deviation <= c_approx + 1e-9 * (1 + c_approx)``.
    """

    params: EquationParams
    d: float
    constants: StabilityConstants
    delta_hat: float
    delta_source: str
    probe_count: int
    evenness_defect: float
    max_deviation: float | None
    bound_used: float
    passed: bool | None
    inconclusive: bool
    warnings: list[str]
    sample_count: int
    seed: int
    max_iters: int
    tol: float
    extraction_iterations_max: int

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "d": self.d,
            "constants": self.constants.to_dict(),
            "delta_hat": self.delta_hat,
            "delta_source": self.delta_source,
            "probe_count": self.probe_count,
            "evenness_defect": self.evenness_defect,
            "max_deviation": self.max_deviation,
            "bound_used": self.bound_used,
            "pass": self.passed,
            "inconclusive": self.inconclusive,
            "warnings": list(self.warnings),
            "sample_count": self.sample_count,
            "seed": self.seed,
            "max_iters": self.max_iters,
            "tol": self.tol,
            "extraction_iterations_max": self.extraction_iterations_max,
        }


def certify(
    f,
    params: EquationParams,
    d: float,
    space: SpaceSpec,
    sampler: Sampler,
    *,
    max_iters: int = 26,
    tol: float = 1e-10,
    delta_override: float | None = None,
    probe_count: int = 32,
    codomain: SpaceSpec | None = None,
) -> StabilityCertificate:
    """End-to-end stability certification.

    Estimates the restricted defect (unless ``delta_override`` pins it),
    evaluates the constants, extracts the dyadic limit at unit-sphere
    probes plus the first sampled restricted points, and compares the
    worst observed distance against the sharpened bound ``c_approx``.

    A probe whose extraction blows up makes the certificate inconclusive
    rather than failed; warnings flag small ``|r s|``, quasi-norm domains,
    visibly uneven maps, and non-converged extractions.
    """
    handle = as_map(f)
    if handle.domain_dim != space.dim:
        raise DimensionMismatchError(
            f"map domain {handle.domain_dim} does not match space dim {space.dim}"
        )
    if probe_count < 1:
        raise ParameterError(f"probe_count must be >= 1, got {probe_count}")
    warnings_: list[str] = []
    if params.small_rs:
        warnings_.append(
            f"|r*s| = {abs(params.rs):.3e} is small; stability constants are "
            "inflated by its reciprocal"
        )
    if space.is_quasi_norm:
        warnings_.append(
            f"domain norm p={space.p} is a quasi-norm (p < 1); the guarantees "
            "assume a genuine norm"
        )

    xs, ys = sample_pairs_restricted(space, d, sampler)
    res = residual_gq(handle, params, xs, ys)
    delta_hat = float(_codomain_norms(res, codomain).max())
    if delta_override is not None:
        if not np.isfinite(delta_override) or delta_override < 0:
            raise ParameterError(
                f"delta_override must be finite and >= 0, got {delta_override!r}"
            )
        delta_used = float(delta_override)
        delta_source = "override"
    else:
        delta_used = delta_hat
        delta_source = "empirical"
    constants = stability_constants(params, d, delta_used)

    unit = _unit_rows(space, generator(sampler.seed, STREAM_PROBES), probe_count)
    probes = np.vstack([unit, xs[: min(_RESTRICTED_PROBES, xs.shape[0])]])

    f_probes = handle(probes)
    evenness = float(_codomain_norms(f_probes - handle(-probes), codomain).max())
    probe_scale = float(_codomain_norms(f_probes, codomain).max())
    if evenness > 1e-9 * (1.0 + probe_scale):
        warnings_.append(
            f"map is visibly uneven at the probes (defect {evenness:.3e}); "
            "only its even part is certified against the quadratic limit"
        )

    limits = np.empty_like(f_probes)
    iters_max = 0
    inconclusive = False
    all_converged = True
    for i in range(probes.shape[0]):
        try:
            limits[i], diag = extract_quadratic(
                handle, probes[i], max_iters=max_iters, tol=tol
            )
        except ExtractionError as exc:
            warnings_.append(f"extraction failed at probe {i}: {exc}")
            inconclusive = True
            break
        iters_max = max(iters_max, diag.iterations)
        all_converged = all_converged and diag.converged
    if not inconclusive and not all_converged:
        warnings_.append(
            f"some extractions did not reach relative tol {tol:g} within "
            f"{max_iters} doublings"
        )

    if inconclusive:
        max_deviation = None
        passed = None
    else:
        max_deviation = float(_codomain_norms(f_probes - limits, codomain).max())
        passed = bool(
            max_deviation <= constants.c_approx + _PASS_SLACK * (1.0 + constants.c_approx)
        )

    return StabilityCertificate(
        params=params,
        d=float(d),
        constants=constants,
        delta_hat=delta_hat,
        delta_source=delta_source,
        probe_count=probes.shape[0],
        evenness_defect=evenness,
        max_deviation=max_deviation,
        bound_used=constants.c_approx,
        passed=passed,
        inconclusive=inconclusive,
        warnings=warnings_,
        sample_count=sampler.count,
        seed=sampler.seed,
        max_iters=max_iters,
        tol=tol,
        extraction_iterations_max=iters_max,
    )


@dataclass
class CzerwikReport:
    """Half-defect check for the classical equation.

    For any map with classical residual bounded by ``delta_hat``, the
    dyadic limit is quadratic and within ``delta_hat / 2`` of the map; the
    report records the observed worst distance, whether it is within the
    half bound, and how far the limit is from exact ``t^2``-homogeneity at
    a few scales.
    """

    delta_hat: float
    bound: float
    max_deviation: float
    within_bound: bool
    homogeneity_defects: dict[float, float]
    homogeneity_ok: bool
    probe_count: int
    sample_count: int
    seed: int
    warnings: list[str]

    def to_dict(self) -> dict:
        return {
            "delta_hat": self.delta_hat,
            "bound": self.bound,
            "max_deviation": self.max_deviation,
            "within_bound": self.within_bound,
            "homogeneity_defects": {str(t): v for t, v in self.homogeneity_defects.items()},
            "homogeneity_ok": self.homogeneity_ok,
            "probe_count": self.probe_count,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "warnings": list(self.warnings),
        }


def verify_czerwik(
    f,
    space: SpaceSpec,
    sampler: Sampler,
    *,
    max_iters: int = 26,
    tol: float = 1e-9,
    scales: tuple[float, ...] = (0.5, 2.0, 3.0),
    probe_count: int = 32,
    codomain: SpaceSpec | None = None,
) -> CzerwikReport:
    """Check the classical half-defect bound and limit homogeneity.

    Unconstrained pairs estimate the classical defect sup ``delta_hat``;
    the dyadic limit is extracted at unit-sphere probes plus sampled
    points and compared against ``delta_hat / 2``; then the limit is
    re-extracted at ``t * probe`` and compared with ``t^2`` times the base
    limit for each scale ``t``.
    """
    handle = as_map(f)
    if handle.domain_dim != space.dim:
        raise DimensionMismatchError(
            f"map domain {handle.domain_dim} does not match space dim {space.dim}"
        )
    warnings_: list[str] = []
    if space.is_quasi_norm:
        warnings_.append(f"domain norm p={space.p} is a quasi-norm (p < 1)")

    xs, ys = sample_pairs_restricted(space, 0.0, sampler)
    delta_hat = float(_codomain_norms(residual_q(handle, xs, ys), codomain).max())

    unit = _unit_rows(space, generator(sampler.seed, STREAM_PROBES), probe_count)
    probes = np.vstack([unit, xs[: min(_RESTRICTED_PROBES, xs.shape[0])]])
    f_probes = handle(probes)

    base = np.empty_like(f_probes)
    for i in range(probes.shape[0]):
        base[i], _ = extract_quadratic(handle, probes[i], max_iters=max_iters, tol=tol)
    max_deviation = float(_codomain_norms(f_probes - base, codomain).max())
    bound = delta_hat / 2.0
    within = bool(max_deviation <= bound + _PASS_SLACK * (1.0 + bound))

    base_scale = float(_codomain_norms(base, codomain).max())
    hom_defects: dict[float, float] = {}
    hom_ok = True
    for t in scales:
        scaled = np.empty_like(f_probes)
        for i in range(probes.shape[0]):
            scaled[i], _ = extract_quadratic(
                handle, t * probes[i], max_iters=max_iters, tol=tol
            )
        defect = float(_codomain_norms(scaled - t * t * base, codomain).max())
        hom_defects[float(t)] = defect
        hom_ok = hom_ok and defect <= 1e-8 * (1.0 + t * t * base_scale)

    return CzerwikReport(
        delta_hat=delta_hat,
        bound=bound,
        max_deviation=max_deviation,
        within_bound=within,
        homogeneity_defects=hom_defects,
        homogeneity_ok=hom_ok,
        probe_count=probes.shape[0],
        sample_count=sampler.count,
        seed=sampler.seed,
        warnings=warnings_,
    )
