"""Shell-resolved defect profiles and asymptotic verdicts.

The restricted-domain story says behavior far from the origin is what
matters.  These routines slice the region by the joint radius
``norm(x) + norm(y)``, measure the worst weighted-equation residual per
shell, and classify the profile: defects that die off toward the outer
shells (asymptotically quadratic), defects that persist at a fixed level,
or neither (inconclusive).

The verdict discretizes an asymptotic statement through a finite window,
so its thresholds are calibration choices, not theorems; they are pinned
as explicit constants below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ParameterError
from .quadratic import EquationParams, as_map, residual_gq
from .space import STREAM_SHELL, SpaceSpec, _unit_rows, generator, norm_eval

VERDICT_DECAYING = "asymptotically_quadratic"
VERDICT_PERSISTENT = "persistent_defect"
VERDICT_INCONCLUSIVE = "inconclusive"

# A profile counts as non-decreasing if each step loses no more than this
# relative slack (flat profiles wiggle at rounding level).
_MONOTONE_SLACK = 1e-6

# Relative margin keeping sampled joint radii strictly inside a shell.
_SHELL_MARGIN = 1e-9

_MIN_SHELLS = 4


@dataclass
class ShellProfile:
    """Per-shell sup of the weighted residual norm.

    Shell ``k`` covers joint radii ``norm(x) + norm(y)`` in
    ``[n_min + k, n_min + k + 1)``; ``deltas[k]`` is the max residual norm
    among that shell's sampled pairs.
    """

    n_min: int
    n_max: int
    deltas: np.ndarray
    per_shell_count: int
    seed: int

    @property
    def shell_count(self) -> int:
        return self.n_max - self.n_min + 1

    def shells(self) -> list[tuple[float, float]]:
        return [(float(n), float(n + 1)) for n in range(self.n_min, self.n_max + 1)]

    def to_dict(self) -> dict:
        return {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "deltas": self.deltas.tolist(),
            "per_shell_count": self.per_shell_count,
            "seed": self.seed,
        }


def shell_delta_profile(
    f,
    params: EquationParams,
    space: SpaceSpec,
    n_min: int,
    n_max: int,
    per_shell_count: int,
    seed: int,
    codomain: SpaceSpec | None = None,
) -> ShellProfile:
    """Sample each shell and record its worst residual norm.

    Each sampled pair takes a joint radius ``t`` uniform in its shell
    (with a tiny interior margin so rounding cannot push a pair across
    the boundary), splits it as ``norm(x) = a t``, ``norm(y) = (1-a) t``
    with ``a`` uniform, and draws independent directions.
    """
    handle = as_map(f)
    if handle.domain_dim != space.dim:
        raise DimensionMismatchError(
            f"map domain {handle.domain_dim} does not match space dim {space.dim}"
        )
    if not isinstance(n_min, (int, np.integer)) or not isinstance(n_max, (int, np.integer)):
        raise ParameterError(f"shell indices must be integers, got {n_min!r}, {n_max!r}")
    if n_min < 0:
        raise ParameterError(f"n_min must be >= 0, got {n_min}")
    if n_max <= n_min:
        raise ParameterError(f"need n_max > n_min, got [{n_min}, {n_max}]")
    shell_count = n_max - n_min + 1
    if not isinstance(per_shell_count, (int, np.integer)) or per_shell_count < 1:
        raise ParameterError(
            f"per_shell_count must be a positive integer, got {per_shell_count!r}"
        )
    rng = generator(seed, STREAM_SHELL)
    deltas = np.empty(shell_count)
    for k, n in enumerate(range(int(n_min), int(n_max) + 1)):
        lo = n + _SHELL_MARGIN * (1.0 + n)
        hi = (n + 1) - _SHELL_MARGIN * (2.0 + n)
        t = rng.uniform(lo, hi, per_shell_count)
        split = rng.uniform(0.0, 1.0, per_shell_count)
        dx = _unit_rows(space, rng, per_shell_count)
        dy = _unit_rows(space, rng, per_shell_count)
        xs = (split * t)[:, None] * dx
        ys = ((1.0 - split) * t)[:, None] * dy
        joint = norm_eval(space, xs) + norm_eval(space, ys)
        if np.any(joint < n) or np.any(joint >= n + 1):
            raise RuntimeError(
                f"shell sampler drifted outside [{n}, {n + 1}) despite margin"
            )
        res = residual_gq(handle, params, xs, ys)
        if codomain is None:
            norms = np.sqrt(np.sum(res * res, axis=-1))
        else:
            norms = np.atleast_1d(codomain.norm(res))
        deltas[k] = norms.max()
    return ShellProfile(
        n_min=int(n_min),
        n_max=int(n_max),
        deltas=deltas,
        per_shell_count=int(per_shell_count),
        seed=int(seed),
    )


@dataclass
class AsymptoticVerdict:
    """Classification of a shell profile.

    ``asymptotically_quadratic``: every shell in the tail window (the last
    quarter of shells) stayed at or below ``decay_tol``.
    ``persistent_defect``: the tail max reached ``10 * decay_tol`` and the
    last half of the profile never decreased (beyond rounding slack).
    Anything else is ``inconclusive``.
    """

    verdict: str
    tail_max: float
    tail_window: int
    decay_tol: float
    nondecreasing_last_half: bool

    @property
    def decayed(self) -> bool:
        return self.verdict == VERDICT_DECAYING

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tail_max": self.tail_max,
            "tail_window": self.tail_window,
            "decay_tol": self.decay_tol,
            "nondecreasing_last_half": self.nondecreasing_last_half,
        }


def asymptotic_verdict(profile: ShellProfile, decay_tol: float) -> AsymptoticVerdict:
    """Classify a shell profile against a decay tolerance.

    The tail window is the last quarter of the shells (rounded up); the
    monotonicity check covers the last half.  Raises
    :class:`ParameterError` for profiles with fewer than four shells.
    """
    if not np.isfinite(decay_tol) or decay_tol <= 0:
        raise ParameterError(f"decay_tol must be finite and > 0, got {decay_tol!r}")
    deltas = np.asarray(profile.deltas, dtype=np.float64)
    k = deltas.shape[0]
    if k < _MIN_SHELLS:
        raise ParameterError(
            f"verdict needs at least {_MIN_SHELLS} shells, got {k}"
        )
    tail_window = -(-k // 4)
    tail = deltas[-tail_window:]
    tail_max = float(tail.max())

    half_len = -(-k // 2)
    half = deltas[-half_len:]
    steps_ok = half[1:] >= half[:-1] * (1.0 - _MONOTONE_SLACK)
    nondecreasing = bool(np.all(steps_ok))

    if tail_max <= decay_tol:
        verdict = VERDICT_DECAYING
    elif tail_max >= 10.0 * decay_tol and nondecreasing:
        verdict = VERDICT_PERSISTENT
    else:
        verdict = VERDICT_INCONCLUSIVE
    return AsymptoticVerdict(
        verdict=verdict,
        tail_max=tail_max,
        tail_window=int(tail_window),
        decay_tol=float(decay_tol),
        nondecreasing_last_half=nondecreasing,
    )
