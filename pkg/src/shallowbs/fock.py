"""Fock-state boson sampling: exact outcome probabilities and permitted-outcome counting.

Patterns are plain sorted tuples of mode indices, one entry per photon, so a
collision outcome repeats a mode.  The probability of outcome ``s`` given
collision-free input ``t`` is ``|perm(U[s, t])|^2 / s!`` where ``s!`` is the
product of the factorials of the mode multiplicities.

A shallow circuit forbids most outcomes: a photon entering mode t_j can only
exit inside the forward lightcone of t_j, so an outcome is *permitted* exactly
when the photons can be matched one-to-one to input lightcones that contain
them.  Counting permitted outcomes against the full outcome count gives the
support ratio that collapses below the hard/easy depth thresholds computed at
the bottom of this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Sequence

import numpy as np

from .arch import (
    CircuitArchitecture,
    effective_lightcone_radius,
    forward_lightcone,
    mode_coordinates,
)
from .matfn import GuardError, permanent

__all__ = [
    "Pattern",
    "PermittedCountReport",
    "DepthThresholds",
    "ENUMERATION_GUARD",
    "pattern_factorial",
    "fbs_probability",
    "enumerate_outcomes",
    "outcome_count",
    "is_permitted_fbs",
    "count_permitted_fbs",
    "count_permitted_fbs_effective",
    "fbs_permitted_ratio_bound",
    "fbs_depth_thresholds",
]

Pattern = tuple[int, ...]

ENUMERATION_GUARD = 10**8


def _as_pattern(modes: Iterable[int], m: int, name: str) -> Pattern:
    pat = tuple(int(x) for x in modes)
    if any(not 0 <= x < m for x in pat):
        raise IndexError(f"{name} pattern {pat} out of range for {m} modes")
    if any(pat[i] > pat[i + 1] for i in range(len(pat) - 1)):
        raise ValueError(f"{name} pattern must be sorted, got {pat}")
    return pat


def _require_collision_free(pat: Pattern, name: str) -> None:
    if any(pat[i] == pat[i + 1] for i in range(len(pat) - 1)):
        raise ValueError(f"{name} pattern must be collision-free, got {pat}")


def pattern_factorial(pat: Sequence[int]) -> int:
    """Product of factorials of the mode multiplicities of a sorted pattern."""
    total = 1
    run = 1
    for i in range(1, len(pat)):
        run = run + 1 if pat[i] == pat[i - 1] else 1
        total *= run
    return total


def fbs_probability(
    u: np.ndarray, input_modes: Iterable[int], output_modes: Iterable[int]
) -> float:
    """Probability of ``output_modes`` for single photons in ``input_modes``.

    ``u`` follows the ``u[out, in]`` convention, so the relevant submatrix
    takes rows from the output pattern and columns from the input pattern.
    """
    u = np.asarray(u)
    m = u.shape[0]
    t = _as_pattern(input_modes, m, "input")
    s = _as_pattern(output_modes, m, "output")
    _require_collision_free(t, "input")
    if len(s) != len(t):
        raise ValueError(
            f"photon number mismatch: {len(t)} photons in, pattern of {len(s)} out"
        )
    if len(t) == 0:
        return 1.0
    sub = u[np.ix_(s, t)]
    return float(abs(permanent(sub)) ** 2 / pattern_factorial(s))


def outcome_count(m: int, photons: int) -> int:
    """Number of photon-number outcomes of ``photons`` photons over ``m`` modes."""
    if m < 1:
        raise ValueError(f"mode count must be positive, got {m}")
    if photons < 0:
        raise ValueError(f"photon number must be non-negative, got {photons}")
    return math.comb(m + photons - 1, photons)


def enumerate_outcomes(m: int, photons: int) -> Iterator[Pattern]:
    """Lazily yield all sorted outcomes of ``photons`` photons over ``m`` modes."""
    if m < 1:
        raise ValueError(f"mode count must be positive, got {m}")
    if photons < 0:
        raise ValueError(f"photon number must be non-negative, got {photons}")
    return combinations_with_replacement(range(m), photons)


def _hopcroft_karp(adjacency: list[list[int]], n_right: int) -> int:
    """Maximum matching size of a bipartite graph given left adjacency lists."""
    n_left = len(adjacency)
    inf = float("inf")
    match_left: list[int] = [-1] * n_left
    match_right: list[int] = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        queue = []
        for v in range(n_left):
            if match_left[v] == -1:
                dist[v] = 0.0
                queue.append(v)
            else:
                dist[v] = inf
        found = False
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for w in adjacency[v]:
                u = match_right[w]
                if u == -1:
                    found = True
                elif dist[u] == inf:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        return found

    def dfs(v: int) -> bool:
        for w in adjacency[v]:
            u = match_right[w]
            if u == -1 or (dist[u] == dist[v] + 1 and dfs(u)):
                match_left[v] = w
                match_right[w] = v
                return True
        dist[v] = inf
        return False

    matched = 0
    while bfs():
        for v in range(n_left):
            if match_left[v] == -1 and dfs(v):
                matched += 1
    return matched


def _photon_cone_matching(cones: Sequence[frozenset[int]], outcome: Pattern) -> bool:
    """Can the outcome photons be assigned one-to-one to containing lightcones?"""
    adjacency = [
        [k for k, mode in enumerate(outcome) if mode in cone] for cone in cones
    ]
    if any(not adj for adj in adjacency):
        return False
    return _hopcroft_karp(adjacency, len(outcome)) == len(outcome)


def is_permitted_fbs(
    arch: CircuitArchitecture,
    input_modes: Iterable[int],
    output_modes: Iterable[int],
    depth: int,
) -> bool:
    """Whether the outcome can carry probability at the given circuit depth."""
    t = _as_pattern(input_modes, arch.mode_count, "input")
    s = _as_pattern(output_modes, arch.mode_count, "output")
    _require_collision_free(t, "input")
    if len(s) != len(t):
        raise ValueError(
            f"photon number mismatch: {len(t)} photons in, pattern of {len(s)} out"
        )
    cones = [forward_lightcone(arch, mode, depth) for mode in t]
    return _photon_cone_matching(cones, s)


@dataclass(frozen=True)
class PermittedCountReport:
    """Exact permitted-outcome count next to its analytic bound.

    ``exact_ratio`` is permitted / total.  ``bound_ratio`` divides the product
    bound by the total and clips at 1, since a ratio above 1 says nothing.
    """

    exact_count: int
    upper_bound: float
    total_outcomes: int
    exact_ratio: float
    bound_ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def _count_with_cones(
    m: int, cones: Sequence[frozenset[int]], upper_bound: float, guard: int
) -> PermittedCountReport:
    photons = len(cones)
    total = outcome_count(m, photons)
    if total > guard:
        raise GuardError(
            f"enumeration guard: {total} outcomes exceed the {guard} limit"
        )
    exact = sum(
        1 for outcome in enumerate_outcomes(m, photons) if _photon_cone_matching(cones, outcome)
    )
    return PermittedCountReport(
        exact_count=exact,
        upper_bound=upper_bound,
        total_outcomes=total,
        exact_ratio=exact / total,
        bound_ratio=min(1.0, upper_bound / total),
    )


def count_permitted_fbs(
    arch: CircuitArchitecture,
    input_modes: Iterable[int],
    depth: int,
    guard: int = ENUMERATION_GUARD,
) -> PermittedCountReport:
    """Count permitted outcomes exactly and report the lightcone product bound."""
    t = _as_pattern(input_modes, arch.mode_count, "input")
    _require_collision_free(t, "input")
    if not t:
        raise ValueError("input pattern must contain at least one photon")
    cones = [forward_lightcone(arch, mode, depth) for mode in t]
    bound = float(math.prod(len(c) for c in cones))
    return _count_with_cones(arch.mode_count, cones, bound, guard)


def count_permitted_fbs_effective(
    arch: CircuitArchitecture,
    input_modes: Iterable[int],
    depth: int,
    lam: float,
    beta: float,
    guard: int = ENUMERATION_GUARD,
) -> PermittedCountReport:
    """Permitted-outcome count with lightcones clipped to the effective radius.

    Each forward cone is intersected with the box of radius
    ``effective_lightcone_radius`` around its input mode, dimension by
    dimension.  ``upper_bound`` is the closed-form effective-cone size raised
    to the photon number; unlike the plain count, near-boundary configurations
    can exceed it because the clipped box is wider than the size the formula
    assumes, so only ``exact_count`` is authoritative here.
    """
    if arch.family != "local-parallel" or arch.side_lengths is None:
        raise ValueError("effective counting requires a local-parallel lattice")
    t = _as_pattern(input_modes, arch.mode_count, "input")
    _require_collision_free(t, "input")
    if not t:
        raise ValueError("input pattern must contain at least one photon")
    d = len(arch.side_lengths)
    photons = len(t)
    radius = effective_lightcone_radius(photons, depth, lam, beta, d)
    coords = mode_coordinates(arch.side_lengths)
    cones = []
    for mode in t:
        cone = forward_lightcone(arch, mode, depth)
        inside = np.flatnonzero(
            (np.abs(coords - coords[mode]) <= radius).all(axis=1)
        )
        cones.append(cone & frozenset(int(i) for i in inside))
    per_cone = (2.0 * photons**lam * depth / (beta * d)) ** (d / 2.0)
    return _count_with_cones(arch.mode_count, cones, per_cone**photons, guard)


def fbs_permitted_ratio_bound(
    m: int, photons: int, gamma: float, c0: float, d: int, depth: int
) -> float:
    """Closed-form bound on the permitted-outcome fraction of a lattice circuit.

    Valid in the scaling regime ``m = c0 * photons**gamma``; the call rejects
    mode counts that are off that curve by more than rounding.
    """
    if photons < 1:
        raise ValueError(f"photon number must be positive, got {photons}")
    if d < 1:
        raise ValueError(f"lattice dimension must be positive, got {d}")
    if c0 <= 0:
        raise ValueError(f"mode-scaling constant must be positive, got {c0}")
    expected = c0 * photons**gamma
    if abs(m - expected) > 0.5 + 1e-9 * expected:
        raise ValueError(
            f"mode count {m} is not c0*n^gamma = {expected:.3f} within rounding"
        )
    n = photons
    return 3.0 * math.sqrt(n) * (
        (2.0**d * depth**d * n ** (1.0 - gamma)) / (math.e * d**d * c0)
    ) ** n


@dataclass(frozen=True)
class DepthThresholds:
    """Depth scales separating the sampling regimes for one scheme.

    Below ``forbidden_depth`` (prefactor ``forbidden_constant``) almost every
    outcome is forbidden for *any* gate ensemble, by counting alone.  Below
    ``concentration_depth`` (prefactor ``concentration_constant``) the locally
    random ensemble concentrates and output probabilities admit cheap additive
    estimation at error scale ``additive_error`` (polynomial factor taken as 1).
    """

    scheme: str
    forbidden_constant: float
    forbidden_depth: float
    concentration_constant: float
    concentration_depth: float
    additive_error: float
    photons: int
    modes: float
    gamma: float
    scaling_constant: float
    dimension: int
    lam: float
    beta: float

    def to_dict(self) -> dict:
        return asdict(self)


def _check_threshold_params(gamma: float, c: float, d: int, lam: float, beta: float) -> None:
    if gamma < 1:
        raise ValueError(f"mode-scaling exponent must be >= 1, got {gamma}")
    if c <= 0:
        raise ValueError(f"mode-scaling constant must be positive, got {c}")
    if d < 1:
        raise ValueError(f"lattice dimension must be positive, got {d}")
    if lam <= 0:
        raise ValueError(f"lightcone exponent must be positive, got {lam}")
    if not 0 < beta < 1:
        raise ValueError(f"leakage exponent must lie in (0, 1), got {beta}")


def fbs_depth_thresholds(
    photons: int, gamma: float, c0: float, d: int, lam: float, beta: float
) -> DepthThresholds:
    """Regime-boundary depths for Fock-state sampling at ``m = c0 * photons**gamma``."""
    if photons < 1:
        raise ValueError(f"photon number must be positive, got {photons}")
    _check_threshold_params(gamma, c0, d, lam, beta)
    n = photons
    m = c0 * n**gamma
    kappa = math.e ** (1.0 / d) * c0 ** (1.0 / d) * d / 2.0
    alpha = math.e ** (2.0 / d) * c0 ** (2.0 / d) * beta * d / 2.0
    eps = math.exp(math.lgamma(n + 1) - n * math.log(m))
    return DepthThresholds(
        scheme="fbs",
        forbidden_constant=kappa,
        forbidden_depth=kappa * n ** ((gamma - 1.0) / d),
        concentration_constant=alpha,
        concentration_depth=alpha * n ** (2.0 * (gamma - 1.0) / d - lam),
        additive_error=eps,
        photons=n,
        modes=m,
        gamma=gamma,
        scaling_constant=c0,
        dimension=d,
        lam=lam,
        beta=beta,
    )
