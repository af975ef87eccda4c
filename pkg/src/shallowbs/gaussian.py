"""Gaussian states in covariance form and Gaussian boson sampling diagnostics.

Covariance matrices are 2M x 2M real, ordered as the M position quadratures
followed by the M momentum quadratures, with vacuum normalized to the
identity.  A single-mode squeezed vacuum with parameter r has x-variance
``exp(-2r)`` and p-variance ``exp(+2r)``.  A passive circuit with matrix U
acts as the orthogonal symplectic built from Re U and Im U.

Gaussian sampling probabilities reduce to hafnians of repeated-index
submatrices of ``B = U I_K U^T`` with I_K projecting onto the squeezed input
modes; entry B_ab vanishes unless some input mode sits in both backward
lightcones of a and b, which is what drives the pairing-based permitted
counting here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, asdict
from typing import Callable, Iterable, Optional, Sequence

import networkx as nx
import numpy as np

from ._parallel import pmap
from .arch import CircuitArchitecture, backward_lightcone, forward_lightcone
from .fock import (
    DepthThresholds,
    ENUMERATION_GUARD,
    PermittedCountReport,
    Pattern,
    _as_pattern,
    _check_threshold_params,
    _require_collision_free,
    enumerate_outcomes,
    outcome_count,
    pattern_factorial,
)
from .linalg import RngStream
from .matfn import GuardError, hafnian

__all__ = [
    "GbsConfig",
    "smsv_covariance",
    "evolve_covariance",
    "reduced_covariance",
    "renyi2_entropy",
    "symplectic_from_unitary",
    "is_valid_covariance",
    "page_curve",
    "gbs_unnormalized_probability",
    "is_permitted_gbs",
    "count_permitted_gbs",
    "gbs_depth_thresholds",
    "gbs_permitted_ratio_bound",
    "photon_pair_marginal",
]

_EXHAUSTIVE_MATCHING_MAX = 12


@dataclass(frozen=True)
class GbsConfig:
    """Gaussian-sampling experiment shape: mode, source and photon-pair counts.

    ``k_inputs`` modes carry identical single-mode squeezed vacua with
    parameter ``squeeze_r``; outcomes of interest hold ``pairs`` photon pairs,
    i.e. ``2 * pairs`` photons.
    """

    modes: int
    k_inputs: int
    squeeze_r: float
    pairs: int

    def __post_init__(self) -> None:
        if not 1 <= self.k_inputs <= self.modes:
            raise ValueError(
                f"need 1 <= k_inputs <= modes, got k_inputs={self.k_inputs}, modes={self.modes}"
            )
        if self.pairs < 0 or self.pairs > self.k_inputs:
            raise ValueError(
                f"need 0 <= pairs <= k_inputs, got pairs={self.pairs}, k_inputs={self.k_inputs}"
            )
        if self.squeeze_r <= 0:
            raise ValueError(f"squeezing must be positive, got {self.squeeze_r}")

    @classmethod
    def with_matched_squeezing(cls, modes: int, k_inputs: int, pairs: int) -> "GbsConfig":
        """Choose r so the mean photon number K sinh^2(r) equals 2 * pairs."""
        if pairs < 1:
            raise ValueError(f"need at least one pair to match squeezing, got {pairs}")
        r = math.asinh(math.sqrt(2.0 * pairs / k_inputs))
        return cls(modes=modes, k_inputs=k_inputs, squeeze_r=r, pairs=pairs)

    def default_input_modes(self) -> Pattern:
        """The first ``k_inputs`` modes, the convention used when none are given."""
        return tuple(range(self.k_inputs))


def smsv_covariance(cfg: GbsConfig, input_modes: Optional[Iterable[int]] = None) -> np.ndarray:
    """Covariance of K identical squeezed vacua on ``input_modes``, vacuum elsewhere."""
    modes = (
        cfg.default_input_modes()
        if input_modes is None
        else _as_pattern(input_modes, cfg.modes, "input")
    )
    _require_collision_free(modes, "input")
    if len(modes) != cfg.k_inputs:
        raise ValueError(
            f"expected {cfg.k_inputs} input modes, got pattern of {len(modes)}"
        )
    m = cfg.modes
    diag = np.ones(2 * m)
    idx = np.array(modes, dtype=int)
    diag[idx] = math.exp(-2.0 * cfg.squeeze_r)
    diag[idx + m] = math.exp(2.0 * cfg.squeeze_r)
    return np.diag(diag)


def symplectic_from_unitary(u: np.ndarray) -> np.ndarray:
    """Orthogonal symplectic action of a passive circuit on (x, p) quadratures."""
    u = np.asarray(u)
    m = u.shape[0]
    if u.shape != (m, m):
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    re, im = u.real, u.imag
    return np.block([[re, -im], [im, re]])


def evolve_covariance(sigma: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Push a covariance through a passive circuit, sigma -> O sigma O^T."""
    sigma = np.asarray(sigma, dtype=float)
    u = np.asarray(u)
    m = u.shape[0]
    if sigma.shape != (2 * m, 2 * m):
        raise ValueError(
            f"covariance shape {sigma.shape} does not match {m}-mode circuit"
        )
    if np.max(np.abs(u.conj().T @ u - np.eye(m))) > 1e-8:
        raise ValueError("circuit matrix is not unitary within 1e-8")
    o = symplectic_from_unitary(u)
    return o @ sigma @ o.T


def reduced_covariance(sigma: np.ndarray, modes: Iterable[int]) -> np.ndarray:
    """Covariance of the state restricted to a proper nonempty mode subset."""
    sigma = np.asarray(sigma)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2 != 0:
        raise ValueError(f"covariance must be square even-dimensional, got {sigma.shape}")
    m = sigma.shape[0] // 2
    keep = sorted(set(int(x) for x in modes))
    if not keep:
        raise ValueError("mode subset must be nonempty")
    if len(keep) >= m:
        raise ValueError(f"mode subset must be proper, got all {m} modes")
    if keep[0] < 0 or keep[-1] >= m:
        raise IndexError(f"mode subset {keep} out of range for {m} modes")
    idx = np.array(keep + [k + m for k in keep], dtype=int)
    return sigma[np.ix_(idx, idx)]


def renyi2_entropy(sigma: np.ndarray) -> float:
    """Second Renyi entropy of a Gaussian state, (1/2) ln det(sigma)."""
    sigma = np.asarray(sigma)
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise ValueError("covariance has non-positive determinant; not a valid state")
    return 0.5 * float(logdet)


def is_valid_covariance(sigma: np.ndarray, tol: float = 1e-8) -> bool:
    """Uncertainty-principle check: sigma + i Omega is positive semidefinite."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2 != 0:
        return False
    if np.max(np.abs(sigma - sigma.T)) > tol:
        return False
    m = sigma.shape[0] // 2
    eye = np.eye(m)
    zero = np.zeros((m, m))
    omega = np.block([[zero, eye], [-eye, zero]])
    eigs = np.linalg.eigvalsh(sigma + 1j * omega)
    return bool(eigs.min() >= -tol)


def page_curve(
    sample_unitary: Callable[[np.random.Generator], np.ndarray],
    modes: int,
    squeeze_r: float,
    samples: int,
    rng: RngStream,
    subsystem_sizes: Optional[Sequence[int]] = None,
    threads: int = 1,
) -> list[tuple[int, float, float]]:
    """Mean subsystem entropy against subsystem size for a circuit ensemble.

    All modes carry identical squeezing ``squeeze_r``.  For every subsystem
    size k and every sample, a fresh circuit and a uniformly random k-mode
    subset are drawn from a per-trial derived stream; the rows returned are
    ``(k, mean entropy, standard error)``.
    """
    if modes < 2:
        raise ValueError(f"need at least two modes for a bipartition, got {modes}")
    if squeeze_r <= 0:
        raise ValueError(f"squeezing must be positive, got {squeeze_r}")
    if samples < 2:
        raise ValueError(f"need at least two samples, got {samples}")
    sizes = list(range(1, modes)) if subsystem_sizes is None else [int(k) for k in subsystem_sizes]
    if any(not 1 <= k <= modes - 1 for k in sizes):
        raise ValueError(f"subsystem sizes must lie in [1, {modes - 1}], got {sizes}")

    base = np.ones(2 * modes)
    base[:modes] = math.exp(-2.0 * squeeze_r)
    base[modes:] = math.exp(2.0 * squeeze_r)

    def one(task: tuple[int, int]) -> float:
        pos, trial = task
        k = sizes[pos]
        # streams keyed by subsystem size, so a subset of sizes reproduces
        # the matching rows of a full run
        gen = rng.derive((k - 1) * samples + trial).generator()
        u = sample_unitary(gen)
        subset = np.sort(gen.choice(modes, size=k, replace=False))
        o = symplectic_from_unitary(u)
        sigma = (o * base) @ o.T
        idx = np.concatenate([subset, subset + modes])
        red = sigma[np.ix_(idx, idx)]
        sign, logdet = np.linalg.slogdet(red)
        if sign <= 0:
            raise ValueError("reduced covariance lost positivity; invalid circuit sample")
        return 0.5 * float(logdet)

    tasks = [(pos, trial) for pos in range(len(sizes)) for trial in range(samples)]
    values = pmap(one, tasks, threads)
    rows = []
    for pos, k in enumerate(sizes):
        chunk = np.array(values[pos * samples : (pos + 1) * samples])
        rows.append(
            (k, float(chunk.mean()), float(chunk.std(ddof=1) / math.sqrt(samples)))
        )
    return rows


def _pair_matrix(u: np.ndarray, input_modes: Sequence[int]) -> np.ndarray:
    cols = u[:, np.asarray(input_modes, dtype=int)]
    return cols @ cols.T


def gbs_unnormalized_probability(
    u: np.ndarray,
    cfg: GbsConfig,
    output_modes: Iterable[int],
    input_modes: Optional[Iterable[int]] = None,
) -> float:
    """Relative weight |Haf(B_s)|^2 / s! of an even outcome within its photon sector.

    The overall normalization (squeezing and cosh factors, identical for every
    outcome with the same photon number) is deliberately omitted.
    """
    u = np.asarray(u)
    m = u.shape[0]
    if u.shape != (m, m) or m != cfg.modes:
        raise ValueError(f"matrix shape {u.shape} does not match {cfg.modes} modes")
    t = (
        cfg.default_input_modes()
        if input_modes is None
        else _as_pattern(input_modes, m, "input")
    )
    _require_collision_free(t, "input")
    if len(t) != cfg.k_inputs:
        raise ValueError(f"expected {cfg.k_inputs} input modes, got pattern of {len(t)}")
    s = _as_pattern(output_modes, m, "output")
    if len(s) % 2 != 0:
        raise ValueError(f"outcome must hold an even photon number, got {len(s)}")
    if len(s) == 0:
        return 1.0
    b = _pair_matrix(u, t)
    sel = np.array(s, dtype=int)
    b_s = b[np.ix_(sel, sel)]
    return float(abs(hafnian(b_s)) ** 2 / pattern_factorial(s))


def _photon_pairing_possible(adjacency: list[int], n_photons: int) -> bool:
    """Perfect matching on a general graph given bitmask adjacency rows."""
    if n_photons % 2 != 0:
        return False
    if n_photons == 0:
        return True
    if n_photons <= _EXHAUSTIVE_MATCHING_MAX:
        full = (1 << n_photons) - 1

        def search(mask: int) -> bool:
            if mask == 0:
                return True
            low = mask & -mask
            i = low.bit_length() - 1
            rest = mask ^ low
            candidates = adjacency[i] & rest
            while candidates:
                bit = candidates & -candidates
                candidates ^= bit
                if search(rest ^ bit):
                    return True
            return False

        return search(full)
    graph = nx.Graph()
    graph.add_nodes_from(range(n_photons))
    for i in range(n_photons):
        row = adjacency[i]
        for j in range(i + 1, n_photons):
            if row >> j & 1:
                graph.add_edge(i, j)
    matching = nx.max_weight_matching(graph, maxcardinality=True)
    return 2 * len(matching) == n_photons


def _pairing_adjacency(
    cones: dict[int, frozenset[int]], outcome: Pattern, inputs: frozenset[int]
) -> list[int]:
    n = len(outcome)
    adjacency = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if cones[outcome[i]] & cones[outcome[j]] & inputs:
                adjacency[i] |= 1 << j
                adjacency[j] |= 1 << i
    return adjacency


def is_permitted_gbs(
    arch: CircuitArchitecture,
    cfg: GbsConfig,
    input_modes: Iterable[int],
    output_modes: Iterable[int],
    depth: int,
) -> bool:
    """Whether an even outcome can carry Gaussian-sampling probability.

    Photons must split into pairs such that each pair shares a squeezed source
    lying in both photons' backward lightcones.
    """
    t = _as_pattern(input_modes, arch.mode_count, "input")
    _require_collision_free(t, "input")
    if len(t) != cfg.k_inputs:
        raise ValueError(f"expected {cfg.k_inputs} input modes, got pattern of {len(t)}")
    s = _as_pattern(output_modes, arch.mode_count, "output")
    if len(s) % 2 != 0:
        raise ValueError(f"outcome must hold an even photon number, got {len(s)}")
    inputs = frozenset(t)
    cones = {mode: backward_lightcone(arch, mode, depth) for mode in set(s)}
    adjacency = _pairing_adjacency(cones, s, inputs)
    return _photon_pairing_possible(adjacency, len(s))


def count_permitted_gbs(
    arch: CircuitArchitecture,
    cfg: GbsConfig,
    input_modes: Optional[Iterable[int]] = None,
    depth: Optional[int] = None,
    guard: int = ENUMERATION_GUARD,
) -> PermittedCountReport:
    """Count permitted even outcomes and report the pairing-count bound.

    The bound counts anchor-mode multisets, binom(M + pairs - 1, pairs), times
    a uniform per-pair partner factor (the round-trip lightcone size bound
    (4 depth / d)^d on a lattice, the largest actual round-trip cone size
    otherwise), divided by 2^pairs for the anchor/partner exchange within each
    pair.  The exchange discount follows the source derivation, which assumes
    collision pairs are a vanishing fraction (modes >> photons); in heavily
    collided corners the discounted form can undercut the exact count, so
    ``exact_count`` is the authoritative figure.  The bound is derived for
    sources on every mode and so stays valid, if loose, for restricted inputs.
    """
    m = arch.mode_count
    t = (
        cfg.default_input_modes()
        if input_modes is None
        else _as_pattern(input_modes, m, "input")
    )
    _require_collision_free(t, "input")
    if len(t) != cfg.k_inputs:
        raise ValueError(f"expected {cfg.k_inputs} input modes, got pattern of {len(t)}")
    if depth is None:
        depth = arch.depth
    n = cfg.pairs
    photons = 2 * n
    total = outcome_count(m, photons)
    if total > guard:
        raise GuardError(f"enumeration guard: {total} outcomes exceed the {guard} limit")

    inputs = frozenset(t)
    back = {mode: backward_lightcone(arch, mode, depth) for mode in range(m)}
    forward = {mode: forward_lightcone(arch, mode, depth) for mode in range(m)}
    exact = 0
    for outcome in enumerate_outcomes(m, photons):
        adjacency = _pairing_adjacency(back, outcome, inputs)
        if _photon_pairing_possible(adjacency, photons):
            exact += 1

    if arch.family == "local-parallel" and arch.dimension is not None:
        d = arch.dimension
        per_pair = (4.0 * depth / d) ** d
    else:
        # largest round-trip cone |L_D(L_D^t(j))| over anchor modes j
        per_pair = 0.0
        for j in range(m):
            reach: set[int] = set()
            for i in back[j]:
                reach |= forward[i]
            per_pair = max(per_pair, float(len(reach)))
    bound = math.comb(m + n - 1, n) * per_pair**n / 2**n
    return PermittedCountReport(
        exact_count=exact,
        upper_bound=float(bound),
        total_outcomes=total,
        exact_ratio=exact / total,
        bound_ratio=min(1.0, bound / total),
    )


def gbs_depth_thresholds(
    pairs: int, gamma: float, c1: float, d: int, lam: float, beta: float
) -> DepthThresholds:
    """Regime-boundary depths for Gaussian sampling at ``m = c1 * pairs**gamma``."""
    if pairs < 1:
        raise ValueError(f"pair number must be positive, got {pairs}")
    _check_threshold_params(gamma, c1, d, lam, beta)
    n = pairs
    m = c1 * n**gamma
    kappa = c1 ** (1.0 / d) * math.e ** (1.0 / d) * d / 2.0 ** (1.0 / d + 2.0)
    alpha = c1 ** (2.0 / d) * math.e ** (2.0 / d) * beta * d / 2.0 ** (2.0 / d + 3.0)
    eps = math.exp(math.lgamma(2 * n + 1) - 2 * n * math.log(m))
    return DepthThresholds(
        scheme="gbs",
        forbidden_constant=kappa,
        forbidden_depth=kappa * n ** ((gamma - 1.0) / d),
        concentration_constant=alpha,
        concentration_depth=alpha * n ** (2.0 * (gamma - 1.0) / d - lam),
        additive_error=eps,
        photons=2 * n,
        modes=m,
        gamma=gamma,
        scaling_constant=c1,
        dimension=d,
        lam=lam,
        beta=beta,
    )


def gbs_permitted_ratio_bound(
    m: int, pairs: int, gamma: float, c1: float, d: int, depth: int
) -> float:
    """Closed-form bound on the permitted fraction of even outcomes, lattice case."""
    if pairs < 1:
        raise ValueError(f"pair number must be positive, got {pairs}")
    if d < 1:
        raise ValueError(f"lattice dimension must be positive, got {d}")
    if c1 <= 0:
        raise ValueError(f"mode-scaling constant must be positive, got {c1}")
    expected = c1 * pairs**gamma
    if abs(m - expected) > 0.5 + 1e-9 * expected:
        raise ValueError(
            f"mode count {m} is not c1*n^gamma = {expected:.3f} within rounding"
        )
    n = pairs
    return 2.0 * (
        (2.0 ** (2 * d + 1) / (math.e * d**d * c1)) * depth**d * n ** (1.0 - gamma)
    ) ** n


def photon_pair_marginal(cfg: GbsConfig, pairs: int) -> float:
    """Probability that K identical squeezed vacua hold exactly ``pairs`` photon pairs.

    Negative-binomial law ``C(K/2 + n - 1, n) tanh(r)^{2n} / cosh(r)^K``.  Odd
    source counts use the Gamma-function extension of the binomial weight,
    which goes beyond the closed-form derivation, so they raise a warning.
    """
    if pairs < 0:
        raise ValueError(f"pair number must be non-negative, got {pairs}")
    k, r, n = cfg.k_inputs, cfg.squeeze_r, pairs
    if k % 2 != 0:
        warnings.warn(
            "odd source count: pair marginal uses the Gamma extension of the binomial weight",
            stacklevel=2,
        )
    log_weight = (
        math.lgamma(k / 2.0 + n) - math.lgamma(n + 1.0) - math.lgamma(k / 2.0)
    )
    log_p = log_weight + 2.0 * n * math.log(math.tanh(r)) - k * math.log(math.cosh(r))
    return math.exp(log_p)
