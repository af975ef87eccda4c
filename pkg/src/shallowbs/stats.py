"""Distribution diagnostics for circuit ensembles.

The workhorses are the equal-count density estimator used to compare output
probability distributions, the k-th frame potential that measures closeness of
an ensemble to the full unitary group, and the reference sample generators
(probability samples of random circuits, and the Gaussian-matrix surrogates
they should reproduce when the circuit hides its submatrix structure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Callable, Optional, Sequence

import numpy as np

from ._parallel import pmap
from .linalg import RngStream, ginibre
from .matfn import hafnian, permanent

__all__ = [
    "DensityBucket",
    "DensityCurve",
    "FramePotentialEstimate",
    "density_function",
    "frame_potential",
    "bootstrap_std",
    "random_collision_free_pattern",
    "hiding_samples",
    "fbs_probability_samples",
    "gbs_probability_samples",
]


@dataclass(frozen=True)
class DensityBucket:
    """One equal-count bucket: representative point, height, occupancy, width.

    ``density`` is None for a degenerate (zero-width) bucket, which happens
    when every sample in the bucket is identical.
    """

    x: float
    density: Optional[float]
    count: int
    width: float


@dataclass(frozen=True)
class DensityCurve:
    buckets: tuple[DensityBucket, ...]
    total_samples: int

    def to_rows(self) -> list[dict]:
        return [asdict(b) for b in self.buckets]


def density_function(samples: Sequence[float], n_buckets: int) -> DensityCurve:
    """Empirical density from sorted samples split into equal-count buckets.

    Bucket sizes differ by at most one (the remainder goes to the earliest
    buckets); each bucket reports its midpoint and count/(total*width).
    """
    values = np.sort(np.asarray(samples, dtype=float))
    total = values.size
    if total == 0:
        raise ValueError("need at least one sample")
    if not 1 <= n_buckets <= total:
        raise ValueError(
            f"bucket count must lie in [1, {total}] for {total} samples, got {n_buckets}"
        )
    base, rem = divmod(total, n_buckets)
    buckets = []
    start = 0
    for i in range(n_buckets):
        size = base + (1 if i < rem else 0)
        chunk = values[start : start + size]
        start += size
        lo, hi = float(chunk[0]), float(chunk[-1])
        width = hi - lo
        density = (size / total) / width if width > 0 else None
        buckets.append(DensityBucket(x=(lo + hi) / 2.0, density=density, count=size, width=width))
    return DensityCurve(buckets=tuple(buckets), total_samples=total)


def bootstrap_std(
    samples: Sequence[float], resamples: int, rng: RngStream
) -> float:
    """Bootstrap standard deviation of the sample mean."""
    values = np.asarray(samples, dtype=float)
    if values.size < 2:
        raise ValueError(f"need at least two samples, got {values.size}")
    if resamples < 100:
        raise ValueError(f"need at least 100 resamples, got {resamples}")
    gen = rng.generator()
    n = values.size
    means = np.empty(resamples)
    for r in range(resamples):
        means[r] = values[gen.integers(0, n, size=n)].mean()
    return float(means.std())


@dataclass(frozen=True)
class FramePotentialEstimate:
    """Monte-Carlo frame potential, raw and divided by the full-group value k!."""

    k_moment: int
    raw_mean: float
    normalized: float
    bootstrap_std: float
    n_sam: int

    def to_dict(self) -> dict:
        return asdict(self)


def frame_potential(
    sample_unitary: Callable[[np.random.Generator], np.ndarray],
    k_moment: int,
    n_sam: int,
    rng: RngStream,
    resamples: int = 1000,
    threads: int = 1,
) -> FramePotentialEstimate:
    """Estimate the k-th frame potential E |Tr(U^dag V)|^(2k) over ensemble pairs.

    Haar over the full group gives k!, so ``normalized`` tends to 1 from above
    as the ensemble approaches a unitary k-design.  ``bootstrap_std`` is
    reported on the normalized scale.
    """
    if k_moment < 1:
        raise ValueError(f"moment order must be positive, got {k_moment}")
    if n_sam < 2:
        raise ValueError(f"need at least two sample pairs, got {n_sam}")

    def one(i: int) -> float:
        u = sample_unitary(rng.derive(2 * i).generator())
        v = sample_unitary(rng.derive(2 * i + 1).generator())
        return float(abs(np.vdot(u, v)) ** (2 * k_moment))

    values = np.array(pmap(one, range(n_sam), threads))
    raw = float(values.mean())
    k_fact = math.factorial(k_moment)
    boot = bootstrap_std(values, resamples, rng.derive(2 * n_sam)) / k_fact
    return FramePotentialEstimate(
        k_moment=k_moment,
        raw_mean=raw,
        normalized=raw / k_fact,
        bootstrap_std=boot,
        n_sam=n_sam,
    )


def random_collision_free_pattern(
    m: int, photons: int, rng: RngStream | np.random.Generator
) -> tuple[int, ...]:
    """Uniformly random sorted pattern of distinct modes."""
    if photons < 0:
        raise ValueError(f"photon number must be non-negative, got {photons}")
    if photons > m:
        raise ValueError(f"cannot place {photons} collision-free photons in {m} modes")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    picks = gen.choice(m, size=photons, replace=False)
    return tuple(int(x) for x in np.sort(picks))


def fbs_probability_samples(
    sample_unitary: Callable[[np.random.Generator], np.ndarray],
    m: int,
    photons: int,
    n_sam: int,
    rng: RngStream,
    threads: int = 1,
) -> np.ndarray:
    """|perm|^2 samples of random circuits at random collision-free in/out patterns."""
    if photons < 1:
        raise ValueError(f"photon number must be positive, got {photons}")

    def one(i: int) -> float:
        gen = rng.derive(i).generator()
        u = sample_unitary(gen)
        t = random_collision_free_pattern(m, photons, gen)
        s = random_collision_free_pattern(m, photons, gen)
        sub = u[np.ix_(s, t)]
        return float(abs(permanent(sub)) ** 2)

    return np.array(pmap(one, range(n_sam), threads))


def gbs_probability_samples(
    sample_unitary: Callable[[np.random.Generator], np.ndarray],
    m: int,
    photons: int,
    n_sam: int,
    rng: RngStream,
    threads: int = 1,
) -> np.ndarray:
    """|Haf((U U^T)_s)|^2 samples with squeezed sources on every mode.

    ``photons`` counts output photons and must be even.
    """
    if photons < 2 or photons % 2 != 0:
        raise ValueError(f"photon number must be even and positive, got {photons}")

    def one(i: int) -> float:
        gen = rng.derive(i).generator()
        u = sample_unitary(gen)
        s = random_collision_free_pattern(m, photons, gen)
        b = u @ u.T
        sel = np.asarray(s, dtype=int)
        return float(abs(hafnian(b[np.ix_(sel, sel)])) ** 2)

    return np.array(pmap(one, range(n_sam), threads))


def hiding_samples(
    kind: str,
    m: int,
    photons: int,
    n_sam: int,
    rng: RngStream,
    threads: int = 1,
) -> np.ndarray:
    """Gaussian-matrix surrogates for the probability samples of a hiding ensemble.

    For ``kind="fbs"`` each draw is |perm(X)|^2 / m^n with X an n x n complex
    Ginibre matrix; for ``kind="gbs"`` it is |Haf(X X^T)|^2 / m^n with X an
    n x m Ginibre matrix and ``photons`` even.
    """
    if kind not in ("fbs", "gbs"):
        raise ValueError(f"kind must be 'fbs' or 'gbs', got {kind!r}")
    if photons < 1:
        raise ValueError(f"photon number must be positive, got {photons}")
    if kind == "gbs" and photons % 2 != 0:
        raise ValueError(f"gbs photon number must be even, got {photons}")
    scale = float(m) ** photons

    def one(i: int) -> float:
        gen = rng.derive(i).generator()
        if kind == "fbs":
            x = ginibre(photons, photons, gen)
            return float(abs(permanent(x)) ** 2 / scale)
        x = ginibre(photons, m, gen)
        return float(abs(hafnian(x @ x.T)) ** 2 / scale)

    return np.array(pmap(one, range(n_sam), threads))
