"""Seeded random-matrix ensembles and small dense-linear-algebra helpers.

Everything that draws randomness in this package goes through :class:`RngStream`,
a light handle around numpy's seeded generators.  Two streams with the same
``(seed, stream)`` pair always reproduce the same draw sequence, and derived
child streams are disjoint from their siblings, which is what makes the
Monte-Carlo drivers reproducible regardless of how work is partitioned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "RngStream",
    "as_generator",
    "haar_u2",
    "haar_unitary",
    "ginibre",
    "embed_two_mode",
    "frobenius_norm_sq",
]

_MAX_CHILD = 1 << 32


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by a 64-bit seed and a stream id.

    The generator is built from ``SeedSequence([seed, stream])``, so identical
    pairs give identical sequences and distinct pairs are statistically
    independent.  ``derive`` packs child indices into fresh stream ids; the
    packing supports two levels of derivation (master -> per-trial -> inner),
    which covers every driver in this package.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh numpy generator positioned at the start of this stream."""
        return np.random.default_rng(np.random.SeedSequence([self.seed, self.stream]))

    def derive(self, index: int) -> "RngStream":
        """Child stream number ``index``, distinct from this stream and its other children."""
        if not 0 <= index < _MAX_CHILD:
            raise ValueError(f"child index must lie in [0, 2^32), got {index}")
        return RngStream(self.seed, (self.stream << 32) + index + 1)


def as_generator(rng: Union[RngStream, np.random.Generator]) -> np.random.Generator:
    """Accept either an RngStream or a ready generator and return a generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def _haar_u2_batch(gen: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` independent Haar 2x2 unitaries, shape (count, 2, 2).

    Uses the exact parametrization of the unitary-group measure: three uniform
    phases and a mixing angle with cos^2(theta) uniform on [0, 1].
    """
    xi = gen.random(count)
    phases = gen.random((3, count)) * (2.0 * np.pi)
    phi, alpha, beta = phases
    c = np.sqrt(xi)
    s = np.sqrt(1.0 - xi)
    g = np.empty((count, 2, 2), dtype=complex)
    g[:, 0, 0] = c * np.exp(1j * (phi + alpha))
    g[:, 0, 1] = s * np.exp(1j * (phi + beta))
    g[:, 1, 0] = -s * np.exp(1j * (phi - beta))
    g[:, 1, 1] = c * np.exp(1j * (phi - alpha))
    return g


def haar_u2(rng: Union[RngStream, np.random.Generator]) -> np.ndarray:
    """One Haar-random 2x2 unitary."""
    return _haar_u2_batch(as_generator(rng), 1)[0]


def haar_unitary(m: int, rng: Union[RngStream, np.random.Generator]) -> np.ndarray:
    """Haar-random m x m unitary via complex Ginibre QR with phase correction.

    The QR decomposition alone is not Haar distributed; multiplying each column
    of Q by the phase of the matching diagonal entry of R fixes the measure.
    """
    if m < 1:
        raise ValueError(f"matrix dimension must be positive, got {m}")
    gen = as_generator(rng)
    z = ginibre(m, m, gen)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return q


def ginibre(rows: int, cols: int, rng: Union[RngStream, np.random.Generator]) -> np.ndarray:
    """Complex Ginibre matrix: i.i.d. entries with E[|X|^2] = 1."""
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dimensions must be positive, got {rows} x {cols}")
    gen = as_generator(rng)
    z = gen.standard_normal((rows, cols)) + 1j * gen.standard_normal((rows, cols))
    return z / np.sqrt(2.0)


def embed_two_mode(gate: np.ndarray, mode_a: int, mode_b: int, m: int) -> np.ndarray:
    """Embed a 2x2 gate acting on (mode_a, mode_b) into an m x m identity."""
    gate = np.asarray(gate)
    if gate.shape != (2, 2):
        raise ValueError(f"gate must be 2x2, got shape {gate.shape}")
    if mode_a == mode_b:
        raise ValueError(f"gate modes must differ, got {mode_a} twice")
    for mode in (mode_a, mode_b):
        if not 0 <= mode < m:
            raise IndexError(f"mode {mode} out of range for {m} modes")
    u = np.eye(m, dtype=complex)
    idx = np.array([mode_a, mode_b])
    u[np.ix_(idx, idx)] = gate
    return u


def frobenius_norm_sq(a: np.ndarray) -> float:
    """Squared Frobenius norm, sum of |a_ij|^2."""
    a = np.asarray(a)
    return float(np.vdot(a, a).real)
