"""Beam-splitter circuit architectures and their lightcone structure.

Two families are built here.  The local-parallel family lays modes on a
d-dimensional lattice and applies brickwork rounds: two offset-staggered
nearest-neighbour steps per lattice dimension, open boundaries, so one full
round takes 2d layers.  The non-local hypercubic family works on M = 2^p modes
and pairs modes whose indices differ in exactly one bit, sweeping the stride
from 1 up to 2^(p-1); after the p layers of a single round every input touches
every output exactly once.

A realized circuit multiplies an independent Haar-random 2x2 gate into every
slot.  The matrix convention is ``u[out, in]``: column j is the image of input
mode j, so the support of column j is the forward lightcone of j and the
support of row i is the backward lightcone of i.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .linalg import RngStream, _haar_u2_batch, as_generator

__all__ = [
    "GateSlot",
    "Layer",
    "CircuitArchitecture",
    "build_local_parallel",
    "build_nlhs",
    "realize",
    "forward_lightcone",
    "backward_lightcone",
    "path_count",
    "mode_coordinates",
    "effective_lightcone_radius",
    "leakage_rate",
    "truncate_unitary",
    "arch_to_dict",
    "arch_from_dict",
    "arch_to_json",
    "arch_from_json",
]


class GateSlot(NamedTuple):
    """One two-mode gate position; ``a < b`` by construction."""

    a: int
    b: int


@dataclass(frozen=True)
class Layer:
    """A parallel layer: gate slots whose mode pairs are mutually disjoint."""

    slots: tuple[GateSlot, ...]


@dataclass(frozen=True)
class CircuitArchitecture:
    """Immutable layered circuit layout.

    ``family`` is one of ``"local-parallel"``, ``"nlhs"`` or ``"custom"``.
    Lattice circuits carry ``dimension`` and ``side_lengths``; hypercubic ones
    carry ``log2_modes`` and ``rounds``.  ``depth`` equals the layer count.
    """

    mode_count: int
    layers: tuple[Layer, ...]
    family: str = "custom"
    dimension: Optional[int] = None
    side_lengths: Optional[tuple[int, ...]] = None
    log2_modes: Optional[int] = None
    rounds: Optional[int] = None

    def __post_init__(self) -> None:
        if self.mode_count < 1:
            raise ValueError(f"mode count must be positive, got {self.mode_count}")
        for li, layer in enumerate(self.layers):
            seen: set[int] = set()
            for slot in layer.slots:
                if not (0 <= slot.a < slot.b < self.mode_count):
                    raise ValueError(
                        f"layer {li}: slot {slot} invalid for {self.mode_count} modes"
                    )
                if slot.a in seen or slot.b in seen:
                    raise ValueError(f"layer {li}: mode reused by slot {slot}")
                seen.add(slot.a)
                seen.add(slot.b)
        if self.side_lengths is not None:
            if math.prod(self.side_lengths) != self.mode_count:
                raise ValueError(
                    f"side lengths {self.side_lengths} do not fill {self.mode_count} modes"
                )
        if self.log2_modes is not None and (1 << self.log2_modes) != self.mode_count:
            raise ValueError(
                f"log2_modes={self.log2_modes} inconsistent with {self.mode_count} modes"
            )
        # per-layer index arrays, precomputed once for the realization hot path
        a_arrays = tuple(
            np.array([s.a for s in layer.slots], dtype=np.intp) for layer in self.layers
        )
        b_arrays = tuple(
            np.array([s.b for s in layer.slots], dtype=np.intp) for layer in self.layers
        )
        object.__setattr__(self, "_a_arrays", a_arrays)
        object.__setattr__(self, "_b_arrays", b_arrays)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def gate_count(self) -> int:
        return sum(len(layer.slots) for layer in self.layers)


def build_local_parallel(
    dimension: int, side_lengths: Sequence[int], depth: int
) -> CircuitArchitecture:
    """Brickwork lattice circuit with ``depth`` layers.

    The layer cycle runs two steps per dimension in dimension order: first the
    step pairing even lattice coordinates with their +1 neighbour, then the
    odd-offset step.  ``depth`` may stop anywhere inside the cycle.  Boundaries
    are open; a coordinate with no +1 neighbour simply idles.
    """
    if dimension < 1:
        raise ValueError(f"lattice dimension must be positive, got {dimension}")
    if len(side_lengths) != dimension:
        raise ValueError(
            f"expected {dimension} side lengths, got {len(side_lengths)}"
        )
    sides = tuple(int(s) for s in side_lengths)
    if any(s < 2 for s in sides):
        raise ValueError(f"every side length must be at least 2, got {sides}")
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    m = math.prod(sides)
    strides = np.array([math.prod(sides[k + 1 :]) for k in range(dimension)], dtype=int)

    coords = np.stack(np.unravel_index(np.arange(m), sides), axis=1)
    layers = []
    for step in range(depth):
        axis, offset = divmod(step % (2 * dimension), 2)
        on_axis = coords[:, axis]
        lo = np.flatnonzero((on_axis % 2 == offset) & (on_axis + 1 < sides[axis]))
        slots = tuple(
            GateSlot(int(i), int(i + strides[axis])) for i in np.sort(lo)
        )
        layers.append(Layer(slots))
    return CircuitArchitecture(
        mode_count=m,
        layers=tuple(layers),
        family="local-parallel",
        dimension=dimension,
        side_lengths=sides,
    )


def build_nlhs(log2_modes: int, rounds: int) -> CircuitArchitecture:
    """Non-local hypercubic circuit on 2^p modes, ``rounds`` full sweeps.

    Sweep layer D (1-based) pairs mode ``2^D*(j-1)+k-1`` with the mode a
    half-stride ``2^(D-1)`` above it, for j = 1..2^(p-D) and k = 1..2^(D-1),
    so each layer couples every mode exactly once and one sweep of p layers
    connects every input to every output through a single path.
    """
    if log2_modes < 1:
        raise ValueError(f"log2 of the mode count must be positive, got {log2_modes}")
    if rounds < 0:
        raise ValueError(f"round count must be non-negative, got {rounds}")
    p = log2_modes
    m = 1 << p
    layers = []
    for _ in range(rounds):
        for step in range(1, p + 1):
            half = 1 << (step - 1)
            slots = []
            for j in range(1 << (p - step)):
                base = j << step
                for k in range(half):
                    slots.append(GateSlot(base + k, base + k + half))
            slots.sort()
            layers.append(Layer(tuple(slots)))
    return CircuitArchitecture(
        mode_count=m,
        layers=tuple(layers),
        family="nlhs",
        log2_modes=p,
        rounds=rounds,
    )


GateSampler = Callable[[np.random.Generator, int], np.ndarray]


def realize(
    arch: CircuitArchitecture,
    rng: Union[RngStream, np.random.Generator],
    gate_sampler: Optional[GateSampler] = None,
) -> np.ndarray:
    """Draw one random instance of the architecture as an M x M unitary.

    Layers act in order with later layers multiplying on the left, and every
    slot receives an independent Haar 2x2 gate (or one from ``gate_sampler``,
    a callable ``(generator, count) -> (count, 2, 2)``).  Gates of one layer
    are drawn as a single batch, in slot order.
    """
    gen = as_generator(rng)
    draw = gate_sampler if gate_sampler is not None else _haar_u2_batch
    m = arch.mode_count
    u = np.eye(m, dtype=complex)
    for a_idx, b_idx in zip(arch._a_arrays, arch._b_arrays):  # type: ignore[attr-defined]
        k = len(a_idx)
        if k == 0:
            continue
        g = np.asarray(draw(gen, k))
        if g.shape != (k, 2, 2):
            raise ValueError(f"gate sampler returned shape {g.shape}, expected {(k, 2, 2)}")
        rows_a = u[a_idx]
        rows_b = u[b_idx]
        u[a_idx] = g[:, 0, 0, None] * rows_a + g[:, 0, 1, None] * rows_b
        u[b_idx] = g[:, 1, 0, None] * rows_a + g[:, 1, 1, None] * rows_b
    return u


def _spread(
    arch: CircuitArchitecture, mode: int, depth: int, reverse: bool
) -> frozenset[int]:
    if not 0 <= mode < arch.mode_count:
        raise IndexError(f"mode {mode} out of range for {arch.mode_count} modes")
    if not 0 <= depth <= arch.depth:
        raise ValueError(
            f"depth {depth} outside [0, {arch.depth}] for this architecture"
        )
    reached = np.zeros(arch.mode_count, dtype=bool)
    reached[mode] = True
    window = arch.layers[:depth]
    for layer in reversed(window) if reverse else window:
        for slot in layer.slots:
            if reached[slot.a] or reached[slot.b]:
                reached[slot.a] = True
                reached[slot.b] = True
    return frozenset(int(i) for i in np.flatnonzero(reached))


def forward_lightcone(arch: CircuitArchitecture, input_mode: int, depth: int) -> frozenset[int]:
    """Output modes reachable from ``input_mode`` through the first ``depth`` layers."""
    return _spread(arch, input_mode, depth, reverse=False)


def backward_lightcone(arch: CircuitArchitecture, output_mode: int, depth: int) -> frozenset[int]:
    """Input modes that can reach ``output_mode`` through the first ``depth`` layers."""
    return _spread(arch, output_mode, depth, reverse=True)


def path_count(arch: CircuitArchitecture, input_mode: int, output_mode: int) -> int:
    """Number of distinct gate-to-gate paths from input to output, exact integer."""
    for mode in (input_mode, output_mode):
        if not 0 <= mode < arch.mode_count:
            raise IndexError(f"mode {mode} out of range for {arch.mode_count} modes")
    counts = [0] * arch.mode_count
    counts[input_mode] = 1
    for layer in arch.layers:
        for slot in layer.slots:
            total = counts[slot.a] + counts[slot.b]
            counts[slot.a] = total
            counts[slot.b] = total
    return counts[output_mode]


def mode_coordinates(side_lengths: Sequence[int]) -> np.ndarray:
    """Lattice coordinates of each flattened mode index, shape (M, d)."""
    sides = tuple(int(s) for s in side_lengths)
    m = math.prod(sides)
    return np.stack(np.unravel_index(np.arange(m), sides), axis=1)


def effective_lightcone_radius(
    photons: int, depth: int, lam: float, beta: float, dimension: int
) -> int:
    """Smallest integer radius l with l >= sqrt(2 n^lam * depth / (beta d)).

    Outside this radius the per-mode leakage of a depth-``depth`` lattice
    circuit is small enough that truncating the unitary there perturbs output
    probabilities by at most the additive-error budget of the easy regime.
    """
    if photons < 1:
        raise ValueError(f"photon number must be positive, got {photons}")
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    if lam <= 0:
        raise ValueError(f"lightcone exponent must be positive, got {lam}")
    if not 0 < beta < 1:
        raise ValueError(f"leakage exponent must lie in (0, 1), got {beta}")
    if dimension < 1:
        raise ValueError(f"lattice dimension must be positive, got {dimension}")
    return math.ceil(math.sqrt(2.0 * photons**lam * depth / (beta * dimension)))


def _far_mask(side_lengths: Sequence[int], radius: int) -> np.ndarray:
    """Boolean (M, M) mask: True where two modes are more than ``radius`` apart
    in at least one lattice dimension."""
    coords = mode_coordinates(side_lengths)
    diff = np.abs(coords[:, None, :] - coords[None, :, :])
    return (diff > radius).any(axis=2)


def leakage_rate(
    u: np.ndarray, side_lengths: Sequence[int], input_mode: int, radius: int
) -> float:
    """Column weight of ``input_mode`` outside the box of the given radius."""
    u = np.asarray(u)
    m = math.prod(side_lengths)
    if u.shape != (m, m):
        raise ValueError(f"matrix shape {u.shape} does not match {m} lattice modes")
    if not 0 <= input_mode < m:
        raise IndexError(f"mode {input_mode} out of range for {m} modes")
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    far = _far_mask(side_lengths, radius)[:, input_mode]
    return float(np.sum(np.abs(u[far, input_mode]) ** 2))


def truncate_unitary(u: np.ndarray, side_lengths: Sequence[int], radius: int) -> np.ndarray:
    """Zero every entry coupling modes farther than ``radius`` apart in some dimension.

    The result is generally not unitary; its squared Frobenius distance from
    ``u`` equals the summed leakage rates of all columns.
    """
    u = np.asarray(u)
    m = math.prod(side_lengths)
    if u.shape != (m, m):
        raise ValueError(f"matrix shape {u.shape} does not match {m} lattice modes")
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    out = u.copy()
    out[_far_mask(side_lengths, radius)] = 0
    return out


def arch_to_dict(arch: CircuitArchitecture) -> dict:
    """JSON-ready description: family, parameters and the explicit layer list."""
    d: dict = {
        "family": arch.family,
        "mode_count": arch.mode_count,
        "layers": [[[slot.a, slot.b] for slot in layer.slots] for layer in arch.layers],
    }
    if arch.dimension is not None:
        d["dimension"] = arch.dimension
    if arch.side_lengths is not None:
        d["side_lengths"] = list(arch.side_lengths)
    if arch.log2_modes is not None:
        d["log2_modes"] = arch.log2_modes
    if arch.rounds is not None:
        d["rounds"] = arch.rounds
    return d


def arch_from_dict(d: dict) -> CircuitArchitecture:
    """Rebuild an architecture from its dictionary form, revalidating invariants."""
    layers = tuple(
        Layer(tuple(GateSlot(int(a), int(b)) for a, b in layer)) for layer in d["layers"]
    )
    side = d.get("side_lengths")
    return CircuitArchitecture(
        mode_count=int(d["mode_count"]),
        layers=layers,
        family=d.get("family", "custom"),
        dimension=d.get("dimension"),
        side_lengths=tuple(int(s) for s in side) if side is not None else None,
        log2_modes=d.get("log2_modes"),
        rounds=d.get("rounds"),
    )


def arch_to_json(arch: CircuitArchitecture) -> str:
    return json.dumps(arch_to_dict(arch), sort_keys=True)


def arch_from_json(text: str) -> CircuitArchitecture:
    return arch_from_dict(json.loads(text))
