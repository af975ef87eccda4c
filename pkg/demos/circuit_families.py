#!/usr/bin/env python3
"""Tour of the two circuit families: brickwork lattices and hypercubic sweeps.

Prints the layer schedules, watches lightcones grow with depth, and counts
input-to-output paths to show why one full sweep already connects everything.
"""
import numpy as np

from shallowbs import (
    RngStream,
    backward_lightcone,
    build_local_parallel,
    build_nlhs,
    forward_lightcone,
    path_count,
    realize,
)

chain = build_local_parallel(1, [8], 3)
print("1-d brickwork on 8 modes, depth 3:")
for d, layer in enumerate(chain.layers):
    pairs = [(s.a, s.b) for s in layer.slots]
    print(f"  layer {d}: {pairs}")

print("\nforward lightcone of mode 3 as depth grows:")
for depth in range(0, 4):
    cone = sorted(forward_lightcone(chain, 3, depth))
    print(f"  depth {depth}: {cone}")

grid = build_local_parallel(2, [3, 3], 4)
print(f"\n2-d brickwork on a 3x3 grid, depth 4: {grid.gate_count} gates")
print(f"  backward lightcone of corner mode 0 at full depth: "
      f"{sorted(backward_lightcone(grid, 0, 4))}")

# one sweep of the hypercubic circuit couples every input to every output
# through exactly one path; a second sweep multiplies the count by M
nlhs = build_nlhs(3, 2)
print("\nhypercubic circuit on 8 modes, 2 sweeps:")
for d, layer in enumerate(nlhs.layers):
    pairs = [(s.a, s.b) for s in layer.slots]
    print(f"  layer {d}: {pairs}")
for rounds in (1, 2, 3):
    arch = build_nlhs(3, rounds)
    print(f"  paths 0 -> 5 after {rounds} sweep(s): {path_count(arch, 0, 5)}")

u = realize(nlhs, RngStream(7))
print(f"\nrealized instance: unitary defect {np.abs(u.conj().T @ u - np.eye(8)).max():.2e}")
