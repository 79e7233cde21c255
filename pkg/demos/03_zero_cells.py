"""The zero cell and the renormalized stationary zero-cell path.

The zero cell is the cell containing the origin. Its containment functional
is exact: P(cell contains K) = exp(-Lambda([K])). The renormalized path with
base a > 1 applies cell -> (a * cell) intersect (a/(a-1) * fresh cell); every
step keeps the same stationary law, and scaled copies nest into each other.
"""
import math
from pathlib import Path

from crofton import (
    centered_square,
    contains,
    discrete_xy,
    indicators_pair,
    master_stream,
    render_svg,
    sample_gamma_path,
    sample_zero_cell,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

xy = discrete_xy()
rng = master_stream(99)

# Under the axis measure the zero cell is a rectangle whose four edge
# distances are independent Exponential(1/2) variables.
cell = sample_zero_cell(xy, rng)
print("a sampled zero cell (axis measure):")
for x, y in cell.vertices:
    print(f"  ({x:+.4f}, {y:+.4f})")

k = centered_square(1.0)  # hitting mass 1
n = 50000
freq = sum(contains(sample_zero_cell(xy, rng), k) for _ in range(n)) / n
print(f"\nP(zero cell covers the unit square): {freq:.4f}  (exp(-1) = {math.exp(-1):.4f})")

# A stationary renormalized path; consecutive cells nest after rescaling.
path = sample_gamma_path(xy, 2.0, 8, rng)
path.validate()
bits_k, bits_2k = indicators_pair(path, k)
print("\ncontainment bits along one path (body K, then 2K):")
print("  K :", bits_k.bits.tolist())
print("  2K:", bits_2k.bits.tolist())
print("  (a 1 for 2K forces 1s for K at this and the previous index)")

(OUT / "zero_cell_path.svg").write_text(render_svg(path))
print(f"\nwrote nested-outline rendering to {OUT}/zero_cell_path.svg")
