"""Shared builders for the bundled example systems.

Two discrete systems recur across the experiments, the CLI and the tests:
the ternary off-diagonal source with the order-comparison function, and the
three-cell quantized pair with the absolute-difference function. Both ride
the binary adder channel.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .channels import adder_mac
from .feasibility import DistortionTable, SystemSpec
from .graphs import FunctionTable
from .probability import Alphabet, JointPMF, Kernel, compose

TERNARY = ("1", "2", "3")
BITS = ("0", "1")

# the documented 2-coloring of the single-edge confusability graph: symbols
# 1 and 2 share a color, 3 gets the other
COLOR_OF = {"1": "0", "2": "0", "3": "1"}


def _singleton(name: str) -> Alphabet:
    return Alphabet(name, ("-",))


def ternary_source_joint(name1: str = "u1", name2: str = "u2") -> JointPMF:
    """Uniform mass 1/6 on every off-diagonal ternary pair."""
    mass = np.full((3, 3), 1.0 / 6.0)
    np.fill_diagonal(mass, 0.0)
    return JointPMF((Alphabet(name1, TERNARY), Alphabet(name2, TERNARY)), mass)


def comparison_function(name1: str = "u1", name2: str = "u2") -> FunctionTable:
    """Indicator that the first source exceeds the second (0/1 labels)."""
    axes = (Alphabet(name1, TERNARY), Alphabet(name2, TERNARY))
    return FunctionTable.from_callable(axes, lambda a, b: 1 if int(a) > int(b) else 0)


def color_kernel_single(source_name: str, color_name: str) -> Kernel:
    """Deterministic coloring of one ternary source (no side-information input)."""
    src = Alphabet(source_name, TERNARY)
    col = Alphabet(color_name, BITS)
    return Kernel.deterministic((src,), (col,), lambda s: COLOR_OF[s])


def side_info_kernel(name1: str = "u1", name2: str = "u2", z_name: str = "z") -> Kernel:
    """Decoder side information: absolute difference of the ternary sources.

    The zero-difference symbol exists only to keep the map total; it has no
    mass under the off-diagonal source.
    """
    a1 = Alphabet(name1, TERNARY)
    a2 = Alphabet(name2, TERNARY)
    z = Alphabet(z_name, ("0", "1", "2"))
    return Kernel.deterministic((a1, a2), (z,),
                                lambda a, b: str(abs(int(a) - int(b))))


def ternary_with_side_info() -> JointPMF:
    """Three-axis joint (u1, u2, z) with z the absolute source difference."""
    return compose(ternary_source_joint(), [side_info_kernel()])


def _flip(bit: str) -> str:
    return "1" if bit == "0" else "0"


def section5_system(code: str = "joint") -> SystemSpec:
    """Ternary comparison over the adder channel.

    ``code="joint"``: colors mapped to correlated channel inputs (x1 = c1,
    x2 = 1 - c2). ``code="independent"``: channel inputs drawn from the
    product of the color marginals, independent of everything else.

    The color pair (0, 0) is ambiguous for the comparison function (it
    covers source pairs with both outputs), so the decoder is the majority
    rule and the target distortion is the resulting 1/6.
    """
    u1 = Alphabet("u1", TERNARY)
    u2 = Alphabet("u2", TERNARY)
    z1, z2, z = _singleton("z1"), _singleton("z2"), _singleton("z")
    c1 = Alphabet("c1", BITS)
    c2 = Alphabet("c2", BITS)
    base = ternary_source_joint()
    source = JointPMF((u1, u2, z1, z2, z), base.mass[:, :, None, None, None])

    w1 = Kernel.deterministic((u1, z1), (c1,), lambda s, _: COLOR_OF[s])
    w2 = Kernel.deterministic((u2, z2), (c2,), lambda s, _: COLOR_OF[s])
    mac = adder_mac()
    x1_axis, x2_axis = mac.input_alphabets
    if code == "joint":
        x1 = Kernel.deterministic((c1,), (x1_axis,), lambda c: c)
        x2 = Kernel.deterministic((c2,), (x2_axis,), _flip)
    elif code == "independent":
        marginal = (2.0 / 3.0, 1.0 / 3.0)  # each color is 0 with probability 2/3
        x1 = Kernel.constant((c1,), (x1_axis,), marginal)
        x2 = Kernel.constant((c2,), (x2_axis,), marginal)
    else:
        raise ValueError(f"code must be 'joint' or 'independent', got {code!r}")

    decode = {("0", "0"): 0, ("0", "1"): 0, ("1", "0"): 1, ("1", "1"): 0}
    decoder = FunctionTable.from_callable((c1, c2, z), lambda a, b, _: decode[(a, b)])
    distortion = DistortionTable((0, 1), (0, 1), [[0.0, 1.0], [1.0, 0.0]])
    return SystemSpec(source, w1, w2, x1, x2, mac,
                      comparison_function(), decoder, distortion,
                      target_d=1.0 / 6.0)


# --- quantized-cell system -------------------------------------------------

def grid_centers(cells: int = 3) -> list[Fraction]:
    """Cell midpoints of the unit interval as exact fractions."""
    return [Fraction(2 * i + 1, 2 * cells) for i in range(cells)]


def grid_cell_function(cells: int = 3, name1: str = "w1", name2: str = "w2",
                       ) -> FunctionTable:
    """Absolute difference of cell centers, with exact fraction labels."""
    centers = grid_centers(cells)
    axes = (Alphabet(name1, tuple(str(i + 1) for i in range(cells))),
            Alphabet(name2, tuple(str(i + 1) for i in range(cells))))
    return FunctionTable.from_callable(
        axes, lambda a, b: abs(centers[int(a) - 1] - centers[int(b) - 1]))


def grid_color_of(cells: int = 3) -> dict:
    """Alternating 2-coloring of the path-shaped cell confusability graph."""
    return {str(i + 1): str(i % 2) for i in range(cells)}


def grid_color_kernel(cells: int, source_name: str, color_name: str) -> Kernel:
    src = Alphabet(source_name, tuple(str(i + 1) for i in range(cells)))
    col = Alphabet(color_name, BITS)
    color_of = grid_color_of(cells)
    return Kernel.deterministic((src,), (col,), lambda s: color_of[s])


def grid_system(cells: int = 3, target_d: float = 1.0 / 6.0) -> SystemSpec:
    """Quantized-cell absolute difference over the adder channel via colors.

    Only supported for three cells: with more cells two colors no longer
    identify the center gap on the off-diagonal support.
    """
    if cells != 3:
        raise ValueError("the color decoding table is only defined for 3 cells")
    centers = grid_centers(cells)
    symbols = tuple(str(i + 1) for i in range(cells))
    u1 = Alphabet("u1", symbols)
    u2 = Alphabet("u2", symbols)
    z1, z2, z = _singleton("z1"), _singleton("z2"), _singleton("z")
    c1 = Alphabet("c1", BITS)
    c2 = Alphabet("c2", BITS)

    from .schemes import offdiagonal_cell_pmf
    base = offdiagonal_cell_pmf(cells, "u1", "u2")
    source = JointPMF((u1, u2, z1, z2, z), base.mass[:, :, None, None, None])

    color_of = grid_color_of(cells)
    w1 = Kernel.deterministic((u1, z1), (c1,), lambda s, _: color_of[s])
    w2 = Kernel.deterministic((u2, z2), (c2,), lambda s, _: color_of[s])
    mac = adder_mac()
    x1_axis, x2_axis = mac.input_alphabets
    x1 = Kernel.deterministic((c1,), (x1_axis,), lambda c: c)
    x2 = Kernel.deterministic((c2,), (x2_axis,), _flip)

    f = FunctionTable.from_callable(
        (u1, u2), lambda a, b: abs(centers[int(a) - 1] - centers[int(b) - 1]))
    gap1 = centers[1] - centers[0]
    gap2 = centers[2] - centers[0]
    decode = {("0", "0"): gap2, ("0", "1"): gap1,
              ("1", "0"): gap1, ("1", "1"): Fraction(0)}
    decoder = FunctionTable.from_callable((c1, c2, z), lambda a, b, _: decode[(a, b)])

    labels = sorted(set(f.range_labels()) | set(decoder.range_labels()))
    costs = [[float(abs(a - b)) for b in labels] for a in labels]
    distortion = DistortionTable(tuple(labels), tuple(labels), costs)
    return SystemSpec(source, w1, w2, x1, x2, mac, f, decoder, distortion,
                      target_d=target_d)
