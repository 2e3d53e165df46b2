"""Discrete and Gaussian multiple access channel models and capacities."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .probability import Alphabet, AxisError, JointPMF, Kernel, compose, mutual_information

CAPACITY_GRID_POINTS = 51
CAPACITY_GRID_CAP = 4_000_000


@dataclass(frozen=True, eq=False)
class DiscreteMAC:
    """Memoryless two-transmitter channel with law p(y | x1, x2)."""

    input_alphabets: tuple[Alphabet, Alphabet]
    output_alphabet: Alphabet
    law: Kernel

    def __post_init__(self) -> None:
        a1, a2 = self.input_alphabets
        if self.law.from_axes != (a1, a2) or self.law.to_axes != (self.output_alphabet,):
            raise AxisError("channel law axes must be (input1, input2) -> (output,)")

    @property
    def law_tensor(self) -> np.ndarray:
        """Law reshaped to (|X1|, |X2|, |Y|)."""
        return self.law.tensor


@dataclass(frozen=True)
class GaussianMAC:
    """Additive-noise Gaussian MAC with a per-input power constraint."""

    power: float
    noise_var: float = 1.0

    def __post_init__(self) -> None:
        if self.power < 0:
            raise ValueError(f"power must be nonnegative, got {self.power}")
        if self.noise_var <= 0:
            raise ValueError(f"noise variance must be positive, got {self.noise_var}")


def adder_mac(x1_name: str = "x1", x2_name: str = "x2", y_name: str = "y") -> DiscreteMAC:
    """Binary-input channel whose output is the integer sum of the inputs."""
    bits = ("0", "1")
    a1 = Alphabet(x1_name, bits)
    a2 = Alphabet(x2_name, bits)
    out = Alphabet(y_name, ("0", "1", "2"))
    law = Kernel.deterministic((a1, a2), (out,), lambda s1, s2: str(int(s1) + int(s2)))
    return DiscreteMAC((a1, a2), out, law)


def mac_mutual_info(mac: DiscreteMAC, input_joint: JointPMF) -> float:
    """I(X1, X2; Y) when ``input_joint`` drives the channel."""
    a1, a2 = mac.input_alphabets
    if len(input_joint.axes) != 2:
        raise AxisError("input joint must have exactly the two channel input axes")
    for have, want in zip(input_joint.axes, (a1, a2)):
        if have.name != want.name or have.symbols != want.symbols:
            raise AxisError(f"input axis {have.name!r} does not match channel input {want.name!r}")
    joint = compose(input_joint, [mac.law])
    return mutual_information(joint, (a1.name, a2.name), mac.output_alphabet.name)


def _product_mutual_info(law3: np.ndarray, p1: np.ndarray, p2: np.ndarray) -> float:
    """I(X1,X2;Y) for independent inputs p1, p2 (law3 shaped inputs x output)."""
    py = np.einsum("i,j,ijy->y", p1, p2, law3)
    pos = py[py > 0]
    h_y = -float(np.sum(pos * np.log2(pos)))
    with np.errstate(divide="ignore", invalid="ignore"):
        plog = np.where(law3 > 0, law3 * np.log2(np.where(law3 > 0, law3, 1.0)), 0.0)
    h_y_given_x = -float(p1 @ plog.sum(axis=2) @ p2)
    return h_y - h_y_given_x


def _simplex_grid(dim: int, points: int) -> np.ndarray:
    """All pmfs on ``dim`` symbols with entries in multiples of 1/(points-1)."""
    steps = points - 1
    rows = []
    for combo in itertools.combinations_with_replacement(range(dim), steps):
        counts = np.bincount(combo, minlength=dim)
        rows.append(counts / steps)
    return np.array(rows)


def _golden_max(f, lo: float, hi: float, iters: int = 90) -> tuple[float, float]:
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


@dataclass(frozen=True)
class SumCapacityResult:
    bits: float
    input1: np.ndarray   # maximizing marginal on the first input
    input2: np.ndarray


def mac_sum_capacity_independent(mac: DiscreteMAC, grid_points: int = CAPACITY_GRID_POINTS,
                                 ) -> SumCapacityResult:
    """Maximum of I(X1, X2; Y) over product input distributions.

    Coarse grid over the two input simplices (first maximizer in grid order
    on ties), then coordinate refinement: golden-section line searches along
    pairwise mass exchanges, which are concave directions of the objective.
    """
    law3 = mac.law_tensor
    n1, n2 = law3.shape[0], law3.shape[1]
    steps = grid_points - 1
    total = math.comb(steps + n1 - 1, n1 - 1) * math.comb(steps + n2 - 1, n2 - 1)
    if total > CAPACITY_GRID_CAP:
        raise ValueError(
            f"capacity grid of {total} points exceeds the cap; "
            "input alphabets are too large for this search")
    g1 = _simplex_grid(n1, grid_points)
    g2 = _simplex_grid(n2, grid_points)

    # vectorized grid sweep
    py = np.einsum("ai,bj,ijy->aby", g1, g2, law3)
    with np.errstate(divide="ignore", invalid="ignore"):
        hy = -np.where(py > 0, py * np.log2(np.where(py > 0, py, 1.0)), 0.0).sum(axis=2)
        plog = np.where(law3 > 0, law3 * np.log2(np.where(law3 > 0, law3, 1.0)), 0.0)
    eh = g1 @ (-plog.sum(axis=2)) @ g2.T
    info = hy - eh
    flat = int(np.argmax(info))
    p1 = g1[flat // len(g2)].copy()
    p2 = g2[flat % len(g2)].copy()

    def value(q1, q2) -> float:
        return _product_mutual_info(law3, q1, q2)

    best = value(p1, p2)
    for _ in range(60):
        improved = best
        for which in (0, 1):
            p = p1 if which == 0 else p2
            dim = len(p)
            for i, j in itertools.combinations(range(dim), 2):
                lo, hi = -p[j], p[i]
                if hi - lo <= 0:
                    continue

                def along(t, i=i, j=j, which=which):
                    q = (p1 if which == 0 else p2).copy()
                    q[i] -= t
                    q[j] += t
                    return value(q, p2) if which == 0 else value(p1, q)

                t, ft = _golden_max(along, lo, hi)
                if ft > best:
                    best = ft
                    p[i] -= t
                    p[j] += t
        if best - improved < 1e-12:
            break
    p1 = np.clip(p1, 0.0, 1.0)
    p2 = np.clip(p2, 0.0, 1.0)
    p1 /= p1.sum()
    p2 /= p2.sum()
    return SumCapacityResult(float(best), p1, p2)


def gmac_sum_rate(mac: GaussianMAC, rho_x: float = 0.0) -> float:
    """Sum-rate bound for jointly Gaussian inputs at correlation ``rho_x``:
    (1/2) log2(1 + 2P(1 + rho_x) / noise variance)."""
    if not -1.0 <= rho_x <= 1.0:
        raise ValueError(f"input correlation must lie in [-1, 1], got {rho_x}")
    snr = 2.0 * mac.power * (1.0 + rho_x) / mac.noise_var
    return 0.5 * math.log2(1.0 + snr)
