"""Finite-alphabet probability tensors and information measures, all in bits."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

NORMALIZATION_TOL = 1e-9
INFO_TOL = 1e-9

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


class AxisError(ValueError):
    """Unknown, duplicate, or overlapping axis names."""


@dataclass(frozen=True)
class Alphabet:
    """Named, ordered set of distinct symbols.

    Symbol order is fixed and defines tensor axis indexing everywhere.
    """

    name: str
    symbols: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError(f"alphabet {self.name!r} needs at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"alphabet {self.name!r} has duplicate symbols")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def index(self, symbol) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise KeyError(f"{symbol!r} is not a symbol of alphabet {self.name!r}") from None

    def renamed(self, name: str) -> "Alphabet":
        return Alphabet(name, self.symbols)


def _as_name_tuple(arg) -> tuple[str, ...]:
    if isinstance(arg, str):
        return (arg,)
    return tuple(arg)


@dataclass(frozen=True, eq=False)
class JointPMF:
    """Dense joint probability tensor over named alphabets.

    The constructor checks only structure (shape, unique axis names); use
    :func:`validate` to diagnose normalization and sign violations.
    """

    axes: tuple[Alphabet, ...]
    mass: np.ndarray

    def __post_init__(self) -> None:
        axes = tuple(self.axes)
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise AxisError(f"duplicate axis names {names}")
        mass = np.array(self.mass, dtype=float)
        want = tuple(len(a) for a in axes)
        if mass.shape != want:
            raise ValueError(f"mass shape {mass.shape} does not match axis sizes {want}")
        mass.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "mass", mass)

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    def axis(self, name: str) -> Alphabet:
        for a in self.axes:
            if a.name == name:
                return a
        raise AxisError(f"no axis named {name!r}; have {self.axis_names}")

    def axis_position(self, name: str) -> int:
        for i, a in enumerate(self.axes):
            if a.name == name:
                return i
        raise AxisError(f"no axis named {name!r}; have {self.axis_names}")

    @staticmethod
    def uniform(axes: Sequence[Alphabet]) -> "JointPMF":
        axes = tuple(axes)
        shape = tuple(len(a) for a in axes)
        return JointPMF(axes, np.full(shape, 1.0 / float(np.prod(shape))))


@dataclass(frozen=True)
class ValidationProblem:
    kind: str            # "negative_entry" | "not_normalized"
    index: tuple | None  # offending tensor index, None for global problems
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[ValidationProblem, ...]

    def __bool__(self) -> bool:
        return self.ok


def validate(pmf: JointPMF) -> ValidationReport:
    """Diagnostic check of nonnegativity and normalization; never raises."""
    problems = []
    neg = np.argwhere(pmf.mass < 0)
    for idx in neg:
        idx = tuple(int(i) for i in idx)
        problems.append(ValidationProblem("negative_entry", idx, float(pmf.mass[idx])))
    total = float(pmf.mass.sum())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        problems.append(ValidationProblem("not_normalized", None, total))
    return ValidationReport(not problems, tuple(problems))


def marginalize(pmf: JointPMF, keep) -> JointPMF:
    """Sum out every axis not in ``keep``, preserving the original axis order."""
    keep_names = set(_as_name_tuple(keep))
    have = set(pmf.axis_names)
    unknown = keep_names - have
    if unknown:
        raise AxisError(f"unknown axes {sorted(unknown)}; have {pmf.axis_names}")
    drop = tuple(i for i, a in enumerate(pmf.axes) if a.name not in keep_names)
    kept = tuple(a for a in pmf.axes if a.name in keep_names)
    mass = pmf.mass.sum(axis=drop) if drop else pmf.mass
    return JointPMF(kept, mass)


def reorder(pmf: JointPMF, names: Sequence[str]) -> JointPMF:
    """Permute axes into the given order (must list every axis exactly once)."""
    names = _as_name_tuple(names)
    if sorted(names) != sorted(pmf.axis_names):
        raise AxisError(f"reorder needs a permutation of {pmf.axis_names}, got {names}")
    perm = [pmf.axis_position(n) for n in names]
    return JointPMF(tuple(pmf.axes[i] for i in perm), np.transpose(pmf.mass, perm))


@dataclass(frozen=True, eq=False)
class Kernel:
    """Conditional distribution between alphabet tuples.

    ``rows`` has one row per source tuple (C order over ``from_axes``) and one
    column per target tuple (C order over ``to_axes``); every row is a pmf.
    """

    from_axes: tuple[Alphabet, ...]
    to_axes: tuple[Alphabet, ...]
    rows: np.ndarray

    def __post_init__(self) -> None:
        from_axes = tuple(self.from_axes)
        to_axes = tuple(self.to_axes)
        rows = np.array(self.rows, dtype=float)
        n_from = int(np.prod([len(a) for a in from_axes]))
        n_to = int(np.prod([len(a) for a in to_axes]))
        if rows.shape != (n_from, n_to):
            raise ValueError(f"rows shape {rows.shape}, expected {(n_from, n_to)}")
        if (rows < 0).any():
            idx = tuple(int(i) for i in np.argwhere(rows < 0)[0])
            raise ValueError(f"kernel row entry at {idx} is negative: {rows[idx]}")
        sums = rows.sum(axis=1)
        bad = np.argwhere(np.abs(sums - 1.0) > NORMALIZATION_TOL)
        if bad.size:
            i = int(bad[0][0])
            raise ValueError(f"kernel row {i} sums to {sums[i]}, not 1")
        rows.setflags(write=False)
        object.__setattr__(self, "from_axes", from_axes)
        object.__setattr__(self, "to_axes", to_axes)
        object.__setattr__(self, "rows", rows)

    @property
    def tensor(self) -> np.ndarray:
        """Rows reshaped to ``from_shape + to_shape``."""
        shape = tuple(len(a) for a in self.from_axes) + tuple(len(a) for a in self.to_axes)
        return self.rows.reshape(shape)

    @staticmethod
    def deterministic(from_axes: Sequence[Alphabet], to_axes: Sequence[Alphabet],
                      fn: Callable) -> "Kernel":
        """Point-mass kernel: ``fn(*source_symbols)`` returns the target symbol(s)."""
        from_axes = tuple(from_axes)
        to_axes = tuple(to_axes)
        n_to = int(np.prod([len(a) for a in to_axes]))
        rows = np.zeros((int(np.prod([len(a) for a in from_axes])), n_to))
        to_strides = np.cumprod([1] + [len(a) for a in reversed(to_axes)])[:-1][::-1]
        for r, combo in enumerate(itertools.product(*(a.symbols for a in from_axes))):
            out = fn(*combo)
            if len(to_axes) == 1 and not isinstance(out, tuple):
                out = (out,)
            col = sum(a.index(s) * int(st) for a, s, st in zip(to_axes, out, to_strides))
            rows[r, col] = 1.0
        return Kernel(from_axes, to_axes, rows)

    @staticmethod
    def constant(from_axes: Sequence[Alphabet], to_axes: Sequence[Alphabet],
                 pmf_row: Sequence[float]) -> "Kernel":
        """Same target pmf for every source tuple (target independent of source)."""
        from_axes = tuple(from_axes)
        n_from = int(np.prod([len(a) for a in from_axes]))
        row = np.asarray(pmf_row, dtype=float).ravel()
        return Kernel(from_axes, tuple(to_axes), np.tile(row, (n_from, 1)))


def compose(base: JointPMF, kernels: Iterable[Kernel]) -> JointPMF:
    """Extend a joint with a chain of conditional factors.

    Each kernel's source axes must already be present in the accumulated
    joint (matched by name and symbols); its target axes are appended.
    """
    acc = base
    for k in kernels:
        for ax in k.from_axes:
            have = acc.axis(ax.name)
            if have.symbols != ax.symbols:
                raise AxisError(f"axis {ax.name!r} symbol mismatch between joint and kernel")
        for ax in k.to_axes:
            if ax.name in acc.axis_names:
                raise AxisError(f"kernel target axis {ax.name!r} already present")
        n = len(acc.axes)
        if n + len(k.to_axes) > len(_LETTERS):
            raise AxisError("too many axes to compose")
        joint_ss = _LETTERS[:n]
        from_ss = "".join(joint_ss[acc.axis_position(a.name)] for a in k.from_axes)
        to_ss = _LETTERS[n:n + len(k.to_axes)]
        mass = np.einsum(f"{joint_ss},{from_ss}{to_ss}->{joint_ss}{to_ss}",
                         acc.mass, k.tensor)
        acc = JointPMF(acc.axes + k.to_axes, mass)
    return acc


def _plogp(flat: np.ndarray) -> float:
    p = flat[flat > 0]
    return float(np.sum(p * np.log2(p)))


def entropy(pmf: JointPMF, axes) -> float:
    """Shannon entropy of the marginal on ``axes``, base 2, 0*log(0) = 0."""
    names = _as_name_tuple(axes)
    if not names:
        raise AxisError("entropy needs a non-empty axis set")
    return -_plogp(marginalize(pmf, names).mass.ravel())


def conditional_entropy(pmf: JointPMF, target, given=()) -> float:
    """H(target | given) = H(target, given) - H(given)."""
    t = _as_name_tuple(target)
    g = _as_name_tuple(given)
    if set(t) & set(g):
        raise AxisError(f"target {t} and given {g} overlap")
    if not t:
        raise AxisError("conditional_entropy needs a non-empty target")
    if not g:
        return entropy(pmf, t)
    return entropy(pmf, t + g) - entropy(pmf, g)


def mutual_information(pmf: JointPMF, a, b, given=()) -> float:
    """I(a; b | given), clamped to 0 when round-off drives it slightly negative."""
    a = _as_name_tuple(a)
    b = _as_name_tuple(b)
    g = _as_name_tuple(given)
    for x, y in ((a, b), (a, g), (b, g)):
        if set(x) & set(y):
            raise AxisError(f"axis sets must be pairwise disjoint: {a}, {b}, {g}")
    value = conditional_entropy(pmf, a, g) - conditional_entropy(pmf, a, b + g)
    if value < 0 and abs(value) < INFO_TOL:
        return 0.0
    return value


@dataclass(frozen=True)
class SlepianWolfBounds:
    """Rate-region corner quantities for lossless two-source coding."""

    first_given_second: float
    second_given_first: float
    sum_rate: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.first_given_second, self.second_given_first, self.sum_rate)


def slepian_wolf_bounds(pmf: JointPMF, first, second, given=()) -> SlepianWolfBounds:
    """Bounds for losslessly encoding two variables with decoder side information."""
    f = _as_name_tuple(first)
    s = _as_name_tuple(second)
    g = _as_name_tuple(given)
    for x, y in ((f, s), (f, g), (s, g)):
        if set(x) & set(y):
            raise AxisError(f"axis sets must be pairwise disjoint: {f}, {s}, {g}")
    return SlepianWolfBounds(
        conditional_entropy(pmf, f, s + g),
        conditional_entropy(pmf, s, f + g),
        conditional_entropy(pmf, f + s, g) if g else entropy(pmf, f + s),
    )


def binary_entropy(q: float) -> float:
    """Entropy in bits of a Bernoulli(q) variable."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    if q in (0.0, 1.0):
        return 0.0
    return float(-q * np.log2(q) - (1 - q) * np.log2(1 - q))
