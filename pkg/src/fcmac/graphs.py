"""Characteristic graphs, colorings, chromatic and conditional graph entropies."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .probability import Alphabet, AxisError, JointPMF, entropy

OR_PRODUCT_CAP = 4096
EXACT_COLORING_CAP = 12


class SizeCapError(ValueError):
    """An exact search was asked to run beyond its configured size cap."""


@dataclass(frozen=True, eq=False)
class CharGraph:
    """Confusability graph over a source alphabet.

    Edges are unordered pairs of vertex symbols, stored with the lower
    alphabet index first. No self-loops.
    """

    vertices: Alphabet
    edges: frozenset

    def __post_init__(self) -> None:
        norm = set()
        for e in self.edges:
            a, b = e
            ia, ib = self.vertices.index(a), self.vertices.index(b)
            if ia == ib:
                raise ValueError(f"self-loop at vertex {a!r}")
            norm.add((a, b) if ia < ib else (b, a))
        object.__setattr__(self, "edges", frozenset(norm))

    def has_edge(self, a, b) -> bool:
        ia, ib = self.vertices.index(a), self.vertices.index(b)
        if ia > ib:
            a, b = b, a
        return (a, b) in self.edges

    def adjacency_masks(self) -> list[int]:
        """Per-vertex neighbor bitmask, indexed in alphabet order."""
        masks = [0] * len(self.vertices)
        for a, b in self.edges:
            ia, ib = self.vertices.index(a), self.vertices.index(b)
            masks[ia] |= 1 << ib
            masks[ib] |= 1 << ia
        return masks

    def sorted_edges(self) -> list[tuple]:
        idx = self.vertices.index
        return sorted(self.edges, key=lambda e: (idx(e[0]), idx(e[1])))


@dataclass(frozen=True, eq=False)
class Coloring:
    """Proper, total vertex coloring; propriety is checked on construction."""

    graph: CharGraph
    color_of: Mapping

    def __post_init__(self) -> None:
        missing = [v for v in self.graph.vertices if v not in self.color_of]
        if missing:
            raise ValueError(f"coloring misses vertices {missing}")
        for a, b in self.graph.edges:
            if self.color_of[a] == self.color_of[b]:
                raise ValueError(f"edge ({a!r}, {b!r}) has equal colors")
        object.__setattr__(self, "color_of", dict(self.color_of))

    def colors(self) -> tuple:
        seen = []
        for v in self.graph.vertices:
            c = self.color_of[v]
            if c not in seen:
                seen.append(c)
        return tuple(seen)

    def color_alphabet(self, name: str) -> Alphabet:
        return Alphabet(name, self.colors())

    def class_masses(self, marginal: JointPMF) -> dict:
        """Total marginal mass per color; marginal is a single-axis pmf."""
        _check_vertex_axis(marginal, self.graph, "marginal")
        out: dict = {}
        for i, v in enumerate(self.graph.vertices):
            c = self.color_of[v]
            out[c] = out.get(c, 0.0) + float(marginal.mass[i])
        return out


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """Total function on a product of alphabets, stored as a dense label table."""

    domain_axes: tuple[Alphabet, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        axes = tuple(self.domain_axes)
        values = np.empty(tuple(len(a) for a in axes), dtype=object)
        values[...] = np.asarray(self.values, dtype=object).reshape(values.shape)
        values.setflags(write=False)
        object.__setattr__(self, "domain_axes", axes)
        object.__setattr__(self, "values", values)

    @staticmethod
    def from_callable(domain_axes, fn: Callable) -> "FunctionTable":
        axes = tuple(domain_axes)
        values = np.empty(tuple(len(a) for a in axes), dtype=object)
        for combo in itertools.product(*(range(len(a)) for a in axes)):
            values[combo] = fn(*(a.symbols[i] for a, i in zip(axes, combo)))
        return FunctionTable(axes, values)

    def value_at(self, *symbols) -> object:
        idx = tuple(a.index(s) for a, s in zip(self.domain_axes, symbols))
        return self.values[idx]

    def range_labels(self) -> tuple:
        """Distinct output labels, ordered by first appearance in C order."""
        seen = []
        for v in self.values.ravel():
            if v not in seen:
                seen.append(v)
        return tuple(seen)

    def reordered(self, names) -> "FunctionTable":
        """Permute domain axes into the given name order."""
        names = tuple(names)
        have = tuple(a.name for a in self.domain_axes)
        if sorted(names) != sorted(have):
            raise AxisError(f"need a permutation of {have}, got {names}")
        perm = [have.index(n) for n in names]
        return FunctionTable(tuple(self.domain_axes[i] for i in perm),
                             np.transpose(self.values, perm))


def _check_vertex_axis(pmf: JointPMF, g: CharGraph, what: str) -> None:
    if pmf.axes[0].symbols != g.vertices.symbols:
        raise AxisError(f"{what} first axis must carry the graph's vertex symbols")


def absolute_difference(a, b) -> float:
    """Default range distortion for threshold-mode characteristic graphs."""
    return abs(a - b)


def characteristic_graph(joint: JointPMF, f: FunctionTable, *,
                         delta=None, range_distortion: Callable = absolute_difference,
                         ) -> CharGraph:
    """Confusability graph of the first axis with respect to the second and f.

    Exact mode (``delta is None``): two symbols are joined when some
    positive-probability peer symbol makes the function values differ.
    Threshold mode: joined when the values differ by more than ``delta``
    under ``range_distortion`` for some such peer.
    """
    if len(joint.axes) != 2:
        raise AxisError(f"need a two-axis joint, got axes {joint.axis_names}")
    if len(f.domain_axes) != 2:
        raise AxisError("function must be defined on two axes")
    for fa, ja in zip(f.domain_axes, joint.axes):
        if fa.symbols != ja.symbols:
            raise AxisError(f"function axis {fa.name!r} does not match joint axis {ja.name!r}")
    if delta is not None and delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    verts = joint.axes[0]
    peers = joint.axes[1]
    mass = joint.mass
    edges = set()
    for i, j in itertools.combinations(range(len(verts)), 2):
        for k in range(len(peers)):
            if mass[i, k] > 0 and mass[j, k] > 0:
                fi, fj = f.values[i, k], f.values[j, k]
                if delta is None:
                    confusable = fi != fj
                else:
                    confusable = range_distortion(fi, fj) > delta
                if confusable:
                    edges.add((verts.symbols[i], verts.symbols[j]))
                    break
    return CharGraph(verts, frozenset(edges))


def or_product(g: CharGraph, n: int, cap: int = OR_PRODUCT_CAP) -> CharGraph:
    """Block-length-n graph: tuples adjacent iff adjacent in some coordinate."""
    if n < 1:
        raise ValueError(f"block length must be >= 1, got {n}")
    if n == 1:
        return g
    base = len(g.vertices)
    if base ** n > cap:
        raise SizeCapError(f"{base}^{n} vertices exceeds the cap of {cap}")
    tuples = list(itertools.product(g.vertices.symbols, repeat=n))
    verts = Alphabet(f"{g.vertices.name}^{n}", tuples)
    adj = g.adjacency_masks()
    idx = {s: i for i, s in enumerate(g.vertices.symbols)}
    edges = set()
    for u, v in itertools.combinations(tuples, 2):
        if any(adj[idx[a]] >> idx[b] & 1 for a, b in zip(u, v)):
            edges.add((u, v))
    return CharGraph(verts, frozenset(edges))


def _plogp(x: float) -> float:
    return x * np.log2(x) if x > 0 else 0.0


def _min_entropy_partition(adj: list[int], weights: np.ndarray,
                           ) -> tuple[list[int], float]:
    """Exact minimum of H(class | column) over proper partitions.

    ``weights[v, z]`` is the joint mass of vertex v with condition value z
    (one column for the unconditional problem). Vertices are processed in
    index order; branch-and-bound prunes on a per-column relaxation (all
    remaining column mass merged into the column's largest class). Ties
    resolve to the first partition in lexicographic restricted-growth
    order, i.e. the lexicographically smallest color-class partition.
    """
    n, m = weights.shape
    col_total = weights.sum(axis=0)
    h_cond = -sum(_plogp(c) for c in col_total)  # H(Z), subtracted at the end

    best_assign: list[int] | None = None
    best_val = float("inf")
    assign = [0] * n
    class_masks: list[int] = []
    class_mass: list[np.ndarray] = []
    # running sum of p*log2(p) over all (class, column) cells
    state = {"s": 0.0}

    def bound(remaining: np.ndarray) -> float:
        total = 0.0
        for z in range(m):
            r = remaining[z]
            if class_mass:
                mz = max(cm[z] for cm in class_mass)
                sz = sum(_plogp(cm[z]) for cm in class_mass)
                total += -(sz - _plogp(mz) + _plogp(mz + r))
            else:
                total += -_plogp(r)
        return total - h_cond

    def descend(v: int, remaining: np.ndarray) -> None:
        nonlocal best_assign, best_val
        if v == n:
            val = -state["s"] - h_cond
            if val < best_val - 1e-12:
                best_val = val
                best_assign = assign.copy()
            return
        if bound(remaining) >= best_val - 1e-12:
            return
        w = weights[v]
        rem = remaining - w
        bit = 1 << v
        for c in range(len(class_masks) + 1):
            if c < len(class_masks):
                if class_masks[c] & adj[v]:
                    continue
                old = class_mass[c].copy()
                ds = sum(_plogp(o + x) - _plogp(o) for o, x in zip(old, w))
                class_masks[c] |= bit
                class_mass[c] = old + w
                state["s"] += ds
                assign[v] = c
                descend(v + 1, rem)
                class_masks[c] &= ~bit
                class_mass[c] = old
                state["s"] -= ds
            else:
                ds = sum(_plogp(x) for x in w)
                class_masks.append(bit)
                class_mass.append(w.copy())
                state["s"] += ds
                assign[v] = c
                descend(v + 1, rem)
                class_masks.pop()
                class_mass.pop()
                state["s"] -= ds

    descend(0, col_total.copy())
    assert best_assign is not None
    return best_assign, max(best_val, 0.0)


def _greedy_assignment(adj: list[int], vertex_mass: np.ndarray) -> list[int]:
    """First-fit coloring over vertices in decreasing-mass order."""
    n = len(adj)
    order = sorted(range(n), key=lambda v: (-vertex_mass[v], v))
    assign = [-1] * n
    for v in order:
        used = {assign[u] for u in range(n) if assign[u] >= 0 and adj[v] >> u & 1}
        c = 0
        while c in used:
            c += 1
        assign[v] = c
    # renumber by first appearance in alphabet order so output is canonical
    remap: dict[int, int] = {}
    for v in range(n):
        remap.setdefault(assign[v], len(remap))
    return [remap[a] for a in assign]


def min_entropy_coloring(g: CharGraph, marginal: JointPMF, mode: str = "exact",
                         ) -> tuple[Coloring, float]:
    """Proper coloring minimizing (exact) or heuristically reducing (greedy)
    the entropy of the induced color distribution."""
    _check_vertex_axis(marginal, g, "marginal")
    if len(marginal.axes) != 1:
        raise AxisError("marginal must be a single-axis pmf over the vertices")
    adj = g.adjacency_masks()
    mass = marginal.mass.astype(float)
    if mode == "exact":
        if len(g.vertices) > EXACT_COLORING_CAP:
            raise SizeCapError(
                f"{len(g.vertices)} vertices exceeds the exact-mode cap of {EXACT_COLORING_CAP}")
        assign, value = _min_entropy_partition(adj, mass.reshape(-1, 1))
    elif mode == "greedy":
        assign = _greedy_assignment(adj, mass)
        value = -sum(_plogp(t) for t in np.bincount(assign, weights=mass))
    else:
        raise ValueError(f"mode must be 'exact' or 'greedy', got {mode!r}")
    coloring = Coloring(g, {v: c for v, c in zip(g.vertices.symbols, assign)})
    return coloring, float(value)


def iid_pair_power(joint: JointPMF, n: int) -> JointPMF:
    """n-fold iid product of a two-axis joint, axes grouped per original axis."""
    if len(joint.axes) != 2:
        raise AxisError("need a two-axis joint")
    if n == 1:
        return joint
    full = joint.mass
    for _ in range(n - 1):
        full = np.multiply.outer(full, joint.mass)
    # outer() orders axes (i1,j1,i2,j2,...); group the i's then the j's
    perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    full = np.transpose(full, perm)
    s1, s2 = len(joint.axes[0]), len(joint.axes[1])
    axes = tuple(
        Alphabet(f"{a.name}^{n}", tuple(itertools.product(a.symbols, repeat=n)))
        for a in joint.axes)
    return JointPMF(axes, full.reshape(s1 ** n, s2 ** n))


def conditional_chromatic_entropy(g: CharGraph, joint: JointPMF, n: int = 1) -> float:
    """Per-symbol minimum of H(coloring | peer) over proper colorings of the
    n-fold OR-product graph, on the n-fold iid joint."""
    _check_vertex_axis(joint, g, "joint")
    if len(joint.axes) != 2:
        raise AxisError("need a two-axis joint")
    gn = or_product(g, n)
    if len(gn.vertices) > EXACT_COLORING_CAP:
        raise SizeCapError(
            f"OR-product has {len(gn.vertices)} vertices, over the cap of {EXACT_COLORING_CAP}")
    jn = iid_pair_power(joint, n)
    _, value = _min_entropy_partition(gn.adjacency_masks(), jn.mass.astype(float))
    return float(value) / n


def stable_sets(g: CharGraph, maximal_only: bool = True) -> list[frozenset]:
    """Stable (independent) vertex sets, optionally only the maximal ones."""
    n = len(g.vertices)
    if n > EXACT_COLORING_CAP:
        raise SizeCapError(f"{n} vertices exceeds the enumeration cap of {EXACT_COLORING_CAP}")
    adj = g.adjacency_masks()
    syms = g.vertices.symbols
    stable_masks = []
    for mask in range(1, 1 << n):
        if all(not (adj[v] & mask) for v in range(n) if mask >> v & 1):
            stable_masks.append(mask)
    if maximal_only:
        def extendable(mask: int) -> bool:
            return any(not (mask >> v & 1) and not (adj[v] & mask) for v in range(n))
        stable_masks = [m for m in stable_masks if not extendable(m)]
    return [frozenset(syms[v] for v in range(n) if m >> v & 1) for m in stable_masks]


@dataclass(frozen=True)
class ConditionalGraphEntropyResult:
    """Solver output: best value found with its feasible-coloring upper bound."""

    value: float
    upper_bound: float          # conditional chromatic entropy at n = 1
    kernel: np.ndarray          # p(stable set | vertex), rows in vertex order
    sets: tuple[frozenset, ...]
    converged: bool

    @property
    def warning(self) -> bool:
        return not self.converged


_CGE_SEED = 987654321


def conditional_graph_entropy(g: CharGraph, joint: JointPMF, *, restarts: int = 16,
                              tol: float = 1e-8, max_iter: int = 10_000,
                              ) -> ConditionalGraphEntropyResult:
    """Minimize I(W; U1 | U2) over stable-set-valued W with W - U1 - U2.

    Support is restricted to maximal stable sets (any stable set extends to
    a maximal one without raising the objective). The objective is convex in
    the kernel, solved by alternating minimization with deterministic random
    restarts; the first restart starts from the uniform interior point.
    """
    _check_vertex_axis(joint, g, "joint")
    sets = stable_sets(g, maximal_only=True)
    syms = g.vertices.symbols
    n1, n2 = joint.mass.shape
    nw = len(sets)
    allowed = np.zeros((n1, nw))
    for j, s in enumerate(sets):
        for v in s:
            allowed[syms.index(v), j] = 1.0

    p = joint.mass.astype(float)
    p1 = p.sum(axis=1)
    p2 = p.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        p2_given_1 = np.where(p1[:, None] > 0, p / np.where(p1[:, None] > 0, p1[:, None], 1), 0.0)
        p1_given_2 = np.where(p2[None, :] > 0, p / np.where(p2[None, :] > 0, p2[None, :], 1), 0.0)

    def row_plogp(mat: np.ndarray) -> np.ndarray:
        out = np.zeros(mat.shape[0])
        for i, row in enumerate(mat):
            pos = row[row > 0]
            out[i] = float(np.sum(pos * np.log2(pos)))
        return out

    def objective(q: np.ndarray) -> float:
        r = p1_given_2.T @ q                       # r[u2, w]
        h_w_u2 = -float(np.sum(p2 * row_plogp(r)))
        h_w_u1 = -float(np.sum(p1 * row_plogp(q)))
        return h_w_u2 - h_w_u1

    upper = conditional_chromatic_entropy(g, joint, 1)
    rng = np.random.default_rng(_CGE_SEED)
    best_val = float("inf")
    best_q = None
    all_converged = True
    for restart in range(max(restarts, 1)):
        if restart == 0:
            q = allowed.copy()
        else:
            q = rng.random((n1, nw)) * allowed
        q /= q.sum(axis=1, keepdims=True)
        prev = float("inf")
        converged = False
        for _ in range(max_iter):
            cur = objective(q)
            if prev - cur < tol:
                converged = True
                break
            prev = cur
            r = p1_given_2.T @ q
            logr = np.log2(np.maximum(r, 1e-300))
            a = p2_given_1 @ logr                  # a[u1, w]
            a = np.where(allowed > 0, a, -np.inf)
            a = a - a.max(axis=1, keepdims=True)
            q = np.exp2(a)
            q /= q.sum(axis=1, keepdims=True)
        val = objective(q)
        all_converged = all_converged and converged
        if val < best_val:
            best_val = val
            best_q = q
    value = min(max(best_val, 0.0), upper)
    return ConditionalGraphEntropyResult(value, upper, best_q, tuple(sets), all_converged)


@dataclass(frozen=True)
class ZigzagResult:
    holds: bool
    witness: tuple | None   # ((x1, y1), (x2, y2)) with both cross pairs off support

    def __bool__(self) -> bool:
        return self.holds


def zigzag_check(joint: JointPMF) -> ZigzagResult:
    """Support condition: p(x1,y1) > 0 and p(x2,y2) > 0 imply p(x1,y2) > 0
    or p(x2,y1) > 0. Returns the first violating quadruple otherwise."""
    if len(joint.axes) != 2:
        raise AxisError("need a two-axis joint")
    mass = joint.mass
    support = np.argwhere(mass > 0)
    xs, ys = joint.axes[0].symbols, joint.axes[1].symbols
    for (i1, j1) in support:
        for (i2, j2) in support:
            if mass[i1, j2] == 0 and mass[i2, j1] == 0:
                return ZigzagResult(False, ((xs[i1], ys[j1]), (xs[i2], ys[j2])))
    return ZigzagResult(True, None)
