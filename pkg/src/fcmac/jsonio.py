"""JSON readers and writers for every file format the CLI accepts.

Read errors carry the path of the offending field so CLI diagnostics can
name it exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .channels import DiscreteMAC
from .feasibility import DistortionTable, FeasibilityReport, SystemSpec
from .graphs import CharGraph, Coloring, FunctionTable
from .probability import Alphabet, JointPMF, Kernel, validate


class SpecFormatError(ValueError):
    """A file does not match its schema; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _get(obj: dict, key: str, path: str):
    if not isinstance(obj, dict):
        raise SpecFormatError(path, f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise SpecFormatError(f"{path}.{key}", "missing required field")
    return obj[key]


def _expect_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SpecFormatError(path, f"expected an array, got {type(value).__name__}")
    return value


def _label(value, path: str):
    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        raise SpecFormatError(path, "labels must be strings or numbers")
    return value


def _emit_label(value):
    if isinstance(value, (str, int, float)) and not isinstance(value, bool):
        return value
    return str(value)


def alphabet_from_json(obj, path: str) -> Alphabet:
    name = _get(obj, "name", path)
    if not isinstance(name, str):
        raise SpecFormatError(f"{path}.name", "alphabet name must be a string")
    symbols = _expect_list(_get(obj, "symbols", path), f"{path}.symbols")
    syms = tuple(_label(s, f"{path}.symbols[{i}]") for i, s in enumerate(symbols))
    try:
        return Alphabet(name, syms)
    except ValueError as exc:
        raise SpecFormatError(f"{path}.symbols", str(exc)) from None


def alphabet_to_json(a: Alphabet) -> dict:
    return {"name": a.name, "symbols": [_emit_label(s) for s in a.symbols]}


def _nested_floats(data, shape: tuple[int, ...], path: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise SpecFormatError(path, "expected nested numeric arrays") from None
    if arr.shape != shape:
        raise SpecFormatError(path, f"shape {arr.shape} does not match axes {shape}")
    return arr


def pmf_from_json(obj, path: str = "$") -> JointPMF:
    axes_json = _expect_list(_get(obj, "axes", path), f"{path}.axes")
    axes = tuple(alphabet_from_json(a, f"{path}.axes[{i}]") for i, a in enumerate(axes_json))
    shape = tuple(len(a) for a in axes)
    mass = _nested_floats(_get(obj, "mass", path), shape, f"{path}.mass")
    try:
        pmf = JointPMF(axes, mass)
    except ValueError as exc:
        raise SpecFormatError(path, str(exc)) from None
    report = validate(pmf)
    if not report.ok:
        p = report.problems[0]
        where = f" at index {list(p.index)}" if p.index is not None else ""
        raise SpecFormatError(f"{path}.mass", f"{p.kind}{where}: {p.magnitude}")
    return pmf


def pmf_to_json(pmf: JointPMF) -> dict:
    return {"axes": [alphabet_to_json(a) for a in pmf.axes],
            "mass": pmf.mass.tolist()}


def kernel_from_json(obj, path: str = "$") -> Kernel:
    from_json = _expect_list(_get(obj, "from_axes", path), f"{path}.from_axes")
    to_json = _expect_list(_get(obj, "to_axes", path), f"{path}.to_axes")
    from_axes = tuple(alphabet_from_json(a, f"{path}.from_axes[{i}]")
                      for i, a in enumerate(from_json))
    to_axes = tuple(alphabet_from_json(a, f"{path}.to_axes[{i}]")
                    for i, a in enumerate(to_json))
    n_from = int(np.prod([len(a) for a in from_axes]))
    n_to = int(np.prod([len(a) for a in to_axes]))
    rows = _nested_floats(_get(obj, "rows", path), (n_from, n_to), f"{path}.rows")
    try:
        return Kernel(from_axes, to_axes, rows)
    except ValueError as exc:
        raise SpecFormatError(f"{path}.rows", str(exc)) from None


def kernel_to_json(k: Kernel) -> dict:
    return {"from_axes": [alphabet_to_json(a) for a in k.from_axes],
            "to_axes": [alphabet_to_json(a) for a in k.to_axes],
            "rows": k.rows.tolist()}


def mac_from_json(obj, path: str = "$") -> DiscreteMAC:
    law = kernel_from_json(obj, path)
    if len(law.from_axes) != 2 or len(law.to_axes) != 1:
        raise SpecFormatError(path, "a channel kernel needs two input axes and one output axis")
    return DiscreteMAC((law.from_axes[0], law.from_axes[1]), law.to_axes[0], law)


def mac_to_json(mac: DiscreteMAC) -> dict:
    return kernel_to_json(mac.law)


def graph_from_json(obj, path: str = "$", name: str = "v") -> CharGraph:
    verts = _expect_list(_get(obj, "vertices", path), f"{path}.vertices")
    symbols = tuple(_label(v, f"{path}.vertices[{i}]") for i, v in enumerate(verts))
    try:
        alphabet = Alphabet(obj.get("name", name), symbols)
    except ValueError as exc:
        raise SpecFormatError(f"{path}.vertices", str(exc)) from None
    edges = set()
    for i, e in enumerate(_expect_list(_get(obj, "edges", path), f"{path}.edges")):
        pair = _expect_list(e, f"{path}.edges[{i}]")
        if len(pair) != 2:
            raise SpecFormatError(f"{path}.edges[{i}]", "an edge is a two-element array")
        a, b = pair
        for s in (a, b):
            if s not in symbols:
                raise SpecFormatError(f"{path}.edges[{i}]", f"unknown vertex {s!r}")
        edges.add((a, b))
    try:
        return CharGraph(alphabet, frozenset(edges))
    except ValueError as exc:
        raise SpecFormatError(f"{path}.edges", str(exc)) from None


def graph_to_json(g: CharGraph) -> dict:
    return {"vertices": [_emit_label(v) for v in g.vertices.symbols],
            "edges": [[_emit_label(a), _emit_label(b)] for a, b in g.sorted_edges()]}


def coloring_to_json(c: Coloring) -> dict:
    return {str(v): str(c.color_of[v]) for v in c.graph.vertices.symbols}


def function_table_from_json(obj, path: str = "$") -> FunctionTable:
    axes_json = _expect_list(_get(obj, "domain_axes", path), f"{path}.domain_axes")
    axes = tuple(alphabet_from_json(a, f"{path}.domain_axes[{i}]")
                 for i, a in enumerate(axes_json))
    shape = tuple(len(a) for a in axes)
    data = _get(obj, "values", path)
    values = np.empty(shape, dtype=object)
    try:
        flat = np.asarray(data, dtype=object).reshape(shape)
    except ValueError:
        raise SpecFormatError(f"{path}.values",
                              f"values must form a dense table of shape {shape}") from None
    it = np.nditer(np.zeros(shape), flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        values[idx] = _label(flat[idx], f"{path}.values{list(idx)}")
    return FunctionTable(axes, values)


def function_table_to_json(f: FunctionTable) -> dict:
    out = np.empty(f.values.shape, dtype=object)
    flat_src = f.values.ravel()
    flat_dst = out.ravel()
    for i, v in enumerate(flat_src):
        flat_dst[i] = _emit_label(v)
    return {"domain_axes": [alphabet_to_json(a) for a in f.domain_axes],
            "values": out.tolist()}


def distortion_from_json(obj, path: str = "$") -> DistortionTable:
    outs = _expect_list(_get(obj, "function_range", path), f"{path}.function_range")
    ests = _expect_list(_get(obj, "decoder_range", path), f"{path}.decoder_range")
    out_labels = tuple(_label(v, f"{path}.function_range[{i}]") for i, v in enumerate(outs))
    est_labels = tuple(_label(v, f"{path}.decoder_range[{i}]") for i, v in enumerate(ests))
    values = _nested_floats(_get(obj, "values", path),
                            (len(out_labels), len(est_labels)), f"{path}.values")
    try:
        return DistortionTable(out_labels, est_labels, values)
    except ValueError as exc:
        raise SpecFormatError(f"{path}.values", str(exc)) from None


def distortion_to_json(d: DistortionTable) -> dict:
    return {"function_range": [_emit_label(v) for v in d.output_labels],
            "decoder_range": [_emit_label(v) for v in d.estimate_labels],
            "values": d.values.tolist()}


def system_spec_from_json(obj, path: str = "$") -> SystemSpec:
    target = _get(obj, "target_d", path)
    if isinstance(target, bool) or not isinstance(target, (int, float)):
        raise SpecFormatError(f"{path}.target_d", "target distortion must be a number")
    try:
        return SystemSpec(
            source_joint=pmf_from_json(_get(obj, "source_joint", path), f"{path}.source_joint"),
            w1_kernel=kernel_from_json(_get(obj, "w1_kernel", path), f"{path}.w1_kernel"),
            w2_kernel=kernel_from_json(_get(obj, "w2_kernel", path), f"{path}.w2_kernel"),
            x1_kernel=kernel_from_json(_get(obj, "x1_kernel", path), f"{path}.x1_kernel"),
            x2_kernel=kernel_from_json(_get(obj, "x2_kernel", path), f"{path}.x2_kernel"),
            channel=mac_from_json(_get(obj, "channel", path), f"{path}.channel"),
            function=function_table_from_json(_get(obj, "function", path), f"{path}.function"),
            decoder=function_table_from_json(_get(obj, "decoder", path), f"{path}.decoder"),
            distortion=distortion_from_json(_get(obj, "distortion", path), f"{path}.distortion"),
            target_d=float(target),
        )
    except SpecFormatError:
        raise
    except ValueError as exc:
        raise SpecFormatError(path, str(exc)) from None


def system_spec_to_json(spec: SystemSpec) -> dict:
    return {
        "source_joint": pmf_to_json(spec.source_joint),
        "w1_kernel": kernel_to_json(spec.w1_kernel),
        "w2_kernel": kernel_to_json(spec.w2_kernel),
        "x1_kernel": kernel_to_json(spec.x1_kernel),
        "x2_kernel": kernel_to_json(spec.x2_kernel),
        "channel": mac_to_json(spec.channel),
        "function": function_table_to_json(spec.function),
        "decoder": function_table_to_json(spec.decoder),
        "distortion": distortion_to_json(spec.distortion),
        "target_d": spec.target_d,
    }


def feasibility_report_to_json(report: FeasibilityReport) -> dict:
    return {
        "inequalities": [
            {"name": r.name, "lhs_bits": r.lhs_bits, "rhs_bits": r.rhs_bits,
             "margin_bits": r.margin_bits, "verdict": r.verdict}
            for r in report.inequalities
        ],
        "achieved_distortion": report.achieved_distortion,
        "target_distortion": report.target_distortion,
        "distortion_ok": report.distortion_ok,
    }


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SpecFormatError("$", f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise SpecFormatError("$", f"invalid JSON in {path}: {exc}") from None


def dump_json(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
