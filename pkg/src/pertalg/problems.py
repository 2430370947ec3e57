"""JSON problem files and reports.

A problem file describes a complex, an A-infinity algebra or a module::

    {
      "kind": "ainf",
      "basis": {"1": ["u", "v", "w"], "2": ["uv", "wu"]},
      "ops": {"1": [{"in": ["w"], "out": "uv", "coef": "1"}],
              "2": [{"in": ["u", "v"], "out": "uv", "coef": "1"}]},
      "convention": "m",
      "hodge": {"s": [...], "t": [...]},
      "perturbation": {"x": [...]}
    }

Linear maps (hodge, perturbation) use entries ``{"in": label, "out": label,
"coef": "p/q"}``.  A module problem carries the algebra at the top level and
a ``"module"`` block with its own ``basis``/``ops`` (module input last), or
the string ``"regular"``; its ``hodge`` block refers to the module.

Reports are written with sorted keys and rationals as ``str(Fraction)``, so
the same input always gives the same bytes.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import ainf
from .hodge import ChainComplex, GradedMap, GradedSpace, HodgeData

KINDS = ("complex", "ainf", "module")


class ProblemError(ValueError):
    """Malformed problem file; the message starts with a location."""


def parse_rational(v, where: str = "") -> Fraction:
    if isinstance(v, bool):
        raise ProblemError(f"{where}: expected a rational, got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        parts = v.strip().split("/")
        try:
            if len(parts) == 1:
                return Fraction(int(parts[0]))
            if len(parts) == 2:
                q = int(parts[1])
                if q == 0:
                    raise ProblemError(f"{where}: zero denominator in {v!r}")
                return Fraction(int(parts[0]), q)
        except ValueError:
            pass
    raise ProblemError(f"{where}: expected a rational \"p/q\", got {v!r}")


def rational_str(c) -> str:
    return str(Fraction(c))


@dataclass(frozen=True, eq=False)
class LinearEntries:
    """Sparse entries of a linear map: (input label, output label, coefficient)."""
    entries: tuple[tuple[str, str, Fraction], ...]

    def to_map(self, src: GradedSpace, shift: int, tgt: GradedSpace | None = None) -> GradedMap:
        return GradedMap.from_entries(src, shift, list(self.entries), target=tgt)


@dataclass(frozen=True, eq=False)
class ProblemFile:
    kind: str
    space: GradedSpace
    ops: dict = field(default_factory=dict)          # {n: [(inputs, output, coef)]}
    convention: str = "m"
    hodge: dict | None = None                         # {"s": LinearEntries, "t": LinearEntries}
    perturbation: LinearEntries | None = None
    module_space: GradedSpace | None = None
    module_ops: dict | None = None
    regular: bool = False

    # -- semantic model ----------------------------------------------------

    def differential(self, space: GradedSpace | None = None, ops: dict | None = None) -> GradedMap:
        space = space or self.space
        ops = self.ops if ops is None else ops
        return GradedMap.from_entries(space, 1, [(ins[0], o, c) for ins, o, c in ops.get(1, [])])

    def complex(self) -> ChainComplex:
        return ChainComplex(self.space, self.differential())

    def algebra(self, cap: int) -> ainf.AInfStructure:
        fam = ainf.labelled_family(self.space, self.ops)
        if self.convention == "b":
            return ainf.AInfStructure(self.space, cap, {n: m for n, m in fam.items() if n <= cap})
        return ainf.from_m_family(self.space, fam, cap)

    def module(self, cap: int):
        from .modules import AInfModuleStructure, regular_module

        A = self.algebra(cap)
        if self.regular:
            return regular_module(A)
        VB, MB = A.basis, ainf.Basis(self.module_space)
        ops = {}
        for n, entries in self.module_ops.items():
            if n > cap:
                continue
            m: dict = {}
            for ins, o, c in entries:
                key = tuple(VB.index[l] for l in ins[:-1]) + (MB.index[ins[-1]],)
                if self.convention == "m":
                    e = sum((n - 1 - p) * (VB.degs[i] - 1) for p, i in enumerate(key[:-1]))
                    c = -c if e % 2 else c
                ainf._add_map(m, key, MB.index[o], c)
            ops[n] = m
        return AInfModuleStructure(A, self.module_space, cap, ops)

    def hodge_space(self) -> GradedSpace:
        if self.kind == "module":
            return self.space if self.regular else self.module_space
        return self.space

    def hodge_data(self) -> HodgeData | None:
        if self.hodge is None:
            return None
        sp = self.hodge_space()
        return HodgeData(self.hodge["s"].to_map(sp, -1), self.hodge["t"].to_map(sp, 0))

    def perturbation_map(self) -> GradedMap | None:
        if self.perturbation is None:
            return None
        return self.perturbation.to_map(self.space, 1)

    def semantic(self) -> dict:
        """Canonical comparable form (used for round-trip checks)."""
        return dump_problem(self)


# ---------------------------------------------------------------------------
# loading


def _basis(raw, where: str) -> GradedSpace:
    if raw is None:
        return GradedSpace({})
    if not isinstance(raw, dict):
        raise ProblemError(f"{where}: expected an object mapping degree to labels")
    labels = {}
    seen: dict[str, str] = {}
    for k, labs in raw.items():
        try:
            n = int(k)
        except (TypeError, ValueError):
            raise ProblemError(f"{where}.{k}: degree must be an integer") from None
        if not isinstance(labs, list) or not all(isinstance(l, str) for l in labs):
            raise ProblemError(f"{where}.{k}: expected a list of label strings")
        for l in labs:
            if l in seen:
                raise ProblemError(f"{where}.{k}: duplicate label {l!r} (also in degree {seen[l]})")
            seen[l] = k
        labels[n] = tuple(labs)
    return GradedSpace(labels)


def _degree_of(space: GradedSpace, label: str, where: str) -> int:
    try:
        return space.locate(label)[0]
    except KeyError:
        raise ProblemError(f"{where}: unknown label {label!r}") from None


def _ops(raw, space: GradedSpace, where: str, convention: str,
         module_space: GradedSpace | None = None) -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ProblemError(f"{where}: expected an object mapping arity to entry lists")
    out: dict = {}
    for k, entries in raw.items():
        try:
            n = int(k)
        except (TypeError, ValueError):
            raise ProblemError(f"{where}.{k}: arity must be an integer") from None
        if n < 1:
            raise ProblemError(f"{where}.{k}: arity must be positive")
        if not isinstance(entries, list):
            raise ProblemError(f"{where}.{k}: expected a list of entries")
        lst = []
        for e_i, e in enumerate(entries):
            loc = f"{where}.{k}[{e_i}]"
            if not isinstance(e, dict) or set(e) - {"in", "out", "coef"} or "in" not in e or "out" not in e:
                raise ProblemError(f"{loc}: expected {{\"in\": [...], \"out\": ..., \"coef\": ...}}")
            ins = e["in"]
            if isinstance(ins, str):
                ins = [ins]
            if not isinstance(ins, list) or len(ins) != n:
                raise ProblemError(f"{loc}.in: expected {n} input label(s)")
            target = module_space or space
            degs = []
            for p, l in enumerate(ins):
                sp = module_space if (module_space is not None and p == n - 1) else space
                degs.append(_degree_of(sp, l, f"{loc}.in[{p}]"))
            dout = _degree_of(target, e["out"], f"{loc}.out")
            coef = parse_rational(e.get("coef", "1"), f"{loc}.coef")
            if convention == "m":
                want = sum(degs) + 2 - n
            else:
                # degree +1 on suspended degrees (deg - 1)
                want = sum(d - 1 for d in degs) + 2
            if dout != want:
                raise ProblemError(f"{loc}: degree mismatch, output {e['out']!r} has degree {dout}, "
                                   f"expected {want}")
            lst.append((tuple(ins), e["out"], coef))
        out[n] = lst
    return out


def _linear(raw, space: GradedSpace, shift: int, where: str) -> LinearEntries:
    if not isinstance(raw, list):
        raise ProblemError(f"{where}: expected a list of entries")
    lst = []
    for e_i, e in enumerate(raw):
        loc = f"{where}[{e_i}]"
        if not isinstance(e, dict) or "in" not in e or "out" not in e:
            raise ProblemError(f"{loc}: expected {{\"in\": label, \"out\": label, \"coef\": ...}}")
        ins = e["in"][0] if isinstance(e["in"], list) and len(e["in"]) == 1 else e["in"]
        if not isinstance(ins, str):
            raise ProblemError(f"{loc}.in: expected one label")
        din = _degree_of(space, ins, f"{loc}.in")
        dout = _degree_of(space, e["out"], f"{loc}.out")
        if dout != din + shift:
            raise ProblemError(f"{loc}: degree mismatch, a map of shift {shift} cannot send "
                               f"{ins!r} (degree {din}) to {e['out']!r} (degree {dout})")
        lst.append((ins, e["out"], parse_rational(e.get("coef", "1"), f"{loc}.coef")))
    return LinearEntries(tuple(lst))


def problem_from_dict(raw: Any) -> ProblemFile:
    if not isinstance(raw, dict):
        raise ProblemError("<root>: expected a JSON object")
    known = {"kind", "basis", "ops", "convention", "hodge", "perturbation", "module", "name", "comment"}
    extra = sorted(set(raw) - known)
    if extra:
        raise ProblemError(f"<root>: unknown key {extra[0]!r}")
    kind = raw.get("kind", "complex")
    if kind not in KINDS:
        raise ProblemError(f"kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    convention = raw.get("convention", "m")
    if convention not in ("m", "b"):
        raise ProblemError(f"convention: expected \"m\" or \"b\", got {convention!r}")
    space = _basis(raw.get("basis"), "basis")
    ops = _ops(raw.get("ops"), space, "ops", convention)
    if kind == "complex" and any(n != 1 for n in ops):
        raise ProblemError("ops: a complex only has arity-1 entries (the differential)")
    module_space = module_ops = None
    regular = False
    if kind == "module":
        mod = raw.get("module")
        if mod == "regular":
            regular = True
        elif isinstance(mod, dict):
            module_space = _basis(mod.get("basis"), "module.basis")
            module_ops = _ops(mod.get("ops"), space, "module.ops", convention, module_space)
        else:
            raise ProblemError("module: expected \"regular\" or an object with basis and ops")
    elif "module" in raw:
        raise ProblemError(f"module: only allowed when kind is \"module\"")
    hspace = (space if regular else module_space) if kind == "module" else space
    hodge = None
    if raw.get("hodge") is not None:
        h = raw["hodge"]
        if not isinstance(h, dict) or set(h) != {"s", "t"}:
            raise ProblemError("hodge: expected an object with keys \"s\" and \"t\"")
        hodge = {"s": _linear(h["s"], hspace, -1, "hodge.s"), "t": _linear(h["t"], hspace, 0, "hodge.t")}
    pert = None
    if raw.get("perturbation") is not None:
        p = raw["perturbation"]
        if not isinstance(p, dict) or set(p) != {"x"}:
            raise ProblemError("perturbation: expected an object with key \"x\"")
        pert = _linear(p["x"], space, 1, "perturbation.x")
    prob = ProblemFile(kind, space, ops, convention, hodge, pert, module_space, module_ops, regular)
    _check_differentials(prob)
    return prob


def _check_differentials(prob: ProblemFile) -> None:
    try:
        prob.complex()
    except ValueError as e:
        raise ProblemError(f"ops.1: {e}") from None


def load_problem(path) -> ProblemFile:
    """Parse and validate a problem file; errors carry line/column or a key path."""
    text = Path(path).read_text()
    return loads_problem(text, str(path))


def loads_problem(text: str, name: str = "<string>") -> ProblemFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemError(f"{name}:{e.lineno}:{e.colno}: {e.msg}") from None
    try:
        return problem_from_dict(raw)
    except ProblemError as e:
        raise ProblemError(f"{name}: {e}") from None


# ---------------------------------------------------------------------------
# dumping


def _basis_dict(space: GradedSpace) -> dict:
    return {str(n): list(l) for n, l in space.labels.items()}


def _ops_dict(ops: dict) -> dict:
    return {str(n): [{"in": list(ins), "out": o, "coef": rational_str(c)}
                     for ins, o, c in sorted(entries, key=lambda e: (e[0], e[1]))]
            for n, entries in sorted(ops.items()) if entries}


def _linear_dict(le: LinearEntries) -> list:
    return [{"in": i, "out": o, "coef": rational_str(c)} for i, o, c in sorted(le.entries, key=lambda e: e[:2])
            if c != 0]


def dump_problem(prob: ProblemFile) -> dict:
    out: dict = {"kind": prob.kind, "basis": _basis_dict(prob.space), "ops": _ops_dict(prob.ops),
                 "convention": prob.convention}
    if prob.kind == "module":
        out["module"] = "regular" if prob.regular else {
            "basis": _basis_dict(prob.module_space), "ops": _ops_dict(prob.module_ops)}
    if prob.hodge is not None:
        out["hodge"] = {"s": _linear_dict(prob.hodge["s"]), "t": _linear_dict(prob.hodge["t"])}
    if prob.perturbation is not None:
        out["perturbation"] = {"x": _linear_dict(prob.perturbation)}
    return out


def linear_entries(gm: GradedMap) -> LinearEntries:
    return LinearEntries(tuple((i, o, Fraction(c)) for i, o, c in gm.entries()))


def structure_problem(A: ainf.AInfStructure, convention: str = "m") -> ProblemFile:
    """An A-infinity structure as a problem file (kind "ainf")."""
    fam = ainf.to_m_family(A) if convention == "m" else dict(A.ops)
    lab = A.basis.labels
    ops = {n: [(tuple(lab[i] for i in k), lab[o], c) for k, row in m.items() for o, c in row.items()]
           for n, m in fam.items() if m}
    return ProblemFile("ainf", A.space, ops, convention)


def module_problem(Mm, convention: str = "b") -> ProblemFile:
    """A module structure as a problem file (kind "module", b-convention)."""
    if convention != "b":
        raise ValueError("module structures are emitted in the b-convention")
    algebra = structure_problem(Mm.algebra, "b")
    ops = {n: [(tuple(Mm.input_labels(k)), Mm.module_basis.labels[o], c)
               for k, row in m.items() for o, c in row.items()]
           for n, m in Mm.ops.items() if m}
    return ProblemFile("module", algebra.space, algebra.ops, "b", module_space=Mm.module_space, module_ops=ops)


# ---------------------------------------------------------------------------
# reports


def canonical(obj):
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(canonical(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(report: dict, path=None) -> None:
    text = dumps_report(report)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# symbolic elements


def dump_element(a) -> list:
    """AlgebraElement or TruncatedSeries -> [["p/q", "word"], ...] in canonical order."""
    e = getattr(a, "element", a)
    return [[rational_str(c), w] for c, w in e.terms]


def load_element(terms, cap: int | None = None):
    from .algebra import AlgebraElement, TruncatedSeries

    out = AlgebraElement()
    for i, t in enumerate(terms):
        if not isinstance(t, (list, tuple)) or len(t) != 2 or not isinstance(t[1], str):
            raise ProblemError(f"[{i}]: expected [coefficient, word]")
        if set(t[1]) - set("stx"):
            raise ProblemError(f"[{i}]: word {t[1]!r} has letters outside s, t, x")
        out = out + AlgebraElement.from_word(t[1], parse_rational(t[0], f"[{i}]"))
    return out if cap is None else TruncatedSeries(cap, out)
