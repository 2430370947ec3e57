"""A-infinity modules: admissible trees and transfer of module structures.

A left module over an A-infinity algebra A is a b-family

    b^M_n: (SV)^{(x)(n-1)} (x) SM -> SM,   degree +1,

with the module slot last.  Keys of module maps are index tuples whose last
entry is a module basis index and the rest are algebra basis indices.

Transfer along a Hodge decomposition of M keeps the algebra fixed.  On the
bar module the coextended operators are ``T = 1 (x) t`` and
``S = +-1 (x) s`` (Koszul sign of s passing the algebra inputs).  Writing
``mu = -b^M`` for the module operations, the transferred operations are

    mu^{tM}_i = sum over admissible trees G of mu_G

with every tree entering with coefficient +1.  A tree is a composition
(r_1, ..., r_k) of i - 1: reading along the module strand from the leaf,
the j-th branching is a ``mu_{r_j + 1}`` eating the r_j nearest algebra
inputs; every branching but the root is followed by s, the leaf is
preceded by t and the root is followed by t.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping

from .ainf import (
    AInfStructure,
    Basis,
    DegreeError,
    MultiMap,
    Tensor,
    _add,
    _add_map,
    clean,
    compose_insert,
    first_entry,
    map_columns,
    map_sub,
)
from .catalog import IdentityReport
from .hodge import GradedSpace, HodgeData, image_of_projector


# ---------------------------------------------------------------------------
# admissible trees


@dataclass(frozen=True)
class AdmissibleTree:
    """Branchings along the module strand in order of application, leaf to root.

    ``composition[j]`` is the number of algebra inputs eaten at the j-th
    branching, so that branching has valence ``composition[j] + 2``.
    """
    composition: tuple[int, ...]

    def __post_init__(self):
        comp = tuple(int(r) for r in self.composition)
        if not comp or any(r < 1 for r in comp):
            raise ValueError(f"not a composition of positive parts: {self.composition}")
        object.__setattr__(self, "composition", comp)

    @property
    def arity(self) -> int:
        return sum(self.composition) + 1

    def formula(self) -> str:
        """The composite as a word in m, s, t, read right to left."""
        rest = self.arity - 1
        factors = [_id_factor(rest, "t")]
        comp = self.composition
        for j, r in enumerate(comp[:-1]):
            rest -= r
            factors.append(_id_factor(rest, f"sm_{r + 1}"))
        return f"tm_{comp[-1] + 1}" + "".join(reversed(factors))


def _id_factor(n: int, op: str) -> str:
    if n == 0:
        return f"({op})"
    ids = "id" if n == 1 else f"id^⊗{n}"
    return f"({ids}⊗{op})"


def _compositions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def enumerate_admissible_trees(i: int) -> list[AdmissibleTree]:
    """All admissible trees with i - 1 algebra leaves, lexicographic order."""
    if i < 2:
        raise ValueError(f"admissible trees need arity at least 2, got {i}")
    return [AdmissibleTree(c) for c in sorted(_compositions(i - 1))]


# ---------------------------------------------------------------------------
# module structures


@dataclass(frozen=True, eq=False)
class AInfModuleStructure:
    algebra: AInfStructure
    module_space: GradedSpace
    cap: int
    ops: Mapping[int, MultiMap]
    module_basis: Basis = field(init=False, repr=False)

    def __post_init__(self):
        V = self.algebra.basis
        M = Basis(self.module_space)
        object.__setattr__(self, "module_basis", M)
        ops = {n: clean(self.ops.get(n, {})) for n in range(1, self.cap + 1)}
        for n, m in ops.items():
            for key, row in m.items():
                if len(key) != n:
                    raise DegreeError(f"module op {n} entry with {len(key)} inputs")
                din = sum(V.sdeg(i) for i in key[:-1]) + M.sdeg(key[-1])
                for o in row:
                    if M.sdeg(o) != din + 1:
                        raise DegreeError(f"module op {n} entry {self.input_labels(key)} -> "
                                          f"{M.labels[o]} is not of degree +1")
        object.__setattr__(self, "ops", ops)

    def op(self, n: int) -> MultiMap:
        return self.ops.get(n, {})

    def input_labels(self, key: tuple) -> list[str]:
        return [self.algebra.basis.labels[i] for i in key[:-1]] + [self.module_basis.labels[key[-1]]]

    def labelled(self, n: int) -> dict:
        M = self.module_basis
        return {tuple(self.input_labels(k)): {M.labels[o]: c for o, c in row.items()}
                for k, row in self.op(n).items()}

    def value(self, n: int, *inputs: str) -> dict[str, Fraction]:
        V, M = self.algebra.basis, self.module_basis
        key = tuple(V.index[l] for l in inputs[:-1]) + (M.index[inputs[-1]],)
        return {M.labels[o]: c for o, c in self.op(n).get(key, {}).items()}

    def differential(self):
        from .ainf import columns_to_map
        cols = [dict() for _ in range(len(self.module_basis))]
        for (i,), row in self.op(1).items():
            cols[i] = dict(row)
        return columns_to_map(cols, self.module_basis, self.module_basis, 1)


def regular_module(A: AInfStructure) -> AInfModuleStructure:
    """A as a left module over itself."""
    return AInfModuleStructure(A, A.space, A.cap, {n: dict(m) for n, m in A.ops.items()})


def _first_module_entry(m: MultiMap, mod: AInfModuleStructure, target: Basis) -> dict | None:
    for key in sorted(m):
        for o in sorted(m[key]):
            c = m[key][o]
            if c != 0:
                return {"inputs": mod.input_labels(key), "output": target.labels[o], "coeff": str(c)}
    return None


def _insert_all(total: MultiMap, outer: MultiMap, inner: MultiMap, pos: int, deg: int, sdeg, sign=1):
    for key, row in compose_insert(outer, inner, pos, deg, sdeg).items():
        for o, c in row.items():
            _add_map(total, key, o, sign * c)


def module_codifferential_check(Mm: AInfModuleStructure, upto: int | None = None) -> list[IdentityReport]:
    """Square-zero condition of the bar module, projected to SM, per arity."""
    upto = Mm.cap if upto is None else upto
    A = Mm.algebra
    sdeg = A.basis.sdeg
    reports = []
    for n in range(1, upto + 1):
        total: MultiMap = {}
        for k in range(1, n):
            for p in range(n - k):
                _insert_all(total, Mm.op(n - k + 1), A.op(k), p, 1, sdeg)
        for j in range(1, n + 1):
            _insert_all(total, Mm.op(j), Mm.op(n - j + 1), j - 1, 1, sdeg)
        w = _first_module_entry(total, Mm, Mm.module_basis)
        reports.append(IdentityReport(f"module codifferential arity {n}", "pass" if w is None else "fail", n, w))
    return reports


@dataclass(frozen=True, eq=False)
class ModuleMorphism:
    source: AInfModuleStructure
    target: AInfModuleStructure
    comps: Mapping[int, MultiMap]

    def comp(self, n: int) -> MultiMap:
        return self.comps.get(n, {})

    @property
    def cap(self) -> int:
        return min(self.source.cap, self.target.cap)


def module_morphism_check(f: ModuleMorphism, upto: int | None = None) -> list[IdentityReport]:
    """sum b^N(1 (x) f) = sum f(1 (x) b (x) 1) + sum f(1 (x) b^M), per arity."""
    upto = f.cap if upto is None else upto
    M, N = f.source, f.target
    A = M.algebra
    sdeg = A.basis.sdeg
    reports = []
    for n in range(1, upto + 1):
        total: MultiMap = {}
        for j in range(1, n + 1):
            _insert_all(total, N.op(j), f.comp(n - j + 1), j - 1, 0, sdeg)
        for k in range(1, n):
            for p in range(n - k):
                _insert_all(total, f.comp(n - k + 1), A.op(k), p, 1, sdeg, -1)
        for j in range(1, n + 1):
            _insert_all(total, f.comp(j), M.op(n - j + 1), j - 1, 1, sdeg, -1)
        w = _first_module_entry(total, M, N.module_basis)
        reports.append(IdentityReport(f"module morphism arity {n}", "pass" if w is None else "fail", n, w))
    return reports


# ---------------------------------------------------------------------------
# bar module operators


class ModuleBar:
    def __init__(self, Mm: AInfModuleStructure, hd: HodgeData):
        self.Mm = Mm
        A = Mm.algebra
        self.sd = [A.basis.sdeg(i) % 2 for i in range(len(A.basis))]
        MB = Mm.module_basis
        self.s_cols = map_columns(hd.s, MB, MB)
        self.t_cols = map_columns(hd.t, MB, MB)
        self._cache: dict = {}

    def _parity(self, key: tuple, upto: int) -> int:
        return sum(self.sd[i] for i in key[:upto]) % 2

    def T_key(self, key: tuple) -> Tensor:
        return {key[:-1] + (j,): v for j, v in self.t_cols[key[-1]].items()}

    def S_key(self, key: tuple) -> Tensor:
        sign = -1 if self._parity(key, len(key) - 1) else 1
        return {key[:-1] + (j,): sign * v for j, v in self.s_cols[key[-1]].items()}

    def m_key(self, key: tuple, linear: bool = False) -> Tensor:
        ck = (key, linear)
        hit = self._cache.get(ck)
        if hit is None:
            hit = {}
            A = self.Mm.algebra
            q = len(key) - 1
            ks = (1,) if linear else range(2, q + 1)
            for k in ks:
                bk = A.op(k)
                for p in range(q - k + 1):
                    row = bk.get(key[p:p + k])
                    if row:
                        sign = -1 if self._parity(key, p) else 1
                        for o, c in row.items():
                            _add(hit, key[:p] + (o,) + key[p + k:], sign * c)
            js = (1,) if linear else range(2, q + 2)
            for j in js:
                row = self.Mm.op(j).get(key[q + 1 - j:])
                if row:
                    sign = -1 if self._parity(key, q + 1 - j) else 1
                    for o, c in row.items():
                        _add(hit, key[:q + 1 - j] + (o,), sign * c)
            self._cache[ck] = hit
        return hit

    @staticmethod
    def apply(fn, x: Tensor) -> Tensor:
        out: Tensor = {}
        for k, c in x.items():
            for k2, v in fn(k).items():
                _add(out, k2, c * v)
        return out

    def S(self, x):
        return self.apply(self.S_key, x)

    def T(self, x):
        return self.apply(self.T_key, x)

    def m(self, x):
        return self.apply(self.m_key, x)

    def alpha(self, x: Tensor) -> Tensor:
        acc, y = dict(x), x
        while y:
            y = {k: -c for k, c in self.S(self.m(y)).items()}
            for k, c in y.items():
                _add(acc, k, c)
        return acc

    def to_module(self, x: Tensor) -> dict[int, Fraction]:
        """Arity-zero part of m(x): a module op eating every algebra input."""
        out: dict = {}
        for key, c in x.items():
            row = self.Mm.op(len(key)).get(key) if len(key) > 1 else None
            if row:
                for o, v in row.items():
                    _add(out, o, c * v)
        return out

    def t(self, v: dict[int, Fraction]) -> dict[int, Fraction]:
        out: dict = {}
        for i, c in v.items():
            for j, w in self.t_cols[i].items():
                _add(out, j, c * w)
        return out


def _module_inputs(Mm: AInfModuleStructure, n: int, mod_indices):
    return (alg + (m,) for alg in product(range(len(Mm.algebra.basis)), repeat=n - 1) for m in mod_indices)


# ---------------------------------------------------------------------------
# tree summation


def tree_map(tree: AdmissibleTree, Mm: AInfModuleStructure, hd: HodgeData) -> MultiMap:
    """mu_G on (SV)^{(x)(i-1)} (x) SM -> SM, with mu = -b^M and no further signs."""
    bar = ModuleBar(Mm, hd)
    i = tree.arity
    comp = tree.composition
    out: MultiMap = {}
    mu = {r + 1: Mm.op(r + 1) for r in comp}
    for key in _module_inputs(Mm, i, range(len(Mm.module_basis))):
        state: Tensor = bar.T_key(key)
        for j, r in enumerate(comp):
            nxt: Tensor = {}
            for k, c in state.items():
                cut = len(k) - 1 - r
                row = mu[r + 1].get(k[cut:])
                if not row:
                    continue
                for o, v in row.items():
                    cols = bar.s_cols[o] if j < len(comp) - 1 else bar.t_cols[o]
                    for o2, w in cols.items():
                        _add(nxt, k[:cut] + (o2,), -c * v * w)
            state = nxt
            if not state:
                break
        for (o,), c in state.items():
            _add_map(out, key, o, c)
    return out


def tree_sum(Mm: AInfModuleStructure, hd: HodgeData, i: int) -> MultiMap:
    total: MultiMap = {}
    for tree in enumerate_admissible_trees(i):
        for key, row in tree_map(tree, Mm, hd).items():
            for o, c in row.items():
                _add_map(total, key, o, c)
    return total


# ---------------------------------------------------------------------------
# transfer


@dataclass(frozen=True, eq=False)
class ModuleTransfer:
    minimal: AInfModuleStructure
    split: AInfModuleStructure
    split_iso: ModuleMorphism
    reports: list[IdentityReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def _series_op(bar: ModuleBar, key: tuple) -> dict[int, Fraction]:
    return bar.t(bar.to_module(bar.alpha(bar.T_key(key))))


def transfer_module(Mm: AInfModuleStructure, hd: HodgeData, cap: int | None = None) -> ModuleTransfer:
    """Minimal module on tM by series and by trees, the split module, and the
    isomorphism pr_M (1 + m S)(1 - T + (1 + S m)^{-1} T) from split to M."""
    cap = Mm.cap if cap is None else min(cap, Mm.cap)
    bar = ModuleBar(Mm, hd)
    MB = Mm.module_basis
    tspace, incl_gm, coords_gm = image_of_projector(hd.t)
    TB = Basis(tspace)
    inc = map_columns(incl_gm, TB, MB)
    crd = map_columns(coords_gm, MB, TB)

    def to_t(v):
        out: dict = {}
        for i, c in v.items():
            for a, w in crd[i].items():
                _add(out, a, c * w)
        return out

    reports: list[IdentityReport] = []
    min_ops: dict[int, MultiMap] = {}
    d1: MultiMap = {}
    for a in range(len(TB)):
        img: dict = {}
        for i, c in inc[a].items():
            for o, v in Mm.op(1).get((i,), {}).items():
                _add(img, o, c * v)
        if (img := to_t(img)):
            d1[(a,)] = img
    min_ops[1] = d1

    split_ops: dict[int, MultiMap] = {1: dict(Mm.op(1))}
    for n in range(2, cap + 1):
        series_full: MultiMap = {}
        for key in _module_inputs(Mm, n, range(len(MB))):
            out = _series_op(bar, key)
            if out:
                series_full[key] = out
        split_ops[n] = series_full
        trees = {k: {o: -c for o, c in row.items()} for k, row in tree_sum(Mm, hd, n).items()}
        w = _first_module_entry(map_sub(series_full, trees), Mm, MB)
        reports.append(IdentityReport(f"tree sum = series, arity {n}", "pass" if w is None else "fail", n, w))
        bn: MultiMap = {}
        for a in range(len(TB)):
            for alg in product(range(len(Mm.algebra.basis)), repeat=n - 1):
                acc: dict = {}
                for i, c in inc[a].items():
                    for o, v in series_full.get(alg + (i,), {}).items():
                        _add(acc, o, c * v)
                if (acc := to_t(acc)):
                    bn[alg + (a,)] = acc
        min_ops[n] = bn
    minimal = AInfModuleStructure(Mm.algebra, tspace, cap, min_ops)
    split = AInfModuleStructure(Mm.algebra, Mm.module_space, cap, split_ops)

    comps: dict[int, MultiMap] = {}
    for n in range(1, cap + 1):
        fn: MultiMap = {}
        for key in _module_inputs(Mm, n, range(len(MB))):
            x = {key: Fraction(1)}
            tx = bar.T_key(key)
            y = dict(x)
            for k, c in tx.items():
                _add(y, k, -c)
            for k, c in bar.alpha(tx).items():
                _add(y, k, c)
            out = {k[0]: c for k, c in y.items() if len(k) == 1}
            for o, c in bar.to_module(bar.S(y)).items():
                _add(out, o, c)
            if out:
                fn[key] = out
        comps[n] = fn
    iso = ModuleMorphism(split, Mm, comps)
    reports.extend(module_codifferential_check(minimal))
    reports.extend(module_codifferential_check(split))
    reports.extend(IdentityReport(f"split_iso {r.identity_id}", r.status, r.cap, r.witness)
                   for r in module_morphism_check(iso))
    return ModuleTransfer(minimal, split, iso, reports)
