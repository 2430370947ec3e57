"""Arity-truncated A-infinity structures, homotopy transfer and decomposition.

Conventions
-----------
Everything is done on the predual side: the reduced tensor coalgebra
``T(SV) = sum_n (SV)^{(x)n}`` of the suspension, with an A-infinity structure
given by its b-family ``b_n: (SV)^{(x)n} -> SV`` of degree +1.  Basis vectors
of SV are indexed like those of V; the suspended degree of a basis vector
is its V-degree minus one.  Multilinear maps are stored sparsely as

    {input index tuple: {output index: coefficient}}

Koszul rule: ``(f (x) g)(a (x) b) = (-1)^{|g||a|} f(a) (x) g(b)``.

The m-family is related by ``b_n = sigma m_n (sigma^{-1})^{(x)n}``, i.e.
``b_n(v_1..v_n) = (-1)^{sum_p (n-p)|sv_p|} m_n(v_1..v_n)`` on basis vectors,
and the Stasheff identities take the form
``sum (-1)^{i + jk} m_{i+1+j}(1^i (x) m_k (x) 1^j) = 0``.

A Hodge decomposition (s, t) on V is coextended to each tensor power as
``T_n = t^{(x)n}`` and ``S_n = sum t^{(x)i} (x) s (x) 1^{(x)j}``.  The
coextension of ``b_{>=2}`` lowers arity, so ``(1 + S m)^{-1}`` is a finite
geometric series on every arity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import exact
from .catalog import IdentityReport
from .hodge import GradedMap, GradedSpace, HodgeData, image_of_projector

MultiMap = dict  # {tuple[int, ...]: {int: Fraction}}
Tensor = dict    # {tuple[int, ...]: Fraction}


class DegreeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# bases and sparse helpers


@dataclass(frozen=True, eq=False)
class Basis:
    space: GradedSpace
    labels: tuple[str, ...] = field(init=False)
    degs: tuple[int, ...] = field(init=False)
    offset: dict = field(init=False)
    index: dict = field(init=False)

    def __post_init__(self):
        labels, degs, offset = [], [], {}
        for n, labs in self.space.labels.items():
            offset[n] = len(labels)
            labels.extend(labs)
            degs.extend([n] * len(labs))
        object.__setattr__(self, "labels", tuple(labels))
        object.__setattr__(self, "degs", tuple(degs))
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "index", {l: i for i, l in enumerate(labels)})

    def __len__(self):
        return len(self.labels)

    def sdeg(self, i: int) -> int:
        return self.degs[i] - 1


def map_columns(gm: GradedMap, src: Basis, tgt: Basis) -> list[dict[int, Fraction]]:
    """Sparse columns of a graded map, in global indices."""
    cols: list[dict[int, Fraction]] = [dict() for _ in range(len(src))]
    for n, b in gm.blocks.items():
        so = src.offset[n]
        to = tgt.offset.get(n + gm.shift)
        for (i, j), v in np.ndenumerate(b):
            if v != 0:
                cols[so + j][to + i] = v
    return cols


def columns_to_map(cols: list[dict[int, Fraction]], src: Basis, tgt: Basis, shift: int) -> GradedMap:
    blocks = {n: exact.zeros(tgt.space.dim(n + shift), src.space.dim(n)) for n in src.space.degrees}
    for j, col in enumerate(cols):
        n = src.degs[j]
        for i, v in col.items():
            blocks[n][i - tgt.offset[n + shift], j - src.offset[n]] = Fraction(v)
    return GradedMap(src.space, tgt.space, shift, blocks)


def _add(acc: dict, key, val) -> None:
    s = acc.get(key, 0) + val
    if s == 0:
        acc.pop(key, None)
    else:
        acc[key] = s


def _add_map(acc: MultiMap, key: tuple, out: int, val) -> None:
    row = acc.setdefault(key, {})
    _add(row, out, val)
    if not row:
        del acc[key]


def clean(m: MultiMap) -> MultiMap:
    return {k: {o: c for o, c in row.items() if c != 0} for k, row in m.items()
            if any(c != 0 for c in row.values())}


def map_sub(a: MultiMap, b: MultiMap) -> MultiMap:
    out = {k: dict(v) for k, v in a.items()}
    for k, row in b.items():
        for o, c in row.items():
            _add_map(out, k, o, -c)
    return out


def map_from_columns(cols: list[dict[int, Fraction]]) -> MultiMap:
    return {(j,): dict(col) for j, col in enumerate(cols) if col}


def identity_map(n: int) -> MultiMap:
    return {(i,): {i: Fraction(1)} for i in range(n)}


def by_output(m: MultiMap) -> dict[int, list[tuple[tuple, Fraction]]]:
    idx: dict[int, list] = {}
    for k, row in m.items():
        for o, c in row.items():
            idx.setdefault(o, []).append((k, c))
    return idx


def compose_insert(outer: MultiMap, inner: MultiMap, pos: int, inner_degree: int,
                   degree_of) -> MultiMap:
    """outer o (1^pos (x) inner (x) 1^rest), with the Koszul sign of inner
    passing the first ``pos`` inputs."""
    out: MultiMap = {}
    inner_idx = by_output(inner)
    for key, row in outer.items():
        if pos >= len(key):
            continue
        hits = inner_idx.get(key[pos])
        if not hits:
            continue
        pre, post = key[:pos], key[pos + 1:]
        sign = -1 if inner_degree % 2 and sum(degree_of(i) for i in pre) % 2 else 1
        for ikey, ic in hits:
            nk = pre + ikey + post
            for o, c in row.items():
                _add_map(out, nk, o, sign * c * ic)
    return out


def compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Ordered k-tuples of positive integers summing to n."""
    if k == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def compose_tuple(outer: MultiMap, inners: list[MultiMap]) -> MultiMap:
    """outer o (f_1 (x) ... (x) f_k) for degree-0 maps f_i (no signs)."""
    out: MultiMap = {}
    idxs = [by_output(f) for f in inners]
    for key, row in outer.items():
        if len(key) != len(inners):
            continue
        choices = []
        for p, o in enumerate(key):
            hits = idxs[p].get(o)
            if not hits:
                break
            choices.append(hits)
        else:
            for combo in product(*choices):
                nk = tuple(i for k, _ in combo for i in k)
                coef = 1
                for _, c in combo:
                    coef *= c
                for o, c in row.items():
                    _add_map(out, nk, o, c * coef)
    return out


def first_entry(m: MultiMap, src: Basis, tgt: Basis | None = None) -> dict | None:
    tgt = tgt or src
    for key in sorted(m):
        for o in sorted(m[key]):
            c = m[key][o]
            if c != 0:
                return {"inputs": [src.labels[i] for i in key], "output": tgt.labels[o], "coeff": str(c)}
    return None


# ---------------------------------------------------------------------------
# structures


@dataclass(frozen=True, eq=False)
class AInfStructure:
    """b-family on the suspension of ``space``; ``ops[1]`` is the differential."""
    space: GradedSpace
    cap: int
    ops: Mapping[int, MultiMap]

    def __post_init__(self):
        basis = Basis(self.space)
        object.__setattr__(self, "basis", basis)
        ops = {n: clean(self.ops.get(n, {})) for n in range(1, self.cap + 1)}
        for n, m in ops.items():
            for key, row in m.items():
                if len(key) != n:
                    raise DegreeError(f"b_{n} entry with {len(key)} inputs")
                din = sum(basis.sdeg(i) for i in key)
                for o in row:
                    if basis.sdeg(o) != din + 1:
                        raise DegreeError(
                            f"b_{n}({', '.join(basis.labels[i] for i in key)}) -> {basis.labels[o]} "
                            "is not of degree +1")
        object.__setattr__(self, "ops", ops)

    basis: Basis = field(init=False, repr=False)

    def op(self, n: int) -> MultiMap:
        return self.ops.get(n, {})

    def truncate(self, cap: int) -> "AInfStructure":
        return AInfStructure(self.space, cap, {n: m for n, m in self.ops.items() if n <= cap})

    def differential(self) -> GradedMap:
        cols = [dict() for _ in range(len(self.basis))]
        for (i,), row in self.op(1).items():
            cols[i] = dict(row)
        return columns_to_map(cols, self.basis, self.basis, 1)

    def labelled(self, n: int) -> dict[tuple[str, ...], dict[str, Fraction]]:
        lab = self.basis.labels
        return {tuple(lab[i] for i in k): {lab[o]: c for o, c in row.items()}
                for k, row in self.op(n).items()}

    def value(self, n: int, *inputs: str) -> dict[str, Fraction]:
        key = tuple(self.basis.index[l] for l in inputs)
        return {self.basis.labels[o]: c for o, c in self.op(n).get(key, {}).items()}

    def same_ops(self, other: "AInfStructure", upto: int | None = None) -> bool:
        upto = min(self.cap, other.cap) if upto is None else upto
        return all(clean(self.op(n)) == clean(other.op(n)) for n in range(1, upto + 1))


@dataclass(frozen=True, eq=False)
class AInfMorphismData:
    source: AInfStructure
    target: AInfStructure
    comps: Mapping[int, MultiMap]

    @property
    def cap(self) -> int:
        return min(self.source.cap, self.target.cap)

    def comp(self, n: int) -> MultiMap:
        return self.comps.get(n, {})


def identity_morphism(A: AInfStructure) -> AInfMorphismData:
    return AInfMorphismData(A, A, {1: identity_map(len(A.basis))})


# ---------------------------------------------------------------------------
# conventions


def _suspension_sign(basis: Basis, key: tuple[int, ...]) -> int:
    n = len(key)
    e = sum((n - 1 - p) * basis.sdeg(i) for p, i in enumerate(key))
    return -1 if e % 2 else 1


def from_m_family(space: GradedSpace, m_ops: Mapping[int, MultiMap], cap: int) -> AInfStructure:
    """b-family from an m-family (m_n of degree 2 - n on V)."""
    basis = Basis(space)
    b_ops = {}
    for n, m in m_ops.items():
        if n > cap:
            continue
        out: MultiMap = {}
        for key, row in m.items():
            din = sum(basis.degs[i] for i in key)
            sign = _suspension_sign(basis, key)
            for o, c in row.items():
                if c == 0:
                    continue
                if basis.degs[o] != din + 2 - n:
                    raise DegreeError(f"m_{n} entry {[basis.labels[i] for i in key]} -> "
                                      f"{basis.labels[o]} does not have degree {2 - n}")
                _add_map(out, key, o, sign * Fraction(c))
        b_ops[n] = out
    return AInfStructure(space, cap, b_ops)


def to_m_family(A: AInfStructure) -> dict[int, MultiMap]:
    out = {}
    for n, b in A.ops.items():
        out[n] = {k: {o: _suspension_sign(A.basis, k) * c for o, c in row.items()} for k, row in b.items()}
    return out


def convert_conventions(family, space: GradedSpace | None = None, cap: int | None = None):
    """m-family -> AInfStructure, or AInfStructure -> m-family."""
    if isinstance(family, AInfStructure):
        return to_m_family(family)
    if space is None:
        raise ValueError("space required to convert an m-family")
    return from_m_family(space, family, cap if cap is not None else max(family, default=1))


def labelled_family(space: GradedSpace, ops: Mapping[int, Iterable]) -> dict[int, MultiMap]:
    """{n: [((input labels...), output label, coeff), ...]} -> index form."""
    basis = Basis(space)
    out: dict[int, MultiMap] = {}
    for n, entries in ops.items():
        m: MultiMap = {}
        for ins, o, c in entries:
            if len(ins) != n:
                raise DegreeError(f"arity-{n} entry with inputs {ins}")
            _add_map(m, tuple(basis.index[l] for l in ins), basis.index[o], Fraction(c))
        out[int(n)] = m
    return out


# ---------------------------------------------------------------------------
# identity checks


def codifferential_defect(A: AInfStructure, n: int) -> MultiMap:
    total: MultiMap = {}
    for k in range(1, n + 1):
        outer = A.op(n - k + 1)
        inner = A.op(k)
        if not outer or not inner:
            continue
        for i in range(n - k + 1):
            for key, row in compose_insert(outer, inner, i, 1, A.basis.sdeg).items():
                for o, c in row.items():
                    _add_map(total, key, o, c)
    return total


def codifferential_check(A: AInfStructure, upto: int | None = None) -> list[IdentityReport]:
    """sum b_{i+1+j}(1^i (x) b_k (x) 1^j) = 0, one report per arity."""
    upto = A.cap if upto is None else upto
    reports = []
    for n in range(1, upto + 1):
        w = first_entry(codifferential_defect(A, n), A.basis)
        reports.append(IdentityReport(f"codifferential arity {n}", "pass" if w is None else "fail", n, w))
    return reports


def stasheff_check(space: GradedSpace, m_ops: Mapping[int, MultiMap], upto: int) -> list[IdentityReport]:
    """Stasheff identities directly in the m-convention."""
    basis = Basis(space)
    reports = []
    for n in range(1, upto + 1):
        total: MultiMap = {}
        for k in range(1, n + 1):
            outer, inner = m_ops.get(n - k + 1, {}), m_ops.get(k, {})
            if not outer or not inner:
                continue
            for i in range(n - k + 1):
                j = n - k - i
                sign = -1 if (i + j * k) % 2 else 1
                for key, row in compose_insert(outer, inner, i, 2 - k, lambda q: basis.degs[q]).items():
                    for o, c in row.items():
                        _add_map(total, key, o, sign * c)
        w = first_entry(total, basis)
        reports.append(IdentityReport(f"Stasheff arity {n}", "pass" if w is None else "fail", n, w))
    return reports


def _morphism_sides(f: AInfMorphismData, n: int) -> tuple[MultiMap, MultiMap]:
    V, W = f.source, f.target
    lhs: MultiMap = {}
    for k in range(1, n + 1):
        bk = W.op(k)
        if not bk:
            continue
        for parts in compositions(n, k):
            inners = [f.comp(i) for i in parts]
            if any(not g for g in inners):
                continue
            for key, row in compose_tuple(bk, inners).items():
                for o, c in row.items():
                    _add_map(lhs, key, o, c)
    rhs: MultiMap = {}
    for k in range(1, n + 1):
        bk = V.op(k)
        outer = f.comp(n - k + 1)
        if not bk or not outer:
            continue
        for i in range(n - k + 1):
            for key, row in compose_insert(outer, bk, i, 1, V.basis.sdeg).items():
                for o, c in row.items():
                    _add_map(rhs, key, o, c)
    return lhs, rhs


def morphism_check(f: AInfMorphismData, upto: int | None = None) -> list[IdentityReport]:
    """sum b^W(f (x) ... (x) f) = sum f(1 (x) b^V (x) 1), one report per arity."""
    upto = f.cap if upto is None else upto
    reports = []
    for n in range(1, upto + 1):
        lhs, rhs = _morphism_sides(f, n)
        w = first_entry(map_sub(lhs, rhs), f.source.basis, f.target.basis)
        reports.append(IdentityReport(f"morphism arity {n}", "pass" if w is None else "fail", n, w))
    return reports


def compose_morphisms(g: AInfMorphismData, f: AInfMorphismData) -> AInfMorphismData:
    """g o f as coalgebra maps."""
    cap = min(f.cap, g.cap)
    comps = {}
    for n in range(1, cap + 1):
        total: MultiMap = {}
        for k in range(1, n + 1):
            gk = g.comp(k)
            if not gk:
                continue
            for parts in compositions(n, k):
                inners = [f.comp(i) for i in parts]
                if any(not h for h in inners):
                    continue
                for key, row in compose_tuple(gk, inners).items():
                    for o, c in row.items():
                        _add_map(total, key, o, c)
        comps[n] = total
    return AInfMorphismData(f.source, g.target, comps)


def invert_morphism(f: AInfMorphismData) -> AInfMorphismData:
    """Arity-recursive inverse of a coalgebra automorphism with invertible f_1."""
    B = f.source.basis
    n_basis = len(B)
    f1 = exact.zeros(n_basis, n_basis)
    for (j,), row in f.comp(1).items():
        for i, c in row.items():
            f1[i, j] = Fraction(c)
    f1_inv = exact.inverse(f1)
    h1 = {(j,): {i: f1_inv[i, j] for i in range(n_basis) if f1_inv[i, j] != 0}
          for j in range(n_basis)}
    h1 = {k: v for k, v in h1.items() if v}
    comps = {1: h1}
    h = AInfMorphismData(f.target, f.source, comps)
    for n in range(2, f.cap + 1):
        total: MultiMap = {}
        for k in range(2, n + 1):
            fk = f.comp(k)
            if not fk:
                continue
            for parts in compositions(n, k):
                inners = [comps.get(i, {}) for i in parts]
                if any(not g for g in inners):
                    continue
                for key, row in compose_tuple(fk, inners).items():
                    for o, c in row.items():
                        _add_map(total, key, o, c)
        comps[n] = {key: v for key, v in compose_tuple(h1, [total]).items()} if total else {}
        comps[n] = {key: {o: -c for o, c in row.items()} for key, row in comps[n].items()}
    return AInfMorphismData(f.target, f.source, comps)


def is_identity_morphism(f: AInfMorphismData) -> bool:
    n = len(f.source.basis)
    if clean(f.comp(1)) != identity_map(n):
        return False
    return all(not clean(f.comp(k)) for k in range(2, f.cap + 1))


# ---------------------------------------------------------------------------
# bar construction operators


class Bar:
    """Operators T, S, D1 and the perturbation m on the tensor coalgebra."""

    def __init__(self, A: AInfStructure, hd: HodgeData):
        self.A = A
        B = A.basis
        self.basis = B
        self.sd = [B.sdeg(i) % 2 for i in range(len(B))]
        self.s_cols = map_columns(hd.s, B, B)
        self.t_cols = map_columns(hd.t, B, B)
        self._t_cache: dict = {}
        self._s_cache: dict = {}
        self._m_cache: dict = {}
        self._alpha_cache: dict = {}
        self._beta_cache: dict = {}

    def _prefix_parity(self, key: tuple, p: int) -> int:
        return sum(self.sd[i] for i in key[:p]) % 2

    def T_key(self, key: tuple) -> Tensor:
        hit = self._t_cache.get(key)
        if hit is None:
            hit = {(): Fraction(1)}
            for i in key:
                nxt: Tensor = {}
                col = self.t_cols[i]
                for k, c in hit.items():
                    for j, v in col.items():
                        _add(nxt, k + (j,), c * v)
                hit = nxt
            self._t_cache[key] = hit
        return hit

    def S_key(self, key: tuple) -> Tensor:
        hit = self._s_cache.get(key)
        if hit is None:
            hit = {}
            for p, i in enumerate(key):
                col = self.s_cols[i]
                if not col:
                    continue
                sign = -1 if self._prefix_parity(key, p) else 1
                head = self.T_key(key[:p])
                tail = key[p + 1:]
                for hk, hc in head.items():
                    for j, v in col.items():
                        _add(hit, hk + (j,) + tail, sign * hc * v)
            self._s_cache[key] = hit
        return hit

    def m_key(self, key: tuple, arities=None) -> Tensor:
        """Coextension of b_k for k in ``arities`` (default k >= 2)."""
        ck = (key, arities)
        hit = self._m_cache.get(ck)
        if hit is None:
            hit = {}
            n = len(key)
            ks = arities if arities is not None else range(2, n + 1)
            for k in ks:
                bk = self.A.op(k)
                if not bk or k > n:
                    continue
                for p in range(n - k + 1):
                    row = bk.get(key[p:p + k])
                    if not row:
                        continue
                    sign = -1 if self._prefix_parity(key, p) else 1
                    pre, post = key[:p], key[p + k:]
                    for o, c in row.items():
                        _add(hit, pre + (o,) + post, sign * c)
            self._m_cache[ck] = hit
        return hit

    @staticmethod
    def apply(fn, tensor: Tensor) -> Tensor:
        out: Tensor = {}
        for k, c in tensor.items():
            for k2, v in fn(k).items():
                _add(out, k2, c * v)
        return out

    def T(self, x: Tensor) -> Tensor:
        return self.apply(self.T_key, x)

    def S(self, x: Tensor) -> Tensor:
        return self.apply(self.S_key, x)

    def m(self, x: Tensor) -> Tensor:
        return self.apply(self.m_key, x)

    def D1(self, x: Tensor) -> Tensor:
        return self.apply(lambda k: self.m_key(k, (1,)), x)

    def alpha_key(self, key: tuple) -> Tensor:
        """(1 + S m)^{-1} on a basis tensor, via alpha = 1 - alpha S m."""
        hit = self._alpha_cache.get(key)
        if hit is None:
            hit = {key: Fraction(1)}
            for k, c in self.S(self.m_key(key)).items():
                for k2, v in self.alpha_key(k).items():
                    _add(hit, k2, -c * v)
            self._alpha_cache[key] = hit
        return hit

    def beta_key(self, key: tuple) -> Tensor:
        """(1 + m S)^{-1} on a basis tensor, via beta = 1 - beta m S."""
        hit = self._beta_cache.get(key)
        if hit is None:
            hit = {key: Fraction(1)}
            for k, c in self.m(self.S_key(key)).items():
                for k2, v in self.beta_key(k).items():
                    _add(hit, k2, -c * v)
            self._beta_cache[key] = hit
        return hit

    def alpha(self, x: Tensor) -> Tensor:
        return self.apply(self.alpha_key, x)

    def beta(self, x: Tensor) -> Tensor:
        return self.apply(self.beta_key, x)

    def alpha_series(self, x: Tensor) -> Tensor:
        """The same operator summed as the geometric series sum (-S m)^k."""
        acc = dict(x)
        y = x
        while y:
            y = {k: -c for k, c in self.S(self.m(y)).items()}
            for k, c in y.items():
                _add(acc, k, c)
        return acc

    def to_arity_one(self, x: Tensor) -> Tensor:
        """pr_1 o m: the part of m(x) landing in arity one."""
        out: Tensor = {}
        for k, c in x.items():
            if len(k) < 2:
                continue
            row = self.A.op(len(k)).get(k)
            if row:
                for o, v in row.items():
                    _add(out, (o,), c * v)
        return out


def _arity_one(x: Tensor) -> dict[int, Fraction]:
    return {k[0]: c for k, c in x.items() if len(k) == 1}


def _basis_tuples(n_basis: int, n: int) -> Iterator[tuple[int, ...]]:
    return product(range(n_basis), repeat=n)


# ---------------------------------------------------------------------------
# coextended Hodge data


def coextend_hodge(hd: HodgeData, n: int, A: AInfStructure | None = None) -> tuple[MultiMap, MultiMap]:
    """(T_n, S_n) on (SV)^{(x)n} as sparse maps {input tuple: {output tuple: c}}."""
    if n < 1:
        raise ValueError("arity must be positive")
    V = hd.s.source
    A = A or AInfStructure(V, 1, {})
    bar = Bar(A, hd)
    T, S = {}, {}
    for key in _basis_tuples(len(bar.basis), n):
        if (t := bar.T_key(key)):
            T[key] = dict(t)
        if (s := bar.S_key(key)):
            S[key] = dict(s)
    return T, S


def coextended_hodge_check(A: AInfStructure, hd: HodgeData, n: int) -> list[IdentityReport]:
    """The five HD axioms for (T_n, S_n) against the coextended b_1."""
    bar = Bar(A, hd)
    D = lambda x: bar.D1(x)
    return _hd_axioms(bar, range(n, n + 1), bar.S, bar.T, D, f"arity {n}")


def _hd_axioms(bar: Bar, arities, S, T, D, tag: str) -> list[IdentityReport]:
    names = ("s^2=0", "sd+ds=1-t", "dt=td", "t^2=t", "st=ts=0")
    witnesses: list[dict | None] = [None] * 5
    for n in arities:
        for key in _basis_tuples(len(bar.basis), n):
            x = {key: Fraction(1)}
            tx, sx, dx = T(x), S(x), D(x)
            checks = [
                [S(sx)],
                [_lin(S(dx), D(sx), x, tx, signs=(1, 1, -1, 1))],
                [_lin(D(tx), T(dx), signs=(1, -1))],
                [_lin(T(tx), tx, signs=(1, -1))],
                [S(tx), T(sx)],
            ]
            for a, diffs in enumerate(checks):
                if witnesses[a] is None:
                    for dlt in diffs:
                        if dlt:
                            k = min(dlt)
                            witnesses[a] = {"input": [bar.basis.labels[i] for i in key],
                                            "output": [bar.basis.labels[i] for i in k],
                                            "coeff": str(dlt[k])}
                            break
    return [IdentityReport(f"HD{a + 1} {names[a]} ({tag})", "pass" if w is None else "fail", None, w)
            for a, w in enumerate(witnesses)]


def _lin(*tensors: Tensor, signs) -> Tensor:
    out: Tensor = {}
    for t, s in zip(tensors, signs):
        for k, c in t.items():
            _add(out, k, s * c)
    return out


# ---------------------------------------------------------------------------
# transfer


@dataclass(frozen=True, eq=False)
class MinimalModel:
    """Transferred structure on tV with the inclusion/projection pair."""
    structure: AInfStructure
    incl: AInfMorphismData
    proj: AInfMorphismData
    tspace: GradedSpace
    incl_matrix: GradedMap
    coords_matrix: GradedMap


def _vec_to_t(coords_cols: list[dict], v: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict = {}
    for i, c in v.items():
        for a, w in coords_cols[i].items():
            _add(out, a, c * w)
    return out


def transfer_minimal(A: AInfStructure, hd: HodgeData, cap: int | None = None,
                     morphism_cap: int | None = None) -> MinimalModel:
    """Structure t m (1 + s m)^{-1} t on tV, with incl = (1 + S m)^{-1} T and
    proj = T (1 + m S)^{-1} as A-infinity morphisms.

    The morphisms are computed through ``morphism_cap`` (default: cap); the
    proj components range over all of V^n and dominate the cost.
    """
    cap = A.cap if cap is None else min(cap, A.cap)
    mcap = cap if morphism_cap is None else min(cap, morphism_cap)
    bar = Bar(A, hd)
    V = A.basis
    tspace, incl_gm, coords_gm = image_of_projector(hd.t)
    Tb = Basis(tspace)
    inc_cols = map_columns(incl_gm, Tb, V)
    crd_cols = map_columns(coords_gm, V, Tb)

    ops: dict[int, MultiMap] = {}
    incl: dict[int, MultiMap] = {1: map_from_columns(inc_cols)}
    d_t: MultiMap = {}
    for a in range(len(Tb)):
        img = {}
        for i, c in inc_cols[a].items():
            for o, v in A.op(1).get((i,), {}).items():
                _add(img, o, c * v)
        img = _vec_to_t(crd_cols, img)
        if img:
            d_t[(a,)] = img
    ops[1] = d_t
    for n in range(2, cap + 1):
        bn: MultiMap = {}
        fn: MultiMap = {}
        for key in _basis_tuples(len(Tb), n):
            x: Tensor = {(): Fraction(1)}
            for a in key:
                x = {k + (i,): c * v for k, c in x.items() for i, v in inc_cols[a].items()}
            series = bar.alpha(x)
            out = _vec_to_t(crd_cols, _apply_t(bar, _arity_one_tensor(bar.to_arity_one(series))))
            if out:
                bn[key] = out
            f = _arity_one(series)
            f = {o: c for o, c in f.items() if c != 0}
            if f:
                fn[key] = f
        ops[n] = bn
        if n <= mcap:
            incl[n] = fn
    Amin = AInfStructure(tspace, cap, ops)

    proj: dict[int, MultiMap] = {}
    for n in range(1, mcap + 1):
        gn: MultiMap = {}
        for key in _basis_tuples(len(V), n):
            series = bar.beta({key: Fraction(1)})
            out = _vec_to_t(crd_cols, _apply_t(bar, _arity_one(series)))
            if out:
                gn[key] = out
        proj[n] = gn
    return MinimalModel(
        structure=Amin,
        incl=AInfMorphismData(Amin.truncate(mcap), A.truncate(mcap), incl),
        proj=AInfMorphismData(A.truncate(mcap), Amin.truncate(mcap), proj),
        tspace=tspace, incl_matrix=incl_gm, coords_matrix=coords_gm)


def _arity_one_tensor(v: Tensor) -> dict[int, Fraction]:
    return {k[0]: c for k, c in v.items()}


def _apply_t(bar: Bar, v: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict = {}
    for i, c in v.items():
        for j, w in bar.t_cols[i].items():
            _add(out, j, c * w)
    return out


def perturbed_hodge_check(A: AInfStructure, hd: HodgeData, upto: int) -> list[IdentityReport]:
    """(alpha S, alpha T beta) is an HD for D1 + m on arities <= upto."""
    bar = Bar(A, hd)
    S = lambda x: bar.alpha(bar.S(x))
    T = lambda x: bar.alpha(bar.T(bar.beta(x)))
    D = lambda x: _lin(bar.D1(x), bar.m(x), signs=(1, 1))
    return _hd_axioms(bar, range(1, upto + 1), S, T, D, f"perturbed, arity <= {upto}")


# ---------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True, eq=False)
class Decomposition:
    split: AInfStructure
    iso: AInfMorphismData
    iso_inverse: AInfMorphismData
    reports: list[IdentityReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def split_structure(A: AInfStructure, hd: HodgeData, cap: int | None = None) -> AInfStructure:
    """b-check: b_1 = d and, for n >= 2, pr_1 T m (1 + S m)^{-1} T on all of V."""
    cap = A.cap if cap is None else min(cap, A.cap)
    bar = Bar(A, hd)
    ops = {1: A.op(1)}
    for n in range(2, cap + 1):
        bn: MultiMap = {}
        for key in _basis_tuples(len(A.basis), n):
            tx = bar.T_key(key)
            if not tx:
                continue
            out = _apply_t(bar, _arity_one_tensor(bar.to_arity_one(bar.alpha(tx))))
            if out:
                bn[key] = out
        ops[n] = bn
    return AInfStructure(A.space, cap, ops)


def gauge_morphism(A: AInfStructure, hd: HodgeData, cap: int | None = None) -> dict[int, MultiMap]:
    """Components pr_1 g with g = (1 + T - (1 + S m)^{-1} T)(1 + m S)^{-1}.

    Extended as a coalgebra map this is an A-infinity isomorphism from A to
    the split structure; it is the predual (transpose) of the algebra
    automorphism conjugating the split derivation into m.
    """
    cap = A.cap if cap is None else min(cap, A.cap)
    bar = Bar(A, hd)
    comps: dict[int, MultiMap] = {}
    for n in range(1, cap + 1):
        fn: MultiMap = {}
        for key in _basis_tuples(len(A.basis), n):
            y = bar.beta({key: Fraction(1)})
            ty = bar.T(y)
            out = _arity_one(_lin(y, ty, bar.alpha(ty), signs=(1, 1, -1)))
            if out:
                fn[key] = out
        comps[n] = fn
    return comps


def split_shape_check(A: AInfStructure, split: AInfStructure, hd: HodgeData) -> list[IdentityReport]:
    """Minimal on tV plus linear contractible on (1 - t)V."""
    B = A.basis
    t_map = map_from_columns(map_columns(hd.t, B, B))
    d, s, t = A.differential(), hd.s, hd.t
    lin = {
        "d t = 0": d @ t, "t d = 0": t @ d,
        "d s d = d": d @ s @ d - d, "s d s = s": s @ d @ s - s,
    }
    reports = [IdentityReport(f"split {k}", "pass" if (w := m.first_nonzero()) is None else "fail", None, w)
               for k, m in lin.items()]
    for n in range(2, split.cap + 1):
        bn = split.op(n)
        kills = map_sub(compose_tuple(bn, [t_map] * n), bn)
        lands = map_sub(compose_tuple(t_map, [bn]), bn)
        w = first_entry(kills, B) or first_entry(lands, B)
        reports.append(IdentityReport(f"split arity {n} supported on tV", "pass" if w is None else "fail", n, w))
    return reports


def decomposition(A: AInfStructure, hd: HodgeData, cap: int | None = None) -> Decomposition:
    """A-infinity isomorphism between A and (minimal on tV) + (linear contractible).

    ``iso`` runs from A to the split structure and ``iso_inverse`` back.  The
    reports check both morphism identities per arity (the componentwise form
    of conjugating the split structure into A), that the two compose to the
    identity, and the split shape.
    """
    cap = A.cap if cap is None else min(cap, A.cap)
    A = A.truncate(cap)
    split = split_structure(A, hd, cap)
    iso = AInfMorphismData(A, split, gauge_morphism(A, hd, cap))
    inv = invert_morphism(iso)
    reports = [IdentityReport(f"inverse-eq {r.identity_id}", r.status, r.cap, r.witness)
               for r in morphism_check(iso)]
    reports += [IdentityReport(f"inverse-eq reversed {r.identity_id}", r.status, r.cap, r.witness)
                for r in morphism_check(inv)]
    for name, comp in (("iso^-1 o iso = id", compose_morphisms(inv, iso)),
                       ("iso o iso^-1 = id", compose_morphisms(iso, inv))):
        ok = is_identity_morphism(comp)
        reports.append(IdentityReport(name, "pass" if ok else "fail", cap,
                                      None if ok else {"note": "composite differs from the identity"}))
    reports.extend(codifferential_check(split))
    reports.extend(split_shape_check(A, split, hd))
    return Decomposition(split, iso, inv, reports)
