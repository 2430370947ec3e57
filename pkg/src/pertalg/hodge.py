"""Exact linear realization: Hodge decompositions and perturbation transfer
on finite-dimensional cochain complexes.

All maps are stored blockwise by source degree, as numpy object arrays of
``Fraction``.  A block for source degree ``n`` of a map with shift ``k``
has shape ``(dim V^{n+k}, dim V^n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import exact
from .algebra import AlgebraElement, NotInvertibleError, TruncatedSeries, degree, differential
from .catalog import IdentityReport


class MCViolation(ValueError):
    """(d + x)^2 != 0."""


class SingularPerturbation(NotInvertibleError):
    """1 + sx (or 1 + xs) is not invertible."""


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class GradedSpace:
    labels: Mapping[int, tuple[str, ...]]

    def __post_init__(self):
        clean = {}
        for n, labs in self.labels.items():
            labs = tuple(labs)
            if len(set(labs)) != len(labs):
                raise ValueError(f"duplicate labels in degree {n}")
            if labs:
                clean[int(n)] = labs
        object.__setattr__(self, "labels", dict(sorted(clean.items())))

    @classmethod
    def from_dims(cls, dims: Mapping[int, int], prefix: str = "e") -> "GradedSpace":
        return cls({n: tuple(f"{prefix}{n}_{i}" for i in range(k)) for n, k in dims.items()})

    def dim(self, n: int) -> int:
        return len(self.labels.get(n, ()))

    @property
    def dims(self) -> dict[int, int]:
        return {n: len(l) for n, l in self.labels.items()}

    @property
    def degrees(self) -> list[int]:
        return list(self.labels)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def basis(self) -> list[tuple[int, str]]:
        """Global basis order: by degree, then label order."""
        return [(n, lab) for n, labs in self.labels.items() for lab in labs]

    def locate(self, label: str) -> tuple[int, int]:
        for n, labs in self.labels.items():
            if label in labs:
                return n, labs.index(label)
        raise KeyError(label)

    def __hash__(self):
        return hash(tuple((n, l) for n, l in self.labels.items()))

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and dict(self.labels) == dict(other.labels)


@dataclass(frozen=True, eq=False)
class GradedMap:
    source: GradedSpace
    target: GradedSpace
    shift: int
    blocks: Mapping[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        full = {}
        for n in self.source.degrees:
            shape = (self.target.dim(n + self.shift), self.source.dim(n))
            b = self.blocks.get(n)
            if b is None:
                b = exact.zeros(*shape)
            elif b.shape != shape:
                raise ValueError(f"block {n} has shape {b.shape}, expected {shape}")
            full[n] = b
        object.__setattr__(self, "blocks", full)

    @classmethod
    def identity(cls, space: GradedSpace) -> "GradedMap":
        return cls(space, space, 0, {n: exact.eye(space.dim(n)) for n in space.degrees})

    @classmethod
    def zero(cls, source: GradedSpace, target: GradedSpace | None = None, shift: int = 0) -> "GradedMap":
        return cls(source, target or source, shift)

    @classmethod
    def from_entries(cls, space: GradedSpace, shift: int, entries, target: GradedSpace | None = None) -> "GradedMap":
        """entries: iterable of (source label, target label, coefficient)."""
        target = target or space
        blocks = {n: exact.zeros(target.dim(n + shift), space.dim(n)) for n in space.degrees}
        for src, tgt, c in entries:
            n, j = space.locate(src)
            m, i = target.locate(tgt)
            if m != n + shift:
                raise ValueError(f"{src} -> {tgt} does not have degree shift {shift}")
            blocks[n][i, j] += Fraction(c)
        return cls(space, target, shift, blocks)

    def block(self, n: int) -> np.ndarray:
        if n in self.blocks:
            return self.blocks[n]
        return exact.zeros(self.target.dim(n + self.shift), self.source.dim(n))

    def entries(self):
        """Nonzero (source label, target label, coefficient) triples."""
        for n, b in self.blocks.items():
            src = self.source.labels[n]
            tgt = self.target.labels.get(n + self.shift, ())
            for (i, j), v in np.ndenumerate(b):
                if v != 0:
                    yield src[j], tgt[i], v

    def _check(self, other: "GradedMap"):
        if self.source != other.source or self.target != other.target or self.shift != other.shift:
            raise ValueError("incompatible graded maps")

    def __add__(self, other: "GradedMap") -> "GradedMap":
        self._check(other)
        return GradedMap(self.source, self.target, self.shift,
                         {n: self.blocks[n] + other.blocks[n] for n in self.blocks})

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        self._check(other)
        return GradedMap(self.source, self.target, self.shift,
                         {n: self.blocks[n] - other.blocks[n] for n in self.blocks})

    def __neg__(self) -> "GradedMap":
        return GradedMap(self.source, self.target, self.shift, {n: -b for n, b in self.blocks.items()})

    def scale(self, c) -> "GradedMap":
        c = Fraction(c)
        return GradedMap(self.source, self.target, self.shift, {n: b * c for n, b in self.blocks.items()})

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        """Composition self o other."""
        if other.target != self.source:
            raise ValueError("composition of incompatible graded maps")
        blocks = {n: exact.mul(self.block(n + other.shift), other.blocks[n]) for n in other.blocks}
        return GradedMap(other.source, self.target, self.shift + other.shift, blocks)

    def is_zero(self) -> bool:
        return all(exact.is_zero(b) for b in self.blocks.values())

    def first_nonzero(self) -> dict | None:
        for n, b in self.blocks.items():
            hit = exact.first_nonzero(b)
            if hit is not None:
                i, j, v = hit
                return {"degree": n, "source": self.source.labels[n][j],
                        "target": self.target.labels[n + self.shift][i], "value": str(v)}
        return None

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        if self.shift != other.shift:
            return self.is_zero() and other.is_zero()
        return (self - other).is_zero()

    __hash__ = None

    def inverse(self) -> "GradedMap":
        if self.shift != 0:
            raise NotInvertibleError("only degree-0 maps can be inverted")
        blocks = {}
        for n, b in self.blocks.items():
            try:
                blocks[n] = exact.inverse(b)
            except NotInvertibleError as e:
                raise NotInvertibleError(f"singular in degree {n}: determinant 0") from e
        return GradedMap(self.target, self.source, 0, blocks)


@dataclass(frozen=True, eq=False)
class ChainComplex:
    space: GradedSpace
    d: GradedMap

    def __post_init__(self):
        if self.d.shift != 1:
            raise ValueError("differential must raise degree by one")
        if not (self.d @ self.d).is_zero():
            raise ValueError(f"d^2 != 0: {(self.d @ self.d).first_nonzero()}")

    def cohomology_dims(self, extra: GradedMap | None = None) -> dict[int, int]:
        """dim H^n of (V, d + extra)."""
        dd = self.d if extra is None else self.d + extra
        out = {}
        for n in self.space.degrees:
            k = self.space.dim(n) - exact.rank(dd.block(n))
            im = exact.rank(dd.block(n - 1)) if (n - 1) in dd.blocks else 0
            out[n] = k - im
        return out

    @property
    def identity(self) -> GradedMap:
        return GradedMap.identity(self.space)


@dataclass(frozen=True, eq=False)
class HodgeData:
    s: GradedMap
    t: GradedMap


@dataclass(frozen=True, eq=False)
class Perturbation:
    x: GradedMap
    alpha_V: GradedMap
    beta_V: GradedMap


# ---------------------------------------------------------------------------


def _columns(a: np.ndarray, idx: list[int]) -> np.ndarray:
    return a[:, idx] if idx else exact.zeros(a.shape[0], 0)


def build_hodge(C: ChainComplex) -> HodgeData:
    """Deterministic harmonious Hodge decomposition by leftmost-pivot reduction."""
    V = C.space
    pivots: dict[int, list[int]] = {}
    for n in V.degrees:
        pivots[n] = exact.rref(C.d.block(n))[1] if V.dim(n + 1) else []
    s_blocks, t_blocks = {}, {}
    for n in V.degrees:
        dim = V.dim(n)
        # boundaries: images of the pivot columns of the incoming differential
        d_in = C.d.block(n - 1) if (n - 1) in V.labels else exact.zeros(dim, 0)
        b_src = pivots.get(n - 1, [])
        B = _columns(d_in, b_src)
        Z = exact.nullspace(C.d.block(n)) if V.dim(n + 1) else exact.eye(dim)
        stacked = np.hstack([B, Z])
        _, piv = exact.rref(stacked) if stacked.shape[1] else (None, [])
        Hcols = [j - B.shape[1] for j in piv if j >= B.shape[1]]
        H = _columns(Z, Hcols)
        Ccomp = _columns(exact.eye(dim), pivots[n])
        P = np.hstack([B, H, Ccomp])
        Pinv = exact.inverse(P)
        nb, nh = B.shape[1], H.shape[1]
        proj = exact.zeros(dim, dim)
        for k in range(nb, nb + nh):
            proj[k, k] = Fraction(1)
        t_blocks[n] = exact.mul(exact.mul(P, proj), Pinv)
        # s sends the k-th boundary basis vector back to the k-th pivot source vector
        lift = exact.zeros(V.dim(n - 1), dim)
        for k, j in enumerate(b_src):
            lift[j, k] = Fraction(1)
        s_blocks[n] = exact.mul(lift, Pinv)
    return HodgeData(GradedMap(V, V, -1, s_blocks), GradedMap(V, V, 0, t_blocks))


HODGE_AXIOMS = ("s^2=0", "sd+ds=1-t", "dt=td", "t^2=t", "st=ts=0")


def verify_hodge(C: ChainComplex, hd: HodgeData, d: GradedMap | None = None) -> list[IdentityReport]:
    d = C.d if d is None else d
    s, t = hd.s, hd.t
    one = GradedMap.identity(C.space)
    checks = [
        [s @ s],
        [s @ d + d @ s - (one - t)],
        [d @ t - t @ d],
        [t @ t - t],
        [s @ t, t @ s],
    ]
    reports = []
    for k, (name, diffs) in enumerate(zip(HODGE_AXIOMS, checks), start=1):
        witness = None
        for m in diffs:
            witness = m.first_nonzero()
            if witness is not None:
                witness = {"axiom": k, **witness}
                break
        reports.append(IdentityReport(f"HD{k} {name}", "pass" if witness is None else "fail", None, witness))
    return reports


def make_perturbation(C: ChainComplex, hd: HodgeData, x: GradedMap) -> Perturbation:
    if x.shift != 1:
        raise ValueError("perturbation must raise degree by one")
    mc = C.d @ x + x @ C.d + x @ x
    w = mc.first_nonzero()
    if w is not None:
        raise MCViolation(f"(d+x)^2 != 0 at {w}")
    one = C.identity
    try:
        alpha = (one + hd.s @ x).inverse()
    except NotInvertibleError as e:
        raise SingularPerturbation(f"1+sx: {e}") from None
    try:
        beta = (one + x @ hd.s).inverse()
    except NotInvertibleError as e:
        raise SingularPerturbation(f"1+xs: {e}") from None
    return Perturbation(x, alpha, beta)


@dataclass(frozen=True, eq=False)
class Transfer:
    """Result of the linear perturbation lemma.

    ``incl``/``coords`` embed tV into V and give coordinates on it;
    ``xi_full`` is t x alpha t on all of V and ``xi`` its restriction to tV.
    """
    tspace: GradedSpace
    incl: GradedMap
    coords: GradedMap
    d_t: GradedMap
    xi_full: GradedMap
    xi: GradedMap
    hd_perturbed: HodgeData
    alpha_t: GradedMap
    t_beta: GradedMap


def image_of_projector(t: GradedMap) -> tuple[GradedSpace, GradedMap, GradedMap]:
    """Basis of the image of an idempotent, its inclusion and a coordinate map."""
    V = t.source
    labels, inc_blocks, coord_blocks = {}, {}, {}
    for n in V.degrees:
        b = t.block(n)
        piv = exact.rref(b)[1] if b.size else []
        names = []
        for j in piv:
            col = b[:, j]
            unit = [i for i, v in enumerate(col) if v != 0]
            if len(unit) == 1 and unit[0] == j and col[j] == 1:
                names.append(V.labels[n][j])
            else:
                names.append(f"t[{V.labels[n][j]}]")
        labels[n] = tuple(names)
        inc_blocks[n] = _columns(b, piv)
        coord_blocks[n] = exact.left_inverse(inc_blocks[n])
    T = GradedSpace(labels)
    incl = GradedMap(T, V, 0, {n: inc_blocks[n] for n in T.degrees})
    coords = GradedMap(V, T, 0, {n: coord_blocks[n] for n in V.degrees})
    return T, incl, coords


def transferred_structure(C: ChainComplex, hd: HodgeData, p: Perturbation) -> Transfer:
    s, t, x, a, b = hd.s, hd.t, p.x, p.alpha_V, p.beta_V
    T, incl, coords = image_of_projector(t)
    xi_full = t @ x @ a @ t
    return Transfer(
        tspace=T, incl=incl, coords=coords,
        d_t=coords @ C.d @ incl,
        xi_full=xi_full,
        xi=coords @ xi_full @ incl,
        hd_perturbed=HodgeData(a @ s, a @ t @ b),
        alpha_t=a @ incl,
        t_beta=coords @ t @ b,
    )


def verify_transfer(C: ChainComplex, hd: HodgeData, p: Perturbation, tr: Transfer) -> list[IdentityReport]:
    """Exact checks of the perturbed HD and of the transfer isomorphisms."""
    reports = [IdentityReport(f"perturbed {r.identity_id}", r.status, None, r.witness)
               for r in verify_hodge(C, tr.hd_perturbed, d=C.d + p.x)]
    one_t = GradedMap.identity(tr.tspace)
    dt = tr.d_t + tr.xi
    at = tr.alpha_t
    checks = {
        "(d+xi)^2=0 on tV": dt @ dt,
        "t beta o alpha t = 1 on tV": tr.t_beta @ at - one_t,
        "alpha t o t beta = alpha t beta": at @ tr.t_beta - tr.hd_perturbed.t,
        "alpha t is a chain map": (C.d + p.x) @ at - at @ dt,
        "t beta is a chain map": dt @ tr.t_beta - tr.t_beta @ (C.d + p.x),
    }
    for name, m in checks.items():
        w = m.first_nonzero()
        reports.append(IdentityReport(name, "pass" if w is None else "fail", None, w))
    h_pert = C.cohomology_dims(p.x)
    h_t = _cohomology(tr.tspace, dt)
    w = None if h_pert == {n: h_t.get(n, 0) for n in h_pert} else {"H(V,d+x)": h_pert, "H(tV)": h_t}
    reports.append(IdentityReport("dim H(V,d+x) = dim H(tV,d+xi)", "pass" if w is None else "fail", None, w))
    return reports


def _cohomology(space: GradedSpace, dd: GradedMap) -> dict[int, int]:
    out = {}
    for n in space.degrees:
        k = space.dim(n) - exact.rank(dd.block(n))
        im = exact.rank(dd.block(n - 1)) if (n - 1) in dd.blocks else 0
        out[n] = k - im
    return out


def gauge_conjugation(C: ChainComplex, hd: HodgeData, p: Perturbation) -> tuple[GradedMap, IdentityReport]:
    """g = (1 + t - alpha t) beta conjugates d + x into d + t x alpha t."""
    one = C.identity
    s, t, x, a, b = hd.s, hd.t, p.x, p.alpha_V, p.beta_V
    g = (one + t - a @ t) @ b
    g_inv = (one + x @ s) @ (one - t + a @ t)
    w = (g @ g_inv - one).first_nonzero() or (g_inv @ g - one).first_nonzero()
    if w is None:
        lhs = g @ (C.d + x) @ g_inv
        w = (lhs - (C.d + t @ x @ a @ t)).first_nonzero()
    return g, IdentityReport("g(d+x)g^-1 = d + t x alpha t", "pass" if w is None else "fail", None, w)


# ---------------------------------------------------------------------------
# representation of the symbolic algebra


def nilpotency_index(op: GradedMap) -> int | None:
    """Least k with op^k = 0, or None if op is not nilpotent."""
    power = op
    for k in range(1, op.source.total_dim + 2):
        if power.is_zero():
            return k
        power = op @ power
    return None


def _closed_forms(C: ChainComplex, hd: HodgeData, p: Perturbation) -> dict[str, GradedMap]:
    one = C.identity
    s, t, x, a, b = hd.s, hd.t, p.x, p.alpha_V, p.beta_V
    return {
        "alpha": a, "beta": b,
        "alpha_inv": one + s @ x, "beta_inv": one + x @ s,
        "xi": t @ x @ a @ t,
        "k": one + t - a @ t,
        "g": (one + t - a @ t) @ b,
        "g_inv": (one + x @ s) @ (one - t + a @ t),
    }


def evaluate_element(C: ChainComplex, hd: HodgeData, p: Perturbation, e) -> GradedMap:
    """Image of a symbolic element under s -> s, t -> t, x -> x.

    A series is evaluated by summing its terms when s x is nilpotent on V;
    otherwise named constants fall back to their closed forms.
    """
    V = C.space
    if isinstance(e, TruncatedSeries):
        if nilpotency_index(hd.s @ p.x) is None:
            if e.label is None:
                raise EvaluationError("s x is not nilpotent and the series has no closed form")
            return _closed_forms(C, hd, p)[e.label]
        e = e.element
    gens = {"s": hd.s, "t": hd.t, "x": p.x}
    cache: dict[str, GradedMap] = {"": GradedMap.identity(V)}

    def word_map(w: str) -> GradedMap:
        if w not in cache:
            cache[w] = word_map(w[:-1]) @ gens[w[-1]]
        return cache[w]

    parts: dict[int, GradedMap] = {}
    for w, c in e.items():
        m = word_map(w).scale(c)
        k = degree(w)
        parts[k] = parts[k] + m if k in parts else m
    if not parts:
        return GradedMap.zero(V)
    if len(parts) > 1:
        raise EvaluationError("element is not homogeneous")
    return next(iter(parts.values()))


def representation_report(C: ChainComplex, hd: HodgeData, p: Perturbation,
                          a: AlgebraElement, b: AlgebraElement) -> list[str]:
    """Names of failed representation checks for homogeneous a, b."""
    failed = []
    Ea, Eb = evaluate_element(C, hd, p, a), evaluate_element(C, hd, p, b)
    if evaluate_element(C, hd, p, a * b) != Ea @ Eb:
        failed.append("multiplicative")
    sign = -1 if (a.degrees() or {0}).pop() % 2 else 1
    rhs = C.d @ Ea - (Ea @ C.d).scale(sign)
    if evaluate_element(C, hd, p, differential(a)) != rhs:
        failed.append("differential")
    return failed
