"""Random test instances: complexes, MC perturbations, dg algebras.

All generators take a ``random.Random`` so runs are reproducible.
"""
from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from . import exact
from .algebra import NotInvertibleError
from .hodge import ChainComplex, GradedMap, GradedSpace, HodgeData, Perturbation, make_perturbation


def _small(rng: random.Random, zero_weight: float = 0.5) -> Fraction:
    if rng.random() < zero_weight:
        return Fraction(0)
    return Fraction(rng.choice([-2, -1, 1, 1, 2, 3]))


def random_unitriangular(rng: random.Random, n: int, density: float = 0.4,
                         permute: bool = True) -> np.ndarray:
    """Random invertible matrix: a product of a lower and an upper unitriangular."""
    lo, up = exact.eye(n), exact.eye(n)
    for i in range(n):
        for j in range(n):
            if i > j and rng.random() < density:
                lo[i, j] = _small(rng, 0)
            if i < j and rng.random() < density:
                up[i, j] = _small(rng, 0)
    perm = list(range(n))
    if permute:
        rng.shuffle(perm)
    return exact.mul(lo, up)[perm]


def random_complex(rng: random.Random, degrees=range(-3, 4), max_dim: int = 6) -> ChainComplex:
    """Complex with d^2 = 0 by construction: V^n = B + H + C, d: C^n ~ B^{n+1},
    conjugated by random invertible matrices in each degree."""
    degrees = list(degrees)
    b = {n: 0 for n in degrees}
    h, c = {}, {}
    for n in degrees:
        room = max_dim - b[n]
        h[n] = rng.randint(0, max(0, min(2, room)))
        room -= h[n]
        nxt = n + 1
        c[n] = rng.randint(0, max(0, min(room, max_dim - 1))) if nxt in b else 0
        if nxt in b:
            b[nxt] = c[n]
    V = GradedSpace.from_dims({n: b[n] + h[n] + c[n] for n in degrees}, prefix="v")
    P = {n: random_unitriangular(rng, V.dim(n)) for n in V.degrees}
    blocks = {}
    for n in V.degrees:
        if V.dim(n + 1) == 0:
            continue
        canon = exact.zeros(V.dim(n + 1), V.dim(n))
        for k in range(c[n]):
            canon[k, b[n] + h[n] + k] = Fraction(1)
        blocks[n] = exact.mul(exact.mul(P[n + 1], canon), exact.inverse(P[n]))
    return ChainComplex(V, GradedMap(V, V, 1, blocks))


def conjugation_perturbation(rng: random.Random, C: ChainComplex) -> GradedMap:
    """x = P d P^-1 - d for a random degree-0 automorphism P; (d+x)^2 = 0."""
    V = C.space
    P = GradedMap(V, V, 0, {n: random_unitriangular(rng, V.dim(n), 0.3, permute=False)
                           for n in V.degrees})
    return P @ C.d @ P.inverse() - C.d


def random_perturbation(rng: random.Random, C: ChainComplex, hd: HodgeData, tries: int = 20) -> Perturbation:
    for _ in range(tries):
        try:
            return make_perturbation(C, hd, conjugation_perturbation(rng, C))
        except NotInvertibleError:
            continue
    return make_perturbation(C, hd, GradedMap.zero(C.space, shift=1))


def random_dg_algebra(rng: random.Random, size: int = 4, max_per_degree: int = 4, scramble: bool = True):
    """Strictly upper triangular matrices span{E_ij : i < j} graded by random
    index degrees, with d = [delta, -] for an odd delta, delta^2 = 0.

    Returns (space, m_ops) in the m-convention.
    """
    from .ainf import labelled_family

    while True:
        a = [rng.choice([0, 0, 1, 1, 2]) for _ in range(size)]
        pairs = [(i, j) for i in range(size) for j in range(i + 1, size)]
        labels: dict[int, list[str]] = {}
        for i, j in pairs:
            labels.setdefault(a[j] - a[i], []).append(f"E{i}{j}")
        if max(len(v) for v in labels.values()) <= max_per_degree:
            break
    deg = {(i, j): a[j] - a[i] for i, j in pairs}
    odd = [p for p in pairs if deg[p] == 1 and rng.random() < 0.6]
    delta: dict = {}
    for i, j in odd:
        if any(k == j or l == i for k, l in delta):
            continue
        delta[(i, j)] = Fraction(rng.choice([-1, 1, 2]))

    def mult(x: dict, y: dict) -> dict:
        out: dict = {}
        for (i, j), c in x.items():
            for (k, l), e in y.items():
                if j == k:
                    out[(i, l)] = out.get((i, l), 0) + c * e
        return {k: v for k, v in out.items() if v != 0}

    m1, m2 = [], []
    for p in pairs:
        e = {p: Fraction(1)}
        sign = -1 if deg[p] % 2 else 1
        img = mult(delta, e)
        for k, v in mult(e, delta).items():
            img[k] = img.get(k, 0) - sign * v
        m1 += [((f"E{p[0]}{p[1]}",), f"E{k[0]}{k[1]}", v) for k, v in img.items() if v != 0]
        for q in pairs:
            if p[1] == q[0]:
                m2.append(((f"E{p[0]}{p[1]}", f"E{q[0]}{q[1]}"), f"E{p[0]}{q[1]}", 1))
    space = GradedSpace({n: tuple(v) for n, v in labels.items()})
    ops = labelled_family(space, {1: m1, 2: m2})
    if scramble:
        P = GradedMap(space, space, 0, {n: random_unitriangular(rng, space.dim(n), 0.4)
                                        for n in space.degrees})
        ops = change_basis(space, ops, P)
    return space, ops


def change_basis(space: GradedSpace, ops: dict, P: GradedMap) -> dict:
    """Transport a family of multilinear maps along the automorphism P."""
    from .ainf import Basis, _add_map, map_columns

    B = Basis(space)
    p_cols = map_columns(P, B, B)
    q_cols = map_columns(P.inverse(), B, B)
    out = {}
    for n, m in ops.items():
        new: dict = {}
        for key, row in m.items():
            img: dict = {}
            for o, c in row.items():
                for o2, v in p_cols[o].items():
                    img[o2] = img.get(o2, 0) + c * v
            # f'(y) = P f(P^-1 y): spread the entry over every y hitting ``key``
            for y in _preimages(key, q_cols, len(B)):
                coef = y[1]
                for o2, v in img.items():
                    if v != 0:
                        _add_map(new, y[0], o2, coef * v)
        out[n] = new
    return out


def _preimages(key, q_cols, n):
    # rows of P^-1: for each basis y_p, P^-1 y_p = sum_i q[i][p] e_i
    rows: dict[int, list] = {}
    for p in range(n):
        for i, v in q_cols[p].items():
            rows.setdefault(i, []).append((p, v))
    combos = [((), Fraction(1))]
    for i in key:
        combos = [(k + (p,), c * v) for k, c in combos for p, v in rows.get(i, [])]
    return combos


def random_two_step_algebra(rng: random.Random, dim1: int | None = None, dim2: int | None = None,
                            density: float = 0.6):
    """V = V^1 + V^2 with a random product V^1 x V^1 -> V^2 and a random
    d: V^1 -> V^2.  Every triple product lands in degree 3, so this is always
    a dg algebra; exact products give higher transferred operations.

    Returns (space, m_ops) in the m-convention.
    """
    from .ainf import labelled_family

    p = dim1 if dim1 is not None else rng.randint(2, 3)
    q = dim2 if dim2 is not None else rng.randint(1, 3)
    one = tuple(f"a{i}" for i in range(p))
    two = tuple(f"b{j}" for j in range(q))
    space = GradedSpace({1: one, 2: two})
    # a rank-one d keeps most of V^1 closed, so products tend to be exact
    m1 = [((rng.choice(one),), rng.choice(two), _small(rng, 0))]
    m2 = [((a, c), b, _small(rng, 0)) for a in one for c in one for b in two if rng.random() < density]
    return space, labelled_family(space, {1: m1, 2: m2})
