"""Acceptance criteria, each checked at zero tolerance in exact arithmetic.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""
import itertools
import json
import random
import time
from importlib.resources import files

import pytest

import oracles
from pertalg import ainf
from pertalg.algebra import degree, element, series_constant
from pertalg.catalog import Identity, evaluate_identity, verify_catalog
from pertalg.cli import run_command
from pertalg.generators import random_complex, random_dg_algebra, random_perturbation, random_two_step_algebra
from pertalg.hodge import (
    ChainComplex,
    build_hodge,
    gauge_conjugation,
    image_of_projector,
    representation_report,
    transferred_structure,
    verify_transfer,
)
from pertalg.modules import AdmissibleTree, enumerate_admissible_trees, regular_module, transfer_module
from pertalg.problems import load_problem

DATA = files("pertalg") / "data"
MASSEY = str(DATA / "massey.json")
MASSEY_MODULE = str(DATA / "massey_module.json")
SMALL = str(DATA / "small_complex.json")

CATALOG_IDS = ["E1", "E2", "E3", "E4", "E5", "E6", "E7", "D1", "D2", "BERG", "PHI-REL", "PHI-INV",
               "PHI-COMOD", "HPL", "XI-MC", "XI-PRIM", "G1", "G2", "G3", "G4", "GAUGE", "RHO-G", "ISO"]


def failures(reports):
    return [r.to_dict() for r in reports if not r.passed]


def hodge_of(space, d):
    return build_hodge(ChainComplex(space, d))


def massey(cap):
    A = load_problem(MASSEY).algebra(cap)
    return A, hodge_of(A.space, A.differential())


def random_algebra(seed, cap):
    rng = random.Random(seed)
    gen = random_two_step_algebra if seed % 2 else random_dg_algebra
    V, m = gen(rng)
    A = ainf.from_m_family(V, m, cap)
    return A, hodge_of(V, A.differential())


# ---------------------------------------------------------------------------


@pytest.mark.criterion("1", "verify-algebra --cap 6: full identity catalog (BERG with corrected sign), exact at x-count <= 6, < 60 s")
def test_criterion_1_catalog():
    start = time.perf_counter()
    code, rep = run_command(["verify-algebra", "--cap", "6", "--out", "/dev/null"])
    elapsed = time.perf_counter() - start
    assert code == 0
    assert [r["identity"] for r in rep["results"]] == CATALOG_IDS
    assert all(r["status"] == "pass" and r["cap"] == 6 for r in rep["results"])
    # every lower cap too, so no x-count is skipped
    for cap in range(6):
        assert not failures(verify_catalog(cap))
    assert elapsed < 60


@pytest.mark.criterion("1.1", "BERG sign variant: (1+xs)^-1 = x(1+sx)^-1 s + 1")
@pytest.mark.xfail(strict=True, reason="this sign variant is false at x-count 1; see the decisions ledger")
def test_criterion_1_berg_sign_variant():
    literal = Identity("BERG-variant", "(1+xs)^-1 = x(1+sx)^-1 s + 1",
                       lambda c: [(c.beta, c.x * c.alpha * c.s + c.one)])
    r = evaluate_identity(literal, 6)
    print("BERG variant:", r.to_dict())
    assert r.passed


@pytest.mark.criterion("2", "linear HPL suite: 100 complexes with conjugation perturbations, < 30 s")
def test_criterion_2_linear_suite():
    start = time.perf_counter()
    nontrivial = 0
    for seed in range(100):
        rng = random.Random(seed)
        C = random_complex(rng, degrees=range(-3, 4), max_dim=6)
        hd = build_hodge(C)
        p = random_perturbation(rng, C, hd)
        nontrivial += not p.x.is_zero()
        tr = transferred_structure(C, hd, p)
        assert not failures(verify_transfer(C, hd, p, tr)), seed
        _, rep = gauge_conjugation(C, hd, p)
        assert rep.passed, seed
        # homology of (V, d + x) by an independent float rank
        dx = {n: (C.d + p.x).block(n) for n in C.space.degrees}
        dims = oracles.homology_dims(C.space, dx)
        assert dims == C.cohomology_dims(p.x) == {n: tr.tspace.dim(n) for n in C.space.degrees}, seed
    elapsed = time.perf_counter() - start
    assert nontrivial == 100
    assert elapsed < 30


_WORDS: dict[int, list[str]] = {}
for _n in range(6):
    for _w in map("".join, itertools.product("stx", repeat=_n)):
        _WORDS.setdefault(degree(_w), []).append(_w)


def _random_homogeneous(rng):
    d = rng.choice([-2, -1, 0, 0, 1, 1, 2])
    ws = rng.sample(_WORDS[d], 3)
    return element({w: rng.choice([-3, -2, -1, 1, 2, 3]) for w in ws})


@pytest.mark.criterion("3", "representation bridge: 1000 (element, complex) pairs, morphism and d-intertwining")
def test_criterion_3_representation():
    pairs = 0
    for seed in range(200):
        rng = random.Random(10_000 + seed)
        C = random_complex(rng, degrees=range(-3, 4), max_dim=4)
        hd = build_hodge(C)
        p = random_perturbation(rng, C, hd)
        for _ in range(5):
            a, b = _random_homogeneous(rng), _random_homogeneous(rng)
            assert representation_report(C, hd, p, a, b) == [], (seed, a, b)
            pairs += 1
    assert pairs == 1000


@pytest.mark.criterion("4", "Massey regression: m_3(u,v,u) = -wu, all m_3 values match the oracle, Stasheff to arity 6")
def test_criterion_4_massey():
    A, hd = massey(6)
    mm = ainf.transfer_minimal(A, hd, 6, morphism_cap=3)
    M = mm.structure
    m_family = ainf.to_m_family(M)
    B = M.basis
    u, v, wu = B.index["u"], B.index["v"], B.index["wu"]
    assert m_family[3][(u, v, u)] == {wu: -1}
    # independent tree-recursion oracle, every arity up to 6
    ts, inc, crd = image_of_projector(hd.t)
    TB = ainf.Basis(ts)
    VB = A.basis
    ops, _ = oracles.tree_transfer(A.ops, ainf.map_columns(hd.s, VB, VB), ainf.map_columns(hd.t, VB, VB),
                                   ainf.map_columns(inc, TB, VB), ainf.map_columns(crd, VB, TB), 6)
    for n in range(2, 7):
        assert ainf.clean(ops[n]) == ainf.clean(M.op(n)), n
    assert not failures(ainf.stasheff_check(M.space, m_family, 6))
    assert not failures(ainf.codifferential_check(M))
    assert not failures(ainf.morphism_check(mm.incl)) and not failures(ainf.morphism_check(mm.proj))
    # the same number through the command line
    code, rep = run_command(["minimal", MASSEY, "--cap", "4", "--out", "/dev/null"])
    assert code == 0
    assert {"in": ["u", "v", "u"], "out": "wu", "coef": "-1"} in rep["structure"]["ops"]["3"]


@pytest.mark.criterion("5", "decomposition to arity 5 on the Massey fixture and 20 random dg algebras, split shape exact")
def test_criterion_5_decomposition():
    cases = [massey(5)] + [random_algebra(500 + k, 5) for k in range(20)]
    higher = 0
    for k, (A, hd) in enumerate(cases):
        dec = ainf.decomposition(A, hd, 5)
        assert not failures(dec.reports), k
        ids = {r.identity_id for r in dec.reports}
        assert {f"inverse-eq morphism arity {n}" for n in range(1, 6)} <= ids
        assert {f"split arity {n} supported on tV" for n in range(2, 6)} <= ids
        higher += any(dec.split.op(n) for n in (3, 4, 5))
    assert higher >= 3


@pytest.mark.criterion("6", "module transfer: 2^(i-2) trees for i <= 7, tree sum = series, tree (3,1,2) formula, split_iso")
def test_criterion_6_modules():
    for i in range(2, 8):
        assert len(enumerate_admissible_trees(i)) == 2 ** (i - 2)
    assert AdmissibleTree((3, 1, 2)).formula() == "tm_3(id^⊗2⊗sm_2)(id^⊗3⊗sm_4)(id^⊗6⊗t)"
    code, rep = run_command(["trees", "--arity", "7", "--out", "/dev/null"])
    assert code == 0 and rep["count"] == 32

    modules = [load_problem(MASSEY_MODULE).module(7)]
    for seed in (1, 3, 5):
        V, m = random_two_step_algebra(random.Random(seed), 2, 2)
        modules.append(regular_module(ainf.from_m_family(V, m, 7)))
    for seed in (0, 2):
        V, m = random_dg_algebra(random.Random(seed), size=3)
        modules.append(regular_module(ainf.from_m_family(V, m, 5)))
    for k, Mm in enumerate(modules):
        hd = hodge_of(Mm.module_space, Mm.differential())
        tr = transfer_module(Mm, hd)
        assert not failures(tr.reports), k
        ids = {r.identity_id for r in tr.reports}
        assert {f"tree sum = series, arity {i}" for i in range(2, Mm.cap + 1)} <= ids
        assert any(i.startswith("split_iso module morphism") for i in ids)


@pytest.mark.criterion("7", "truncation and arity coherence, byte-identical reports")
def test_criterion_7_coherence(tmp_path):
    for name in ("alpha", "beta", "xi", "g", "g_inv", "k"):
        top = series_constant(name, 6)
        assert all(top.truncate(m) == series_constant(name, m) for m in range(6))
    for A, hd in [massey(5), random_algebra(1, 5), random_algebra(4, 5)]:
        hi = ainf.transfer_minimal(A, hd, 5, morphism_cap=3)
        lo = ainf.transfer_minimal(A, hd, 3, morphism_cap=2)
        assert hi.structure.same_ops(lo.structure, 3)
        assert all(ainf.clean(hi.incl.comp(n)) == ainf.clean(lo.incl.comp(n)) for n in (1, 2))
        assert all(ainf.clean(hi.proj.comp(n)) == ainf.clean(lo.proj.comp(n)) for n in (1, 2))
        assert ainf.split_structure(A, hd, 5).same_ops(ainf.split_structure(A, hd, 3), 3)
    Mm = load_problem(MASSEY_MODULE).module(5)
    hd = hodge_of(Mm.module_space, Mm.differential())
    a, b = transfer_module(Mm, hd, 5).minimal, transfer_module(Mm, hd, 3).minimal
    assert all(ainf.clean(a.op(n)) == ainf.clean(b.op(n)) for n in range(1, 4))

    out = tmp_path / "r.json"
    commands = [["verify-algebra", "--cap", "3"], ["hodge", SMALL], ["transfer", SMALL],
                ["minimal", MASSEY], ["split", MASSEY, "--cap", "3"],
                ["module-transfer", MASSEY_MODULE, "--cap", "3"], ["trees", "--arity", "5"]]
    for argv in commands:
        runs = []
        for _ in range(2):
            code, _ = run_command(argv + ["--out", str(out)])
            assert code == 0, argv
            runs.append(out.read_bytes())
        assert runs[0] == runs[1], argv
        json.loads(runs[0])
