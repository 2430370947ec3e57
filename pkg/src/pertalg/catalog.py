"""Machine-checked catalog of identities in the completed perturbation algebra.

Each entry is data: a name, a short anchor string, and a builder returning
a list of (lhs, rhs) pairs evaluated at a given x-adic cap.  An identity
passes when every pair agrees exactly up to the cap.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from .algebra import (
    AlgebraElement,
    TensorSquareElement,
    TruncatedSeries,
    apply_phi,
    apply_rho,
    coproduct,
    differential,
    gauge_action,
    invert_series,
    series_constant,
    tensor,
    twisted_differential,
    word_key,
    xcount,
)


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    status: str
    cap: int | None
    witness: dict | None = None

    def __post_init__(self):
        if (self.status == "pass") != (self.witness is None):
            raise ValueError("status must be 'pass' exactly when no witness is given")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {"identity": self.identity_id, "status": self.status, "cap": self.cap,
                "witness": self.witness}


def first_discrepancy(lhs, rhs, cap: int) -> dict | None:
    """Lowest (x-count, word) term of lhs - rhs, or None when they agree."""
    if isinstance(lhs, TensorSquareElement) or isinstance(rhs, TensorSquareElement):
        diff = (lhs - rhs).truncate(cap)
        if diff.is_zero():
            return None
        c, left, right = min(
            ((c, l, r) for (l, r), c in diff.items()),
            key=lambda e: (xcount(e[1]) + xcount(e[2]), word_key(e[1]), word_key(e[2])))
        return {"word": f"{left or '1'}|{right or '1'}", "coeff": str(c),
                "x_count": xcount(left) + xcount(right)}
    diff = TruncatedSeries.lift(lhs, cap) - TruncatedSeries.lift(rhs, cap)
    if diff.is_zero():
        return None
    c, w = min(diff.element.terms, key=lambda e: (xcount(e[1]), word_key(e[1])))
    return {"word": w or "1", "coeff": str(c), "x_count": xcount(w)}


class Context:
    """Generators and named constants at a fixed cap (and scalar field)."""

    def __init__(self, cap: int, field: Callable[[int], object] | None = None):
        self.cap = cap
        self.field = field
        one = field(1) if field else 1
        self.one = TruncatedSeries(cap, AlgebraElement.one(one))
        self.s = TruncatedSeries(cap, AlgebraElement.from_word("s", one))
        self.t = TruncatedSeries(cap, AlgebraElement.from_word("t", one))
        self.x = TruncatedSeries(cap, AlgebraElement.from_word("x", one))
        for name in ("alpha", "beta", "alpha_inv", "beta_inv", "xi", "g", "g_inv", "k"):
            setattr(self, name, series_constant(name, cap, field))

    def word(self, letters: str) -> TruncatedSeries:
        return TruncatedSeries(cap=self.cap, elt=AlgebraElement.from_word(letters, self.one.element.coeff("")))

    def phi(self, a) -> TruncatedSeries:
        return apply_phi(a, self.cap)

    def d(self, a) -> TruncatedSeries:
        return differential(TruncatedSeries.lift(a, self.cap))

    def dx(self, a) -> TruncatedSeries:
        return twisted_differential(a, self.cap)

    def delta(self, a) -> TensorSquareElement:
        return coproduct(TruncatedSeries.lift(a, self.cap))

    def tensor(self, a, b) -> TensorSquareElement:
        return tensor(a, b, self.cap)

    @cached_property
    def phi_t(self) -> TruncatedSeries:
        return self.alpha * self.t * self.beta

    @cached_property
    def phi_s(self) -> TruncatedSeries:
        return self.alpha * self.s


@dataclass(frozen=True)
class Identity:
    identity_id: str
    anchor: str
    build: Callable[[Context], list[tuple[object, object]]] = field(repr=False)


# sample words for the transfer isomorphism check
ISO_SAMPLES = ("", "s", "t", "x", "xsx", "sxt")


def _iso_pairs(c: Context):
    pairs = []
    for w in ISO_SAMPLES:
        a = c.word(w)
        lhs = c.dx(c.alpha * c.t * a * c.t * c.beta)
        inner = twisted_differential(a, c.cap, mc=c.xi)
        rhs = c.alpha * c.t * inner * c.t * c.beta
        pairs.append((lhs, rhs))
    return pairs


def _gens(c: Context):
    return (c.s, c.t, c.x)


CATALOG: tuple[Identity, ...] = (
    Identity("E1", "alpha s = s beta", lambda c: [(c.alpha * c.s, c.s * c.beta)]),
    Identity("E2", "x alpha = beta x", lambda c: [(c.x * c.alpha, c.beta * c.x)]),
    Identity("E3", "s alpha = s", lambda c: [(c.s * c.alpha, c.s)]),
    Identity("E4", "beta s = s", lambda c: [(c.beta * c.s, c.s)]),
    Identity("E5", "t alpha = t", lambda c: [(c.t * c.alpha, c.t)]),
    Identity("E6", "beta t = t", lambda c: [(c.beta * c.t, c.t)]),
    Identity("E7", "beta alpha = alpha + beta - 1",
             lambda c: [(c.beta * c.alpha, c.alpha + c.beta - c.one)]),
    Identity("D1", "d(alpha) = (alpha t - 1) x alpha",
             lambda c: [(c.d(c.alpha), (c.alpha * c.t - c.one) * c.x * c.alpha)]),
    Identity("D2", "d(beta) = beta x (1 - t beta)",
             lambda c: [(c.d(c.beta), c.beta * c.x * (c.one - c.t * c.beta))]),
    # the sign in front of x(1+sx)^-1 s is forced: (1+xs)(1 - x alpha s) = 1
    Identity("BERG", "(1+xs)^-1 = 1 - x (1+sx)^-1 s",
             lambda c: [(c.beta, c.one - c.x * c.alpha * c.s),
                        (invert_series(c.beta_inv), c.beta),
                        (invert_series(c.alpha_inv), c.alpha)]),
    Identity("PHI-REL", "images of generators satisfy the defining relations",
             lambda c: [(c.phi_s * c.phi_s, 0 * c.one),
                        (c.phi_t * c.phi_t, c.phi_t),
                        (c.phi_s * c.phi_t, 0 * c.one),
                        (c.phi_t * c.phi_s, 0 * c.one),
                        (c.alpha_inv * c.phi(c.alpha_inv), c.one),
                        (c.phi(c.beta_inv) * c.beta_inv, c.one),
                        (c.phi(c.s), c.phi_s),
                        (c.phi(c.s), c.s * c.beta),
                        (c.phi(c.t), c.phi_t),
                        (c.phi(c.x), -c.x)]),
    Identity("PHI-INV", "phi(phi(a)) = a on generators",
             lambda c: [(c.phi(c.phi(a)), a) for a in _gens(c)]),
    Identity("PHI-COMOD", "alpha t, t beta, alpha t beta grouplike; alpha s skew-primitive",
             lambda c: [(c.delta(c.alpha * c.t), c.tensor(c.alpha * c.t, c.alpha * c.t)),
                        (c.delta(c.t * c.beta), c.tensor(c.t * c.beta, c.t * c.beta)),
                        (c.delta(c.phi_t), c.tensor(c.phi_t, c.phi_t)),
                        (c.delta(c.phi_s),
                         c.tensor(c.phi_s, c.one) + c.tensor(c.phi_t, c.phi_s))]),
    Identity("HPL", "phi d = d^x phi on generators",
             lambda c: [(c.phi(c.d(a)), c.dx(c.phi(a))) for a in _gens(c)]),
    Identity("XI-MC", "d(xi) + xi^2 = 0 and xi = t beta x t",
             lambda c: [(c.d(c.xi) + c.xi * c.xi, 0 * c.one),
                        (c.xi, c.t * c.beta * c.x * c.t)]),
    Identity("XI-PRIM", "Delta(xi) = xi (x) t + t (x) xi",
             lambda c: [(c.delta(c.xi), c.tensor(c.xi, c.t) + c.tensor(c.t, c.xi))]),
    Identity("G1", "g g^-1 = g^-1 g = 1 and g^-1 = phi(g)",
             lambda c: [(c.g * c.g_inv, c.one), (c.g_inv * c.g, c.one),
                        (c.phi(c.g), c.g_inv), (invert_series(c.g), c.g_inv)]),
    Identity("G2", "(alpha t beta) g (alpha t beta) = alpha t beta",
             lambda c: [(c.phi_t * c.g * c.phi_t, c.phi_t)]),
    Identity("G3", "t g = t beta", lambda c: [(c.t * c.g, c.t * c.beta)]),
    Identity("G4", "g^-1 t = alpha t", lambda c: [(c.g_inv * c.t, c.alpha * c.t)]),
    Identity("GAUGE", "g . x = xi", lambda c: [(gauge_action(c.g, c.x), c.xi)]),
    Identity("RHO-G", "rho(g)^-1 . x = xi",
             lambda c: [(gauge_action(invert_series(apply_rho(c.g)), c.x), c.xi),
                        (invert_series(apply_rho(c.g)),
                         c.one - c.t + c.s * c.x + c.t * c.beta)]),
    Identity("ISO", "d^x(alpha (t a t) beta) = alpha t d^xi(a) t beta", _iso_pairs),
)


def evaluate_identity(identity: Identity, cap: int, field=None, context: Context | None = None) -> IdentityReport:
    ctx = context or Context(cap, field)
    for part, (lhs, rhs) in enumerate(identity.build(ctx)):
        w = first_discrepancy(lhs, rhs, cap)
        if w is not None:
            w["part"] = part
            return IdentityReport(identity.identity_id, "fail", cap, w)
    return IdentityReport(identity.identity_id, "pass", cap)


def verify_catalog(cap: int, field=None, catalog: tuple[Identity, ...] = CATALOG) -> list[IdentityReport]:
    """Evaluate every catalog identity at x-adic cap ``cap``."""
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    ctx = Context(cap, field)
    return [evaluate_identity(ident, cap, context=ctx) for ident in catalog]
