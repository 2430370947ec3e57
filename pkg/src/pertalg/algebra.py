"""Symbolic engine for the perturbation algebra and its x-adic completion.

Elements are finite linear combinations of normal-form words over the
letters ``s``, ``t``, ``x`` (degrees -1, 0, +1).  Normal forms are produced
by the monomial rewriting system

    tt -> t,   ss -> 0,   st -> 0,   ts -> 0

which is terminating and confluent, so a word is in normal form exactly
when it contains none of the factors ``ss``, ``st``, ``ts``, ``tt``.

Series (elements of the completion) are stored as an element together
with a cap on the number of ``x`` letters; every operation discards words
whose x-count exceeds the cap.  Since all structure maps are filtered by
x-count, truncating a cap-N result to cap M < N equals computing at cap M.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

LETTERS = "stx"
_ZERO_PAIRS = frozenset({"ss", "st", "ts"})
_LETTER_DEGREE = {"s": -1, "t": 0, "x": 1}


class NotInvertibleError(ValueError):
    """Raised when a series or operator has no inverse."""


# ---------------------------------------------------------------------------
# words


def degree(word: str) -> int:
    return word.count("x") - word.count("s")


def xcount(word: str) -> int:
    return word.count("x")


def word_key(word: str) -> tuple[int, str]:
    """Length-lexicographic order with s < t < x."""
    return (len(word), word)


def normal_word(letters: Iterable[str]) -> str | None:
    """Rewrite a word to normal form; ``None`` means the word is zero."""
    out: list[str] = []
    for a in letters:
        if a not in _LETTER_DEGREE:
            raise ValueError(f"unknown letter {a!r}")
        if out:
            pair = out[-1] + a
            if pair in _ZERO_PAIRS:
                return None
            if pair == "tt":
                continue
        out.append(a)
    return "".join(out)


def join(u: str, v: str) -> str | None:
    """Product of two normal-form words; only the junction can rewrite."""
    if not u:
        return v
    if not v:
        return u
    pair = u[-1] + v[0]
    if pair in _ZERO_PAIRS:
        return None
    if pair == "tt":
        return u + v[1:]
    return u + v


def _inverse_scalar(c):
    if isinstance(c, int):
        return Fraction(1, c)
    return 1 / c


# ---------------------------------------------------------------------------
# elements


class AlgebraElement:
    """An element of the perturbation algebra.

    Stored as a mapping from normal-form words to nonzero coefficients.
    Instances are treated as immutable.
    """

    __slots__ = ("_c",)

    def __init__(self, terms: Mapping[str, object] | None = None):
        c = {}
        if terms:
            for w, v in terms.items():
                if v != 0:
                    c[w] = v
        self._c = c

    @classmethod
    def _raw(cls, c: dict) -> "AlgebraElement":
        obj = cls.__new__(cls)
        obj._c = c
        return obj

    @classmethod
    def from_word(cls, letters: str, coeff=1) -> "AlgebraElement":
        w = normal_word(letters)
        if w is None or coeff == 0:
            return cls()
        return cls._raw({w: coeff})

    @classmethod
    def one(cls, coeff=1) -> "AlgebraElement":
        return cls.from_word("", coeff)

    # -- inspection -------------------------------------------------------
    def items(self):
        return self._c.items()

    def coeff(self, word: str):
        return self._c.get(word, 0)

    @property
    def terms(self) -> tuple[tuple[object, str], ...]:
        """(coefficient, word) pairs in canonical word order."""
        return tuple((self._c[w], w) for w in sorted(self._c, key=word_key))

    def is_zero(self) -> bool:
        return not self._c

    def max_xcount(self) -> int:
        return max((xcount(w) for w in self._c), default=0)

    def degrees(self) -> set[int]:
        return {degree(w) for w in self._c}

    def homogeneous_parts(self) -> dict[int, "AlgebraElement"]:
        parts: dict[int, dict] = {}
        for w, c in self._c.items():
            parts.setdefault(degree(w), {})[w] = c
        return {d: AlgebraElement._raw(p) for d, p in parts.items()}

    def truncate(self, cap: int) -> "AlgebraElement":
        return AlgebraElement._raw({w: c for w, c in self._c.items() if xcount(w) <= cap})

    def component(self, n: int) -> "AlgebraElement":
        return AlgebraElement._raw({w: c for w, c in self._c.items() if xcount(w) == n})

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return NotImplemented
        other = _coerce(other)
        c = dict(self._c)
        for w, v in other._c.items():
            s = c.get(w, 0) + v
            if s == 0:
                c.pop(w, None)
            else:
                c[w] = s
        return AlgebraElement._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement._raw({w: -v for w, v in self._c.items()})

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            return NotImplemented
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def scale(self, k) -> "AlgebraElement":
        if k == 0:
            return AlgebraElement()
        return AlgebraElement._raw({w: k * v for w, v in self._c.items()})

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return NotImplemented
        if isinstance(other, AlgebraElement):
            return AlgebraElement._raw(_mul(self._c, other._c, None))
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, AlgebraElement):
            return other * self
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return NotImplemented
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        return f"AlgebraElement({format_element(self)})"

    def __str__(self):
        return format_element(self)


def _coerce(a) -> AlgebraElement:
    if isinstance(a, AlgebraElement):
        return a
    if isinstance(a, (int, Fraction)) or hasattr(a, "modulus"):
        return AlgebraElement.one(a)
    raise TypeError(f"cannot coerce {type(a).__name__} to AlgebraElement")


def _mul(a: dict, b: dict, cap: int | None) -> dict:
    out: dict = {}
    if not a or not b:
        return out
    if cap is None:
        blist = [(w, c, 0) for w, c in b.items()]
    else:
        blist = sorted(((w, c, xcount(w)) for w, c in b.items()), key=lambda e: e[2])
    for u, cu in a.items():
        xu = xcount(u) if cap is not None else 0
        for v, cv, xv in blist:
            if cap is not None and xu + xv > cap:
                break
            w = join(u, v)
            if w is None:
                continue
            s = out.get(w, 0) + cu * cv
            if s == 0:
                out.pop(w, None)
            else:
                out[w] = s
    return out


def format_element(a: AlgebraElement) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for c, w in a.terms:
        word = w or "1"
        if c == 1:
            parts.append(f"+ {word}")
        elif c == -1:
            parts.append(f"- {word}")
        else:
            neg = c < 0 if isinstance(c, (int, Fraction)) else False
            mag = -c if neg else c
            parts.append(f"{'-' if neg else '+'} {mag}" + ("" if not w else f"*{w}"))
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def element(spec: str | Mapping[str, object]) -> AlgebraElement:
    """Convenience constructor.

    ``element("sx")`` is a single word; a mapping gives word -> coefficient,
    with the empty word standing for the unit.
    """
    if isinstance(spec, str):
        return AlgebraElement.from_word(spec)
    out = AlgebraElement()
    for w, c in spec.items():
        out = out + AlgebraElement.from_word(w, c)
    return out


def normal_form(letters: Iterable[str]) -> AlgebraElement:
    w = normal_word(letters)
    return AlgebraElement() if w is None else AlgebraElement._raw({w: 1})


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b


# ---------------------------------------------------------------------------
# differential, counit, rho


@lru_cache(maxsize=None)
def _d_word(w: str) -> tuple[tuple[str, int], ...]:
    out: dict[str, int] = {}
    sign = 1
    for i, a in enumerate(w):
        pre, post = w[:i], w[i + 1:]
        if a == "s":
            for mid, c in (("", 1), ("t", -1)):
                nw = normal_word(pre + mid + post)
                if nw is not None:
                    out[nw] = out.get(nw, 0) + sign * c
        elif a == "x":
            nw = normal_word(pre + "xx" + post)
            if nw is not None:
                out[nw] = out.get(nw, 0) - sign
        if _LETTER_DEGREE[a] % 2:
            sign = -sign
    return tuple((k, v) for k, v in out.items() if v)


def _apply_word_map(a: AlgebraElement, f: Callable[[str], Iterable[tuple[str, object]]],
                    cap: int | None = None) -> dict:
    out: dict = {}
    for w, c in a.items():
        for nw, k in f(w):
            if cap is not None and xcount(nw) > cap:
                continue
            s = out.get(nw, 0) + c * k
            if s == 0:
                out.pop(nw, None)
            else:
                out[nw] = s
    return out


def differential(a):
    """Degree +1 derivation with d(s) = 1 - t, d(t) = 0, d(x) = -x^2."""
    if isinstance(a, TruncatedSeries):
        return TruncatedSeries(a.cap, AlgebraElement._raw(_apply_word_map(a.element, _d_word, a.cap)))
    return AlgebraElement._raw(_apply_word_map(a, _d_word))


def counit(a: AlgebraElement):
    total = 0
    for w, c in a.items():
        if set(w) <= {"t"}:
            total = total + c
    return total


@lru_cache(maxsize=None)
def _rho_word(w: str) -> tuple[tuple[str, int], ...]:
    # reversing a product of homogeneous letters costs sum_{i<j} |a_i||a_j|
    odd_seen = 0
    parity = 0
    for a in w:
        if _LETTER_DEGREE[a] % 2:
            parity += odd_seen
            odd_seen += 1
    sign = -1 if (parity + w.count("x")) % 2 else 1
    return ((w[::-1], sign),)


def apply_rho(a):
    """The anti-automorphism fixing s, t and sending x to -x (Koszul signs)."""
    if isinstance(a, TruncatedSeries):
        return TruncatedSeries(a.cap, AlgebraElement._raw(_apply_word_map(a.element, _rho_word)))
    return AlgebraElement._raw(_apply_word_map(a, _rho_word))


# ---------------------------------------------------------------------------
# coproduct


class TensorSquareElement:
    """Element of A (x) A stored as {(left, right): coefficient}."""

    __slots__ = ("_c",)

    def __init__(self, terms: Mapping[tuple[str, str], object] | None = None):
        self._c = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def _raw(cls, c: dict) -> "TensorSquareElement":
        obj = cls.__new__(cls)
        obj._c = c
        return obj

    def items(self):
        return self._c.items()

    @property
    def terms(self):
        keys = sorted(self._c, key=lambda k: (word_key(k[0]), word_key(k[1])))
        return tuple((self._c[k], k[0], k[1]) for k in keys)

    def is_zero(self) -> bool:
        return not self._c

    def truncate(self, cap: int) -> "TensorSquareElement":
        return TensorSquareElement._raw(
            {k: v for k, v in self._c.items() if xcount(k[0]) + xcount(k[1]) <= cap})

    def __add__(self, other: "TensorSquareElement"):
        c = dict(self._c)
        for k, v in other._c.items():
            s = c.get(k, 0) + v
            if s == 0:
                c.pop(k, None)
            else:
                c[k] = s
        return TensorSquareElement._raw(c)

    def __neg__(self):
        return TensorSquareElement._raw({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "TensorSquareElement"):
        out: dict = {}
        for (a, b), c1 in self._c.items():
            db = degree(b)
            for (c, e), c2 in other._c.items():
                left = join(a, c)
                if left is None:
                    continue
                right = join(b, e)
                if right is None:
                    continue
                sign = -1 if (db * degree(c)) % 2 else 1
                k = (left, right)
                s = out.get(k, 0) + sign * c1 * c2
                if s == 0:
                    out.pop(k, None)
                else:
                    out[k] = s
        return TensorSquareElement._raw(out)

    def __eq__(self, other):
        if not isinstance(other, TensorSquareElement):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        if not self._c:
            return "TensorSquareElement(0)"
        body = " + ".join(f"{c}*{l or '1'}|{r or '1'}" for c, l, r in self.terms)
        return f"TensorSquareElement({body})"


def tensor(a, b, cap: int | None = None) -> TensorSquareElement:
    ea = a.element if isinstance(a, TruncatedSeries) else a
    eb = b.element if isinstance(b, TruncatedSeries) else b
    out = {}
    for u, cu in ea.items():
        xu = xcount(u)
        for v, cv in eb.items():
            if cap is not None and xu + xcount(v) > cap:
                continue
            out[(u, v)] = cu * cv
    return TensorSquareElement._raw(out)


_DELTA_LETTER = {
    "s": {("s", ""): 1, ("t", "s"): 1},
    "t": {("t", "t"): 1},
    "x": {("x", ""): 1, ("", "x"): 1},
}


@lru_cache(maxsize=None)
def _delta_word(w: str) -> tuple[tuple[tuple[str, str], int], ...]:
    if not w:
        return ((("", ""), 1),)
    prev = TensorSquareElement._raw(dict(_delta_word(w[:-1])))
    res = prev * TensorSquareElement._raw(dict(_DELTA_LETTER[w[-1]]))
    return tuple(res.items())


def coproduct(a) -> TensorSquareElement:
    """Multiplicative extension of the coproduct on generators.

    For a series the result lives in the completed tensor square; it is
    exact up to total x-count ``a.cap`` because the coproduct preserves it.
    """
    ea = a.element if isinstance(a, TruncatedSeries) else a
    out: dict = {}
    for w, c in ea.items():
        for k, v in _delta_word(w):
            s = out.get(k, 0) + c * v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
    return TensorSquareElement._raw(out)


# ---------------------------------------------------------------------------
# truncated series


class TruncatedSeries:
    """An element of the completion, known up to x-count ``cap``."""

    __slots__ = ("cap", "element", "label")

    def __init__(self, cap: int, elt: AlgebraElement | None = None, label: str | None = None):
        if cap < 0:
            raise ValueError("cap must be nonnegative")
        self.cap = cap
        elt = elt if elt is not None else AlgebraElement()
        if elt.max_xcount() > cap:
            elt = elt.truncate(cap)
        self.element = elt
        self.label = label

    @classmethod
    def lift(cls, a, cap: int) -> "TruncatedSeries":
        if isinstance(a, TruncatedSeries):
            if a.cap < cap:
                raise ValueError(f"series known only up to cap {a.cap}")
            return a.truncate(cap)
        return cls(cap, _coerce(a))

    def component(self, n: int) -> AlgebraElement:
        return self.element.component(n)

    @property
    def components(self) -> dict[int, AlgebraElement]:
        return {n: self.component(n) for n in range(self.cap + 1)}

    def truncate(self, cap: int) -> "TruncatedSeries":
        if cap > self.cap:
            raise ValueError(f"cannot extend a cap-{self.cap} series to cap {cap}")
        return TruncatedSeries(cap, self.element.truncate(cap), self.label)

    def is_zero(self) -> bool:
        return self.element.is_zero()

    def _pair(self, other) -> tuple[int, AlgebraElement]:
        if isinstance(other, TruncatedSeries):
            cap = min(self.cap, other.cap)
            return cap, other.element
        return self.cap, _coerce(other)

    def __add__(self, other):
        cap, o = self._pair(other)
        return TruncatedSeries(cap, self.element.truncate(cap) + o.truncate(cap))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.cap, -self.element)

    def __sub__(self, other):
        cap, o = self._pair(other)
        return TruncatedSeries(cap, self.element.truncate(cap) - o.truncate(cap))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (TruncatedSeries, AlgebraElement)):
            return TruncatedSeries(self.cap, self.element.scale(other))
        cap, o = self._pair(other)
        return TruncatedSeries(cap, AlgebraElement._raw(_mul(self.element._c, o._c, cap)))

    def __rmul__(self, other):
        if isinstance(other, AlgebraElement):
            return TruncatedSeries(self.cap, AlgebraElement._raw(
                _mul(other._c, self.element._c, self.cap)))
        return TruncatedSeries(self.cap, self.element.scale(other))

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.cap == other.cap and self.element == other.element
        if isinstance(other, AlgebraElement):
            return self.element == other.truncate(self.cap)
        return NotImplemented

    def __hash__(self):
        return hash((self.cap, self.element))

    def __repr__(self):
        return f"TruncatedSeries(cap={self.cap}, {format_element(self.element)})"


def _as_series(a, cap: int | None) -> TruncatedSeries:
    if isinstance(a, TruncatedSeries):
        return a if cap is None or cap == a.cap else a.truncate(cap)
    if cap is None:
        raise ValueError("cap required for an exact element")
    return TruncatedSeries(cap, _coerce(a))


def _unit_inverse_h(u0: AlgebraElement) -> AlgebraElement:
    """Inverse of a + b t + c s in the x-free subalgebra."""
    if any(w not in ("", "s", "t") for w, _ in u0.items()):
        raise NotInvertibleError("constant term is not in the x-free subalgebra")
    a, b, c = u0.coeff(""), u0.coeff("t"), u0.coeff("s")
    if a == 0 or a + b == 0:
        raise NotInvertibleError(f"constant term {format_element(u0)} is not a unit")
    p = _inverse_scalar(a)
    q = -b * p * _inverse_scalar(a + b)
    r = -c * p * p
    return element({"": p, "t": q, "s": r})


def invert_series(u: TruncatedSeries) -> TruncatedSeries:
    """Two-sided inverse up to the cap of ``u``."""
    u0 = u.component(0)
    inv0 = TruncatedSeries(u.cap, _unit_inverse_h(u0))
    rest = u - u0
    # v = sum_n (-inv0 * rest)^n * inv0 ; rest raises x-count so this terminates
    step = -(inv0 * rest)
    term = inv0
    total = inv0
    for _ in range(u.cap):
        term = step * term
        if term.is_zero():
            break
        total = total + term
    return total


def ssum(*terms) -> TruncatedSeries:
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


# ---------------------------------------------------------------------------
# named constants

SERIES_NAMES = ("alpha", "beta", "alpha_inv", "beta_inv", "xi", "g", "g_inv", "k")


def _geometric(base: AlgebraElement, cap: int, one) -> TruncatedSeries:
    # sum_n (-base)^n, base has x-count one
    term = TruncatedSeries(cap, AlgebraElement.one(one))
    total = term
    neg = TruncatedSeries(cap, -base)
    for _ in range(cap):
        term = term * neg
        total = total + term
    return total


@lru_cache(maxsize=None)
def _constants(cap: int, field: Callable[[int], object] | None) -> dict[str, TruncatedSeries]:
    one = field(1) if field else 1
    s = AlgebraElement.from_word("s", one)
    t = AlgebraElement.from_word("t", one)
    x = AlgebraElement.from_word("x", one)
    unit = AlgebraElement.one(one)
    alpha = _geometric(s * x, cap, one)
    beta = _geometric(x * s, cap, one)
    alpha_inv = TruncatedSeries(cap, unit + s * x)
    beta_inv = TruncatedSeries(cap, unit + x * s)
    xi = (t * x) * alpha * t
    k = unit + t - alpha * t
    g = k * beta
    g_inv = beta_inv * (unit - t + alpha * t)
    out = dict(alpha=alpha, beta=beta, alpha_inv=alpha_inv, beta_inv=beta_inv,
               xi=xi, g=g, g_inv=g_inv, k=k)
    return {n: TruncatedSeries(v.cap, v.element, n) for n, v in out.items()}


def series_constant(name: str, cap: int, field: Callable[[int], object] | None = None) -> TruncatedSeries:
    """One of the distinguished elements of the completion, truncated at ``cap``.

    ``field`` optionally maps integers into another scalar field (for
    example :class:`pertalg.scalars.GF`); the default is exact integers and
    rationals.
    """
    if name not in SERIES_NAMES:
        raise KeyError(f"unknown series constant {name!r}; expected one of {SERIES_NAMES}")
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    return _constants(cap, field)[name]


# ---------------------------------------------------------------------------
# phi, twisted differential, gauge action


@lru_cache(maxsize=None)
def _phi_word(w: str, cap: int) -> AlgebraElement:
    if not w:
        return AlgebraElement.one()
    head = _phi_word(w[:-1], cap)
    c = _constants(cap, None)
    a = w[-1]
    if a == "s":
        img = c["alpha"] * AlgebraElement.from_word("s")
    elif a == "t":
        img = c["alpha"] * AlgebraElement.from_word("t") * c["beta"]
    else:
        img = TruncatedSeries(cap, AlgebraElement.from_word("x", -1))
    return (TruncatedSeries(cap, head) * img).element


def apply_phi(a, cap: int | None = None) -> TruncatedSeries:
    """The involutive automorphism with s -> alpha s, t -> alpha t beta, x -> -x."""
    ser = _as_series(a, cap)
    out = AlgebraElement()
    acc: dict = {}
    for w, c in ser.element.items():
        for nw, k in _phi_word(w, ser.cap).items():
            s = acc.get(nw, 0) + c * k
            if s == 0:
                acc.pop(nw, None)
            else:
                acc[nw] = s
    out = AlgebraElement._raw(acc)
    return TruncatedSeries(ser.cap, out)


def graded_commutator(a, b, cap: int):
    """[a, b] = ab - (-1)^{|a||b|} ba, extended bilinearly over degree parts."""
    sa, sb = _as_series(a, cap), _as_series(b, cap)
    total = TruncatedSeries(cap)
    for da, pa in sa.element.homogeneous_parts().items():
        for db, pb in sb.element.homogeneous_parts().items():
            A, B = TruncatedSeries(cap, pa), TruncatedSeries(cap, pb)
            sign = -1 if (da * db) % 2 else 1
            total = total + A * B - (B * A) * sign
    return total


def twisted_differential(a, cap: int | None = None, mc=None) -> TruncatedSeries:
    """d^x(a) = d(a) + [x, a]; ``mc`` replaces x by another MC element."""
    ser = _as_series(a, cap)
    x = AlgebraElement.from_word("x") if mc is None else mc
    return differential(ser) + graded_commutator(x, ser, ser.cap)


def gauge_action(gamma, x_elt, cap: int | None = None) -> TruncatedSeries:
    """gamma . x = gamma x gamma^{-1} - d(gamma) gamma^{-1}."""
    g = _as_series(gamma, cap)
    cap = g.cap
    xe = _as_series(x_elt, cap)
    g_inv = invert_series(g)
    return g * xe * g_inv - differential(g) * g_inv
