"""Finite fields F_{p^a} and their extensions as flat lookup tables.

An element of F_{p^a} is encoded as the integer in [0, q) whose base-p
digits are the coefficients of its residue polynomial, constant term
first; 0 encodes the zero element.  Construction is deterministic: the
modulus is the lexicographically smallest monic irreducible of degree a
over Z/p (coefficients compared from the constant term upward) and the
generator g is the generating element with the smallest integer
encoding.

Multiplication, inversion and powers go through exp/dlog tables, so
per-element cost inside enumeration kernels is a handful of table
lookups; addition goes through a precomputed digit matrix so it
vectorizes with numpy.  Tables are immutable after construction and safe
to share across any number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import BudgetExceeded

#: default cap on table size (number of field elements)
TABLE_CAP = 1 << 26


# ----------------------------------------------------------------------
# dense polynomial arithmetic over Z/p (little-endian coefficient lists),
# used only while bootstrapping the tables
# ----------------------------------------------------------------------

def _ptrim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmulmod(f: list[int], g: list[int], mod: list[int], p: int) -> list[int]:
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] = (out[i + j] + fi * gj) % p
    return _pmodred(out, mod, p)


def _pmodred(f: list[int], mod: list[int], p: int) -> list[int]:
    # mod is monic
    f = list(f)
    d = len(mod) - 1
    for i in range(len(f) - 1, d - 1, -1):
        c = f[i]
        if c:
            f[i] = 0
            for j in range(d):
                f[i - d + j] = (f[i - d + j] - c * mod[j]) % p
    return _ptrim(f)


def _ppowmod(f: list[int], e: int, mod: list[int], p: int) -> list[int]:
    out = [1]
    base = _pmodred(f, mod, p)
    while e:
        if e & 1:
            out = _pmulmod(out, base, mod, p)
        base = _pmulmod(base, base, mod, p)
        e >>= 1
    return out


def _pgcd(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = _ptrim(list(f)), _ptrim(list(g))
    while g:
        inv_lc = pow(g[-1], -1, p)
        r = list(f)
        while len(r) >= len(g) and r:
            c = (r[-1] * inv_lc) % p
            shift = len(r) - len(g)
            for j, gj in enumerate(g):
                r[shift + j] = (r[shift + j] - c * gj) % p
            _ptrim(r)
        f, g = g, r
    return f


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        if n % d == 0:
            return n == d
    d = 37
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _psub(f: list[int], g: list[int], p: int) -> list[int]:
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p
           for i in range(n)]
    return _ptrim(out)


def _is_irreducible(mod: list[int], p: int) -> bool:
    # x^(p^a) == x mod f, and gcd(x^(p^(a/l)) - x, f) = 1 for prime l | a
    a = len(mod) - 1
    if a == 1:
        return True
    x = [0, 1]
    xq = _ppowmod(x, p ** a, mod, p)
    if _psub(xq, x, p):
        return False
    for ell in prime_factors(a):
        xd = _ppowmod(x, p ** (a // ell), mod, p)
        if len(_pgcd(mod, _psub(xd, x, p), p)) != 1:
            return False
    return True


def smallest_irreducible(p: int, a: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree a over Z/p.

    Candidates x^a + c_{a-1} x^{a-1} + ... + c_0 are ordered by the tuple
    (c_0, c_1, ..., c_{a-1}).
    """
    if a == 1:
        return (0, 1)  # x itself: F_p[x]/(x) = F_p
    for coeffs in product(range(p), repeat=a):
        mod = list(coeffs) + [1]
        if coeffs[0] != 0 and _is_irreducible(mod, p):
            return tuple(mod)
    raise AssertionError("no irreducible found (unreachable)")


# ----------------------------------------------------------------------
# field tables
# ----------------------------------------------------------------------

class FieldTable:
    """F_{p^a} with exp/dlog, inverse, absolute-trace and digit tables.

    Public arrays (all numpy, immutable by convention):
      exp      (q-1,) exp[e] = g^e
      dlog     (q,)   dlog[exp[e]] = e, dlog[0] = -1
      inv      (q,)   multiplicative inverse, inv[0] = 0
      tr_abs   (q,)   absolute trace to Z/p
      digits   (q, a) base-p digit matrix (coefficient vectors)
    """

    def __init__(self, p: int, a: int, modulus: tuple[int, ...]):
        self.p = p
        self.a = a
        self.q = p ** a
        self.modulus = modulus
        q, mlist = self.q, list(modulus)
        m_order = q - 1

        # generator: smallest encoding whose order is exactly q-1
        rad = prime_factors(m_order) if m_order > 1 else []
        g = None
        for cand in range(1, q):
            cpoly = self._int_to_poly(cand)
            if all(_ptrim([c % p for c in _ppowmod(cpoly, m_order // r, mlist, p)]) != [1]
                   for r in rad):
                g = cand
                break
        assert g is not None
        self.g = g

        exp = np.zeros(max(m_order, 1), dtype=np.int64)
        dlog = np.full(q, -1, dtype=np.int64)
        val = [1]
        gpoly = self._int_to_poly(g)
        for e in range(m_order):
            enc = self._poly_to_int(val)
            exp[e] = enc
            dlog[enc] = e
            val = _pmulmod(val, gpoly, mlist, p)
        assert self._poly_to_int(val) == 1, "generator order mismatch"
        self.exp = exp
        self.dlog = dlog

        inv = np.zeros(q, dtype=np.int64)
        if m_order >= 1:
            idx = np.arange(m_order)
            inv[exp[idx]] = exp[(m_order - idx) % max(m_order, 1)]
        self.inv = inv

        # digit matrix and packing powers
        digits = np.zeros((q, a), dtype=np.int16)
        rem = np.arange(q, dtype=np.int64)
        for i in range(a):
            digits[:, i] = rem % p
            rem //= p
        self.digits = digits
        self._pows = np.array([p ** i for i in range(a)], dtype=np.int64)

        # absolute trace on the power basis: tr(t^j) = sum_i (t^j)^(p^i)
        tr_basis = np.zeros(a, dtype=np.int64)
        for j in range(a):
            acc = [0]
            y = _pmodred([0] * j + [1], mlist, p)
            for _ in range(a):
                acc = _ptrim([((acc[i] if i < len(acc) else 0)
                               + (y[i] if i < len(y) else 0)) % p
                              for i in range(max(len(acc), len(y), 1))])
                y = _ppowmod(y, p, mlist, p)
            assert len(acc) <= 1, "trace of basis element not in prime field"
            tr_basis[j] = acc[0] if acc else 0
        self.tr_abs = ((digits.astype(np.int64) @ tr_basis) % p).astype(np.int16)

    # -- encoding helpers ------------------------------------------------

    def _int_to_poly(self, x: int) -> list[int]:
        out = []
        while x:
            out.append(x % self.p)
            x //= self.p
        return out

    def _poly_to_int(self, f: list[int]) -> int:
        return sum(c % self.p * self.p ** i for i, c in enumerate(f))

    def element_str(self, x: int) -> str:
        if self.a == 1:
            return str(x)
        terms = []
        for i, c in enumerate(self._int_to_poly(x)):
            if c:
                terms.append(f"{c}" if i == 0 else
                             (f"t^{i}" if c == 1 else f"{c}*t^{i}"))
        return "+".join(terms) if terms else "0"

    def modulus_str(self) -> str:
        def mono(i, c):
            if i == 0:
                return f"{c}"
            x = "x" if i == 1 else f"x^{i}"
            return x if c == 1 else f"{c}*{x}"
        parts = [mono(self.a, 1)]
        for i in range(self.a - 1, -1, -1):
            if self.modulus[i]:
                parts.append(mono(i, self.modulus[i]))
        return "+".join(parts)

    # -- arithmetic (scalars or numpy arrays) ----------------------------

    def add(self, x, y):
        if isinstance(x, (int, np.integer)) and isinstance(y, (int, np.integer)):
            d = (self.digits[x].astype(np.int64) + self.digits[y]) % self.p
            return int(d @ self._pows)
        d = (self.digits[x].astype(np.int64) + self.digits[y]) % self.p
        return d @ self._pows

    def neg(self, x):
        d = (-self.digits[x].astype(np.int64)) % self.p
        if isinstance(x, (int, np.integer)):
            return int(d @ self._pows)
        return d @ self._pows

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        m = self.q - 1
        if isinstance(x, (int, np.integer)) and isinstance(y, (int, np.integer)):
            if x == 0 or y == 0:
                return 0
            return int(self.exp[(self.dlog[x] + self.dlog[y]) % m])
        x = np.asarray(x)
        y = np.asarray(y)
        nz = (x != 0) & (y != 0)
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        e = (self.dlog[x] + self.dlog[y]) % m
        np.copyto(out, self.exp[e], where=nz)
        return out

    def power(self, x: int, e: int) -> int:
        m = self.q - 1
        if x == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 has no negative powers")
            return 0
        return int(self.exp[(int(self.dlog[x]) * e) % m])

    def invert(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 is not invertible")
        return int(self.inv[x])

    def __repr__(self):
        return f"FieldTable(p={self.p}, a={self.a}, modulus={self.modulus_str()}, g={self.g})"


_FIELDS: dict[tuple[int, int], FieldTable] = {}


def build_field(p: int, a: int, cap: int = TABLE_CAP) -> FieldTable:
    """Construct (and cache) F_{p^a}.

    Deterministic: lex-smallest irreducible modulus, smallest generator.
    Refuses when p^a exceeds the table cap, reporting the memory that the
    tables would need.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if a < 1:
        raise ValueError(f"extension degree must be >= 1, got {a}")
    key = (p, a)
    if key in _FIELDS:
        return _FIELDS[key]
    q = p ** a
    if q > cap:
        need = q * (8 * 3 + 2 * (a + 1)) // (1 << 20)
        raise BudgetExceeded(
            f"field F_{p}^{a} has {q} elements, over the table cap {cap} "
            f"(tables would need ~{need} MiB); raise cap= to override",
            estimate=q)
    field = FieldTable(p, a, smallest_irreducible(p, a))
    _FIELDS[key] = field
    return field


# ----------------------------------------------------------------------
# extensions F_{q^k} / F_q
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionMaps:
    """Tables for the extension F_{q^k} over F_q.

    tr_rel(x)  = x + x^q + ... + x^(q^(k-1))  (values in the base field)
    norm_rel(x) = x^((q^k-1)/(q-1))
    embed      = the unique-up-to-conjugacy ring embedding, pinned to the
                 smallest root of the base generator's minimal polynomial
    """
    base: FieldTable
    ext: FieldTable
    k: int
    embed_tab: np.ndarray
    tr_rel_tab: np.ndarray
    norm_rel_tab: np.ndarray

    def embed(self, y):
        return self.embed_tab[y]

    def tr_rel(self, x):
        return self.tr_rel_tab[x]

    def norm_rel(self, x):
        return self.norm_rel_tab[x]


_MAPS: dict[tuple[int, int, int], ExtensionMaps] = {}


def field_maps(base: FieldTable, k: int, cap: int = TABLE_CAP) -> ExtensionMaps:
    """Build F_{q^k} over the given base together with embed/trace/norm tables."""
    if k < 1:
        raise ValueError("k must be >= 1")
    key = (base.p, base.a, k)
    if key in _MAPS:
        return _MAPS[key]
    p, q = base.p, base.q
    if k == 1:
        ident = np.arange(q, dtype=np.int64)
        maps = ExtensionMaps(base, base, 1, ident, ident.copy(), ident.copy())
        _MAPS[key] = maps
        return maps
    ext = build_field(p, base.a * k, cap=cap)
    Q, M = ext.q, ext.q - 1
    s = M // (q - 1)

    # embed: send the base generator to the smallest root of its minimal
    # polynomial over Z/p inside the unique subfield of order q
    if base.a == 1:
        embed_tab = np.arange(q, dtype=np.int64)  # prime subfield is canonical
    else:
        minpoly = [1]  # over the base field, coefficients are packed scalars
        for i in range(base.a):
            conj = base.power(base.g, pow(p, i, q - 1))
            # multiply by (x - conj)
            new = [0] * (len(minpoly) + 1)
            for d, c in enumerate(minpoly):
                new[d + 1] = base.add(new[d + 1], c)
                new[d] = base.add(new[d], base.mul(c, base.neg(conj)))
            minpoly = new
        coeffs = []
        for c in minpoly:
            assert c < p, "minimal polynomial has a non-prime-field coefficient"
            coeffs.append(int(c))
        root = None
        for t in range(q - 1):
            cand = int(ext.exp[(t * s) % M])
            acc = 0
            for c in reversed(coeffs):
                acc = ext.add(ext.mul(acc, cand), c)
            if acc == 0 and (root is None or cand < root):
                root = cand
        assert root is not None, "base generator has no root in the extension"
        dh = int(ext.dlog[root])
        embed_tab = np.zeros(q, dtype=np.int64)
        e = np.arange(q - 1, dtype=np.int64)
        embed_tab[base.exp[e]] = ext.exp[(e * dh) % M]

    iemb = np.full(Q, -1, dtype=np.int64)
    iemb[embed_tab] = np.arange(q)

    ds = np.arange(M, dtype=np.int64)
    acc = np.zeros((M, ext.a), dtype=np.int64)
    for i in range(k):
        acc += ext.digits[ext.exp[(ds * pow(q, i, M)) % M]]
    acc %= p
    packed = acc @ ext._pows
    tr_rel_tab = np.zeros(Q, dtype=np.int64)
    tr_rel_tab[ext.exp[ds]] = iemb[packed]
    assert (tr_rel_tab >= 0).all(), "relative trace escaped the base field"

    norm_rel_tab = np.zeros(Q, dtype=np.int64)
    norm_rel_tab[ext.exp[ds]] = iemb[ext.exp[(ds * s) % M]]
    assert (norm_rel_tab >= 0).all(), "relative norm escaped the base field"

    maps = ExtensionMaps(base, ext, k, embed_tab, tr_rel_tab, norm_rel_tab)
    _MAPS[key] = maps
    return maps
