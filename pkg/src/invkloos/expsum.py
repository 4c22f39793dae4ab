"""Exact evaluators for the character sums over finite fields.

Covered sums, all with values in Z[zeta_p, zeta_m] histograms:

* gauss_sum        G(chi) = sum_{x != 0} chi(x) psi(x)
* kloosterman_sum  the inverted n-variable Kloosterman sum S_n(chi, b)
                   over any extension F_{q^k}: the sum over the torus of
                   chi-products times psi(1/(x_1 + ... + x_{n+1})) on the
                   locus x_1 ... x_{n+1} = b, zero denominators skipped
* tn_transform     the companion sum with the product locus = 1 and b in
                   the numerator of psi; cross-checked exactly against
                   its reciprocal-parameter expression via S_n
* toric_sum        generic twisted toric exponential sum of a Laurent
                   polynomial
* e_sum            the auxiliary (n+2)-variable toric sum that rewrites
                   q S_n in closed form
* gauss_formula_sum  an independent oracle for S_n built from q^k - 1
                   Gauss-sum products instead of point enumeration

Enumeration kernels are numpy-vectorized over the last variable and are
parallel-reducible: the outermost exponent range splits into contiguous
chunks, each chunk owns a private integer histogram, and chunks merge by
addition, so results are identical integers for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .cyclotomic import SumValue
from .errors import BudgetExceeded
from .gf import FieldTable, build_field, field_maps

DEFAULT_POINT_BUDGET = 10 ** 10


@dataclass(frozen=True)
class Budget:
    """Enumeration budget: maximum number of torus points per kernel call."""
    points: int = DEFAULT_POINT_BUDGET
    force: bool = False


def check_points(npoints: int, budget: Budget | None) -> None:
    b = budget or Budget()
    if npoints > b.points and not b.force:
        raise BudgetExceeded(
            f"enumeration needs {npoints} points, over the budget {b.points}; "
            f"lower k or n, or force the run", estimate=npoints)


@dataclass(frozen=True)
class CharacterTuple:
    """Multiplicative characters as exponents against the fixed generator.

    Index 0 is the trivial character.  Over F_{q^k} each character acts
    through composition with the norm, i.e. via index j * (q^k-1)/(q-1).
    """
    indices: tuple[int, ...]

    @classmethod
    def trivial(cls, count: int) -> "CharacterTuple":
        return cls((0,) * count)

    @classmethod
    def reduced(cls, indices, q: int) -> "CharacterTuple":
        return cls(tuple(int(j) % (q - 1) for j in indices))

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def is_trivial(self) -> bool:
        return all(j == 0 for j in self.indices)

    def all_equal(self) -> bool:
        return len(set(self.indices)) == 1

    def lifted(self, q: int, ext_q: int) -> tuple[int, ...]:
        step = (ext_q - 1) // (q - 1)
        return tuple((j % (q - 1)) * step % (ext_q - 1) for j in self.indices)


@dataclass(frozen=True)
class LaurentPoly:
    """Finitely many terms (coefficient encoding, integer exponent vector)."""
    n_vars: int
    terms: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        seen = set()
        for c, e in self.terms:
            if len(e) != self.n_vars:
                raise ValueError(f"exponent vector {e} has wrong length")
            if c == 0:
                raise ValueError("zero coefficient in canonical LaurentPoly")
            if e in seen:
                raise ValueError(f"duplicate exponent vector {e}")
            seen.add(e)

    def exponents(self) -> list[tuple[int, ...]]:
        return [e for _, e in self.terms]


# ----------------------------------------------------------------------
# Gauss sums
# ----------------------------------------------------------------------

def gauss_sum(F: FieldTable, j: int) -> SumValue:
    """Exact histogram of sum_{x != 0} zeta_{q-1}^(j dlog x) zeta_p^(tr x)."""
    M = F.q - 1
    j %= M
    e = np.arange(M, dtype=np.int64)
    t = F.tr_abs[F.exp[e]].astype(np.int64)
    pos = (j * e) % M
    hist = np.zeros((F.p, M), dtype=np.int64)
    np.add.at(hist, (t, pos), 1)
    return SumValue.from_hist(F.p, hist, m=M)


# ----------------------------------------------------------------------
# the inverted-sum enumeration kernel
# ----------------------------------------------------------------------

def _tq_table(E: FieldTable, w: int) -> np.ndarray:
    """TQ[s] = tr_abs(w/s) for s != 0; sentinel value p at s = 0."""
    M, p = E.q - 1, E.p
    out = np.full(E.q, p, dtype=np.int16)
    dw = int(E.dlog[w])
    e = np.arange(M, dtype=np.int64)
    out[E.exp[e]] = E.tr_abs[E.exp[(dw + M - e) % M]]
    return out


def _pack(sd: np.ndarray, p: int) -> np.ndarray:
    s = sd[:, -1].astype(np.int64)
    for i in range(sd.shape[1] - 2, -1, -1):
        s *= p
        s += sd[:, i]
    return s


def _inverted_hist(E: FieldTable, n: int, d_last: int, w: int,
                   jidx: tuple[int, ...] | None,
                   e1_lo: int, e1_hi: int) -> np.ndarray:
    """Histogram of the inverted sum over prefixes e_1 in [e1_lo, e1_hi).

    Free variables x_1..x_n run over the torus by exponent; the dependent
    variable is x_last = exp(d_last) / (x_1 ... x_n).  Points with
    s = x_1 + ... + x_n + x_last = 0 are skipped (sentinel bucket, dropped
    by the caller).  Buckets are tr_abs(w/s) in the untwisted case, else
    (tr_abs(w/s), sum_i j_i dlog x_i + j_last dlog x_last mod q^k-1).
    """
    p, M = E.p, E.q - 1
    DIG, EXP = E.digits, E.exp
    EXP2 = np.concatenate([EXP, EXP])
    EN = np.arange(M, dtype=np.int64)
    MN = M - EN
    DXN = DIG[EXP]                      # digits of the inner variable
    TQ = _tq_table(E, w)
    twisted = jidx is not None
    if twisted:
        hist = np.zeros((p + 1) * M, dtype=np.int64)
        j_free, j_last = np.array(jidx[:n], dtype=np.int64), jidx[n]
    else:
        hist = np.zeros(p + 1, dtype=np.int64)

    def inner(dig_pre, esum, jsum):
        idx = ((d_last - esum) % M) + MN            # in [1, 2M)
        v = EXP2[idx]
        sd = DXN + DIG[v]
        sd += dig_pre
        sd %= p
        t = TQ[_pack(sd, p)]
        if not twisted:
            return np.bincount(t, minlength=p + 1)
        jv = (jsum + j_free[n - 1] * EN + j_last * idx) % M
        flat = t.astype(np.int64) * M + jv
        return np.bincount(flat, minlength=(p + 1) * M)

    if n == 1:
        # the single free variable is the vector; restrict it to the chunk
        e = np.arange(e1_lo, e1_hi, dtype=np.int64)
        idx = (d_last + M - e) % M + M              # in [M, 2M)
        v = EXP2[idx]
        sd = DIG[EXP[e]] + DIG[v]
        sd %= p
        t = TQ[_pack(sd, p)]
        if not twisted:
            hist += np.bincount(t, minlength=p + 1)
        else:
            jv = (jidx[0] * e + jidx[1] * idx) % M
            flat = t.astype(np.int64) * M + jv
            hist += np.bincount(flat, minlength=(p + 1) * M)
        return hist

    for e1 in range(e1_lo, e1_hi):
        for rest in product(range(M), repeat=n - 2):
            pre = (e1,) + rest
            dig_pre = DIG[EXP[np.array(pre, dtype=np.int64)]].sum(
                axis=0, dtype=np.int16)
            esum = sum(pre) % M
            jsum = 0
            if twisted:
                jsum = int(sum(j * e for j, e in zip(jidx, pre)) % M)
            hist += inner(dig_pre, esum, jsum)
    return hist


def _kls_chunk_worker(args):
    (p, a_ext, n, d_last, w, jidx, lo, hi) = args
    E = build_field(p, a_ext)
    return _inverted_hist(E, n, d_last, w, jidx, lo, hi)


def _run_inverted(E: FieldTable, n: int, d_last: int, w: int,
                  jidx: tuple[int, ...] | None, threads: int) -> np.ndarray:
    M = E.q - 1
    if threads <= 1 or M < 2 * threads:
        return _inverted_hist(E, n, d_last, w, jidx, 0, M)
    bounds = [M * i // threads for i in range(threads + 1)]
    argses = [(E.p, E.a, n, d_last, w, jidx, bounds[i], bounds[i + 1])
              for i in range(threads)]
    import multiprocessing as mp
    with mp.get_context("fork").Pool(threads) as pool:
        parts = pool.map(_kls_chunk_worker, argses)
    return np.sum(parts, axis=0)


def _finish_hist(E: FieldTable, hist: np.ndarray,
                 jidx: tuple[int, ...] | None) -> SumValue:
    p, M = E.p, E.q - 1
    if jidx is None:
        return SumValue.from_hist(p, hist[:p])       # drop the s = 0 sentinel
    return SumValue.from_hist(p, hist.reshape(p + 1, M)[:p], m=M)


def _validate_b(F: FieldTable, b: int) -> None:
    if not 0 < b < F.q:
        raise ValueError(f"b = {b} is not a unit of the base field (need 0 < b < {F.q})")


def kloosterman_sum(F: FieldTable, k: int, n: int, b: int,
                    chi: CharacterTuple | None = None, *,
                    exact: bool = True, threads: int = 1,
                    budget: Budget | None = None):
    """Inverted n-variable Kloosterman sum over F_{q^k}, exactly.

    Enumerates (x_1, ..., x_n) over the torus, sets
    s = x_1 + ... + x_n + b/(x_1 ... x_n), skips s = 0 and accumulates
    psi(Tr(1/s)) together with the character indices.  All-trivial chi
    takes the conductor-1 fast path (p counters).

    With exact=False a twisted sum returns the complex value accumulated
    in double precision instead of a histogram (error < points * 1e-14).
    """
    _validate_b(F, b)
    if chi is None:
        chi = CharacterTuple.trivial(n + 1)
    if len(chi) != n + 1:
        raise ValueError(f"need n+1 = {n + 1} characters, got {len(chi)}")
    maps = field_maps(F, k)
    E = maps.ext
    check_points((E.q - 1) ** n, budget)
    b_ext = int(maps.embed_tab[b])
    d_last = int(E.dlog[b_ext])
    lifted = chi.lifted(F.q, E.q)
    jidx = None if all(j == 0 for j in lifted) else lifted
    hist = _run_inverted(E, n, d_last, 1, jidx, threads)
    value = _finish_hist(E, hist, jidx)
    if not exact and jidx is not None:
        return value.embed()
    return value


def tn_transform(F: FieldTable, n: int, b: int,
                 chi: CharacterTuple | None = None, *,
                 threads: int = 1, budget: Budget | None = None) -> SumValue:
    """The product-locus-1 companion sum T_n(chi, b), computed two ways.

    Direct definition: product of the n+1 variables equals 1 and psi is
    evaluated at b/(x_1 + ... + x_{n+1}).  Also computed through
    S_n(chi, b^-(n+1)) shifted by chi_1...chi_{n+1}(b); the two exact
    values must agree or the call raises.
    """
    _validate_b(F, b)
    if chi is None:
        chi = CharacterTuple.trivial(n + 1)
    M = F.q - 1
    check_points(M ** n, budget)
    lifted = chi.lifted(F.q, F.q)
    jidx = None if all(j == 0 for j in lifted) else lifted
    hist = _run_inverted(F, n, 0, b, jidx, threads)
    direct = _finish_hist(F, hist, jidx)

    db = int(F.dlog[b])
    b_target = F.power(b, -(n + 1)) if M > 1 else 1
    via_s = kloosterman_sum(F, 1, n, b_target, chi, threads=threads,
                            budget=budget)
    if jidx is not None:
        via_s = via_s.shift(0, sum(lifted) * db % M)
    if not (direct == via_s):
        from .errors import VerificationError
        raise VerificationError(
            "transform mismatch between the direct sum and its "
            "reciprocal-parameter expression (implementation bug)")
    return direct


# ----------------------------------------------------------------------
# toric sums
# ----------------------------------------------------------------------

def _toric_chunks(M: int, nvars: int, chunk: int):
    total = M ** nvars
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        idx = np.arange(start, stop, dtype=np.int64)
        exps = []
        for _ in range(nvars):
            exps.append(idx % M)
            idx = idx // M
        yield exps


def toric_sum(F: FieldTable, k: int, f: LaurentPoly,
              chi: CharacterTuple | None = None, *,
              budget: Budget | None = None,
              chunk: int = 1 << 18) -> SumValue:
    """Twisted toric exponential sum of f over (F_{q^k}^*)^n, exactly.

    sum over the torus of prod_i chi_i(N(x_i)) * psi(Tr f(x)).
    """
    if chi is None:
        chi = CharacterTuple.trivial(f.n_vars)
    if len(chi) != f.n_vars:
        raise ValueError(f"need {f.n_vars} characters, got {len(chi)}")
    maps = field_maps(F, k)
    E = maps.ext
    p, M = E.p, E.q - 1
    check_points(M ** f.n_vars, budget)
    lifted = chi.lifted(F.q, E.q)
    twisted = any(j != 0 for j in lifted)

    coeff_dlogs = []
    vmat = []
    for c, e in f.terms:
        if not 0 < c < F.q:
            raise ValueError(f"coefficient {c} is not a unit of the base field")
        coeff_dlogs.append(int(E.dlog[maps.embed_tab[c]]))
        vmat.append(e)

    if twisted:
        hist = np.zeros((p, M), dtype=np.int64)
    else:
        hist = np.zeros(p, dtype=np.int64)
    for exps in _toric_chunks(M, f.n_vars, chunk):
        L = exps[0].shape[0]
        acc = np.zeros((L, E.a), dtype=np.int32)
        for dc, v in zip(coeff_dlogs, vmat):
            dl = np.full(L, dc, dtype=np.int64)
            for i, vi in enumerate(v):
                if vi:
                    dl += vi * exps[i]
            acc += E.digits[E.exp[dl % M]]
        acc %= p
        t = E.tr_abs[_pack(acc, p)]
        if not twisted:
            hist += np.bincount(t, minlength=p)
        else:
            jv = np.zeros(L, dtype=np.int64)
            for i, j in enumerate(lifted):
                if j:
                    jv += j * exps[i]
            flat = t.astype(np.int64) * M + (jv % M)
            hist += np.bincount(flat, minlength=p * M).reshape(p, M)
    if twisted:
        return SumValue.from_hist(p, hist, m=M)
    return SumValue.from_hist(p, hist)


def ik_laurent(F: FieldTable, n: int, b: int) -> LaurentPoly:
    """The (n+2)-variable Laurent polynomial whose toric sum rewrites the
    inverted Kloosterman sum:

        x_{n+1} (1 - x_{n+2} (x_1 + ... + x_n + b/(x_1...x_n))) + x_{n+2}
    """
    _validate_b(F, b)
    nv = n + 2
    terms = []

    def unit(*idx):
        e = [0] * nv
        for i in idx:
            e[i] = 1
        return tuple(e)

    terms.append((1, unit(n)))                       # x_{n+1}
    minus_one = F.neg(1)
    for i in range(n):
        terms.append((minus_one, unit(i, n, n + 1)))  # -x_i x_{n+1} x_{n+2}
    terms.append((F.neg(b), tuple([-1] * n + [1, 1])))
    terms.append((1, unit(n + 1)))                   # x_{n+2}
    return LaurentPoly(nv, tuple(terms))


def e_sum(F: FieldTable, n: int, b: int,
          chi: CharacterTuple | None = None, *,
          budget: Budget | None = None) -> SumValue:
    """The auxiliary (n+2)-variable toric sum E_n(chi, b).

    Twist (chi_1 conj(chi_{n+1}), ..., chi_n conj(chi_{n+1}), 1, 1); it
    satisfies q S_n = -(q-1)^n chi_1(b) + chi_1(b) E_n when all characters
    agree and q S_n = chi_{n+1}(b) E_n otherwise.
    """
    if chi is None:
        chi = CharacterTuple.trivial(n + 1)
    M = F.q - 1
    j_last = chi.indices[n]
    twist = CharacterTuple.reduced(
        [chi.indices[i] - j_last for i in range(n)] + [0, 0], F.q)
    return toric_sum(F, 1, ik_laurent(F, n, b), twist, budget=budget)


# ----------------------------------------------------------------------
# the Gauss-sum oracle
# ----------------------------------------------------------------------

def gauss_formula_parts(F: FieldTable, k: int, n: int, b: int,
                        chi: CharacterTuple | None = None, *,
                        budget: Budget | None = None
                        ) -> tuple[SumValue, SumValue]:
    """S_n(chi, b) over F_{q^k} as (main term, Gauss-product sum).

    The main term is -(q^k-1)^n / q^k * chi_1(b) when all characters are
    equal and 0 otherwise; the remainder is (1/(q^k (q^k-1))) times a sum
    over all q^k - 1 characters of products of n+3 Gauss sums.  Both
    parts are exact SumValues with denominators, so this is an oracle
    for kloosterman_sum that shares no enumeration code with it.
    """
    _validate_b(F, b)
    if chi is None:
        chi = CharacterTuple.trivial(n + 1)
    maps = field_maps(F, k)
    E = maps.ext
    p, Q = E.p, E.q
    M = Q - 1
    check_points(Q * Q, budget)
    b_ext = int(maps.embed_tab[b])
    db = int(E.dlog[b_ext])
    lifted = chi.lifted(F.q, E.q)
    jsum = sum(lifted) % M
    d_neg1 = int(E.dlog[E.neg(1)])

    cache: dict[int, SumValue] = {}

    def g(j: int) -> SumValue:
        j %= M
        if j not in cache:
            cache[j] = gauss_sum(E, j)
        return cache[j]

    acc = SumValue.zero(p, M)
    for c in range(M):
        xi = ((n + 1) * c + jsum) % M
        gbar = g(-xi)
        term = gbar * gbar
        for ji in lifted:
            term = term * g(c + ji)
        acc = acc + term.shift(0, (-c * db + xi * d_neg1) % M)
    s2 = SumValue(p, M, acc.counts, denom=Q * M)

    if chi.all_equal():
        s1 = SumValue(p, M, denom=Q)
        s1.counts[0][(lifted[0] * db) % M] = -(Q - 1) ** n
    else:
        s1 = SumValue.zero(p, M)
    return s1, s2


def gauss_formula_sum(F: FieldTable, k: int, n: int, b: int,
                      chi: CharacterTuple | None = None, *,
                      budget: Budget | None = None) -> SumValue:
    """S_n(chi, b) over F_{q^k} through the Gauss-sum closed form."""
    s1, s2 = gauss_formula_parts(F, k, n, b, chi, budget=budget)
    return s1 + s2
