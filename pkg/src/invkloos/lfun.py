"""L-function of the untwisted inverted Kloosterman sums.

The generating function exp(sum_k S_k T^k / k) of the sums over the
extension tower F_{q^k} is rational; its interesting part is a degree-2n
polynomial P(T) = prod (1 - alpha_i T).  Reconstruction path:

  1. power sums: S*_k = q^k S_{k,n}(b) + (q^k - 1)^n, exact in Z[zeta_p],
     for k = 1..2n (from the conductor-1 enumeration histograms);
  2. sign-normalize to root power sums P_k = (-1)^n S*_k and subtract the
     two known trivial reciprocal roots 1 and q;
  3. Newton identities give the elementary symmetric functions of the
     remaining 2n roots beta_i, hence prod (1 - beta_i T);
  4. rescale T -> T/q (alpha_i = beta_i / q) and assert integrality.

The q-adic Newton polygon of P and the complex magnitudes of its
reciprocal roots implement the slope / weight checks; held-out power
sums (k > 2n compared against fresh enumeration) validate the assembled
rational function end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cyclotomic import CycloRational, reduce_mod_phi
from .errors import DegenerateError, VerificationError
from .expsum import Budget, kloosterman_sum
from .gf import FieldTable


@dataclass
class LFactorization:
    """Factorization data for the L-function of S_{k,n}(b).

    L^sign = prod_{(e, m) in trivial_part} (1 - q^e T)^m * P(T)
    with sign = (-1)^(n+1); P has constant term 1 and degree 2n.
    """
    n: int
    q: int
    p: int
    b: int | None
    sign: int
    P_coeffs: tuple[CycloRational, ...]
    np_points: tuple[tuple[int, Fraction], ...]
    np_vertices: tuple[tuple[int, Fraction], ...]
    slopes: tuple[Fraction, ...]
    coefficients_rational: bool
    trivial_part: tuple[tuple[int, int], ...] | None = None
    complex_roots: tuple[complex, ...] | None = None


@dataclass
class HeldoutResult:
    k: int
    predicted: CycloRational
    observed: CycloRational
    match: bool


def power_sums(F: FieldTable, n: int, b: int, K: int, *,
               threads: int = 1, budget: Budget | None = None
               ) -> list[CycloRational]:
    """S*_k = q^k S_{k,n}(b) + (q^k - 1)^n for k = 1..K, exact in Z[zeta_p].

    Refuses when p | n+1: the facet determinants +-(n+1) vanish mod p, the
    associated Laurent polynomial degenerates, and the degree-2n shape of
    the nontrivial factor is no longer guaranteed.
    """
    if (n + 1) % F.p == 0:
        raise DegenerateError(
            f"p = {F.p} divides n+1 = {n + 1}: the reduction to a "
            "nondegenerate toric sum fails and the L-function degree "
            "claims do not apply")
    out = []
    for k in range(1, K + 1):
        hist = kloosterman_sum(F, k, n, b, threads=threads, budget=budget)
        s_k = reduce_mod_phi(hist)
        out.append(F.q ** k * s_k + (F.q ** k - 1) ** n)
    return out


def newton_to_elementary(ps: list[CycloRational]) -> list[CycloRational]:
    """Elementary symmetric functions from power sums.

    e_k = (1/k) sum_{i=1..k} (-1)^(i-1) e_{k-i} p_i, e_0 = 1, exact.
    """
    if not ps:
        return []
    p = ps[0].p
    es = [CycloRational.one(p)]
    for k in range(1, len(ps) + 1):
        acc = CycloRational.zero(p)
        for i in range(1, k + 1):
            term = es[k - i] * ps[i - 1]
            acc = acc + term if i % 2 == 1 else acc - term
        es.append(acc / k)
    return es[1:]


def elementary_to_power(es: list[CycloRational], K: int) -> list[CycloRational]:
    """Power sums p_1..p_K of the roots with elementary symmetric es."""
    if K == 0:
        return []
    p = es[0].p
    d = len(es)
    ps: list[CycloRational] = []
    for k in range(1, K + 1):
        acc = CycloRational.zero(p)
        for i in range(1, min(k, d) + 1):
            if k - i >= 1:
                acc = acc + es[i - 1] * ps[k - i - 1] * ((-1) ** (i - 1))
        if k <= d:
            acc = acc + es[k - 1] * ((-1) ** (k - 1) * k)
        ps.append(acc)
    return ps


def lower_hull(points: list[tuple[int, Fraction]]
               ) -> list[tuple[int, Fraction]]:
    """Lower convex hull of points with distinct integer abscissae."""
    pts = sorted(points)
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            # pop if hull[-1] lies on or above segment hull[-2] -> pt
            if (y1 - y0) * (pt[0] - x0) >= (pt[1] - y0) * (x1 - x0):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


@dataclass
class NewtonPolygon:
    points: tuple[tuple[int, Fraction], ...]
    vertices: tuple[tuple[int, Fraction], ...]
    slopes: tuple[Fraction, ...]


def newton_polygon(coeffs, q: int) -> NewtonPolygon:
    """q-adic Newton polygon of sum a_k T^k with a_0 = 1.

    Lower convex hull of (k, ord_q a_k), zero coefficients skipped; the
    slope multiset carries horizontal-length multiplicities.
    """
    pts = []
    for k, c in enumerate(coeffs):
        o = c.ord_q(q) if isinstance(c, CycloRational) else Fraction(c)
        if o is not math.inf:
            pts.append((k, o))
    if not pts or pts[0] != (0, Fraction(0)):
        raise ValueError("constant term must be 1 (ord 0 at index 0)")
    hull = lower_hull(pts)
    slopes: list[Fraction] = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        s = Fraction(y1 - y0, x1 - x0)
        slopes.extend([s] * (x1 - x0))
    return NewtonPolygon(tuple(pts), tuple(hull), tuple(slopes))


def strip_trivial_roots(star: list[CycloRational], n: int, q: int, *,
                        b: int | None = None) -> LFactorization:
    """Remove the trivial reciprocal roots 1 and q and solve for P(T).

    star must cover k = 1..2n.  Root power sums are P_k = (-1)^n S*_k;
    after subtracting 1^k + q^k the Newton identities yield the degree-2n
    polynomial in the beta_i, and T -> T/q rescales to the alpha_i.
    Raises when any rescaled coefficient fails to be integral (a sign
    convention or precision bug, never data).
    """
    if len(star) < 2 * n:
        raise ValueError(f"need power sums for k = 1..{2 * n}")
    p = star[0].p
    sgn = (-1) ** n
    bk = [sgn * star[k - 1] - 1 - q ** k for k in range(1, 2 * n + 1)]
    es = newton_to_elementary(bk)
    coeffs = [CycloRational.one(p)]
    for k in range(1, 2 * n + 1):
        c = es[k - 1] * ((-1) ** k)          # coefficient of T^k in prod(1 - beta T)
        a = c / (q ** k)                     # alpha_i = beta_i / q
        if not a.is_integral():
            raise VerificationError(
                f"coefficient of T^{k} is not integral: {a!r} "
                "(sign convention or reconstruction bug)")
        coeffs.append(a)
    npg = newton_polygon(coeffs, q)
    return LFactorization(
        n=n, q=q, p=p, b=b, sign=(-1) ** (n + 1),
        P_coeffs=tuple(coeffs),
        np_points=npg.points, np_vertices=npg.vertices, slopes=npg.slopes,
        coefficients_rational=all(c.is_rational() for c in coeffs))


def assemble_lfunction(lf: LFactorization, n: int, q: int) -> LFactorization:
    """Attach the trivial factor list: (1-T)^(n+1) and the alternating
    binomial tower of (1 - q^(j-1) T) for j = 2..n, as exponents of q with
    signed multiplicities in L^sign."""
    trivial = [(0, n + 1)]
    for j in range(2, n + 1):
        trivial.append((j - 1, math.comb(n, j) * (-1) ** (j - 1)))
    lf.trivial_part = tuple(trivial)
    return lf


def complex_weights(coeffs, *, residual_tol: float = 1e-6
                    ) -> tuple[list[float], list[complex]]:
    """Magnitudes (sorted) and values of the complex reciprocal roots.

    Root finding at double precision on the embedded polynomial; degrees
    here are at most 12 so the companion-matrix roots are reliable, but an
    evaluation residual is still checked.
    """
    emb = [complex(c.embed()) if isinstance(c, CycloRational) else complex(c)
           for c in coeffs]
    deg = len(emb) - 1
    if deg > 12:
        raise ValueError("degree above the double-precision comfort zone (12)")
    if deg == 0:
        return [], []
    roots = np.roots(emb[::-1])
    scale = max(abs(c) for c in emb)
    for r in roots:
        res = abs(sum(c * r ** k for k, c in enumerate(emb)))
        if res > residual_tol * scale * max(1.0, abs(r)) ** deg:
            raise ArithmeticError(
                f"ill-conditioned root cluster: residual {res:.2e} at {r}")
    alphas = [1 / r for r in roots]
    return sorted(abs(a) for a in alphas), list(alphas)


def predicted_power_sum(lf: LFactorization, k: int) -> CycloRational:
    """S_k implied by the assembled rational function, exactly.

    From -T d/dT log: S_k = -sign (sum_r m_r q^(e_r k) + sum_i alpha_i^k),
    with the alpha power sums taken from P's coefficients by Newton's
    identities.
    """
    assert lf.trivial_part is not None, "assemble_lfunction first"
    p = lf.P_coeffs[0].p
    es = [lf.P_coeffs[i] * ((-1) ** i) for i in range(1, len(lf.P_coeffs))]
    psums = elementary_to_power(es, k)
    acc = psums[k - 1] if k >= 1 else CycloRational.zero(p)
    for e, m in lf.trivial_part:
        acc = acc + m * lf.q ** (e * k)
    return acc * (-lf.sign)


def heldout_check(lf: LFactorization, F: FieldTable, n: int, b: int,
                  extra: list[int], *, threads: int = 1,
                  budget: Budget | None = None) -> list[HeldoutResult]:
    """Compare predicted S_k against fresh enumeration for held-out k.

    Exact comparison in Z[zeta_p]; any mismatch raises, since this is the
    strongest end-to-end correctness signal of the whole pipeline.
    """
    out = []
    for k in extra:
        predicted = predicted_power_sum(lf, k)
        hist = kloosterman_sum(F, k, n, b, threads=threads, budget=budget)
        observed = reduce_mod_phi(hist)
        ok = predicted == observed
        out.append(HeldoutResult(k, predicted, observed, ok))
        if not ok:
            raise VerificationError(
                f"held-out power sum mismatch at k={k}: "
                f"predicted {predicted!r}, enumerated {observed!r}")
    return out


def alpha_hodge_slopes(n: int) -> list[Fraction]:
    """The ordinary-case slope multiset {0, 1, 1, ..., n-1, n-1, n}."""
    out = [Fraction(0)]
    for i in range(1, n):
        out.extend([Fraction(i), Fraction(i)])
    out.append(Fraction(n))
    return out


def lfunction_pipeline(F: FieldTable, n: int, b: int, *,
                       kmax: int | None = None,
                       heldout: list[int] | None = None,
                       threads: int = 1, budget: Budget | None = None
                       ) -> tuple[LFactorization, list[HeldoutResult]]:
    """power sums -> strip trivial roots -> assemble -> weights (+ heldout)."""
    K = kmax if kmax is not None else 2 * n
    if K < 2 * n:
        raise ValueError(f"need kmax >= 2n = {2 * n}")
    star = power_sums(F, n, b, K, threads=threads, budget=budget)
    lf = strip_trivial_roots(star[:2 * n], n, F.q, b=b)
    lf = assemble_lfunction(lf, n, F.q)
    _, roots = complex_weights(lf.P_coeffs)
    lf.complex_roots = tuple(roots)
    results = heldout_check(lf, F, n, b, heldout, threads=threads,
                            budget=budget) if heldout else []
    return lf, results
