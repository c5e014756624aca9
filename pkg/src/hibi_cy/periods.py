"""Fundamental periods, Picard-Fuchs operators and genus-0 BPS numbers.

The period coefficient A_m sums, over non-negative integer flows lambda
on the Hasse diagram of the bounded poset from ^0 to ^1 of value m (these
are exactly the nonnegative points of the curve-class lattice of degree m),
the weight  prod_j (d_j m)! / prod_e lambda_e!.
The formula is gated: before any coefficients are returned it must agree
with the closed binomial sum for P1 and with the quintic series.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial

from . import linalg
from .errors import AmbiguousOperator, GateFailure, HibiError, NoOperatorFound, SizeGuardError
from .geometry import edge_cut, ray_map
from .poset import ONE, ZERO, BoundedPoset, bounded_extension, chain, ideal_lattice

HELD_OUT = 10
MAX_TERMS = 200


def worker_count() -> int:
    env = os.environ.get("HIBI_CY_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


# curve classes


@dataclass(frozen=True)
class CurveClassLattice:
    p_hat: BoundedPoset
    basis: tuple[tuple[int, ...], ...]

    def degree(self, lam) -> int:
        """Total weight on the edges leaving ^0 (the cut of the empty ideal)."""
        cut = edge_cut(self.p_hat, 0).edges
        return sum(lam[self.p_hat.edge_index[e]] for e in cut)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def degree_is_cut_independent(self) -> bool:
        lat = ideal_lattice(self.p_hat.base)
        for lam in self.basis:
            values = {
                sum(lam[self.p_hat.edge_index[e]] for e in edge_cut(self.p_hat, tau).edges)
                for tau in lat.ideals
            }
            if len(values) != 1:
                return False
        return True


def curve_class_lattice(p_hat: BoundedPoset) -> CurveClassLattice:
    return CurveClassLattice(p_hat, tuple(tuple(v) for v in ray_map(p_hat).kernel()))


# coefficients


def _binom(a: int, b: int) -> int:
    return comb(a, b) if 0 <= b <= a else 0


def p1_period_oracle(m: int) -> int:
    """Closed five-fold binomial sum for the P1 period, summed directly."""
    if m < 0:
        raise ValueError("m must be non-negative")
    total = 0
    rng = range(m + 1)
    for s, t, u, v, w in product(rng, repeat=5):
        a, b = u - s + v, v - t + w
        term = _binom(s, u) * _binom(v, s) * _binom(t, s) * _binom(t, v)
        if not term:
            continue
        total += term * _binom(w, t) * _binom(m, t) * _binom(m, w) * _binom(b, a) * _binom(m, b)
    return total


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for i in range(n, -1, -1):
        for rest in _compositions(n - i, k - 1):
            yield (i,) + rest


def lattice_sum(p_hat: BoundedPoset, degrees, m: int) -> int:
    """A_m by dynamic programming over flows, one element at a time.

    Integer weights: a node with inflow I splitting into parts c_1..c_k
    contributes I!/prod c_i! * m!/I!; the accumulated m!^(|P|+1) is
    divided out at the end.
    """
    hat = p_hat.hat
    order = [i for i in hat.linear_order if hat.elements[i] != ONE]
    one = hat.index[ONE]
    fact = [factorial(i) for i in range(m + 1)]
    fm = fact[m]
    n = len(hat)
    start = [0] * n
    start[hat.index[ZERO]] = m
    states = {tuple(start): 1}
    for u in order:
        ups = hat.upper_covers[u]
        nxt = {}
        for st, w in states.items():
            inflow = st[u]
            base = list(st)
            base[u] = 0
            scale = w * (fm // fact[inflow])
            for parts in _compositions(inflow, len(ups)):
                mult = fact[inflow]
                new = list(base)
                for v, c in zip(ups, parts):
                    mult //= fact[c]
                    if v != one:
                        new[v] += c
                key = tuple(new)
                nxt[key] = nxt.get(key, 0) + scale * mult
        states = nxt
    (total,) = states.values() if states else (0,)
    num = total
    for d in degrees:
        num *= factorial(d * m)
    den = fm ** len(order)
    if num % den:
        raise GateFailure(f"A_{m} is not an integer")
    return num // den


@lru_cache(maxsize=None)
def check_gates() -> None:
    """Raise GateFailure unless the flow sum reproduces both oracles."""
    from .builtins import builtin
    p1 = bounded_extension(builtin("P1"))
    for m in range(9):
        if lattice_sum(p1, (1, 1, 1), m) != p1_period_oracle(m):
            raise GateFailure(f"P1 gate failed at m = {m}")
    c4 = bounded_extension(chain(4))
    for m in range(11):
        if lattice_sum(c4, (5,), m) != factorial(5 * m) // factorial(m) ** 5:
            raise GateFailure(f"quintic gate failed at m = {m}")


@dataclass(frozen=True)
class PeriodSeries:
    coefficients: tuple[int, ...]
    provenance: str = "lattice-sum"
    notes: tuple[str, ...] = ()

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, k):
        return self.coefficients[k]

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "coefficients": [str(a) for a in self.coefficients],
            "notes": list(self.notes),
        }


def _lattice_sum_job(args):
    base, degrees, m = args
    return lattice_sum(bounded_extension(base), degrees, m)


def period_coefficients(spec, M: int, workers: int | None = None) -> PeriodSeries:
    """A_0..A_M for a CICY spec (anything with ``poset`` and ``degrees``)."""
    if M < 0:
        raise ValueError("M must be non-negative")
    if M > MAX_TERMS:
        raise SizeGuardError(f"M = {M} exceeds {MAX_TERMS}")
    check_gates()
    p_hat = bounded_extension(spec.poset)
    degrees = tuple(spec.degrees)
    workers = worker_count() if workers is None else workers
    jobs = [(spec.poset, degrees, m) for m in range(M + 1)]
    if workers > 1 and M >= 20:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            coeffs = list(pool.map(_lattice_sum_job, jobs))
    else:
        coeffs = [lattice_sum(p_hat, degrees, m) for m in range(M + 1)]
    notes = ()
    if len(degrees) > 1 and any(d > 1 for d in degrees):
        notes = ("formula unverified beyond gates for mixed degrees",)
    return PeriodSeries(tuple(coeffs), "lattice-sum", notes)


def p1_oracle_series(M: int) -> PeriodSeries:
    return PeriodSeries(tuple(p1_period_oracle(m) for m in range(M + 1)), "p1-binomial-oracle")


# theta operators


@dataclass(frozen=True)
class ThetaOperator:
    """sum_k z^k P_k(theta); ``coeffs[k][i]`` multiplies z^k theta^i."""
    coeffs: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.coeffs[0]) - 1

    @property
    def zdegree(self) -> int:
        return len(self.coeffs) - 1

    def row(self, k: int, x):
        return sum(c * x ** i for i, c in enumerate(self.coeffs[k]))

    def to_dict(self) -> dict:
        return {"order": self.order, "zdegree": self.zdegree,
                "coeffs": [list(r) for r in self.coeffs]}

    @classmethod
    def from_dict(cls, data: dict) -> "ThetaOperator":
        op = cls(tuple(tuple(int(c) for c in r) for r in data["coeffs"]))
        if op.order != data["order"] or op.zdegree != data["zdegree"]:
            raise ValueError("order/zdegree do not match the coefficient table")
        return op

    def pretty(self, var: str = "θ") -> str:
        return format_operator(self, var)


def _poly_str(row, var):
    terms = []
    for i in range(len(row) - 1, -1, -1):
        c = row[i]
        if not c:
            continue
        mon = "" if i == 0 else var if i == 1 else f"{var}^{i}"
        mag = abs(c)
        body = str(mag) if not mon else (mon if mag == 1 else f"{mag}{mon}")
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    sign, body = terms[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def format_operator(op: ThetaOperator, var: str = "θ") -> str:
    """Layout ``θ^4 - 2z(33θ^4 + ...) + ...`` with each row's content pulled out."""
    from math import gcd
    pieces = []
    for k, row in enumerate(op.coeffs):
        if not any(row):
            continue
        g = 0
        for c in row:
            g = gcd(g, c)
        lead = next(c for c in reversed(row) if c)
        if lead < 0:
            g = -g
        inner = [c // g for c in row]
        zpart = "" if k == 0 else "z" if k == 1 else f"z^{k}"
        poly = _poly_str(inner, var)
        if k == 0 and abs(g) == 1:
            text = poly
            sign = "-" if g < 0 else "+"
            pieces.append((sign, text if sign == "+" else f"({poly})"))
            continue
        mag = abs(g)
        factor = ("" if mag == 1 else str(mag)) + zpart
        if sum(1 for c in inner if c) > 1 or factor:
            text = f"{factor}({poly})" if factor else f"({poly})"
        else:
            text = poly
        pieces.append(("-" if g < 0 else "+", text))
    if not pieces:
        return "0"
    sign, text = pieces[0]
    out = ("-" if sign == "-" else "") + text
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    return out


def apply_operator(op: ThetaOperator, series) -> list[int]:
    """Coefficients of op(omega) up to the length of the series."""
    a = list(series.coefficients if isinstance(series, PeriodSeries) else series)
    out = []
    for m in range(len(a)):
        total = 0
        for k in range(min(op.zdegree, m) + 1):
            total += op.row(k, m - k) * a[m - k]
        out.append(total)
    return out


def _normalize(vec, p, q):
    vec = linalg.primitive(vec)
    rows = [vec[k * (p + 1):(k + 1) * (p + 1)] for k in range(q + 1)]
    lead = rows[0][p] or next(c for c in vec if c)
    if lead < 0:
        rows = [[-c for c in r] for r in rows]
    return ThetaOperator(tuple(tuple(r) for r in rows))


def fit_theta_operator(series, max_order: int, max_zdegree: int,
                       held_out: int = HELD_OUT) -> ThetaOperator:
    """Smallest (order, z-degree) theta operator annihilating the series.

    Candidates are tried in lexicographic order of (order, z-degree). Each
    is fitted on all but the last ``held_out`` coefficients by an exact
    nullspace computation and must annihilate the held-out ones too.
    """
    a = list(series.coefficients if isinstance(series, PeriodSeries) else series)
    need = (max_order + 1) * (max_zdegree + 1) + held_out
    if len(a) < need:
        raise HibiError(f"need at least {need} coefficients for bounds "
                        f"({max_order}, {max_zdegree}), got {len(a)}")
    n_fit = len(a) - held_out
    for p in range(max_order + 1):
        for q in range(max_zdegree + 1):
            rows = []
            for m in range(n_fit):
                row = []
                for k in range(q + 1):
                    for i in range(p + 1):
                        row.append((m - k) ** i * a[m - k] if m >= k else 0)
                rows.append(row)
            kernel = linalg.nullspace(rows)
            if not kernel:
                continue
            if len(kernel) > 1:
                raise AmbiguousOperator(
                    f"{len(kernel)}-dimensional family of operators at order {p}, "
                    f"z-degree {q}; supply more coefficients")
            op = _normalize(kernel[0], p, q)
            if any(apply_operator(op, a)):
                continue
            return op
    raise NoOperatorFound(f"no operator with order <= {max_order} and z-degree <= {max_zdegree}")


# genus-0 instanton numbers


def _mul(a, b, n):
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[:n - i]):
                out[i + j] += x * y
    return out


def _inv(a, n):
    if a[0] == 0:
        raise ZeroDivisionError("series not invertible")
    out = [Fraction(0)] * n
    out[0] = 1 / Fraction(a[0])
    for k in range(1, n):
        s = sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out[k] = -s * out[0]
    return out


def _exp(f, n):
    # exp of a series with zero constant term, via theta E = (theta f) E
    out = [Fraction(0)] * n
    out[0] = Fraction(1)
    for k in range(1, n):
        out[k] = sum(j * f[j] * out[k - j] for j in range(1, min(k, len(f) - 1) + 1)) / k
    return out


def _compose(f, g, n):
    """f(g(x)) with g(0) = 0."""
    out = [Fraction(0)] * n
    for c in reversed(f[:n]):
        out = _mul(out, g, n)
        out[0] += c
    return out


def _revert(u, n):
    """Given q = z u(z) with u(0) = 1, return z(q) = q v(q) truncated at n."""
    v = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for _ in range(n):
        qv = [Fraction(0)] + v[:n - 1]
        v = _inv(_compose(u, qv, n), n)
    return [Fraction(0)] + v[:n - 1]


def _mobius(n):
    res, k, m = 1, 2, n
    while k * k <= m:
        if m % k == 0:
            m //= k
            if m % k == 0:
                return 0
            res = -res
        k += 1
    return -res if m > 1 else res


def genus0_bps(op: ThetaOperator, deg_X: int, D: int) -> list[Fraction]:
    """Genus-0 instanton numbers n_1..n_D from an order-4 MUM operator."""
    if D <= 0:
        return []
    if op.order != 4 or any(op.coeffs[0][:4]) or not op.coeffs[0][4]:
        raise HibiError("operator is not of order 4 with leading term theta^4 at z = 0")
    lead = Fraction(op.coeffs[0][4])
    rows = [[Fraction(c) / lead for c in r] for r in op.coeffs]
    q = len(rows) - 1
    n = D + 1

    def P(k, x):
        return sum(c * x ** i for i, c in enumerate(rows[k]))

    def dP(k, x):
        return sum(i * c * x ** (i - 1) for i, c in enumerate(rows[k]) if i)

    # Frobenius basis to first order in epsilon
    a0 = [Fraction(1)] + [Fraction(0)] * (n - 1)
    a1 = [Fraction(0)] * n
    for N in range(1, n):
        r0 = r1 = Fraction(0)
        for k in range(1, min(q, N) + 1):
            x = N - k
            r0 -= P(k, x) * a0[x]
            r1 -= dP(k, x) * a0[x] + P(k, x) * a1[x]
        a0[N] = r0 / N ** 4
        a1[N] = (r1 - 4 * N ** 3 * a0[N]) / N ** 4
    s = _mul(a1, _inv(a0, n), n)  # t = log z + s
    qz = _exp(s, n)  # q = z * exp(s)
    theta_t = [Fraction(1)] + [k * s[k] for k in range(1, n)]

    a3 = [rows[k][3] if k < len(rows) else Fraction(0) for k in range(n)]
    a4 = [rows[k][4] if k < len(rows) else Fraction(0) for k in range(n)]
    g = [-c / 2 for c in _mul(a3, _inv(a4, n), n)]
    if g[0] != 0:
        raise HibiError("Yukawa equation has a pole at z = 0")
    y = [Fraction(deg_X)] + [Fraction(0)] * (n - 1)
    for k in range(1, n):
        y[k] = sum(g[j] * y[k - j] for j in range(1, k + 1)) / k

    tt3 = _mul(_mul(theta_t, theta_t, n), theta_t, n)
    w2 = _mul(a0, a0, n)
    kz = _mul(y, _inv(_mul(w2, tt3, n), n), n)
    zq = _revert(qz, n)
    kq = _compose(kz, zq, n)
    if kq[0] != deg_X:
        raise HibiError("Yukawa normalisation failed")
    out = []
    for d in range(1, n):
        val = sum(_mobius(d // k) * kq[k] for k in range(1, d + 1) if d % k == 0)
        out.append(val / d ** 3)
    return out
