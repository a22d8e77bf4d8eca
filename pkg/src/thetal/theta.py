"""Jacobi theta constants and their Lambert-series relatives.

Everything here is a function of a real nome q in (0, 1).  The three theta
series converge in a handful of terms once q <= e^-pi; for larger q every
public evaluator reroutes through the half-period involution u -> 1/u so the
truncation depth stays O(sqrt(digits)) uniformly on (0, 1).  The module also
carries the weight-3 products f and g, the modular parameter alpha, the
Eisenstein sum M, the Lambert-type reorganized double sums, and exact integer
q-expansion coefficients for f and g.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .context import (
    BudgetError,
    DomainError,
    PrecisionContext,
    as_real,
    ensure_finite,
)

__all__ = [
    "Nome",
    "CoeffStream",
    "theta2",
    "theta3",
    "theta4",
    "theta_direct",
    "theta_involution",
    "alpha",
    "alpha_pair",
    "alpha_qderiv",
    "form_f",
    "form_g",
    "eisenstein_M",
    "lambert_series",
    "LAMBERT_IDS",
    "coeffs_convolution",
    "coeffs_lambert",
]


@dataclass(frozen=True)
class Nome:
    """A real nome q in (0,1), or its half-period u with q = exp(-pi u).

    Exactly one of q, u is given.  value() must run under an active working
    precision (all operations here establish one).
    """

    q: object = None
    u: object = None

    def __post_init__(self):
        if (self.q is None) == (self.u is None):
            raise DomainError("Nome takes exactly one of q or u")

    def value(self):
        if self.q is not None:
            qv = as_real(self.q)
        else:
            uv = as_real(self.u)
            if not uv > 0:
                raise DomainError("half-period u must be positive")
            qv = mp.exp(-mp.pi * uv)
        if not (0 < qv < 1):
            raise DomainError(f"nome must lie in (0,1), got {mp.nstr(qv, 8)}")
        return qv


def _nome_value(q):
    if isinstance(q, Nome):
        return q.value()
    return Nome(q=q).value()


def _theta_series(which: int, qv, max_terms: int):
    """Raw series at the current working precision, no rerouting.

    theta2 = 2 q^{1/4} sum q^{n(n+1)}, theta3/theta4 = 1 + 2 sum (+-1)^n
    q^{n^2}.  Terms collapse doubly fast, so the loop is short whenever
    q <= e^-pi; for larger q it still terminates, just more slowly, which is
    exactly what the cross-check tests want to see.
    """
    tol = mp.mpf(10) ** (-(mp.mp.dps - 2))
    if which == 2:
        s = mp.mpf(1)
        n = 1
        while True:
            t = qv ** (n * (n + 1))
            s += t
            if t < tol * s:
                break
            n += 1
            if n > max_terms:
                raise BudgetError("theta2 series exhausted its budget", best=s)
        return 2 * mp.sqrt(mp.sqrt(qv)) * s
    if which not in (3, 4):
        raise DomainError("theta index must be one of 2, 3, 4")
    s = mp.mpf(1)
    sign = -1 if which == 4 else 1
    n = 1
    while True:
        t = qv ** (n * n)
        s += 2 * t if sign == 1 or n % 2 == 0 else -2 * t
        # scale against 1, not s: theta4 may be tiny near q -> 1
        if t < tol / 2:
            break
        n += 1
        if n > max_terms:
            raise BudgetError(f"theta{which} series exhausted its budget", best=s)
    return s


def theta_direct(which: int, q, ctx: PrecisionContext):
    """Unrouted theta series, any q in (0,1).  For cross-checks only; the
    routed evaluators below are the production path."""
    with ctx.working():
        return ensure_finite(
            _theta_series(which, _nome_value(q), ctx.max_terms), "theta series"
        )


_INVOLUTION_PARTNER = {2: 4, 3: 3, 4: 2}


def theta_involution(u, which: int, ctx: PrecisionContext):
    """theta_which(e^{-pi u}) computed on whichever side of u = 1 is cheap.

    sqrt(u) theta4(e^{-pi u}) = theta2(e^{-pi/u}) and its u -> 1/u mirror;
    theta3 maps to itself.
    """
    if which not in _INVOLUTION_PARTNER:
        raise DomainError("theta index must be one of 2, 3, 4")
    with ctx.working():
        uv = as_real(u)
        if not uv > 0:
            raise DomainError("half-period u must be positive")
        if uv >= 1:
            qv = mp.exp(-mp.pi * uv)
            return ensure_finite(
                _theta_series(which, qv, ctx.max_terms), "theta series"
            )
        qt = mp.exp(-mp.pi / uv)
        partner = _INVOLUTION_PARTNER[which]
        val = _theta_series(partner, qt, ctx.max_terms) / mp.sqrt(uv)
        return ensure_finite(val, "theta involution")


def _theta_routed(which: int, qv, max_terms: int):
    u = -mp.log(qv) / mp.pi
    if u >= 1:
        return _theta_series(which, qv, max_terms)
    qt = mp.exp(-mp.pi / u)
    return _theta_series(_INVOLUTION_PARTNER[which], qt, max_terms) / mp.sqrt(u)


def theta2(q, ctx: PrecisionContext):
    with ctx.working():
        return ensure_finite(
            _theta_routed(2, _nome_value(q), ctx.max_terms), "theta2"
        )


def theta3(q, ctx: PrecisionContext):
    with ctx.working():
        return ensure_finite(
            _theta_routed(3, _nome_value(q), ctx.max_terms), "theta3"
        )


def theta4(q, ctx: PrecisionContext):
    with ctx.working():
        return ensure_finite(
            _theta_routed(4, _nome_value(q), ctx.max_terms), "theta4"
        )


def alpha_pair(q, ctx: PrecisionContext):
    """(alpha, 1 - alpha) with the complement formed from theta4, not by
    subtraction, so both stay fully accurate at either end of (0,1)."""
    with ctx.working():
        qv = _nome_value(q)
        t2 = _theta_routed(2, qv, ctx.max_terms)
        t3 = _theta_routed(3, qv, ctx.max_terms)
        t4 = _theta_routed(4, qv, ctx.max_terms)
        a = (t2 / t3) ** 4
        ca = (t4 / t3) ** 4
        return ensure_finite(a, "alpha"), ensure_finite(ca, "1-alpha")


def alpha(q, ctx: PrecisionContext):
    """Modular parameter theta2^4/theta3^4, in (0,1) and increasing in q."""
    return alpha_pair(q, ctx)[0]


def alpha_qderiv(q, ctx: PrecisionContext):
    """q d(alpha)/dq from the term-by-term derivatives of theta2, theta3.

    Uses q d/dq theta2 = 2 q^{1/4} sum (n(n+1) + 1/4) q^{n(n+1)} and
    q d/dq theta3 = 2 sum n^2 q^{n^2}; both series converge as fast as the
    thetas themselves, so no rerouting is needed.
    """
    with ctx.working():
        qv = _nome_value(q)
        tol = mp.mpf(10) ** (-(mp.mp.dps - 2))
        s2 = mp.mpf(0.25)
        n = 1
        while True:
            t = (n * (n + 1) + mp.mpf(0.25)) * qv ** (n * (n + 1))
            s2 += t
            if t < tol * s2:
                break
            n += 1
            if n > ctx.max_terms:
                raise BudgetError("theta2 derivative series exhausted", best=s2)
        d2 = 2 * mp.sqrt(mp.sqrt(qv)) * s2
        s3 = mp.mpf(0)
        n = 1
        while True:
            t = n * n * qv ** (n * n)
            s3 += t
            if t < tol * max(s3, mp.mpf(1)):
                break
            n += 1
            if n > ctx.max_terms:
                raise BudgetError("theta3 derivative series exhausted", best=s3)
        d3 = 2 * s3
        t2 = _theta_series(2, qv, ctx.max_terms)
        t3 = _theta_series(3, qv, ctx.max_terms)
        a = (t2 / t3) ** 4
        return ensure_finite(4 * a * (d2 / t2 - d3 / t3), "alpha derivative")


def form_f(q, ctx: PrecisionContext):
    """f(q) = theta2^4(q) theta4^2(q) / 16, the weight-3 newform factor."""
    with ctx.working():
        qv = _nome_value(q)
        t2 = _theta_routed(2, qv, ctx.max_terms)
        t4 = _theta_routed(4, qv, ctx.max_terms)
        return ensure_finite(t2**4 * t4**2 / 16, "form f")


def form_g(q, ctx: PrecisionContext):
    """g(q) = theta2^4(q) theta4^2(q^2) / 16; the inner nome is built by
    squaring at working precision."""
    with ctx.working():
        qv = _nome_value(q)
        t2 = _theta_routed(2, qv, ctx.max_terms)
        t4 = _theta_routed(4, qv * qv, ctx.max_terms)
        return ensure_finite(t2**4 * t4**2 / 16, "form g")


def eisenstein_M(q, ctx: PrecisionContext):
    """M(q) = 1 + 240 sum_k k^3 q^k / (1 - q^k), the weight-4 Lambert sum."""
    with ctx.working():
        qv = _nome_value(q)
        tol = mp.mpf(10) ** (-(mp.mp.dps - 2))
        s = mp.mpf(0)
        k = 1
        while True:
            p = qv**k
            t = k**3 * p / (1 - p)
            s += t
            if t < tol * max(s, mp.mpf(1)):
                break
            k += 1
            if k > ctx.max_terms:
                raise BudgetError("Eisenstein sum exhausted its budget", best=s)
        return ensure_finite(1 + 240 * s, "Eisenstein M")


# Reorganized single sums for the double Lambert series.  Each generator
# walks the odd index m = 2r - 1; all terms decay geometrically in r.
def _lambert_terms(name: str, qv):
    if name == "lam1":
        # 4 sum chi_{-4}(n) q^{n/2} / (1 - q^n)
        sq = mp.sqrt(qv)
        for r in _counter():
            m = 2 * r - 1
            t = 4 * sq**m / (1 - qv**m)
            yield t if r % 2 == 1 else -t
    elif name == "lam2":
        # 16 sum (2r-1) q^{2r-1} / (1 - q^{2(2r-1)})
        for r in _counter():
            m = 2 * r - 1
            yield 16 * m * qv**m / (1 - qv ** (2 * m))
    elif name == "lemma22_1":
        for r in _counter():
            m = 2 * r - 1
            yield qv**m / (m * (1 - qv ** (2 * m)))
    elif name == "lemma22_2":
        sq = mp.sqrt(qv)
        for r in _counter():
            m = 2 * r - 1
            yield sq**m / (m * (1 - qv**m))
    elif name == "ram_lhs":
        sq = mp.sqrt(qv)
        for r in _counter():
            m = 2 * r - 1
            w = sq**m
            yield w / (m * m * (1 + w * w))
    elif name == "eis384":
        # sum chi_{-4}(n) n^2 q^n / (1 - q^{2n})
        for r in _counter():
            m = 2 * r - 1
            t = m * m * qv**m / (1 - qv ** (2 * m))
            yield t if r % 2 == 1 else -t
    elif name == "cube":
        for r in _counter():
            m = 2 * r - 1
            yield m**3 * qv**m / (1 - qv ** (2 * m))
    else:
        raise DomainError(f"unknown Lambert series id {name!r}")


def _counter():
    r = 1
    while True:
        yield r
        r += 1


LAMBERT_IDS = ("lam1", "lam2", "lemma22_1", "lemma22_2", "ram_lhs", "eis384", "cube")


def lambert_series(name: str, q, ctx: PrecisionContext):
    """One of the reorganized Lambert sums, summed with geometric control.

    Cost grows like digits / -log(q) as q -> 1; the identity grid and the
    Mellin integrands stay well inside that.
    """
    if name not in LAMBERT_IDS:
        raise DomainError(f"unknown Lambert series id {name!r}")
    with ctx.working():
        qv = _nome_value(q)
        tol = mp.mpf(10) ** (-(mp.mp.dps - 2))
        s = mp.mpf(0)
        scale = None
        used = 0
        for t in _lambert_terms(name, qv):
            s += t
            used += 1
            if scale is None:
                scale = max(abs(t), mp.mpf(10) ** (-mp.mp.dps))
            if abs(t) < tol * max(abs(s), scale):
                break
            if used > ctx.max_terms:
                raise BudgetError(
                    f"Lambert series {name} exhausted its budget", best=s
                )
        return ensure_finite(s, f"Lambert series {name}")


@dataclass(frozen=True)
class CoeffStream:
    """Exact integer q-expansion coefficients a_1..a_N of f or g."""

    form: str
    coeffs: tuple

    def a(self, n: int) -> int:
        if not 1 <= n <= len(self.coeffs):
            raise DomainError(f"coefficient index {n} out of range")
        return self.coeffs[n - 1]


def _poly_mul_trunc(a, b, n_max):
    """Product of integer polynomials, truncated at degree n_max.

    Nonnegative inputs are multiplied via Kronecker substitution: pack into
    one big integer at 64-bit spacing, multiply, unpack.  The packing is
    valid because every convolution coefficient is < 2^63, which is asserted
    against the a-priori bound max|a| max|b| min(len).
    """
    a = a[: n_max + 1]
    b = b[: n_max + 1]
    if not a or not b:
        return []
    neg = any(c < 0 for c in a) or any(c < 0 for c in b)
    if neg:
        # fall back to schoolbook on the rare signed input
        out = [0] * (n_max + 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            top = min(len(b), n_max + 1 - i)
            for j in range(top):
                out[i + j] += ca * b[j]
        return out
    bound = max(a) * max(b) * min(len(a), len(b))
    assert bound < 1 << 63, "Kronecker packing width exceeded"
    # pack and unpack through bytes; shifting limb by limb is quadratic
    pa = int.from_bytes(b"".join(c.to_bytes(8, "little") for c in a), "little")
    pb = int.from_bytes(b"".join(c.to_bytes(8, "little") for c in b), "little")
    raw = (pa * pb).to_bytes(8 * (len(a) + len(b)), "little")
    return [
        int.from_bytes(raw[8 * i : 8 * i + 8], "little") for i in range(n_max + 1)
    ]


def _theta2_quarter_poly(n_max):
    # A(q) = sum q^{n(n+1)}: theta2^4/16 = q A^4
    a = [0] * (n_max + 1)
    n = 0
    while n * (n + 1) <= n_max:
        a[n * (n + 1)] = 1
        n += 1
    return a


def _theta3_sq_coeffs(n_max):
    # r2(k): number of (a,b) in Z^2 with a^2 + b^2 = k
    r2 = [0] * (n_max + 1)
    m = 0
    while m * m <= n_max:
        start = 1 if m == 0 else 2
        mm = m * m
        n = 0
        while mm + n * n <= n_max:
            r2[mm + n * n] += start * (1 if n == 0 else 2)
            n += 1
        m += 1
    return r2


def coeffs_convolution(form: str, N: int) -> CoeffStream:
    """a_1..a_N by exact integer power-series multiplication.

    f = q A^4 theta4^2(q) with A = sum q^{n(n+1)}; since A has only even
    exponents the theta4 signs factor out of the convolution, so f is a
    single nonnegative product with a global (-1)^{n-1} twist.  g needs the
    even/odd split of theta4^2(q^2) explicitly.
    """
    if N < 1:
        raise DomainError("need N >= 1")
    if form not in ("f", "g"):
        raise DomainError("form must be 'f' or 'g'")
    n_max = N - 1  # degree budget after the leading q is factored off
    a1 = _theta2_quarter_poly(n_max)
    a2 = _poly_mul_trunc(a1, a1, n_max)
    a4 = _poly_mul_trunc(a2, a2, n_max)
    if form == "f":
        r2 = _theta3_sq_coeffs(n_max)
        conv = _poly_mul_trunc(a4, r2, n_max)
        coeffs = [(-1) ** n * conv[n] for n in range(N)]  # a_{n+1} sign
        return CoeffStream("f", tuple(coeffs))
    r2 = _theta3_sq_coeffs(n_max // 2 if n_max >= 0 else 0)
    even = [0] * (n_max + 1)
    odd = [0] * (n_max + 1)
    for k, c in enumerate(r2):
        if 2 * k > n_max:
            break
        (even if k % 2 == 0 else odd)[2 * k] = c
    pe = _poly_mul_trunc(a4, even, n_max)
    po = _poly_mul_trunc(a4, odd, n_max)
    coeffs = [pe[n] - po[n] for n in range(N)]
    return CoeffStream("g", tuple(coeffs))


def coeffs_lambert(form: str, N: int) -> CoeffStream:
    """a_m = sum_{nk=m} psi(n) n^2 chi_{-4}(k) with psi(n) = (-1)^{n-1}.

    Only f has this twisted-Eisenstein shape; asking for g is a caller bug.
    """
    if form != "f":
        raise DomainError("the divisor-sum expansion is defined for f only")
    if N < 1:
        raise DomainError("need N >= 1")
    chi = (0, 1, 0, -1)
    a = [0] * (N + 1)
    for n in range(1, N + 1):
        psi = n * n if n % 2 == 1 else -n * n
        for k in range(1, N // n + 1):
            c = chi[k & 3]
            if c:
                a[n * k] += psi * c
    return CoeffStream("f", tuple(a[1:]))
