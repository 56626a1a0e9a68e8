"""Complex elementary and special functions with controlled branches.

Branch conventions used everywhere in the package:

* square roots of spectral parameters lie in the closed upper half plane,
* ``log`` is principal, cut on (-inf, 0],
* Lambert W branches follow the standard region layout (curved boundaries
  near the real-capable branches, straight strips far away).

All functions are pure and reentrant.
"""

from __future__ import annotations

import cmath
import math

from .errors import ConvergenceError, UnsupportedDomainError

_TWO_PI = 2.0 * math.pi
_EULER_GAMMA = 0.5772156649015328606


def _require_finite(z: complex, name: str = "z") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {z!r}")
    return z


def sqrt_upper(z: complex) -> complex:
    """Square root of ``z`` with Im >= 0 (strictly positive off [0, inf)).

    On the cut [0, inf) the limit from above is returned, i.e. the
    nonnegative real root.
    """
    z = _require_finite(z)
    w = cmath.sqrt(z)
    if w.imag < 0.0:
        w = -w
    return w


# ---------------------------------------------------------------------------
# Lambert W
# ---------------------------------------------------------------------------

def lambert_w_seed(n: int, z: complex) -> complex:
    """Two-term asymptotic approximation ``log z + 2*pi*i*n - log(log z + 2*pi*i*n)``.

    Requires ``|log z + 2*pi*i*n| >= 1``; the approximation error is
    O(log|L1|/|L1|) with L1 the shifted logarithm.
    """
    z = _require_finite(z)
    if z == 0:
        raise ValueError("seed undefined at z = 0")
    l1 = cmath.log(z) + 2j * math.pi * n
    if abs(l1) < 1.0:
        raise ValueError(
            f"asymptotic seed needs |log z + 2*pi*i*n| >= 1, got {abs(l1):.3g}"
        )
    return l1 - cmath.log(l1)


def branch_of_w(w: complex) -> int:
    """Branch index whose region contains ``w`` (standard boundary layout).

    The separating curves are {-t*cot(t) + i*t}; between their bands the
    regions are straight strips.  Heights exactly on a band edge use the
    counterclockwise-closure convention (top edge included).
    """
    w = complex(w)
    if w == 0:
        return 0
    t = w.imag
    if t < 0.0:
        return -branch_of_w(w.conjugate())
    if t == 0.0:
        return 0 if w.real >= -1.0 else -1
    # k-th curve band covers heights (2*k*pi, (2*k+1)*pi), k >= 0
    k = int(math.floor(t / _TWO_PI))
    frac = t - _TWO_PI * k
    if 0.0 < frac < math.pi:
        curve_re = -t / math.tan(frac)
        return k + 1 if w.real < curve_re else k
    # pure strip zone ((2k+1)*pi <= Im w <= (2k+2)*pi) belongs to branch k+1
    return k + 1


def _halley(w: complex, z: complex, max_iter: int, tol: float):
    trace = [w]
    zscale = max(abs(z), 1e-300)
    target = tol * zscale
    for _ in range(max_iter):
        ew = cmath.exp(w)
        f = w * ew - z
        # argument reduction in exp caps the attainable residual at ~|Im w|*eps
        floor = 64.0 * 2.3e-16 * zscale * (1.0 + abs(w))
        if abs(f) <= max(target, floor):
            return w, abs(f), trace
        fp = ew * (w + 1.0)
        fpp = ew * (w + 2.0)
        denom = fp - f * fpp / (2.0 * fp)
        if denom == 0:
            break
        step = f / denom
        w = w - step
        trace.append(w)
        if abs(step) <= 4e-16 * (1.0 + abs(w)):
            ew = cmath.exp(w)
            return w, abs(w * ew - z), trace
    ew = cmath.exp(w)
    return None, abs(w * ew - z), trace


def _w_seed(n: int, z: complex) -> complex:
    if n == 0:
        p2 = 2.0 * (math.e * z + 1.0)
        if abs(p2) < 0.4:
            p = cmath.sqrt(p2)
            return -1.0 + p - p2 / 6.0 + 11.0 / 72.0 * p * p2
        if abs(z) <= 1.5:
            return z * (1.0 - z)
        return cmath.log(1.0 + z)
    if n == -1:
        p2 = 2.0 * (math.e * z + 1.0)
        if abs(p2) < 0.4:
            p = cmath.sqrt(p2)
            if z.imag > 0.0:
                p = -p
            return -1.0 - p - p2 / 6.0 - 11.0 / 72.0 * p * p2
        if z.imag == 0.0 and -1.0 / math.e < z.real < 0.0:
            t = -math.log(-z.real)
            return complex(-t - math.log(t), 0.0) if t > 1.0 else complex(-1.5, 0.0)
    return lambert_w_seed(n, z)


def _w_continuation(n: int, z: complex, max_iter: int, tol: float):
    # Homotopy from an anchor deep inside branch n; each step is a local solve.
    anchor_w = 1.0 + 2j * math.pi * n if n != 0 else complex(1.0, 0.0)
    anchor_z = anchor_w * cmath.exp(anchor_w)
    w = anchor_w
    steps = 48
    for j in range(1, steps + 1):
        zt = anchor_z + (z - anchor_z) * (j / steps)
        w, res, _ = _halley(w, zt, max_iter, tol)
        if w is None:
            return None
    return w


def lambert_w(n: int, z: complex, tol: float = 1e-13, max_iter: int = 50) -> complex:
    """Branch ``n`` of the Lambert W function, by Halley iteration.

    The defining residual ``|w*exp(w) - z|`` is driven below ``tol * |z|``;
    the result is verified to lie in the branch-``n`` region.  Raises
    :class:`ConvergenceError` (with the last iterate) on failure.
    """
    z = _require_finite(z)
    n = int(n)
    if z == 0:
        if n == 0:
            return 0j
        raise ValueError("z = 0 is a logarithmic singularity for branches n != 0")
    w, res, trace = _halley(_w_seed(n, z), z, max_iter, tol)

    def on_branch(val: complex) -> bool:
        if branch_of_w(val) == n:
            return True
        # the branch point w = -1 is shared by branches 0 and -1
        return n in (0, -1) and abs(val + 1.0) < 1e-6

    if w is not None and not on_branch(w):
        w = None
    if w is None:
        w = _w_continuation(n, z, max_iter, tol)
        if w is None or not on_branch(w):
            raise ConvergenceError(
                f"Lambert W branch {n} did not converge at z = {z!r}",
                last_iterate=trace[-1],
                residual=res,
                trace=trace,
            )
    return w


# ---------------------------------------------------------------------------
# Bessel/Hankel functions (orders needed by the radial s-wave solver)
# ---------------------------------------------------------------------------

_SERIES_RADIUS = 14.0  # series/asymptotic seam for integer orders


def _series_j0(z: complex) -> complex:
    q = z * z / 4.0
    term = complex(1.0)
    total = term
    for k in range(1, 60):
        term *= -q / (k * k)
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return total


def _series_j1(z: complex) -> complex:
    q = z * z / 4.0
    term = complex(1.0)
    total = term
    for k in range(1, 60):
        term *= -q / (k * (k + 1))
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return total * z / 2.0


def _series_y0(z: complex) -> complex:
    q = z * z / 4.0
    term = complex(1.0)
    total = 0j
    h = 0.0
    for k in range(1, 60):
        term *= -q / (k * k)
        h += 1.0 / k
        contrib = -term * h
        total += contrib
        if abs(term) <= 1e-18 * max(abs(total), 1.0):
            break
    return (2.0 / math.pi) * ((cmath.log(z / 2.0) + _EULER_GAMMA) * _series_j0(z) + total)


def _series_y1(z: complex) -> complex:
    q = z * z / 4.0
    term = complex(1.0)
    total = term  # k = 0: (H_0 + H_1) = 1
    hk, hk1 = 0.0, 1.0
    for k in range(1, 60):
        term *= -q / (k * (k + 1))
        hk += 1.0 / k
        hk1 += 1.0 / (k + 1)
        total += term * (hk + hk1)
        if abs(term) <= 1e-18 * max(abs(total), 1.0):
            break
    return (2.0 / math.pi) * (
        (cmath.log(z / 2.0) + _EULER_GAMMA) * _series_j1(z) - 1.0 / z - (z / 4.0) * total
    )


def _hankel_pq(nu: float, z: complex):
    """Asymptotic P/Q sums and their derivatives, truncated at the smallest term."""
    mu = 4.0 * nu * nu
    p = complex(1.0)
    q = 0j
    dp = 0j
    dq = 0j
    a = complex(1.0)
    prev = abs(a)
    for k in range(1, 40):
        a = a * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        mag = abs(a)
        if mag >= prev and k > 2:
            break
        prev = mag
        da = -k * a / z
        if k % 2 == 1:
            sgn = -1.0 if k % 4 == 3 else 1.0
            q += sgn * a
            dq += sgn * da
        else:
            sgn = -1.0 if k % 4 == 2 else 1.0
            p += sgn * a
            dp += sgn * da
    return p, q, dp, dq


def _asymptotic_direct(nu: float, z: complex):
    """Hankel-expansion values for Re z >= 0 (J also good in the upper half).

    H1 is assembled in the exponential form amp * e^{i*omega} * (P + iQ);
    forming J + iY instead would cancel catastrophically for Im z >> 0.
    """
    p, q, dp, dq = _hankel_pq(nu, z)
    omega = z - nu * math.pi / 2.0 - math.pi / 4.0
    amp = cmath.sqrt(2.0 / (math.pi * z))
    cw, sw = cmath.cos(omega), cmath.sin(omega)
    jv = amp * (p * cw - q * sw)
    djv = amp * ((dp - q) * cw - (dq + p) * sw) - jv / (2.0 * z)
    eiw = cmath.exp(1j * omega)
    h1 = amp * eiw * (p + 1j * q)
    dh1 = amp * eiw * (1j * (p + 1j * q) + (dp + 1j * dq)) - h1 / (2.0 * z)
    return jv, h1, djv, dh1


def _asymptotic_jh(nu: float, z: complex):
    """Large-|z| (J, H1, J', H1'), stable in every quadrant.

    Left of the imaginary axis the cos/sin form of J drops its subdominant
    component (Stokes line at arg z = pi), so J is taken through the exact
    reflection J_nu(w e^{i pi}) = e^{i nu pi} J_nu(w); the lower-left quadrant
    reflects by conjugation.
    """
    if z.real >= 0.0:
        return _asymptotic_direct(nu, z)
    if z.imag >= 0.0:
        w = -z  # arg w = arg z - pi, in the solid lower-right quadrant
        jw, _h1w, djw, _dh1w = _asymptotic_direct(nu, w)
        phase = cmath.exp(1j * nu * math.pi)
        jv = phase * jw
        djv = -phase * djw
        h1, dh1 = _h1_upper_left(nu, z)
        return jv, h1, djv, dh1
    jc, h1c, djc, dh1c = _asymptotic_jh(nu, z.conjugate())
    jv, djv = jc.conjugate(), djc.conjugate()
    # H2(z) = conj(H1(conj z)); H1 = 2J - H2 (no cancellation: H1 dominant here)
    h1 = 2.0 * jv - h1c.conjugate()
    dh1 = 2.0 * djv - dh1c.conjugate()
    return jv, h1, djv, dh1


def _h1_upper_left(nu: float, z: complex):
    # the direct exponential H1 form is valid and accurate for arg z in (0, pi]
    p, q, dp, dq = _hankel_pq(nu, z)
    omega = z - nu * math.pi / 2.0 - math.pi / 4.0
    amp = cmath.sqrt(2.0 / (math.pi * z))
    eiw = cmath.exp(1j * omega)
    h1 = amp * eiw * (p + 1j * q)
    dh1 = amp * eiw * (1j * (p + 1j * q) + (dp + 1j * dq)) - h1 / (2.0 * z)
    return h1, dh1


def _integer_order_mp(nu: int, z: complex):
    """Series-region fallback in high precision for the cancellation-prone
    corner (H1 exponentially small against its J/Y constituents)."""
    import mpmath

    old = mpmath.mp.dps
    mpmath.mp.dps = 30 + int(math.ceil(2.0 * abs(z.imag) / math.log(10.0)))
    try:
        zm = mpmath.mpc(z)
        j = mpmath.besselj(nu, zm)
        h = mpmath.hankel1(nu, zm)
        jd = mpmath.besselj(nu, zm, derivative=1)
        hd = mpmath.hankel1(nu - 1, zm) - nu / zm * h if nu > 0 else -mpmath.hankel1(1, zm)
        return complex(j), complex(h), complex(jd), complex(hd)
    finally:
        mpmath.mp.dps = old


def _half_order(z: complex):
    amp = cmath.sqrt(2.0 / (math.pi * z))
    sz, cz = cmath.sin(z), cmath.cos(z)
    eiz = cmath.exp(1j * z)
    jv = amp * sz
    h1 = -1j * amp * eiz
    djv = amp * (cz - sz / (2.0 * z))
    dh1 = amp * eiz * (1.0 + 0.5j / z)
    return jv, h1, djv, dh1


def _integer_order(nu: int, z: complex):
    if abs(z) <= _SERIES_RADIUS:
        if z.imag > 3.0:
            return _integer_order_mp(nu, z)
        j0, j1 = _series_j0(z), _series_j1(z)
        y0, y1 = _series_y0(z), _series_y1(z)
        h0, h1 = j0 + 1j * y0, j1 + 1j * y1
        if nu == 0:
            return j0, h0, -j1, -h1
        return j1, h1, j0 - j1 / z, h0 - h1 / z
    return _asymptotic_jh(float(nu), z)


def _bessel_all(nu: float, z: complex):
    z = _require_finite(z)
    if z == 0:
        raise UnsupportedDomainError("Bessel evaluation at z = 0 is not supported")
    if nu == 0.5:
        return _half_order(z)
    if nu in (0.0, 1.0):
        return _integer_order(int(nu), z)
    if abs(z) > 10.0 * (1.0 + nu * nu):
        return _asymptotic_jh(nu, z)
    raise UnsupportedDomainError(
        f"order nu = {nu} is only supported for |z| > 10*(1 + nu^2); got |z| = {abs(z):.3g}"
    )


def bessel_j(nu: float, z: complex) -> complex:
    """Bessel J_nu(z); closed form for nu = 1/2, series/asymptotics for nu = 0, 1."""
    return _bessel_all(nu, z)[0]


def hankel1(nu: float, z: complex) -> complex:
    """Hankel function of the first kind H^(1)_nu(z)."""
    return _bessel_all(nu, z)[1]


def bessel_j_prime(nu: float, z: complex) -> complex:
    """Derivative J'_nu(z)."""
    return _bessel_all(nu, z)[2]


def hankel1_prime(nu: float, z: complex) -> complex:
    """Derivative H^(1)'_nu(z)."""
    return _bessel_all(nu, z)[3]
