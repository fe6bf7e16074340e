"""Independent reference values frozen into the C++ tests.

Uses scipy's Bessel zeros and quadrature and the direct cos/sin form of the
slab denominator, so it shares no code path with the library. Run with
python3 tests/oracles/reference_values.py; values are printed with 15 digits.
"""
import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import jn_zeros

E2 = 1439.964547  # meV nm
HBAR = 0.6582119569  # meV ps
CM1 = 0.12398419843  # meV per cm^-1

PAR = (2.95, [(780.0, 830.0, 4.0)])
PERP = (4.87, [(1370.0, 1610.0, 5.0)])


def eps(axis, w, ls):
    einf, osc = axis
    return einf * (1 + sum((lo**2 - to**2) / (to**2 - w**2 - 1j * w * ls * g) for to, lo, g in osc))


def roots(w, ls):
    ep, et = eps(PAR, w, ls), eps(PERP, w, ls)
    q = np.sqrt(-et / ep)
    qd = q if q.imag >= 0 else -q
    return ep, et, q, qd


def pair_direct(w, ls, R, d, h, p1=1.0, p2=1.0, e0=11.7, n=4000, self_term=False):
    ep, et, _, q = roots(w, ls)
    x = jn_zeros(0, n)
    psi = q * x * d / R
    eta = ep * q / e0
    # Avoid overflow of cos/sin for large Im psi by rescaling with exp(i psi).
    E = np.exp(2j * psi)
    D2 = (1 + E) - 0.5j * (1 / eta - eta) * (E - 1)
    if self_term:
        f = -1j * (1 + eta**2) * (E - 1) / (2 * eta * (E + 1) - 1j * (1 - eta**2) * (E - 1))
    else:
        f = 2 * np.exp(1j * psi) / D2
    return -(2 * np.pi * p1 * p2 * E2 / R**3) * np.sum(x**2 * np.exp(-x * h / R) * f)


def gamma_quad(w, ls, d, h, p=1.0, e0=11.7):
    ep, et, _, q = roots(w, ls)
    K = e0 * (et - ep) * q / ep**2
    val, _ = quad(lambda t: t * t * np.exp(-t) * np.tanh(q.imag * d / h * t), 0, np.inf, epsabs=0, epsrel=1e-12, limit=400)
    return 0.5 * p * p * E2 / h**3 * abs(K.real) * val


def hsr(R, d, m, ls, lo=1370.5, hi=1609.5):
    return brentq(lambda w: roots(w, ls)[2].real - 4 * R * m / d, lo, hi, xtol=1e-13, rtol=1e-15)


if __name__ == "__main__":
    ls = 1 / 3
    w = 1490.0
    _, _, q, _ = roots(w, ls)
    R, h = 100.0, 5.0
    d = 4 * R / q.real
    print("emission_angle(-3, 1.2) =", repr(np.arctan(np.sqrt(2.5))))
    print("jc g (p=1, h=3, d=50, 100 meV) =", repr(0.5 * np.sqrt(E2 * 100 / (3 * 50 * 9))))
    print("Im q natural @1490 =", repr(roots(w, 1.0)[2].imag), " enriched =", repr(q.imag))
    print("d at m=1, R=100, 1490, ls=1/3 =", repr(d))
    r = pair_direct(w, ls, R, d, h)
    print("pair opposite (ls=1/3) J, Gamma =", repr(r.real), repr(r.imag))
    s = pair_direct(w, ls, R, d, h, self_term=True)
    print("pair self (ls=1/3) J, Gamma =", repr(s.real), repr(s.imag))
    print("gamma quadrature (ls=1/3, d above, h=5) =", repr(gamma_quad(w, ls, d, h)))
    print("gamma quadrature natural 1500, d=50, h=5 =", repr(gamma_quad(1500.0, 1.0, 50.0, 5.0)))
    print("hsr R=100 d=50 m=1 natural =", repr(hsr(100, 50, 1, 1.0)))
    print("hsr R=60 d=170 m=1 natural =", repr(hsr(60, 170, 1, 1.0)))
    J = 100.0
    print("t_gate(J=100 meV) ps =", repr(np.pi * HBAR / (2 * J)))
