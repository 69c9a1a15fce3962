#!/usr/bin/env python3
"""Independent high-precision evaluation of the frozen test values.

Evaluates the probe-transmission formulas directly in omega (SI units, no
window-offset rewriting) with 60-digit arithmetic and prints every constant
that the C++ tests freeze.  Re-run after changing any reference input.
"""
from mpmath import mp, mpf, pi, sqrt, exp, expm1, findroot, diff, arg

mp.dps = 60
hbar = mpf('1.054571817e-34')
G = mpf('6.67430e-11')
kB = mpf('1.380649e-23')

M1 = M2 = mpf('1.26e-6')
d = mpf('0.55e-3')
w1 = 2 * pi * 8000
g1 = 2 * pi * mpf('0.8e-3')
xs = mpf('5e-6')
Pp = mpf('1e-18')
wp = 2 * pi * mpf('5e9')
abar = mpf(100)
kappa = 2 * pi * 8000
eta = mpf('0.5')
Gom = mpf('5e15')
T = mpf('0.01')

spring = 2 * G * M2 / d**3
w1p = sqrt(w1**2 - spring)
xz = sqrt(hbar / (2 * M1 * w1p))
g = Gom * xz * abar
alp = sqrt(Pp / (hbar * wp))
FG = 2 * G * M1 * M2 * xs / d**3
Fp = 4 * hbar * Gom * abar * sqrt(eta * kappa) * alp / kappa
r0 = FG / Fp
Db = -w1p


def tp(w, r=r0, phi=0, wchi=None, gamma=g1):
    """Literal SI form of the driven/undriven transmission."""
    wc2 = w1p**2 if wchi is None else wchi**2
    chi = 1 / (M1 * (wc2 - w**2 - 1j * w * gamma))
    f = hbar * Gom**2 * abar**2 * chi / (1j * (Db - w) + kappa / 2)
    D = -1j * (Db + w) + kappa / 2 + 2 * Db * f
    num = 1 + 1j * f * (1 + r * exp(1j * phi) * (2 / kappa) * (1j * Db - 1j * w + kappa / 2))
    return 1 - num / D * eta * kappa


def P(x, **kw):
    return abs(tp(w1p + x, **kw))**2


def peak(**kw):
    x = findroot(lambda y: diff(lambda z: P(z, **kw), y), (mpf('-0.004'), mpf('0')), solver='anderson')
    return x, P(x, **kw)


def crossing(level, lo, hi, **kw):
    return findroot(lambda y: P(y, **kw) - level, (lo, hi), solver='anderson')


geff = g1 + 4 * g**2 / kappa


def metrics(**kw):
    x, h = peak(**kw)
    a = crossing(h / 2, x - geff, x, **kw)
    b = crossing(h / 2, x, x + geff, **kw)
    return x, h, b - a


def show(name, v):
    print(f"{name:32s} {mp.nstr(v, 20)}")


show('omega1_prime - omega1', w1p - w1)
show('x_zpf', xz)
show('g', g)
show('F_G', FG)
show('F_p', Fp)
show('r', r0)
show('gamma_eff', geff)
show('n_bar_1(10 mK)', 1 / expm1(hbar * w1 / (kB * T)))
K = 2 * w1p * g**2
chi_res = 1 / (w1p**2 - w1p**2 - 1j * w1p * g1)
f_res = K * chi_res / (1j * (Db - w1p) + kappa / 2)
show('f(w1p).re', f_res.real)
show('f(w1p).im', f_res.imag)
show('|chi(w1p)| m/N', 1 / (M1 * w1p * g1))
t0c = tp(w1p, r=0)
show('t_p0(w1p).re', t0c.real)
show('t_p0(w1p).im', t0c.imag)

x0, h0, W0 = metrics(r=0)
xg, hg, WG = metrics()
show('undriven peak offset', x0)
show('undriven peak height', h0)
show('undriven fwhm', W0)
show('driven peak offset', xg)
show('driven peak height', hg)
show('driven fwhm', WG)
show('dynamic d_height', hg - h0)
show('dynamic d_omega_max', xg - x0)
show('dynamic d_fwhm', WG - W0)

xu, hu, Wu = metrics(r=0, wchi=w1)
show('static d_height (loaded-unl)', h0 - hu)
show('static d_omega_max', x0 - xu)
show('static d_fwhm', W0 - Wu)

dd = lambda y: P(y) - P(y, r=0)
xm = findroot(lambda y: diff(dd, y), (mpf('-0.004'), mpf('0')), solver='anderson')
show('delta max offset', xm)
show('delta max value', dd(xm))

def metrics_baseline(**kw):
    """FWHM measured from the mean of |t|^2 at omega1' +- 20 gamma_eff."""
    x, h = peak(**kw)
    base = (P(-20 * geff, **kw) + P(20 * geff, **kw)) / 2
    level = base + (h - base) / 2
    a = crossing(level, x - geff, x, **kw)
    b = crossing(level, x, x + geff, **kw)
    return b - a


Wb0 = metrics_baseline(r=0)
WbG = metrics_baseline()
show('baseline undriven fwhm', Wb0)
show('baseline dynamic d_fwhm', WbG - Wb0)


q = 1 + kappa**2 / (16 * w1p**2)


def lor(x, r):
    num = 4 * g**2 * (1 + 1j * kappa / (4 * w1p)) * (1 + r)
    den = 4 * g**2 + kappa * g1 + kappa**2 / (2 * w1p) * x + 1j * (kappa**2 * g1 / (4 * w1p) - 2 * kappa * x)
    return num / den


worst = 0
for rr in (0, r0):
    for i in range(-2000, 2001):
        x = 5 * geff * i / 2000
        a, b = abs(lor(x, rr))**2, P(x, r=rr)
        worst = max(worst, abs(a - b) / b)
show('lorentzian max rel err', worst)
show('lorentzian fwhm analytic', g1 + 4 * g**2 / (kappa * q))

# noise budget at omega = w1p, S_x^E = 0, S_add = 0
n1 = 1 / expm1(hbar * w1 / (kB * T))
C = 4 * g**2 / (kappa * g1)
chi_abs2 = (1 / (M1 * w1p * g1))**2
Szp = g1 * hbar * M1 * w1
St = 2 * Szp * n1
Sqba = 2 * C / xz**2 * g1 * hbar**2
Simp = mpf('0.5') / (4 * C * g1 * chi_abs2 / xz**2)
Seff = Szp + St + Sqba + Simp
show('S_ZP', Szp)
show('S_T', St)
show('S_qba', Sqba)
show('S_imp', Simp)
show('S_eff', Seff)
show('tau_seconds', Seff / FG**2)
show('required S_x^E (1.9e3 s)', (mpf('1.9e3') * FG**2 - Seff) / (M1**2 * w1**4))

flux = Pp / (hbar * wp)
show('n_bar_p angular', eta * flux * 4 / kappa)
show('n_bar_p ordinary', eta * flux * 4 / (kappa / (2 * pi)))
show('prestressed f0 (Hz)', sqrt(mpf('10e9') / (2 * mpf('3210') * mpf('5e-3')**2)))
