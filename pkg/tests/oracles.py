"""Independent reference computations used by the tests.

Nothing here calls the closed forms under test: equilibria come from
root-finding on the full potential, stiffness from finite differences or
symbolic differentiation, modes from a general eigensolver, CSL heating from
Gauss-Hermite quadrature of the k-space integrand.
"""
import math

import mpmath
import numpy as np
from scipy import optimize

from csltrap.core import AMU, COULOMB_K, E_CHARGE, HBAR, IonSpecies
from csltrap.modes import TwoIonSystem
from csltrap.trap import TrapConfig, secular_frequencies

M0 = AMU


def point_ion(mass_amu, charge_e):
    return IonSpecies(mass_amu * AMU, charge_e * E_CHARGE)


def random_admissible_systems(rng, n, ion1=None, m_range=(0.1, 100.0), q_range=(0.1, 100.0),
                              v_end=(0.5, 30.0), v_rf=(150.0, 3000.0)):
    """Draw ``n`` point-ion systems whose flags all pass."""
    from csltrap.modes import flags_ok, system_flags
    ion1 = ion1 or point_ion(138.0, 1.0)
    out = []
    while len(out) < n:
        M = math.exp(rng.uniform(*np.log(m_range)))
        Q = math.exp(rng.uniform(*np.log(q_range)))
        trap = TrapConfig(v_end=rng.uniform(*v_end), v_rf=rng.uniform(*v_rf))
        s = TwoIonSystem(ion1, IonSpecies(M * ion1.mass, Q * ion1.charge), trap)
        if flags_ok(system_flags(s)):
            out.append(s)
    return out


# potential ----------------------------------------------------------------

def _harmonic(system):
    w1z, w1r, w2z, w2r = system.single_ion_frequencies()
    return (system.ion1.mass, system.ion2.mass, w1z, w1r, w2z, w2r)


def potential(system, coords, lib=math):
    """Pseudopotential plus Coulomb energy; coords = (x1, y1, z1, x2, y2, z2)."""
    m1, m2, w1z, w1r, w2z, w2r = _harmonic(system)
    x1, y1, z1, x2, y2, z2 = coords
    u = 0.5 * m1 * (w1r**2 * (x1**2 + y1**2) + w1z**2 * z1**2)
    u += 0.5 * m2 * (w2r**2 * (x2**2 + y2**2) + w2z**2 * z2**2)
    r = lib.sqrt((x1 - x2) ** 2 + (y1 - y2) ** 2 + (z1 - z2) ** 2)
    return u + COULOMB_K * system.ion1.charge * system.ion2.charge / r


def equilibrium_oracle(system):
    """Root of the axial force balance, each coordinate on its own length scale."""
    m1, m2, w1z, _, w2z, _ = _harmonic(system)
    c = COULOMB_K * system.ion1.charge * system.ion2.charge
    k1, k2 = m1 * w1z**2, m2 * w2z**2
    s1, s2 = (c / k1) ** (1 / 3), (c / k2) ** (1 / 3)

    def force(v):
        z1, z2 = v[0] * s1, v[1] * s2
        d2 = (z1 - z2) ** 2
        return [(-k1 * z1 + c / d2) / (k1 * s1), (-k2 * z2 - c / d2) / (k2 * s2)]

    sol = optimize.root(force, [0.5, -0.5], method="lm", options={"xtol": 1e-15, "ftol": 1e-15})
    assert np.max(np.abs(force(sol.x))) < 1e-12, sol
    return np.array([sol.x[0] * s1, sol.x[1] * s2])


def fd_stiffness(system, z_eq, h_rel=1e-6, dps=40):
    """Mass-weighted Hessian in (z1, z2, x1, x2) by central differences at high precision."""
    with mpmath.workdps(dps):
        z1, z2 = (mpmath.mpf(float(z)) for z in z_eq)
        masses = (system.ion1.mass, system.ion2.mass)
        idx = {0: 2, 1: 5, 2: 0, 3: 3}  # (z1, z2, x1, x2) -> coordinate slot
        base = [mpmath.mpf(0)] * 6
        base[2], base[5] = z1, z2
        h = mpmath.mpf(h_rel) * abs(z1 - z2)

        def U(shifts):
            c = list(base)
            for slot, d in shifts:
                c[slot] += d
            return potential(system, c, lib=mpmath)

        K = np.zeros((4, 4))
        for a in range(4):
            for b in range(4):
                sa, sb = idx[a], idx[b]
                val = (U([(sa, h), (sb, h)]) - U([(sa, h), (sb, -h)])
                       - U([(sa, -h), (sb, h)]) + U([(sa, -h), (sb, -h)])) / (4 * h * h)
                K[a, b] = float(val / mpmath.sqrt(masses[a % 2] * masses[b % 2]))
        return K


def symbolic_stiffness(system, z_eq):
    """Same Hessian by exact symbolic differentiation, evaluated at ``z_eq``."""
    import sympy as sp
    m1, m2, w1z, w1r, w2z, w2r = _harmonic(system)
    x1, y1, z1, x2, y2, z2 = sp.symbols("x1 y1 z1 x2 y2 z2", real=True)
    U = potential(system, (x1, y1, z1, x2, y2, z2), lib=sp)
    coords = (z1, z2, x1, x2)
    point = {x1: 0, y1: 0, x2: 0, y2: 0,
             z1: sp.Float(float(z_eq[0]), 40), z2: sp.Float(float(z_eq[1]), 40)}
    K = np.zeros((4, 4))
    masses = (m1, m2)
    for a in range(4):
        for b in range(4):
            val = sp.diff(U, coords[a], coords[b]).subs(point)
            K[a, b] = float(sp.N(val, 30)) / math.sqrt(masses[a % 2] * masses[b % 2])
    return K


# CSL k-space quadrature ---------------------------------------------------

def csl_power_quadrature(system, z_eq, omega, eigvec, axial, lam, r_c, n_nodes=12,
                         shift=True):
    """Point-like CSL heating by 3D Gauss-Hermite quadrature over k.

    Integrand: lam r_c^3 hbar omega / (pi^1.5 m0^2) e^{-k^2 r_c^2}
    sum_ij m_i m_j c_i c_j cos(k_z dz_ij), with c_i = sqrt(hbar/(2 m_i omega))
    (k . axis) w_i. With ``shift`` the k_z contour is moved by i dz/(2 r_c^2)
    so the oscillatory factor becomes a Gaussian weight.
    """
    u, wts = np.polynomial.hermite.hermgauss(n_nodes)
    masses = (system.ion1.mass, system.ion2.mass)
    total = 0.0
    for i in range(2):
        for j in range(2):
            s = (z_eq[i] - z_eq[j]) / r_c
            if shift:
                uz = u + 0.5j * s
                phase = np.exp(-0.25 * s * s)
                wz = wts * phase
            else:
                uz = u.astype(complex)
                wz = wts * np.exp(1j * u * s)
            UX, UY, UZ = np.meshgrid(u, u, uz, indexing="ij")
            WX, WY, WZ = np.meshgrid(wts, wts, wz, indexing="ij")
            k_axis = (UZ if axial else UX) / r_c
            ci = math.sqrt(HBAR / (2 * masses[i] * omega)) * eigvec[i]
            cj = math.sqrt(HBAR / (2 * masses[j] * omega)) * eigvec[j]
            integrand = masses[i] * masses[j] * ci * cj * k_axis**2
            # d^3k = d^3u / r_c^3; e^{-u^2} carried by the weights
            total += (np.sum(WX * WY * WZ * integrand) / r_c**3).real
    return lam * r_c**3 * HBAR * omega / (math.pi**1.5 * M0**2) * total


# noise ---------------------------------------------------------------------

def single_ion_noise_power(charge, mass, omega, sigma2, tau_c, t_total):
    """Energy gain rate of one ion in OU field noise by direct time-domain integration.

    With C(tau) = sigma^2 exp(-|tau|/tau_c), the one-sided PSD in the
    convention used by the package is S = 2 sigma^2 tau_c / (1 + omega^2 tau_c^2).
    """
    from scipy import integrate

    def corr(tau):
        return sigma2 * math.exp(-abs(tau) / tau_c)

    # (1/t) * int_{-t}^{t} (t - |tau|) cos(omega tau) C(tau) d tau, split at zero
    val, _ = integrate.quad(lambda tau: 2 * (t_total - tau) * math.cos(omega * tau) * corr(tau),
                            0, t_total, limit=2000)
    s_eff = val / t_total
    return charge**2 * s_eff / (2 * mass)
