"""Roots of the dispersion relation, group velocities and the lambda-form S*, k*.

The quadratic for the acoustic roots is

    D k^2 + 2 P k + (Upsilon - mu^2) = 0,   D = |xi|^2 - U^2,   P = Xi + mu U,

with mu = omega - V l - W m, Xi = l |xi.eta| + m |xi.zeta| and
Upsilon = l^2 |eta|^2 + m^2 |zeta|^2 + 2 l m |eta.zeta|.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CriticalStreamwise, DegeneratePrefactor, SonicDegenerate, ZeroAlphaVector
from .matrices import WaveVector
from .metrics import MeanFlow, Metric, compute_norms, contravariant

__all__ = [
    "WaveVector", "LambdaPair", "RootSet", "KINDS",
    "roots_k", "roots_omega", "group_velocity_acoustic", "s_star", "k_star",
]

KINDS = ("entropy", "vorticity_zeta", "vorticity_eta", "acoustic_down", "acoustic_up")

_STREAMWISE_TOL = 1e-12
_SONIC_TOL = 1e-12
_PREFACTOR_TOL = 1e-14


class LambdaPair(NamedTuple):
    lambda1: complex
    lambda2: complex

    @classmethod
    def from_wave(cls, wave: WaveVector) -> "LambdaPair":
        if wave.omega == 0:
            raise ValueError("lambda form needs a nonzero frequency")
        return cls(complex(wave.l) / wave.omega, complex(wave.m) / wave.omega)


@dataclass(frozen=True)
class RootSet:
    """The five k-roots at fixed (l, m, omega).

    ``directions[n]`` is the pair (at_inflow, at_outflow) with values
    "incoming" or "outgoing", resolved from the sign of the normal group
    velocity in the one-dimensional limit.
    """

    k: np.ndarray
    kinds: tuple
    directions: tuple

    def as_dict(self) -> dict:
        return {
            "roots": [
                {
                    "n": n + 1,
                    "k": [float(self.k[n].real), float(self.k[n].imag)],
                    "kind": self.kinds[n],
                    "inflow": self.directions[n][0],
                    "outflow": self.directions[n][1],
                }
                for n in range(5)
            ]
        }


def _check_streamwise(m: Metric, flow: MeanFlow):
    norms = compute_norms(m)
    U, V, W = contravariant(m, flow)
    c = flow.c_bar if flow.dimensional else 1.0
    speed = c * norms.norm_xi
    if abs(U) <= _STREAMWISE_TOL * speed:
        raise CriticalStreamwise("contravariant normal velocity U is zero")
    D = speed**2 - U**2
    if abs(D) <= _SONIC_TOL * speed**2:
        raise SonicDegenerate("|xi| equals |U|: sonic normal velocity")
    return norms, U, V, W, c, D


def _directions(U: float, speed: float) -> tuple:
    def classify(cg):
        # inflow face at xi = 0 (domain on +xi side), outflow at xi = 1
        return ("incoming", "outgoing") if cg > 0 else ("outgoing", "incoming")

    return tuple(classify(cg) for cg in (U, U, U, U + speed, U - speed))


def _quadratic_roots(D, P, C):
    """Both roots of D k^2 + 2 P k + C = 0, avoiding cancellation."""
    if abs(P) > _PREFACTOR_TOL * abs(D * C) ** 0.5:
        S = cmath.sqrt(1.0 - D * C / P**2)
        r1 = P * (-1.0 + S) / D
        r2 = P * (-1.0 - S) / D
        # recover the cancellation-prone root from the product C / D
        if abs(r1) < abs(r2):
            r1 = C / (D * r2) if r2 != 0 else r1
        else:
            r2 = C / (D * r1) if r1 != 0 else r2
        return r1, r2
    # prefactor vanishes: stable q-form
    disc = cmath.sqrt(P * P - D * C)
    q = -(P + disc) if abs(P + disc) >= abs(P - disc) else -(P - disc)
    if q == 0:
        return 0j, 0j
    return q / D, C / q


def roots_k(m: Metric, flow: MeanFlow, l, m_wn, omega) -> RootSet:
    """Five k-roots of the dispersion relation at (l, m, omega).

    Root 4 is the downstream acoustic branch: the root with the larger
    imaginary part when the roots are complex, otherwise the root with the
    larger group velocity.
    """
    norms, U, V, W, c, D = _check_streamwise(m, flow)
    l, m_wn, omega = complex(l), complex(m_wn), complex(omega)
    mu = omega - V * l - W * m_wn
    k1 = mu / U
    Xi = l * norms.dot_xieta + m_wn * norms.dot_xizeta
    Ups = l * l * norms.norm_eta**2 + m_wn * m_wn * norms.norm_zeta**2 + 2 * l * m_wn * norms.dot_etazeta
    # in dimensional form the acoustic speed is c |alpha|
    Dq = c * c * norms.norm_xi**2 - U * U
    Pq = c * c * Xi + mu * U
    Cq = c * c * Ups - mu * mu
    r1, r2 = _quadratic_roots(Dq, Pq, Cq)
    scale = max(abs(r1), abs(r2), 1e-300)
    if abs(r1.imag - r2.imag) > 1e-13 * scale:
        k4, k5 = (r1, r2) if r1.imag > r2.imag else (r2, r1)
    else:
        k4, k5 = (r1, r2) if _cg(m, U, V, W, c, r1, l, m_wn, omega) >= _cg(m, U, V, W, c, r2, l, m_wn, omega) else (r2, r1)
    k = np.array([k1, k1, k1, k4, k5], dtype=complex)
    return RootSet(k=k, kinds=KINDS, directions=_directions(U, c * norms.norm_xi))


def _cg(m, U, V, W, c, k, l, m_wn, omega):
    # implicit differentiation of beta^2 = c^2 |alpha|^2
    beta = U * k + V * l + W * m_wn - omega
    if beta == 0:
        return U
    alpha = k * m.xi + l * m.eta + m_wn * m.zeta
    return float((U - c * c * (alpha @ m.xi) / beta).real)


def roots_omega(m: Metric, flow: MeanFlow, k, l, m_wn) -> np.ndarray:
    """Five frequencies: the triple advective root and the two acoustic roots."""
    U, V, W = contravariant(m, flow)
    c = flow.c_bar if flow.dimensional else 1.0
    k, l, m_wn = complex(k), complex(l), complex(m_wn)
    adv = U * k + V * l + W * m_wn
    alpha = k * m.xi + l * m.eta + m_wn * m.zeta
    rad = c * cmath.sqrt(complex(alpha @ alpha))
    return np.array([adv, adv, adv, adv + rad, adv - rad], dtype=complex)


def group_velocity_acoustic(m: Metric, flow: MeanFlow, k, l, m_wn):
    """Normal group velocities (cg4, cg5) of the two acoustic roots."""
    U, _, _ = contravariant(m, flow)
    c = flow.c_bar if flow.dimensional else 1.0
    alpha = complex(k) * m.xi + complex(l) * m.eta + complex(m_wn) * m.zeta
    amag = cmath.sqrt(complex(alpha @ alpha))
    if abs(amag) == 0.0:
        raise ZeroAlphaVector("acoustic group velocity undefined for alpha = 0")
    term = c * complex(alpha @ m.xi) / amag
    return U + term, U - term


def _star_terms(m: Metric, flow: MeanFlow, lp: LambdaPair):
    norms, U, V, W, c, D = _check_streamwise(m, flow)
    l1, l2 = complex(lp[0]), complex(lp[1])
    mu = 1.0 - V * l1 - W * l2
    Xi = c * c * (l1 * norms.dot_xieta + l2 * norms.dot_xizeta)
    Ups = c * c * (l1 * l1 * norms.norm_eta**2 + l2 * l2 * norms.norm_zeta**2
                   + 2 * l1 * l2 * norms.dot_etazeta)
    P = Xi + mu * U
    return D, P, Ups, mu, norms, c


def s_star(m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0) -> complex:
    """S* in lambda form with the branch rule applied.

    A real positive radicand at real frequency and real P yields the root
    with the sign of P, so that P S -> |xi| and k4* -> 1/(U + |xi|).
    Otherwise the sign is chosen so that omega * k4* has nonnegative
    imaginary part (downstream branch decays into the domain).
    """
    D, P, Ups, mu, norms, c = _star_terms(m, flow, lp)
    scale = abs(mu) * abs(contravariant(m, flow)[0]) + c * c * norms.norm_xi**2 * abs(lp[0]) + c * c * norms.norm_xi**2 * abs(lp[1])
    if abs(P) <= _PREFACTOR_TOL * max(scale, 1e-300):
        raise DegeneratePrefactor("Xi* + mu* U vanishes")
    rad = 1.0 - D * (Ups - mu * mu) / (P * P)
    omega = complex(omega)
    if omega.imag == 0 and rad.imag == 0 and rad.real >= 0 and P.imag == 0:
        return complex(np.copysign(np.sqrt(rad.real), P.real))
    s = cmath.sqrt(rad)
    k4 = omega * P * (-1.0 + s) / D
    k4_alt = omega * P * (-1.0 - s) / D
    if k4.imag < k4_alt.imag or (k4.imag == k4_alt.imag and s.real < 0):
        s = -s
    return s


def k_star(n: int, m: Metric, flow: MeanFlow, lp: LambdaPair, omega=1.0) -> complex:
    """k_n / omega as a function of (lambda1, lambda2)."""
    if n in (1, 2, 3):
        _, U, V, W, _, _ = _check_streamwise(m, flow)
        return (1.0 - V * complex(lp[0]) - W * complex(lp[1])) / U
    if n not in (4, 5):
        raise ValueError(f"mode index must be 1..5, got {n}")
    D, P, Ups, mu, _, _ = _star_terms(m, flow, lp)
    S = s_star(m, flow, lp, omega)
    r_up = P * (-1.0 + S) / D
    r_dn = P * (-1.0 - S) / D
    # product of roots is (Ups - mu^2) / D; use it for the small one
    C = Ups - mu * mu
    if abs(r_up) < abs(r_dn) and r_dn != 0:
        r_up = C / (D * r_dn)
    elif abs(r_dn) < abs(r_up) and r_up != 0:
        r_dn = C / (D * r_up)
    return r_up if n == 4 else r_dn
