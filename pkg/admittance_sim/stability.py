"""Closed-loop characteristic polynomial of the mass-compensated admittance loop and its stability tests.

Polynomials are real coefficient arrays in ascending powers of s, the
`numpy.polynomial.polynomial` convention.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from .controller import critical_damping
from .errors import ParameterError
from .models import AdmittanceParams, StabilitySweep

logger = logging.getLogger("admittance_sim.stability")

TRIM_TOLERANCE = 1e-12


def trim(coefficients: Sequence[float], tol: float = TRIM_TOLERANCE) -> np.ndarray:
    """Drops highest-power coefficients that are zero relative to the largest one."""
    c = np.asarray(coefficients, dtype=np.float64).ravel()
    if c.size == 0:
        return c
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return c[:0]
    nonzero = np.nonzero(np.abs(c) > tol * scale)[0]
    return c[: nonzero[-1] + 1]


def _strip_common_s(num: np.ndarray, den: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    while num.size > 1 and den.size > 1 and num[0] == 0.0 and den[0] == 0.0:
        num, den = num[1:], den[1:]
    return num, den


@dataclass(frozen=True)
class RationalTransfer:
    numerator: np.ndarray
    denominator: np.ndarray

    def __post_init__(self):
        num = trim(self.numerator)
        den = trim(self.denominator)
        if den.size == 0:
            raise ParameterError("Transfer function denominator is identically zero")
        num, den = _strip_common_s(num if num.size else np.zeros(1), den)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    def __call__(self, s: complex) -> complex:
        return P.polyval(s, self.numerator) / P.polyval(s, self.denominator)

    @property
    def is_constant(self) -> bool:
        return self.numerator.size <= 1 and self.denominator.size == 1


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    max_real_part: float
    roots: Tuple[complex, ...] = field(default_factory=tuple)
    degenerate: bool = False

    @property
    def label(self) -> str:
        if self.degenerate:
            return "vacuously stable (degenerate)"
        return "stable" if self.stable else "unstable"


def transfer_functions(params: AdmittanceParams) -> Tuple[RationalTransfer, RationalTransfer]:
    """Z(s) = M s + B + K/s (force to velocity inverse) and Y(s) = 1/Z(s)."""
    mbk = [params.k_a, params.b_a, params.m_a]
    z = RationalTransfer(np.array(mbk), np.array([0.0, 1.0]))
    y = RationalTransfer(np.array([0.0, 1.0]), np.array(mbk))
    return z, y


def estimator_transfer(gain: float, t_f: float = 0.0) -> RationalTransfer:
    """M̂_u(s) = gain / (T_f·s + 1); T_f = 0 is a perfect instantaneous estimate."""
    if t_f < 0:
        raise ParameterError(f"Estimator lag must be non-negative, got {t_f}")
    return RationalTransfer(np.array([gain]), np.array([1.0, t_f]))


def estimator_lag(window: int, rate_hz: float) -> float:
    """Time constant matching a moving average of `window` samples: its mean delay."""
    return window / (2.0 * rate_hz)


def robot_transfer(tau_v: float) -> RationalTransfer:
    """Inner velocity loop R(s) = 1/(τ_v·s + 1); τ_v = 0 is an ideal robot."""
    if tau_v < 0:
        raise ParameterError(f"Robot time constant must be non-negative, got {tau_v}")
    return RationalTransfer(np.array([1.0]), np.array([1.0, tau_v]))


def characteristic_coefficients(
    m_a: float, b_a: float, k_a: float, m_u: float, m_u_hat: RationalTransfer, r: RationalTransfer
) -> np.ndarray:
    """Numerator of (M s² + B s + K)(M_u − M̂_u(s))·s + R(s) over the common denominator.

    No sign checks on the virtual parameters, so sweeps may cover negative damping.
    """
    n_m, d_m = m_u_hat.numerator, m_u_hat.denominator
    n_r, d_r = r.numerator, r.denominator
    mass_error = P.polysub(m_u * d_m, n_m)
    first = P.polymul(P.polymul(P.polymul([k_a, b_a, m_a], [0.0, 1.0]), mass_error), d_r)
    return trim(P.polyadd(first, P.polymul(n_r, d_m)))


def characteristic_polynomial(
    params: AdmittanceParams, m_u: float, m_u_hat: RationalTransfer, r: RationalTransfer
) -> np.ndarray:
    if m_u < 0:
        raise ParameterError(f"Payload mass must be non-negative, got {m_u}")
    return characteristic_coefficients(params.m_a, params.b_a, params.k_a, m_u, m_u_hat, r)


def is_degenerate(poly: Sequence[float]) -> bool:
    return trim(poly).size <= 1


def assess(poly: Sequence[float], margin: float = 0.0) -> StabilityVerdict:
    """Companion-matrix roots; stable iff every real part is below −margin."""
    c = trim(poly)
    if is_degenerate(c):
        return StabilityVerdict(True, -math.inf, (), degenerate=True)
    roots = np.linalg.eigvals(P.polycompanion(c)) if c.size > 2 else np.array([-c[0] / c[1]])
    max_real = float(np.max(roots.real))
    return StabilityVerdict(max_real < -margin, max_real, tuple(complex(r) for r in roots))


def routh_hurwitz(poly: Sequence[float], eps: float = 1e-9) -> bool:
    """Routh array test: true iff the whole first column keeps the sign of the leading coefficient.

    A zero pivot is replaced by `eps` (relative to the coefficient scale); a row
    that vanishes entirely means roots symmetric about the origin, so the
    polynomial is not strictly Hurwitz.
    """
    c = trim(poly)
    if is_degenerate(c):
        return True
    desc = c[::-1] / c[-1]
    scale = float(np.max(np.abs(desc)))
    zero_tol = TRIM_TOLERANCE * scale

    n = desc.size
    width = (n + 1) // 2
    upper = np.zeros(width)
    lower = np.zeros(width)
    upper[: len(desc[0::2])] = desc[0::2]
    lower[: len(desc[1::2])] = desc[1::2]
    first_column = [upper[0]]

    for _ in range(n - 1):
        if np.all(np.abs(lower) <= zero_tol):
            return False
        if abs(lower[0]) <= zero_tol:
            lower = lower.copy()
            lower[0] = eps * scale
        first_column.append(lower[0])
        nxt = np.zeros(width)
        nxt[:-1] = (lower[0] * upper[1:] - upper[0] * lower[1:]) / lower[0]
        upper, lower = lower, nxt

    return all(x > 0 for x in first_column)


@dataclass(frozen=True)
class StabilityRow:
    k_a: float
    b_a: float
    tau_v: float
    t_f: float
    m_u_hat_gain: float
    max_real_part: float
    stable: bool
    method_agreement: bool
    degenerate: bool


def stability_sweep(sweep: StabilitySweep) -> List[StabilityRow]:
    """Evaluates the characteristic polynomial on the k × b × τ_v × T_f × gain grid."""
    rows = []
    for k_a, tau_v, t_f, gain in itertools.product(sweep.k_values, sweep.tau_values, sweep.tf_values, sweep.gain_values):
        b_values: Optional[List[float]] = sweep.b_values
        for b_a in b_values if b_values is not None else [critical_damping(sweep.m_a, k_a)]:
            poly = characteristic_coefficients(
                sweep.m_a, b_a, k_a, sweep.m_u, estimator_transfer(gain, t_f), robot_transfer(tau_v)
            )
            verdict = assess(poly, sweep.margin)
            agreement = verdict.degenerate or routh_hurwitz(poly) == (verdict.max_real_part < 0.0)
            if not agreement:
                logger.warning(
                    f"Root finder and Routh table disagree at k={k_a}, b={b_a}, tau={tau_v}, T_f={t_f}, gain={gain}"
                )
            rows.append(
                StabilityRow(k_a, b_a, tau_v, t_f, gain, verdict.max_real_part, verdict.stable, agreement, verdict.degenerate)
            )
    unstable = sum(1 for row in rows if not row.stable)
    logger.info(f"Stability sweep: {len(rows)} grid points, {unstable} unstable")
    return rows
