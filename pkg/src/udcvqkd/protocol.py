"""Unidimensional CV QKD protocol: states, channels, bounds, key rates.

The sender Gaussian-modulates a single quadrature (x) of a squeezed,
coherent, or antisqueezed signal state; the receiver homodynes the same
quadrature.  The correlation of the unmodulated p quadrature across the
channel is unknown to the trusted parties, so security is evaluated at the
value of that correlation, allowed by the uncertainty principle, that
maximizes the eavesdropper's Holevo information.

All operations are pure functions with no shared state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnphysicalObservation, UnphysicalState
from .gaussian import (
    CovMatrix,
    PHYSICALITY_TOL,
    _batch_entropy,
    _min_uncertainty_eig,
    entropy_g,
    von_neumann_entropy,
)

LOG2E = math.log2(math.e)

# Numerical policy for the worst-case correlation search.
WORST_CASE_GRID_POINTS = 1001
WORST_CASE_XTOL = 1e-10
HOLEVO_FLOOR_TOL = 1e-9
# Observations this close below the parabola vertex are treated as sitting
# on it, so that exactly-critical channels (e.g. pure loss on a coherent
# state) survive floating-point rounding.
VERTEX_SLACK = 1e-12

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ProtocolParams:
    """Source and modulation settings.

    V_S is the signal variance of the modulated quadrature (squeezed < 1,
    coherent = 1, antisqueezed > 1), V_M the Gaussian modulation variance,
    beta the reconciliation efficiency in (0, 1].
    """

    V_S: float
    V_M: float
    beta: float = 1.0

    def __post_init__(self):
        if not self.V_S > 0.0:
            raise DomainError("V_S must be positive")
        if not self.V_M >= 0.0:
            raise DomainError("V_M must be nonnegative")
        if not 0.0 < self.beta <= 1.0:
            raise DomainError("beta must lie in (0, 1]")

    @property
    def tmsv_variance(self) -> float:
        """Variance of the two-mode squeezed vacuum purifying the modulation."""
        return math.sqrt(1.0 + self.V_M / self.V_S)


@dataclass(frozen=True)
class ChannelParams:
    """Per-quadrature transmittances and input-referred excess noises.

    Transmittances must lie in (0, 1]; the zero-transmittance limit is
    excluded.  Excess noise is in shot-noise units.
    """

    eta_x: float
    eta_p: float
    eps_x: float = 0.0
    eps_p: float = 0.0

    def __post_init__(self):
        for name in ("eta_x", "eta_p"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise DomainError(f"{name} must lie in (0, 1]")
        for name in ("eps_x", "eps_p"):
            if not getattr(self, name) >= 0.0:
                raise DomainError(f"{name} must be nonnegative")

    @classmethod
    def symmetric(cls, eta: float, eps: float = 0.0) -> "ChannelParams":
        """Phase-insensitive channel: same transmittance and noise in x and p."""
        return cls(eta_x=eta, eta_p=eta, eps_x=eps, eps_p=eps)


@dataclass(frozen=True)
class ObservedStats:
    """Second moments the trusted parties can estimate.

    The x-quadrature correlation C_x is known from the modulation data;
    the p-quadrature correlation is deliberately absent because it cannot
    be estimated without modulating p.
    """

    V_x_B: float
    V_p_B: float
    C_x: float

    def __post_init__(self):
        if not (self.V_x_B > 0.0 and self.V_p_B > 0.0):
            raise DomainError("observed variances must be positive")

    @classmethod
    def from_parameters(
        cls,
        params: ProtocolParams,
        chan: ChannelParams,
        strict_paper_vpb: bool = False,
    ) -> "ObservedStats":
        v_x = chan.eta_x * (params.V_S + params.V_M + chan.eps_x) + 1.0 - chan.eta_x
        v_p = chan.eta_p * (1.0 / params.V_S + chan.eps_p)
        if not strict_paper_vpb:
            v_p += 1.0 - chan.eta_p
        c_x = math.sqrt(chan.eta_x * params.V_M) * math.sqrt(params.tmsv_variance)
        return cls(V_x_B=v_x, V_p_B=v_p, C_x=c_x)


class ReconciliationDirection(enum.Enum):
    """Which party's data the error correction is referenced to."""

    DIRECT = "dr"
    REVERSE = "rr"


@dataclass(frozen=True)
class SecurityAssessment:
    """Worst-case security figures for one parameter point.

    key_rate equals beta * mutual_info - holevo; worst_Cp is the
    correlation inside Cp_interval at which the Holevo bound peaks.
    """

    mutual_info: float
    holevo: float
    key_rate: float
    worst_Cp: float
    Cp_interval: tuple[float, float]
    physical: bool


def build_eb_state(params: ProtocolParams) -> CovMatrix:
    """Entanglement-based two-mode state equivalent to the modulated source.

    A two-mode squeezed vacuum of variance V = sqrt(1 + V_M/V_S) with one
    mode squeezed so that homodyning x on mode A conditionally prepares
    diag(V_S, 1/V_S) in mode B, while mode B alone carries
    diag(V_S + V_M, 1/V_S), the modulated signal sent into the channel.
    The state is pure by construction.
    """
    v = params.tmsv_variance
    c_x = math.sqrt(v * params.V_M)
    c_p = -math.sqrt(params.V_M / v) / params.V_S
    mat = np.array(
        [
            [v, 0.0, c_x, 0.0],
            [0.0, v, 0.0, c_p],
            [c_x, 0.0, params.V_S + params.V_M, 0.0],
            [0.0, c_p, 0.0, 1.0 / params.V_S],
        ]
    )
    return CovMatrix(mat)


def _output_matrix(
    params: ProtocolParams,
    eta_x: float,
    eps_x: float,
    c_p: float,
    v_p_b: float,
) -> np.ndarray:
    """Two-mode covariance shared after the channel, for a given p correlation."""
    v = params.tmsv_variance
    c_x = math.sqrt(eta_x * params.V_M) * math.sqrt(v)
    v_x_b = eta_x * (params.V_S + params.V_M + eps_x) + 1.0 - eta_x
    return np.array(
        [
            [v, 0.0, c_x, 0.0],
            [0.0, v, 0.0, c_p],
            [c_x, 0.0, v_x_b, 0.0],
            [0.0, c_p, 0.0, v_p_b],
        ]
    )


def apply_channel(
    params: ProtocolParams, chan: ChannelParams, C_p: float
) -> CovMatrix:
    """State shared between the parties after the phase-sensitive channel.

    The x side is fixed by the channel; the p correlation C_p is supplied
    by the caller because the trusted parties cannot measure it
    (physicality of the result is tested separately, not here).  Bob's p
    variance is modeled as eta_p (1/V_S + eps_p) + 1 - eta_p, i.e. with
    the channel's vacuum contribution included.
    """
    v_p_b = chan.eta_p * (1.0 / params.V_S + chan.eps_p) + 1.0 - chan.eta_p
    return CovMatrix(_output_matrix(params, chan.eta_x, chan.eps_x, C_p, v_p_b))


def mutual_information(params: ProtocolParams, chan: ChannelParams) -> float:
    """Classical mutual information (bits) of the modulated quadrature.

    (1/2) log2[1 + eta_x V_M / (1 + eta_x (V_S + eps_x - 1))]; identical
    for direct and reverse reconciliation.
    """
    snr = chan.eta_x * params.V_M / (1.0 + chan.eta_x * (params.V_S + chan.eps_x - 1.0))
    return 0.5 * math.log2(1.0 + snr)


def physicality_parabola(
    params: ProtocolParams, chan: ChannelParams
) -> tuple[float, float, float]:
    """Vertex and curvature of the physicality bound on the p correlation.

    Returns (V0, C0, coeff): the unknown correlation C_p is compatible
    with the uncertainty principle iff

        (C_p - C0)**2 <= coeff * (V_p_B - V0).

    Only the x-quadrature channel parameters enter.
    """
    v0 = 1.0 / (1.0 + chan.eta_x * (params.V_S + chan.eps_x - 1.0))
    c0 = (
        -v0
        * math.sqrt(chan.eta_x * params.V_M)
        / (params.V_M / params.V_S + 1.0) ** 0.25
    )
    coeff = (
        params.V_M
        / math.sqrt(params.V_S * (params.V_S + params.V_M))
        * (1.0 - chan.eta_x * params.V_S * v0)
    )
    return v0, c0, coeff


def physicality_interval(
    params: ProtocolParams, chan: ChannelParams, V_p_B: float
) -> tuple[float, float] | None:
    """Allowed range of the unknown p correlation for an observed V_p_B.

    Returns (lo, hi), a degenerate point when the observation sits on the
    parabola vertex or the curvature vanishes, or None when no physical
    state is compatible (V_p_B below the vertex).
    """
    if not V_p_B > 0.0:
        raise DomainError("V_p_B must be positive")
    v0, c0, coeff = physicality_parabola(params, chan)
    dv = V_p_B - v0
    if dv < -VERTEX_SLACK * max(1.0, abs(v0)):
        return None
    half = math.sqrt(max(coeff, 0.0) * max(dv, 0.0))
    return (c0 - half, c0 + half)


def _conditional_nu(
    params: ProtocolParams,
    chan: ChannelParams,
    V_p_B: float,
    direction: ReconciliationDirection,
) -> float:
    """Symplectic eigenvalue of the state left after the reference side's
    homodyne measurement; both conditional states are single-mode and
    diagonal, so nu is the square root of the determinant."""
    b = chan.eta_x * (params.V_S + chan.eps_x - 1.0) + 1.0
    if direction is ReconciliationDirection.DIRECT:
        return math.sqrt(b * V_p_B)
    v_x_b = chan.eta_x * (params.V_S + params.V_M + chan.eps_x) + 1.0 - chan.eta_x
    return params.tmsv_variance * math.sqrt(b / v_x_b)


def _floor_holevo(chi: float) -> float:
    if chi < -HOLEVO_FLOOR_TOL:
        raise RuntimeError(
            f"Holevo bound evaluated to {chi!r}; conditioning exceeded the "
            "joint entropy beyond numerical tolerance"
        )
    return max(chi, 0.0)


def holevo_bound(
    params: ProtocolParams,
    chan: ChannelParams,
    C_p: float,
    V_p_B: float,
    direction: ReconciliationDirection,
    tol: float = PHYSICALITY_TOL,
) -> float:
    """Eavesdropper's Holevo information (bits) at a specific p correlation.

    Difference between the entropy of the shared two-mode state and the
    entropy conditioned on the reference side's homodyne outcome.  Small
    negative values (within 1e-9) are clamped to zero.

    Raises UnphysicalState when the two-mode state at (C_p, V_p_B) violates
    the uncertainty principle beyond tol.
    """
    mat = _output_matrix(params, chan.eta_x, chan.eps_x, C_p, V_p_B)
    if _min_uncertainty_eig(mat[np.newaxis])[0] < -tol:
        raise UnphysicalState(
            f"two-mode state with C_p={C_p!r}, V_p_B={V_p_B!r} is unphysical"
        )
    s_ab = von_neumann_entropy(CovMatrix(mat))
    s_cond = entropy_g(_conditional_nu(params, chan, V_p_B, direction))
    return _floor_holevo(s_ab - s_cond)


def _entropy_on_grid(
    params: ProtocolParams, chan: ChannelParams, V_p_B: float, cps: np.ndarray
) -> np.ndarray:
    mats = np.repeat(
        _output_matrix(params, chan.eta_x, chan.eps_x, 0.0, V_p_B)[np.newaxis],
        len(cps),
        axis=0,
    )
    mats[:, 1, 3] = cps
    mats[:, 3, 1] = cps
    return _batch_entropy(mats)


def _worst_case_correlation(
    params: ProtocolParams,
    chan: ChannelParams,
    V_p_B: float,
    direction: ReconciliationDirection,
    lo: float,
    hi: float,
) -> tuple[float, float]:
    """Maximize the Holevo bound over the physical correlation interval.

    Dense grid (endpoints included) followed by golden-section refinement
    around the best cell; the conditional entropy does not depend on the
    correlation, so only the joint entropy is scanned.
    """
    s_cond = entropy_g(_conditional_nu(params, chan, V_p_B, direction))

    def joint_entropy(cp: float) -> float:
        return float(_entropy_on_grid(params, chan, V_p_B, np.array([cp]))[0])

    if hi - lo <= WORST_CASE_XTOL:
        cp = 0.5 * (lo + hi)
        return cp, _floor_holevo(joint_entropy(cp) - s_cond)

    grid = np.linspace(lo, hi, WORST_CASE_GRID_POINTS)
    values = _entropy_on_grid(params, chan, V_p_B, grid)
    best = int(np.argmax(values))

    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, len(grid) - 1)]
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc = joint_entropy(c)
    fd = joint_entropy(d)
    while b - a > WORST_CASE_XTOL:
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = joint_entropy(d)
        else:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = joint_entropy(c)
    refined = 0.5 * (a + b)

    candidates = [
        (grid[0], float(values[0])),
        (grid[-1], float(values[-1])),
        (grid[best], float(values[best])),
        (refined, joint_entropy(refined)),
    ]
    cp, s_ab = max(candidates, key=lambda pair: pair[1])
    return cp, _floor_holevo(s_ab - s_cond)


def key_rate(
    params: ProtocolParams,
    chan: ChannelParams,
    V_p_B: float,
    direction: ReconciliationDirection,
) -> SecurityAssessment:
    """Worst-case asymptotic key rate for an observed p variance.

    K = beta * I - max over physical C_p of the Holevo bound.  May be
    negative.  Raises UnphysicalObservation when no physical state matches
    the observed V_p_B.
    """
    interval = physicality_interval(params, chan, V_p_B)
    if interval is None:
        raise UnphysicalObservation(
            f"V_p_B={V_p_B!r} lies below the physicality parabola vertex"
        )
    mi = mutual_information(params, chan)
    worst_cp, chi = _worst_case_correlation(
        params, chan, V_p_B, direction, interval[0], interval[1]
    )
    return SecurityAssessment(
        mutual_info=mi,
        holevo=chi,
        key_rate=params.beta * mi - chi,
        worst_Cp=worst_cp,
        Cp_interval=interval,
        physical=True,
    )


def symmetric_vpB(
    params: ProtocolParams,
    eta: float,
    eps_p: float,
    strict_paper: bool = False,
) -> float:
    """Bob's p variance through a channel with symmetric transmittance.

    Default restores the channel's vacuum contribution:
    eta (1/V_S + eps_p) + 1 - eta.  With strict_paper the vacuum term is
    dropped, which can yield a sub-vacuum variance for a lossy noiseless
    channel; it is provided for comparison only.
    """
    if not 0.0 < eta <= 1.0:
        raise DomainError("eta must lie in (0, 1]")
    if not eps_p >= 0.0:
        raise DomainError("eps_p must be nonnegative")
    out = eta * (1.0 / params.V_S + eps_p)
    return out if strict_paper else out + (1.0 - eta)


def _check_eta_open(eta: float) -> None:
    if not 0.0 < eta < 1.0:
        raise DomainError("eta must lie strictly inside (0, 1)")


def asymptotic_key_rate_dr(V_S: float, eta: float) -> float:
    """Strong-modulation limit of the direct-reconciliation key rate.

    Closed form for a symmetric noiseless channel with the worst-case
    correlation pinned to the physicality boundary.  Diverges at V_S = 1;
    use the coherent variant there.
    """
    _check_eta_open(eta)
    if V_S == 1.0:
        raise DomainError("V_S = 1 has a separate closed form (coherent variant)")
    c = math.sqrt((1.0 + eta * (1.0 / V_S - 1.0)) * (1.0 + eta * (V_S - 1.0)))
    s = eta * abs(1.0 - V_S)
    return LOG2E * (c * math.atanh(1.0 / c) - 1.0) + math.log2(s / (1.0 + s))


def asymptotic_key_rate_dr_coherent(eta: float) -> float:
    """Strong-modulation direct-reconciliation limit for coherent states."""
    _check_eta_open(eta)
    return math.log2(2.0 * eta) - 0.5 * math.log2(eta * (1.0 - eta)) - LOG2E


def asymptotic_key_rate_rr(V_S: float, eta: float) -> float:
    """Strong-modulation limit of the reverse-reconciliation key rate.

    Diverges at V_S = 1 (the |1 - V_S| term) and as the conditional
    eigenvalue D approaches 1; use the coherent variant at V_S = 1.
    """
    _check_eta_open(eta)
    if V_S == 1.0:
        raise DomainError("V_S = 1 has a separate closed form (coherent variant)")
    d = math.sqrt((1.0 + eta * (V_S - 1.0)) / (eta * V_S))
    if d <= 1.0 + 1e-12:
        raise DomainError(f"conditional eigenvalue D={d!r} too close to 1")
    return (
        (d / 2.0) * (math.log2((d + 1.0) / 2.0) - math.log2((d - 1.0) / 2.0))
        - math.log2(1.0 + eta * abs(1.0 - V_S))
        - LOG2E
    )


def asymptotic_key_rate_rr_coherent(eta: float) -> float:
    """Strong-modulation reverse-reconciliation limit for coherent states.

    (1/ln 2) [arctanh(sqrt(eta))/sqrt(eta) - 1]; approaches
    eta * log2(e) / 3 for small eta and diverges as eta -> 1.
    """
    _check_eta_open(eta)
    root = math.sqrt(eta)
    return (math.atanh(root) / root - 1.0) / math.log(2.0)
