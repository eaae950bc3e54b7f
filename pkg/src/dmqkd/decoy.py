"""Asymptotic two-decoy BB84 analysis: yield/error bounds and secure key rate.

Given per-class gains and QBERs (analytic or measured), bound the vacuum yield
Y0 and single-photon yield Y1 from below and the single-photon error e1 from
above, then evaluate the standard asymptotic key-rate formula. Bounds are
clamped to their physical ranges and never overestimate the rate obtained from
the true single-photon statistics of an honest channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import ConfigurationError, DegenerateDecoyError, UndefinedBoundError
from .linksim import (
    DecoyIntensities,
    GainQber,
    LinkParams,
    analytic_gain_qber,
    link_dark_prob,
    transmittance,
    with_loss,
)


@dataclass(frozen=True)
class RateBreakdown:
    """All intermediate quantities behind one secure-key-rate evaluation."""

    q_mu: float
    e_mu: float
    q_nu: float
    e_nu: float
    q_omega: float
    e_omega: float
    y0_l: float
    y1_l: float
    e1_u: float
    q1_l: float
    r_per_pulse: float
    r_bps: float


def binary_entropy(x: float) -> float:
    """H2(x) = -x log2 x - (1-x) log2(1-x), with H2(0) = H2(1) = 0."""
    if not (0.0 <= x <= 1.0):
        raise ConfigurationError(f"binary_entropy argument must lie in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def bound_y0(q_nu: float, q_omega: float, nu: float, omega: float) -> float:
    """Lower bound on the vacuum yield from the two decoy gains.

    With omega = 0 this reduces to reading Y0 directly off the vacuum gain.
    """
    if not nu > omega >= 0.0:
        raise DegenerateDecoyError(f"need nu > omega >= 0, got nu={nu}, omega={omega}")
    y0 = (nu * q_omega * math.exp(omega) - omega * q_nu * math.exp(nu)) / (nu - omega)
    return max(y0, 0.0)


def bound_y1(
    q_mu: float,
    q_nu: float,
    q_omega: float,
    mu: float,
    nu: float,
    omega: float,
    y0_l: float,
) -> float:
    """Lower bound on the single-photon yield, clamped to [0, 1]."""
    denom = mu * nu - mu * omega - nu * nu + omega * omega
    if denom <= 0.0:
        raise ConfigurationError(
            "decoy intensities violate mu > nu > omega and nu + omega < mu"
        )
    y1 = (mu / denom) * (
        q_nu * math.exp(nu)
        - q_omega * math.exp(omega)
        - ((nu * nu - omega * omega) / (mu * mu)) * (q_mu * math.exp(mu) - y0_l)
    )
    return min(max(y1, 0.0), 1.0)


def bound_e1(
    eq_nu: float, eq_omega: float, nu: float, omega: float, y1_l: float
) -> float:
    """Upper bound on the single-photon error rate, clamped to [0, 0.5].

    eq_nu and eq_omega are the error-gain products E*Q of the decoy and vacuum
    classes. Undefined when the Y1 bound vanishes; callers must then treat the
    key rate as zero.
    """
    if not nu > omega >= 0.0:
        raise DegenerateDecoyError(f"need nu > omega >= 0, got nu={nu}, omega={omega}")
    if y1_l <= 0.0:
        raise UndefinedBoundError("e1 bound undefined for y1_l = 0")
    e1 = (eq_nu * math.exp(nu) - eq_omega * math.exp(omega)) / ((nu - omega) * y1_l)
    return min(max(e1, 0.0), 0.5)


def secure_key_rate(
    mu_gain: GainQber,
    nu_gain: GainQber,
    omega_gain: GainQber,
    params: LinkParams,
    intens: DecoyIntensities,
) -> RateBreakdown:
    """Secure key rate from measured/analytic per-class gains and QBERs.

    r_per_pulse = q_sift * max(0, -Q_mu*f_ec*H2(E_mu) + Q1*(1 - H2(e1))) with
    q_sift = p_y_alice * p_y_bob and Q1 = Y1_lower * mu * exp(-mu);
    r_bps additionally carries the symbol clock and the Y-receiver efficiency
    factor (which is not part of the gains handed in here).
    """
    y0_l = bound_y0(nu_gain.q, omega_gain.q, intens.nu, intens.omega)
    y1_l = bound_y1(
        mu_gain.q, nu_gain.q, omega_gain.q, intens.mu, intens.nu, intens.omega, y0_l
    )
    if y1_l > 0.0:
        e1_u = bound_e1(
            nu_gain.e * nu_gain.q,
            omega_gain.e * omega_gain.q,
            intens.nu,
            intens.omega,
            y1_l,
        )
    else:
        e1_u = 0.5
    q1_l = y1_l * intens.mu * math.exp(-intens.mu)
    q_sift = params.p_y_alice * params.p_y_bob
    r_per_pulse = q_sift * max(
        0.0,
        -mu_gain.q * params.f_ec * binary_entropy(mu_gain.e)
        + q1_l * (1.0 - binary_entropy(e1_u)),
    )
    r_bps = r_per_pulse * params.clock * params.y_receiver_factor
    return RateBreakdown(
        q_mu=mu_gain.q,
        e_mu=mu_gain.e,
        q_nu=nu_gain.q,
        e_nu=nu_gain.e,
        q_omega=omega_gain.q,
        e_omega=omega_gain.e,
        y0_l=y0_l,
        y1_l=y1_l,
        e1_u=e1_u,
        q1_l=q1_l,
        r_per_pulse=r_per_pulse,
        r_bps=r_bps,
    )


def analytic_class_gains(
    params: LinkParams, intens: DecoyIntensities
) -> tuple[GainQber, GainQber, GainQber]:
    """Analytic (mu, nu, omega) gains/QBERs at the params' operating point."""
    eta = transmittance(params.loss_db, params.det_efficiency)
    y0 = link_dark_prob(params)
    return (
        analytic_gain_qber(intens.mu, eta, y0, params.e_det),
        analytic_gain_qber(intens.nu, eta, y0, params.e_det),
        analytic_gain_qber(intens.omega, eta, y0, params.e_det),
    )


def rate_at_loss(
    loss_db: float, params: LinkParams, intens: DecoyIntensities
) -> RateBreakdown:
    """Full analytic pipeline at one channel-loss point."""
    at = with_loss(params, loss_db)
    mu_g, nu_g, om_g = analytic_class_gains(at, intens)
    return secure_key_rate(mu_g, nu_g, om_g, at, intens)


@dataclass(frozen=True)
class SweepPoint:
    loss_db: float
    breakdown: RateBreakdown

    @property
    def qber(self) -> float:
        return self.breakdown.e_mu


def sweep_loss(
    loss_min: float,
    loss_max: float,
    step: float,
    params: LinkParams,
    intens: DecoyIntensities,
) -> list[SweepPoint]:
    """Evaluate the analytic rate over a loss range (inclusive of both ends)."""
    if step <= 0.0:
        raise ConfigurationError(f"sweep step must be > 0, got {step!r}")
    if loss_min > loss_max:
        return []
    points: list[SweepPoint] = []
    n = int(math.floor((loss_max - loss_min) / step + 1e-9))
    for i in range(n + 1):
        loss = loss_min + i * step
        points.append(SweepPoint(loss, rate_at_loss(loss, params, intens)))
    return points


def cutoff_loss(points: Iterable[SweepPoint]) -> float | None:
    """Largest swept loss with a positive key rate, or None."""
    positive = [p.loss_db for p in points if p.breakdown.r_bps > 0.0]
    return max(positive) if positive else None


SWEEP_CSV_HEADER = "loss_db,q_mu,e_mu,y1_l,e1_u,r_per_pulse,r_bps"


def sweep_csv_lines(points: Iterable[SweepPoint]) -> list[str]:
    """CSV rows for a sweep, full double precision."""
    lines = [SWEEP_CSV_HEADER]
    for p in points:
        b = p.breakdown
        lines.append(
            f"{p.loss_db!r},{b.q_mu!r},{b.e_mu!r},{b.y1_l!r},{b.e1_u!r},"
            f"{b.r_per_pulse!r},{b.r_bps!r}"
        )
    return lines
