"""Coherent-state algebra for the two-laser transmitter.

The transmitter emits triplets of mutually coherent pulses; an asymmetric
Mach-Zehnder interferometer (AMZI) with a one-bin delay interferes each pulse
with its predecessor. All amplitudes are complex field amplitudes in units of
sqrt(mean photon number); the common optical-carrier factor e^{i*omega*t} is
dropped, so every phase is relative to the frame.

The AMZI here is ideal: lossless, exactly 50:50, exact one-bin delay, and only
the interference output port is modeled. Each output bin is half the sum of two
adjacent input bins, so an input amplitude A gives output magnitudes
A*|cos(dphi/2)|.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DmqkdError

TWO_PI = 2.0 * math.pi


class Phase(float):
    """An angle canonicalised to [0, 2*pi).

    Behaves as a plain float; construction reduces modulo 2*pi, so equality
    of two Phase values is modular equality.
    """

    def __new__(cls, value: float) -> "Phase":
        v = float(value)
        if not math.isfinite(v):
            raise DmqkdError(f"phase must be finite, got {v!r}")
        v = v % TWO_PI
        if v >= TWO_PI:  # rounding of tiny negatives can land exactly on 2*pi
            v = 0.0
        return super().__new__(cls, v)

    def __repr__(self) -> str:
        return f"Phase({float(self)!r})"


@dataclass(frozen=True)
class PolarForm:
    """Amplitude and phase of a coherent amplitude, r >= 0, phi in [0, 2*pi)."""

    r: float
    phi: Phase


@dataclass(frozen=True)
class PulseFrame:
    """The five time bins around one encoding triplet, before the AMZI.

    Bin order is L_P, R_P, E, L, R: the last pulse of the preceding triplet,
    then the triplet a1, a2, a3, then the first pulse of the following triplet.
    """

    a3_prev: complex
    a1: complex
    a2: complex
    a3: complex
    a1_next: complex


@dataclass(frozen=True)
class OutputFrame:
    """The four interfered bins after the AMZI: R_P, E, L, R."""

    rp: complex
    e: complex
    l: complex
    r: complex


def _check_finite(z: complex, what: str = "amplitude") -> None:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DmqkdError(f"{what} must be finite, got {z!r}")


def amplitude_to_polar(alpha: complex) -> PolarForm:
    """Decompose a coherent amplitude into r >= 0 and a phase in [0, 2*pi).

    A zero amplitude gets phase 0 by convention (the angle is undefined there).
    """
    alpha = complex(alpha)
    _check_finite(alpha)
    r = abs(alpha)
    if r == 0.0:
        return PolarForm(0.0, Phase(0.0))
    return PolarForm(r, Phase(cmath.phase(alpha)))


def make_frame(
    a: float,
    phi1: float,
    phi12: float,
    phi23: float,
    phi_rp: float,
    phi_rf: float,
) -> PulseFrame:
    """Build the five-bin input frame from the laser amplitude and phases.

    phi1 is the (randomised) global phase of the triplet, phi12/phi23 the
    encoding phase steps, and phi_rp/phi_rf the random phases of the preceding
    and following triplets relative to this one.
    """
    if not math.isfinite(a) or a < 0.0:
        raise DmqkdError(f"pulse amplitude must be finite and >= 0, got {a!r}")
    p1 = float(phi1)
    p12 = float(phi12)
    p23 = float(phi23)
    return PulseFrame(
        a3_prev=a * cmath.exp(1j * (p1 + float(phi_rp))),
        a1=a * cmath.exp(1j * p1),
        a2=a * cmath.exp(1j * (p1 + p12)),
        a3=a * cmath.exp(1j * (p1 + p12 + p23)),
        a1_next=a * cmath.exp(1j * (p1 + p12 + p23 + float(phi_rf))),
    )


def amzi_transform(frame: PulseFrame) -> OutputFrame:
    """Interfere adjacent bins: each output is half the sum of two inputs.

    The resulting magnitudes follow A*|cos(dphi/2)| where dphi is the phase
    step between the interfered pulses, and the E-L phase difference is
    (phi12 + phi23)/2 up to the sign of the cosines.
    """
    for z in (frame.a3_prev, frame.a1, frame.a2, frame.a3, frame.a1_next):
        _check_finite(z)
    return OutputFrame(
        rp=0.5 * (frame.a3_prev + frame.a1),
        e=0.5 * (frame.a1 + frame.a2),
        l=0.5 * (frame.a2 + frame.a3),
        r=0.5 * (frame.a3 + frame.a1_next),
    )


def relative_phase_el(phi12: float, phi23: float) -> Phase:
    """Phase difference between the early and late output bins.

    Equals (phi12 + phi23)/2 reduced mod 2*pi. This is the signed-amplitude
    closed form: when cos(phi12/2) and cos(phi23/2) have opposite signs the
    phase extracted from the complex output bins differs from it by pi.
    """
    return Phase((float(phi12) + float(phi23)) / 2.0)
