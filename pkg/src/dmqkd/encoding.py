"""Logical symbols, phase encoding, drive-voltage calibration and schedules.

Maps BB84/decoy symbols to the phase pair (phi12, phi23) applied between the
three slave pulses, converts target intensity fractions to phases, translates
phases into master-laser perturbation voltages through the linear V-pi
calibration, and compiles symbol streams into timed electrical waveform
schedules (master gate, two perturbations, three slave drive pulses per
symbol).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ConfigurationError, DmqkdError, InvalidSymbolError, ScheduleParseError
from .photonics import Phase

SIGNAL = "signal"
DECOY = "decoy"
VACUUM = "vacuum"
INTENSITY_CLASSES = (SIGNAL, DECOY, VACUUM)

# Channels of the electrical schedule.
CH_MASTER = "master_drive"
CH_PERT = "master_perturbation"
CH_SLAVE = "slave_drive"

# Nominal gate level for drive events; only perturbation levels carry encoding.
DRIVE_LEVEL_V = 1.0

_REL_TOL = 1e-9


@dataclass(frozen=True)
class EncodingSymbol:
    """A logical symbol: basis Z or Y, bit 0/1, and an intensity class.

    Decoy and vacuum classes exist only in the Z basis; the Y basis carries
    signal states exclusively.
    """

    basis: str
    bit: int
    intensity_class: str = SIGNAL

    def __post_init__(self) -> None:
        if self.basis not in ("Z", "Y"):
            raise InvalidSymbolError(f"basis must be 'Z' or 'Y', got {self.basis!r}")
        if self.bit not in (0, 1):
            raise InvalidSymbolError(f"bit must be 0 or 1, got {self.bit!r}")
        if self.intensity_class not in INTENSITY_CLASSES:
            raise InvalidSymbolError(f"unknown intensity class {self.intensity_class!r}")
        if self.basis == "Y" and self.intensity_class != SIGNAL:
            raise InvalidSymbolError(
                "decoy/vacuum states are prepared in the Z basis only"
            )


@dataclass(frozen=True)
class PhasePair:
    """The (phi12, phi23) realisation of one symbol."""

    phi12: Phase
    phi23: Phase


@dataclass(frozen=True)
class CalibrationCurve:
    """Linear phase-vs-voltage calibration through the origin.

    v_pi is the voltage producing a pi phase shift; the pulse intensity then
    follows a cosine in the applied voltage.
    """

    v_pi: float = 0.8

    def __post_init__(self) -> None:
        if not (math.isfinite(self.v_pi) and self.v_pi > 0.0):
            raise ConfigurationError(f"v_pi must be > 0, got {self.v_pi!r}")


@dataclass(frozen=True)
class ChirpParams:
    """Transient frequency shift and modulation width of one perturbation."""

    delta_nu: float
    delta_t: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.delta_t) and self.delta_t > 0.0):
            raise ConfigurationError(f"delta_t must be > 0, got {self.delta_t!r}")
        if not math.isfinite(self.delta_nu):
            raise ConfigurationError(f"delta_nu must be finite, got {self.delta_nu!r}")


@dataclass(frozen=True)
class TimingParams:
    """Clock rates and event widths of the electrical drive scheme.

    The slave laser emits exactly three pulses per master gate, so its rate is
    three times the master rate and the AMZI delay equals one slave period.
    """

    master_rate: float = 2e9 / 3.0
    slave_rate: float = 2e9
    perturbation_width: float = 150e-12
    perturbation_separation: float = 450e-12
    amzi_delay: float = 500e-12
    master_on_time: float = 1.4e-9
    slave_on_time: float = 300e-12

    def __post_init__(self) -> None:
        for name in (
            "master_rate",
            "slave_rate",
            "perturbation_width",
            "perturbation_separation",
            "amzi_delay",
            "master_on_time",
            "slave_on_time",
        ):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ConfigurationError(f"{name} must be > 0, got {v!r}")
        if abs(self.slave_rate - 3.0 * self.master_rate) > _REL_TOL * self.slave_rate:
            raise ConfigurationError(
                "slave_rate must be exactly three times master_rate "
                f"(got {self.slave_rate} vs 3 * {self.master_rate})"
            )
        if abs(self.amzi_delay * self.slave_rate - 1.0) > _REL_TOL:
            raise ConfigurationError(
                "amzi_delay must equal one slave period "
                f"(got {self.amzi_delay} vs 1/{self.slave_rate})"
            )
        if self.master_on_time > 1.0 / self.master_rate:
            raise ConfigurationError("master_on_time exceeds the master period")
        if 2.0 * self.amzi_delay + self.slave_on_time > self.master_on_time:
            raise ConfigurationError(
                "three slave pulses do not fit inside the master on-window"
            )
        if self.perturbation_width >= self.amzi_delay:
            raise ConfigurationError(
                "perturbation_width must be shorter than the slave period"
            )

    @property
    def symbol_period(self) -> float:
        return 1.0 / self.master_rate


@dataclass(frozen=True)
class ScheduleEvent:
    """One timed electrical event: channel, start, duration (s), level (V)."""

    channel: str
    start: float
    duration: float
    level: float


@dataclass(frozen=True)
class WaveformSchedule:
    """A time-sorted list of events realizing a symbol stream.

    Times are absolute offsets in seconds from the first master onset, stored
    at double precision.
    """

    timing: TimingParams
    events: tuple[ScheduleEvent, ...] = field(default_factory=tuple)


def intensity_to_phase(fraction: float) -> Phase:
    """Phase step yielding an output bin at the given mean-photon-number fraction.

    Inverts |r/A|^2 = cos^2(phi/2): phi = 2*arccos(sqrt(fraction)). Monotone
    decreasing in the fraction; fraction 1 maps to phase 0.
    """
    if not (math.isfinite(fraction) and 0.0 < fraction <= 1.0):
        raise ConfigurationError(
            f"intensity fraction must lie in (0, 1], got {fraction!r}"
        )
    return Phase(2.0 * math.acos(math.sqrt(fraction)))


def chirp_phase(p: ChirpParams) -> Phase:
    """Phase accumulated by a transient frequency shift delta_nu over delta_t."""
    return Phase(2.0 * math.pi * p.delta_nu * p.delta_t)


def voltage_for_phase(phi: float, cal: CalibrationCurve) -> float:
    """Perturbation voltage for a phase step, via the linear V-pi calibration."""
    phi = Phase(phi)
    return (float(phi) / math.pi) * cal.v_pi


def phase_for_voltage(v: float, cal: CalibrationCurve) -> Phase:
    """Inverse of voltage_for_phase."""
    if not math.isfinite(v):
        raise ScheduleParseError(f"voltage must be finite, got {v!r}")
    return Phase((v / cal.v_pi) * math.pi)


def predicted_pulse_amplitude(v: float, cal: CalibrationCurve, a: float = 1.0) -> float:
    """Output-pulse amplitude versus perturbation voltage.

    Composition of the linear voltage-to-phase map with the interference
    cosine: A*|cos(pi*v / (2*v_pi))|, the curve traced in the intensity
    calibration measurement (null at v_pi).
    """
    if not (math.isfinite(v) and v >= 0.0):
        raise ConfigurationError(f"voltage must be >= 0, got {v!r}")
    return a * abs(math.cos(math.pi * v / (2.0 * cal.v_pi)))


_Z_SIGNAL = {0: (Phase(0.0), Phase(math.pi)), 1: (Phase(math.pi), Phase(0.0))}
_Y_SIGNAL = {
    0: (Phase(math.pi / 2.0), Phase(math.pi / 2.0)),
    1: (Phase(3.0 * math.pi / 2.0), Phase(3.0 * math.pi / 2.0)),
}


def encode_symbol(
    sym: EncodingSymbol, decoy_table: Mapping[str, float]
) -> PhasePair:
    """Phase pair realising a logical symbol.

    Z-basis states put all light in one bin (the other suppressed with a pi
    step); Y-basis states split it evenly with relative phase pi/2 or 3*pi/2.
    Decoy/vacuum states dim the occupied bin to the intensity fraction given
    by decoy_table (fractions of the signal intensity).
    """
    if sym.intensity_class not in decoy_table:
        raise ConfigurationError(
            f"decoy table has no entry for class {sym.intensity_class!r}"
        )
    fraction = decoy_table[sym.intensity_class]
    if sym.intensity_class == SIGNAL:
        if fraction != 1.0:
            raise ConfigurationError(
                f"signal intensity fraction must be 1.0, got {fraction!r}"
            )
        if sym.basis == "Y":
            p12, p23 = _Y_SIGNAL[sym.bit]
        else:
            p12, p23 = _Z_SIGNAL[sym.bit]
        return PhasePair(p12, p23)
    # Dim classes keep the timing pattern of the Z signal states: the dim bin
    # keeps its slot, the suppressed bin stays at pi.
    dim = intensity_to_phase(fraction)
    if sym.bit == 0:
        return PhasePair(dim, Phase(math.pi))
    return PhasePair(Phase(math.pi), dim)


def compile_schedule(
    symbols: Sequence[EncodingSymbol],
    timing: TimingParams,
    cal: CalibrationCurve,
    decoy_table: Mapping[str, float],
) -> WaveformSchedule:
    """Compile a symbol stream into a timed waveform schedule.

    Each symbol occupies one master period: a master gate of master_on_time,
    three slave drive pulses one AMZI delay apart, and two perturbation events
    carrying voltage_for_phase(phi12) and voltage_for_phase(phi23). Each
    perturbation is centered in the interval between consecutive slave onsets.
    """
    if not symbols:
        raise ConfigurationError("symbol stream is empty")
    events: list[ScheduleEvent] = []
    delay = timing.amzi_delay
    pert_offset = (delay - timing.perturbation_width) / 2.0
    for i, sym in enumerate(symbols):
        pair = encode_symbol(sym, decoy_table)
        t0 = i * timing.symbol_period
        events.append(ScheduleEvent(CH_MASTER, t0, timing.master_on_time, DRIVE_LEVEL_V))
        for k in range(3):
            events.append(
                ScheduleEvent(CH_SLAVE, t0 + k * delay, timing.slave_on_time, DRIVE_LEVEL_V)
            )
        for k, phi in enumerate((pair.phi12, pair.phi23)):
            events.append(
                ScheduleEvent(
                    CH_PERT,
                    t0 + k * delay + pert_offset,
                    timing.perturbation_width,
                    voltage_for_phase(phi, cal),
                )
            )
    events.sort(key=lambda ev: (ev.start, ev.channel))
    sched = WaveformSchedule(timing=timing, events=tuple(events))
    _check_no_overlap(sched.events)
    return sched


def _check_no_overlap(events: Iterable[ScheduleEvent]) -> None:
    last_end: dict[str, float] = {}
    for ev in sorted(events, key=lambda e: e.start):
        end = last_end.get(ev.channel)
        if end is not None and ev.start < end - 1e-15:
            raise ScheduleParseError(
                f"overlapping events on channel {ev.channel} at t={ev.start}"
            )
        last_end[ev.channel] = ev.start + ev.duration


def decompile_schedule(
    sched: WaveformSchedule, timing: TimingParams, cal: CalibrationCurve
) -> list[PhasePair]:
    """Recover the per-symbol phase pairs from a schedule.

    Accepts schedules produced by compile_schedule or hand-written with the
    same conventions; malformed event counts or overlaps raise
    ScheduleParseError.
    """
    _check_no_overlap(sched.events)
    masters = sorted(
        (ev for ev in sched.events if ev.channel == CH_MASTER), key=lambda e: e.start
    )
    if not masters:
        raise ScheduleParseError("schedule has no master drive events")
    perts = sorted(
        (ev for ev in sched.events if ev.channel == CH_PERT), key=lambda e: e.start
    )
    pairs: list[PhasePair] = []
    for m in masters:
        window = [
            ev for ev in perts if m.start <= ev.start and ev.start + ev.duration <= m.start + m.duration
        ]
        if len(window) != 2:
            raise ScheduleParseError(
                f"expected 2 perturbation events in master window at t={m.start}, "
                f"found {len(window)}"
            )
        pairs.append(
            PhasePair(
                phase_for_voltage(window[0].level, cal),
                phase_for_voltage(window[1].level, cal),
            )
        )
    return pairs


# --- serialization -----------------------------------------------------------

_TIMING_FIELDS = (
    "master_rate",
    "slave_rate",
    "perturbation_width",
    "perturbation_separation",
    "amzi_delay",
    "master_on_time",
    "slave_on_time",
)


def schedule_to_text(sched: WaveformSchedule) -> str:
    """Line-oriented text form: a one-line timing header, then one event per line.

    Event lines are `channel start_s duration_s level_V`, sorted by start
    time. Floats use repr (shortest round-trip), so output is byte-stable.
    """
    header = "# timing " + " ".join(
        f"{name}={getattr(sched.timing, name)!r}" for name in _TIMING_FIELDS
    )
    lines = [header]
    for ev in sorted(sched.events, key=lambda e: (e.start, e.channel)):
        lines.append(f"{ev.channel} {ev.start!r} {ev.duration!r} {ev.level!r}")
    return "\n".join(lines) + "\n"


def schedule_from_text(text: str) -> WaveformSchedule:
    """Parse the text form produced by schedule_to_text."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# timing "):
        raise ScheduleParseError("missing timing header line")
    kv: dict[str, float] = {}
    for tok in lines[0][len("# timing "):].split():
        try:
            name, value = tok.split("=", 1)
            kv[name] = float(value)
        except ValueError as exc:
            raise ScheduleParseError(f"bad timing token {tok!r}") from exc
    try:
        timing = TimingParams(**{name: kv[name] for name in _TIMING_FIELDS})
    except (KeyError, ConfigurationError) as exc:
        raise ScheduleParseError(f"invalid timing header: {exc}") from exc
    events = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 4:
            raise ScheduleParseError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        channel = parts[0]
        if channel not in (CH_MASTER, CH_PERT, CH_SLAVE):
            raise ScheduleParseError(f"line {lineno}: unknown channel {channel!r}")
        try:
            start, duration, level = (float(x) for x in parts[1:])
        except ValueError as exc:
            raise ScheduleParseError(f"line {lineno}: bad number") from exc
        events.append(ScheduleEvent(channel, start, duration, level))
    return WaveformSchedule(timing=timing, events=tuple(events))


def schedule_to_json(sched: WaveformSchedule) -> str:
    """JSON form of a schedule (same content as the text form)."""
    doc = {
        "timing": {name: getattr(sched.timing, name) for name in _TIMING_FIELDS},
        "events": [
            {
                "channel": ev.channel,
                "start_s": ev.start,
                "duration_s": ev.duration,
                "level_v": ev.level,
            }
            for ev in sorted(sched.events, key=lambda e: (e.start, e.channel))
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


# --- symbol-stream mini-language --------------------------------------------

_CLASS_CODES = {"s": SIGNAL, "d": DECOY, "v": VACUUM}


def parse_symbol_token(token: str) -> EncodingSymbol:
    """Parse one `<basis><bit><class>` token, e.g. Z0s, Y1s, Z0d."""
    if len(token) != 3 or token[0] not in "ZY" or token[1] not in "01" \
            or token[2] not in _CLASS_CODES:
        raise InvalidSymbolError(f"bad symbol token {token!r}")
    return EncodingSymbol(token[0], int(token[1]), _CLASS_CODES[token[2]])


def parse_symbol_stream(text: str) -> list[EncodingSymbol]:
    """Parse a whitespace-separated symbol stream, reporting line numbers."""
    symbols: list[EncodingSymbol] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        for token in body.split():
            try:
                symbols.append(parse_symbol_token(token))
            except InvalidSymbolError as exc:
                raise InvalidSymbolError(f"line {lineno}: {exc}") from exc
    return symbols


def symbol_token(sym: EncodingSymbol) -> str:
    """Inverse of parse_symbol_token."""
    code = {v: k for k, v in _CLASS_CODES.items()}[sym.intensity_class]
    return f"{sym.basis}{sym.bit}{code}"
