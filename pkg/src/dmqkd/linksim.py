"""Channel, detector and receiver model: analytic gains/QBERs and Monte Carlo.

The channel is a flat attenuator; detection of a mean-photon-number lambda
pulse train is Poissonian with click probability 1 - exp(-eta*lambda). Dark
counts are linearized over the detection window. Bob chooses his basis
passively with a beamsplitter; only basis-matched (sifted) frames are tallied.

The Y-basis receiver interferes the time bins in a second AMZI and measures a
single output pulse, which costs a constant efficiency factor
(y_receiver_factor, nominally 1/2) on the Y-basis gain. Misalignment,
interference imperfections and laser phase noise are lumped into the single
error parameter e_det.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, ModelValidityError

# (intensity_class, basis) rows of every tally; Y carries signal states only.
STATE_ROWS: tuple[tuple[str, str], ...] = (
    ("signal", "Y"),
    ("signal", "Z"),
    ("decoy", "Z"),
    ("vacuum", "Z"),
)

DEFAULT_BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class LinkParams:
    """Channel, detector and protocol parameters for one operating point."""

    loss_db: float = 15.0
    det_efficiency: float = 0.7
    dark_rate: float = 50.0
    window: float = 300e-12
    clock: float = 2e9 / 3.0
    p_y_alice: float = 0.9
    p_y_bob: float = 0.9
    e_det: float = 0.033
    f_ec: float = 1.16
    y_receiver_factor: float = 0.5

    def __post_init__(self) -> None:
        if not (math.isfinite(self.loss_db) and self.loss_db >= 0.0):
            raise ConfigurationError(f"loss_db must be >= 0, got {self.loss_db!r}")
        for name in ("det_efficiency", "p_y_alice", "p_y_bob", "e_det",
                     "y_receiver_factor"):
            v = getattr(self, name)
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ConfigurationError(f"{name} must lie in [0, 1], got {v!r}")
        if not (math.isfinite(self.dark_rate) and self.dark_rate >= 0.0):
            raise ConfigurationError(f"dark_rate must be >= 0, got {self.dark_rate!r}")
        if not (math.isfinite(self.window) and self.window >= 0.0):
            raise ConfigurationError(f"window must be >= 0, got {self.window!r}")
        if not (math.isfinite(self.clock) and self.clock > 0.0):
            raise ConfigurationError(f"clock must be > 0, got {self.clock!r}")
        if not (math.isfinite(self.f_ec) and self.f_ec >= 1.0):
            raise ConfigurationError(f"f_ec must be >= 1, got {self.f_ec!r}")


@dataclass(frozen=True)
class DecoyIntensities:
    """Mean photon numbers of the signal, decoy and vacuum classes."""

    mu: float = 0.4
    nu: float = 0.16
    omega: float = 0.015

    def __post_init__(self) -> None:
        if not (self.mu > self.nu > self.omega >= 0.0):
            raise ConfigurationError(
                f"need mu > nu > omega >= 0, got {self.mu}, {self.nu}, {self.omega}"
            )
        if not (self.nu + self.omega < self.mu):
            raise ConfigurationError(
                "need nu + omega < mu for the single-photon yield bound"
            )

    def of_class(self, intensity_class: str) -> float:
        return {"signal": self.mu, "decoy": self.nu, "vacuum": self.omega}[
            intensity_class
        ]


@dataclass(frozen=True)
class GainQber:
    """Gain (detections per sent state) and QBER of one state class."""

    q: float
    e: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.q <= 1.0 and 0.0 <= self.e <= 1.0):
            raise ConfigurationError(f"gain/QBER out of range: {self!r}")


@dataclass
class RowTally:
    """Counts for one (class, basis) row; errors <= detected <= sent."""

    sent: int = 0
    detected: int = 0
    errors: int = 0

    def merge(self, other: "RowTally") -> None:
        self.sent += other.sent
        self.detected += other.detected
        self.errors += other.errors


@dataclass
class TallyCounts:
    """Per-(class, basis) sifted counts from a Monte Carlo run."""

    rows: dict[tuple[str, str], RowTally] = field(
        default_factory=lambda: {row: RowTally() for row in STATE_ROWS}
    )

    def merge(self, other: "TallyCounts") -> None:
        for key, tally in other.rows.items():
            self.rows[key].merge(tally)

    def gain_qber(self, key: tuple[str, str]) -> GainQber:
        t = self.rows[key]
        q = t.detected / t.sent if t.sent else 0.0
        e = t.errors / t.detected if t.detected else 0.5
        return GainQber(q, e)

    def csv_rows(self) -> list[str]:
        lines = ["class,basis,sent,detected,errors"]
        for (cls, basis), t in self.rows.items():
            lines.append(f"{cls},{basis},{t.sent},{t.detected},{t.errors}")
        return lines


def transmittance(loss_db: float, det_efficiency: float) -> float:
    """Overall photon survival probability: detector efficiency times channel."""
    if not (math.isfinite(loss_db) and loss_db >= 0.0):
        raise ConfigurationError(f"loss_db must be >= 0, got {loss_db!r}")
    if not (0.0 <= det_efficiency <= 1.0):
        raise ConfigurationError(
            f"det_efficiency must lie in [0, 1], got {det_efficiency!r}"
        )
    return det_efficiency * 10.0 ** (-loss_db / 10.0)


def dark_prob(dark_rate: float, window: float, n_detectors: int = 2) -> float:
    """Background click probability per frame, linearized over the window.

    Valid only while the product stays well below 1; larger values raise
    ModelValidityError rather than silently extrapolating.
    """
    if dark_rate < 0.0 or window < 0.0 or n_detectors < 0:
        raise ConfigurationError("dark_prob arguments must be nonnegative")
    y0 = n_detectors * dark_rate * window
    if y0 > 0.1:
        raise ModelValidityError(
            f"dark probability {y0} too large for the linearized model"
        )
    return y0


def analytic_gain_qber(lam: float, eta: float, y0: float, e_det: float) -> GainQber:
    """Asymptotic gain and QBER of a phase-randomised class at mean photon lam.

    Q = Y0 + 1 - exp(-eta*lam); errors are e_det on signal clicks and random
    on dark counts. A dead channel returns E = 0.5 by convention.
    """
    if lam < 0.0 or not (0.0 <= eta <= 1.0):
        raise ConfigurationError("need lam >= 0 and eta in [0, 1]")
    sig = 1.0 - math.exp(-eta * lam)
    q = y0 + sig
    if q <= 0.0:
        return GainQber(0.0, 0.5)
    e = (0.5 * y0 + e_det * sig) / q
    return GainQber(q, min(e, 1.0))


def link_dark_prob(params: LinkParams) -> float:
    return dark_prob(params.dark_rate, params.window, 2)


def default_state_probs(
    params: LinkParams, z_mix: Sequence[float] = (1 / 3, 1 / 3, 1 / 3)
) -> dict[tuple[str, str], float]:
    """Alice's per-frame state mix: p_y_alice on (signal, Y), the rest split
    over the Z-basis classes according to z_mix."""
    if len(z_mix) != 3 or any(p < 0.0 for p in z_mix):
        raise ConfigurationError("z_mix must be three nonnegative fractions")
    total = sum(z_mix)
    if not math.isfinite(total) or total <= 0.0:
        raise ConfigurationError("z_mix must have positive total")
    pz = 1.0 - params.p_y_alice
    return {
        ("signal", "Y"): params.p_y_alice,
        ("signal", "Z"): pz * z_mix[0] / total,
        ("decoy", "Z"): pz * z_mix[1] / total,
        ("vacuum", "Z"): pz * z_mix[2] / total,
    }


def expected_row_stats(
    key: tuple[str, str], params: LinkParams, intens: DecoyIntensities
) -> GainQber:
    """Exact per-sifted-frame detection probability and QBER of the MC process.

    Matches analytic_gain_qber up to the negligible dark-and-signal coincidence
    term; Y-basis rows carry the receiver efficiency factor.
    """
    cls, basis = key
    eta = transmittance(params.loss_db, params.det_efficiency)
    y0 = link_dark_prob(params)
    lam = intens.of_class(cls)
    factor = params.y_receiver_factor if basis == "Y" else 1.0
    p_sig = factor * (1.0 - math.exp(-eta * lam))
    p_det = 1.0 - (1.0 - y0) * (1.0 - p_sig)
    if p_det <= 0.0:
        return GainQber(0.0, 0.5)
    e = (0.5 * y0 + params.e_det * p_sig * (1.0 - y0)) / p_det
    return GainQber(p_det, min(e, 1.0))


def _simulate_block(
    n: int,
    block_index: int,
    seed: int,
    probs: np.ndarray,
    p_sig: np.ndarray,
    y0: float,
    e_det: float,
    p_y_bob: float,
) -> np.ndarray:
    """Tally one block of frames; rng depends only on (seed, block_index)."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block_index,)))
    cum = np.cumsum(probs)
    row = np.searchsorted(cum, rng.random(n), side="right")
    row = np.minimum(row, len(probs) - 1)
    bob_y = rng.random(n) < p_y_bob
    alice_y = row == 0  # STATE_ROWS[0] is the only Y-basis row
    sifted = alice_y == bob_y
    row_s = row[sifted]
    m = row_s.size
    sig_click = rng.random(m) < p_sig[row_s]
    dark_click = rng.random(m) < y0
    detected = sig_click | dark_click
    # Dark events (including coincidences with a signal click) are assigned a
    # random bit; pure signal clicks err with probability e_det.
    u_err = rng.random(int(detected.sum()))
    err_p = np.where(dark_click[detected], 0.5, e_det)
    errors = u_err < err_p
    out = np.zeros((len(probs), 3), dtype=np.int64)
    np.add.at(out[:, 0], row_s, 1)
    np.add.at(out[:, 1], row_s[detected], 1)
    np.add.at(out[:, 2], row_s[detected][errors], 1)
    return out


def simulate_frames_mc(
    n_frames: int,
    params: LinkParams,
    intens: DecoyIntensities,
    state_probs: Mapping[tuple[str, str], float] | None = None,
    seed: int = 0,
    block_size: int = DEFAULT_BLOCK_SIZE,
    n_jobs: int = 1,
) -> TallyCounts:
    """Monte Carlo frame sampling; deterministic given the seed.

    Frames are processed in fixed-size blocks, each with a generator derived
    from (seed, block index), so the merged tallies are identical no matter
    how the blocks are partitioned across workers.
    """
    if n_frames <= 0:
        raise ConfigurationError(f"n_frames must be > 0, got {n_frames!r}")
    if block_size <= 0:
        raise ConfigurationError(f"block_size must be > 0, got {block_size!r}")
    if state_probs is None:
        state_probs = default_state_probs(params)
    probs = np.array([state_probs.get(row, 0.0) for row in STATE_ROWS], dtype=float)
    if np.any(probs < 0.0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ConfigurationError("state probabilities must be nonnegative and sum to 1")
    extra = set(state_probs) - set(STATE_ROWS)
    if extra:
        raise ConfigurationError(f"unknown state rows in probabilities: {sorted(extra)}")

    eta = transmittance(params.loss_db, params.det_efficiency)
    y0 = link_dark_prob(params)
    lams = np.array([intens.of_class(cls) for cls, _ in STATE_ROWS])
    factors = np.array(
        [params.y_receiver_factor if basis == "Y" else 1.0 for _, basis in STATE_ROWS]
    )
    p_sig = factors * (1.0 - np.exp(-eta * lams))

    n_blocks = (n_frames + block_size - 1) // block_size
    sizes = [
        min(block_size, n_frames - b * block_size) for b in range(n_blocks)
    ]

    def run(b: int) -> np.ndarray:
        return _simulate_block(
            sizes[b], b, seed, probs, p_sig, y0, params.e_det, params.p_y_bob
        )

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            block_tallies = list(pool.map(run, range(n_blocks)))
    else:
        block_tallies = [run(b) for b in range(n_blocks)]

    total = np.sum(block_tallies, axis=0)
    tallies = TallyCounts()
    for i, key in enumerate(STATE_ROWS):
        tallies.rows[key] = RowTally(
            sent=int(total[i, 0]), detected=int(total[i, 1]), errors=int(total[i, 2])
        )
    return tallies


def with_loss(params: LinkParams, loss_db: float) -> LinkParams:
    """Copy of params at a different channel loss."""
    return replace(params, loss_db=loss_db)
