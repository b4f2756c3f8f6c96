"""End-to-end coded DCO-OFDM frame pipeline and Monte Carlo BER sweeps.

A frame runs: random info bits -> block encode (RS symbols or LDPC bits) ->
parity puncturing -> Gray QAM -> Hermitian assembly (punctured subcarriers
stay empty) -> unitary IFFT -> double-sided clip -> DC bias -> AWGN ->
unitary FFT -> divide by the analytic Bussgang gamma -> soft LLRs (LDPC,
exact zeros at punctured bits) or hard symbols (RS, punctured positions as
erasures) -> decode -> compare info bits.

Sweeps accumulate frames in fixed-size chunks until a bit-error target or a
frame cap is reached; every frame draws its own RNG stream from
(master_seed, point_index, frame_index), so results are identical for any
worker count.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .frontend import (
    ClipSpec,
    awgn,
    bias,
    bussgang,
    clip,
    clip_fraction,
    electrical_power,
    noise_from_ebn0,
)
from .galois import GaloisField
from .ldpc import LdpcCode
from .modem import QamModem
from .ofdm import OfdmConfig, hermitian_assemble, ofdm_demodulate, ofdm_modulate, sigma_i_expected
from .reed_solomon import RsCode

RS, LDPC, UNCODED = "rs", "ldpc", "uncoded"

#: frames evaluated between stopping-rule checks; fixed so that sweep results
#: do not depend on the worker count
CHUNK_FRAMES = 25


@dataclass(frozen=True)
class ScenarioConfig:
    """One sweep configuration; fully determines a reproducible run."""

    label: str
    code_kind: str
    mod_order: int = 16
    n_fft: int = 512
    reserved: int = 0
    cp_len: int = 0
    rs_n: int = 15
    rs_k: int = 8
    ldpc_n: int = 1020
    ldpc_k: int = 510
    ldpc_col_weight: int = 3
    ldpc_max_iters: int = 50
    code_seed: int = 1
    # RS: punctured symbols per codeword; LDPC: punctured modulation symbols
    v_s: int = 0
    clipping: bool = True
    alpha_lower: float = 2.0
    alpha_upper: float | None = None
    dynamic_range_mult: float = 5.0
    llr_clip_noise: bool = True
    ebn0_grid: tuple = (10.0,)
    max_frames: int = 20000
    target_bit_errors: int = 100
    master_seed: int = 1

    def validate(self) -> None:
        if self.code_kind not in (RS, LDPC, UNCODED):
            raise ValueError(f"unknown code_kind {self.code_kind!r}")
        if self.mod_order not in (16, 64):
            raise ValueError("mod_order must be 16 or 64")
        if not self.ebn0_grid:
            raise ValueError("ebn0_grid must not be empty")
        if self.max_frames < 1 or self.target_bit_errors < 1:
            raise ValueError("max_frames and target_bit_errors must be positive")
        if self.master_seed < 0 or self.code_seed < 0:
            raise ValueError("seeds must be non-negative")
        if self.v_s < 0:
            raise ValueError("v_s must be non-negative")
        bps = int(np.log2(self.mod_order))
        layout = OfdmConfig.build(self.n_fft, self.reserved, self.cp_len)
        if self.code_kind == RS:
            if (1 << bps) - 1 != self.rs_n:
                raise ValueError(
                    f"RS length {self.rs_n} does not match the {self.mod_order}-QAM alphabet"
                )
            if layout.n_data % self.rs_n:
                raise ValueError(
                    f"{layout.n_data} data subcarriers not a whole number of "
                    f"RS({self.rs_n},{self.rs_k}) codewords"
                )
            if self.v_s > self.rs_n - self.rs_k:
                raise ValueError("cannot puncture more than the parity symbols")
        elif self.code_kind == LDPC:
            if self.ldpc_n != layout.n_data * bps:
                raise ValueError(
                    f"LDPC length {self.ldpc_n} must fill {layout.n_data} subcarriers "
                    f"* {bps} bits"
                )
            if self.v_s * bps > self.ldpc_n - self.ldpc_k:
                raise ValueError("puncturing would remove information bits")
        elif self.v_s:
            raise ValueError("uncoded scenarios cannot puncture")


@dataclass
class BerPoint:
    """One measured point of a BER curve."""

    ebn0_db: float
    frames: int
    info_bits: int
    bit_errors: int
    ber: float
    decode_failures: int
    clip_fraction: float


@dataclass
class FrameResult:
    bit_errors: int
    info_bits: int
    decode_failures: int
    clip_fraction: float


def frame_rng(master_seed: int, point_index: int, frame_index: int):
    """Deterministic per-frame stream, independent of scheduling."""
    return np.random.default_rng([int(master_seed), int(point_index), int(frame_index)])


class FrameRunner:
    """Holds the codecs and front-end statistics for one scenario."""

    def __init__(self, config: ScenarioConfig):
        config.validate()
        self.config = config
        self.modem = QamModem(config.mod_order)
        self.bps = self.modem.bits_per_symbol
        self.ofdm = OfdmConfig.build(config.n_fft, config.reserved, config.cp_len)
        self.samples_per_frame = config.n_fft + config.cp_len

        if config.code_kind == RS:
            self.rs = RsCode(
                config.rs_n, config.rs_k, GaloisField(self.bps), v_s=config.v_s
            )
            self.n_codewords = self.ofdm.n_data // config.rs_n
            self.info_bits = self.n_codewords * config.rs_k * self.bps
            punctured_scs = self.n_codewords * config.v_s
        elif config.code_kind == LDPC:
            self.ldpc = LdpcCode.construct(
                config.ldpc_n,
                config.ldpc_k,
                col_weight=config.ldpc_col_weight,
                seed=config.code_seed,
            )
            self.ldpc.puncture_positions(config.v_s, self.bps)  # validates
            self.info_bits = config.ldpc_k
            punctured_scs = config.v_s
        else:
            self.info_bits = self.ofdm.n_data * self.bps
            punctured_scs = 0

        self.active_symbols = self.ofdm.n_data - punctured_scs
        if self.active_symbols < 1:
            raise ValueError("puncturing left no active subcarriers")

        # clipping bounds are frozen against the unpunctured layout's RMS, so
        # puncturing genuinely lowers the clip probability; the Bussgang
        # statistics use the actual (punctured) signal RMS
        sigma_ref = sigma_i_expected(self.ofdm, 1.0, self.ofdm.n_data)
        sigma_active = sigma_i_expected(self.ofdm, 1.0, self.active_symbols)
        if config.clipping:
            self.clip_spec = ClipSpec.from_alpha(
                sigma_ref,
                config.alpha_lower,
                config.alpha_upper,
                config.dynamic_range_mult,
            )
        else:
            self.clip_spec = ClipSpec.unclipped(sigma_ref)
        self.bussgang = bussgang(self.clip_spec, sigma_active)
        self.p_elec = electrical_power(self.clip_spec, sigma_active)
        self.clip_var_per_bin = (
            self.bussgang.clip_noise_var if config.llr_clip_noise else 0.0
        )
        self._bit_weights = 1 << np.arange(self.bps - 1, -1, -1)

    # -- helpers ---------------------------------------------------------

    def noise_for(self, ebn0_db: float):
        return noise_from_ebn0(
            ebn0_db, self.p_elec, self.samples_per_frame, self.info_bits
        )

    def _bits_to_symbols(self, bits):
        return bits.reshape(-1, self.bps).astype(np.int64) @ self._bit_weights

    def _symbols_to_bits(self, symbols):
        shifts = np.arange(self.bps - 1, -1, -1)
        return ((symbols.reshape(-1, 1) >> shifts) & 1).astype(np.uint8).reshape(-1)

    # -- pipeline --------------------------------------------------------

    def run_detailed(self, ebn0_db: float, rng):
        """Full pipeline for one frame; returns (tx_bits, rx_bits, diagnostics)."""
        cfg = self.config
        diag = {}
        tx_bits = rng.integers(0, 2, self.info_bits).astype(np.uint8)

        if cfg.code_kind == RS:
            msgs = self._bits_to_symbols(tx_bits).reshape(self.n_codewords, cfg.rs_k)
            words = self.rs.puncture(self.rs.encode_many(msgs))
            tx_labels = words.reshape(-1)
            tx_syms = self.modem.map_labels(tx_labels)
        elif cfg.code_kind == LDPC:
            codeword = self.ldpc.encode(tx_bits)
            short, _ = self.ldpc.puncture(codeword, cfg.v_s, self.bps)
            tx_syms = self.modem.map_bits(short)
        else:
            tx_syms = self.modem.map_bits(tx_bits)

        frame_syms = np.zeros(self.ofdm.n_data, dtype=complex)
        frame_syms[: self.active_symbols] = tx_syms
        ts = ofdm_modulate(self.ofdm, hermitian_assemble(self.ofdm, frame_syms))
        clipped = clip(ts.samples, self.clip_spec)
        tx_sig = bias(clipped, self.clip_spec)
        diag["clip_fraction"] = clip_fraction(ts.samples, self.clip_spec)
        diag["sigma_i_measured"] = ts.sigma_i
        hi = self.clip_spec.dynamic_range_high
        if hi is not None:
            assert tx_sig.min() >= -1e-9 and tx_sig.max() <= hi + 1e-9

        noise = self.noise_for(ebn0_db)
        rx = awgn(tx_sig, noise, rng)
        eq = ofdm_demodulate(self.ofdm, rx) / self.bussgang.gamma
        active = eq[: self.active_symbols]

        failures = 0
        if cfg.code_kind == RS:
            rx_labels = self.modem.hard_labels(active)
            rx_words = rx_labels.reshape(self.n_codewords, cfg.rs_n - cfg.v_s)
            full, erasures = self.rs.restore_punctured(rx_words)
            rx_msgs, ok = self.rs.decode_many(full, erasures)
            failures = int(np.count_nonzero(~ok))
            rx_bits = self._symbols_to_bits(rx_msgs.reshape(-1))
            diag["rs_block_ok"] = ok
            diag["rs_symbol_errors"] = np.count_nonzero(
                rx_words != tx_labels.reshape(rx_words.shape), axis=1
            )
        elif cfg.code_kind == LDPC:
            # floor keeps the noiseless limit finite for the demapper
            noise_var = max(
                (noise.sigma_w2 + self.clip_var_per_bin) / self.bussgang.gamma**2,
                1e-30,
            )
            llr = np.zeros(cfg.ldpc_n)
            llr[: self.active_symbols * self.bps] = self.modem.llrs(active, noise_var)
            decoded, converged, iters = self.ldpc.decode(llr, cfg.ldpc_max_iters)
            failures = 0 if converged else 1
            rx_bits = decoded[: cfg.ldpc_k]
            diag["ldpc_converged"] = converged
            diag["ldpc_iterations"] = iters
        else:
            rx_bits = self.modem.hard_bits(active)

        assert rx_bits.size == tx_bits.size
        diag["decode_failures"] = failures
        diag["noise"] = noise
        return tx_bits, rx_bits, diag

    def run(self, ebn0_db: float, rng) -> FrameResult:
        tx_bits, rx_bits, diag = self.run_detailed(ebn0_db, rng)
        return FrameResult(
            bit_errors=int(np.count_nonzero(tx_bits != rx_bits)),
            info_bits=int(tx_bits.size),
            decode_failures=diag["decode_failures"],
            clip_fraction=diag["clip_fraction"],
        )


def run_frame(config: ScenarioConfig, ebn0_db: float, rng):
    """One-shot convenience wrapper; sweeps should reuse a FrameRunner."""
    return FrameRunner(config).run_detailed(ebn0_db, rng)


_worker_runner: FrameRunner | None = None


def _init_worker(config: ScenarioConfig):
    global _worker_runner
    _worker_runner = FrameRunner(config)


def _worker_frame(args):
    point_index, frame_index, ebn0_db = args
    rng = frame_rng(_worker_runner.config.master_seed, point_index, frame_index)
    return _worker_runner.run(ebn0_db, rng)


def run_sweep(config: ScenarioConfig, workers: int = 1) -> list[BerPoint]:
    """Monte Carlo BER curve over the configured Eb/N0 grid.

    Each grid point accumulates frames until target_bit_errors or max_frames,
    checked at fixed chunk boundaries. Results are byte-identical for any
    worker count at a fixed master seed.
    """
    config.validate()
    if workers < 1:
        raise ValueError("workers must be at least 1")

    points = []
    pool = None
    runner = None
    try:
        if workers > 1:
            pool = ProcessPoolExecutor(
                max_workers=workers, initializer=_init_worker, initargs=(config,)
            )
        else:
            runner = FrameRunner(config)
        for pi, ebn0 in enumerate(config.ebn0_grid):
            errors = 0
            bits = 0
            frames = 0
            fails = 0
            cf_sum = 0.0
            while frames < config.max_frames and errors < config.target_bit_errors:
                hi = min(frames + CHUNK_FRAMES, config.max_frames)
                tasks = [(pi, fi, float(ebn0)) for fi in range(frames, hi)]
                if pool is not None:
                    results = list(pool.map(_worker_frame, tasks, chunksize=4))
                else:
                    results = [
                        runner.run(ebn0, frame_rng(config.master_seed, pi, fi))
                        for _, fi, _ in tasks
                    ]
                for r in results:
                    errors += r.bit_errors
                    bits += r.info_bits
                    fails += r.decode_failures
                    cf_sum += r.clip_fraction
                frames = hi
            points.append(
                BerPoint(
                    ebn0_db=float(ebn0),
                    frames=frames,
                    info_bits=bits,
                    bit_errors=errors,
                    ber=errors / bits if bits else 0.0,
                    decode_failures=fails,
                    clip_fraction=cf_sum / frames if frames else 0.0,
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return points


def scenario_presets() -> dict[str, list[ScenarioConfig]]:
    """Built-in experiment families: clipping-bound sweeps and puncturing
    comparisons for 16-QAM and 64-QAM, RS and LDPC."""
    grid16 = tuple(np.arange(8.0, 19.0))
    grid64 = tuple(np.arange(14.0, 27.0))
    rs16 = ScenarioConfig(
        label="", code_kind=RS, mod_order=16, rs_n=15, rs_k=8, ebn0_grid=grid16
    )
    ldpc16 = ScenarioConfig(
        label="", code_kind=LDPC, mod_order=16, ldpc_n=1020, ldpc_k=510,
        ebn0_grid=grid16,
    )
    rs64 = ScenarioConfig(
        label="", code_kind=RS, mod_order=64, reserved=6, rs_n=63, rs_k=31,
        ebn0_grid=grid64,
    )
    ldpc64 = ScenarioConfig(
        label="", code_kind=LDPC, mod_order=64, reserved=6, ldpc_n=1512,
        ldpc_k=756, ebn0_grid=grid64,
    )

    presets: dict[str, list[ScenarioConfig]] = {}
    presets["fig2"] = [
        dataclasses.replace(base, label=f"{base.code_kind}_b{a:g}", alpha_lower=a)
        for base in (rs16, ldpc16)
        for a in (2.0, 2.5, 3.0)
    ]
    presets["fig3"] = [
        dataclasses.replace(rs16, label="rs_v0", alpha_lower=2.0),
        dataclasses.replace(rs16, label="rs_v2", alpha_lower=2.0, v_s=2),
        dataclasses.replace(ldpc16, label="ldpc_v0", alpha_lower=2.0),
        dataclasses.replace(ldpc16, label="ldpc_v44", alpha_lower=2.0, v_s=44),
    ]
    presets["fig4"] = [
        dataclasses.replace(base, label=f"{base.code_kind}_b{a:g}", alpha_lower=a)
        for base in (rs64, ldpc64)
        for a in (2.0, 2.5, 3.0)
    ]
    presets["fig5"] = [
        dataclasses.replace(rs64, label=f"rs_v{v}", alpha_lower=2.5, v_s=v)
        for v in (0, 5, 20)
    ] + [
        dataclasses.replace(ldpc64, label=f"ldpc_v{v}", alpha_lower=2.5, v_s=v)
        for v in (0, 20, 80)
    ]
    presets["uncoded"] = [
        ScenarioConfig(
            label="uncoded_16qam", code_kind=UNCODED, mod_order=16, clipping=False,
            ebn0_grid=tuple(np.arange(6.0, 13.0)),
        )
    ]
    return presets
