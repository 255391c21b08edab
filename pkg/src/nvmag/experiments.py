"""Scenario runners wiring spin simulation, noise, readout and analysis.

Every runner is deterministic given (scenario, master seed): noise traces
are synthesized up front from fixed per-channel seed streams, photon shot
noise is drawn in fixed-size chunks with per-chunk seeds, and worker
threads only parallelize over those chunks, so results are byte-identical
for any ``threads`` value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analysis, filters, io as _io, noise as _noise, readout, sequences
from .readout import ReadoutSeries, SCHEME_STREAMS, SCHEME_SEQUENCES
from .scenario import Scenario, RunManifest, CHUNK_SIZE

#: seed-stream offset separating the short shot-only reference run
SIGMA1_STREAM_OFFSET = 100


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------

def _evaluation_sequence(scenario: Scenario) -> sequences.PulseSequence:
    s = scenario.sequence
    return sequences.field_evaluation(
        s.phase_time, s.rabi, s.final_phase,
        scenario.readout.laser_time, s.sequence_time)


def _mw_error_samples(scenario: Scenario, n: int):
    """Per-sequence (amplitude error, frequency error) noise samples.

    One sample per sequence: microwave noise with correlation times
    longer than one sequence is constant within it, so traces are
    synthesized directly at the sequence spacing.
    """
    t_seq = scenario.sequence.sequence_time
    out = {}
    for channel in ("mw_amplitude", "mw_frequency"):
        model = scenario.noise_model(channel)
        if model is None or model.is_zero or n < 2:
            out[channel] = np.zeros(n)
            continue
        trace = _noise.synthesize_trace(model, n * t_seq, t_seq,
                                        scenario.channel_seed(channel))
        out[channel] = trace.samples[:n]
    return out["mw_amplitude"], out["mw_frequency"]


def _laser_window_noise(scenario: Scenario, n: int):
    """Relative laser noise at the two window centres of each sequence."""
    model = scenario.noise_model("laser_intensity")
    if model is None or model.is_zero:
        return (None, None)
    cfg = scenario.readout
    seq = _evaluation_sequence(scenario)
    mw_time = scenario.sequence.phase_time + seq.pulse_times()
    dt = cfg.window_time / 2.0
    trace = _noise.synthesize_trace(model, n * cfg.sequence_time, dt,
                                    scenario.channel_seed("laser_intensity"))
    starts = np.arange(n) * cfg.sequence_time + mw_time
    t1 = starts + cfg.window_time / 2.0
    t2 = starts + cfg.laser_time - cfg.window_time / 2.0
    return trace.value_at(t1), trace.value_at(t2)


def _scheme_final_phases(scenario: Scenario, scheme: str, n: int):
    s = scenario.sequence
    if SCHEME_SEQUENCES[scheme] == 1:
        return np.full(n, s.final_phase)
    phases = np.empty(n)
    phases[0::2] = s.final_phase
    phases[1::2] = s.alternate_final_phase
    return phases


def _scheme_populations(scenario: Scenario, scheme: str, dg, df,
                        ac_field=None) -> np.ndarray:
    seq = _evaluation_sequence(scenario)
    phases = _scheme_final_phases(scenario, scheme, len(np.atleast_1d(dg)))
    return sequences.echo_populations(
        seq, scenario.hamiltonian, dg, df,
        field=ac_field if ac_field is not None else scenario.ac_field,
        decay=scenario.decay,
        final_phase=phases,
        m_i_values=scenario.sequence.m_i_values(),
        substeps_per_period=scenario.sequence.substeps_per_period)


def _balance_populations(scenario: Scenario, scheme: str) -> np.ndarray:
    """Noise-free working-point populations used to balance the reference."""
    seq = _evaluation_sequence(scenario)
    s = scenario.sequence
    out = []
    for phase in (s.final_phase, s.alternate_final_phase):
        p = sequences.echo_populations(
            seq, scenario.hamiltonian, 0.0, 0.0,
            field=scenario.ac_field, decay=scenario.decay, final_phase=phase,
            m_i_values=s.m_i_values(),
            substeps_per_period=s.substeps_per_period)
        out.append(float(p[0]))
    return np.asarray(out)


def _sample_scheme_series(scenario: Scenario, scheme: str, populations,
                          eps_pair, stream: int, threads: int = 1,
                          balance=None) -> ReadoutSeries:
    """Chunk-seeded window-level sampling of one scheme's readout series."""
    cfg = scenario.readout
    n = populations.size
    if balance is None:
        balance = _balance_populations(scenario, scheme)
    balance_per_seq = np.where(np.arange(n) % 2 == 0, balance[0], balance[1]) \
        if SCHEME_SEQUENCES[scheme] == 2 else np.full(n, balance[0])

    bounds = [(i, slice(i * CHUNK_SIZE, min((i + 1) * CHUNK_SIZE, n)))
              for i in range((n + CHUNK_SIZE - 1) // CHUNK_SIZE)]

    def work(chunk):
        index, sl = chunk
        rng = np.random.default_rng(scenario.shot_seed(stream, index))
        eps = (None if eps_pair[0] is None else eps_pair[0][sl],
               None if eps_pair[1] is None else eps_pair[1][sl])
        return readout.sequence_signals(populations[sl], cfg, rng, eps,
                                        balance_per_seq[sl])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(c) for c in bounds]
    s_a = np.concatenate([p[0] for p in parts])
    s_b = np.concatenate([p[1] for p in parts])

    if scheme == "A":
        values, spacing = s_a, cfg.sequence_time
    elif scheme == "B":
        values, spacing = s_b, cfg.sequence_time
    elif scheme == "C":
        values, spacing = readout.pair_difference(s_a), 2 * cfg.sequence_time
    else:
        values, spacing = readout.pair_difference(s_b), 2 * cfg.sequence_time
    return ReadoutSeries(values, spacing, scheme)


def field_response(scenario: Scenario, scheme: str) -> float:
    """Analytic small-signal response ``|dS/dB|`` (1/T) of a scheme."""
    env = 1.0
    if scenario.decay is not None:
        env = scenario.decay.envelope(scenario.sequence.phase_time)
    return readout.signal_response_per_tesla(
        scenario.readout, scenario.sequence.phase_time,
        scenario.hamiltonian.gamma_e, env, scheme)


def error_conversion_slopes(scenario: Scenario, dg=3e-4, df=30.0):
    """Small-error population slopes (per relative amplitude, per Hz)."""
    s = scenario.sequence
    dz_g = sequences.pulse_error_response(
        [dg], [0.0], phase_time=s.phase_time, rabi=s.rabi,
        params=scenario.hamiltonian, final_phase=s.final_phase,
        m_i_values=s.m_i_values())[0, 0]
    dz_f = sequences.pulse_error_response(
        [0.0], [df], phase_time=s.phase_time, rabi=s.rabi,
        params=scenario.hamiltonian, final_phase=s.final_phase,
        m_i_values=s.m_i_values())[0, 0]
    return dz_g / dg, dz_f / df


# ---------------------------------------------------------------------------
# experiment: AC amplitude sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepResult:
    amplitudes: np.ndarray
    means: dict                    # scheme -> mean signal per amplitude
    response_amplitude: dict       # scheme -> fitted modulation amplitude
    outputs: list = field(default_factory=list)


def run_ac_sweep(scenario: Scenario, amplitudes, out_dir=None,
                 threads: int = 1) -> SweepResult:
    """Mean extracted signal versus test-field amplitude.

    The test field is phase-locked to the echo (period equal to the
    free-evolution time, zero crossing on the refocusing pulse); the mean
    response of each scheme is sinusoidal in the accumulated phase and
    its fitted modulation amplitude is the signal amplitude entering the
    closed-form sensitivity.
    """
    amplitudes = np.asarray(amplitudes, dtype=float)
    n = scenario.n_sequences
    n_total = n * amplitudes.size
    dg_all, df_all = _mw_error_samples(scenario, n_total)
    eps_all = _laser_window_noise(scenario, n_total)

    phase_time = scenario.sequence.phase_time
    gamma_e = scenario.hamiltonian.gamma_e
    means = {scheme: np.empty(amplitudes.size) for scheme in scenario.schemes}
    chunks_per_amp = (n + CHUNK_SIZE - 1) // CHUNK_SIZE

    for k, amp in enumerate(amplitudes):
        sl = slice(k * n, (k + 1) * n)
        ac = sequences.locked_field(amp, phase_time)
        eps = tuple(None if e is None else e[sl] for e in eps_all)
        for scheme in scenario.schemes:
            p = _scheme_populations(scenario, scheme, dg_all[sl], df_all[sl],
                                    ac_field=ac)
            series = _sample_scheme_series(
                scenario, scheme, p, eps,
                stream=SCHEME_STREAMS[scheme] + 1000 * (k + 1),
                threads=threads)
            means[scheme][k] = series.values.mean()

    # fit mean = offset + A * sin(phi(B)) per scheme
    phi = sequences.analytic_echo_phase(amplitudes, phase_time, gamma_e)
    response = {}
    basis = np.column_stack([np.ones_like(phi), np.sin(phi)])
    for scheme in scenario.schemes:
        coef, *_ = np.linalg.lstsq(basis, means[scheme], rcond=None)
        response[scheme] = float(abs(coef[1]))

    result = SweepResult(amplitudes, means, response)
    if out_dir is not None:
        manifest = RunManifest.start(scenario)
        header = ["b_ac_T"] + [f"mean_signal_{s}" for s in scenario.schemes]
        cols = [amplitudes] + [means[s] for s in scenario.schemes]
        result.outputs.append(_io.write_table(
            f"{out_dir}/sweep.csv", header, cols))
        result.outputs.append(_io.write_table(
            f"{out_dir}/sweep_response.csv",
            [f"response_amplitude_{s}" for s in scenario.schemes],
            [np.array([response[s]]) for s in scenario.schemes]))
        _finalize(manifest, result.outputs, out_dir)
    return result


# ---------------------------------------------------------------------------
# experiment: scaling of deviation with averaging time
# ---------------------------------------------------------------------------

@dataclass
class SchemeScaling:
    series: ReadoutSeries
    allan: analysis.ScalingCurve
    std: analysis.ScalingCurve
    response_per_tesla: float


@dataclass
class ScalingResult:
    schemes: dict                  # scheme -> SchemeScaling
    outputs: list = field(default_factory=list)


def run_scaling_experiment(scenario: Scenario, out_dir=None,
                           threads: int = 1) -> ScalingResult:
    """Consecutive field evaluations at the working point, with scaling
    curves (Allan deviation and standard deviation of block means).

    The test field is off: the run probes how the per-evaluation
    deviation averages down, with correlated microwave and laser noise
    sampled across sequences from the scenario's spectral models.
    """
    n = scenario.n_sequences
    dg, df = _mw_error_samples(scenario, n)
    eps = _laser_window_noise(scenario, n)
    out = {}
    for scheme in scenario.schemes:
        p = _scheme_populations(scenario, scheme, dg, df)
        series = _sample_scheme_series(scenario, scheme, p, eps,
                                       stream=SCHEME_STREAMS[scheme],
                                       threads=threads)
        grid = analysis.default_time_grid(series.values.size, series.spacing)
        out[scheme] = SchemeScaling(
            series=series,
            allan=analysis.allan_deviation(series.values, series.spacing, grid),
            std=analysis.std_vs_time(series.values, series.spacing, grid),
            response_per_tesla=field_response(scenario, scheme),
        )

    result = ScalingResult(out)
    if out_dir is not None:
        manifest = RunManifest.start(scenario)
        for scheme, sc in out.items():
            result.outputs.append(_io.write_table(
                f"{out_dir}/series_{scheme}.csv",
                ["index", "time_s", "value"],
                [np.arange(sc.series.values.size), sc.series.times(),
                 sc.series.values]))
            for curve, tag in ((sc.allan, "allan"), (sc.std, "std")):
                result.outputs.append(_io.write_table(
                    f"{out_dir}/{tag}_{scheme}.csv",
                    ["tau_s", "deviation", "deviation_T"],
                    [curve.times, curve.values,
                     curve.values / sc.response_per_tesla]))
        _finalize(manifest, result.outputs, out_dir)
    return result


# ---------------------------------------------------------------------------
# experiment: pulse-error scaling
# ---------------------------------------------------------------------------

@dataclass
class ErrorScalingResult:
    amplitude_errors: np.ndarray
    amplitude_response: np.ndarray
    frequency_errors: np.ndarray
    frequency_response: np.ndarray
    outputs: list = field(default_factory=list)


def run_error_scaling(scenario: Scenario, amplitude_errors=None,
                      frequency_errors=None, out_dir=None) -> ErrorScalingResult:
    """Population error versus drive amplitude / frequency error.

    Emits the two limiting scans (one error at a time) of the population
    error at the working point.
    """
    if amplitude_errors is None:
        amplitude_errors = np.logspace(-4, -1, 25)
    if frequency_errors is None:
        frequency_errors = np.logspace(1, 5, 25)
    amplitude_errors = np.asarray(amplitude_errors, dtype=float)
    frequency_errors = np.asarray(frequency_errors, dtype=float)
    s = scenario.sequence
    kwargs = dict(phase_time=s.phase_time, rabi=s.rabi,
                  params=scenario.hamiltonian, final_phase=s.final_phase,
                  m_i_values=s.m_i_values())
    dz_g = sequences.pulse_error_response(amplitude_errors, [0.0], **kwargs)[:, 0]
    dz_f = sequences.pulse_error_response([0.0], frequency_errors, **kwargs)[0, :]
    result = ErrorScalingResult(amplitude_errors, dz_g, frequency_errors, dz_f)
    if out_dir is not None:
        manifest = RunManifest.start(scenario)
        result.outputs.append(_io.write_table(
            f"{out_dir}/error_scaling_amplitude.csv",
            ["delta_g", "delta_z"], [amplitude_errors, dz_g]))
        result.outputs.append(_io.write_table(
            f"{out_dir}/error_scaling_frequency.csv",
            ["delta_f_Hz", "delta_z"], [frequency_errors, dz_f]))
        _finalize(manifest, result.outputs, out_dir)
    return result


# ---------------------------------------------------------------------------
# experiment: cumulative noise budgets
# ---------------------------------------------------------------------------

@dataclass
class BudgetResult:
    freqs: np.ndarray
    raw: dict            # channel -> cumulative curve, signal units
    filtered: dict       # channel -> scheme-D filtered curve, signal units
    sigma1: dict         # scheme -> shot-only per-evaluation deviation
    slopes: dict         # channel -> conversion slope to signal units
    outputs: list = field(default_factory=list)


def run_noise_budget(scenario: Scenario, out_dir=None,
                     n_reference: int = 4096, grid_points: int = 400,
                     budget_scheme: str = "D") -> BudgetResult:
    """Cumulative noise budgets, raw and filtered, in signal units.

    Every channel's spectral density is integrated downward from the
    inverse sequence length and converted to per-evaluation signal units
    through its linear error slope, so the curves compare directly
    against the shot-noise-only per-evaluation deviation measured from a
    short reference run.  Filtered budgets apply the integration-window
    transmission of the requested scheme (microwave channels see the
    unreferenced-within-sequence variant, see
    :func:`nvmag.filters.filter_scheme_for_channel`).
    """
    cfg = scenario.readout
    f_top = 1.0 / cfg.sequence_time
    f_floor = 1.0 / (scenario.n_sequences * cfg.sequence_time)
    freqs = np.logspace(math.log10(f_floor), math.log10(f_top), grid_points)

    slope_g, slope_f = error_conversion_slopes(scenario)
    ds_dp = readout.signal_slope_per_population(cfg)
    level = 1.0 - cfg.contrast * 0.5 * readout.window_dip_fraction(cfg, 0)
    slopes = {
        "laser_intensity": level,
        "mw_amplitude": slope_g * ds_dp,
        "mw_frequency": slope_f * ds_dp,
    }

    raw, filtered = {}, {}
    for channel, model in scenario.noise.items():
        density = model.density(freqs)
        raw[channel] = slopes[channel] * _noise.cumulative_rss_descending(
            freqs, density, f_top)
        window = filters.window_for_signal(
            filters.filter_scheme_for_channel(budget_scheme, channel),
            cfg.laser_time, cfg.window_time, cfg.sequence_time)
        filtered[channel] = slopes[channel] * \
            filters.filtered_cumulative_noise_descending(freqs, density,
                                                         window, f_top)

    # shot-noise-only reference deviation per evaluation
    sigma1 = {}
    n_ref = n_reference + (n_reference % 2)
    for scheme in scenario.schemes:
        p = _scheme_populations(scenario, scheme, np.zeros(n_ref),
                                np.zeros(n_ref))
        series = _sample_scheme_series(
            scenario, scheme, p, (None, None),
            stream=SCHEME_STREAMS[scheme] + SIGMA1_STREAM_OFFSET)
        sigma1[scheme] = float(series.values.std(ddof=1))

    result = BudgetResult(freqs, raw, filtered, sigma1, slopes)
    if out_dir is not None:
        manifest = RunManifest.start(scenario)
        for channel in scenario.noise:
            result.outputs.append(_io.write_table(
                f"{out_dir}/budget_raw_{channel}.csv",
                ["f_Hz", "cumulative_value"], [freqs, raw[channel]]))
            result.outputs.append(_io.write_table(
                f"{out_dir}/budget_filtered_{budget_scheme}_{channel}.csv",
                ["f_Hz", "cumulative_value"], [freqs, filtered[channel]]))
        schemes = sorted(sigma1)
        result.outputs.append(_io.write_table(
            f"{out_dir}/sigma1.csv",
            [f"sigma1_{s}" for s in schemes],
            [np.array([sigma1[s]]) for s in schemes]))
        _finalize(manifest, result.outputs, out_dir)
    return result


def _finalize(manifest: RunManifest, outputs, out_dir) -> None:
    for path in outputs:
        manifest.add_output(path)
    manifest.finish(out_dir)
