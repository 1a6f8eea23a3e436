"""Tests for the physics scenario presets."""
import math

import numpy as np
import pytest

from decolab.errors import PreconditionError, UnsupportedConfigError
from decolab.hilbert import density_of, partial_trace
from decolab.scenarios import (
    TwoSlitConfig, two_slit_run, two_slit_visibility, visibility_exponent,
    ChiralConfig, chiral_dynamics, chiral_run, classify_regime, relaxation_rate, time_to_reach,
    ChargeModel, charge_reduced_density,
    DecayConfig, decay_survival, golden_rule_rate, revival_time, survival_peak, exponential_fit,
    MeasurementChain, build_chain_state, run_chain,
    SCENARIOS, scenario_names,
)


# ---------------------------------------------------------------- two-slit

def test_two_slit_config_validation():
    with pytest.raises(ValueError):
        TwoSlitConfig(slit_separation=0.08, packet_width=0.05)
    with pytest.raises(ValueError):
        TwoSlitConfig(dt=-0.1)


def test_two_slit_edge_precondition():
    # packets wider than the grid must be rejected, not silently wrapped
    with pytest.raises(PreconditionError):
        two_slit_visibility(TwoSlitConfig(packet_width=0.4, half_width=0.8, t_final=0.1))


def test_two_slit_visibility_monotone_and_normalized():
    trace = two_slit_visibility(TwoSlitConfig(t_final=0.5))
    t, rec = trace.as_arrays()
    v = rec["visibility"]
    assert v[0] == 1.0
    assert np.all(np.diff(v) < 0)
    assert np.max(np.abs(rec["trace"] - 1.0)) < 1e-10


def test_two_slit_frozen_mode_is_exact():
    cfg = TwoSlitConfig(mass=math.inf, lam=1.0, t_final=1.0, dt=0.01)
    trace, final = two_slit_run(cfg)
    k, resid = visibility_exponent(trace)
    assert k == pytest.approx(cfg.lam * cfg.slit_separation**2, rel=1e-10)
    assert resid < 1e-12
    assert final.audit()["min_eigenvalue"] > -1e-10


def test_two_slit_finite_mass_still_decoheres():
    cfg = TwoSlitConfig(mass=50.0, lam=1.0, t_final=0.3, dt=0.005)
    trace = two_slit_visibility(cfg)
    _, rec = trace.as_arrays()
    assert rec["visibility"][-1] < 0.8


# ---------------------------------------------------------------- chiral

def test_chiral_config_validation():
    with pytest.raises(ValueError):
        ChiralConfig(omega=-1.0)
    with pytest.raises(PreconditionError):
        chiral_dynamics(ChiralConfig(omega=1.0, gamma=100.0, dt=0.01))


def test_chiral_rabi_oscillation():
    cfg = ChiralConfig(omega=2.0, gamma=0.0, t_final=10.0, dt=0.001, record_stride=10)
    trace = chiral_dynamics(cfg)
    t, rec = trace.as_arrays()
    exact = np.cos(cfg.omega * t / 2.0) ** 2
    assert np.max(np.abs(rec["p_left"] - exact)) < 1e-6


def test_chiral_frozen_tunneling_is_robust():
    """omega = 0: |L><L| commutes with the monitoring, so nothing moves."""
    cfg = ChiralConfig(omega=0.0, gamma=5.0, t_final=2.0, dt=0.001)
    trace, rho = chiral_run(cfg)
    _, rec = trace.as_arrays()
    assert np.all(rec["p_left"] == 1.0)
    assert rho[0, 0].real == pytest.approx(1.0, abs=1e-12)


def test_chiral_strong_monitoring_relaxation():
    cfg = ChiralConfig(omega=1.0, gamma=50.0, t_final=100.0, dt=0.001, record_stride=100)
    trace = chiral_dynamics(cfg)
    rate = relaxation_rate(trace)
    assert rate == pytest.approx(cfg.omega**2 / (2.0 * cfg.gamma), rel=0.05)


def test_chiral_trace_is_conserved():
    cfg = ChiralConfig(omega=1.0, gamma=3.0, t_final=5.0, dt=0.001)
    trace = chiral_dynamics(cfg)
    _, rec = trace.as_arrays()
    assert np.max(np.abs(rec["trace"] - 1.0)) < 1e-12


def test_classify_regime_thresholds():
    assert classify_regime(ChiralConfig(omega=1.0, gamma=0.01)) == "unitary"
    assert classify_regime(ChiralConfig(omega=1.0, gamma=1.0)) == "master"
    assert classify_regime(ChiralConfig(omega=1.0, gamma=50.0)) == "zeno"
    assert classify_regime(ChiralConfig(omega=0.0, gamma=1.0)) == "zeno"
    assert classify_regime(ChiralConfig(omega=0.0, gamma=0.0)) == "unitary"


def test_time_to_reach():
    cfg = ChiralConfig(omega=1.0, gamma=0.0, t_final=4.0, dt=0.001, record_stride=1)
    trace = chiral_dynamics(cfg)
    t_half = time_to_reach(trace, 0.5)
    assert t_half == pytest.approx(math.pi / 2.0, abs=0.01)
    assert time_to_reach(trace, -1.0) == math.inf


# ---------------------------------------------------------------- charge

def test_charge_model_validation():
    with pytest.raises(ValueError):
        ChargeModel(np.array([1.0, 1.0]), 1, np.eye(2))  # not normalized
    with pytest.raises(ValueError):
        ChargeModel(np.array([1.0, 0.0]) , -1, np.eye(2))
    with pytest.raises(ValueError):
        ChargeModel(np.array([0.6, 0.8]), 1, np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_charge_orthogonal_shells_superselect():
    c = np.array([0.6, 0.8])
    rho = charge_reduced_density(ChargeModel(c, 1, np.eye(2)))
    assert rho.entries[0, 1] == 0.0 and rho.entries[1, 0] == 0.0
    assert np.array_equal(np.diag(rho.entries), np.abs(c) ** 2 + 0.0j)


def test_charge_zero_shells_is_pure():
    c = np.array([0.6, 0.8])
    rho = charge_reduced_density(ChargeModel(c, 0, np.eye(2)))
    assert np.allclose(rho.entries, np.outer(c, c), atol=1e-15)
    assert rho.purity() == pytest.approx(1.0)


def test_charge_offdiagonal_decays_geometrically():
    c = np.array([1.0, 1.0]) / math.sqrt(2)
    gram = np.array([[1.0, 0.9], [0.9, 1.0]])
    vals = [abs(charge_reduced_density(ChargeModel(c, r, gram)).entries[0, 1])
            for r in range(5)]
    for r in range(1, 5):
        assert vals[r] == pytest.approx(0.5 * 0.9**r, abs=1e-14)


# ---------------------------------------------------------------- decay

def test_decay_config_validation():
    with pytest.raises(ValueError):
        DecayConfig(n_modes=0)
    with pytest.raises(ValueError):
        DecayConfig(detuning_offsets=np.zeros(3), n_modes=5)


def test_decay_span_precondition():
    with pytest.raises(PreconditionError):
        decay_survival(DecayConfig(n_modes=9, mode_spacing=0.5, coupling=1.0))


def test_decay_survival_starts_at_one_and_decays():
    trace = decay_survival(DecayConfig(t_final=1.0))
    t, rec = trace.as_arrays()
    p = rec["survival"]
    assert p[0] == pytest.approx(1.0, abs=1e-12)
    gamma = golden_rule_rate(DecayConfig())
    assert p[-1] < math.exp(-gamma * t[-1] / 2.0)


def test_revival_time_requires_uniform_spacing():
    cfg = DecayConfig()
    assert revival_time(cfg) == pytest.approx(2.0 * math.pi / cfg.mode_spacing)
    rng = np.random.default_rng(0)
    bumpy = DecayConfig(detuning_offsets=rng.normal(scale=0.01, size=161))
    with pytest.raises(UnsupportedConfigError):
        revival_time(bumpy)


def test_monitored_decay_is_exponential():
    cfg = DecayConfig(monitored=True, t_final=4.0)
    trace = decay_survival(cfg)
    rate, amp, resid = exponential_fit(trace)
    assert resid < 0.01
    assert rate > 0


def test_survival_peak_lookup():
    trace = decay_survival(DecayConfig())
    t_rev = revival_time(DecayConfig())
    peak_t, peak_p = survival_peak(trace, 0.6 * t_rev)
    assert peak_t >= 0.6 * t_rev
    assert 0.0 < peak_p <= 1.0


# ---------------------------------------------------------------- chain

def test_chain_validation():
    with pytest.raises(ValueError):
        MeasurementChain(np.array([1.0, 1.0]))  # not normalized
    with pytest.raises(ValueError):
        MeasurementChain(np.array([0.6, 0.8]), app_dim=1)


def test_chain_stages_entangle_progressively():
    c = np.array([0.6, 0.8])
    chain = MeasurementChain(c)
    meas = build_chain_state(chain, "meas")
    decoh = build_chain_state(chain, "decoh")
    with pytest.raises(ValueError):
        build_chain_state(chain, "collapse")
    # reduced system state is diag(|c|^2) at both stages (records exist)
    for state in (meas, decoh):
        red = partial_trace(density_of(state), (0,))
        assert np.allclose(red.entries, np.diag(c**2), atol=1e-14)
    # but the apparatus+system pair still carries coherence before the
    # environment copy exists
    pair_meas = partial_trace(density_of(meas), (0, 1))
    pair_decoh = partial_trace(density_of(decoh), (0, 1))
    assert np.abs(pair_meas.entries).sum() > np.abs(pair_decoh.entries).sum()


def test_run_chain_is_deterministic_and_unbiased():
    chain = MeasurementChain(np.array([0.6, 0.8]), seed=123)
    a = run_chain(chain, 50000)
    b = run_chain(chain, 50000)
    assert np.array_equal(a.counts, b.counts)
    assert a.n_runs == 50000
    assert abs(a.frequencies[0] - 0.36) < 3.0 * math.sqrt(0.36 * 0.64 / 50000)


def test_run_chain_prefix_property():
    """The counter-based stream makes shorter runs a prefix of longer ones."""
    chain = MeasurementChain(np.array([1.0, 1.0, 1.0, 1.0]) / 2.0, seed=9)
    short = run_chain(chain, 1000)
    long = run_chain(chain, 2000)
    assert long.n_runs == 2000
    # frequencies of the long run stay near the short-run frequencies
    assert np.max(np.abs(long.frequencies - short.frequencies)) < 0.05


# ---------------------------------------------------------------- registry

def test_registry_names_and_defaults():
    names = scenario_names()
    assert "two-slit" in names and "born-chain" in names
    for name in names:
        spec = SCENARIOS[name]
        for pname, ps in spec.params.items():
            ps.check(pname, ps.default)  # every default satisfies its own bounds


def test_registry_runs_produce_audited_results():
    result = SCENARIOS["charge-shells"].run(
        {"n_charges": 2, "shells": 100, "overlap": 0.9}, 0, 10)
    assert result.audit["trace_drift"] < 1e-12
    assert "final_offdiagonal_sum" in result.summary
