import numpy as np
import pytest

from spinlattice.experiment import (
    ConfigError,
    EnergyRecord,
    ExperimentConfig,
    converge,
    load_state,
    loglog_slope,
    twisted_initial_state,
    save_state,
    simulate,
    write_energy_file,
)

from oracles import twisted_spins


def test_twisted_initial_state():
    s = twisted_initial_state(30)
    np.testing.assert_array_equal(s.q, np.arange(1, 31))
    np.testing.assert_array_equal(s.p, 0)
    assert np.max(np.abs(np.linalg.norm(s.spins, axis=1) - 1)) <= 1e-15
    assert np.all(s.spins[:, 2] > 0)
    np.testing.assert_allclose(s.spins, twisted_spins(30), rtol=0, atol=1e-15)


def test_config_defaults_are_reference_values():
    c = ExperimentConfig()
    assert (c.n, c.period, c.masses, c.u0, c.r_m, c.j0, c.r_c) == (30, 30.0, 1.0, 1.0, 1.0, 10.0, 1.5)


def test_config_parse(tmp_path):
    text = """
    # chain
    n = 4
    L = 4.4
    masses = 1, 2, 3, 4
    J0 = 2.5   # weaker coupling
    h = 1/64 if False else 0.015625
    """.replace("1/64 if False else ", "")
    c = ExperimentConfig.parse(text)
    assert c.n == 4 and c.period == 4.4 and c.j0 == 2.5 and c.h == 0.015625
    assert c.masses == (1.0, 2.0, 3.0, 4.0)
    np.testing.assert_array_equal(c.model().mass.diagonal, [1, 2, 3, 4])


@pytest.mark.parametrize(
    "text",
    ["n = 4\nbogus = 1\n", "n 4\n", "n = four\n", "n = 1\n", "r_c = -1\n", "n = 3\nmasses = 1, 2\n"],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        ExperimentConfig.parse(text)


def test_state_file_round_trip(tmp_path):
    s = twisted_initial_state(7)
    path = tmp_path / "s.dat"
    save_state(path, s)
    back = load_state(path)
    np.testing.assert_array_equal(back.spins, s.spins)
    np.testing.assert_array_equal(back.q, s.q)
    np.testing.assert_array_equal(back.p, s.p)


def test_initial_state_from_file(tmp_path):
    save_state(tmp_path / "start.dat", twisted_initial_state(5))
    (tmp_path / "run.cfg").write_text("n = 5\nL = 5\ninitial = start.dat\n")
    c = ExperimentConfig.from_file(tmp_path / "run.cfg")
    np.testing.assert_array_equal(c.initial_state().spins, twisted_initial_state(5).spins)
    bad = c.replace(n=6)
    with pytest.raises(ConfigError):
        bad.initial_state()


def test_simulate_zero_time():
    res = simulate(ExperimentConfig(t_end=0.0))
    assert len(res.records) == 1
    assert res.records[0].T == 0.0
    assert res.max_energy_deviation == 0.0


def test_simulate_equilibrium_rows_identical():
    # unit spacing sits at the Lennard-Jones minimum and J0 = 0 switches off the spins
    c = ExperimentConfig(n=6, period=6.0, r_m=1.0, j0=0.0, t_end=0.5, h=0.05, stride=1)
    res = simulate(c)
    rows = np.array(res.records)
    np.testing.assert_allclose(rows[:, 1:], np.tile(rows[0, 1:], (len(rows), 1)), atol=1e-13)


def test_records_and_reported_deviation():
    res = simulate(ExperimentConfig(n=8, period=8.0, t_end=1.0, stride=5))
    assert len(res.records) == 21
    for r in res.records:
        assert abs(r.Htot - (r.Hmag + r.Hpot + r.Hkin)) <= 1e-14
    h0 = res.records[0].Htot
    assert res.max_energy_deviation == max(abs(r.Htot - h0) for r in res.records)
    assert res.max_iterations >= 1


def test_energy_file_deterministic(tmp_path):
    c = ExperimentConfig(n=6, period=6.0, t_end=0.2)
    write_energy_file(tmp_path / "a.dat", simulate(c).records)
    write_energy_file(tmp_path / "b.dat", simulate(c).records)
    a = (tmp_path / "a.dat").read_bytes()
    assert a == (tmp_path / "b.dat").read_bytes()
    lines = a.decode().splitlines()
    assert lines[0] == "T Hmag Hpot Hkin"
    back = np.loadtxt(tmp_path / "a.dat", skiprows=1)
    recs = simulate(c).records
    np.testing.assert_array_equal(back, np.array(recs))


def test_energy_record_fields():
    r = EnergyRecord(1.0, 0.5, -2.0, 0.25)
    assert r.Htot == -1.25


def test_converge_self_comparison():
    res = converge(ExperimentConfig(n=6, period=6.0, t_end=0.25), [2.0**-6], 2.0**-6)
    assert res.err.tolist() == [0.0]


def test_converge_rejects_coarse_reference():
    with pytest.raises(ConfigError):
        converge(ExperimentConfig(t_end=0.25), [2.0**-6], 2.0**-4)


def test_loglog_slope():
    h = np.array([0.1, 0.05, 0.025])
    assert loglog_slope(h, 3 * h**2) == pytest.approx(2.0)
    assert loglog_slope(h, [0.0, 0.0, 1.0]) != loglog_slope(h, [0.0, 0.0, 1.0])  # nan


def test_short_convergence_study_second_order():
    c = ExperimentConfig(n=10, period=10.0, t_end=0.5)
    res = converge(c, [2.0**-k for k in range(4, 8)], 2.0**-10)
    assert 1.8 <= res.slope <= 2.2
