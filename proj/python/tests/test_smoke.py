import math

import numpy as np
import pytest

import pdfrac

SMALL = """
[domain]
x0 = 0
x1 = 2 cm
y0 = 0
y1 = 2 cm

[discretization]
horizon = 4 mm
h = 1 mm

[time]
dt = 4 ns
final_time = 0.2 us
"""


def test_presets_listed():
    names = pdfrac.presets()
    assert "relaxation" in names
    assert "crack_eps8_h4" in names
    assert "[time]" in pdfrac.preset_config("relaxation")


def test_tensile_potential_shape():
    f = pdfrac.TensilePotential(4712.4, 1.5647e8)
    assert f.value(0.0) == 0.0
    assert f.first(f.inflection) > f.first(0.5 * f.inflection)
    assert f.second(f.inflection) == pytest.approx(0.0, abs=1e-6 * f.second(0.0))
    assert f.value(f.inflection) < f.value(2 * f.inflection) < f.asymptote


def test_force_matches_reference():
    assert pdfrac.oracle_difference(12, 1e-3, 4e-3, seed=3) <= 1e-12


def test_lipschitz_ratios_below_one():
    ratios = pdfrac.lipschitz_ratios(10, 1e-3, 4e-3, trials=3)
    assert len(ratios) == 3
    assert max(ratios) <= 1.0


def test_projection_error_shrinks():
    coarse = pdfrac.projection_error(1.0, 1 / 8)
    fine = pdfrac.projection_error(1.0, 1 / 16)
    assert math.log2(coarse / fine) == pytest.approx(1.0, abs=0.1)


def test_simulation_from_text_advances():
    sim = pdfrac.Simulation(SMALL)
    assert sim.nodes == 21 * 21
    assert sim.steps == 50
    u = sim.u
    assert u.shape == (sim.nodes, 2)
    assert not u.any()
    u[:, 0] = 1e-6 * np.sin(sim.coordinates()[:, 1] * 300.0)
    sim.u = u
    e0 = sim.diagnostics()["total"]
    rows = sim.run(stride=10)
    assert sim.step_index == 50
    assert sim.t == pytest.approx(2e-7)
    assert len(rows) == 6
    assert rows[-1]["total"] == pytest.approx(e0, rel=1e-2)
    assert sim.damage().shape == (sim.nodes,)


def test_force_is_translation_invariant():
    sim = pdfrac.Simulation(SMALL)
    rng = np.random.default_rng(0)
    u = 1e-6 * rng.uniform(-1, 1, (sim.nodes, 2))
    a = sim.force(u)
    b = sim.force(u + np.array([3e-5, -1e-5]))
    assert np.max(np.abs(a - b)) <= 1e-8 * np.max(np.abs(a))


def test_bad_input_raises():
    with pytest.raises(pdfrac.ConfigError):
        pdfrac.Simulation(SMALL.replace("horizon", "horizn"))
    sim = pdfrac.Simulation(SMALL)
    with pytest.raises(ValueError):
        sim.force(np.zeros((3, 2)))


def test_thread_count_does_not_change_results():
    sim = pdfrac.Simulation(SMALL)
    u = 1e-5 * np.random.default_rng(1).uniform(-1, 1, (sim.nodes, 2))
    pdfrac.set_threads(1)
    one = sim.force(u)
    pdfrac.set_threads(4)
    four = sim.force(u)
    pdfrac.set_threads(1)
    assert np.array_equal(one, four)
