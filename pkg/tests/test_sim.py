import math
from dataclasses import replace

import numpy as np
import pytest

from swarmcarry.agent import FORCE, AgentConfig, FleetCommand
from swarmcarry.catenary import PayloadModel, horizontal_tension, payload_stiffness
from swarmcarry.control import SpringDamperConfig
from swarmcarry.errors import DomainError, SimulationDivergedError
from swarmcarry.experiments import default_scenario, step_response_scenario, with_outsider
from swarmcarry.sim import (
    DisturbanceConfig,
    PayloadSpec,
    PlantConfig,
    Scenario,
    _Disturbance,
    kinetic_energy,
    payload_force,
    regular_polygon,
    run,
)

import oracles

P3 = PayloadModel(0.03, 0.6, 3)
QUIET = DisturbanceConfig(kind="none")


def test_triangle_payload_forces_balance():
    pts = regular_polygon(3, 0.6, centre=(1.3, -0.4), rotation=0.3)
    forces = np.array([payload_force(pts, P3, i) for i in range(3)])
    mags = np.linalg.norm(forces, axis=1)
    assert mags == pytest.approx([mags[0]] * 3, rel=1e-12)
    assert np.abs(forces.sum(axis=0)).max() <= 1e-9
    centre = pts.mean(axis=0)
    for i in range(3):
        inward = (centre - pts[i]) / np.linalg.norm(centre - pts[i])
        np.testing.assert_allclose(forces[i] / mags[i], inward, atol=1e-12)
    assert mags[0] == pytest.approx(oracles.horizontal_tension(0.03, 9.81, 3, 0.6, 0.6 / math.sqrt(3)), rel=1e-8)


@pytest.mark.parametrize("n", [2, 4, 5, 7])
def test_symmetric_polygons_balance(n):
    pts = regular_polygon(n, 0.3)
    p = PayloadModel(0.05, 0.6, n)
    total = sum(payload_force(pts, p, i) for i in range(n))
    assert np.abs(total).max() <= 1e-9


def test_payload_force_vanishes_at_centroid():
    pts = np.array([[0.0, 0.0], [1e-12, 0.0]])
    assert np.linalg.norm(payload_force(pts, PayloadModel(0.03, 0.6, 2), 0)) < 1e-9


def test_taut_continuation_is_continuous_and_stiff():
    p = PayloadModel(0.03, 0.6, 2)
    x_sw = 0.98 * 0.6

    def pull(x0):
        return np.linalg.norm(payload_force(np.array([[0.0, 0.0], [2 * x0, 0.0]]), p, 0))

    assert pull(x_sw * (1 - 1e-9)) == pytest.approx(pull(x_sw * (1 + 1e-9)), rel=1e-6)
    assert pull(0.7) - pull(0.65) == pytest.approx(payload_stiffness(p, x_sw) * 0.05, rel=1e-9)
    assert pull(0.6) > horizontal_tension(p, 0.58)


def test_single_agent_reaches_goal():
    sc = Scenario(
        positions=((0.0, 0.0),), controller=None, fleet=FleetCommand(goal=(1.0, 0.5)),
        disturbance=QUIET, duration=12.0,
    )
    log = run(sc)
    assert np.linalg.norm(log.position[-1, 0] - (1.0, 0.5)) <= 0.01
    # cruise segment is a straight line at cruise speed
    mid = np.flatnonzero(np.isclose(log.t, 3.0))[0]
    assert np.linalg.norm(log.velocity[mid, 0]) == pytest.approx(0.2, rel=0.02)
    heading = log.position[400, 0] / np.linalg.norm(log.position[400, 0])
    np.testing.assert_allclose(heading, np.array([1.0, 0.5]) / math.hypot(1.0, 0.5), atol=1e-6)


def test_step_response_settles_near_spacing():
    sc, _ = step_response_scenario()
    log = run(sc)
    for a, b in ((0, 1), (1, 2), (0, 2)):
        d = np.linalg.norm(log.position[:, a] - log.position[:, b], axis=1)
        assert d.max() <= 0.6 * 1.02
        assert abs(d[-1] - 0.6) <= 0.02 * 0.6


def test_rerun_is_identical():
    sc = default_scenario("spring_damper", seed=4)
    a, b = run(sc), run(sc)
    np.testing.assert_array_equal(a.position, b.position)
    np.testing.assert_array_equal(a.command, b.command)


def test_seed_changes_trajectory():
    a = run(default_scenario("lennard_jones", seed=1))
    b = run(default_scenario("lennard_jones", seed=2))
    assert not np.array_equal(a.position, b.position)


def test_kinetic_energy_decays_without_drive():
    sc, _ = step_response_scenario()
    ke = kinetic_energy(run(sc), 0.027)
    later = ke[300:]
    assert np.all(np.diff(later) <= 1e-15)
    base = replace(default_scenario("spring_damper"), disturbance=QUIET)
    sc = replace(base, fleet=replace(base.fleet, attractor_weight=0.0), positions=tuple(map(tuple, np.array(base.positions) * 0.9)))
    ke = kinetic_energy(run(sc), 0.027)
    assert np.all(np.diff(ke[300:]) <= 1e-15)


@pytest.mark.parametrize("kind", ["no_payload", "spring_damper", "lennard_jones"])
def test_halving_dt_barely_moves_final_positions(kind):
    a = replace(default_scenario(kind), disturbance=QUIET)
    b = replace(a, dt=a.dt / 2)
    la, lb = run(a), run(b)
    travelled = np.linalg.norm(la.position[-1] - la.position[0], axis=1)
    drift = np.linalg.norm(la.position[-1] - lb.position[-1], axis=1)
    assert np.all(drift <= 0.01 * travelled)


def test_outsider_does_not_touch_others():
    sc = default_scenario("spring_damper", seed=3)
    a, b = run(sc), run(with_outsider(sc))
    np.testing.assert_array_equal(a.command, b.command[:, :3])
    np.testing.assert_array_equal(a.position, b.position[:, :3])


def test_taut_events_are_counted():
    wide = regular_polygon(3, 1.2)
    sc = Scenario(
        positions=tuple(map(tuple, wide)), controller=None, fleet=FleetCommand((0, 0), attractor_weight=0.0),
        payload=PayloadSpec(), disturbance=QUIET, duration=0.5,
    )
    log = run(sc)
    assert log.metadata["taut_events"] > 0
    assert log.metadata["vertical_tension_N"] == pytest.approx(0.03 * 9.81 / 3)


def test_divergence_is_reported():
    sc = Scenario(
        positions=((0.0, 0.0), (0.5, 0.0)),
        controller=SpringDamperConfig(k=1e6, l0=0.2, f_max=1e9),
        fleet=FleetCommand((0, 0), attractor_weight=0.0),
        plant=PlantConfig(mass_kg=1e-3),
        agent=AgentConfig(command_mode=FORCE, f_cmd_max=1e9),
        disturbance=QUIET, dt=0.1, duration=50.0,
    )
    with pytest.raises(SimulationDivergedError) as err:
        run(sc)
    assert err.value.agent in (0, 1)


def test_hold_keeps_the_initial_state():
    sc, _ = step_response_scenario()
    log = run(sc)
    np.testing.assert_array_equal(log.position[0], np.array(sc.positions))
    assert log.t[0] == 0.0


def test_ou_disturbance_statistics():
    d = _Disturbance(DisturbanceConfig(sigma_force_N=0.005, correlation_time_s=0.5), 0, 1, 0.01)
    samples = np.array([d.sample() for _ in range(200_000)])
    assert samples.std() == pytest.approx(0.005, rel=0.05)
    lag = int(0.5 / 0.01)
    x = samples[:, 0]
    r = np.corrcoef(x[:-lag], x[lag:])[0, 1]
    assert r == pytest.approx(math.exp(-1), abs=0.05)


def test_white_and_none_disturbances():
    w = _Disturbance(DisturbanceConfig(kind="white", sigma_force_N=0.01), 0, 1, 0.01)
    s = np.array([w.sample() for _ in range(20_000)])
    assert s.std() == pytest.approx(0.01, rel=0.05)
    assert abs(np.corrcoef(s[:-1, 0], s[1:, 0])[0, 1]) < 0.05
    n = _Disturbance(QUIET, 0, 1, 0.01)
    assert not n.sample().any()


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(dt=0.0),
        dict(duration=-1.0),
        dict(hold_s=-0.1),
        dict(agent_ids=(0, 0, 1)),
        dict(agent_ids=(0, 1)),
        dict(carriers=(7,)),
        dict(carriers=(0,), payload=PayloadSpec()),
    ],
)
def test_scenario_validation(kwargs):
    base = dict(positions=((0, 0), (1, 0), (0, 1)), controller=None, fleet=FleetCommand((1, 1)))
    base.update(kwargs)
    with pytest.raises(DomainError):
        Scenario(**base)


def test_disturbance_validation():
    with pytest.raises(DomainError):
        DisturbanceConfig(kind="gusty")
    with pytest.raises(DomainError):
        DisturbanceConfig(sigma_force_N=-1.0)
    with pytest.raises(DomainError):
        PlantConfig(mass_kg=0.0)
