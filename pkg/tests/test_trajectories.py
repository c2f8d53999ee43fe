import numpy as np
import pytest
from scipy import stats

from bundleqed import (HilbertSpace, SystemParams, group_bundles, ket,
                       mcwf_run, run_ensemble)
from bundleqed.fock import G, X
from bundleqed.trajectories import (EmissionRecord, default_gap_threshold,
                                    empirical_statistics)


def decay_only_params(kappa=0.4):
    return SystemParams(g=1e-12, f=0.0, gamma=0.0, kappa=kappa,
                        delta_lx=0.0, delta_cx=0.0)


def test_dark_state_never_jumps(qd):
    record = mcwf_run(qd.replace(f=0.0), HilbertSpace(2), 5000.0, seed=3)
    assert len(record.cavity_emissions) == 0
    assert len(record.radiative_emissions) == 0


def test_reproducibility_bit_identical(sc_bad):
    space = HilbertSpace(8)
    rec_a = mcwf_run(sc_bad, space, 20000.0, seed=(7, 1))
    rec_b = mcwf_run(sc_bad, space, 20000.0, seed=(7, 1))
    assert len(rec_a.cavity_emissions) > 0
    assert np.array_equal(rec_a.cavity_emissions, rec_b.cavity_emissions)
    assert np.array_equal(rec_a.radiative_emissions, rec_b.radiative_emissions)
    assert np.array_equal(rec_a.pn_time_average, rec_b.pn_time_average)
    rec_c = mcwf_run(sc_bad, space, 20000.0, seed=(7, 2))
    assert not np.array_equal(rec_a.cavity_emissions, rec_c.cavity_emissions)


def test_jump_time_matches_inverted_threshold():
    """Single decay channel: the bisected jump time must equal -ln(u)/kappa."""
    kappa = 0.37
    space = HilbertSpace(1)
    psi0 = ket(space, G, 1)
    record = mcwf_run(decay_only_params(kappa), space, 100.0, seed=11, psi0=psi0)
    assert len(record.cavity_emissions) == 1
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((11,))))
    u = rng.random()
    assert abs(record.cavity_emissions[0] - (-np.log(u) / kappa)) < 1e-10


def test_single_decay_waiting_times_exponential():
    kappa = 0.25
    space = HilbertSpace(1)
    psi0 = ket(space, G, 1)
    params = decay_only_params(kappa)
    times = []
    for i in range(2000):
        record = mcwf_run(params, space, 400.0, seed=(99, i), psi0=psi0)
        assert len(record.cavity_emissions) == 1
        times.append(record.cavity_emissions[0])
    times = np.asarray(times)
    assert np.isclose(times.mean(), 1 / kappa, rtol=0.1)
    result = stats.kstest(times, "expon", args=(0.0, 1 / kappa))
    assert result.pvalue > 0.01


def test_events_sorted_and_in_range(sc_bad):
    record = mcwf_run(sc_bad, HilbertSpace(8), 3000.0, seed=21)
    for events in (record.cavity_emissions, record.radiative_emissions):
        assert np.all(events >= 0) and np.all(events <= record.t_end)
        assert np.all(np.diff(events) > 0)
    assert len(record.cavity_emissions) > 0


def test_dephasing_jumps_are_not_emissions(qd):
    params = qd.replace(gamma=0.0, kappa=0.0, gamma_phi=0.5 * qd.g,
                        delta_lx=0.0, delta_cx=0.0)
    space = HilbertSpace(2)
    record = mcwf_run(params, space, 2000.0, seed=5, psi0=ket(space, X, 0))
    assert len(record.dephasing_events) > 0
    assert len(record.cavity_emissions) == 0
    assert len(record.radiative_emissions) == 0


def test_ensemble_unbiased_against_exact_decay():
    """Trajectory-averaged <a^dag a>(t) within 3 standard errors of the
    analytic 2 exp(-kappa t) decay; every trajectory jumps twice."""
    kappa, n_traj = 0.4, 400
    params = decay_only_params(kappa)
    space = HilbertSpace(2)
    grid = np.linspace(0.0, 10.0, 21)
    psi0 = ket(space, G, 2)
    records = [mcwf_run(params, space, 10.0, (5, i), psi0=psi0,
                        record_grid=grid, accumulate_pn=False)
               for i in range(n_traj)]
    stack = np.vstack([r.grid_mean_n for r in records])
    mean = stack.mean(axis=0)
    se = stack.std(axis=0, ddof=1) / np.sqrt(n_traj)
    exact = 2.0 * np.exp(-kappa * grid)
    assert np.all(np.abs(mean - exact) <= 3.0 * se + 1e-12)
    counts = [len(r.cavity_emissions) for r in records]
    assert np.isclose(np.mean(counts), 2.0, atol=0.05)


def test_parallel_ensemble_is_bit_identical_to_serial(sc_bad):
    space = HilbertSpace(6)
    serial = run_ensemble(sc_bad, space, 500.0, master_seed=9, n_trajectories=4)
    parallel = run_ensemble(sc_bad, space, 500.0, master_seed=9, n_trajectories=4,
                            workers=2)
    for rec_s, rec_p in zip(serial, parallel):
        assert np.array_equal(rec_s.cavity_emissions, rec_p.cavity_emissions)
        assert np.array_equal(rec_s.pn_time_average, rec_p.pn_time_average)


def make_record(times, t_end=100.0):
    return EmissionRecord(cavity_emissions=np.asarray(times, dtype=float),
                          radiative_emissions=np.empty(0), t_end=t_end, seed=(0,))


def test_group_bundles_clear_separation():
    gaps = [0.1, 0.1, 5.0, 0.1, 0.1]
    times = np.concatenate([[1.0], 1.0 + np.cumsum(gaps)])
    grouping = group_bundles(make_record(times), gap_threshold=1.0)
    sizes = [len(members) for _, members in grouping.bundles]
    assert sizes == [3, 3]
    # intra-bundle gaps strictly below the threshold, inter-bundle gaps above
    for _, members in grouping.bundles:
        assert np.all(np.diff(members) < 1.0)
    assert grouping.bundles[1][0] - grouping.bundles[0][1][-1] >= 1.0


def test_group_bundles_empty_and_singletons():
    assert group_bundles(make_record([]), 1.0).bundles == []
    grouping = group_bundles(make_record([1.0, 5.0, 9.0]), 2.0)
    assert [len(m) for _, m in grouping.bundles] == [1, 1, 1]


def test_default_gap_threshold(sc_bad):
    assert np.isclose(default_gap_threshold(sc_bad), 3.0 / sc_bad.kappa)


def test_empirical_statistics_aggregation():
    rec1 = make_record([1.0, 1.1, 8.0, 8.05, 8.15])
    rec2 = make_record([2.0, 2.2])
    stats_out = empirical_statistics([rec1, rec2], gap_threshold=1.0)
    assert stats_out["bundle_size_histogram"] == {2: 2, 3: 1}
    assert stats_out["n_records"] == 2
    key = (2, 0)
    assert stats_out["intra_bundle_waiting_stats"][key]["count"] == 2
    assert len(stats_out["bundle_starts"]) == 3


def test_empirical_statistics_needs_records():
    with pytest.raises(ValueError):
        empirical_statistics([], 1.0)
