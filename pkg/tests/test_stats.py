import json
import math

import numpy as np
import pytest

from hoplab.errors import DomainError
from hoplab.laws import EntryLaw, InitialLaw, SeedSpec
from hoplab.limits import (
    LimitParams,
    increment_cov,
    limit_params_for,
    potential_cov,
    sample_limit_paths,
)
from hoplab.network import ModelParams, TimeGrid, run_ensemble
from hoplab.stats import (
    MomentEstimate,
    cross_corr,
    cross_cov,
    estimate_cov,
    estimate_moment,
    growth_slope,
    increment_correlation,
    ks_gaussian,
)


class FakeEnsemble:
    def __init__(self, values, coords, times):
        self.values = values
        self.coords = coords
        self.times = np.asarray(times)


def _gaussian_ensemble(seed=0, r=5000, rho=0.0):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(r)
    b = rho * a + math.sqrt(1 - rho**2) * rng.standard_normal(r)
    values = np.stack([a, b], axis=1)[:, :, None]  # (r, 2 coords, 1 time)
    return FakeEnsemble(values, coords=(1, 2), times=[0.0])


def test_estimate_moment_point_mass_exact():
    params = ModelParams(
        n=4,
        leak=1.0,
        noise=0.0,
        entry_law=EntryLaw("rademacher", sigma=0.5),
        initial_law=InitialLaw("point_mass", value=1.0),
        grid=TimeGrid(times=(0.0, 1.0)),
    )
    ens = run_ensemble(params, coords=(1,), n_replicas=50, seed=SeedSpec(4))
    est = estimate_moment(ens, coord=1, time=0.0, order=1)
    assert est.value == 1.0
    assert est.std_error == 0.0
    assert est.n_replicas == 50


def test_estimate_moment_against_known_gaussian():
    ens = _gaussian_ensemble(seed=3, r=40_000)
    second = estimate_moment(ens, 1, 0.0, 2)
    assert abs(second.value - 1.0) <= 3.0 * second.std_error
    third = estimate_moment(ens, 1, 0.0, 3)
    assert abs(third.value) <= 3.0 * third.std_error


def test_estimate_cov_diagonal_equals_centered_second_moment():
    ens = _gaussian_ensemble(seed=9, r=500)
    x = ens.values[:, 0, 0]
    est = estimate_cov(ens, 1, 0.0, 0.0)
    centered = ((x - x.mean()) ** 2).sum() / (len(x) - 1)
    assert est.value == pytest.approx(centered, rel=1e-12)


def test_cross_cov_null_and_correlated():
    indep = _gaussian_ensemble(seed=21, r=30_000, rho=0.0)
    est = cross_cov(indep, 1, 2, 0.0)
    assert abs(est.value) <= 3.0 * est.std_error
    dep = _gaussian_ensemble(seed=22, r=30_000, rho=0.5)
    est = cross_cov(dep, 1, 2, 0.0)
    assert abs(est.value - 0.5) <= 4.0 * est.std_error
    corr = cross_corr(dep, 1, 2, 0.0)
    assert abs(corr.value - 0.5) <= 4.0 * corr.std_error


def test_estimators_permutation_invariant():
    ens = _gaussian_ensemble(seed=14, r=2000, rho=0.3)
    perm = np.random.default_rng(0).permutation(2000)
    shuffled = FakeEnsemble(ens.values[perm], ens.coords, ens.times)
    for fn in (
        lambda e: estimate_moment(e, 1, 0.0, 2).value,
        lambda e: estimate_cov(e, 1, 0.0, 0.0).value,
        lambda e: cross_cov(e, 1, 2, 0.0).value,
        lambda e: cross_corr(e, 1, 2, 0.0).value,
    ):
        assert fn(ens) == pytest.approx(fn(shuffled), rel=1e-10)


def test_estimator_input_validation():
    ens = _gaussian_ensemble()
    with pytest.raises(DomainError):
        estimate_moment(ens, 3, 0.0, 1)
    with pytest.raises(DomainError):
        estimate_moment(ens, 1, 5.0, 1)
    with pytest.raises(DomainError):
        estimate_moment(ens, 1, 0.0, 0)


def test_ks_gaussian_null_calibration():
    # on-null data: at significance 1e-3 at most one failure in 100 repetitions
    rng = np.random.default_rng(606)
    variance = 0.7
    failures = sum(
        not ks_gaussian(rng.normal(0.0, math.sqrt(variance), 2000), variance).passed
        for _ in range(100)
    )
    assert failures <= 1


def test_ks_gaussian_power_against_wrong_variance():
    rng = np.random.default_rng(17)
    samples = rng.normal(0.0, 1.0, 10_000)
    assert ks_gaussian(samples, 1.0).passed
    assert not ks_gaussian(samples, 2.0).passed  # doubled variance must fail


def test_ks_gaussian_validation():
    with pytest.raises(DomainError):
        ks_gaussian(np.zeros(100), 0.0)
    with pytest.raises(DomainError):
        ks_gaussian(np.zeros(5), 1.0)


def test_report_json_round_trip():
    report = ks_gaussian(np.random.default_rng(1).standard_normal(1000), 1.0)
    parsed = json.loads(report.to_json())
    assert parsed["name"] == "ks_gaussian"
    assert parsed["passed"] == report.passed
    assert parsed["metadata"]["n_samples"] == 1000


def test_increment_correlation_against_theory():
    law = InitialLaw("two_point", value=1.0)
    p = limit_params_for(1.0, 1.0, 0.0, law)
    paths = sample_limit_paths([0.0, 0.5, 1.0], p, law, SeedSpec(88), 40_000)
    cov = lambda s, t: potential_cov(s, t, p)
    report = increment_correlation(paths, 1, 0.0, 0.5, 0.5, 1.0, cov)
    assert report.theoretical == pytest.approx(
        increment_cov(0.0, 0.5, 0.5, 1.0, cov), rel=1e-14
    )
    assert abs(report.empirical.value - report.theoretical) <= 3.0 * report.empirical.std_error
    degenerate = increment_correlation(paths, 1, 0.5, 0.5, 0.5, 1.0, cov)
    assert degenerate.empirical.value == 0.0
    with pytest.raises(DomainError):
        increment_correlation(paths, 1, 1.0, 0.5, 0.5, 0.0, cov)


def test_growth_slope_exact_exponential():
    times = np.linspace(10.0, 20.0, 11)
    variances = np.exp(0.5 * times)
    assert growth_slope(times, variances, (10.0, 20.0)) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(DomainError):
        growth_slope(times, variances, (30.0, 40.0))


def test_theoretical_longtime_slopes():
    times = np.arange(10.0, 20.5, 1.0)
    for sigma, leak in [(0.5, 0.25), (0.25, 0.5)]:
        p = LimitParams(leak=leak, sigma=sigma, noise=0.0, init_mean=0.0, init_msq=1.0)
        variances = [potential_cov(t, t, p) for t in times]
        slope = growth_slope(times, variances, (10.0, 20.0))
        reference = 2.0 * (sigma - leak)
        assert abs(slope - reference) <= 0.10 * abs(reference)
    # at the critical point only the algebraic prefactor is left
    p = LimitParams(leak=0.5, sigma=0.5, noise=0.0, init_mean=0.0, init_msq=1.0)
    variances = [potential_cov(t, t, p) for t in times]
    assert abs(growth_slope(times, variances, (10.0, 20.0))) <= 0.05


def test_variance_discrepancy_shrinks_with_network_size():
    # |empirical Var - limit variance| at fixed replica count is nonincreasing
    # across N in {50, 200, 800}, up to 2 standard errors of the estimates
    leak, sigma, t, reps = 1.0, 0.5, 1.0, 1000
    law = InitialLaw("point_mass", value=1.0)
    p = limit_params_for(leak, sigma, 0.0, law)
    target = potential_cov(t, t, p)
    discrepancies = {}
    errors = {}
    for n in (50, 200, 800):
        params = ModelParams(
            n=n,
            leak=leak,
            noise=0.0,
            entry_law=EntryLaw("rademacher", sigma=sigma),
            initial_law=law,
            grid=TimeGrid(times=(0.0, t)),
        )
        ens = run_ensemble(params, coords=(1,), n_replicas=reps, seed=SeedSpec(n), threads=4)
        x = ens.values[:, 0, 1]
        centered = x - x.mean()
        discrepancies[n] = abs(centered.var(ddof=1) - target)
        errors[n] = np.std(centered**2, ddof=1) / math.sqrt(reps)
    assert discrepancies[200] <= discrepancies[50] + 2.0 * (errors[50] + errors[200])
    assert discrepancies[800] <= discrepancies[200] + 2.0 * (errors[200] + errors[800])


def test_moment_estimate_within_helper():
    est = MomentEstimate(value=1.0, std_error=0.1, n_replicas=100, order=2)
    assert est.within(1.25, 3.0)
    assert not est.within(1.5, 3.0)
    assert est.within(1.32, 3.0, extra=0.02)
