"""Tests for the randomized verification suites."""

import numpy as np
import pytest

import skomap.esm
from skomap.esm import EsmSolution
from skomap.suites import (
    SUITES,
    check_seed,
    domain_instance,
    input_instance,
    quantize,
    random_instance,
    run_suite,
)


def test_instances_are_deterministic():
    psi_a, bounds_a = random_instance(17)
    psi_b, bounds_b = random_instance(17)
    assert np.array_equal(psi_a.values, psi_b.values)
    assert np.array_equal(bounds_a.upper.values, bounds_b.upper.values)


def test_instance_values_on_lattice():
    psi, bounds = random_instance(5, pinch=0.2)
    for values in (psi.values, bounds.lower.values, bounds.upper.values):
        assert np.array_equal(quantize(values), values)
    assert 16 <= len(psi) <= 256


def test_domain_instances_nest():
    for seed in range(8):
        inst = domain_instance(seed)
        assert (inst.bounds_tilde.lower.values <= inst.bounds.lower.values).all()
        assert (inst.bounds_tilde.upper.values >= inst.bounds.upper.values).all()


def test_input_instances_are_consistent():
    for seed in range(8):
        inst = input_instance(seed)
        assert inst.nu.values[0] == 0.0
        assert (np.diff(inst.nu.values) >= 0).all()
        assert np.array_equal(inst.psi.values, inst.psi_prime.values + inst.nu.values)


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_every_suite_passes(suite):
    result = run_suite(suite, list(range(40)))
    assert result.passed, result.to_dict()
    assert result.worst_violation <= result.tol


def test_oracle_is_exact():
    result = run_suite("oracle", list(range(60)))
    assert result.worst_violation == 0.0


def test_run_suite_rejects_unknown_name():
    with pytest.raises(ValueError):
        run_suite("nope", [0])


def test_suite_result_document():
    data = run_suite("esp", list(range(5, 10))).to_dict()
    assert data["instances"] == 5
    assert data["seed_first"] == 5
    assert data["seed_last"] == 9
    assert data["failed_seeds"] == []


def _flipped_solver(original):
    """A solver with the sign of eta flipped."""
    def solve(psi, bounds):
        sol = original(psi, bounds)
        return EsmSolution(psi - sol.eta, -sol.eta, sol.eta_r, sol.eta_l)
    return solve


def test_injected_bug_is_caught(monkeypatch):
    monkeypatch.setattr(skomap.esm, "esm_solve", _flipped_solver(skomap.esm.esm_solve))
    result = run_suite("esp", list(range(20)))
    assert not result.passed
    assert result.worst_seed in result.failures


def test_errors_become_failed_reports(monkeypatch):
    from skomap.errors import PathDomainError

    def broken(psi, bounds):
        raise PathDomainError("broken solver")

    monkeypatch.setattr(skomap.esm, "esm_solve", broken)
    report = check_seed("sp", 1e-9, 3)
    assert not report.passed
    assert report.worst_violation == float("inf")
    assert "broken solver" in report.notes[0]
