#!/usr/bin/env python3
"""
Test suite for the seeded verification suites.
"""

import json
import math

import pytest

from superops import run_verification
from superops.config import ConvergenceError, SuiteConfig, SuperopsError
from superops.verify import (
    Margins,
    PropertyResult,
    core_superunitary,
    group_dual_involution,
    norms_golden,
    run_suite,
    suite_properties,
    tensor_exact_instances,
)


class TestPropertyResult:
    """Test result records and margins"""

    def test_json_is_sorted_and_finite(self):
        result = PropertyResult("core", "example", False, 3, -math.inf, "sample 2")
        data = json.loads(result.to_json())
        assert data == {"suite": "core", "property": "example", "passed": False, "checked": 3,
                        "worst_margin": None, "detail": "sample 2"}
        assert result.to_json().index('"checked"') < result.to_json().index('"detail"')

    def test_margins(self):
        m = Margins("norms", "example")
        m.add(0.5)
        m.add(-0.25, "second")
        m.flag(True)
        result = m.result("context")
        assert not result.passed
        assert result.checked == 3
        assert result.worst_margin == -0.25
        assert result.detail == "context; second"

    def test_empty_margins_pass(self):
        result = Margins("group", "empty").result()
        assert result.passed
        assert result.worst_margin is None


class TestRegistry:
    """Test the suite registry"""

    def test_all_is_union(self):
        parts = sum(len(suite_properties(name)) for name in ("core", "norms", "tensor", "group"))
        assert len(suite_properties("all")) == parts
        assert len(suite_properties("core")) == 7
        assert len(suite_properties("group")) == 4

    def test_unknown_suite(self):
        with pytest.raises(SuperopsError):
            SuiteConfig(suite="everything")

    def test_optimizer_from_dict(self):
        config = SuiteConfig(optimizer={"restarts": 2})
        assert config.optimizer.restarts == 2
        assert config.optimizer.iterations == 200


class TestProperties:
    """Test individual properties against broken inputs"""

    def test_superunitary_sampling_needs_boosts(self, monkeypatch):
        cfg = SuiteConfig(suite="core", samples=12)
        assert core_superunitary(cfg).passed
        monkeypatch.setattr("superops.verify.SUPERUNITARY_RAPIDITY", 0.0)
        result = core_superunitary(cfg)
        assert not result.passed
        assert "boosted" in result.detail

    def test_norms_golden_examples(self):
        result = norms_golden(SuiteConfig(suite="norms"))
        assert result.passed, result.detail
        assert result.checked == 12

    @pytest.mark.slow
    def test_tensor_and_group_golden_examples(self):
        cfg = SuiteConfig(suite="all", samples=2)
        for prop in (tensor_exact_instances, group_dual_involution):
            result = prop(cfg)
            assert result.passed, result.detail

    def test_computation_error_fails_one_property(self, monkeypatch):
        def broken(cfg):
            raise ConvergenceError("radius gap above tol")

        def fine(cfg):
            return Margins("group", "fine").result()

        monkeypatch.setattr("superops.verify.suite_properties", lambda suite: [broken, fine])
        results = run_suite(SuiteConfig(suite="group", samples=1))
        assert [r.passed for r in results] == [False, True]
        assert "radius gap above tol" in results[0].detail


@pytest.mark.slow
class TestRunSuite:
    """Test full suite runs at small sample counts"""

    def test_core_passes(self):
        results = run_suite(SuiteConfig(suite="core", samples=5))
        assert [r.name for r in results] == [
            "iota_isomorphism", "iota_norm_estimate", "contraction_criterion", "cone_separation",
            "superunitary_sampling", "positivity_methods_agree", "golden_examples",
        ]
        failed = [r.to_json() for r in results if not r.passed]
        assert not failed

    def test_parallel_runs_match(self):
        serial = run_suite(SuiteConfig(suite="core", samples=3, seed=11))
        parallel = run_suite(SuiteConfig(suite="core", samples=3, seed=11, jobs=3))
        assert [r.to_json() for r in serial] == [r.to_json() for r in parallel]

    def test_group_passes(self):
        assert run_verification("group", seed=0, samples=2)
