"""End-to-end scenario drivers: every emitted check must pass, and the
reports must be deterministic for fixed parameters."""

from __future__ import annotations

import json

import numpy as np
import pytest

from qpt import (
    NotNormalized,
    correspondence_scenario,
    decoherence_scenario,
    epr_scenario,
    teleportation_scenario,
)


def check_names(rep) -> list[str]:
    return [c.name for c in rep.checks]


class TestEpr:
    def test_all_checks_pass(self):
        rep = epr_scenario()
        assert rep.all_passed, rep.render_text()

    def test_membership_flip_is_reported(self):
        rep = epr_scenario()
        by = {c.name: c for c in rep.checks}
        assert by["side2_zspin_member_before"].actual is False
        assert by["side2_zspin_member_after"].actual is True

    def test_two_equal_branches_after_premeasurement(self):
        rep = epr_scenario()
        q = {x.name: x.value for x in rep.quantities}
        assert q["ray_weights_after"] == [0.5, 0.5]
        assert len(q["ray_labels_after"]) == 2

    def test_deterministic_output(self):
        assert epr_scenario().to_json() == epr_scenario().to_json()


class TestTeleportation:
    def test_all_checks_pass(self):
        rep = teleportation_scenario(0.6, 0.8, seed=0)
        assert rep.all_passed, rep.render_text()

    def test_complex_amplitudes_supported(self):
        rep = teleportation_scenario(0.6j, -0.8, seed=1, samples=500)
        by = {c.name: c for c in rep.checks}
        for k in range(1, 5):
            assert by[f"fidelity_r{k}"].passed

    def test_random_inputs_reconstruct(self, rng):
        for _ in range(5):
            z = rng.normal(size=2) + 1j * rng.normal(size=2)
            z /= np.linalg.norm(z)
            rep = teleportation_scenario(complex(z[0]), complex(z[1]),
                                         seed=2, samples=200)
            by = {c.name: c for c in rep.checks}
            for k in range(1, 5):
                assert by[f"fidelity_r{k}"].passed
            assert by["bell_reconstruction"].passed
            assert by["correction_is_local"].passed

    def test_unnormalized_input_rejected(self):
        with pytest.raises(NotNormalized):
            teleportation_scenario(1.0, 1.0, seed=0)

    def test_seeded_determinism(self):
        a = teleportation_scenario(0.6, 0.8, seed=9, samples=300).to_json()
        b = teleportation_scenario(0.6, 0.8, seed=9, samples=300).to_json()
        assert a == b

    def test_four_equiprobable_outcomes(self):
        rep = teleportation_scenario(0.28, 0.96, seed=4, samples=400)
        by = {c.name: c for c in rep.checks}
        assert by["four_property_states"].passed
        assert by["outcome_probabilities_quarter"].passed


class TestDecoherence:
    def test_all_checks_pass_with_extension(self):
        rep = decoherence_scenario(6, np.pi / 3)
        assert rep.all_passed, rep.render_text()
        assert "pointer_branch_not_addable" in check_names(rep)

    def test_extension_can_be_skipped(self):
        rep = decoherence_scenario(6, np.pi / 3, run_extension=False)
        assert rep.all_passed
        assert "pointer_branch_not_addable" not in check_names(rep)

    def test_suppression_follows_power_law(self):
        for n in (0, 1, 4, 9, 25):
            rep = decoherence_scenario(n, 1.0, run_extension=False)
            by = {c.name: c for c in rep.checks}
            assert by["suppression_matches_power_law"].passed
            q = {x.name: x.value for x in rep.quantities}
            assert q["suppression_ratio"] == pytest.approx(
                abs(np.cos(1.0)) ** n, abs=1e-12
            )

    def test_dense_route_only_at_small_width(self):
        assert "dense_partial_trace_agrees" in check_names(
            decoherence_scenario(5, 0.9, run_extension=False)
        )
        assert "dense_partial_trace_agrees" not in check_names(
            decoherence_scenario(20, 0.9, run_extension=False)
        )

    def test_orthogonal_tags_kill_interference_exactly(self):
        rep = decoherence_scenario(3, np.pi / 2, run_extension=False)
        q = {x.name: x.value for x in rep.quantities}
        assert q["suppression_ratio"] == pytest.approx(0.0, abs=1e-15)
        assert rep.all_passed


class TestCorrespondence:
    def test_all_checks_pass_at_depth(self):
        rep = correspondence_scenario(n_max=200)
        assert rep.all_passed, rep.render_text()

    def test_anchor_ratio_is_exactly_three(self):
        rep = correspondence_scenario(n_max=10)
        by = {c.name: c for c in rep.checks}
        assert by["small_n_gross_disagreement"].actual == 3.0

    def test_bound_checks_need_enough_levels(self):
        shallow = check_names(correspondence_scenario(n_max=5))
        assert "single_step_bound" not in shallow
        deep = check_names(correspondence_scenario(n_max=30))
        assert "single_step_bound" in deep and "convergence_to_unity" in deep

    def test_too_small_n_max_rejected(self):
        with pytest.raises(ValueError):
            correspondence_scenario(n_max=2)


class TestReportShape:
    @pytest.mark.parametrize(
        "rep_fn",
        [
            lambda: epr_scenario(),
            lambda: teleportation_scenario(0.6, 0.8, seed=0, samples=100),
            lambda: decoherence_scenario(4, 1.0, run_extension=False),
            lambda: correspondence_scenario(n_max=20),
        ],
    )
    def test_reports_parse_as_json_with_schema(self, rep_fn):
        rep = rep_fn()
        doc = json.loads(rep.to_json())
        assert doc["schema"] == 1
        assert {"scenario", "parameters", "quantities", "checks", "all_passed"} <= set(doc)
        for chk in doc["checks"]:
            assert {"name", "passed", "expected", "actual", "tolerance", "note"} == set(chk)
