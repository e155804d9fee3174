"""Determinate sublattice: membership, property states, Born measure,
and the extension contradiction machinery."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpt import (
    AlreadyMember,
    ComplexVector,
    DimMismatch,
    NotInSublattice,
    ObservableSpec,
    Subspace,
    basis_vector,
    born_check,
    build_determinate,
    complement_probe_rays,
    contains,
    extend_and_check,
    join,
    orthocomplement,
    property_states,
    truth_value,
)
from conftest import maximal_observable, random_subspace, random_vector

seeds = st.integers(0, 2**32 - 1)


def split_observable(dim: int, rng) -> ObservableSpec:
    """Degenerate observable: one rank-2 eigenspace, the rest rays."""
    from conftest import random_unitary

    q = random_unitary(dim, rng)
    spaces = [Subspace.from_vectors([q[:, 0], q[:, 1]], ambient_dim=dim)]
    spaces += [Subspace.from_vectors([q[:, i]], ambient_dim=dim) for i in range(2, dim)]
    labels = [f"s{i}" for i in range(len(spaces))]
    return ObservableSpec(tuple(labels), tuple(spaces))


class TestBuildDeterminate:
    def test_weights_sum_to_one(self, rng):
        d = build_determinate(random_vector(5, rng), maximal_observable(5, rng))
        assert sum(r.weight for r in d.projected_rays) == pytest.approx(1.0, abs=1e-12)

    def test_rays_are_normalized(self, rng):
        d = build_determinate(random_vector(4, rng), maximal_observable(4, rng))
        for r in d.projected_rays:
            assert np.linalg.norm(r.vector.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_maximal_observable_generic_state_has_trivial_complement(self, rng):
        d = build_determinate(random_vector(4, rng), maximal_observable(4, rng))
        assert len(d.projected_rays) == 4
        assert d.complement.rank == 0

    def test_vanishing_weight_drops_label_and_grows_complement(self, rng):
        obs = ObservableSpec.from_eigenbasis(
            [basis_vector(3, i) for i in range(3)], labels=["x", "y", "z"]
        )
        psi = ComplexVector(np.array([0.6, 0.8, 0.0], dtype=complex))
        d = build_determinate(psi, obs)
        assert [r.label for r in d.projected_rays] == ["x", "y"]
        assert d.complement.rank == 1
        # K is the z axis
        assert abs(d.complement.basis[2, 0]) == pytest.approx(1.0, abs=1e-12)

    def test_identity_observable_keeps_only_the_state_ray(self, rng):
        psi = random_vector(4, rng)
        d = build_determinate(psi, ObservableSpec.identity(4))
        assert len(d.projected_rays) == 1
        assert d.complement.rank == 3
        assert abs(abs(psi.inner(d.projected_rays[0].vector)) - 1.0) < 1e-12

    def test_degenerate_observable_projects_into_eigenspace(self, rng):
        obs = split_observable(4, rng)
        psi = random_vector(4, rng)
        d = build_determinate(psi, obs)
        assert len(d.projected_rays) == 3
        p = obs.eigenprojectors[0].projector()
        x = p @ psi.amplitudes
        x = x / np.linalg.norm(x)
        got = d.projected_rays[0].vector.amplitudes
        assert abs(abs(np.vdot(x, got)) - 1.0) < 1e-10

    def test_dim_mismatch(self, rng):
        with pytest.raises(DimMismatch):
            build_determinate(random_vector(3, rng), maximal_observable(4, rng))


class TestMembership:
    def test_generators_and_their_lattice_are_members(self, rng):
        psi = random_vector(5, rng)
        d = build_determinate(psi, split_observable(5, rng))
        for g in d.generators():
            assert contains(d, g)
            assert contains(d, orthocomplement(g))
        r01 = join(Subspace.ray(d.projected_rays[0].vector),
                   Subspace.ray(d.projected_rays[1].vector))
        assert contains(d, r01)
        assert contains(d, join(r01, d.complement))

    def test_zero_and_full_are_members(self, rng):
        d = build_determinate(random_vector(4, rng), maximal_observable(4, rng))
        assert contains(d, Subspace.zero(4))
        assert contains(d, Subspace.full(4))

    def test_random_ray_is_not_member(self, rng):
        d = build_determinate(random_vector(4, rng), maximal_observable(4, rng))
        assert not contains(d, Subspace.ray(random_vector(4, rng)))

    def test_subspace_of_complement_is_member(self, rng):
        psi = ComplexVector(np.array([0.6, 0.8, 0.0, 0.0], dtype=complex))
        obs = ObservableSpec.from_eigenbasis([basis_vector(4, i) for i in range(4)])
        d = build_determinate(psi, obs)
        assert d.complement.rank == 2
        k_ray = Subspace.from_vectors([d.complement.basis[:, 0]], ambient_dim=4)
        assert contains(d, k_ray)
        # superposition of a kept ray and a K direction is NOT a member ray
        mix = d.projected_rays[0].vector.amplitudes + d.complement.basis[:, 0]
        assert not contains(d, Subspace.from_vectors([mix], ambient_dim=4))

    def test_membership_closed_under_complement(self, rng):
        d = build_determinate(random_vector(4, rng), maximal_observable(4, rng))
        v = join(Subspace.ray(d.projected_rays[1].vector),
                 Subspace.ray(d.projected_rays[3].vector))
        assert contains(d, v) and contains(d, orthocomplement(v))


class TestPropertyStates:
    @given(seeds, st.integers(3, 8))
    @settings(max_examples=25, deadline=None)
    def test_one_state_per_ray_probabilities_are_weights(self, seed, dim):
        rng = np.random.default_rng(seed)
        d = build_determinate(random_vector(dim, rng), maximal_observable(dim, rng))
        states = property_states(d)
        assert len(states) == len(d.projected_rays)
        assert sum(s.probability for s in states) == pytest.approx(1.0, abs=1e-10)
        for s in states:
            assert s.probability == pytest.approx(
                d.projected_rays[s.selected].weight, abs=1e-12
            )

    def test_truth_values_follow_selected_ray(self, rng):
        d = build_determinate(random_vector(4, rng), maximal_observable(4, rng))
        states = property_states(d)
        v = join(Subspace.ray(d.projected_rays[0].vector),
                 Subspace.ray(d.projected_rays[2].vector))
        for s in states:
            assert truth_value(s, d, v) == (s.selected in (0, 2))

    def test_truth_value_rejects_non_member(self, rng):
        d = build_determinate(random_vector(4, rng), maximal_observable(4, rng))
        s = property_states(d)[0]
        with pytest.raises(NotInSublattice):
            truth_value(s, d, Subspace.ray(random_vector(4, rng)))

    def test_complement_block_is_false_in_every_state(self, rng):
        psi = ComplexVector(np.array([0.6, 0.0, 0.8, 0.0], dtype=complex))
        obs = ObservableSpec.from_eigenbasis([basis_vector(4, i) for i in range(4)])
        d = build_determinate(psi, obs)
        assert d.complement.rank == 2
        for s in property_states(d):
            assert not truth_value(s, d, d.complement)


class TestBornCheck:
    @given(seeds, st.integers(3, 8))
    @settings(max_examples=30, deadline=None)
    def test_measure_equals_born_weight_on_members(self, seed, dim):
        rng = np.random.default_rng(seed)
        psi = random_vector(dim, rng)
        d = build_determinate(psi, maximal_observable(dim, rng))
        picks = rng.random(len(d.projected_rays)) < 0.5
        rays = [Subspace.ray(r.vector) for r, p in zip(d.projected_rays, picks) if p]
        if not rays:
            v = Subspace.zero(dim)
        else:
            v = rays[0]
            for r in rays[1:]:
                v = join(v, r)
        out = born_check(d, v)
        assert out.measure_prob == pytest.approx(out.born_prob, abs=1e-10)
        direct = float(np.real(np.vdot(psi.amplitudes, v.projector() @ psi.amplitudes)))
        assert out.born_prob == pytest.approx(direct, abs=1e-10)

    def test_non_member_rejected(self, rng):
        d = build_determinate(random_vector(4, rng), maximal_observable(4, rng))
        with pytest.raises(NotInSublattice):
            born_check(d, Subspace.ray(random_vector(4, rng)))

    def test_complement_contributions_have_zero_measure(self, rng):
        psi = ComplexVector(np.array([0.6, 0.8, 0.0, 0.0], dtype=complex))
        obs = ObservableSpec.from_eigenbasis([basis_vector(4, i) for i in range(4)])
        d = build_determinate(psi, obs)
        out = born_check(d, d.complement)
        assert out.measure_prob == 0.0
        assert out.born_prob == pytest.approx(0.0, abs=1e-12)


class TestExtendAndCheck:
    def test_member_raises_already_member(self, rng):
        d = build_determinate(random_vector(3, rng), maximal_observable(3, rng))
        with pytest.raises(AlreadyMember):
            extend_and_check(d, Subspace.ray(d.projected_rays[0].vector))

    def test_dim_two_rejected(self, rng):
        d = build_determinate(random_vector(2, rng), maximal_observable(2, rng))
        v = Subspace.ray(random_vector(2, rng))
        with pytest.raises(ValueError):
            extend_and_check(d, v)

    def test_dim_mismatch(self, rng):
        d = build_determinate(random_vector(3, rng), maximal_observable(3, rng))
        with pytest.raises(DimMismatch):
            extend_and_check(d, Subspace.ray(random_vector(4, rng)))

    @pytest.mark.parametrize("dim", [3, 4])
    def test_random_nonmember_ray_contradicts(self, dim, rng):
        psi = random_vector(dim, rng)
        d = build_determinate(psi, ObservableSpec.identity(dim))
        v = Subspace.ray(random_vector(dim, rng))
        assert not contains(d, v)
        rep = extend_and_check(d, v)
        assert rep.is_contradiction
        assert rep.verdict == "contradiction"
        assert rep.n_elements >= 2
        assert rep.closure_depth >= 1

    def test_report_counts_are_consistent(self, rng):
        d = build_determinate(random_vector(3, rng), maximal_observable(3, rng))
        v = Subspace.ray(random_vector(3, rng))
        rep = extend_and_check(d, v)
        assert rep.n_relations >= 0 and rep.n_rays >= 1
        assert rep.is_contradiction == (
            rep.ray_coloring_unsat or rep.relations_unsat
        )

    def test_probe_rays_live_in_complement(self, rng):
        psi = random_vector(5, rng)
        d = build_determinate(psi, ObservableSpec.identity(5))
        pk = d.complement.projector()
        for probe in complement_probe_rays(d):
            b = probe.basis[:, 0]
            assert np.linalg.norm(pk @ b - b) < 1e-10
