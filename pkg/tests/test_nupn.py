"""Tests for nets with names."""

from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from nwn.core.cnupn import CNuPN, cnupn_fire, lift_marking, lower_config, pn_as_cnupn
from nwn.core.errors import ModeNotEnabled, UnknownTransition, ValidationError
from nwn.core.ms import Multiset, PlaceVector
from nwn.core.nupn import (
    NuConfig, NuMode, NuPN, Variable, nu, nupn_fire, nupn_modes, nupn_validate, x,
)
from nwn.core.petri import pn_fire
from nwn.format import load_doc
from nwn.generate import SizeParams, random_instance


def v(*counts):
    return PlaceVector(tuple(counts))


class TestVariable:
    """Variable names and ordering."""

    def test_parse(self):
        assert Variable.parse("x1") == x(1)
        assert Variable.parse("nu2") == nu(2)
        assert nu(1).is_fresh
        assert not x(1).is_fresh

    def test_malformed(self):
        with pytest.raises(ValueError):
            Variable.parse("y1")

    def test_standard_before_fresh(self):
        assert sorted([nu(1), x(2), x(1)], key=lambda var: var.sort_key()) == [x(1), x(2), nu(1)]


class TestFigureStep:
    """The three-variable transition with two fresh names."""

    def setup_method(self):
        self.net = NuPN.build("nupn_step", ["p1", "p2", "p3", "p4", "p5"], ["t"], [
            ("p1", "t", Multiset({x(1): 1, x(2): 1})),
            ("p2", "t", Multiset({x(3): 1})),
            ("t", "p3", Multiset({x(2): 1})),
            ("t", "p4", Multiset({x(3): 1})),
            ("t", "p5", Multiset({nu(1): 2, nu(2): 1})),
        ])
        self.a, self.b, self.c = v(2, 2, 1, 0, 0), v(3, 2, 0, 1, 0), v(2, 2, 0, 0, 1)
        self.config = NuConfig.of([self.a, self.b, self.c])

    def index(self, vector):
        return self.config.tuples.index(vector)

    def test_variables(self):
        assert self.net.standard_vars("t") == [x(1), x(2), x(3)]
        assert self.net.fresh_vars("t") == [nu(1), nu(2)]
        assert self.net.pre_vector("t", x(1)) == v(1, 0, 0, 0, 0)
        assert self.net.post_vector("t", nu(1)) == v(0, 0, 0, 0, 2)

    def test_fire_with_chosen_mode(self):
        mode = NuMode.of({x(1): self.index(self.a), x(2): self.index(self.b), x(3): self.index(self.c)})
        fired = nupn_fire(self.net, self.config, "t", mode)
        assert fired == NuConfig.of([
            v(1, 2, 1, 0, 0), v(2, 2, 1, 1, 0), v(2, 1, 0, 1, 1), v(0, 0, 0, 0, 2), v(0, 0, 0, 0, 1),
        ])
        assert len(fired) == len(self.config) + 2

    def test_modes_are_injective_assignments(self):
        modes = nupn_modes(self.net, self.config, "t")
        assert len(modes) == 6
        for mode in modes:
            assert len(set(mode.as_dict().values())) == 3
        assert not modes.truncated

    def test_mode_cap(self):
        modes = nupn_modes(self.net, self.config, "t", cap=2)
        assert len(modes) == 2
        assert modes.truncated

    def test_too_few_tuples(self):
        assert nupn_modes(self.net, NuConfig.of([self.a, self.b]), "t") == []

    def test_non_injective_mode_rejected(self):
        with pytest.raises(ModeNotEnabled):
            nupn_fire(self.net, self.config, "t", NuMode.of({x(1): 0, x(2): 0, x(3): 1}))

    def test_unknown_transition(self):
        with pytest.raises(UnknownTransition):
            nupn_modes(self.net, self.config, "u")

    def test_wrong_dimension(self):
        with pytest.raises(ValidationError):
            nupn_modes(self.net, NuConfig.of([v(1, 1)]), "t")

    def test_strict_mode_rejects_ambiguous_duplicates(self):
        config = NuConfig.of([self.a, self.a, self.c])
        with pytest.raises(ValidationError) as excinfo:
            nupn_modes(self.net, config, "t", strict=True)
        assert excinfo.value.violations[0].code == "duplicate-binding"
        assert nupn_modes(self.net, config, "t")

    def test_sample_document(self, samples_dir):
        doc = load_doc(samples_dir / "nupn_step.nwn")
        assert doc.net == self.net
        assert doc.init == self.config
        assert doc.labels["a"] == self.a


class TestValidation:
    """Syntactic restrictions on arc labels."""

    def test_fresh_variable_on_input(self):
        net = NuPN.build("bad", ["p"], ["t"], [("p", "t", Multiset({nu(1): 1}))])
        assert [violation.code for violation in nupn_validate(net)] == ["fresh-in-pre"]

    def test_unbound_output_variable(self):
        net = NuPN.build("bad", ["p"], ["t"], [("t", "p", Multiset({x(1): 1}))])
        assert [violation.code for violation in nupn_validate(net)] == ["unbound-standard-out"]

    def test_dangling_arc(self):
        with pytest.raises(ValidationError):
            NuPN.build("bad", ["p"], ["t"], [("p", "q", Multiset({x(1): 1}))])


class TestStratification:
    """Identity transfers and single-tuple nets reduce to the simpler formalisms."""

    @pytest.mark.parametrize("seed", range(40))
    def test_identity_transfers_agree_with_nupn(self, seed):
        size = SizeParams(places=4, transitions=2, variables=2, tuples=3, max_count=3)
        instance = random_instance("nupn", seed, size)
        lifted = CNuPN(instance.net, {})
        for t in instance.net.transitions:
            for mode in nupn_modes(instance.net, instance.init, t):
                assert cnupn_fire(lifted, instance.init, t, mode) == nupn_fire(instance.net, instance.init, t, mode)

    @pytest.mark.parametrize("seed", range(40))
    def test_single_tuple_agrees_with_petri_net(self, seed):
        instance = random_instance("pn", seed, SizeParams(places=4, transitions=3, max_count=3))
        pn, marking = instance.net, instance.init
        lifted = pn_as_cnupn(pn)
        config = lift_marking(lifted, marking)
        for t in pn.transitions:
            modes = nupn_modes(lifted.base, config, t)
            enabled = pn.pre[t] <= marking
            assert bool(modes) == enabled
            if enabled:
                fired = cnupn_fire(lifted, config, t, modes[0])
                assert lower_config(lifted, fired) == pn_fire(pn, marking, t)


class TestModeEnumeration:
    """Modes against every injective assignment."""

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10_000))
    def test_modes_match_brute_force(self, seed):
        size = SizeParams(places=3, transitions=2, variables=3, tuples=4, max_count=2)
        instance = random_instance("nupn", seed, size)
        net, config = instance.net, instance.init
        for t in net.transitions:
            standard = net.standard_vars(t)
            expected = {
                NuMode.of(dict(zip(standard, chosen)))
                for chosen in permutations(range(len(config)), len(standard))
                if all(net.pre_vector(t, var) <= config.tuples[i] for var, i in zip(standard, chosen))
            }
            modes = nupn_modes(net, config, t)
            assert len(modes) == len(expected)
            assert set(modes) == expected
