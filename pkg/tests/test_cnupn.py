"""Tests for channel nets and their rename fragment."""

import pytest
from hypothesis import given, settings, strategies as st

from nwn.core.cnupn import (
    CNuPN, Channel, ChannelMatrix, channels_to_matrices, cnupn_fire, cnupn_fire_staged,
    cnupn_modes, cnupn_validate, is_rnupn, matrices_to_channels, rnupn_fire_direct,
)
from nwn.core.errors import UnknownTransition, ValidationError
from nwn.core.ms import Multiset, PlaceVector
from nwn.core.nupn import NuConfig, NuMode, NuPN, x
from nwn.format import load_doc
from nwn.generate import SizeParams, random_instance


def v(*counts):
    return PlaceVector(tuple(counts))


class TestStagedFiring:
    """Input removal, transfer and output phases of a channel transition."""

    def test_sample_stages(self, samples_dir):
        doc = load_doc(samples_dir / "channels.nwn")
        net, config = doc.net, doc.init
        a, b, c = doc.labels["a"], doc.labels["b"], doc.labels["c"]
        mode = NuMode.of({x(1): config.tuples.index(a), x(2): config.tuples.index(b),
                          x(3): config.tuples.index(c)})
        drained, moved, final = cnupn_fire_staged(net, config, "t", mode)
        assert drained == NuConfig.of([v(1, 2, 1, 0, 0), v(3, 1, 0, 1, 0), v(2, 1, 0, 0, 1)])
        assert moved == NuConfig.of([v(1, 2, 1, 1, 0), v(0, 1, 0, 1, 0), v(2, 0, 3, 0, 1)])
        assert final == NuConfig.of([
            v(1, 2, 1, 1, 0), v(0, 1, 2, 1, 0), v(2, 0, 4, 0, 1), v(0, 0, 0, 0, 2), v(0, 0, 0, 0, 1),
        ])
        assert cnupn_fire(net, config, "t", mode) == final

    def test_modes_come_from_the_base_net(self, samples_dir):
        doc = load_doc(samples_dir / "channels.nwn")
        assert len(cnupn_modes(doc.net, doc.init, "t")) == 6

    def test_unknown_transition(self, samples_dir):
        doc = load_doc(samples_dir / "channels.nwn")
        with pytest.raises(UnknownTransition):
            doc.net.matrix("u")


class TestChannels:
    """Drawn channels and their matrices."""

    def test_compile_pairs(self):
        transfers = channels_to_matrices([Channel("t", "p", "q", (x(2), x(3)), (x(3), x(1)))])
        matrix = transfers["t"]
        assert matrix.target((x(2), "p")) == (x(3), "q")
        assert matrix.target((x(3), "p")) == (x(1), "q")
        assert matrix.target((x(1), "p")) == (x(1), "p")

    def test_arity_mismatch(self):
        with pytest.raises(ValidationError) as excinfo:
            channels_to_matrices([Channel("t", "p", "q", (x(1), x(2)), (x(1),))])
        assert excinfo.value.violations[0].code == "channel-arity"

    def test_variable_leaving_twice(self):
        with pytest.raises(ValidationError) as excinfo:
            channels_to_matrices([
                Channel("t", "p", "q", (x(1),), (x(2),)),
                Channel("t", "p", "r", (x(1),), (x(2),)),
            ])
        assert excinfo.value.violations[0].code == "duplicate-channel-variable"

    def test_back_to_channels(self):
        channels = [Channel("t", "p", "q", (x(1), x(2)), (x(2), x(1)))]
        assert matrices_to_channels(channels_to_matrices(channels)) == channels

    def test_dense_view(self):
        matrix = ChannelMatrix({(x(1), "p"): ((x(2), "q"),)})
        assert matrix.dense(x(1), x(2), ["p", "q"]) == [[0, 1], [0, 0]]
        assert matrix.dense(x(1), x(1), ["p", "q"]) == [[0, 0], [0, 1]]


class TestTransferValidation:
    """Unit-row restrictions on transfer matrices."""

    def setup_method(self):
        self.base = NuPN.build("n", ["p", "q"], ["t"], [("p", "t", Multiset({x(1): 1}))])

    def test_identity_is_valid(self):
        assert cnupn_validate(CNuPN(self.base, {})) == []

    def test_unknown_variable(self):
        net = CNuPN(self.base, {"t": ChannelMatrix({(x(2), "p"): ((x(1), "q"),)})})
        assert "unknown-variable" in [violation.code for violation in cnupn_validate(net)]

    def test_multiple_ones(self):
        net = CNuPN(self.base, {"t": ChannelMatrix({(x(1), "p"): ((x(1), "q"), (x(1), "p"))})})
        assert "multiple-ones" in [violation.code for violation in cnupn_validate(net)]

    def test_missing_default_in_complete_matrix(self):
        net = CNuPN(self.base, {"t": ChannelMatrix({(x(1), "p"): ((x(1), "q"),)}, complete=True)})
        codes = [violation.code for violation in cnupn_validate(net)]
        assert codes == ["missing-default"]

    def test_same_tuple_move(self):
        net = CNuPN(self.base, {"t": ChannelMatrix({(x(1), "q"): ((x(1), "p"),)})})
        assert cnupn_validate(net) == []
        config = NuConfig.of([v(1, 3)])
        fired = cnupn_fire(net, config, "t", NuMode.of({x(1): 0}))
        assert fired == NuConfig.of([v(3, 0)])


class TestRenameFragment:
    """Recognition and the closed-form firing rule."""

    def test_sample_net_is_recognized(self, samples_dir):
        doc = load_doc(samples_dir / "renames.nwn")
        meta = is_rnupn(doc.net)
        assert meta
        shape = meta.specials["t"]
        assert (shape.r1, shape.r2, shape.p2, shape.p5) == ("p1", "p6", "p2", "p5")

    def test_sample_step(self, samples_dir):
        doc = load_doc(samples_dir / "renames.nwn")
        config = doc.init
        index = {label: config.tuples.index(vector) for label, vector in doc.labels.items()}
        mode = NuMode.of({x(0): index["c"], x(1): index["a"], x(2): index["d"]})
        expected = NuConfig.of([
            v(1, 1, 0, 2, 1, 0), v(0, 0, 1, 0, 0, 0), v(0, 0, 0, 1, 0, 2), v(1, 1, 0, 0, 0, 0),
        ])
        assert cnupn_fire(doc.net, config, "t", mode) == expected
        assert rnupn_fire_direct(doc.net, is_rnupn(doc.net), config, "t", mode) == expected

    def test_mismatch_explains_itself(self, samples_dir):
        doc = load_doc(samples_dir / "channels.nwn")
        result = is_rnupn(doc.net)
        assert not result
        assert result.transition == "t"
        assert "fresh" in result.reason

    def test_direct_rule_rejects_ordinary_transitions(self, samples_dir):
        doc = load_doc(samples_dir / "renames.nwn")
        with pytest.raises(UnknownTransition):
            rnupn_fire_direct(doc.net, is_rnupn(doc.net), doc.init, "u", NuMode.of({}))

    @pytest.mark.parametrize("seed", range(60))
    def test_direct_rule_equals_matrix_semantics(self, seed):
        size = SizeParams(places=4, transitions=1, variables=2, tuples=3, max_count=3)
        instance = random_instance("rnupn", seed, size)
        net, config = instance.net, instance.init
        meta = is_rnupn(net)
        assert meta
        for t in meta.specials:
            for mode in cnupn_modes(net, config, t):
                assert rnupn_fire_direct(net, meta, config, t, mode) == cnupn_fire(net, config, t, mode)


def total(config):
    return sum(vector.total() for vector in config.tuples)


class TestStagedComposition:
    """The three phases of a random channel step."""

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10_000))
    def test_phases_compose_to_the_step(self, seed):
        size = SizeParams(places=3, transitions=2, variables=2, tuples=3, max_count=3)
        instance = random_instance("cnupn", seed, size)
        net, config = instance.net, instance.init
        base = net.base
        for t in net.transitions:
            inputs = sum(base.pre_vector(t, var).total() for var in base.standard_vars(t))
            outputs = sum(base.post_vector(t, var).total() for var in base.variables(t))
            for mode in cnupn_modes(net, config, t):
                drained, moved, final = cnupn_fire_staged(net, config, t, mode)
                assert final == cnupn_fire(net, config, t, mode)
                assert len(drained) == len(moved) == len(config)
                assert len(final) == len(config) + len(base.fresh_vars(t))
                assert total(drained) == total(config) - inputs
                assert total(moved) == total(drained)
                assert total(final) == total(moved) + outputs
