"""Tests for elementary object systems."""

from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from nwn.core.eos import (
    BLACK, EOS, Event, EventMode, NestedToken, mode_problem, destroy_set, eos_fire, eos_validate,
    event_modes, idle_name, leq_f, lossy_successors, make_eos, normalization_problems, project,
)
from nwn.core.errors import ModeNotEnabled, UnknownEvent, UnknownTransition
from nwn.core.ms import Multiset, ms_choose
from nwn.core.petri import PetriNet, empty_net
from nwn.format import load_doc


QUEUE = PetriNet.build("Q", ["q1", "q2"], ["u"], [("q1", "u", 1), ("u", "q2", 1)])
HOLDER = make_eos("holder", ["h1", "h2"], ["move"], [("h1", "move", 1), ("move", "h2", 1)],
                  [QUEUE], {"h1": "Q", "h2": "Q"}, [Event("move")])

inner_counts = st.fixed_dictionaries({"q1": st.integers(0, 2), "q2": st.integers(0, 2)})
nested = st.lists(st.tuples(st.sampled_from(["h1", "h2"]), inner_counts), max_size=3).map(HOLDER.marking)


def below(marking):
    """Every marking reached by dropping nested tokens and inner tokens of ``marking``."""
    result = set()
    for size in range(len(marking) + 1):
        for kept in ms_choose(marking, size):
            options = [
                [NestedToken(tok.place, inner) for k in range(len(tok.marking) + 1)
                 for inner in ms_choose(tok.marking, k)]
                for tok in kept.elements()
            ]
            result.update(Multiset.of(choice) for choice in product(*options))
    return result


class TestSynchronizedEvent:
    """A system transition synchronized with three object transitions."""

    def test_modes_split_the_updated_markings(self, samples_dir):
        doc = load_doc(samples_dir / "sync.nwn")
        eos, marking = doc.net, doc.init
        modes = event_modes(eos, 0, marking)
        # three r1 tokens over the two N2 output slots
        assert len(modes) == 4
        for mode in modes:
            assert mode_problem(eos, eos.event(0), mode.consumed, mode.produced) is None
            assert mode.consumed == marking

    def test_projection_counts_every_object(self, samples_dir):
        doc = load_doc(samples_dir / "sync.nwn")
        assert project(doc.net, doc.init) == Multiset({"p1": 2, "p2": 1})
        assert project(doc.net, doc.init, "N1") == Multiset({"q1": 3})

    def test_fire(self, samples_dir):
        doc = load_doc(samples_dir / "sync.nwn")
        eos, marking = doc.net, doc.init
        produced = eos.marking([("p2", {"r1": 1}), ("p3", {"q1": 2, "q2": 1}),
                                ("p4", {"r1": 2}), ("p5", None)])
        result = eos_fire(eos, marking, 0, EventMode(marking, produced))
        assert result == produced
        assert project(eos, result) == Multiset({"p2": 1, "p3": 1, "p4": 1, "p5": 1})
        assert project(eos, result, "N2") == Multiset({"r1": 3})

    def test_wrong_update_is_rejected(self, samples_dir):
        doc = load_doc(samples_dir / "sync.nwn")
        eos, marking = doc.net, doc.init
        produced = eos.marking([("p2", {"r1": 1}), ("p3", {"q1": 3}), ("p4", {"r1": 2}), ("p5", None)])
        with pytest.raises(ModeNotEnabled):
            eos_fire(eos, marking, 0, EventMode(marking, produced))

    def test_consumed_must_be_present(self, samples_dir):
        doc = load_doc(samples_dir / "sync.nwn")
        mode = event_modes(doc.net, 0, doc.init)[0]
        with pytest.raises(ModeNotEnabled):
            eos_fire(doc.net, Multiset(), 0, mode)

    def test_unknown_event(self, samples_dir):
        doc = load_doc(samples_dir / "sync.nwn")
        with pytest.raises(UnknownEvent):
            event_modes(doc.net, 7, doc.init)

    def test_merged_objects_are_redistributed(self, samples_dir):
        doc = load_doc(samples_dir / "merge.nwn")
        modes = event_modes(doc.net, 0, doc.init)
        assert len(modes) == 6
        for mode in modes:
            assert project(doc.net, mode.produced, "N") == Multiset({"p1": 1, "p2": 5})

    def test_mode_cap(self, samples_dir):
        doc = load_doc(samples_dir / "merge.nwn")
        modes = event_modes(doc.net, 0, doc.init, cap=2)
        assert len(modes) == 2
        assert modes.truncated


class TestProjection:
    """System places of nested markings."""

    def test_distinct_objects_on_one_place(self):
        marking = HOLDER.marking([("h1", {"q1": 1}), ("h1", {"q2": 1}), ("h1", {"q2": 1}), ("h2", {})])
        assert project(HOLDER, marking) == Multiset({"h1": 3, "h2": 1})
        assert project(HOLDER, marking, "Q") == Multiset({"q1": 1, "q2": 2})

    @given(nested, nested)
    def test_projection_is_additive(self, a, b):
        assert project(HOLDER, a + b) == project(HOLDER, a) + project(HOLDER, b)
        assert len(project(HOLDER, a)) == len(a)


class TestCoverOrder:

    """Injective embedding of nested tokens."""

    def test_needs_distinct_partners(self):
        small = HOLDER.marking([("h1", {"q1": 1}), ("h1", {"q1": 1})])
        assert not leq_f(small, HOLDER.marking([("h1", {"q1": 2})]))
        assert leq_f(small, HOLDER.marking([("h1", {"q1": 2}), ("h1", {"q1": 1, "q2": 1})]))

    def test_places_must_agree(self):
        assert not leq_f(HOLDER.marking([("h1", {})]), HOLDER.marking([("h2", {"q1": 1})]))

    def test_empty_is_below_everything(self):
        assert leq_f(Multiset(), HOLDER.marking([("h1", {"q1": 1})]))

    def test_lossy_successors(self):
        marking = HOLDER.marking([("h1", {"q1": 1})])
        successors = lossy_successors(marking)
        assert HOLDER.marking([("h1", {})]) in successors
        assert Multiset() in successors
        assert len(successors) == 2

    @given(nested, nested, nested)
    def test_is_a_preorder(self, a, b, c):
        assert leq_f(a, a)
        if leq_f(a, b) and leq_f(b, c):
            assert leq_f(a, c)

    @given(nested)
    def test_losses_go_down(self, marking):
        for smaller in lossy_successors(marking):
            assert leq_f(smaller, marking)
            assert not leq_f(marking, smaller)

    @settings(max_examples=60, deadline=None)
    @given(nested)
    def test_losses_reach_everything_below(self, marking):
        reached = {marking}
        frontier = {marking}
        while frontier:
            frontier = {s for m in frontier for s in lossy_successors(m) if s not in reached}
            reached.update(frontier)
        assert reached == below(marking)


class TestDestruction:
    """Types consumed without being produced."""

    def test_destroying_transition_needs_losses(self, samples_dir):
        doc = load_doc(samples_dir / "lossy.nwn")
        eos = doc.net
        assert destroy_set(eos, "t") == {"K"}
        assert event_modes(eos, 0, doc.init) == []
        emptied = eos.marking([("p1", {}), ("p2", {}), ("p3", {"q1": 1, "q2": 1})])
        modes = event_modes(eos, 0, emptied)
        assert len(modes) == 1
        assert eos_fire(eos, emptied, 0, modes[0]) == doc.target

    def test_unknown_transition(self, samples_dir):
        doc = load_doc(samples_dir / "lossy.nwn")
        with pytest.raises(UnknownTransition):
            destroy_set(doc.net, "nope")

    def test_report(self, samples_dir):
        report = eos_validate(load_doc(samples_dir / "lossy.nwn").net)
        assert report.ok
        assert not report.conservative
        assert report.destroying == ["t"]
        assert eos_validate(load_doc(samples_dir / "sync.nwn").net).conservative


class TestNormalForm:
    """One event per transition, autonomous when destroying."""

    def test_samples_in_normal_form(self, samples_dir):
        assert normalization_problems(load_doc(samples_dir / "lossy.nwn").net) == []
        assert normalization_problems(load_doc(samples_dir / "sync.nwn").net) == []

    def test_synchronized_fight(self, samples_dir):
        problems = normalization_problems(load_doc(samples_dir / "rpg.nwn").net)
        assert problems == ["fight destroys a type but is synchronized"]

    def test_transitions_without_events(self):
        eos = make_eos("bare", ["h1", "h2"], ["move"], [("h1", "move", 1), ("move", "h2", 1)],
                       [QUEUE], {"h1": "Q", "h2": "Q"}, [])
        assert normalization_problems(eos) == ["move takes part in 0 events"]

    def test_synchronized_destruction(self):
        eos = make_eos("sync", ["h1", "h2"], ["drop"], [("h1", "drop", 1), ("drop", "h2", 1)],
                       [QUEUE], {"h1": "Q"}, [Event("drop", {"Q": Multiset({"u": 1}, "Q")})])
        assert normalization_problems(eos) == ["drop destroys a type but is synchronized"]


class TestValidation:
    """Structural problems are reported, never raised."""

    def test_idle_transitions_are_added(self):
        assert idle_name("h1") in HOLDER.system.transitions
        assert eos_validate(HOLDER).ok

    def test_shared_names(self):
        shared = PetriNet.build("S", ["h1"], ["v"], [("h1", "v", 1)])
        eos = make_eos("clash", ["h1"], [], [], [shared], {"h1": "S"}, [])
        codes = [violation.code for violation in eos_validate(eos).violations]
        assert "not-disjoint" in codes

    def test_bad_idle_loop(self):
        system = PetriNet.build("bad", ["h"], ["@id/h"], [("h", "@id/h", 2), ("@id/h", "h", 1)])
        eos = EOS("bad", system, {BLACK: empty_net()}, {"h": BLACK}, ())
        codes = [violation.code for violation in eos_validate(eos).violations]
        assert codes == ["idle-flow"]

    def test_idle_event_must_fire_something(self):
        eos = make_eos("idle", ["h1"], [], [], [QUEUE], {"h1": "Q"}, [Event(idle_name("h1"))])
        codes = [violation.code for violation in eos_validate(eos).violations]
        assert codes == ["idle-empty-theta"]

    def test_unknown_type(self):
        eos = make_eos("typed", ["h1"], [], [], [], {"h1": "Missing"}, [])
        assert "unknown-type" in [violation.code for violation in eos_validate(eos).violations]
