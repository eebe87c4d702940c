"""Tests for the empirical checks of the constructions."""

import pytest

from nwn.core.errors import NotRnu
from nwn.crosscheck import (
    COVER_KINDS, KINDS, STEP_KINDS, CrosscheckReport, crosscheck, crosscheck_seeded, sample_states,
    source_size,
)
from nwn.explore import Limits, system_for
from nwn.format import load_doc


SMALL = Limits(max_depth=12, max_states=5000, max_tokens=24, budget_ms=20000)

# deep enough for a whole simulation cycle of the small random sources
WIDE = Limits(max_depth=48, max_states=50000, max_tokens=48, budget_ms=60000)


class TestOnSamples:
    """The sample nets under every applicable construction."""

    def test_petri_lift(self, samples_dir):
        doc = load_doc(samples_dir / "pn_step.nwn")
        report = crosscheck("pn2cnupn", doc.net, doc.init, SMALL)
        assert report.ok
        assert report.verdicts

    def test_closure_agrees_with_lossy_source(self, samples_dir):
        doc = load_doc(samples_dir / "lossy.nwn")
        report = crosscheck("closure", doc.net, doc.init, SMALL, targets=2)
        assert report.ok
        assert len(report.verdicts) == 2

    def test_object_to_channel(self, samples_dir):
        doc = load_doc(samples_dir / "merge.nwn")
        report = crosscheck("ceos2cnupn", doc.net, doc.init, SMALL, samples=1)
        assert report.ok

    def test_unfit_source(self, samples_dir):
        doc = load_doc(samples_dir / "channels.nwn")
        with pytest.raises(NotRnu):
            crosscheck("rnupn2ceos", doc.net, doc.init, SMALL)

    def test_unknown_kind(self, samples_dir):
        doc = load_doc(samples_dir / "pn_step.nwn")
        with pytest.raises(KeyError):
            crosscheck("pn2eos", doc.net, doc.init)


class TestSeeded:
    """Random sources from consecutive seeds."""

    @pytest.mark.parametrize("kind", KINDS)
    def test_no_mismatch(self, kind):
        report = crosscheck_seeded(kind, seed=11, count=2, limits=SMALL, samples=2, targets=2)
        assert report.ok, report.mismatches

    @pytest.mark.parametrize("kind", STEP_KINDS)
    def test_step_simulation_is_conclusive(self, kind):
        report = crosscheck_seeded(kind, seed=11, count=2, limits=WIDE, samples=2)
        assert report.ok, report.mismatches
        assert report.conclusive, report.inconclusive
        assert report.verdicts

    def test_deterministic_per_seed(self):
        first = crosscheck_seeded("nupn2ceos", seed=5, count=2, limits=SMALL, samples=2)
        second = crosscheck_seeded("nupn2ceos", seed=5, count=2, limits=SMALL, samples=2)
        assert first.to_dict() == second.to_dict()
        assert "millis" not in first.to_dict()["stats"]

    def test_unknown_kind(self):
        with pytest.raises(KeyError):
            crosscheck_seeded("nope", seed=0)

    def test_conservative_sources_for_channel_compilation(self):
        assert source_size("ceos2cnupn").conservative
        assert not source_size("closure").conservative


class TestReport:
    """Merging and serialization."""

    def test_merge(self):
        total = CrosscheckReport("closure", 1, states=3, depth=2)
        total.merge(CrosscheckReport("closure", 2, mismatches=[{"issue": "verdict"}], states=4, depth=5))
        assert total.states == 7
        assert total.depth == 5
        assert not total.ok
        assert total.conclusive

    def test_timing_is_opt_in(self):
        report = CrosscheckReport("pn2cnupn", 0, millis=12)
        assert report.to_dict()["stats"] == {"states": 0, "depth": 0}
        assert report.to_dict(timing=True)["stats"]["millis"] == 12


class TestSampling:
    """Breadth-first state samples."""

    def test_first_states_in_order(self, samples_dir):
        doc = load_doc(samples_dir / "merge.nwn")
        states = sample_states(system_for(doc.net), doc.init, 3, SMALL)
        assert states[0] == doc.init
        assert len(states) == 3


@pytest.mark.slow
class TestSeededSuite:
    """A hundred random sources per construction."""

    @pytest.mark.parametrize("kind", STEP_KINDS)
    def test_step_kinds(self, kind):
        report = crosscheck_seeded(kind, seed=0, count=100, limits=WIDE, samples=2)
        assert report.ok, report.mismatches
        assert report.conclusive, report.inconclusive

    @pytest.mark.parametrize("kind", COVER_KINDS)
    def test_cover_kinds(self, kind):
        report = crosscheck_seeded(kind, seed=0, count=100, limits=WIDE, targets=2)
        assert report.ok, report.mismatches
        assert len(report.verdicts) >= 100
