"""Tests for the .nwn text format, its JSON mirror and DOT export."""

import json

import pytest
from hypothesis import given, settings, strategies as st

from nwn.core.errors import NetError, ValidationError
from nwn.format import (
    FormatError, NetSyntaxError, ResolutionError, emit_doc, from_json, kind_of, load_doc,
    parse_doc, save_doc, to_dot, to_json,
)
from nwn.translate import nupn_to_ceos


SAMPLES = ["pn_step.nwn", "nupn_step.nwn", "sync.nwn", "channels.nwn", "renames.nwn", "merge.nwn", "lossy.nwn", "rpg.nwn"]


class TestSamples:
    """The hand-written documents parse and re-emit unchanged in meaning."""

    @pytest.mark.parametrize("name", SAMPLES)
    def test_emit_then_parse(self, samples_dir, name):
        doc = load_doc(samples_dir / name)
        again = parse_doc(emit_doc(doc))
        assert again.kind == doc.kind
        assert again.net == doc.net
        assert again.init == doc.init
        assert again.target == doc.target

    @pytest.mark.parametrize("name", SAMPLES)
    def test_json_mirror(self, samples_dir, name):
        doc = load_doc(samples_dir / name)
        again = from_json(json.loads(json.dumps(to_json(doc))))
        assert again.net == doc.net
        assert again.init == doc.init

    def test_kinds(self, samples_dir):
        assert kind_of(load_doc(samples_dir / "channels.nwn").net) == "cnupn"
        assert kind_of(load_doc(samples_dir / "renames.nwn").net) == "rnupn"
        assert kind_of(load_doc(samples_dir / "sync.nwn").net) == "eos"

    def test_labels_survive(self, samples_dir):
        doc = load_doc(samples_dir / "nupn_step.nwn")
        text = emit_doc(doc)
        assert "tuple a = 2*p1 + 2*p2 + p3" in text
        assert parse_doc(text).labels == doc.labels

    def test_header_name(self, samples_dir):
        assert load_doc(samples_dir / "pn_step.nwn").net.name == "pn_step"
        assert parse_doc("NET pn 1\nPLACES p\n").net.name == "net"


class TestFiles:
    """Reading and writing through the file system."""

    def test_save_and_load_json(self, samples_dir, tmp_path):
        doc = load_doc(samples_dir / "sync.nwn")
        path = tmp_path / "sync.json"
        save_doc(path, doc)
        assert json.loads(path.read_text())["kind"] == "eos"
        assert load_doc(path).net == doc.net

    def test_save_text(self, samples_dir, tmp_path):
        doc = load_doc(samples_dir / "channels.nwn")
        path = tmp_path / "copy.nwn"
        save_doc(path, doc)
        assert load_doc(path).net == doc.net

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            load_doc(tmp_path / "absent.nwn")

    def test_broken_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"kind": "pn",\n  oops}')
        with pytest.raises(NetSyntaxError) as excinfo:
            load_doc(path)
        assert excinfo.value.line == 2

    def test_incomplete_json(self):
        with pytest.raises(FormatError):
            from_json({"places": ["p"]})


class TestSyntaxErrors:
    """Malformed text is reported with its position."""

    def test_missing_header(self):
        with pytest.raises(NetSyntaxError) as excinfo:
            parse_doc("# nothing here\n")
        assert "header" in excinfo.value.message

    def test_unknown_formalism(self):
        with pytest.raises(NetSyntaxError) as excinfo:
            parse_doc("NET tpn 1 x\n")
        assert excinfo.value.line == 1

    def test_unsupported_version(self):
        with pytest.raises(NetSyntaxError):
            parse_doc("NET pn 9 x\n")

    def test_bad_weight_line(self):
        text = "NET pn 1 x\nPLACES p\nTRANS t\nARCS\np -> t : two\n"
        with pytest.raises(NetSyntaxError) as excinfo:
            parse_doc(text)
        assert excinfo.value.line == 5

    def test_indented_entry_column(self):
        with pytest.raises(NetSyntaxError) as excinfo:
            parse_doc("NET pn 1 x\nPLACES p\nTRANS t\nARCS\n    p => t\n")
        assert (excinfo.value.line, excinfo.value.column) == (5, 5)

    def test_reserved_names(self):
        with pytest.raises(NetSyntaxError) as excinfo:
            parse_doc("NET pn 1 x\nPLACES @p\n")
        assert "reserved" in excinfo.value.message

    def test_generated_names_are_accepted(self):
        doc = parse_doc("NET pn 1 x\nPLACES @gen/p q\n")
        assert doc.net.places == ("@gen/p", "q")

    def test_section_for_another_formalism(self):
        with pytest.raises(NetSyntaxError):
            parse_doc("NET pn 1 x\nPLACES p\nCHANNELS\n")

    def test_unclosed_object(self):
        with pytest.raises(NetSyntaxError) as excinfo:
            parse_doc("NET eos 1 x\nOBJECT N\nPLACES q\n")
        assert excinfo.value.line == 2

    def test_duplicate_label(self):
        text = "NET nupn 1 x\nPLACES p\nTRANS t\nINIT\ntuple a = p\ntuple a = 2*p\n"
        with pytest.raises(NetSyntaxError) as excinfo:
            parse_doc(text)
        assert excinfo.value.line == 6


class TestResolution:
    """Names must be declared before they mean anything."""

    def test_undeclared_arc_node(self):
        with pytest.raises(ResolutionError) as excinfo:
            parse_doc("NET pn 1 x\nPLACES p\nTRANS t\nARCS\np -> u : 1\n")
        assert excinfo.value.name == "u"
        assert excinfo.value.line == 5

    def test_undeclared_marking_place(self):
        with pytest.raises(ResolutionError):
            parse_doc("NET pn 1 x\nPLACES p\nINIT\nq\n")

    def test_unknown_object_transition(self):
        text = "NET eos 1 x\nOBJECT N\nPLACES q\nTRANS u\nEND\nPLACES h\nTRANS t\nTYPES h:N\nEVENTS\nt : v\n"
        with pytest.raises(ResolutionError) as excinfo:
            parse_doc(text)
        assert excinfo.value.name == "v"

    def test_rename_fragment_is_checked(self, samples_dir):
        text = (samples_dir / "channels.nwn").read_text().replace("NET cnupn", "NET rnupn")
        with pytest.raises(ValidationError) as excinfo:
            parse_doc(text)
        assert excinfo.value.violations[0].code == "not-rnu"


class TestGenerated:
    """Generated nets carry provenance comments."""

    def test_provenance_round_trip(self, samples_dir):
        doc = load_doc(samples_dir / "nupn_step.nwn")
        translation = nupn_to_ceos(doc.net)
        text = emit_doc(translation.target, translation.encode(doc.init),
                        provenance=translation.provenance)
        assert "#@ provenance " in text
        again = parse_doc(text)
        assert again.net == translation.target
        assert again.provenance == translation.provenance
        assert again.init == translation.encode(doc.init)


class TestDot:
    """Graphviz export."""

    def test_object_system(self, samples_dir):
        dot = to_dot(load_doc(samples_dir / "sync.nwn").net)
        assert dot.startswith('digraph "sync" {')
        assert "subgraph cluster_" in dot
        assert '"p1" -> "th" [label="2"];' in dot
        assert "@id/" not in dot

    def test_petri_net(self, samples_dir):
        dot = to_dot(load_doc(samples_dir / "pn_step.nwn"))
        assert '"t" [shape=box];' in dot
        assert dot.rstrip().endswith("}")


HEADERS = ["NET pn 1", "NET nupn 1 n", "NET cnupn 1", "NET rnupn 1", "NET eos 1 n", "NET eos 2", "NET"]
FRAGMENTS = [
    "PLACES p q", "TRANS t", "ARCS", "p -> t : 1", "t -> q : 2", "p -> t : x1", "t -> q : 2*nu1",
    "CHANNELS", "t : p (x1) -> q (x1)", "MATRIX t x1 x1 : p>q", "TYPES p:N q:@black", "EVENTS",
    "t : u", "@id/p : u", "OBJECT N", "PLACES r", "TRANS u", "r -> u : 1", "END", "INIT", "TARGET",
    "p {r}", "p", "tuple a = p + 2*q", "tuple q", "2*p + q", "0", "#@ provenance @gen/a tag",
    "t : p (x1 x2) -> q (x1)", "p -> t : 99999999999999999999",
]


def parses_or_reports(data):
    try:
        parse_doc(data)
    except NetError:
        pass


class TestFuzz:
    """Arbitrary input is either a document or a reported error."""

    @settings(max_examples=500, deadline=None)
    @given(st.text(max_size=200))
    def test_random_text(self, text):
        parses_or_reports(text)

    @settings(max_examples=500, deadline=None)
    @given(st.sampled_from(HEADERS), st.lists(st.one_of(st.sampled_from(FRAGMENTS), st.text(max_size=12)),
                                              max_size=14))
    def test_shuffled_sections(self, header, lines):
        parses_or_reports("\n".join([header] + lines))

    @pytest.mark.slow
    @settings(max_examples=10000, deadline=None)
    @given(st.binary(max_size=200))
    def test_random_bytes(self, data):
        parses_or_reports(data)

    def test_undecodable_bytes(self):
        with pytest.raises(NetSyntaxError) as excinfo:
            parse_doc(b"NET pn 1\nPLACES \xff\n")
        assert (excinfo.value.line, excinfo.value.column) == (2, 8)

    def test_utf8_bytes(self):
        assert parse_doc("NET pn 1 x\nPLACES p\n".encode()).net.places == ("p",)
