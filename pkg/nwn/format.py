"""The ``.nwn`` document format: parser, canonical emitter, JSON mirror and DOT export.

A document is line oriented::

    NET nupn 1 nupn_step
    PLACES p1 p2 p3 p4 p5
    TRANS t
    ARCS
    p1 -> t : x1 + x2
    t -> p5 : 2*nu1 + nu2
    INIT
    tuple a = 2*p1 + 2*p2 + p3

The JSON mirror holds the same sections as structured data and is turned
back into text before parsing, so there is a single parser.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import json
import logging
import re

from .core.cnupn import (
    CNuPN, Channel, ChannelMatrix, Cell, channels_to_matrices, cnupn_validate, is_rnupn,
    matrices_to_channels,
)
from .core.eos import BLACK, EOS, Event, eos_validate, is_idle, make_eos
from .core.errors import NetError, ValidationError, Violation
from .core.ms import Multiset, PlaceVector
from .core.nupn import NuConfig, NuPN, Variable, nupn_validate
from .core.petri import PetriNet
from .translate.base import GEN_PREFIX, ProvenanceEntry


logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
KINDS = ("pn", "nupn", "cnupn", "rnupn", "eos")
SECTIONS = ("PLACES", "TRANS", "ARCS", "CHANNELS", "TYPES", "EVENTS", "INIT", "TARGET")
OBJECT_SECTIONS = ("PLACES", "TRANS", "ARCS")

_NAME = r"[A-Za-z_@][A-Za-z0-9_./'^\[\]@]*"
NAME_RE = re.compile(rf"^{_NAME}$")
TERM_RE = re.compile(rf"^(?:(\d+)\s*\*\s*)?({_NAME})$")
ARC_RE = re.compile(rf"^({_NAME})\s*->\s*({_NAME})\s*:\s*(.+)$")
CHANNEL_RE = re.compile(
    rf"^({_NAME})\s*:\s*({_NAME})\s*\(([^)]*)\)\s*->\s*({_NAME})\s*\(([^)]*)\)$")
MATRIX_RE = re.compile(rf"^({_NAME})\s+({_NAME})\s+({_NAME})\s*:\s*(.*)$")
EVENT_RE = re.compile(rf"^({_NAME})\s*:\s*(.*)$")
TUPLE_RE = re.compile(rf"^tuple(?:\s+({_NAME})\s*=)?\s+(.+)$")
TOKEN_RE = re.compile(rf"^({_NAME})\s*(?:\{{(.*)\}})?$")


class FormatError(NetError):
    """Raised when a document cannot be read."""
    pass


class NetSyntaxError(FormatError):
    """Raised on malformed text, with a 1-based position."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class ResolutionError(FormatError):
    """Raised when a name is used but never declared."""

    def __init__(self, name: str, line: Optional[int] = None, message: str = ""):
        self.name = name
        self.line = line
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}unresolved name '{name}'{': ' + message if message else ''}")


@dataclass
class NetDocument:
    """A net of one formalism with optional initial and target configurations."""

    kind: str
    net: Any
    init: Any = None
    target: Any = None
    version: int = FORMAT_VERSION
    labels: Dict[str, PlaceVector] = field(default_factory=dict)
    provenance: Dict[str, ProvenanceEntry] = field(default_factory=dict)


def kind_of(net: Any) -> str:
    """The formalism keyword of a net object."""
    if isinstance(net, PetriNet):
        return "pn"
    if isinstance(net, NuPN):
        return "nupn"
    if isinstance(net, CNuPN):
        if any(net.matrix(t).selective() for t in net.transitions) and is_rnupn(net):
            return "rnupn"
        return "cnupn"
    if isinstance(net, EOS):
        return "eos"
    raise TypeError(f"Not a net: {type(net).__name__}")


@dataclass
class _Scope:
    name: str
    line: int
    places: List[str] = field(default_factory=list)
    transitions: List[str] = field(default_factory=list)
    arcs: List[Tuple[str, str, str, int]] = field(default_factory=list)


class _Parser:
    """Reads a document line by line and builds the net at the end."""

    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.kind: Optional[str] = None
        self.version = FORMAT_VERSION
        self.top = _Scope("net", 0)
        self.scope = self.top
        self.objects: List[_Scope] = []
        self.section: Optional[str] = None
        self.channels: List[Tuple[Channel, int]] = []
        self.matrices: Dict[str, Dict[Cell, Tuple[Cell, ...]]] = {}
        self.types: List[Tuple[str, str, int]] = []
        self.events: List[Tuple[str, str, int]] = []
        self.configs: Dict[str, List[Tuple[str, int]]] = {"INIT": [], "TARGET": []}
        self.provenance: Dict[str, ProvenanceEntry] = {}
        self.lineno = 0
        self.column = 1

    def fail(self, message: str, column: Optional[int] = None) -> NetSyntaxError:
        return NetSyntaxError(self.lineno, column or self.column, message)

    def name(self, text: str, allow_idle: bool = False) -> str:
        if not NAME_RE.match(text):
            raise self.fail(f"malformed name '{text}'")
        if text.startswith("@") and not text.startswith(GEN_PREFIX) and text != BLACK:
            if not (allow_idle and is_idle(text)):
                raise self.fail(f"names starting with '@' are reserved: '{text}'")
        return text

    def terms(self, text: str) -> List[Tuple[int, str]]:
        """Parse ``2*a + b``; ``0`` is the empty sum."""
        text = text.strip()
        if text in ("0", ""):
            return []
        result = []
        for part in text.split("+"):
            match = TERM_RE.match(part.strip())
            if not match:
                raise self.fail(f"malformed term '{part.strip()}'")
            count = int(match.group(1)) if match.group(1) else 1
            result.append((count, match.group(2)))
        return result

    def parse(self):
        for self.lineno, raw in enumerate(self.lines, start=1):
            stripped = raw.strip()
            self.column = len(raw) - len(raw.lstrip()) + 1
            if stripped.startswith("#@"):
                self.provenance_line(stripped[2:].split())
                continue
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                if self.kind is None:
                    self.header(text)
                else:
                    self.line(text)
            except FormatError:
                raise
            except (ValueError, NetError) as e:
                if isinstance(e, ValidationError):
                    raise
                raise self.fail(str(e))
        if self.kind is None:
            raise NetSyntaxError(max(len(self.lines), 1), 1, "missing 'NET <kind> <version>' header")
        if self.scope is not self.top:
            raise NetSyntaxError(self.scope.line, 1, f"OBJECT {self.scope.name} is never closed with END")

    def provenance_line(self, words: List[str]):
        if len(words) >= 3 and words[0] == "provenance":
            source = words[3] if len(words) > 3 else ""
            self.provenance[words[1]] = ProvenanceEntry(words[2], "" if source == "-" else source)

    def header(self, text: str):
        words = text.split()
        if len(words) not in (3, 4) or words[0] != "NET":
            raise self.fail("expected 'NET <kind> <version> [name]'")
        if words[1] not in KINDS:
            raise self.fail(f"unknown formalism '{words[1]}', expected one of {', '.join(KINDS)}")
        if not words[2].isdigit() or int(words[2]) != FORMAT_VERSION:
            raise self.fail(f"unsupported version '{words[2]}'")
        self.kind = words[1]
        self.version = int(words[2])
        self.top.name = self.name(words[3]) if len(words) == 4 else "net"

    def line(self, text: str):
        parts = text.split(None, 1)
        head = parts[0]
        rest = parts[1].strip() if len(parts) > 1 else ""
        if head in SECTIONS:
            inner = self.scope is not self.top
            if inner and head not in OBJECT_SECTIONS:
                raise self.fail(f"section {head} is not allowed inside OBJECT")
            self.require_kind(head)
            self.section = head
            if rest:
                if head not in ("PLACES", "TRANS", "TYPES"):
                    raise self.fail(f"unexpected text after {head}")
                self.entry(rest)
            return
        if head == "OBJECT":
            self.require_kind(head)
            if self.scope is not self.top:
                raise self.fail("OBJECT blocks cannot be nested")
            self.scope = _Scope(self.name(rest), self.lineno)
            self.objects.append(self.scope)
            self.section = None
            return
        if head == "END":
            if self.scope is self.top or rest:
                raise self.fail("END without OBJECT")
            self.scope = self.top
            self.section = None
            return
        if head == "MATRIX":
            self.require_kind(head)
            self.matrix(rest)
            return
        if self.section is None:
            raise self.fail(f"'{text}' is outside any section")
        self.entry(text)

    def require_kind(self, keyword: str):
        allowed = {
            "CHANNELS": ("cnupn", "rnupn"),
            "MATRIX": ("cnupn", "rnupn"),
            "TYPES": ("eos",),
            "EVENTS": ("eos",),
            "OBJECT": ("eos",),
        }.get(keyword)
        if allowed and self.kind not in allowed:
            raise self.fail(f"{keyword} is not allowed in a {self.kind} document")

    def entry(self, text: str):
        section = self.section
        if section == "PLACES":
            self.scope.places.extend(self.name(w) for w in text.split())
        elif section == "TRANS":
            self.scope.transitions.extend(self.name(w) for w in text.split())
        elif section == "ARCS":
            match = ARC_RE.match(text)
            if not match:
                raise self.fail("expected '<source> -> <target> : <weight>'")
            self.scope.arcs.append((self.name(match.group(1)), self.name(match.group(2)),
                                    match.group(3).strip(), self.lineno))
        elif section == "CHANNELS":
            match = CHANNEL_RE.match(text)
            if not match:
                raise self.fail("expected '<t> : <p> (<vars>) -> <q> (<vars>)'")
            t, p, pre, q, post = match.groups()
            channel = Channel(self.name(t), self.name(p), self.name(q),
                              tuple(Variable.parse(v) for v in pre.split()),
                              tuple(Variable.parse(v) for v in post.split()))
            self.channels.append((channel, self.lineno))
        elif section == "TYPES":
            for word in text.split():
                place, sep, net = word.partition(":")
                if not sep:
                    raise self.fail(f"expected '<place>:<net>', got '{word}'")
                self.types.append((self.name(place), self.name(net), self.lineno))
        elif section == "EVENTS":
            match = EVENT_RE.match(text)
            if not match:
                raise self.fail("expected '<transition> : <object transitions>'")
            self.terms(match.group(2))
            self.events.append((self.name(match.group(1), allow_idle=True), match.group(2), self.lineno))
        else:
            self.configs[section].append((text, self.lineno))

    def matrix(self, text: str):
        match = MATRIX_RE.match(text)
        if not match:
            raise self.fail("expected 'MATRIX <t> <x> <y> : <p>><q> ...'")
        t, source, target, entries = match.groups()
        source_var, target_var = Variable.parse(source), Variable.parse(target)
        rows = self.matrices.setdefault(self.name(t), {})
        for entry in entries.split():
            p, sep, q = entry.partition(">")
            if not sep:
                raise self.fail(f"expected '<p>><q>', got '{entry}'")
            cell = (source_var, self.name(p))
            rows[cell] = rows.get(cell, ()) + ((target_var, self.name(q)),)

    # building

    def resolve(self, name: str, known: Sequence[str], line: int, what: str):
        if name not in known:
            raise ResolutionError(name, line, f"not a declared {what}")

    def build(self) -> NetDocument:
        if self.kind == "pn":
            net = self.petri(self.top)
        elif self.kind == "eos":
            net = self.eos()
        else:
            net = self.nupn()
        doc = NetDocument(self.kind, net, version=self.version, provenance=self.provenance)
        for section in ("INIT", "TARGET"):
            if self.configs[section]:
                setattr(doc, section.lower(), self.config(net, self.configs[section], doc))
        return doc

    def petri(self, scope: _Scope) -> PetriNet:
        arcs = []
        for source, target, weight, line in scope.arcs:
            self.check_arc(scope, source, target, line)
            self.lineno = line
            if not weight.isdigit():
                raise self.fail(f"weight must be a count, got '{weight}'")
            arcs.append((source, target, int(weight)))
        return PetriNet.build(scope.name, scope.places, scope.transitions, arcs)

    def check_arc(self, scope: _Scope, source: str, target: str, line: int):
        nodes = set(scope.places) | set(scope.transitions)
        for name in (source, target):
            if name not in nodes:
                raise ResolutionError(name, line, f"not a node of {scope.name}")

    def nupn(self) -> Union[NuPN, CNuPN]:
        scope = self.top
        arcs = []
        for source, target, weight, line in scope.arcs:
            self.check_arc(scope, source, target, line)
            self.lineno = line
            label = Multiset({Variable.parse(v): c for c, v in self._summed(self.terms(weight))})
            arcs.append((source, target, label))
        base = NuPN.build(scope.name, scope.places, scope.transitions, arcs)
        if self.kind == "nupn":
            violations = nupn_validate(base)
            if violations:
                raise ValidationError(violations)
            return base
        for channel, line in self.channels:
            self.resolve(channel.transition, scope.transitions, line, "transition")
            self.resolve(channel.source, scope.places, line, "place")
            self.resolve(channel.target, scope.places, line, "place")
            if channel.transition in self.matrices:
                raise ResolutionError(channel.transition, line, "transition has both CHANNELS and MATRIX")
        transfers = channels_to_matrices(channel for channel, _ in self.channels)
        for t, rows in self.matrices.items():
            self.resolve(t, scope.transitions, 0, "transition")
            transfers[t] = ChannelMatrix(dict(rows), complete=True)
        net = CNuPN(base, transfers)
        violations = cnupn_validate(net)
        if self.kind == "rnupn" and not violations:
            meta = is_rnupn(net)
            if not meta:
                violations.append(Violation("not-rnu", meta.transition, meta.reason))
        if violations:
            raise ValidationError(violations)
        return net

    def _summed(self, terms: List[Tuple[int, str]]) -> List[Tuple[int, str]]:
        counts: Dict[str, int] = {}
        for count, name in terms:
            counts[name] = counts.get(name, 0) + count
        return [(c, n) for n, c in counts.items()]

    def eos(self) -> EOS:
        objects = [self.petri(scope) for scope in self.objects]
        owner = {t: net.name for net in objects for t in net.transitions}
        names = {net.name for net in objects} | {BLACK}
        places = self.top.places
        typing = {}
        for place, net, line in self.types:
            self.resolve(place, places, line, "system place")
            self.resolve(net, sorted(names), line, "object net")
            typing[place] = net
        events = []
        for transition, theta, line in self.events:
            self.lineno = line
            if is_idle(transition):
                self.resolve(transition[len("@id/"):], places, line, "system place")
            else:
                self.resolve(transition, self.top.transitions, line, "system transition")
            per_net: Dict[str, Dict[str, int]] = {}
            for count, t in self.terms(theta):
                if t not in owner:
                    raise ResolutionError(t, line, "not an object transition")
                counts = per_net.setdefault(owner[t], {})
                counts[t] = counts.get(t, 0) + count
            events.append(Event(transition, {n: Multiset(c, n) for n, c in per_net.items()}))
        arcs = []
        for source, target, weight, line in self.top.arcs:
            self.check_arc(self.top, source, target, line)
            self.lineno = line
            if not weight.isdigit():
                raise self.fail(f"weight must be a count, got '{weight}'")
            arcs.append((source, target, int(weight)))
        eos = make_eos(self.top.name, places, self.top.transitions, arcs, objects, typing, events)
        report = eos_validate(eos)
        if not report.ok:
            raise ValidationError(report.violations)
        return eos

    def config(self, net: Any, lines: List[Tuple[str, int]], doc: NetDocument) -> Any:
        if self.kind == "pn":
            counts: Dict[str, int] = {}
            for text, line in lines:
                self.lineno = line
                for count, p in self.terms(text):
                    self.resolve(p, net.places, line, "place")
                    counts[p] = counts.get(p, 0) + count
            return net.marking(counts)
        if self.kind == "eos":
            tokens = []
            for text, line in lines:
                self.lineno = line
                match = TOKEN_RE.match(text)
                if not match:
                    raise self.fail("expected '<place> [{<inner marking>}]'")
                place, inner = match.groups()
                self.resolve(place, net.system.places, line, "system place")
                inner_places = net.object_net(net.type_of(place)).places
                counts = {}
                for count, q in self._summed(self.terms(inner or "")):
                    self.resolve(q, inner_places, line, f"place of {net.type_of(place)}")
                    counts[q] = count
                tokens.append(net.token(place, counts))
            return Multiset.of(tokens)
        vectors = []
        for text, line in lines:
            self.lineno = line
            match = TUPLE_RE.match(text)
            if not match:
                raise self.fail("expected 'tuple [<label> =] <marking>'")
            label, body = match.groups()
            counts = {}
            for count, p in self._summed(self.terms(body)):
                self.resolve(p, net.places, line, "place")
                counts[p] = count
            vector = PlaceVector.from_multiset(Multiset(counts), net.places)
            if label:
                if label in doc.labels:
                    raise self.fail(f"tuple label '{label}' used twice")
                doc.labels[label] = vector
            vectors.append(vector)
        return NuConfig.of(vectors)


def parse_doc(text: Union[str, bytes]) -> NetDocument:
    """Parse a document and validate its net.

    Byte input must be UTF-8.

    Raises:
        NetSyntaxError: On malformed text, with line and column.
        ResolutionError: When a name is used but never declared.
        ValidationError: When the net fails its formalism's checks.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            line = e.object.count(b"\n", 0, e.start) + 1
            column = e.start - (e.object.rfind(b"\n", 0, e.start) + 1) + 1
            raise NetSyntaxError(line, column, f"not UTF-8 text: {e.reason}")
    parser = _Parser(text)
    parser.parse()
    try:
        doc = parser.build()
    except (FormatError, ValidationError):
        raise
    except (ValueError, NetError) as e:
        raise parser.fail(str(e))
    logger.debug(f"Parsed {doc.kind} document '{getattr(doc.net, 'name', '')}'")
    return doc


# emission


def _term_text(items: Sequence[Tuple[Any, int]]) -> str:
    parts = [str(e) if c == 1 else f"{c}*{e}" for e, c in items if c]
    return " + ".join(parts) if parts else "0"


def _vector_text(vector: PlaceVector, places: Sequence[str]) -> str:
    return _term_text([(places[i], c) for i, c in enumerate(vector.counts)])


def _arcs_json(arcs: Sequence[Tuple[str, str, Any]]) -> List[Dict[str, str]]:
    return [{"source": s, "target": t, "weight": str(w)} for s, t, w in arcs]


def _petri_json(net: PetriNet) -> Dict[str, Any]:
    return {
        "name": net.name,
        "places": list(net.places),
        "transitions": list(net.transitions),
        "arcs": _arcs_json(net.arcs()),
    }


def _config_lines(doc: NetDocument, config: Any, labelled: bool) -> List[str]:
    net = doc.net
    if doc.kind == "pn":
        return [_term_text(config.items())]
    if doc.kind == "eos":
        lines = []
        for tok in config.elements():
            if net.type_of(tok.place) == BLACK:
                lines.append(tok.place)
            else:
                lines.append(f"{tok.place} {{{_term_text(tok.marking.items()) if tok.marking else ''}}}")
        return lines
    places = net.places
    unused = dict(doc.labels) if labelled else {}
    lines = []
    for vector in config.tuples:
        label = next((name for name, v in unused.items() if v == vector), None)
        if label is not None:
            del unused[label]
            lines.append(f"tuple {label} = {_vector_text(vector, places)}")
        else:
            lines.append(f"tuple {_vector_text(vector, places)}")
    return lines


def to_json(doc: NetDocument) -> Dict[str, Any]:
    """The JSON mirror of a document."""
    net = doc.net
    data: Dict[str, Any] = {"kind": doc.kind, "version": doc.version, "name": net.name}
    if doc.kind == "pn":
        data.update(_petri_json(net))
    elif doc.kind == "eos":
        system = net.system
        user = net.user_transitions()
        data["objects"] = [_petri_json(obj) for name, obj in net.objects.items() if name != BLACK]
        data["places"] = list(system.places)
        data["transitions"] = user
        data["arcs"] = _arcs_json([arc for arc in system.arcs() if not is_idle(arc[0]) and not is_idle(arc[1])])
        data["types"] = {p: n for p, n in net.typing.items() if n != BLACK}
        data["events"] = [
            {"transition": e.transition,
             "theta": _term_text([item for _, theta in sorted(e.theta.items()) for item in theta.items()])
             if not e.is_autonomous() else ""}
            for e in net.events
        ]
    else:
        base = net if isinstance(net, NuPN) else net.base
        data["places"] = list(base.places)
        data["transitions"] = list(base.transitions)
        data["arcs"] = _arcs_json(base.arcs())
        if isinstance(net, CNuPN):
            data["channels"] = [
                {"transition": c.transition, "source": c.source, "target": c.target,
                 "pre": [str(v) for v in c.pre_vars], "post": [str(v) for v in c.post_vars]}
                for c in matrices_to_channels(net.transfers)
            ]
            data["matrices"] = _complete_matrices(net)
    for section in ("init", "target"):
        config = getattr(doc, section)
        if config is not None:
            data[section] = _config_lines(doc, config, labelled=section == "init")
    if doc.provenance:
        data["provenance"] = {
            name: {"tag": entry.tag, "source": entry.source}
            for name, entry in sorted(doc.provenance.items())
        }
    return data


def _complete_matrices(net: CNuPN) -> List[Dict[str, Any]]:
    result = []
    for t in net.transitions:
        matrix = net.transfers.get(t)
        if matrix is None or not matrix.complete:
            continue
        grouped: Dict[Tuple[Variable, Variable], List[List[str]]] = {}
        for (var, p), targets in matrix.rows.items():
            for target_var, q in targets:
                grouped.setdefault((var, target_var), []).append([p, q])
        for (var, target_var) in sorted(grouped, key=lambda k: (k[0].sort_key(), k[1].sort_key())):
            result.append({"transition": t, "source_var": str(var), "target_var": str(target_var),
                           "entries": grouped[(var, target_var)]})
    return result


def _wrap(keyword: str, names: Sequence[str], width: int = 8) -> List[str]:
    names = list(names)
    return [f"{keyword} {' '.join(names[i:i + width])}" for i in range(0, len(names), width)]


def _render_block(data: Dict[str, Any]) -> List[str]:
    lines = _wrap("PLACES", data.get("places", [])) + _wrap("TRANS", data.get("transitions", []))
    if data.get("arcs"):
        lines.append("ARCS")
        lines.extend(f"{a['source']} -> {a['target']} : {a['weight']}" for a in data["arcs"])
    return lines


def _render(data: Dict[str, Any]) -> str:
    """Text of a JSON mirror; the single source of the canonical layout."""
    lines = [f"NET {data['kind']} {data.get('version', FORMAT_VERSION)} {data.get('name', 'net')}"]
    for name, entry in data.get("provenance", {}).items():
        lines.append(f"#@ provenance {name} {entry['tag']} {entry.get('source') or '-'}")
    for obj in data.get("objects", []):
        lines.append(f"OBJECT {obj['name']}")
        lines.extend(_render_block(obj))
        lines.append("END")
    lines.extend(_render_block(data))
    if data.get("channels"):
        lines.append("CHANNELS")
        lines.extend(
            f"{c['transition']} : {c['source']} ({' '.join(c['pre'])}) -> {c['target']} ({' '.join(c['post'])})"
            for c in data["channels"])
    for m in data.get("matrices", []):
        entries = " ".join(f"{p}>{q}" for p, q in m["entries"])
        lines.append(f"MATRIX {m['transition']} {m['source_var']} {m['target_var']} : {entries}".rstrip())
    if data.get("types"):
        lines.extend(_wrap("TYPES", [f"{p}:{n}" for p, n in data["types"].items()]))
    if data.get("events"):
        lines.append("EVENTS")
        lines.extend(f"{e['transition']} : {e['theta']}".rstrip() for e in data["events"])
    for section in ("init", "target"):
        if section in data:
            lines.append(section.upper())
            lines.extend(data[section])
    return "\n".join(lines) + "\n"


def emit_doc(doc: Union[NetDocument, Any], init: Any = None, target: Any = None,
             provenance: Optional[Dict[str, ProvenanceEntry]] = None) -> str:
    """Canonical text of a document, or of a bare net with optional configurations.

    Declaration order is kept for every net, generated ones included, since
    the place order fixes the coordinates of data tuples.
    """
    if not isinstance(doc, NetDocument):
        doc = NetDocument(kind_of(doc), doc, init, target, provenance=dict(provenance or {}))
    return _render(to_json(doc))


def from_json(data: Dict[str, Any]) -> NetDocument:
    """Rebuild a document from its JSON mirror."""
    try:
        text = _render(data)
    except (KeyError, TypeError) as e:
        raise FormatError(f"Malformed JSON document: missing or invalid {e}")
    return parse_doc(text)


def load_doc(path: Union[str, Path]) -> NetDocument:
    """Read a ``.nwn`` file, or its JSON mirror when the name ends in ``.json``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise FormatError(f"Cannot read {path}: {e}")
    if path.suffix == ".json":
        try:
            return from_json(json.loads(text))
        except json.JSONDecodeError as e:
            raise NetSyntaxError(e.lineno, e.colno, e.msg)
    return parse_doc(text)


def save_doc(path: Union[str, Path], doc: NetDocument, indent: int = 2):
    path = Path(path)
    if path.suffix == ".json":
        text = json.dumps(to_json(doc), indent=indent, ensure_ascii=False) + "\n"
    else:
        text = emit_doc(doc)
    path.write_text(text, encoding="utf-8", newline="\n")
    logger.info(f"Wrote {doc.kind} document to {path}")


# DOT export


def _q(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_petri(net: PetriNet, indent: str, types: Optional[Dict[str, str]] = None) -> List[str]:
    lines = []
    for p in net.places:
        label = f"{p} : {types[p]}" if types and types.get(p, BLACK) != BLACK else p
        lines.append(f"{indent}{_q(p)} [shape=circle, label={_q(label)}];")
    for t in net.transitions:
        if not is_idle(t):
            lines.append(f"{indent}{_q(t)} [shape=box];")
    for source, target, weight in net.arcs():
        if is_idle(source) or is_idle(target):
            continue
        extra = f" [label={_q(str(weight))}]" if weight != 1 else ""
        lines.append(f"{indent}{_q(source)} -> {_q(target)}{extra};")
    return lines


def to_dot(net: Any) -> str:
    """Graphviz text for the structure of ``net``; no semantics are drawn."""
    if isinstance(net, NetDocument):
        net = net.net
    lines = [f"digraph {_q(net.name)} {{", "  rankdir=LR;"]
    if isinstance(net, PetriNet):
        lines.extend(_dot_petri(net, "  "))
    elif isinstance(net, EOS):
        lines.extend(_dot_petri(net.system, "  ", net.typing))
        for index, (name, obj) in enumerate(net.objects.items()):
            if name == BLACK or obj.is_empty():
                continue
            lines.append(f"  subgraph cluster_{index} {{")
            lines.append(f"    label={_q(name)};")
            lines.extend(_dot_petri(obj, "    "))
            lines.append("  }")
    else:
        base = net if isinstance(net, NuPN) else net.base
        for p in base.places:
            lines.append(f"  {_q(p)} [shape=circle];")
        for t in base.transitions:
            lines.append(f"  {_q(t)} [shape=box];")
        for source, target, label in base.arcs():
            lines.append(f"  {_q(source)} -> {_q(target)} [label={_q(str(label))}];")
        if isinstance(net, CNuPN):
            for channel in matrices_to_channels(net.transfers):
                pairs = " ".join(f"{a}>{b}" for a, b in zip(channel.pre_vars, channel.post_vars))
                lines.append(f"  {_q(channel.source)} -> {_q(channel.target)} "
                             f"[style=dashed, label={_q(channel.transition + ': ' + pairs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "FormatError", "NetSyntaxError", "ResolutionError", "NetDocument", "kind_of", "parse_doc",
    "emit_doc", "to_json", "from_json", "load_doc", "save_doc", "to_dot",
]
