"""Base classes shared by the net-to-net constructions."""

from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple
import logging

from ..core.cnupn import CNuPN, ChannelMatrix, Cell
from ..core.eos import BLACK, EOS, Event, make_eos
from ..core.errors import TranslationError
from ..core.ms import Multiset
from ..core.nupn import NuPN, Variable
from ..core.petri import PetriNet


logger = logging.getLogger(__name__)

GEN_PREFIX = "@gen/"


def plain(part: object) -> str:
    """A name part without the reserved prefix, so generated names nest readably."""
    text = str(part)
    if text.startswith(GEN_PREFIX):
        return text[len(GEN_PREFIX):]
    return text.lstrip("@")


@dataclass(frozen=True)
class ProvenanceEntry:
    """Which gadget produced a generated element, and from which source element."""

    tag: str
    source: str = ""


@dataclass
class Translation:
    """A target net plus the maps relating source and target configurations.

    ``encode`` maps source configurations to target configurations. ``is_anchor``
    recognizes target configurations at the boundary of a simulation cycle and
    ``decode`` maps such configurations back (``None`` elsewhere).
    """

    kind: str
    source: Any
    target: Any
    encode: Callable[[Any], Any]
    provenance: Dict[str, ProvenanceEntry] = field(default_factory=dict)
    is_anchor: Optional[Callable[[Any], bool]] = None
    decode: Optional[Callable[[Any], Any]] = None

    def tag_counts(self) -> Dict[str, int]:
        """How many generated elements each gadget tag accounts for."""
        return dict(Counter(entry.tag for entry in self.provenance.values()))


class NameGen:
    """Generates reserved names and records their provenance."""

    def __init__(self, reserved: Iterable[str] = ()):
        self.reserved = set(reserved)
        self.provenance: Dict[str, ProvenanceEntry] = {}

    def name(self, tag: str, *parts: object, source: str = "", label: Optional[str] = None) -> str:
        base = label if label is not None else tag
        name = GEN_PREFIX + "/".join([base] + [plain(p) for p in parts])
        if name in self.reserved or name in self.provenance:
            raise TranslationError(f"Generated name collision: {name}")
        self.provenance[name] = ProvenanceEntry(tag, source)
        return name

    def tag(self, name: str, tag: str, source: str = ""):
        """Record provenance for an element whose name is not generated."""
        self.provenance[name] = ProvenanceEntry(tag, source)


class EosBuilder:
    """Accumulates a system net, its typing and its events."""

    def __init__(self, names: NameGen):
        self.names = names
        self.places: List[str] = []
        self.typing: Dict[str, str] = {}
        self.transitions: List[str] = []
        self.arcs: List[Tuple[str, str, int]] = []
        self.events: List[Event] = []

    def place(self, tag: str, *parts: object, net: str = BLACK, source: str = "",
              label: Optional[str] = None) -> str:
        name = self.names.name(tag, *parts, source=source, label=label)
        self.places.append(name)
        self.typing[name] = net
        return name

    def transition(self, tag: str, *parts: object, pre: Mapping[str, int] = (),
                   post: Mapping[str, int] = (), theta: Optional[Mapping[str, Mapping[str, int]]] = None,
                   source: str = "", label: Optional[str] = None) -> str:
        name = self.names.name(tag, *parts, source=source, label=label)
        self.transitions.append(name)
        self.arcs.extend((p, name, c) for p, c in dict(pre).items() if c)
        self.arcs.extend((name, p, c) for p, c in dict(post).items() if c)
        theta = {n: Multiset(dict(ts), n) for n, ts in (theta or {}).items() if ts}
        self.events.append(Event(name, theta))
        return name

    def build(self, name: str, objects: Iterable[PetriNet]) -> EOS:
        return make_eos(name, self.places, self.transitions, self.arcs, objects,
                        self.typing, self.events)


class NuBuilder:
    """Accumulates a channel net: places, variable arcs and transfer rows."""

    def __init__(self, names: NameGen, places: Iterable[str] = ()):
        self.names = names
        self.places: List[str] = list(places)
        self.transitions: List[str] = []
        self.arcs: List[Tuple[str, str, Multiset]] = []
        self.transfers: Dict[str, ChannelMatrix] = {}

    def place(self, tag: str, *parts: object, source: str = "", label: Optional[str] = None) -> str:
        name = self.names.name(tag, *parts, source=source, label=label)
        self.places.append(name)
        return name

    def transition(self, tag: str, *parts: object,
                   pre: Mapping[Variable, Mapping[str, int]] = (),
                   post: Mapping[Variable, Mapping[str, int]] = (),
                   transfers: Mapping[Cell, Cell] = (),
                   source: str = "", label: Optional[str] = None) -> str:
        """Add a transition given per-variable input and output vectors."""
        name = self.names.name(tag, *parts, source=source, label=label)
        self.transitions.append(name)
        for var, vector in dict(pre).items():
            for p, c in dict(vector).items():
                if c:
                    self.arcs.append((p, name, Multiset({var: c})))
        for var, vector in dict(post).items():
            for p, c in dict(vector).items():
                if c:
                    self.arcs.append((name, p, Multiset({var: c})))
        rows = {cell: (target,) for cell, target in dict(transfers).items() if cell != target}
        if rows:
            self.transfers[name] = ChannelMatrix(rows)
        return name

    def build(self, name: str) -> CNuPN:
        base = NuPN.build(name, self.places, self.transitions, self.arcs)
        return CNuPN(base, dict(self.transfers))


class Translator(ABC):
    """Base class for a construction from one formalism to another."""

    kind: str = ""

    def translate(self, source: Any) -> Translation:
        """Check the source, run the construction and log its size."""
        self.check_source(source)
        translation = self.build(source)
        logger.info(
            f"{self.kind}: generated {len(translation.provenance)} element(s) "
            f"across {len(translation.tag_counts())} gadget tag(s)"
        )
        return translation

    @abstractmethod
    def check_source(self, source: Any):
        """Raise a TranslationError subclass if the source is not acceptable."""
        pass

    @abstractmethod
    def build(self, source: Any) -> Translation:
        """Build the target net, encoder and provenance."""
        pass
