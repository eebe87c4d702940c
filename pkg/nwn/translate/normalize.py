"""Normal form and conservative closure of EOSs.

Normalization duplicates every transition that takes part in several events
and splits every synchronized transition that destroys a type into a
synchronized half that parks all objects on per-type ``inter`` places and an
autonomous half that distributes them. The closure then makes every
transition conservative by dumping destroyed objects on typed trash places.
"""

from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple
import logging

from ..core.eos import (
    BLACK, EOS, Event, NestedToken, destroy_set, events_of, is_idle, make_eos,
    normalization_problems, types_of,
)
from ..core.errors import InvalidSource, NotNormalized
from ..core.ms import Multiset
from ..core.petri import Arc, PetriNet
from .base import GEN_PREFIX, NameGen, Translation, Translator


logger = logging.getLogger(__name__)

ENABLE_NET = f"{GEN_PREFIX}enable"

__all__ = [
    "Normalizer", "ConservativeCloser", "normalization", "normalize_eos",
    "conservative_closure", "destroy_set", "rebuild",
]


def _user_arcs(eos: EOS, transitions: Iterable[str]) -> List[Arc]:
    system = eos.system
    arcs: List[Arc] = []
    for t in transitions:
        arcs.extend((p, t, c) for p, c in system.pre[t].items())
        arcs.extend((t, p, c) for p, c in system.post[t].items())
    return arcs


def rebuild(name: str, places: Sequence[str], transitions: Sequence[str],
            arcs: Iterable[Arc], objects: Iterable[PetriNet], typing: Mapping[str, str],
            events: Iterable[Event]) -> EOS:
    """Assemble an EOS from user-level parts; idle transitions are regenerated."""
    nets = [net for net in objects if net.name != BLACK]
    return make_eos(name, places, transitions, arcs, nets, typing, events)


def _strip(marking: Multiset, drop: Set[str]) -> Multiset:
    return marking.restrict(lambda tok: tok.place not in drop)


class Normalizer(Translator):
    """Rewrites an EOS into normal form."""

    kind = "normalize"

    def check_source(self, source: EOS):
        if not isinstance(source, EOS):
            raise InvalidSource("normalization needs an EOS")

    def build(self, source: EOS) -> Translation:
        eos = source
        names = NameGen(
            list(eos.system.places) + list(eos.system.transitions)
            + [n for net in eos.objects.values() for n in net.places + net.transitions]
        )
        system = eos.system
        places = list(system.places)
        typing = dict(eos.typing)
        transitions: List[str] = []
        arcs: List[Arc] = []
        events: List[Event] = []
        enable_places: List[str] = []

        copies: List[Tuple[str, str, Event]] = []
        for t in eos.user_transitions():
            indices = events_of(eos, t)
            if not indices:
                logger.warning(f"Transition {t} takes part in no event and is dropped")
                continue
            if len(indices) == 1:
                copies.append((t, t, eos.events[indices[0]]))
                continue
            for ordinal, index in enumerate(indices, start=1):
                copy = names.name("dup", t, ordinal, source=t)
                event = eos.events[index]
                copies.append((copy, t, Event(copy, dict(event.theta))))

        for name, original, event in copies:
            pre, post = system.pre[original], system.post[original]
            if event.is_autonomous() or not destroy_set(eos, original):
                transitions.append(name)
                arcs.extend((p, name, c) for p, c in pre.items())
                arcs.extend((name, p, c) for p, c in post.items())
                events.append(Event(name, dict(event.theta)))
                continue
            touched = sorted(types_of(eos, list(pre.support()) + list(post.support())))
            inter = {}
            for net_name in touched:
                place = names.name("inter", name, net_name, source=original)
                places.append(place)
                typing[place] = net_name
                inter[net_name] = place
            enable_pre = names.name("enable_pre", name, source=original)
            enable_post = names.name("enable_post", name, source=original)
            for place in (enable_pre, enable_post):
                places.append(place)
                typing[place] = ENABLE_NET
            enable_places.append(enable_pre)

            first = names.name("t_pre", name, source=original)
            second = names.name("t_post", name, source=original)
            transitions.extend([first, second])
            arcs.extend((p, first, c) for p, c in pre.items())
            arcs.append((enable_pre, first, 1))
            arcs.extend((first, place, 1) for place in inter.values())
            arcs.append((first, enable_post, 1))
            arcs.extend((place, second, 1) for place in inter.values())
            arcs.append((enable_post, second, 1))
            arcs.extend((second, p, c) for p, c in post.items())
            arcs.append((second, enable_pre, 1))
            events.append(Event(first, dict(event.theta)))
            events.append(Event(second, {}))
            logger.debug(f"Split {name} over {len(inter)} inter place(s)")

        events.extend(e for e in eos.events if is_idle(e.transition))
        objects = list(eos.objects.values())
        if enable_places:
            objects.append(PetriNet(ENABLE_NET, (), (), {}, {}))
        target = rebuild(eos.name, places, transitions, arcs, objects, typing, events)

        enable_tokens = Multiset.of(NestedToken(p, Multiset({}, ENABLE_NET)) for p in enable_places)
        generated = set(target.system.places) - set(system.places)

        def encode(marking: Multiset) -> Multiset:
            return marking + enable_tokens

        def is_anchor(marking: Multiset) -> bool:
            marked = {tok.place for tok in marking.support()}
            return all(p in marked for p in enable_places) and not any(
                tok.place in generated and tok.place not in enable_places for tok in marking.support())

        def decode(marking: Multiset) -> Optional[Multiset]:
            return _strip(marking, generated) if is_anchor(marking) else None

        return Translation(self.kind, eos, target, encode, names.provenance,
                           is_anchor=is_anchor, decode=decode)


class ConservativeCloser(Translator):
    """Adds typed trash places that absorb destroyed objects."""

    kind = "closure"

    def check_source(self, source: EOS):
        if not isinstance(source, EOS):
            raise InvalidSource("the closure needs an EOS")
        problems = normalization_problems(source)
        if problems:
            raise NotNormalized("; ".join(problems))

    def build(self, source: EOS) -> Translation:
        eos = source
        names = NameGen(list(eos.system.places) + list(eos.system.transitions))
        places = list(eos.system.places)
        typing = dict(eos.typing)
        trash: Dict[str, str] = {}
        for net_name in sorted(eos.objects):
            place = names.name("trash_N", net_name, source=net_name, label="trash")
            places.append(place)
            typing[place] = net_name
            trash[net_name] = place

        transitions = eos.user_transitions()
        arcs = _user_arcs(eos, transitions)
        for t in transitions:
            for net_name in sorted(destroy_set(eos, t)):
                arcs.append((t, trash[net_name], 1))
        target = rebuild(eos.name, places, transitions, arcs,
                         eos.objects.values(), typing, eos.events)
        dumps = set(trash.values())

        return Translation(
            self.kind, eos, target, lambda marking: marking, names.provenance,
            is_anchor=lambda marking: True, decode=lambda marking: _strip(marking, dumps),
        )


def normalization(eos: EOS) -> Translation:
    """Normalize ``eos``; the encoder marks the enable place of every split transition."""
    return Normalizer().translate(eos)


def normalize_eos(eos: EOS) -> EOS:
    """The normal form of ``eos``.

    Every non-idle transition ends up in exactly one event and every
    transition with a non-empty destroy set is system-autonomous. An EOS
    already in normal form comes back structurally identical.
    """
    if not normalization_problems(eos):
        return eos
    return normalization(eos).target


def conservative_closure(eos: EOS) -> Translation:
    """Add ``trash_N`` for every type and an arc to it per destroyed type.

    Raises:
        NotNormalized: If ``eos`` is not in normal form.
    """
    return ConservativeCloser().translate(eos)
