"""Elementary object systems: nested markings, events, modes and the cover order."""

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple
import logging

from .errors import (
    ModeNotEnabled, UnknownEvent, UnknownObjectNet, UnknownTransition,
    ValidationError, Violation,
)
from .ms import BLACK_DOMAIN, Multiset, embeds, ms_choose
from .nupn import DEFAULT_MODE_CAP, Enumeration
from .petri import Arc, PetriNet, empty_net


logger = logging.getLogger(__name__)

BLACK = BLACK_DOMAIN
IDLE_PREFIX = "@id/"


def idle_name(place: str) -> str:
    return f"{IDLE_PREFIX}{place}"


def is_idle(transition: str) -> bool:
    return transition.startswith(IDLE_PREFIX)


@dataclass(frozen=True)
class Event:
    """A system transition synchronized with a multiset of object transitions per net."""

    transition: str
    theta: Dict[str, Multiset] = field(default_factory=dict)

    def theta_of(self, net: str) -> Multiset:
        return self.theta.get(net, Multiset())

    def is_autonomous(self) -> bool:
        return not any(self.theta.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Event):
            return NotImplemented
        mine = {n: m for n, m in self.theta.items() if m}
        theirs = {n: m for n, m in other.theta.items() if m}
        return self.transition == other.transition and mine == theirs

    def __hash__(self) -> int:
        return hash(self.transition)

    def __str__(self) -> str:
        parts = [str(m) for _, m in sorted(self.theta.items()) if m]
        return f"⟨{self.transition}, {{{' + '.join(parts)}}}⟩"


@dataclass(frozen=True)
class NestedToken:
    """A system place carrying an object-net marking."""

    place: str
    marking: Multiset

    def sort_key(self) -> Tuple:
        return (self.place, self.marking.sort_key())

    def __str__(self) -> str:
        return f"⟨{self.place},{self.marking}⟩"


@dataclass(frozen=True)
class EOS:
    """A two-level net: a system net whose tokens carry object-net markings."""

    name: str
    system: PetriNet
    objects: Dict[str, PetriNet]
    typing: Dict[str, str]
    events: Tuple[Event, ...]

    def type_of(self, place: str) -> str:
        return self.typing.get(place, BLACK)

    def object_net(self, name: str) -> PetriNet:
        if name not in self.objects:
            raise UnknownObjectNet(name)
        return self.objects[name]

    def event(self, index: int) -> Event:
        if not 0 <= index < len(self.events):
            raise UnknownEvent(index)
        return self.events[index]

    def user_transitions(self) -> List[str]:
        return [t for t in self.system.transitions if not is_idle(t)]

    def token(self, place: str, counts: Optional[Mapping[str, int]] = None) -> NestedToken:
        """A nested token on ``place`` whose inner marking has the given counts."""
        net = self.object_net(self.type_of(place))
        return NestedToken(place, net.marking(counts))

    def marking(self, tokens: Iterable[Tuple[str, Optional[Mapping[str, int]]]]) -> Multiset:
        """A nested marking from (place, inner counts) pairs."""
        return Multiset.of(self.token(p, counts) for p, counts in tokens)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EOS):
            return NotImplemented
        return (self.system, self.objects, self.typing, self.events) == (
            other.system, other.objects, other.typing, other.events)

    def __hash__(self) -> int:
        return hash(self.system)


def make_eos(name: str, places: Sequence[str], transitions: Sequence[str], arcs: Iterable[Arc],
             objects: Iterable[PetriNet], typing: Mapping[str, str],
             events: Iterable[Event]) -> EOS:
    """Assemble an EOS, adding the black net and one idle transition per system place.

    Places missing from ``typing`` carry black tokens.
    """
    places = tuple(places)
    idle = [idle_name(p) for p in places]
    idle_arcs = [arc for p in places for arc in ((p, idle_name(p), 1), (idle_name(p), p, 1))]
    system = PetriNet.build(name, places, tuple(transitions) + tuple(idle),
                            list(arcs) + idle_arcs)
    nets = {net.name: net for net in objects}
    nets.setdefault(BLACK, empty_net())
    full_typing = {p: typing.get(p, BLACK) for p in places}
    return EOS(name, system, nets, full_typing, tuple(events))


@dataclass
class EosReport:
    """Result of structural validation, with the per-transition conservativity verdict."""

    violations: List[Violation]
    conservative: bool
    destroying: List[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def types_of(eos: EOS, places: Iterable[str]) -> Set[str]:
    return {eos.type_of(p) for p in places}


def transition_is_conservative(eos: EOS, t: str) -> bool:
    """Every type consumed by ``t`` is produced again."""
    return types_of(eos, eos.system.pre_of(t).support()) <= types_of(
        eos, eos.system.post_of(t).support())


def eos_validate(eos: EOS) -> EosReport:
    """Structural checks on an EOS plus a conservativity verdict.

    Validation never raises; problems are returned as violations.
    """
    violations: List[Violation] = []
    system = eos.system
    if BLACK not in eos.objects or not eos.objects[BLACK].is_empty():
        violations.append(Violation("black-net", eos.name, "the black net must be present and empty"))

    for p in system.places:
        name = idle_name(p)
        if name not in system.pre:
            violations.append(Violation("idle-missing", p, "no idle transition for this place"))
            continue
        if system.pre[name] != Multiset({p: 1}) or system.post[name] != Multiset({p: 1}):
            violations.append(Violation("idle-flow", name, "idle transitions must loop once on their place"))
    for t in system.transitions:
        if is_idle(t) and t[len(IDLE_PREFIX):] not in system.places:
            violations.append(Violation("idle-flow", t, "idle transition of an unknown place"))

    owner: Dict[str, str] = {}
    nodes = [(n, eos.name) for n in system.places + system.transitions]
    for net_name, net in eos.objects.items():
        nodes.extend((n, net_name) for n in net.places + net.transitions)
    for node, where in nodes:
        if node in owner and owner[node] != where:
            violations.append(Violation("not-disjoint", node, f"shared by {owner[node]} and {where}"))
        owner.setdefault(node, where)

    for p in system.places:
        if eos.type_of(p) not in eos.objects:
            violations.append(Violation("unknown-type", p, f"typed by unknown net {eos.type_of(p)}"))

    for index, event in enumerate(eos.events):
        where = f"event {index} {event.transition}"
        if event.transition not in system.pre:
            violations.append(Violation("unknown-transition", where, "not a system transition"))
            continue
        for net_name, theta in event.theta.items():
            if net_name not in eos.objects:
                violations.append(Violation("unknown-type", where, f"unknown object net {net_name}"))
                continue
            for t in theta.support():
                if t not in eos.objects[net_name].pre:
                    violations.append(Violation("unknown-transition", where, f"{t} is not in {net_name}"))
        if is_idle(event.transition):
            place = event.transition[len(IDLE_PREFIX):]
            if not event.theta_of(eos.type_of(place)):
                violations.append(Violation(
                    "idle-empty-theta", where, "idle events must fire an object transition of the place's type"))

    destroying = [t for t in eos.user_transitions() if not transition_is_conservative(eos, t)]
    return EosReport(violations, not destroying, destroying)


def object_pre(eos: EOS, net_name: str, theta: Multiset) -> Multiset:
    """The summed input of a multiset of object transitions."""
    net = eos.object_net(net_name)
    total = Multiset({}, net.name)
    for t, count in theta.items():
        total = total + net.pre_of(t).scale(count)
    return total


def object_post(eos: EOS, net_name: str, theta: Multiset) -> Multiset:
    net = eos.object_net(net_name)
    total = Multiset({}, net.name)
    for t, count in theta.items():
        total = total + net.post_of(t).scale(count)
    return total


def project(eos: EOS, marking: Multiset, which: str = "system") -> Multiset:
    """The system places of a nested marking (``which='system'``), or the summed
    inner marking of the tokens of type ``which``.

    Raises:
        UnknownObjectNet: If ``which`` names no object net.
    """
    if which == "system":
        return Multiset(marking.map(lambda tok: tok.place).as_dict(), eos.system.name)
    net = eos.object_net(which)
    total = Multiset({}, net.name)
    for tok, count in marking.items():
        if eos.type_of(tok.place) == which:
            total = total + tok.marking.scale(count)
    return total


@dataclass(frozen=True)
class EventMode:
    """The nested tokens an event consumes and produces."""

    consumed: Multiset
    produced: Multiset

    def __str__(self) -> str:
        return f"consumed {self.consumed}; produced {self.produced}"


def _involved_types(eos: EOS, event: Event) -> List[str]:
    system = eos.system
    involved = types_of(eos, system.pre[event.transition].support())
    involved |= types_of(eos, system.post[event.transition].support())
    involved |= {n for n, m in event.theta.items() if m}
    return sorted(involved)


def mode_problem(eos: EOS, event: Event, consumed: Multiset, produced: Multiset) -> Optional[str]:
    """Why ``consumed``/``produced`` is not a mode of ``event``, or ``None``."""
    system = eos.system
    t = event.transition
    if project(eos, consumed) != system.pre[t]:
        return "consumed places differ from the transition preset"
    if project(eos, produced) != system.post[t]:
        return "produced places differ from the transition postset"
    for tok in list(consumed.support()) + list(produced.support()):
        places = eos.object_net(eos.type_of(tok.place)).places
        if any(q not in places for q in tok.marking.support()):
            return f"token {tok} carries places outside its type"
    for net_name in _involved_types(eos, event):
        pre = object_pre(eos, net_name, event.theta_of(net_name))
        inner = project(eos, consumed, net_name)
        if not pre <= inner:
            return f"consumed {net_name} objects do not cover the object preset"
        expected = inner - pre + object_post(eos, net_name, event.theta_of(net_name))
        if project(eos, produced, net_name) != expected:
            return f"produced {net_name} objects do not hold the updated marking"
    return None


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All ways to write ``total`` as an ordered sum of ``parts`` non-negative integers."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def _distributions(eos: EOS, net_name: str, amount: Multiset,
                   slots: Sequence[str]) -> Iterator[Tuple[Multiset, ...]]:
    """Every way to split ``amount`` over ``slots`` (one inner marking per slot)."""
    net = eos.object_net(net_name)
    if not slots:
        if not amount:
            yield ()
        return
    per_place = [(q, list(compositions(amount[q], len(slots)))) for q in amount.support()]
    for choice in product(*(options for _, options in per_place)):
        inner = [dict() for _ in slots]
        for (q, _), split in zip(per_place, choice):
            for i, count in enumerate(split):
                if count:
                    inner[i][q] = count
        yield tuple(Multiset(counts, net.name) for counts in inner)


def _consumptions(eos: EOS, event: Event, marking: Multiset) -> Iterator[Multiset]:
    pre = eos.system.pre[event.transition]
    choices = []
    for place, count in pre.items():
        here = marking.restrict(lambda tok, place=place: tok.place == place)
        options = list(ms_choose(here, count))
        if not options:
            return
        choices.append(options)
    for picked in product(*choices):
        total = Multiset()
        for part in picked:
            total = total + part
        yield total


def iter_event_modes(eos: EOS, index: int, marking: Multiset) -> Iterator[EventMode]:
    """Lazily enumerate the modes of event ``index`` on ``marking``.

    Consumed tokens range over the sub-multisets of the marking that match the
    system preset. For each type, the merged inner marking is updated by the
    synchronized object transitions and then distributed over the output
    slots of that type.
    """
    event = eos.event(index)
    system = eos.system
    slots = system.post[event.transition].elements()
    types = _involved_types(eos, event)
    slots_by_type = {n: [p for p in slots if eos.type_of(p) == n] for n in types}
    for consumed in _consumptions(eos, event, marking):
        totals = {}
        for net_name in types:
            pre = object_pre(eos, net_name, event.theta_of(net_name))
            inner = project(eos, consumed, net_name)
            if not pre <= inner:
                break
            totals[net_name] = inner - pre + object_post(eos, net_name, event.theta_of(net_name))
        else:
            per_type = [
                list(_distributions(eos, n, totals[n], slots_by_type[n])) for n in types
            ]
            seen: Set[Multiset] = set()
            for choice in product(*per_type):
                tokens = []
                for net_name, inner_markings in zip(types, choice):
                    tokens.extend(NestedToken(p, m) for p, m in zip(slots_by_type[net_name], inner_markings))
                produced = Multiset.of(tokens)
                if produced in seen:
                    continue
                seen.add(produced)
                yield EventMode(consumed, produced)


def event_modes(eos: EOS, index: int, marking: Multiset, cap: int = DEFAULT_MODE_CAP) -> Enumeration:
    """All modes of event ``index`` whose consumed tokens are in ``marking``.

    Raises:
        UnknownEvent: If ``index`` is not an event of ``eos``.
    """
    result = Enumeration()
    for mode in iter_event_modes(eos, index, marking):
        if len(result) >= cap:
            result.truncated = True
            logger.warning(f"Mode enumeration for event {index} truncated at {cap}")
            break
        result.append(mode)
    return result


def eos_fire(eos: EOS, marking: Multiset, index: int, mode: EventMode) -> Multiset:
    """Fire event ``index``: remove the consumed tokens and add the produced ones.

    Raises:
        UnknownEvent: If the event does not exist.
        ModeNotEnabled: If the consumed tokens are missing or ``mode`` does not
            fit the event.
    """
    event = eos.event(index)
    if not mode.consumed <= marking:
        raise ModeNotEnabled(event.transition, "consumed tokens are not in the marking")
    reason = mode_problem(eos, event, mode.consumed, mode.produced)
    if reason:
        raise ModeNotEnabled(event.transition, reason)
    result = marking - mode.consumed + mode.produced
    logger.debug(f"Fired {event} with {mode}")
    return result


def token_leq(a: NestedToken, b: NestedToken) -> bool:
    return a.place == b.place and a.marking <= b.marking


def leq_f(a: Multiset, b: Multiset) -> bool:
    """The coverability order: a's tokens embed injectively into b's.

    A token may only be matched to a token on the same place whose inner
    marking is at least as large.
    """
    return embeds(a.elements(), b.elements(), token_leq)


def lossy_successors(marking: Multiset) -> List[Multiset]:
    """Every marking one loss away: drop one inner token, or one whole nested token."""
    result: List[Multiset] = []
    seen: Set[Multiset] = set()
    for tok in marking.support():
        without = marking - Multiset({tok: 1})
        for q in tok.marking.support():
            shrunk = NestedToken(tok.place, tok.marking - Multiset({q: 1}))
            candidate = without + Multiset({shrunk: 1})
            if candidate not in seen:
                seen.add(candidate)
                result.append(candidate)
        if without not in seen:
            seen.add(without)
            result.append(without)
    return result


def destroy_set(eos: EOS, t: str) -> Set[str]:
    """Types consumed by ``t`` but never produced back.

    Raises:
        UnknownTransition: If ``t`` is not a system transition.
    """
    if t not in eos.system.pre:
        raise UnknownTransition(t)
    consumed = types_of(eos, eos.system.pre[t].support())
    produced = types_of(eos, eos.system.post[t].support())
    return consumed - produced


def events_of(eos: EOS, t: str) -> List[int]:
    return [i for i, e in enumerate(eos.events) if e.transition == t]


def normalization_problems(eos: EOS) -> List[str]:
    """Why ``eos`` is not in normal form; empty when it is.

    Normal form: every non-idle transition takes part in exactly one event,
    and every transition destroying a type takes part in an autonomous event.
    """
    problems = []
    for t in eos.user_transitions():
        indices = events_of(eos, t)
        if len(indices) != 1:
            problems.append(f"{t} takes part in {len(indices)} events")
        elif destroy_set(eos, t) and not eos.events[indices[0]].is_autonomous():
            problems.append(f"{t} destroys a type but is synchronized")
    return problems


def format_nested(marking: Multiset) -> str:
    if not marking:
        return "∅"
    return " + ".join(
        (str(tok) if count == 1 else f"{count}*{tok}") for tok, count in marking.items())


def validated(eos: EOS) -> EOS:
    """Return ``eos`` or raise ValidationError listing its violations."""
    report = eos_validate(eos)
    if not report.ok:
        raise ValidationError(report.violations)
    return eos
