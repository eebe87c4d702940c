"""Place/transition nets with multiset markings."""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple
import logging

from .errors import NotEnabled, UnknownTransition, ValidationError, Violation
from .ms import BLACK_DOMAIN, Multiset


logger = logging.getLogger(__name__)

Arc = Tuple[str, str, int]


@dataclass(frozen=True)
class PetriNet:
    """A net N = (P, T, F) with the flow kept as pre/post multisets per transition."""

    name: str
    places: Tuple[str, ...]
    transitions: Tuple[str, ...]
    pre: Dict[str, Multiset] = field(default_factory=dict)
    post: Dict[str, Multiset] = field(default_factory=dict)

    @classmethod
    def build(cls, name: str, places: Iterable[str], transitions: Iterable[str],
              arcs: Iterable[Arc] = ()) -> "PetriNet":
        """Create a net from (source, target, weight) arcs and validate it.

        Raises:
            ValidationError: If an arc references an undeclared node.
        """
        places = tuple(places)
        transitions = tuple(transitions)
        place_set, trans_set = set(places), set(transitions)
        pre: Dict[str, Dict[str, int]] = {t: {} for t in transitions}
        post: Dict[str, Dict[str, int]] = {t: {} for t in transitions}
        violations: List[Violation] = []
        for source, target, weight in arcs:
            if source in place_set and target in trans_set:
                pre[target][source] = pre[target].get(source, 0) + weight
            elif source in trans_set and target in place_set:
                post[source][target] = post[source].get(target, 0) + weight
            else:
                violations.append(Violation(
                    "dangling-arc", f"{source}->{target}",
                    "arc must connect a declared place and a declared transition",
                ))
        violations.extend(_duplicates(name, places, transitions))
        if violations:
            raise ValidationError(violations)
        return cls(
            name, places, transitions,
            {t: Multiset(pre[t], name) for t in transitions},
            {t: Multiset(post[t], name) for t in transitions},
        )

    def pre_of(self, t: str) -> Multiset:
        if t not in self.pre:
            raise UnknownTransition(t)
        return self.pre[t]

    def post_of(self, t: str) -> Multiset:
        if t not in self.post:
            raise UnknownTransition(t)
        return self.post[t]

    def flow(self, source: str, target: str) -> int:
        """F(source, target) for either arc direction."""
        if target in self.pre:
            return self.pre[target][source]
        if source in self.post:
            return self.post[source][target]
        return 0

    def arcs(self) -> List[Arc]:
        """All arcs with positive weight, inputs before outputs per transition."""
        result: List[Arc] = []
        for t in self.transitions:
            result.extend((p, t, c) for p, c in self.pre[t].items())
            result.extend((t, p, c) for p, c in self.post[t].items())
        return result

    def marking(self, counts: Optional[Mapping[str, int]] = None) -> Multiset:
        """A marking of this net tagged with its domain."""
        counts = dict(counts or {})
        unknown = [p for p in counts if p not in self.places]
        if unknown:
            raise ValidationError([Violation("unknown-place", p, "not a place of the net")
                                   for p in unknown])
        return Multiset(counts, self.name)

    def is_empty(self) -> bool:
        return not self.places and not self.transitions

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PetriNet):
            return NotImplemented
        return (self.name, self.places, self.transitions, self.pre, self.post) == (
            other.name, other.places, other.transitions, other.pre, other.post)

    def __hash__(self) -> int:
        return hash((self.name, self.places, self.transitions))


def _duplicates(name: str, places: Tuple[str, ...], transitions: Tuple[str, ...]) -> List[Violation]:
    seen = set()
    violations = []
    for node in places + transitions:
        if node in seen:
            violations.append(Violation("duplicate-node", f"{name}.{node}", "declared twice"))
        seen.add(node)
    return violations


def empty_net() -> PetriNet:
    """The special empty net ■ whose only marking is ε."""
    return PetriNet(BLACK_DOMAIN, (), (), {}, {})


def pn_enabled(net: PetriNet, m: Multiset, t: str) -> bool:
    return net.pre_of(t) <= m


def pn_fire(net: PetriNet, m: Multiset, t: str) -> Multiset:
    """Fire ``t`` on ``m``: m' = m - pre(t) + post(t).

    Raises:
        UnknownTransition: If ``t`` is not a transition of ``net``.
        NotEnabled: If ``pre(t)`` is not covered by ``m``.
    """
    pre = net.pre_of(t)
    if not pre <= m:
        raise NotEnabled(t)
    result = (m - pre) + net.post_of(t)
    logger.debug(f"Fired {t}: {m} -> {result}")
    return result


def pn_enabled_transitions(net: PetriNet, m: Multiset) -> List[str]:
    return [t for t in net.transitions if net.pre[t] <= m]
