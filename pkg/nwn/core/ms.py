"""Multisets, dense place vectors and the orders every formalism builds on."""

from dataclasses import dataclass
from typing import (
    Any, Callable, Dict, Hashable, Iterable, Iterator, List, Mapping, Optional,
    Sequence, Tuple,
)
import logging

import networkx as nx

from .errors import CountOverflow, DomainMismatch, MultisetError


logger = logging.getLogger(__name__)

MAX_COUNT = 2 ** 32 - 1
BLACK_DOMAIN = "@black"


def element_key(element: Any) -> Tuple[Any, ...]:
    """Return a total sort key for multiset elements of mixed kinds."""
    if isinstance(element, str):
        return (0, element)
    if isinstance(element, int):
        return (1, element)
    sort_key = getattr(element, "sort_key", None)
    if callable(sort_key):
        return (2, sort_key())
    if isinstance(element, tuple):
        return (3, tuple(element_key(part) for part in element))
    return (4, repr(element))


def _checked(element: Any, count: int) -> int:
    if not isinstance(count, int) or isinstance(count, bool):
        raise MultisetError(f"Count for '{element}' must be an integer, got {count!r}")
    if count < 0:
        raise MultisetError(f"Negative count {count} for '{element}'")
    if count > MAX_COUNT:
        raise CountOverflow(element, count)
    return count


class Multiset:
    """An immutable finite multiset carrying an optional domain tag.

    Two multisets are equal when their counts agree; the domain tag only
    guards against combining multisets that belong to different nets.
    """

    __slots__ = ("_counts", "domain", "_hash")

    def __init__(self, counts: Optional[Mapping[Hashable, int]] = None,
                 domain: Optional[str] = None):
        stored: Dict[Hashable, int] = {}
        for element, count in (counts or {}).items():
            if _checked(element, count):
                stored[element] = count
        self._counts = stored
        self.domain = domain
        self._hash: Optional[int] = None

    @classmethod
    def of(cls, elements: Iterable[Hashable], domain: Optional[str] = None) -> "Multiset":
        """Build a multiset from an iterable, counting repetitions."""
        counts: Dict[Hashable, int] = {}
        for element in elements:
            counts[element] = counts.get(element, 0) + 1
        return cls(counts, domain)

    @classmethod
    def epsilon(cls) -> "Multiset":
        """The empty multiset over the empty domain."""
        return cls({}, BLACK_DOMAIN)

    def __getitem__(self, element: Hashable) -> int:
        return self._counts.get(element, 0)

    def __contains__(self, element: object) -> bool:
        return element in self._counts

    def __len__(self) -> int:
        return sum(self._counts.values())

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self.support())

    def support(self) -> List[Hashable]:
        """Distinct elements in canonical order."""
        return sorted(self._counts, key=element_key)

    def items(self) -> List[Tuple[Hashable, int]]:
        return [(element, self._counts[element]) for element in self.support()]

    def elements(self) -> List[Hashable]:
        """Elements with repetition, in canonical order."""
        return [element for element, count in self.items() for _ in range(count)]

    def as_dict(self) -> Dict[Hashable, int]:
        return dict(self._counts)

    def _domain_with(self, other: "Multiset") -> Optional[str]:
        if self.domain is not None and other.domain is not None and self.domain != other.domain:
            raise DomainMismatch(self.domain, other.domain)
        return self.domain if self.domain is not None else other.domain

    def __add__(self, other: "Multiset") -> "Multiset":
        domain = self._domain_with(other)
        counts = dict(self._counts)
        for element, count in other._counts.items():
            counts[element] = counts.get(element, 0) + count
        return Multiset(counts, domain)

    def __sub__(self, other: "Multiset") -> "Multiset":
        domain = self._domain_with(other)
        counts = {
            element: count - other[element]
            for element, count in self._counts.items()
            if count > other[element]
        }
        return Multiset(counts, domain)

    def __le__(self, other: "Multiset") -> bool:
        self._domain_with(other)
        return all(count <= other[element] for element, count in self._counts.items())

    def __ge__(self, other: "Multiset") -> bool:
        return other <= self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._counts == other._counts

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def scale(self, factor: int) -> "Multiset":
        return Multiset({e: c * factor for e, c in self._counts.items()}, self.domain)

    def map(self, func: Callable[[Hashable], Hashable]) -> "Multiset":
        """Rename elements; counts of elements mapped together are summed."""
        counts: Dict[Hashable, int] = {}
        for element, count in self._counts.items():
            target = func(element)
            counts[target] = counts.get(target, 0) + count
        return Multiset(counts, self.domain)

    def restrict(self, keep: Callable[[Hashable], bool]) -> "Multiset":
        return Multiset({e: c for e, c in self._counts.items() if keep(e)}, self.domain)

    def sort_key(self) -> Tuple[Any, ...]:
        return tuple((element_key(e), c) for e, c in self.items())

    def __repr__(self) -> str:
        return f"Multiset({self})"

    def __str__(self) -> str:
        if not self._counts:
            return "ε" if self.domain == BLACK_DOMAIN else "0"
        parts = []
        for element, count in self.items():
            parts.append(str(element) if count == 1 else f"{count}*{element}")
        return " + ".join(parts)


def ms_combine(a: Multiset, b: Multiset, op: str) -> Multiset:
    """Pointwise sum ('add') or truncated difference ('sub') of two multisets."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    raise MultisetError(f"Unknown multiset operation: {op}")


def ms_leq(a: Multiset, b: Multiset) -> bool:
    """Multiset inclusion: every count of a is at most the count in b."""
    return a <= b


def ms_choose(ms: Multiset, size: int) -> Iterator[Multiset]:
    """Yield every sub-multiset of ``ms`` with exactly ``size`` elements.

    Sub-multisets are produced in canonical order (lexicographic over the
    sorted support, larger counts of earlier elements first).
    """
    items = ms.items()

    def walk(index: int, remaining: int, chosen: Dict[Hashable, int]) -> Iterator[Multiset]:
        if remaining == 0:
            yield Multiset(chosen, ms.domain)
            return
        if index == len(items):
            return
        element, count = items[index]
        rest = sum(c for _, c in items[index + 1:])
        for take in range(min(count, remaining), -1, -1):
            if remaining - take > rest:
                break
            if take:
                chosen[element] = take
            yield from walk(index + 1, remaining - take, chosen)
            chosen.pop(element, None)

    yield from walk(0, size, {})


def embeds(small: Sequence[Any], large: Sequence[Any],
           fits: Callable[[Any, Any], bool]) -> bool:
    """Whether every element of ``small`` maps injectively to one of ``large`` it fits under.

    Decided by maximum bipartite matching between the two instance lists.
    """
    if len(small) > len(large):
        return False
    if not small:
        return True
    graph = nx.Graph()
    left = [("s", i) for i in range(len(small))]
    graph.add_nodes_from(left, bipartite=0)
    graph.add_nodes_from((("l", j) for j in range(len(large))), bipartite=1)
    for i, item in enumerate(small):
        edges = [(("s", i), ("l", j)) for j, other in enumerate(large) if fits(item, other)]
        if not edges:
            return False
        graph.add_edges_from(edges)
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    return all(node in matching for node in left)


@dataclass(frozen=True)
class PlaceVector:
    """A dense non-negative vector indexed by an ordered place set."""

    counts: Tuple[int, ...]

    def __post_init__(self):
        for index, count in enumerate(self.counts):
            _checked(index, count)

    @classmethod
    def zero(cls, size: int) -> "PlaceVector":
        return cls((0,) * size)

    @classmethod
    def from_multiset(cls, ms: Multiset, places: Sequence[str]) -> "PlaceVector":
        index = {p: i for i, p in enumerate(places)}
        counts = [0] * len(places)
        for place, count in ms.items():
            if place not in index:
                raise MultisetError(f"Place '{place}' is outside the vector domain")
            counts[index[place]] = count
        return cls(tuple(counts))

    def to_multiset(self, places: Sequence[str], domain: Optional[str] = None) -> Multiset:
        return Multiset({places[i]: c for i, c in enumerate(self.counts) if c}, domain)

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, index: int) -> int:
        return self.counts[index]

    def _same_size(self, other: "PlaceVector"):
        if len(self.counts) != len(other.counts):
            raise MultisetError(
                f"Vector dimensions differ: {len(self.counts)} vs {len(other.counts)}"
            )

    def __add__(self, other: "PlaceVector") -> "PlaceVector":
        self._same_size(other)
        return PlaceVector(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __sub__(self, other: "PlaceVector") -> "PlaceVector":
        self._same_size(other)
        return PlaceVector(tuple(max(a - b, 0) for a, b in zip(self.counts, other.counts)))

    def __le__(self, other: "PlaceVector") -> bool:
        self._same_size(other)
        return all(a <= b for a, b in zip(self.counts, other.counts))

    def __ge__(self, other: "PlaceVector") -> bool:
        return other <= self

    def scale(self, factor: int) -> "PlaceVector":
        return PlaceVector(tuple(c * factor for c in self.counts))

    def project(self, index: int) -> "PlaceVector":
        """A copy keeping only the entry at ``index``."""
        return delta(index, len(self.counts)).scale(self.counts[index])

    def with_count(self, index: int, count: int) -> "PlaceVector":
        counts = list(self.counts)
        counts[index] = count
        return PlaceVector(tuple(counts))

    def pad(self, size: int) -> "PlaceVector":
        """Extend with zeros up to ``size`` entries."""
        return PlaceVector(self.counts + (0,) * (size - len(self.counts)))

    def total(self) -> int:
        return sum(self.counts)

    def is_zero(self) -> bool:
        return not any(self.counts)

    def sort_key(self) -> Tuple[int, ...]:
        return self.counts

    def __str__(self) -> str:
        return "⟨" + ",".join(str(c) for c in self.counts) + "⟩"


def delta(p: int, n: int) -> PlaceVector:
    """Unit vector of dimension ``n`` with a single 1 at index ``p``."""
    if not 0 <= p < n:
        raise MultisetError(f"Place index {p} out of range for dimension {n}")
    counts = [0] * n
    counts[p] = 1
    return PlaceVector(tuple(counts))
