"""νPN syntax validation and firing with standard and fresh variables."""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple
import logging
import re

from .errors import ModeNotEnabled, UnknownTransition, ValidationError, Violation
from .ms import Multiset, PlaceVector


logger = logging.getLogger(__name__)

DEFAULT_MODE_CAP = 10 ** 6

_VARIABLE_RE = re.compile(r"^(x|nu)(\d+)$")


@dataclass(frozen=True)
class Variable:
    """A standard variable x_i or a fresh variable ν_i."""

    kind: str
    index: int

    @classmethod
    def parse(cls, text: str) -> "Variable":
        match = _VARIABLE_RE.match(text)
        if not match:
            raise ValueError(f"Not a variable name: '{text}'")
        return cls(match.group(1), int(match.group(2)))

    @property
    def is_fresh(self) -> bool:
        return self.kind == "nu"

    def sort_key(self) -> Tuple[bool, int]:
        return (self.is_fresh, self.index)

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"


def x(index: int) -> Variable:
    return Variable("x", index)


def nu(index: int) -> Variable:
    return Variable("nu", index)


VarArc = Tuple[str, str, Multiset]


class Enumeration(list):
    """A list of modes that remembers whether enumeration stopped at its cap."""

    def __init__(self, items: Iterable = (), truncated: bool = False):
        super().__init__(items)
        self.truncated = truncated


@dataclass(frozen=True)
class NuPN:
    """A νPN: places, transitions and variable-labelled arcs.

    ``pre[t][p]`` is the multiset of variables on the arc p -> t and
    ``post[t][p]`` the one on t -> p.
    """

    name: str
    places: Tuple[str, ...]
    transitions: Tuple[str, ...]
    pre: Dict[str, Dict[str, Multiset]] = field(default_factory=dict)
    post: Dict[str, Dict[str, Multiset]] = field(default_factory=dict)

    def __post_init__(self):
        index = {p: i for i, p in enumerate(self.places)}
        object.__setattr__(self, "_index", index)
        vectors: Dict[Tuple[str, str, Variable], PlaceVector] = {}
        for side, table in (("pre", self.pre), ("post", self.post)):
            for t, arcs in table.items():
                per_var: Dict[Variable, List[int]] = {}
                for p, label in arcs.items():
                    for var, count in label.items():
                        counts = per_var.setdefault(var, [0] * len(self.places))
                        counts[index[p]] += count
                for var, counts in per_var.items():
                    vectors[(side, t, var)] = PlaceVector(tuple(counts))
        object.__setattr__(self, "_vectors", vectors)

    @classmethod
    def build(cls, name: str, places: Iterable[str], transitions: Iterable[str],
              arcs: Iterable[VarArc] = ()) -> "NuPN":
        """Create a νPN from (source, target, variable multiset) arcs.

        Raises:
            ValidationError: If an arc references an undeclared node.
        """
        places = tuple(places)
        transitions = tuple(transitions)
        place_set, trans_set = set(places), set(transitions)
        pre: Dict[str, Dict[str, Multiset]] = {t: {} for t in transitions}
        post: Dict[str, Dict[str, Multiset]] = {t: {} for t in transitions}
        dangling = []
        for source, target, label in arcs:
            if source in place_set and target in trans_set:
                table, t, p = pre, target, source
            elif source in trans_set and target in place_set:
                table, t, p = post, source, target
            else:
                dangling.append(Violation("dangling-arc", f"{source}->{target}",
                                          "arc must connect a place and a transition"))
                continue
            table[t][p] = table[t].get(p, Multiset()) + label
        if dangling:
            raise ValidationError(dangling)
        return cls(name, places, transitions, pre, post)

    @property
    def dimension(self) -> int:
        return len(self.places)

    def place_index(self, place: str) -> int:
        return self._index[place]  # type: ignore[attr-defined]

    def _check(self, t: str):
        if t not in self.pre:
            raise UnknownTransition(t)

    def pre_label(self, t: str) -> Multiset:
        """pre(t): all variables on input arcs of ``t``."""
        self._check(t)
        total = Multiset()
        for label in self.pre[t].values():
            total = total + label
        return total

    def post_label(self, t: str) -> Multiset:
        self._check(t)
        total = Multiset()
        for label in self.post[t].values():
            total = total + label
        return total

    def variables(self, t: str) -> List[Variable]:
        """Var(t) in canonical order (standard variables first)."""
        found = set(self.pre_label(t).support()) | set(self.post_label(t).support())
        return sorted(found, key=lambda v: v.sort_key())

    def standard_vars(self, t: str) -> List[Variable]:
        """Standard variables on the arcs of ``t``."""
        return [v for v in self.variables(t) if not v.is_fresh]

    def fresh_vars(self, t: str) -> List[Variable]:
        """Fresh variables on the output arcs of ``t``."""
        return [v for v in self.variables(t) if v.is_fresh]

    def pre_vector(self, t: str, var: Variable) -> PlaceVector:
        """Tokens ``var`` takes from each place when ``t`` fires."""
        self._check(t)
        return self._vectors.get(("pre", t, var), PlaceVector.zero(self.dimension))  # type: ignore[attr-defined]

    def post_vector(self, t: str, var: Variable) -> PlaceVector:
        """Tokens ``t`` puts on each place through ``var``."""
        self._check(t)
        return self._vectors.get(("post", t, var), PlaceVector.zero(self.dimension))  # type: ignore[attr-defined]

    def arcs(self) -> List[VarArc]:
        result: List[VarArc] = []
        for t in self.transitions:
            for p in self.places:
                if p in self.pre[t] and self.pre[t][p]:
                    result.append((p, t, self.pre[t][p]))
            for p in self.places:
                if p in self.post[t] and self.post[t][p]:
                    result.append((t, p, self.post[t][p]))
        return result

    def vector(self, counts: Mapping[str, int]) -> PlaceVector:
        """A tuple of this net given as place counts."""
        return PlaceVector.from_multiset(Multiset(counts), self.places)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NuPN):
            return NotImplemented
        return (self.name, self.places, self.transitions, self.arcs()) == (
            other.name, other.places, other.transitions, other.arcs())

    def __hash__(self) -> int:
        return hash((self.name, self.places, self.transitions))


@dataclass(frozen=True)
class NuConfig:
    """A multiset of data tuples kept as a sorted tuple of vectors."""

    tuples: Tuple[PlaceVector, ...]

    @classmethod
    def of(cls, vectors: Iterable[PlaceVector]) -> "NuConfig":
        return cls(tuple(sorted(vectors, key=lambda v: v.counts)))

    def __len__(self) -> int:
        return len(self.tuples)

    def without_zero(self) -> "NuConfig":
        """Drop zero tuples, which no mode can ever bind."""
        return NuConfig(tuple(v for v in self.tuples if not v.is_zero()))

    def sort_key(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(v.counts for v in self.tuples)

    def __str__(self) -> str:
        return "{" + ", ".join(str(v) for v in self.tuples) + "}"


@dataclass(frozen=True)
class NuMode:
    """An injective assignment of standard variables to tuple instances."""

    assignment: Tuple[Tuple[Variable, int], ...]

    @classmethod
    def of(cls, mapping: Mapping[Variable, int]) -> "NuMode":
        return cls(tuple(sorted(mapping.items(), key=lambda kv: kv[0].sort_key())))

    def as_dict(self) -> Dict[Variable, int]:
        return dict(self.assignment)

    def __getitem__(self, var: Variable) -> int:
        return self.as_dict()[var]

    def __str__(self) -> str:
        return ", ".join(f"{var}->{index}" for var, index in self.assignment) or "∅"


def nupn_validate(net: NuPN) -> List[Violation]:
    """Check the syntactic conditions on every transition.

    Returns:
        Violations naming the transition and the failed condition; empty when valid.
    """
    violations: List[Violation] = []
    for t in net.transitions:
        pre = net.pre_label(t)
        post = net.post_label(t)
        for var in pre.support():
            if var.is_fresh:
                violations.append(Violation(
                    "fresh-in-pre", t, f"fresh variable {var} occurs on an input arc"))
        for var in post.support():
            if not var.is_fresh and var not in pre:
                violations.append(Violation(
                    "unbound-standard-out", t,
                    f"output variable {var} does not occur on any input arc"))
    return violations


def _check_dimension(net: NuPN, config: NuConfig):
    for vector in config.tuples:
        if len(vector) != net.dimension:
            raise ValidationError([Violation(
                "dimension", net.name,
                f"tuple {vector} has {len(vector)} entries, expected {net.dimension}")])


def _candidates(net: NuPN, config: NuConfig, t: str) -> List[Tuple[Variable, List[int]]]:
    result = []
    for var in net.standard_vars(t):
        need = net.pre_vector(t, var)
        result.append((var, [i for i, m in enumerate(config.tuples) if need <= m]))
    return result


def _strict_check(config: NuConfig, t: str, candidates: Sequence[Tuple[Variable, List[int]]]):
    values: Dict[PlaceVector, int] = {}
    for vector in config.tuples:
        values[vector] = values.get(vector, 0) + 1
    violations = []
    for vector, count in values.items():
        if count < 2:
            continue
        binders = [var for var, indices in candidates
                   if any(config.tuples[i] == vector for i in indices)]
        if len(binders) >= 2:
            violations.append(Violation(
                "duplicate-binding", t,
                f"variables {', '.join(map(str, binders))} may bind equal tuples {vector}"))
    if violations:
        raise ValidationError(violations)


def iter_modes(net: NuPN, config: NuConfig, t: str) -> Iterator[NuMode]:
    """Lazily enumerate modes of ``t`` in canonical order."""
    candidates = _candidates(net, config, t)

    def walk(position: int, used: Dict[Variable, int]) -> Iterator[NuMode]:
        if position == len(candidates):
            yield NuMode.of(used)
            return
        var, indices = candidates[position]
        taken = set(used.values())
        for index in indices:
            if index in taken:
                continue
            used[var] = index
            yield from walk(position + 1, used)
            del used[var]

    yield from walk(0, {})


def nupn_modes(net: NuPN, config: NuConfig, t: str, cap: int = DEFAULT_MODE_CAP,
               strict: bool = False) -> Enumeration:
    """Every injective assignment of the standard variables of ``t`` to tuple instances enabling ``t``.

    Args:
        net: A valid νPN.
        config: The current configuration.
        t: Transition id.
        cap: Maximum number of modes returned; the result is flagged as
            truncated when more exist.
        strict: Reject configurations where binding tuple instances rather
            than tuple values makes a difference.

    Raises:
        UnknownTransition: If ``t`` is not declared.
        ValidationError: In strict mode, for ambiguous duplicate tuples.
    """
    net._check(t)
    _check_dimension(net, config)
    if strict:
        _strict_check(config, t, _candidates(net, config, t))
    result = Enumeration()
    for mode in iter_modes(net, config, t):
        if len(result) >= cap:
            result.truncated = True
            logger.warning(f"Mode enumeration for {t} truncated at {cap}")
            break
        result.append(mode)
    logger.debug(f"{len(result)} mode(s) for {t}")
    return result


def check_mode(net: NuPN, config: NuConfig, t: str, mode: NuMode) -> Dict[Variable, int]:
    """Re-verify that ``mode`` enables ``t`` on ``config``.

    Raises:
        ModeNotEnabled: If the mode is not injective, misses variables or is not covered.
    """
    assignment = mode.as_dict()
    expected = net.standard_vars(t)
    if sorted(assignment, key=lambda v: v.sort_key()) != expected:
        raise ModeNotEnabled(t, "mode must bind exactly the standard variables")
    if len(set(assignment.values())) != len(assignment):
        raise ModeNotEnabled(t, "mode is not injective")
    for var, index in assignment.items():
        if not 0 <= index < len(config.tuples):
            raise ModeNotEnabled(t, f"{var} bound to missing tuple {index}")
        if not net.pre_vector(t, var) <= config.tuples[index]:
            raise ModeNotEnabled(t, f"tuple of {var} does not cover its input")
    return assignment


def fresh_tuples(net: NuPN, t: str) -> List[PlaceVector]:
    """One new tuple per fresh variable of ``t``."""
    return [net.post_vector(t, var) for var in net.fresh_vars(t)]


def nupn_fire(net: NuPN, config: NuConfig, t: str, mode: NuMode) -> NuConfig:
    """Fire ``t`` under ``mode``.

    Tuples not bound by the mode are kept unchanged; bound tuples lose their
    input vector and gain their output vector; every fresh variable adds a tuple.

    Raises:
        ModeNotEnabled: If the mode does not enable ``t``.
    """
    _check_dimension(net, config)
    assignment = check_mode(net, config, t, mode)
    bound = {index: var for var, index in assignment.items()}
    result: List[PlaceVector] = []
    for index, vector in enumerate(config.tuples):
        var = bound.get(index)
        if var is None:
            result.append(vector)
        else:
            result.append(vector - net.pre_vector(t, var) + net.post_vector(t, var))
    result.extend(fresh_tuples(net, t))
    fired = NuConfig.of(result)
    logger.debug(f"Fired {t} with {mode}: {config} -> {fired}")
    return fired
