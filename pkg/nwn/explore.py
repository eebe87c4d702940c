"""Bounded forward search, coverability, replay and module cycles over any formalism.

Every formalism is wrapped in a :class:`System` that enumerates labelled
successors in a fixed order. Searches are breadth first with a visited set
keyed by the canonical state form, so witness traces are shortest within
the explored bounds.
"""

from abc import ABC, abstractmethod
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterator, List, Optional, Sequence, Tuple, Union
import logging
import time

from .core.cnupn import CNuPN, RnuMeta, cnupn_fire, rnupn_fire_direct
from .core.eos import (
    EOS, NestedToken, destroy_set, eos_fire, event_modes, leq_f, lossy_successors,
)
from .core.errors import OrderUnavailable, StepNotEnabled
from .core.ms import Multiset, embeds
from .core.nupn import DEFAULT_MODE_CAP, NuConfig, NuPN, nupn_fire, nupn_modes
from .core.petri import PetriNet, pn_fire


logger = logging.getLogger(__name__)

LOSS = "~loss"


@dataclass(frozen=True)
class Limits:
    """Bounds applied to every search."""

    max_depth: int = 64
    max_states: int = 200000
    max_tokens: int = 64
    max_modes: int = DEFAULT_MODE_CAP
    budget_ms: int = 60000
    jobs: int = 1

    def __post_init__(self):
        for name in ("max_depth", "max_states", "max_tokens", "max_modes", "budget_ms", "jobs"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"Limit {name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class Step:
    """A successor label: transition or event name plus the index of its mode."""

    name: str
    mode: int = 0

    def __str__(self) -> str:
        return f"{self.name}#{self.mode}"

    @classmethod
    def parse(cls, text: str) -> "Step":
        name, sep, mode = text.strip().rpartition("#")
        if not sep or not name or not mode.isdigit():
            raise ValueError(f"Malformed step label: '{text}'")
        return cls(name, int(mode))


class System(ABC):
    """Uniform stepper over the states of one net."""

    def __init__(self, limits: Optional[Limits] = None):
        self.limits = limits or Limits()
        self.truncated = False

    @abstractmethod
    def successors(self, state: Any) -> Iterator[Tuple[Step, Any]]:
        """Firing successors in a deterministic order."""
        pass

    def lossy_steps(self, state: Any) -> List[Any]:
        """States one loss below ``state``."""
        raise OrderUnavailable(f"{type(self).__name__} has no loss steps")

    def covers(self, target: Any, state: Any) -> bool:
        """Whether ``target`` is below ``state`` in the cover order."""
        raise OrderUnavailable(f"{type(self).__name__} has no cover order")

    def canonical(self, state: Any) -> Hashable:
        return state

    @abstractmethod
    def size(self, state: Any) -> int:
        """Number of tokens in ``state``, inner tokens included."""
        pass

    def expand(self, state: Any, lossy: bool = False) -> List[Tuple[Step, Any]]:
        result = list(self.successors(state))
        if lossy:
            result.extend((Step(LOSS, i), s) for i, s in enumerate(self.lossy_steps(state)))
        return result

    def _note(self, modes: List) -> List:
        if getattr(modes, "truncated", False):
            self.truncated = True
        return modes


class PnSystem(System):
    """A Petri net over multiset markings."""

    def __init__(self, net: PetriNet, limits: Optional[Limits] = None):
        super().__init__(limits)
        self.net = net

    def successors(self, state: Multiset) -> Iterator[Tuple[Step, Multiset]]:
        for t in self.net.transitions:
            if self.net.pre[t] <= state:
                yield Step(t), pn_fire(self.net, state, t)

    def lossy_steps(self, state: Multiset) -> List[Multiset]:
        return [state - Multiset({p: 1}) for p in state.support()]

    def covers(self, target: Multiset, state: Multiset) -> bool:
        return target <= state

    def size(self, state: Multiset) -> int:
        return len(state)


class NuSystem(System):
    """A νPN, channel νPN or r-νPN over tuple configurations.

    Zero tuples are dropped from every successor; they can never be bound.
    With ``direct`` set, special transitions fire through the closed-form
    rename rule instead of the transfer matrices.
    """

    def __init__(self, net: Union[NuPN, CNuPN], limits: Optional[Limits] = None,
                 direct: Optional[RnuMeta] = None, strict: bool = False):
        super().__init__(limits)
        self.net = net if isinstance(net, CNuPN) else CNuPN(net, {})
        self.direct = direct
        self.strict = strict

    def canonical(self, state: NuConfig) -> Hashable:
        return state.without_zero()

    def successors(self, state: NuConfig) -> Iterator[Tuple[Step, NuConfig]]:
        base = self.net.base
        for t in base.transitions:
            modes = self._note(nupn_modes(base, state, t, cap=self.limits.max_modes, strict=self.strict))
            for i, mode in enumerate(modes):
                if self.direct is not None and self.direct.is_special(t):
                    fired = rnupn_fire_direct(self.net, self.direct, state, t, mode)
                elif t in self.net.transfers:
                    fired = cnupn_fire(self.net, state, t, mode)
                else:
                    fired = nupn_fire(base, state, t, mode)
                yield Step(t, i), fired.without_zero()

    def lossy_steps(self, state: NuConfig) -> List[NuConfig]:
        result = []
        seen = set()
        for i, vector in enumerate(state.tuples):
            for p, count in enumerate(vector.counts):
                if not count:
                    continue
                rest = list(state.tuples[:i] + state.tuples[i + 1:])
                candidate = NuConfig.of(rest + [vector.with_count(p, count - 1)]).without_zero()
                if candidate not in seen:
                    seen.add(candidate)
                    result.append(candidate)
        return result

    def covers(self, target: NuConfig, state: NuConfig) -> bool:
        """Tuple embedding: each target tuple sits below a distinct state tuple."""
        return embeds(target.without_zero().tuples, state.tuples, lambda a, b: a <= b)

    def size(self, state: NuConfig) -> int:
        return sum(v.total() for v in state.tuples)


class EosSystem(System):
    """An EOS over nested markings, with optional loss steps.

    The lazy loss mode only drops inner tokens of objects sitting on a place
    that feeds a transition destroying their type, which is where losing
    tokens can enable a step; the exhaustive mode drops any inner or nested
    token.
    """

    def __init__(self, eos: EOS, limits: Optional[Limits] = None, exhaustive_loss: bool = False):
        super().__init__(limits)
        self.eos = eos
        self.exhaustive_loss = exhaustive_loss
        self.doomed = {
            p for t in eos.user_transitions() for p in eos.system.pre[t].support()
            if eos.type_of(p) in destroy_set(eos, t)
        }

    def successors(self, state: Multiset) -> Iterator[Tuple[Step, Multiset]]:
        for index, event in enumerate(self.eos.events):
            modes = self._note(event_modes(self.eos, index, state, cap=self.limits.max_modes))
            for i, mode in enumerate(modes):
                yield Step(f"{index}:{event.transition}", i), eos_fire(self.eos, state, index, mode)

    def lossy_steps(self, state: Multiset) -> List[Multiset]:
        if self.exhaustive_loss:
            return lossy_successors(state)
        result = []
        for tok in state.support():
            if tok.place not in self.doomed:
                continue
            without = state - Multiset({tok: 1})
            for q in tok.marking.support():
                shrunk = NestedToken(tok.place, tok.marking - Multiset({q: 1}))
                result.append(without + Multiset({shrunk: 1}))
        return result

    def covers(self, target: Multiset, state: Multiset) -> bool:
        return leq_f(target, state)

    def size(self, state: Multiset) -> int:
        return sum(count * (1 + len(tok.marking)) for tok, count in state.items())


@dataclass
class Verdict:
    """Outcome of a bounded search.

    ``covered`` verdicts carry a replayable trace. ``not_found`` verdicts are
    definitive only when ``exhausted`` is set, which requires that no bound
    cut the search. A state dropped for exceeding ``max_tokens`` counts as a
    cut: the verdict then reports ``boundary="tokens"`` and stays inconclusive.
    """

    outcome: str
    depth: Optional[int] = None
    trace: List[str] = field(default_factory=list)
    exhausted: bool = False
    boundary: Optional[str] = None
    states: int = 0
    millis: int = 0
    message: str = ""

    @property
    def covered(self) -> bool:
        return self.outcome == "covered"

    @property
    def definitive(self) -> bool:
        return self.covered or (self.outcome == "not_found" and self.exhausted)

    def to_dict(self, timing: bool = False) -> Dict[str, Any]:
        """Plain data; wall-clock time is included only with ``timing``."""
        data = {
            "outcome": self.outcome,
            "depth": self.depth,
            "trace": list(self.trace),
            "exhausted": self.exhausted,
            "boundary": self.boundary,
            "states": self.states,
            "message": self.message,
        }
        if timing:
            data["millis"] = self.millis
        return data


def _elapsed_ms(start: float) -> int:
    return int((time.monotonic() - start) * 1000)


def _trace(parents: Dict[Hashable, Tuple[Optional[Hashable], Optional[str]]], key: Hashable) -> List[str]:
    labels: List[str] = []
    while True:
        parent, label = parents[key]
        if parent is None:
            break
        labels.append(label)
        key = parent
    return list(reversed(labels))


def bounded_search(sys: System, init: Any, goal: Callable[[Any], bool],
                   limits: Optional[Limits] = None, lossy: bool = False) -> Verdict:
    """Breadth-first search for a state satisfying ``goal``.

    Args:
        sys: The system to explore.
        init: Initial state.
        goal: Predicate on states.
        limits: Search bounds; defaults to the system's limits.
        lossy: Interleave loss steps with firing steps.

    Returns:
        A Verdict. Bounds and budget exhaustion are reported in the verdict,
        never raised.
    """
    limits = limits or sys.limits
    start = time.monotonic()
    sys.truncated = False
    try:
        root = sys.canonical(init)
        parents: Dict[Hashable, Tuple[Optional[Hashable], Optional[str]]] = {root: (None, None)}
        if goal(root):
            return Verdict("covered", 0, [], states=1, millis=_elapsed_ms(start))
        frontier: List[Any] = [root]
        boundary: Optional[str] = None
        depth = 0
        executor = ThreadPoolExecutor(max_workers=limits.jobs) if limits.jobs > 1 else None
        try:
            while frontier:
                if depth >= limits.max_depth:
                    boundary = "depth"
                    break
                if executor is not None:
                    expanded = list(executor.map(lambda s: sys.expand(s, lossy), frontier))
                else:
                    expanded = [sys.expand(s, lossy) for s in frontier]
                next_frontier: List[Any] = []
                for state, steps in zip(frontier, expanded):
                    parent = sys.canonical(state)
                    for step, successor in steps:
                        if _elapsed_ms(start) > limits.budget_ms:
                            return Verdict("not_found", boundary="budget", states=len(parents),
                                           millis=_elapsed_ms(start))
                        key = sys.canonical(successor)
                        if key in parents:
                            continue
                        if sys.size(key) > limits.max_tokens:
                            boundary = boundary or "tokens"
                            continue
                        if len(parents) >= limits.max_states:
                            return Verdict("not_found", boundary="states", states=len(parents),
                                           millis=_elapsed_ms(start))
                        parents[key] = (parent, str(step))
                        if goal(key):
                            trace = _trace(parents, key)
                            return _certified(sys, init, goal, trace, len(parents), start)
                        next_frontier.append(key)
                frontier = next_frontier
                depth += 1
                logger.debug(f"Depth {depth}: {len(frontier)} new state(s), {len(parents)} total")
        finally:
            if executor is not None:
                executor.shutdown()
        if sys.truncated:
            boundary = boundary or "modes"
        exhausted = boundary is None
        logger.info(f"Search finished without a goal state: {len(parents)} state(s), "
                    f"{'exhausted' if exhausted else 'bounded by ' + str(boundary)}")
        return Verdict("not_found", exhausted=exhausted, boundary=boundary,
                       states=len(parents), millis=_elapsed_ms(start))
    except OrderUnavailable:
        raise
    except Exception as e:
        logger.error(f"Search failed: {e}")
        return Verdict("error", message=str(e), millis=_elapsed_ms(start))


def _certified(sys: System, init: Any, goal: Callable[[Any], bool], trace: List[str],
               states: int, start: float) -> Verdict:
    final = replay(sys, init, trace)
    if not goal(final):
        return Verdict("error", message="witness trace does not reach a goal state",
                       states=states, millis=_elapsed_ms(start))
    logger.info(f"Goal reached at depth {len(trace)} after {states} state(s)")
    return Verdict("covered", len(trace), trace, states=states, millis=_elapsed_ms(start))


def coverability(sys: System, init: Any, target: Any, lossy: bool = False,
                 limits: Optional[Limits] = None) -> Verdict:
    """Search for a state above ``target`` in the system's cover order.

    Raises:
        OrderUnavailable: If the system has no cover order (or no loss steps
            when ``lossy`` is set).
    """
    sys.covers(target, sys.canonical(init))
    if lossy:
        sys.lossy_steps(sys.canonical(init))
    return bounded_search(sys, init, lambda state: sys.covers(target, state), limits, lossy=lossy)


def replay(sys: System, init: Any, trace: Sequence[Union[str, Step]]) -> Any:
    """Fold ``trace`` over ``init``.

    Raises:
        StepNotEnabled: At the first label that names no successor.
    """
    state = sys.canonical(init)
    for index, label in enumerate(trace):
        text = str(label)
        lossy = text.startswith(LOSS + "#")
        for step, successor in sys.expand(state, lossy):
            if str(step) == text:
                state = sys.canonical(successor)
                break
        else:
            raise StepNotEnabled(index, text)
    return state


@dataclass
class Cycles:
    """Anchor states reachable through non-anchor states, with one trace each."""

    anchors: Dict[Hashable, List[str]] = field(default_factory=dict)
    exhausted: bool = True


def module_cycles(sys: System, init: Any, is_anchor: Callable[[Any], bool],
                  limits: Optional[Limits] = None) -> Cycles:
    """Explore from ``init`` without expanding anchor states.

    Every anchor reached is recorded together with a shortest trace. The
    exploration is sequential and ignores ``limits.jobs``.
    """
    limits = limits or sys.limits
    start = time.monotonic()
    sys.truncated = False
    root = sys.canonical(init)
    parents: Dict[Hashable, Tuple[Optional[Hashable], Optional[str]]] = {root: (None, None)}
    queue = deque([(root, 0)])
    result = Cycles()
    while queue:
        state, depth = queue.popleft()
        if depth >= limits.max_depth or _elapsed_ms(start) > limits.budget_ms:
            result.exhausted = False
            continue
        for step, successor in sys.expand(state):
            key = sys.canonical(successor)
            if key in parents:
                if is_anchor(key) and key not in result.anchors and key == root:
                    result.anchors[key] = _trace(parents, state) + [str(step)]
                continue
            if len(parents) >= limits.max_states or sys.size(key) > limits.max_tokens:
                result.exhausted = False
                continue
            parents[key] = (state, str(step))
            if is_anchor(key):
                result.anchors[key] = _trace(parents, key)
            else:
                queue.append((key, depth + 1))
    if sys.truncated:
        result.exhausted = False
    logger.debug(f"Module cycles: {len(result.anchors)} anchor(s) over {len(parents)} state(s)")
    return result


def system_for(net: Any, limits: Optional[Limits] = None, **options) -> System:
    """Wrap a net of any formalism in its System adapter."""
    if isinstance(net, PetriNet):
        return PnSystem(net, limits)
    if isinstance(net, (NuPN, CNuPN)):
        return NuSystem(net, limits, **options)
    if isinstance(net, EOS):
        return EosSystem(net, limits, **options)
    raise TypeError(f"No system adapter for {type(net).__name__}")


__all__ = [
    "Limits", "Step", "System", "PnSystem", "NuSystem", "EosSystem", "Verdict", "Cycles",
    "bounded_search", "coverability", "replay", "module_cycles", "system_for",
]
