"""Seeded random instances of every formalism.

Instances depend only on the seed and the size parameters; all randomness
comes from one ``random.Random(seed)``. Generated nets pass their
validators by construction.
"""

from dataclasses import dataclass
from random import Random
from typing import Any, Dict, List, Tuple
import logging

from .core.cnupn import CNuPN, ChannelMatrix, Cell
from .core.eos import EOS, Event, idle_name, make_eos
from .core.ms import Multiset, PlaceVector
from .core.nupn import NuConfig, NuPN, nu, x
from .core.petri import PetriNet


logger = logging.getLogger(__name__)

KINDS = ("pn", "nupn", "cnupn", "rnupn", "eos")


@dataclass(frozen=True)
class SizeParams:
    """Upper bounds on the size of a generated instance."""

    places: int = 3
    transitions: int = 2
    variables: int = 2
    tuples: int = 2
    max_count: int = 2
    objects: int = 1
    object_places: int = 2
    object_transitions: int = 1
    conservative: bool = False


@dataclass(frozen=True)
class Instance:
    """A generated net with its initial configuration."""

    kind: str
    seed: int
    net: Any
    init: Any


def _pick(rng: Random, items: List[str], low: int, high: int) -> List[str]:
    count = rng.randint(low, min(high, len(items)))
    return sorted(rng.sample(items, count), key=items.index)


def _random_pn(rng: Random, size: SizeParams) -> Tuple[PetriNet, Multiset]:
    places = [f"p{i}" for i in range(1, size.places + 1)]
    transitions = [f"t{i}" for i in range(1, size.transitions + 1)]
    arcs = []
    for t in transitions:
        for p in _pick(rng, places, 0, 2):
            arcs.append((p, t, rng.randint(1, size.max_count)))
        for p in _pick(rng, places, 0, 2):
            arcs.append((t, p, rng.randint(1, size.max_count)))
    net = PetriNet.build("random", places, transitions, arcs)
    init = net.marking({p: rng.randint(0, size.max_count) for p in places if rng.random() < 0.7})
    return net, init


def _variable_arcs(rng: Random, size: SizeParams, places: List[str],
                   transitions: List[str]) -> List[Tuple[str, str, Multiset]]:
    arcs = []
    for t in transitions:
        for i in range(1, rng.randint(1, size.variables) + 1):
            var = x(i)
            for p in _pick(rng, places, 1, 2):
                arcs.append((p, t, Multiset({var: rng.randint(1, size.max_count)})))
            for p in _pick(rng, places, 0, 1):
                arcs.append((t, p, Multiset({var: rng.randint(1, size.max_count)})))
        if rng.random() < 0.3:
            arcs.append((t, rng.choice(places), Multiset({nu(1): 1})))
    return arcs


def _random_config(rng: Random, size: SizeParams, places: List[str]) -> List[PlaceVector]:
    vectors = []
    for _ in range(rng.randint(1, size.tuples)):
        counts = [rng.randint(0, size.max_count) for _ in places]
        if not any(counts):
            counts[rng.randrange(len(places))] = 1
        vectors.append(PlaceVector(tuple(counts)))
    return vectors


def _random_nupn(rng: Random, size: SizeParams) -> Tuple[NuPN, NuConfig]:
    places = [f"p{i}" for i in range(1, size.places + 1)]
    transitions = [f"t{i}" for i in range(1, size.transitions + 1)]
    net = NuPN.build("random", places, transitions, _variable_arcs(rng, size, places, transitions))
    return net, NuConfig.of(_random_config(rng, size, places))


def _random_cnupn(rng: Random, size: SizeParams) -> Tuple[CNuPN, NuConfig]:
    base, init = _random_nupn(rng, size)
    transfers: Dict[str, ChannelMatrix] = {}
    for t in base.transitions:
        standard = base.standard_vars(t)
        rows: Dict[Cell, Tuple[Cell, ...]] = {}
        for _ in range(rng.randint(0, 2)):
            source = (rng.choice(standard), rng.choice(base.places))
            target = (rng.choice(standard), rng.choice(base.places))
            if source != target and source not in rows:
                rows[source] = (target,)
        if rows:
            transfers[t] = ChannelMatrix(rows)
    return CNuPN(base, transfers), init


def _random_rnupn(rng: Random, size: SizeParams) -> Tuple[CNuPN, NuConfig]:
    data = [f"p{i}" for i in range(1, size.places + 1)]
    control = ["c.ready", "c.done", "k.from", "k.to"]
    places = data + control
    transitions = [f"t{i}" for i in range(1, size.transitions + 1)]
    arcs = _variable_arcs(rng, size, data, transitions)
    special = "s1"
    r1, r2 = rng.choice(data), rng.choice(data)
    arcs += [
        ("c.ready", special, Multiset({x(0): 1})),
        (special, "c.done", Multiset({x(0): 1})),
        ("k.from", special, Multiset({x(1): 1})),
        (special, "k.from", Multiset({x(1): 1})),
        ("k.to", special, Multiset({x(2): 1})),
        (special, "k.to", Multiset({x(2): 1})),
    ]
    base = NuPN.build("random", places, transitions + [special], arcs)
    net = CNuPN(base, {special: ChannelMatrix({(x(1), r1): ((x(2), r2),)})})
    vectors = [v.pad(len(places)) for v in _random_config(rng, size, data)]
    for marker in ("c.ready", "k.from", "k.to"):
        counts = [rng.randint(0, size.max_count) for _ in data] + [0] * len(control)
        counts[places.index(marker)] = 1
        vectors.append(PlaceVector(tuple(counts)))
    return net, NuConfig.of(vectors)


def _random_object(rng: Random, size: SizeParams, name: str) -> PetriNet:
    places = [f"{name}.q{i}" for i in range(1, size.object_places + 1)]
    transitions = [f"{name}.u{i}" for i in range(1, size.object_transitions + 1)]
    arcs = []
    for t in transitions:
        arcs.extend((p, t, 1) for p in _pick(rng, places, 0, 1))
        arcs.extend((t, p, 1) for p in _pick(rng, places, 0, 1))
    return PetriNet.build(name, places, transitions, arcs)


def _random_eos(rng: Random, size: SizeParams) -> Tuple[EOS, Multiset]:
    objects = [_random_object(rng, size, f"N{i}") for i in range(1, size.objects + 1)]
    types = [net.name for net in objects] + ["@black"]
    places = [f"s{i}" for i in range(1, size.places + 1)]
    typing = {p: rng.choice(types) for p in places}
    transitions = [f"t{i}" for i in range(1, size.transitions + 1)]
    by_name = {net.name: net for net in objects}
    arcs = []
    events = []
    for t in transitions:
        inputs = _pick(rng, places, 1, 2)
        outputs = _pick(rng, places, 0, 2)
        if size.conservative:
            for p in inputs:
                if not any(typing[o] == typing[p] for o in outputs):
                    outputs.append(p)
        arcs.extend((p, t, 1) for p in inputs)
        arcs.extend((t, p, 1) for p in outputs)
        consumed = {typing[p] for p in inputs}
        produced = {typing[p] for p in outputs}
        theta: Dict[str, Multiset] = {}
        if consumed <= produced:
            for net_name in sorted((consumed & produced) - {"@black"}):
                net = by_name[net_name]
                if net.transitions and rng.random() < 0.5:
                    theta[net_name] = Multiset({rng.choice(list(net.transitions)): 1}, net_name)
        events.append(Event(t, theta))
    for p in places:
        net = by_name.get(typing[p])
        if net is not None and net.transitions and rng.random() < 0.3:
            events.append(Event(idle_name(p), {net.name: Multiset({rng.choice(list(net.transitions)): 1}, net.name)}))
    eos = make_eos("random", places, transitions, arcs, objects, typing, events)
    tokens = []
    for p in places:
        for _ in range(rng.randint(0, 1)):
            inner = eos.object_net(eos.type_of(p)).places
            tokens.append(eos.token(p, {q: rng.randint(0, size.max_count) for q in inner if rng.random() < 0.5}))
    return eos, Multiset.of(tokens)


_GENERATORS = {
    "pn": _random_pn,
    "nupn": _random_nupn,
    "cnupn": _random_cnupn,
    "rnupn": _random_rnupn,
    "eos": _random_eos,
}


def random_instance(kind: str, seed: int, size: SizeParams = SizeParams()) -> Instance:
    """Generate a net of ``kind`` with an initial configuration.

    Args:
        kind: One of ``pn``, ``nupn``, ``cnupn``, ``rnupn``, ``eos``.
        seed: Seed of the only random source used.
        size: Size bounds; ``size.conservative`` forces EOS transitions to
            reproduce every consumed type.

    Raises:
        ValueError: If ``kind`` is unknown.
    """
    if kind not in _GENERATORS:
        raise ValueError(f"Unknown formalism '{kind}', expected one of {', '.join(KINDS)}")
    rng = Random(seed)
    net, init = _GENERATORS[kind](rng, size)
    logger.debug(f"Generated {kind} instance for seed {seed}")
    return Instance(kind, seed, net, init)
