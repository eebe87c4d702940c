"""From conservative EOSs to channel νPNs.

Every nested token on a system place becomes one tuple holding its inner
marking on the block of that place plus one token on the place identity; a
control tuple carries the phase of the event being simulated and rests on
the init place between events. An event is
simulated one object type at a time:

* merging moves every consumed object of the type into a single tuple on the
  merged block,
* updating fires the synchronized object transitions from the merged block into the
  updated block, then moves whatever is left,
* distributing creates one identity tuple per produced token, hands tokens
  out one by one, and transfers the rest to the last produced token.
"""

from typing import Dict, List, Optional, Sequence, Tuple
import logging

from ..core.cnupn import Cell
from ..core.eos import EOS, NestedToken, normalization_problems, transition_is_conservative
from ..core.errors import InvalidSource, NotConservative, NotNormalized
from ..core.ms import Multiset, PlaceVector
from ..core.nupn import NuConfig, Variable, nu, x
from .base import NameGen, NuBuilder, Translation, Translator


logger = logging.getLogger(__name__)

CS = x(0)


class EventCompiler:
    """Compiles the events of a cEOS into a channel net."""

    def __init__(self, eos: EOS, names: NameGen):
        self.eos = eos
        self.names = names
        self.builder = NuBuilder(names)
        b = self.builder
        self.block: Dict[Tuple[str, str], str] = {}
        self.ident: Dict[str, str] = {}
        for p in eos.system.places:
            for q in self.inner_places(eos.type_of(p)):
                self.block[(p, q)] = b.place("p-block", p, q, source=p, label="blk")
            self.ident[p] = b.place("p-block", p, source=p, label="Id")
        self.merged: Dict[Tuple[str, str], str] = {}
        self.updated: Dict[Tuple[str, str], str] = {}
        self.ident_m: Dict[str, str] = {}
        self.ident_u: Dict[str, str] = {}
        for net_name in eos.objects:
            for q in self.inner_places(net_name):
                self.merged[(net_name, q)] = b.place("N-merged", net_name, q, source=net_name, label="merged")
                self.updated[(net_name, q)] = b.place("N-updated", net_name, q, source=net_name, label="updated")
            self.ident_m[net_name] = b.place("N-merged", net_name, source=net_name, label="Id^m")
            self.ident_u[net_name] = b.place("N-updated", net_name, source=net_name, label="Id^u")
        self.init = b.place("p^init", label="init")

    def inner_places(self, net_name: str) -> Tuple[str, ...]:
        return self.eos.object_net(net_name).places

    def phases(self, index: int) -> Optional[List[str]]:
        """Types of event ``index`` in object declaration order; ``None`` for a dead event."""
        event = self.eos.events[index]
        system = self.eos.system
        t = event.transition
        moved = {self.eos.type_of(p) for p in list(system.pre[t].support()) + list(system.post[t].support())}
        for net_name, theta in event.theta.items():
            if theta and net_name not in moved:
                return None
        return [n for n in self.eos.objects if n in moved]

    def compile_event(self, index: int):
        event = self.eos.events[index]
        phases = self.phases(index)
        if phases is None:
            logger.warning(f"Event {index} ({event}) needs objects its transition never carries; skipped")
            return
        if not phases:
            logger.debug(f"Event {index} moves no token and compiles to nothing")
            return
        key = f"e{index}"
        entry = self.init
        for k, net_name in enumerate(phases):
            if k + 1 < len(phases):
                exit_place = self.builder.place("handoff", key, k + 1, source=event.transition)
            else:
                exit_place = self.init
            self.compile_phase(index, key, net_name, entry, exit_place)
            entry = exit_place

    def _slots(self, places: Sequence[str], marking: Multiset, net_name: str) -> List[str]:
        return [p for p in places if self.eos.type_of(p) == net_name for _ in range(marking[p])]

    def compile_phase(self, index: int, key: str, net_name: str, entry: str, exit_place: str):
        eos, b = self.eos, self.builder
        event = eos.events[index]
        t = event.transition
        source = t
        places = eos.system.places
        inner = self.inner_places(net_name)
        inputs = self._slots(places, eos.system.pre[t], net_name)
        outputs = self._slots(places, eos.system.post[t], net_name)
        theta = event.theta_of(net_name)
        net = eos.object_net(net_name)

        def control(tag: str, *parts: object) -> str:
            return b.place(tag, key, net_name, *parts, source=source)

        merged_c = control("p_e^merged")
        select_c = control("p_e^select")
        fire_c = {u: control("p^fire_et", u) for u in theta.support()}
        fired_c = {u: control("p^fired_et", u) for u in theta.support()}
        fin_c = control("p_e^fin")
        new_c = control("p_e^new")
        move_c = [control("p_e^move", j) for j in range(1, len(outputs))]
        moving_c = [control("p_e^moving", j) for j in range(1, len(outputs))]
        rename_c = [control("p_e^rename", j) for j in range(1, len(outputs))]
        transfer_c = control("p_e^transfer")

        # merging
        pre: Dict[Variable, Dict[str, int]] = {CS: {entry: 1}}
        post: Dict[Variable, Dict[str, int]] = {CS: {merged_c: 1}}
        transfers: Dict[Cell, Cell] = {}
        if inputs:
            first = x(1)
            for i, p in enumerate(inputs, start=1):
                var = x(i)
                pre[var] = {self.ident[p]: 1}
                for q in inner:
                    transfers[(var, self.block[(p, q)])] = (first, self.merged[(net_name, q)])
            post[first] = {self.ident_m[net_name]: 1}
        else:
            post[nu(1)] = {self.ident_m[net_name]: 1}
        b.transition("merge", key, net_name, pre=pre, post=post, transfers=transfers,
                     source=source, label="merge")

        # updating
        b.transition("update-init", key, net_name, pre={CS: {merged_c: 1}},
                     post={CS: dict({select_c: 1}, **{fire_c[u]: c for u, c in theta.items()})},
                     source=source, label="init")
        obj = x(1)
        for u in theta.support():
            obj_pre = {self.merged[(net_name, q)]: c for q, c in net.pre_of(u).items()}
            obj_pre[self.ident_m[net_name]] = 1
            obj_post = {self.updated[(net_name, q)]: c for q, c in net.post_of(u).items()}
            obj_post[self.ident_m[net_name]] = 1
            b.transition("t_e", key, net_name, u, pre={CS: {fire_c[u]: 1}, obj: obj_pre},
                         post={CS: {fired_c[u]: 1}, obj: obj_post}, source=source, label="fire")
        b.transition(
            "update-fin", key, net_name,
            pre={CS: dict({select_c: 1}, **{fired_c[u]: c for u, c in theta.items()}),
                 obj: {self.ident_m[net_name]: 1}},
            post={CS: {fin_c: 1}, obj: {self.ident_u[net_name]: 1}},
            transfers={(obj, self.merged[(net_name, q)]): (obj, self.updated[(net_name, q)]) for q in inner},
            source=source, label="fin",
        )

        # distributing
        first_step = move_c[0] if move_c else transfer_c
        created: Dict[Variable, Dict[str, int]] = {CS: {first_step: 1}}
        created.update({nu(j): {new_c: 1} for j in range(1, len(outputs) + 1)})
        b.transition("e-id-creation", key, net_name, pre={CS: {fin_c: 1}}, post=created,
                     source=source, label="id")
        ident = x(2)
        for j, p in enumerate(outputs[:-1]):
            after = move_c[j + 1] if j + 1 < len(move_c) else transfer_c
            b.transition("e-move(i)", key, net_name, j + 1, pre={CS: {move_c[j]: 1}, obj: {new_c: 1}},
                         post={CS: {moving_c[j]: 1}, obj: {rename_c[j]: 1}}, source=source, label="sel")
            for q in inner:
                b.transition(
                    "e-move(i)", key, net_name, j + 1, q,
                    pre={obj: {self.updated[(net_name, q)]: 1, self.ident_u[net_name]: 1},
                         ident: {rename_c[j]: 1}},
                    post={obj: {self.ident_u[net_name]: 1},
                          ident: {rename_c[j]: 1, self.block[(p, q)]: 1}},
                    source=source, label="give",
                )
            b.transition("e-move(i)", key, net_name, j + 1, pre={CS: {moving_c[j]: 1}, obj: {rename_c[j]: 1}},
                         post={CS: {after: 1}, obj: {self.ident[p]: 1}}, source=source, label="moved")
        last = outputs[-1]
        b.transition(
            "e-transfer", key, net_name,
            pre={CS: {transfer_c: 1}, obj: {self.ident_u[net_name]: 1}, ident: {new_c: 1}},
            post={CS: {exit_place: 1}, ident: {self.ident[last]: 1}},
            transfers={(obj, self.updated[(net_name, q)]): (ident, self.block[(last, q)]) for q in inner},
            source=source, label="transfer",
        )

    def token_vector(self, token: NestedToken) -> PlaceVector:
        """The inner marking on the block of the token place, plus its identity token."""
        counts = {self.block[(token.place, q)]: c for q, c in token.marking.items()}
        counts[self.ident[token.place]] = 1
        return PlaceVector.from_multiset(Multiset(counts), self.builder.places)

    def encode(self, marking: Multiset) -> NuConfig:
        vectors = [self.token_vector(tok) for tok in marking.elements()]
        vectors.append(PlaceVector.from_multiset(Multiset({self.init: 1}), self.builder.places))
        return NuConfig.of(vectors)

    def is_anchor(self, config: NuConfig) -> bool:
        i = self.builder.places.index(self.init)
        return any(v[i] for v in config.tuples)

    def decode(self, config: NuConfig) -> Optional[Multiset]:
        """The nested marking of an anchor configuration, else ``None``."""
        places = self.builder.places
        owner = {name: p for p, name in self.ident.items()}
        inner = {name: (p, q) for (p, q), name in self.block.items()}
        tokens: List[NestedToken] = []
        control = 0
        for vector in config.tuples:
            counts = {places[i]: c for i, c in enumerate(vector.counts) if c}
            if not counts:
                continue
            if counts == {self.init: 1}:
                control += 1
                continue
            ids = [name for name in counts if name in owner]
            if len(ids) != 1 or counts[ids[0]] != 1:
                return None
            p = owner[ids[0]]
            marking: Dict[str, int] = {}
            for name, c in counts.items():
                if name == ids[0]:
                    continue
                if name not in inner or inner[name][0] != p:
                    return None
                marking[inner[name][1]] = c
            tokens.append(self.eos.token(p, marking))
        if control != 1:
            return None
        return Multiset.of(tokens)


class CeosToCnu(Translator):
    """The cEOS to c-νPN construction."""

    kind = "ceos2cnupn"

    def check_source(self, source: EOS):
        if not isinstance(source, EOS):
            raise InvalidSource("source is not an EOS")
        destroying = [t for t in source.user_transitions() if not transition_is_conservative(source, t)]
        if destroying:
            raise NotConservative(
                f"transition(s) {', '.join(destroying)} destroy an object type and would need a zero test")
        problems = normalization_problems(source)
        if problems:
            raise NotNormalized("; ".join(problems))

    def build(self, source: EOS) -> Translation:
        names = NameGen()
        compiler = EventCompiler(source, names)
        for index in range(len(source.events)):
            compiler.compile_event(index)
        target = compiler.builder.build(f"{source.name}.cnupn")
        return Translation(
            self.kind, source, target, compiler.encode, names.provenance,
            is_anchor=compiler.is_anchor, decode=compiler.decode,
        )


def ceos_to_cnupn(eos: EOS) -> Translation:
    """Compile a normalized cEOS into a channel νPN.

    Raises:
        NotConservative: If some transition destroys an object type.
        NotNormalized: If some transition takes part in several events.
    """
    return CeosToCnu().translate(eos)
