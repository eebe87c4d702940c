"""From νPNs to conservative EOSs.

Every tuple of the νPN becomes an object of the net N_D sitting on ``sim``.
A transition is simulated by a chain that first selects one object per
standard variable (and reserves a slot per fresh variable), then fires one
N_D transition per variable, and finally hands the control token back to
``selectTran``. Between two visits of ``selectTran`` exactly one source
transition has been simulated.
"""

from typing import Dict, List, Optional, Tuple, Union
import logging

from ..core.cnupn import CNuPN
from ..core.eos import NestedToken
from ..core.errors import InvalidSource
from ..core.ms import Multiset, PlaceVector
from ..core.nupn import NuConfig, NuPN, nupn_validate
from ..core.petri import PetriNet
from .base import EosBuilder, NameGen, Translation, Translator


logger = logging.getLogger(__name__)


def _counts(net: NuPN, vector: PlaceVector) -> Dict[str, int]:
    return {net.places[i]: c for i, c in enumerate(vector.counts) if c}


class DataNetCompiler:
    """Builds N_D and the system-net blocks of plain νPN transitions."""

    def __init__(self, net: NuPN, names: NameGen):
        self.net = net
        self.names = names
        self.builder = EosBuilder(names)
        self.nd = names.name("N_D", label="ND")
        self.object_transitions: List[str] = []
        self.object_arcs: List[Tuple[str, str, int]] = []
        self.sim = self.builder.place("sim", net=self.nd)
        self.select_tran = self.builder.place("selectTran")
        self.extra_tokens: List[NestedToken] = []

    def object_transition(self, tag: str, *parts: object, pre: Dict[str, int],
                          post: Dict[str, int], source: str = "",
                          label: Optional[str] = None) -> str:
        name = self.names.name(tag, *parts, source=source, label=label)
        self.object_transitions.append(name)
        self.object_arcs.extend((p, name, c) for p, c in pre.items() if c)
        self.object_arcs.extend((name, p, c) for p, c in post.items() if c)
        return name

    def compile_transition(self, t: str):
        """Emit the select chain, the fire transitions and t^done for ``t``."""
        net, b = self.net, self.builder
        variables = net.variables(t)
        if not variables:
            b.transition("t^done", t, pre={self.select_tran: 1}, post={self.select_tran: 1}, source=t)
            return
        moves = {
            var: self.object_transition(
                "t_x", t, var,
                pre=_counts(net, net.pre_vector(t, var)),
                post=_counts(net, net.post_vector(t, var)),
                source=t,
            )
            for var in variables
        }
        chain = [self.select_tran] + [
            b.place("select_x^t", t, var, source=t) for var in variables[1:]
        ]
        selected = {
            var: b.place("selected_x^t", t, var, net=self.nd, source=t)
            for var in variables if not var.is_fresh
        }
        run = {var: b.place("run_x^t", t, var, source=t) for var in variables}
        report = b.place("report^t", t, source=t)

        for i, var in enumerate(variables):
            pre = {chain[i]: 1}
            post: Dict[str, int] = {}
            if not var.is_fresh:
                pre[self.sim] = 1
                post[selected[var]] = 1
            if i + 1 < len(variables):
                post[chain[i + 1]] = 1
            else:
                post.update({run[v]: 1 for v in variables})
            b.transition("t^select_x", t, var, pre=pre, post=post, source=t)

        for var in variables:
            pre = {run[var]: 1}
            if not var.is_fresh:
                pre[selected[var]] = 1
            b.transition("t^fire_x", t, var, pre=pre, post={self.sim: 1, report: 1},
                         theta={self.nd: {moves[var]: 1}}, source=t)

        b.transition("t^done", t, pre={report: len(variables)}, post={self.select_tran: 1}, source=t)

    def object_net(self) -> PetriNet:
        return PetriNet.build(self.nd, self.net.places, self.object_transitions, self.object_arcs)

    def encode(self, config: NuConfig) -> Multiset:
        tokens = [NestedToken(self.sim, v.to_multiset(self.net.places, self.nd)) for v in config.tuples]
        tokens.append(NestedToken(self.select_tran, Multiset.epsilon()))
        tokens.extend(self.extra_tokens)
        return Multiset.of(tokens)

    def is_anchor(self, marking: Multiset) -> bool:
        return any(tok.place == self.select_tran for tok in marking.support())

    def decode(self, marking: Multiset) -> Optional[NuConfig]:
        """The source configuration of an anchor state, else ``None``."""
        vectors = []
        control = 0
        for tok, count in marking.items():
            if tok.place == self.sim:
                vectors.extend([PlaceVector.from_multiset(tok.marking, self.net.places)] * count)
            elif tok.place == self.select_tran:
                control += count
            elif not self.is_bookkeeping(tok.place):
                return None
        if control != 1:
            return None
        return NuConfig.of(vectors)

    def is_bookkeeping(self, place: str) -> bool:
        return False


def as_nupn(source: Union[NuPN, CNuPN]) -> NuPN:
    if isinstance(source, CNuPN):
        if any(source.matrix(t).selective() for t in source.transitions):
            raise InvalidSource("source has transfers; it is not a plain νPN")
        return source.base
    return source


class NuToCeos(Translator):
    """The νPN to cEOS construction."""

    kind = "nupn2ceos"

    def check_source(self, source: Union[NuPN, CNuPN]):
        violations = nupn_validate(as_nupn(source))
        if violations:
            raise InvalidSource("; ".join(str(v) for v in violations))

    def build(self, source: Union[NuPN, CNuPN]) -> Translation:
        net = as_nupn(source)
        names = NameGen(net.places + net.transitions)
        compiler = DataNetCompiler(net, names)
        for t in net.transitions:
            compiler.compile_transition(t)
        target = compiler.builder.build(f"{net.name}.ceos", [compiler.object_net()])
        return Translation(
            self.kind, net, target, compiler.encode, names.provenance,
            is_anchor=compiler.is_anchor, decode=compiler.decode,
        )


def nupn_to_ceos(net: Union[NuPN, CNuPN]) -> Translation:
    """Compile a νPN into a cEOS; tuples become objects on ``sim``."""
    return NuToCeos().translate(net)
