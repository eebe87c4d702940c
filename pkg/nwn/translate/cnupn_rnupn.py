"""From channel νPNs to the rename fragment.

A transition ``t`` is replayed by a chain driven by a control tuple: a pre
stage removes the inputs and marks each selected tuple with its variable, one
special transition per selective transfer moves the tokens of one place, and a
post stage adds the outputs and the fresh tuples. When transfers could feed
each other, or move tokens within a single tuple, every transfer is staged
through a place of a permanent scratch tuple first and renamed into its
target afterwards.
"""

from typing import Dict, List, Optional, Tuple
import logging

from ..core.cnupn import CNuPN, Cell, RNU_VARIABLES, cnupn_validate
from ..core.errors import InvalidSource
from ..core.ms import Multiset, PlaceVector
from ..core.nupn import NuConfig, Variable, x
from .base import NameGen, NuBuilder, Translation, Translator


logger = logging.getLogger(__name__)

CS, FIRST, SECOND = RNU_VARIABLES


def needs_scratch(transfers: List[Tuple[Cell, Cell]]) -> bool:
    """Whether the transfers of one transition cannot run one after the other in place."""
    sources = {cell for cell, _ in transfers}
    for (var, _), target in transfers:
        if target[0] == var or target in sources:
            return True
    return False


class ChainCompiler:
    """Builds the control chains of every transition."""

    def __init__(self, net: CNuPN, names: NameGen):
        self.net = net
        self.names = names
        self.builder = NuBuilder(names, net.places)
        self.select = self.builder.place("q_select")
        self.scratch: Optional[str] = None

    def scratch_place(self) -> str:
        if self.scratch is None:
            self.scratch = self.builder.place("q_scratch")
        return self.scratch

    def compile(self, t: str):
        net, b = self.net, self.builder
        base = net.base
        transfers = net.matrix(t).selective()
        staged = needs_scratch(transfers)
        k = 2 * len(transfers) if staged else len(transfers)
        steps = [self.select] + [b.place("step", t, j, source=t) for j in range(1, k + 2)]
        rename: Dict[Variable, Variable] = {v: x(i) for i, v in enumerate(base.standard_vars(t), start=1)}
        marks = {v: b.place("p_x", t, v, source=t, label="mark") for v in rename}

        pre = {CS: {steps[0]: 1}}
        post = {CS: {steps[1]: 1}}
        for v, target in rename.items():
            pre[target] = self._counts(base.pre_vector(t, v))
            post[target] = {marks[v]: 1}
        b.transition("pre-stage", t, source=t, label="pre", pre=pre, post=post)

        step = 1
        if staged:
            scratch = self.scratch_place()
            parking = [b.place("park", t, i, source=t, label="park") for i in range(1, len(transfers) + 1)]
            for i, ((var, p), _) in enumerate(transfers, start=1):
                self._special("move", t, i, steps[step], steps[step + 1],
                              marks[var], scratch, p, parking[i - 1])
                step += 1
            for i, (_, (var, q)) in enumerate(transfers, start=1):
                self._special("rename", t, i, steps[step], steps[step + 1],
                              scratch, marks[var], parking[i - 1], q)
                step += 1
        else:
            for i, ((src, p), (dst, q)) in enumerate(transfers, start=1):
                self._special("rename", t, i, steps[step], steps[step + 1],
                              marks[src], marks[dst], p, q)
                step += 1

        pre = {CS: {steps[-1]: 1}}
        post = {CS: {self.select: 1}}
        for v, target in rename.items():
            pre[target] = {marks[v]: 1}
            post[target] = self._counts(base.post_vector(t, v))
        for v in base.fresh_vars(t):
            post[v] = self._counts(base.post_vector(t, v))
        b.transition("post-stage", t, source=t, label="post", pre=pre, post=post)
        logger.debug(f"{t}: {len(transfers)} transfer(s), {'staged' if staged else 'direct'} chain")

    def _special(self, tag: str, t: str, i: int, here: str, there: str,
                 read_first: str, read_second: str, r1: str, r2: str):
        """One special transition moving every token of (x1, r1) to (x2, r2)."""
        label = "move" if tag.startswith("move") else "rename"
        self.builder.transition(
            tag, t, i, source=t, label=label,
            pre={CS: {here: 1}, FIRST: {read_first: 1}, SECOND: {read_second: 1}},
            post={CS: {there: 1}, FIRST: {read_first: 1}, SECOND: {read_second: 1}},
            transfers={(FIRST, r1): (SECOND, r2)},
        )

    def _counts(self, vector: PlaceVector) -> Dict[str, int]:
        return {self.net.places[i]: c for i, c in enumerate(vector.counts) if c}

    def encode(self, config: NuConfig) -> NuConfig:
        """Pad every tuple and add the control tuple (and the scratch tuple when used)."""
        size = len(self.builder.places)
        vectors = [v.pad(size) for v in config.tuples]
        vectors.append(self._unit(self.select))
        if self.scratch is not None:
            vectors.append(self._unit(self.scratch))
        return NuConfig.of(vectors)

    def _unit(self, place: str) -> PlaceVector:
        return PlaceVector.from_multiset(Multiset({place: 1}), self.builder.places)

    def is_anchor(self, config: NuConfig) -> bool:
        i = self.builder.places.index(self.select)
        return any(v[i] for v in config.tuples)

    def decode(self, config: NuConfig) -> Optional[NuConfig]:
        if not self.is_anchor(config):
            return None
        control = {self._unit(self.select)}
        if self.scratch is not None:
            control.add(self._unit(self.scratch))
        n = self.net.base.dimension
        vectors = []
        for v in config.tuples:
            if v in control:
                continue
            if any(v.counts[n:]):
                return None
            vectors.append(PlaceVector(v.counts[:n]))
        return NuConfig.of(vectors)


class CnuToRnu(Translator):
    """The c-νPN to r-νPN construction."""

    kind = "cnupn2rnupn"

    def check_source(self, source: CNuPN):
        if not isinstance(source, CNuPN):
            raise InvalidSource("source is not a channel net")
        violations = cnupn_validate(source)
        if violations:
            raise InvalidSource("; ".join(str(v) for v in violations))

    def build(self, source: CNuPN) -> Translation:
        names = NameGen(source.places + source.transitions)
        compiler = ChainCompiler(source, names)
        for t in source.transitions:
            compiler.compile(t)
        target = compiler.builder.build(f"{source.name}.rnupn")
        return Translation(
            self.kind, source, target, compiler.encode, names.provenance,
            is_anchor=compiler.is_anchor, decode=compiler.decode,
        )


def cnupn_to_rnupn(net: CNuPN) -> Translation:
    """Compile a channel νPN into an r-νPN, encoding configurations with a control tuple."""
    return CnuToRnu().translate(net)
