"""From r-νPNs to conservative EOSs, exact up to lossiness.

Standard transitions are compiled as in :mod:`nupn_ceos`. A special
transition selects the objects of ``x0``, ``x1`` and ``x2`` while applying
their flow, then moves the tokens of the ``x1`` object one at a time through
a transfer gadget per place: tokens of ``r1`` land on the ``x2`` object in
``r2`` and every other token lands on a fresh ``x1`` object in the same
place. Stopping the gadgets early dumps whatever is left into ``trash``,
which is the only source of loss.
"""

from typing import Dict, Optional
import logging

from ..core.cnupn import CNuPN, RnuMeta, SpecialShape, is_rnupn
from ..core.eos import NestedToken
from ..core.errors import NotRnu
from ..core.ms import Multiset
from ..core.nupn import NuConfig, nupn_validate
from .base import NameGen, Translation, Translator
from .nupn_ceos import DataNetCompiler


logger = logging.getLogger(__name__)


class RenameCompiler(DataNetCompiler):
    """Adds the add/check/rem object transitions, ``trash`` and the special blocks."""

    def __init__(self, net: CNuPN, meta: RnuMeta, names: NameGen):
        super().__init__(net.base, names)
        self.meta = meta
        self.add: Dict[str, str] = {}
        self.check: Dict[str, str] = {}
        self.rem: Dict[str, str] = {}
        for p in net.places:
            self.add[p] = self.object_transition("add(p)", p, pre={}, post={p: 1}, source=p, label="add")
            self.check[p] = self.object_transition("check(p)", p, pre={p: 1}, post={p: 1}, source=p, label="check")
            self.rem[p] = self.object_transition("rem(p)", p, pre={p: 1}, post={}, source=p, label="rem")
        self.trash = self.builder.place("trash", net=self.nd)
        self.extra_tokens.append(NestedToken(self.trash, Multiset({}, self.nd)))

    def is_bookkeeping(self, place: str) -> bool:
        return place == self.trash

    def compile_special(self, shape: SpecialShape):
        """The selection block, the transfer gadgets and the hand-back of three objects."""
        t, b, nd = shape.transition, self.builder, self.nd
        ready_x0 = b.place("t^ready_x", t, "x0", net=nd, source=t)
        ready_x1 = b.place("t^ready_x", t, "x1", net=nd, source=t)
        copy_x1 = b.place("t^copy_x", t, "x1", net=nd, source=t)
        copy_x2 = b.place("t^copy_x", t, "x2", net=nd, source=t)
        selected = [b.place("t^selected_x", t, f"x{i}", source=t) for i in range(3)]
        run_x0 = b.place("t^run_x", t, "x0", source=t)
        run_tran = b.place("t^run_tran", t, source=t)
        running_tran = b.place("t^running_tran", t, source=t)
        tran_done = b.place("t^tran_done", t, source=t)
        report = b.place("t^report", t, source=t)

        b.transition("t^select_x", t, "x0", pre={self.select_tran: 1, self.sim: 1},
                     post={ready_x0: 1, selected[0]: 1},
                     theta={nd: {self.rem[shape.p2]: 1, self.add[shape.p5]: 1}}, source=t)
        b.transition("t^select_x", t, "x1", pre={selected[0]: 1, self.sim: 1},
                     post={ready_x1: 1, selected[1]: 1},
                     theta={nd: {self.check[shape.p3]: 1}}, source=t)
        b.transition("t^select_x", t, "x2", pre={selected[1]: 1, self.sim: 1},
                     post={copy_x2: 1, selected[2]: 1},
                     theta={nd: {self.check[shape.p4]: 1}}, source=t)
        b.transition("t^enabling", t, pre={selected[2]: 1},
                     post={run_x0: 1, run_tran: 1, copy_x1: 1}, source=t)
        b.transition("t^move_x", t, "x0", pre={ready_x0: 1, run_x0: 1},
                     post={self.sim: 1, report: 1}, source=t)

        for p in self.net.places:
            if p == shape.r1:
                target, copy = shape.r2, copy_x2
            else:
                target, copy = p, copy_x1
            staged = b.place("p^s_i", t, p, source=t)
            b.transition("t^rem_i", t, p, pre={ready_x1: 1, run_tran: 1},
                         post={ready_x1: 1, staged: 1, running_tran: 1},
                         theta={nd: {self.rem[p]: 1}}, source=t)
            b.transition("t^add_i", t, p, pre={staged: 1, running_tran: 1, copy: 1},
                         post={copy: 1, run_tran: 1},
                         theta={nd: {self.add[target]: 1}}, source=t)

        b.transition("t^stop_tran", t, pre={run_tran: 1, ready_x1: 1, self.trash: 1},
                     post={self.trash: 1, tran_done: 2}, source=t)
        b.transition("t^move_x", t, "x1", pre={tran_done: 1, copy_x1: 1},
                     post={self.sim: 1, report: 1}, source=t)
        b.transition("t^move_x", t, "x2", pre={tran_done: 1, copy_x2: 1},
                     post={self.sim: 1, report: 1}, source=t)
        b.transition("t^done", t, pre={report: 3}, post={self.select_tran: 1}, source=t)

    def decode(self, marking: Multiset) -> Optional[NuConfig]:
        """Decode anchors of perfect runs only; a non-empty trash means tokens were lost."""
        for tok in marking.support():
            if tok.place == self.trash and tok.marking:
                return None
        return super().decode(marking)

    def trash_marking(self, marking: Multiset) -> Multiset:
        total = Multiset({}, self.nd)
        for tok, count in marking.items():
            if tok.place == self.trash:
                total = total + tok.marking.scale(count)
        return total


class RnuToCeos(Translator):
    """The r-νPN to cEOS construction."""

    kind = "rnupn2ceos"

    def check_source(self, source: CNuPN):
        if not isinstance(source, CNuPN):
            raise NotRnu("source is not a channel net")
        meta = is_rnupn(source)
        if not meta:
            raise NotRnu(str(meta))
        violations = nupn_validate(source.base)
        if violations:
            raise NotRnu("; ".join(str(v) for v in violations))

    def build(self, source: CNuPN) -> Translation:
        meta = is_rnupn(source)
        names = NameGen(source.places + source.transitions)
        compiler = RenameCompiler(source, meta, names)
        for t in source.transitions:
            if meta.is_special(t):
                compiler.compile_special(meta.specials[t])
            else:
                compiler.compile_transition(t)
        logger.debug(f"{len(meta.specials)} special transition(s) compiled with transfer gadgets")
        target = compiler.builder.build(f"{source.name}.ceos", [compiler.object_net()])
        return Translation(
            self.kind, source, target, compiler.encode, names.provenance,
            is_anchor=compiler.is_anchor, decode=compiler.decode,
        )


def rnupn_to_ceos(net: CNuPN) -> Translation:
    """Compile an r-νPN into a cEOS whose encoding also marks ``trash``.

    Raises:
        NotRnu: If the channel net is outside the rename fragment.
    """
    return RnuToCeos().translate(net)
