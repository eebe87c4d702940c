"""Channel νPNs: transfers with renaming, and the rename fragment.

A channel net extends a νPN with per-transition boolean transfer matrices.
Every row of a matrix is a unit row, so a matrix is stored as a map from a
source cell ``(x, p)`` to its target cell ``(y, q)``; cells that are not
listed keep their tokens in place. Complete matrices (given row by row in a
document) list every cell and are validated literally.

The rename fragment restricts channels to one shape: a transition over
``x0, x1, x2`` that moves ``x0`` from one control place to another, reads a
marker place with ``x1`` and another with ``x2``, and transfers the tokens of
``x1`` in ``r1`` to ``x2`` in ``r2``. Such transitions can also be fired with
a closed-form rule that does not go through the matrices, which the tests use
as an independent oracle.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging

from .errors import ModeNotEnabled, UnknownTransition, ValidationError, Violation
from .ms import Multiset, PlaceVector, delta
from .nupn import (
    Enumeration, NuConfig, NuMode, NuPN, Variable, check_mode, fresh_tuples,
    nupn_modes, nupn_validate, x,
)
from .petri import PetriNet


logger = logging.getLogger(__name__)

Cell = Tuple[Variable, str]

LIVE_PLACE = "@gen/pn/live"


def _cell_key(cell: Cell) -> Tuple:
    return (cell[0].sort_key(), cell[1])


@dataclass(frozen=True)
class ChannelMatrix:
    """The transfer matrices of one transition in unit-row form."""

    rows: Dict[Cell, Tuple[Cell, ...]] = field(default_factory=dict)
    complete: bool = False

    def target(self, cell: Cell) -> Optional[Cell]:
        """Where the tokens of ``cell`` go; ``None`` means they are dropped."""
        if cell not in self.rows:
            return None if self.complete else cell
        targets = self.rows[cell]
        return targets[0] if targets else None

    def selective(self) -> List[Tuple[Cell, Cell]]:
        """Non-identity transfers in canonical order."""
        result = []
        for cell in sorted(self.rows, key=_cell_key):
            for target in self.rows[cell]:
                if target != cell:
                    result.append((cell, target))
        return result

    def dense(self, source: Variable, target: Variable, places: Sequence[str]) -> List[List[int]]:
        """Debug view of the (source, target) matrix as a square 0/1 matrix over ``places``."""
        index = {p: i for i, p in enumerate(places)}
        matrix = [[0] * len(places) for _ in places]
        for p in places:
            cell = (source, p)
            targets = self.rows.get(cell, () if self.complete else (cell,))
            for var, q in targets:
                if var == target:
                    matrix[index[p]][index[q]] = 1
        return matrix

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChannelMatrix):
            return NotImplemented
        if self.complete != other.complete:
            return False
        return _normal_rows(self) == _normal_rows(other)

    def __hash__(self) -> int:
        return hash(tuple(sorted(_normal_rows(self).items(), key=lambda kv: _cell_key(kv[0]))))


def _normal_rows(matrix: ChannelMatrix) -> Dict[Cell, Tuple[Cell, ...]]:
    if matrix.complete:
        return dict(matrix.rows)
    return {cell: targets for cell, targets in matrix.rows.items() if targets != (cell,)}


IDENTITY = ChannelMatrix()

TransferSpec = Dict[str, ChannelMatrix]


@dataclass(frozen=True)
class Channel:
    """A drawn channel: a pre-arrow from ``source`` and a post-arrow to ``target``.

    The i-th variable of ``pre_vars`` is renamed to the i-th of ``post_vars``.
    """

    transition: str
    source: str
    target: str
    pre_vars: Tuple[Variable, ...]
    post_vars: Tuple[Variable, ...]


def channels_to_matrices(channels: Iterable[Channel]) -> TransferSpec:
    """Compile drawn channels into transfer matrices.

    Raises:
        ValidationError: If label sequences differ in length or a variable
            occurs in more than one pre-channel label from the same place.
    """
    rows: Dict[str, Dict[Cell, Tuple[Cell, ...]]] = {}
    violations: List[Violation] = []
    for channel in channels:
        where = f"{channel.transition}:{channel.source}->{channel.target}"
        if len(channel.pre_vars) != len(channel.post_vars):
            violations.append(Violation(
                "channel-arity", where, "pre and post label sequences differ in length"))
            continue
        table = rows.setdefault(channel.transition, {})
        for source_var, target_var in zip(channel.pre_vars, channel.post_vars):
            cell = (source_var, channel.source)
            if cell in table:
                violations.append(Violation(
                    "duplicate-channel-variable", where,
                    f"{source_var} already leaves {channel.source} through another channel"))
                continue
            table[cell] = ((target_var, channel.target),)
    if violations:
        raise ValidationError(violations)
    return {t: ChannelMatrix(table) for t, table in rows.items()}


def matrices_to_channels(transfers: TransferSpec) -> List[Channel]:
    """Group the selective entries of sparse matrices back into channels."""
    grouped: Dict[Tuple[str, str, str], List[Tuple[Variable, Variable]]] = {}
    for t in sorted(transfers):
        matrix = transfers[t]
        if matrix.complete:
            continue
        for (var, p), (target_var, q) in matrix.selective():
            grouped.setdefault((t, p, q), []).append((var, target_var))
    return [
        Channel(t, p, q, tuple(a for a, _ in pairs), tuple(b for _, b in pairs))
        for (t, p, q), pairs in grouped.items()
    ]


@dataclass(frozen=True)
class CNuPN:
    """A νPN together with the transfer matrices of its transitions."""

    base: NuPN
    transfers: TransferSpec = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.base.name

    @property
    def places(self) -> Tuple[str, ...]:
        return self.base.places

    @property
    def transitions(self) -> Tuple[str, ...]:
        return self.base.transitions

    def matrix(self, t: str) -> ChannelMatrix:
        if t not in self.base.pre:
            raise UnknownTransition(t)
        return self.transfers.get(t, IDENTITY)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CNuPN):
            return NotImplemented
        mine = {t: m for t, m in self.transfers.items() if m != IDENTITY}
        theirs = {t: m for t, m in other.transfers.items() if m != IDENTITY}
        return self.base == other.base and mine == theirs

    def __hash__(self) -> int:
        return hash(self.base)


def validate_transfer(net: CNuPN) -> List[Violation]:
    """Check the unit-row restrictions of every transfer matrix.

    Every cell ``(x, p)`` of a transition must send its tokens to exactly one
    cell ``(y, q)`` with ``x`` and ``y`` in X(t).
    """
    violations: List[Violation] = []
    places = set(net.places)
    for t in net.transitions:
        if t not in net.transfers:
            continue
        matrix = net.transfers[t]
        standard = net.base.standard_vars(t)
        allowed = set(standard)
        for (var, p), targets in matrix.rows.items():
            where = f"{t}:G({var},·)[{p}]"
            if var not in allowed:
                violations.append(Violation(
                    "unknown-variable", where, f"{var} is not a standard variable of {t}"))
            if p not in places:
                violations.append(Violation("unknown-place", where, f"{p} is not a place"))
            if len(targets) > 1:
                violations.append(Violation(
                    "multiple-ones", where,
                    f"row has {len(targets)} ones: {', '.join(f'{y}:{q}' for y, q in targets)}"))
            for target_var, q in targets:
                if target_var not in allowed:
                    violations.append(Violation(
                        "unknown-variable", where, f"target {target_var} is not in X({t})"))
                if q not in places:
                    violations.append(Violation("unknown-place", where, f"{q} is not a place"))
        if matrix.complete:
            for var in standard:
                for p in net.places:
                    if not matrix.rows.get((var, p)):
                        violations.append(Violation(
                            "missing-default", f"{t}:G({var},·)[{p}]",
                            f"no channel leaves {p} under {var} and the row does not keep the tokens on {p}"))
    return violations


def cnupn_validate(net: CNuPN) -> List[Violation]:
    return nupn_validate(net.base) + validate_transfer(net)


def cnupn_modes(net: CNuPN, config: NuConfig, t: str, **kwargs) -> Enumeration:
    """Modes are exactly those of the underlying νPN."""
    return nupn_modes(net.base, config, t, **kwargs)


def cnupn_fire_staged(net: CNuPN, config: NuConfig, t: str,
                      mode: NuMode) -> Tuple[NuConfig, NuConfig, NuConfig]:
    """Fire ``t`` and return the configuration after each phase.

    Returns:
        (after removing inputs, after transfers, final configuration)

    Raises:
        ModeNotEnabled: If the mode does not enable ``t``.
    """
    base = net.base
    assignment = check_mode(base, config, t, mode)
    matrix = net.matrix(t)
    bound = {index: var for var, index in assignment.items()}
    untouched = [v for i, v in enumerate(config.tuples) if i not in bound]

    drained = {var: config.tuples[index] - base.pre_vector(t, var)
               for var, index in assignment.items()}
    stage1 = NuConfig.of(untouched + list(drained.values()))

    gathered = {var: [0] * base.dimension for var in assignment}
    for var, vector in drained.items():
        for i, count in enumerate(vector.counts):
            if not count:
                continue
            target = matrix.target((var, base.places[i]))
            if target is None:
                continue
            target_var, q = target
            gathered[target_var][base.place_index(q)] += count
    moved = {var: PlaceVector(tuple(counts)) for var, counts in gathered.items()}
    stage2 = NuConfig.of(untouched + list(moved.values()))

    final = [moved[var] + base.post_vector(t, var) for var in assignment]
    stage3 = NuConfig.of(untouched + final + fresh_tuples(base, t))
    logger.debug(f"Staged fire of {t}: {stage1} | {stage2} | {stage3}")
    return stage1, stage2, stage3


def cnupn_fire(net: CNuPN, config: NuConfig, t: str, mode: NuMode) -> NuConfig:
    """Fire ``t``: remove inputs, apply transfers, add outputs and fresh tuples."""
    return cnupn_fire_staged(net, config, t, mode)[2]


RNU_VARIABLES = (x(0), x(1), x(2))


@dataclass(frozen=True)
class SpecialShape:
    """The places realizing one special transition of the rename fragment."""

    transition: str
    r1: str
    r2: str
    p2: str
    p3: str
    p4: str
    p5: str


@dataclass(frozen=True)
class RnuMeta:
    """Recognized structure of a rename-fragment net."""

    specials: Dict[str, SpecialShape] = field(default_factory=dict)

    def is_special(self, t: str) -> bool:
        return t in self.specials


@dataclass(frozen=True)
class RnuMismatch:
    """Why a channel net is not in the rename fragment."""

    transition: str
    reason: str

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        return f"{self.transition}: {self.reason}"


def _single_place(vector: PlaceVector, places: Sequence[str]) -> Optional[str]:
    if vector.total() != 1:
        return None
    return places[vector.counts.index(1)]


def _special_shape(net: CNuPN, t: str) -> Union[SpecialShape, str]:
    base = net.base
    if base.fresh_vars(t):
        return "special transitions have no fresh variables"
    if tuple(base.standard_vars(t)) != RNU_VARIABLES:
        return "special transitions use exactly the variables x0, x1, x2"
    matrix = net.matrix(t)
    selective = matrix.selective()
    if len(selective) != 1:
        return f"expected one transfer, found {len(selective)}"
    (source_var, r1), (target_var, r2) = selective[0]
    if (source_var, target_var) != (x(1), x(2)):
        return "the transfer must go from x1 to x2"
    if matrix.complete:
        for var in RNU_VARIABLES:
            for p in base.places:
                expected = (x(2), r2) if (var, p) == (x(1), r1) else (var, p)
                if matrix.rows.get((var, p)) != (expected,):
                    return f"complete matrix row G({var},·)[{p}] is not the default"
    places = base.places
    p2 = _single_place(base.pre_vector(t, x(0)), places)
    p5 = _single_place(base.post_vector(t, x(0)), places)
    if p2 is None or p5 is None or p2 == p5:
        return "x0 must move one token between two distinct places"
    p3 = _single_place(base.pre_vector(t, x(1)), places)
    if p3 is None or base.post_vector(t, x(1)) != base.pre_vector(t, x(1)):
        return "x1 must read exactly one place"
    p4 = _single_place(base.pre_vector(t, x(2)), places)
    if p4 is None or base.post_vector(t, x(2)) != base.pre_vector(t, x(2)):
        return "x2 must read exactly one place"
    quad = {p2, p3, p4, p5}
    if len(quad) != 4:
        return "the flow places must be pairwise distinct"
    if r1 in quad or r2 in quad:
        return "the rename places must differ from the flow places"
    return SpecialShape(t, r1, r2, p2, p3, p4, p5)


def is_rnupn(net: CNuPN) -> Union[RnuMeta, RnuMismatch]:
    """Recognize the rename fragment and extract its special transitions."""
    specials: Dict[str, SpecialShape] = {}
    for t in net.transitions:
        if not net.matrix(t).selective():
            continue
        shape = _special_shape(net, t)
        if isinstance(shape, str):
            return RnuMismatch(t, shape)
        specials[t] = shape
    return RnuMeta(specials)


def rnupn_fire_direct(net: CNuPN, meta: RnuMeta, config: NuConfig, t: str,
                      mode: NuMode) -> NuConfig:
    """Fire a special transition with the closed-form rename rule.

    Raises:
        UnknownTransition: If ``t`` is not a special transition.
        ModeNotEnabled: If the mode does not enable ``t``.
    """
    if t not in meta.specials:
        raise UnknownTransition(t)
    shape = meta.specials[t]
    base = net.base
    assignment = check_mode(base, config, t, mode)
    n = base.dimension
    idx = base.place_index
    m0 = config.tuples[assignment[x(0)]]
    m1 = config.tuples[assignment[x(1)]]
    m2 = config.tuples[assignment[x(2)]]
    moved = m1[idx(shape.r1)]
    new0 = m0 - delta(idx(shape.p2), n) + delta(idx(shape.p5), n)
    new1 = m1 - m1.project(idx(shape.r1))
    new2 = m2 + delta(idx(shape.r2), n).scale(moved)
    bound = set(assignment.values())
    rest = [v for i, v in enumerate(config.tuples) if i not in bound]
    return NuConfig.of(rest + [new0, new1, new2])


def pn_as_cnupn(pn: PetriNet) -> CNuPN:
    """Lift a Petri net to a channel net acting on a single tuple.

    Each transition gets one standard variable carrying its pre/post counts.
    Transitions without input places additionally read a dedicated live place
    so their variable is bound.
    """
    needs_live = any(not pn.pre[t] and pn.post[t] for t in pn.transitions)
    places = pn.places + ((LIVE_PLACE,) if needs_live else ())
    arcs = []
    for t in pn.transitions:
        for p, count in pn.pre[t].items():
            arcs.append((p, t, Multiset({x(1): count})))
        for p, count in pn.post[t].items():
            arcs.append((t, p, Multiset({x(1): count})))
        if not pn.pre[t] and pn.post[t]:
            arcs.append((LIVE_PLACE, t, Multiset({x(1): 1})))
            arcs.append((t, LIVE_PLACE, Multiset({x(1): 1})))
    base = NuPN.build(pn.name, places, pn.transitions, arcs)
    return CNuPN(base, {})


def lift_marking(net: CNuPN, marking: Multiset) -> NuConfig:
    """The single-tuple configuration of a lifted Petri net marking."""
    counts = dict(marking.as_dict())
    if LIVE_PLACE in net.places:
        counts[LIVE_PLACE] = 1
    return NuConfig.of([PlaceVector.from_multiset(Multiset(counts), net.places)])


def lower_config(net: CNuPN, config: NuConfig) -> Multiset:
    """Sum all tuples back into a Petri net marking (dropping the live place)."""
    total = PlaceVector.zero(len(net.places))
    for vector in config.tuples:
        total = total + vector
    return total.to_multiset(net.places).restrict(lambda p: p != LIVE_PLACE)
