"""Empirical checks that a construction preserves the behaviour of its source.

Two protocols are used, depending on what a construction promises:

* step simulation: from every sampled reachable source state, the target
  runs of one simulation cycle (anchor to anchor) must decode to exactly the
  successors of the source state;
* coverability: source and target must agree on every sampled coverability
  question whenever both searches are conclusive.

Searches that hit a bound are reported as inconclusive, never as mismatches.
"""

from dataclasses import dataclass, field
from random import Random
from typing import Any, Dict, Hashable, List, Optional
import logging
import time

from .core.eos import EOS, NestedToken, format_nested
from .core.ms import Multiset
from .core.nupn import NuConfig
from .explore import Limits, System, coverability, module_cycles, system_for
from .generate import SizeParams, random_instance
from .translate import Translation, get_translator


logger = logging.getLogger(__name__)

STEP_KINDS = ("pn2cnupn", "nupn2ceos", "ceos2cnupn", "cnupn2rnupn", "normalize")
COVER_KINDS = ("rnupn2ceos", "closure")
KINDS = STEP_KINDS + COVER_KINDS

SOURCE_FORMALISM = {
    "pn2cnupn": "pn",
    "nupn2ceos": "nupn",
    "rnupn2ceos": "rnupn",
    "ceos2cnupn": "eos",
    "cnupn2rnupn": "cnupn",
    "closure": "eos",
    "normalize": "eos",
}


@dataclass
class CrosscheckReport:
    """Outcome of one cross-check run."""

    kind: str
    seed: Optional[int] = None
    verdicts: List[Dict[str, Any]] = field(default_factory=list)
    mismatches: List[Dict[str, Any]] = field(default_factory=list)
    inconclusive: List[Dict[str, Any]] = field(default_factory=list)
    states: int = 0
    depth: int = 0
    millis: int = 0

    @property
    def ok(self) -> bool:
        return not self.mismatches

    @property
    def conclusive(self) -> bool:
        return not self.inconclusive

    def merge(self, other: "CrosscheckReport"):
        """Fold another run of the same kind into this report."""
        self.verdicts.extend(other.verdicts)
        self.mismatches.extend(other.mismatches)
        self.inconclusive.extend(other.inconclusive)
        self.states += other.states
        self.depth = max(self.depth, other.depth)
        self.millis += other.millis

    def to_dict(self, timing: bool = False) -> Dict[str, Any]:
        stats = {"states": self.states, "depth": self.depth}
        if timing:
            stats["millis"] = self.millis
        return {
            "kind": self.kind,
            "seed": self.seed,
            "verdicts": list(self.verdicts),
            "mismatches": list(self.mismatches),
            "inconclusive": list(self.inconclusive),
            "stats": stats,
        }


def sample_states(sys: System, init: Any, count: int, limits: Limits) -> List[Hashable]:
    """The first ``count`` states reached breadth first from ``init``."""
    root = sys.canonical(init)
    seen = {root}
    found = [root]
    frontier = [root]
    depth = 0
    while frontier and len(found) < count and depth < limits.max_depth:
        next_frontier = []
        for state in frontier:
            for _, successor in sys.expand(state):
                key = sys.canonical(successor)
                if key in seen or sys.size(key) > limits.max_tokens:
                    continue
                seen.add(key)
                found.append(key)
                next_frontier.append(key)
                if len(found) >= count:
                    return found
        frontier = next_frontier
        depth += 1
    return found


def _check_steps(translation: Translation, init: Any, limits: Limits, samples: int,
                 report: CrosscheckReport, options: Dict[str, Any]):
    source = system_for(translation.source, limits, **options)
    target = system_for(translation.target, limits)
    for state in sample_states(source, init, samples, limits):
        expected = {source.canonical(s) for _, s in source.expand(state)}
        cycles = module_cycles(target, translation.encode(state), translation.is_anchor, limits)
        decoded: Dict[Hashable, List[str]] = {}
        for anchor, trace in cycles.anchors.items():
            back = translation.decode(anchor)
            if back is None:
                report.mismatches.append({
                    "state": str_state(state), "issue": "undecodable", "anchor": str_state(anchor),
                    "trace": trace,
                })
                continue
            decoded.setdefault(source.canonical(back), trace)
        # the empty target run matches a stuttering source step
        missing = [s for s in expected if s not in decoded and s != state]
        extra = [s for s in decoded if s not in expected and s != state]
        for s in extra:
            report.mismatches.append({
                "state": str_state(state), "issue": "extra", "successor": str_state(s),
                "trace": decoded[s],
            })
        for s in missing:
            entry = {"state": str_state(state), "issue": "missing", "successor": str_state(s)}
            if cycles.exhausted and not source.truncated:
                report.mismatches.append(entry)
            else:
                report.inconclusive.append(entry)
        report.verdicts.append({
            "state": str_state(state),
            "source_steps": len(expected),
            "anchors": len(cycles.anchors),
            "exhausted": cycles.exhausted,
        })
        report.depth = max([report.depth] + [len(trace) for trace in cycles.anchors.values()])
        logger.debug(f"{translation.kind}: {len(expected)} step(s), {len(cycles.anchors)} anchor(s) "
                     f"from {str_state(state)}")


def _perturb(translation: Translation, state: Any, rng: Random) -> Any:
    """One token more than ``state`` somewhere."""
    if isinstance(state, NuConfig):
        vectors = list(state.tuples)
        width = len(translation.source.places)
        if vectors and rng.random() < 0.5:
            i = rng.randrange(len(vectors))
            p = rng.randrange(width)
            vectors[i] = vectors[i].with_count(p, vectors[i][p] + 1)
        else:
            p = rng.choice(translation.source.places)
            vectors.append(translation.source.base.vector({p: 1}))
        return NuConfig.of(vectors)
    eos: EOS = translation.source
    place = rng.choice(eos.system.places)
    return state + Multiset({eos.token(place): 1})


def _check_cover(translation: Translation, init: Any, limits: Limits, targets: int,
                 report: CrosscheckReport, rng: Random, exhaustive_loss: bool):
    lossy = translation.kind == "closure"
    if isinstance(translation.source, EOS):
        source = system_for(translation.source, limits, exhaustive_loss=exhaustive_loss)
    else:
        source = system_for(translation.source, limits)
    target = system_for(translation.target, limits)
    questions = sample_states(source, init, targets, limits)
    questions += [_perturb(translation, q, rng) for q in list(questions)]
    encoded_init = translation.encode(init)
    for question in questions:
        if isinstance(question, NuConfig):
            question = question.without_zero()
        mine = coverability(source, init, question, lossy=lossy, limits=limits)
        theirs = coverability(target, encoded_init, translation.encode(question), limits=limits)
        entry = {
            "target": str_state(question),
            "source": mine.outcome,
            "translated": theirs.outcome,
            "source_trace": mine.trace,
            "translated_trace": theirs.trace,
        }
        report.verdicts.append(entry)
        report.states += mine.states + theirs.states
        report.depth = max(report.depth, mine.depth or 0, theirs.depth or 0)
        if mine.definitive and theirs.definitive:
            if mine.covered != theirs.covered:
                report.mismatches.append(dict(entry, issue="verdict"))
        else:
            report.inconclusive.append(dict(entry, issue="bounds"))


def crosscheck(kind: str, source: Any, init: Any, limits: Optional[Limits] = None,
               samples: int = 8, targets: int = 4, seed: int = 0,
               exhaustive_loss: bool = False) -> CrosscheckReport:
    """Run the protocol of ``kind`` on one source instance.

    Args:
        kind: A construction name from ``KINDS``.
        source: The source net.
        init: Its initial configuration.
        limits: Bounds for every search.
        samples: Reachable source states checked by step-simulation kinds.
        targets: Reachable states turned into coverability questions.
        seed: Seed for the perturbed coverability questions.
        exhaustive_loss: Use exhaustive loss steps for lossy EOS searches.

    Returns:
        A CrosscheckReport; mismatches only record conclusive disagreements.

    Raises:
        KeyError: If ``kind`` is unknown.
        TranslationError: If the source is not acceptable for ``kind``.
    """
    if kind not in KINDS:
        raise KeyError(kind)
    limits = limits or Limits()
    start = time.monotonic()
    translation = get_translator(kind).translate(source)
    report = CrosscheckReport(kind, seed)
    if kind in STEP_KINDS:
        _check_steps(translation, init, limits, samples, report, {})
    else:
        _check_cover(translation, init, limits, targets, report, Random(seed), exhaustive_loss)
    report.millis = int((time.monotonic() - start) * 1000)
    if report.mismatches:
        logger.warning(f"{kind}: {len(report.mismatches)} mismatch(es)")
    else:
        logger.info(f"{kind}: no mismatch over {len(report.verdicts)} check(s), "
                    f"{len(report.inconclusive)} inconclusive")
    return report


def source_size(kind: str) -> SizeParams:
    """Size bounds of the random sources used for ``kind``."""
    if kind == "ceos2cnupn":
        return SizeParams(places=3, transitions=2, objects=1, conservative=True)
    if kind in ("closure", "normalize"):
        return SizeParams(places=3, transitions=2, objects=1)
    return SizeParams(places=3, transitions=2, variables=2, tuples=2, max_count=2)


def crosscheck_seeded(kind: str, seed: int, count: int = 1, limits: Optional[Limits] = None,
                      size: Optional[SizeParams] = None, **options) -> CrosscheckReport:
    """Cross-check ``count`` random sources generated from consecutive seeds."""
    if kind not in KINDS:
        raise KeyError(kind)
    size = size or source_size(kind)
    total = CrosscheckReport(kind, seed)
    for offset in range(count):
        instance = random_instance(SOURCE_FORMALISM[kind], seed + offset, size)
        run = crosscheck(kind, instance.net, instance.init, limits, seed=seed + offset, **options)
        for item in run.mismatches + run.inconclusive:
            item.setdefault("seed", seed + offset)
        total.merge(run)
    return total


def str_state(state: Any) -> str:
    if isinstance(state, Multiset) and any(isinstance(tok, NestedToken) for tok in state.support()):
        return format_nested(state)
    return str(state)
