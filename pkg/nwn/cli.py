"""Command-line interface for nwn."""

import click
import sys
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from .config import ConfigError, get_config_manager
from .core.cnupn import CNuPN, cnupn_fire_staged, cnupn_modes
from .core.eos import EOS, eos_validate
from .core.errors import NetError, OrderUnavailable, StepNotEnabled, ValidationError
from .crosscheck import KINDS as CHECK_KINDS, crosscheck, crosscheck_seeded
from .explore import Limits, Step, coverability, system_for
from .format import (
    NetDocument, from_json, kind_of, load_doc, save_doc, emit_doc, to_dot, to_json,
)
from .generate import KINDS as GEN_KINDS, SizeParams, random_instance
from .report import ReportError, ReportStore, write_json
from .translate import TRANSLATORS, get_translator
from . import ui
from .ui import (
    print_success, print_error, print_warning, print_info, display_table, display_panel,
    display_tree, format_state,
)


# Configure logging
logging.basicConfig(
    level=logging.WARNING,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3

DOMAIN_ERRORS = (NetError, ConfigError, ReportError)


class NwnGroup(click.Group):
    """Maps click's own failures onto the nwn exit codes."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.UsageError as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            print_error("Aborted")
            sys.exit(EXIT_NEGATIVE)
        if isinstance(rv, int):
            sys.exit(rv)
        return rv


def limit_options(func):
    """The search bounds shared by every exploring command."""
    options = [
        click.option('--max-depth', type=int, help='Maximum search depth'),
        click.option('--max-states', type=int, help='Maximum number of visited states'),
        click.option('--max-tokens', type=int, help='Maximum tokens in a single state'),
        click.option('--budget-ms', type=int, help='Wall-clock budget in milliseconds'),
        click.option('--jobs', type=int, help='Worker threads for frontier expansion'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _limits(max_depth: Optional[int], max_states: Optional[int], max_tokens: Optional[int],
            budget_ms: Optional[int], jobs: Optional[int]) -> Limits:
    for flag, value in (("--max-depth", max_depth), ("--max-states", max_states),
                        ("--max-tokens", max_tokens), ("--budget-ms", budget_ms), ("--jobs", jobs)):
        if value is not None and value <= 0:
            raise click.BadParameter(f"must be positive, got {value}", param_hint=flag)
    return get_config_manager().get_limits(
        max_depth=max_depth, max_states=max_states, max_tokens=max_tokens,
        budget_ms=budget_ms, jobs=jobs,
    )


def _write_json(path: Optional[str], payload: Dict[str, Any]):
    if path:
        write_json(Path(path), payload, indent=get_config_manager().json_indent())
        print_info(f"Report written to {path}")


def _write_dot(path: Optional[str], net: Any):
    if path:
        Path(path).write_text(to_dot(net), encoding="utf-8")
        print_info(f"DOT structure written to {path}")


def _print_violations(error: ValidationError):
    print_error(f"Validation failed with {len(error.violations)} violation(s)")
    display_table("Violations", ["Code", "Location", "Message"],
                  [(v.code, v.location, v.message) for v in error.violations])


def _net_summary(doc: NetDocument) -> List[List[str]]:
    net = doc.net
    rows = [["kind", doc.kind], ["name", net.name]]
    if isinstance(net, EOS):
        rows.append(["system places", str(len(net.system.places))])
        rows.append(["transitions", str(len(net.user_transitions()))])
        rows.append(["object nets", str(len(net.objects) - 1)])
        rows.append(["events", str(len(net.events))])
    else:
        rows.append(["places", str(len(net.places))])
        rows.append(["transitions", str(len(net.transitions))])
        if isinstance(net, CNuPN):
            rows.append(["transfer matrices", str(len(net.transfers))])
    if doc.init is not None:
        rows.append(["initial", format_state(doc.init, net)])
    if doc.target is not None:
        rows.append(["target", format_state(doc.target, net)])
    return rows


def _read_trace(path: str) -> List[str]:
    """Step labels, one per line; lines starting with '#' are comments."""
    labels = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            labels.append(line)
    return labels


def _load_target(doc: NetDocument, path: str) -> Any:
    """A target from a full document, or from bare configuration lines for ``doc``'s net."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [line.strip() for line in text.splitlines()
             if line.strip() and not line.strip().startswith("#")]
    if lines and lines[0].startswith("NET"):
        other = load_doc(path)
        target = other.target if other.target is not None else other.init
        if target is None:
            raise click.UsageError(f"{path} holds neither a TARGET nor an INIT section")
        return target
    if lines and lines[0] == "TARGET":
        lines = lines[1:]
    data = to_json(NetDocument(doc.kind, doc.net))
    data["target"] = lines
    return from_json(data).target


@click.group(cls=NwnGroup)
@click.version_option(version="1.0.0", prog_name="nwn")
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose output')
def main(verbose: bool):
    """nwn: nets with names, channel nets and elementary object systems."""
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        ui.set_color(get_config_manager().use_color())
    except ConfigError as e:
        print_warning(f"Ignoring configuration: {e}")


@main.command()
@click.argument('net_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--json', 'json_path', type=click.Path(dir_okay=False), help='Write a JSON summary')
@click.option('--dot', 'dot_path', type=click.Path(dir_okay=False), help='Export the net structure as DOT')
def validate(net_file: str, json_path: Optional[str], dot_path: Optional[str]):
    """Parse a document and check its net against the rules of its formalism."""
    try:
        doc = load_doc(net_file)
        display_table(f"{net_file}", ["Property", "Value"], _net_summary(doc))
        payload = {"file": net_file, "valid": True, "kind": doc.kind, "name": doc.net.name}
        if isinstance(doc.net, EOS):
            eos_report = eos_validate(doc.net)
            payload["conservative"] = eos_report.conservative
            payload["destroying"] = sorted(eos_report.destroying)
            if not eos_report.conservative:
                print_info(f"Transitions destroying objects: {', '.join(sorted(eos_report.destroying))}")
        _write_json(json_path, payload)
        _write_dot(dot_path, doc.net)
        print_success(f"{net_file} is a valid {doc.kind} document")
    except ValidationError as e:
        _print_violations(e)
        _write_json(json_path, {"file": net_file, "valid": False,
                                "violations": [str(v) for v in e.violations]})
        sys.exit(EXIT_NEGATIVE)
    except DOMAIN_ERRORS as e:
        print_error(f"Invalid document: {e}")
        sys.exit(EXIT_NEGATIVE)


@main.command()
@click.argument('net_file', type=click.Path(exists=True, dir_okay=False))
@click.argument('trace_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--staged', is_flag=True, help='Show the intermediate stages of channel net steps')
@click.option('--json', 'json_path', type=click.Path(dir_okay=False), help='Write the visited states as JSON')
def simulate(net_file: str, trace_file: str, staged: bool, json_path: Optional[str]):
    """Fire a scripted trace of step labels from the initial configuration."""
    try:
        doc = load_doc(net_file)
        if doc.init is None:
            raise click.UsageError(f"{net_file} has no INIT section")
        if staged and not isinstance(doc.net, CNuPN):
            raise click.UsageError("--staged needs a cnupn or rnupn document")
        labels = _read_trace(trace_file)
        limits = get_config_manager().get_limits()
        system = system_for(doc.net, limits)
        state = system.canonical(doc.init)
        rows = [["0", "(init)", format_state(state, doc.net)]]
        visited = [{"step": None, "state": format_state(state, doc.net)}]
        for index, label in enumerate(labels):
            lossy = label.startswith("~")
            successor = None
            for step, candidate in system.expand(state, lossy):
                if str(step) == label:
                    successor = system.canonical(candidate)
                    break
            if successor is None:
                raise StepNotEnabled(index, label)
            entry: Dict[str, Any] = {"step": label}
            if staged and not lossy:
                step = Step.parse(label)
                modes = cnupn_modes(doc.net, state, step.name, cap=limits.max_modes)
                stages = cnupn_fire_staged(doc.net, state, step.name, modes[step.mode])
                names = ("inputs removed", "transferred", "outputs added")
                for name, stage in zip(names, stages):
                    rows.append(["", name, format_state(stage, doc.net)])
                entry["stages"] = [format_state(stage, doc.net) for stage in stages]
            state = successor
            rows.append([str(index + 1), label, format_state(state, doc.net)])
            entry["state"] = format_state(state, doc.net)
            visited.append(entry)
        display_table(f"Simulation of {doc.net.name}", ["#", "Step", "State"], rows)
        if isinstance(doc.net, EOS):
            display_tree(state, doc.net, title="Final marking")
        _write_json(json_path, {"file": net_file, "kind": doc.kind, "steps": visited})
        print_success(f"Fired {len(labels)} step(s)")
    except StepNotEnabled as e:
        print_error(str(e))
        sys.exit(EXIT_NEGATIVE)
    except ValidationError as e:
        _print_violations(e)
        sys.exit(EXIT_NEGATIVE)
    except ValueError as e:
        print_error(f"Bad trace file: {e}")
        sys.exit(EXIT_NEGATIVE)
    except DOMAIN_ERRORS as e:
        print_error(f"Simulation failed: {e}")
        sys.exit(EXIT_NEGATIVE)


@main.command()
@click.argument('net_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--kind', '-k', required=True, type=click.Choice(sorted(TRANSLATORS)),
              help='Construction to apply')
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='Write the target document here')
@click.option('--provenance', is_flag=True, help='Record the gadget of every generated element')
@click.option('--json', 'json_path', type=click.Path(dir_okay=False), help='Write a JSON summary')
@click.option('--dot', 'dot_path', type=click.Path(dir_okay=False), help='Export the target structure as DOT')
def translate(net_file: str, kind: str, output: Optional[str], provenance: bool,
              json_path: Optional[str], dot_path: Optional[str]):
    """Apply a construction to a document, carrying its configurations along."""
    try:
        doc = load_doc(net_file)
        translation = get_translator(kind).translate(doc.net)
        target_doc = NetDocument(
            kind_of(translation.target), translation.target,
            init=translation.encode(doc.init) if doc.init is not None else None,
            target=translation.encode(doc.target) if doc.target is not None else None,
            provenance=dict(translation.provenance) if provenance else {},
        )
        if output:
            save_doc(output, target_doc, indent=get_config_manager().json_indent())
            display_table(f"{kind}: generated elements", ["Gadget", "Count"],
                          sorted(translation.tag_counts().items()))
            print_success(f"Wrote {target_doc.kind} document to {output}")
        else:
            click.echo(emit_doc(target_doc), nl=False)
        _write_json(json_path, {
            "file": net_file,
            "kind": kind,
            "source": doc.kind,
            "target": target_doc.kind,
            "tags": translation.tag_counts(),
        })
        _write_dot(dot_path, translation.target)
    except ValidationError as e:
        _print_violations(e)
        sys.exit(EXIT_NEGATIVE)
    except DOMAIN_ERRORS as e:
        print_error(f"Translation failed: {e}")
        sys.exit(EXIT_NEGATIVE)


@main.command()
@click.argument('net_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--target', '-t', 'target_file', type=click.Path(exists=True, dir_okay=False),
              help='Target configuration (defaults to the TARGET section)')
@click.option('--lossy', is_flag=True, help='Allow tokens to be lost between steps')
@click.option('--exhaustive-loss', is_flag=True, help='Consider every loss step for EOS documents')
@click.option('--trace', 'trace_path', type=click.Path(dir_okay=False), help='Write the witness trace here')
@click.option('--json', 'json_path', type=click.Path(dir_okay=False), help='Write the verdict as JSON')
@limit_options
def cover(net_file: str, target_file: Optional[str], lossy: bool, exhaustive_loss: bool,
          trace_path: Optional[str], json_path: Optional[str], **limit_flags):
    """Search for a reachable configuration covering the target."""
    try:
        limits = _limits(**limit_flags)
        doc = load_doc(net_file)
        if doc.init is None:
            raise click.UsageError(f"{net_file} has no INIT section")
        target = _load_target(doc, target_file) if target_file else doc.target
        if target is None:
            raise click.UsageError("No target: pass --target or add a TARGET section")
        options = {"exhaustive_loss": exhaustive_loss} if isinstance(doc.net, EOS) else {}
        system = system_for(doc.net, limits, **options)
        verdict = coverability(system, doc.init, target, lossy=lossy, limits=limits)
        _write_json(json_path, dict(verdict.to_dict(), file=net_file, lossy=lossy))
        if verdict.covered:
            if trace_path:
                Path(trace_path).write_text("".join(f"{label}\n" for label in verdict.trace),
                                            encoding="utf-8")
            display_panel("\n".join(verdict.trace) or "(empty trace)",
                          title=f"Witness of length {verdict.depth}", style="green")
            print_success(f"Target covered after {verdict.states} state(s)")
            return
        if verdict.outcome == "error":
            print_error(f"Search failed: {verdict.message}")
            sys.exit(EXIT_NEGATIVE)
        if verdict.exhausted:
            print_error(f"Target not coverable: state space exhausted at {verdict.states} state(s)")
            sys.exit(EXIT_NEGATIVE)
        print_warning(f"Inconclusive: search bounded by {verdict.boundary} after {verdict.states} state(s)")
        sys.exit(EXIT_INCONCLUSIVE)
    except OrderUnavailable as e:
        raise click.UsageError(str(e))
    except ValidationError as e:
        _print_violations(e)
        sys.exit(EXIT_NEGATIVE)
    except DOMAIN_ERRORS as e:
        print_error(f"Coverability check failed: {e}")
        sys.exit(EXIT_NEGATIVE)


@main.command()
@click.option('--kind', '-k', required=True, type=click.Choice(GEN_KINDS), help='Formalism to generate')
@click.option('--seed', '-s', type=int, default=0, show_default=True, help='Random seed')
@click.option('--conservative', is_flag=True, help='Only generate conservative EOS')
@click.option('--places', type=click.IntRange(min=1), default=3, show_default=True)
@click.option('--transitions', type=click.IntRange(min=1), default=2, show_default=True)
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='Write the document here')
def gen(kind: str, seed: int, conservative: bool, places: int, transitions: int, output: Optional[str]):
    """Generate a random net with an initial configuration."""
    try:
        size = SizeParams(places=places, transitions=transitions, conservative=conservative)
        instance = random_instance(kind, seed, size)
        doc = NetDocument(kind, instance.net, init=instance.init)
        if output:
            save_doc(output, doc)
            print_success(f"Wrote {kind} instance for seed {seed} to {output}")
        else:
            click.echo(emit_doc(doc), nl=False)
    except ValidationError as e:
        _print_violations(e)
        sys.exit(EXIT_NEGATIVE)
    except DOMAIN_ERRORS as e:
        print_error(f"Generation failed: {e}")
        sys.exit(EXIT_NEGATIVE)


@main.command(name='crosscheck')
@click.argument('net_file', required=False, type=click.Path(exists=True, dir_okay=False))
@click.option('--kind', '-k', required=True, type=click.Choice(CHECK_KINDS), help='Construction to check')
@click.option('--seed', '-s', type=int, default=0, show_default=True, help='First seed')
@click.option('--count', '-n', type=click.IntRange(min=1), default=1, show_default=True,
              help='Number of seeded sources (without NET_FILE)')
@click.option('--samples', type=click.IntRange(min=1), help='Source states per step check')
@click.option('--targets', type=click.IntRange(min=1), help='Coverability questions per run')
@click.option('--exhaustive-loss', is_flag=True, help='Exhaustive loss steps for lossy searches')
@click.option('--json', 'json_path', type=click.Path(dir_okay=False), help='Write the report as JSON')
@limit_options
def crosscheck_command(net_file: Optional[str], kind: str, seed: int, count: int,
                       samples: Optional[int], targets: Optional[int],
                       exhaustive_loss: bool, json_path: Optional[str], **limit_flags):
    """Check a construction against its source, on a document or on seeded random nets."""
    try:
        limits = _limits(**limit_flags)
        manager = get_config_manager()
        options = manager.crosscheck_options()
        if samples:
            options["samples"] = samples
        if targets:
            options["targets"] = targets
        if exhaustive_loss:
            options["exhaustive_loss"] = True
        if net_file:
            doc = load_doc(net_file)
            if doc.init is None:
                raise click.UsageError(f"{net_file} has no INIT section")
            report = crosscheck(kind, doc.net, doc.init, limits, seed=seed, **options)
        else:
            report = crosscheck_seeded(kind, seed, count, limits, **options)

        display_table(f"Cross-check {kind}", ["Checks", "Mismatches", "Inconclusive", "States", "Depth"],
                      [[len(report.verdicts), len(report.mismatches), len(report.inconclusive),
                        report.states, report.depth]])
        for mismatch in report.mismatches[:10]:
            display_panel("\n".join(f"{k}: {v}" for k, v in sorted(mismatch.items())),
                          title="Mismatch", style="red")
        payload = report.to_dict()
        _write_json(json_path, payload)
        try:
            ReportStore(manager.config_dir).record(payload, Path(json_path) if json_path else None)
        except ReportError as e:
            print_warning(f"Run not logged: {e}")

        if report.mismatches:
            print_error(f"{len(report.mismatches)} mismatch(es)")
            sys.exit(EXIT_NEGATIVE)
        if report.inconclusive:
            print_warning(f"No mismatch, but {len(report.inconclusive)} check(s) hit a bound")
            sys.exit(EXIT_INCONCLUSIVE)
        print_success(f"No mismatch over {len(report.verdicts)} check(s)")
    except ValidationError as e:
        _print_violations(e)
        sys.exit(EXIT_NEGATIVE)
    except DOMAIN_ERRORS as e:
        print_error(f"Cross-check failed: {e}")
        sys.exit(EXIT_NEGATIVE)


@main.group()
def report():
    """Inspect the log of cross-check runs."""
    pass


@report.command(name='list')
@click.option('--limit', '-n', type=click.IntRange(min=1), default=20, show_default=True)
def report_list(limit: int):
    """Show the most recent cross-check runs."""
    try:
        runs = ReportStore(get_config_manager().config_dir).list_runs(limit)
        if not runs:
            print_info("No cross-check runs recorded")
            return
        display_table("Cross-check runs", ["#", "When", "Kind", "Seed", "Checks", "Mismatches",
                                           "Inconclusive", "Report"],
                      [[r["id"], r["timestamp"][:19], r["kind"], r["seed"], r["checks"],
                        r["mismatches"], r["inconclusive"], r["path"] or "-"] for r in runs])
    except (ConfigError, ReportError) as e:
        print_error(f"Failed to read run log: {e}")
        sys.exit(EXIT_NEGATIVE)


@report.command(name='clear')
def report_clear():
    """Forget every recorded run."""
    try:
        ReportStore(get_config_manager().config_dir).clear()
        print_success("Run log cleared")
    except (ConfigError, ReportError) as e:
        print_error(f"Failed to clear run log: {e}")
        sys.exit(EXIT_NEGATIVE)


def run_cli(args: List[str]) -> int:
    """Run the CLI in-process and return its exit code."""
    try:
        main.main(args=list(args), prog_name="nwn")
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else (0 if e.code is None else EXIT_NEGATIVE)
    return EXIT_OK


if __name__ == '__main__':
    main()
