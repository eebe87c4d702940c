"""Terminal output: messages, tables, panels and renderings of net states."""

from rich.console import Console
from rich.table import Table
from rich.panel import Panel
from rich.tree import Tree
from typing import Any, List, Optional, Sequence
import logging
import os
import sys

from .core.eos import BLACK, EOS
from .core.ms import Multiset
from .core.nupn import NuConfig


logger = logging.getLogger(__name__)


def _test_unicode_support() -> bool:
    """Test if the terminal encoding can render the net symbols."""
    try:
        "✔✘⚠ℹ⟨⟩ν".encode(sys.stdout.encoding or 'utf-8')
        return True
    except (UnicodeEncodeError, LookupError):
        return False


_CAN_USE_UNICODE = _test_unicode_support()

if _CAN_USE_UNICODE:
    SYMBOLS = {
        'success': '✔',
        'error': '✘',
        'warning': '⚠',
        'info': 'ℹ',
        'open': '⟨',
        'close': '⟩',
        'empty': '∅',
        'arrow': '→',
    }
else:
    SYMBOLS = {
        'success': 'v',
        'error': 'X',
        'warning': '!',
        'info': 'i',
        'open': '<',
        'close': '>',
        'empty': '{}',
        'arrow': '->',
    }


def _make_console() -> Console:
    if os.environ.get("NWN_COLOR") == "0":
        return Console(no_color=True, highlight=False, emoji=False)
    return Console(highlight=False, emoji=False)


console = _make_console()


def set_color(enabled: bool):
    """Switch styling on or off for every later message."""
    global console
    if enabled and os.environ.get("NWN_COLOR") != "0":
        console = Console(highlight=False, emoji=False)
    else:
        console = Console(no_color=True, highlight=False, emoji=False)


def _safe_print(content, **kwargs):
    """Safely print content to the console."""
    try:
        console.print(content, **kwargs)
    except Exception as e:
        logger.error(f"Console print failed: {e}")
        print(str(content))


def print_success(message: str):
    _safe_print(f"{SYMBOLS['success']} {message}", style="bold green", markup=False)


def print_error(message: str):
    _safe_print(f"{SYMBOLS['error']} {message}", style="bold red", markup=False)


def print_warning(message: str):
    _safe_print(f"{SYMBOLS['warning']} {message}", style="bold yellow", markup=False)


def print_info(message: str):
    _safe_print(f"{SYMBOLS['info']} {message}", style="bold blue", markup=False)


def display_table(title: str, headers: List[str], rows: Sequence[Sequence[Any]],
                  show_lines: bool = False):
    """Display a formatted table."""
    try:
        table = Table(title=title, show_lines=show_lines)
        for header in headers:
            table.add_column(header, style="cyan")
        for row in rows:
            table.add_row(*(str(cell) for cell in row))
        _safe_print(table)
    except Exception as e:
        logger.error(f"Table display failed: {e}")
        print_error(f"Failed to display table: {e}")


def display_panel(content: str, title: str = "", style: str = ""):
    """Display content in a bordered panel."""
    try:
        _safe_print(Panel(content, title=title, border_style=style))
    except Exception as e:
        logger.error(f"Panel display failed: {e}")
        print_error(f"Failed to display panel: {e}")


def format_marking(marking: Multiset) -> str:
    """``2*p1 + p3``, or the empty symbol."""
    if not marking:
        return SYMBOLS['empty']
    return " + ".join(str(p) if c == 1 else f"{c}*{p}" for p, c in marking.items())


def format_config(config: NuConfig, places: Optional[Sequence[str]] = None) -> str:
    """Tuples as vectors, or as place sums when ``places`` is given."""
    if not config.tuples:
        return SYMBOLS['empty']
    parts = []
    for vector in config.tuples:
        if places is None:
            parts.append(SYMBOLS['open'] + ",".join(str(c) for c in vector.counts) + SYMBOLS['close'])
        else:
            parts.append("[" + format_marking(vector.to_multiset(places)) + "]")
    return ", ".join(parts)


def format_nested(marking: Multiset) -> str:
    if not marking:
        return SYMBOLS['empty']
    parts = []
    for tok, count in marking.items():
        inner = format_marking(tok.marking) if tok.marking else ""
        text = f"{SYMBOLS['open']}{tok.place}{',' + inner if inner else ''}{SYMBOLS['close']}"
        parts.append(text if count == 1 else f"{count}*{text}")
    return " + ".join(parts)


def format_state(state: Any, net: Any = None) -> str:
    """Render a state of any formalism."""
    if isinstance(state, NuConfig):
        places = getattr(net, "places", None)
        return format_config(state, places)
    if isinstance(state, Multiset) and state and hasattr(state.support()[0], "place"):
        return format_nested(state)
    if isinstance(state, Multiset):
        return format_marking(state)
    return str(state)


def display_tree(marking: Multiset, eos: EOS, title: str = "Marking"):
    """Show a nested marking as system places with their objects underneath."""
    try:
        tree = Tree(title)
        by_place = {}
        for tok, count in marking.items():
            by_place.setdefault(tok.place, []).append((tok, count))
        for place in eos.system.places:
            if place not in by_place:
                continue
            kind = eos.type_of(place)
            node = tree.add(f"{place} : {'black' if kind == BLACK else kind}")
            for tok, count in by_place[place]:
                label = format_marking(tok.marking) if kind != BLACK else "token"
                node.add(label if count == 1 else f"{count} x {label}")
        _safe_print(tree)
    except Exception as e:
        logger.error(f"Tree display failed: {e}")
        print_error(f"Failed to display marking: {e}")
