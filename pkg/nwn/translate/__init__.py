"""The constructions between formalisms, keyed by their CLI name."""

from typing import Dict, Type

from .base import GEN_PREFIX, NameGen, ProvenanceEntry, Translation, Translator
from .ceos_cnupn import CeosToCnu, ceos_to_cnupn
from .cnupn_rnupn import CnuToRnu, cnupn_to_rnupn
from .normalize import (
    ConservativeCloser, Normalizer, conservative_closure, destroy_set, normalization,
    normalize_eos,
)
from .nupn_ceos import NuToCeos, nupn_to_ceos
from .pn_cnupn import PnToCnu, pn_to_cnupn
from .rnupn_ceos import RnuToCeos, rnupn_to_ceos


TRANSLATORS: Dict[str, Type[Translator]] = {
    cls.kind: cls
    for cls in (PnToCnu, NuToCeos, RnuToCeos, CeosToCnu, CnuToRnu, ConservativeCloser, Normalizer)
}


def get_translator(kind: str) -> Translator:
    """Instantiate the construction registered under ``kind``.

    Raises:
        KeyError: If no construction has that name.
    """
    return TRANSLATORS[kind]()


__all__ = [
    "GEN_PREFIX", "NameGen", "ProvenanceEntry", "Translation", "Translator", "TRANSLATORS",
    "get_translator", "ceos_to_cnupn", "cnupn_to_rnupn", "conservative_closure", "destroy_set",
    "normalization", "normalize_eos", "nupn_to_ceos", "pn_to_cnupn", "rnupn_to_ceos",
]
