"""Petri nets as single-tuple channel nets."""

import logging

from ..core.cnupn import CNuPN, lift_marking, lower_config, pn_as_cnupn
from ..core.errors import InvalidSource
from ..core.nupn import NuConfig
from ..core.petri import PetriNet
from .base import NameGen, Translation, Translator


logger = logging.getLogger(__name__)


class PnToCnu(Translator):
    """Lift every transition to one standard variable acting on the only tuple."""

    kind = "pn2cnupn"

    def check_source(self, source: PetriNet):
        if not isinstance(source, PetriNet):
            raise InvalidSource("source is not a Petri net")

    def build(self, source: PetriNet) -> Translation:
        target: CNuPN = pn_as_cnupn(source)
        names = NameGen(source.places + source.transitions)
        for place in target.places:
            if place not in source.places:
                names.tag(place, "live", "")

        def is_anchor(config: NuConfig) -> bool:
            return len(config.without_zero()) <= 1

        return Translation(
            self.kind, source, target, lambda marking: lift_marking(target, marking),
            names.provenance, is_anchor=is_anchor,
            decode=lambda config: lower_config(target, config),
        )


def pn_to_cnupn(net: PetriNet) -> Translation:
    return PnToCnu().translate(net)
