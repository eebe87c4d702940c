"""Core formalisms: multisets, Petri nets, νPNs, channel νPNs and EOSs."""

from .cnupn import CNuPN, ChannelMatrix, cnupn_fire, cnupn_modes, cnupn_validate, is_rnupn
from .eos import EOS, Event, NestedToken, eos_fire, eos_validate, event_modes, leq_f
from .errors import NetError, ValidationError, Violation
from .ms import Multiset, PlaceVector, embeds
from .nupn import NuConfig, NuMode, NuPN, Variable, nupn_fire, nupn_modes, nupn_validate
from .petri import PetriNet, pn_enabled, pn_fire

__all__ = [
    "CNuPN", "ChannelMatrix", "cnupn_fire", "cnupn_modes", "cnupn_validate", "is_rnupn",
    "EOS", "Event", "NestedToken", "eos_fire", "eos_validate", "event_modes", "leq_f",
    "NetError", "ValidationError", "Violation", "Multiset", "PlaceVector", "embeds",
    "NuConfig", "NuMode", "NuPN", "Variable", "nupn_fire", "nupn_modes", "nupn_validate",
    "PetriNet", "pn_enabled", "pn_fire",
]
