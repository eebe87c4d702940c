"""nwn: object systems, data nets with transfers, and the constructions between them."""

__version__ = "1.0.0"
__author__ = "nwn developers"
