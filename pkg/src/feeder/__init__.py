"""Profit-maximising feeder services around a single interchange.

Route enumeration, pricing, offline route reduction and the feed-in,
supply-optimisation and feed-out linear programs, with an exact-arithmetic
reference oracle for cross-checking.
"""

__version__ = "0.1.0"
