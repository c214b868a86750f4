"""Energy-optimal radio resource allocation for multi-hop relayed MEC
offloading, with exact small-scale convex solvers for the three mixed
half/full-duplex relaying cases and a Monte Carlo evaluation harness."""

from mecrelay._core import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
