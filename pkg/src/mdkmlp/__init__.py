"""Multi-depot k-vehicle minimum latency solver toolkit.

Subpackages cover instance handling, concatenation-graph machinery,
arborescence packing, an exact-rational LP toolkit, prize-collecting trees,
the latency approximation algorithms, and exact brute-force oracles.
"""

__version__ = "0.1.0"
