"""Orthogonal matroids with coefficients in tracts.

Exact computation of Wick functions, orthogonal signatures, circuit sets and
vector sets over tracts, with the conversions between them and a few
representability procedures. Run ``python -m orthomat --help`` for the CLI.
"""

__version__ = "0.1.0"
