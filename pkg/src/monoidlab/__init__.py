"""monoidlab: equational reasoning over finite monoids at desk scale.

Subpackages/modules:

- ``words``     words, identities, substitutions, word families, matching
- ``monoids``   finite multiplication tables, presentations, catalog
- ``equations`` satisfaction, relatively free monoids, isoterms, membership
- ``deduction`` derivation steps/scripts, canonical forms, reductions
- ``lattice``   poset figures, lattice validation, semantic edge checks
- ``manifest``  bundled expectation manifests
- ``cli``       command-line interface
"""

from .words import (
    EMPTY,
    Identity,
    Word,
    WordSyntaxError,
    format_identity,
    format_word,
    parse_identity,
    parse_word,
)

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "Identity",
    "Word",
    "WordSyntaxError",
    "format_identity",
    "format_word",
    "parse_identity",
    "parse_word",
    "__version__",
]
