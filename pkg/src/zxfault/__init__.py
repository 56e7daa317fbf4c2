"""Fault-aware ZX/Clifford toolkit.

Circuits and ZX diagrams with adversarial noise models, Pauli webs and
detecting regions, exhaustive w-fault-equivalence checking against an exact
tensor oracle, and machine-checked fault-equivalent rewrite proofs.
"""

__version__ = "0.1.0"
