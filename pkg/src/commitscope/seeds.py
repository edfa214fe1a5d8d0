"""Deterministic seed derivation.

Every stochastic component draws its seed from the single top-level run seed
combined with a component label, so whole-pipeline runs are reproducible and
per-entity work units stay independent of iteration order.
"""

import hashlib


def derive_seed(master: int, *labels: str | int) -> int:
    """Derive a 64-bit child seed from a master seed and component labels."""
    h = hashlib.sha256(str(int(master)).encode("utf-8"))
    for label in labels:
        h.update(b"\x00")
        h.update(str(label).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")
