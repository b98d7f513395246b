"""Synthetic transaction logs with planted phishing accounts.

Normal accounts trade with each other at random. A phishing account collects
many small transfers from a crowd of victims and forwards the proceeds to a
few cash-out accounts, i.e. it sits at the center of a high in-count star.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import TransactionRecord


@dataclass(frozen=True)
class SyntheticSpec:
    n_accounts: int = 5000
    n_phishing: int = 100
    mean_out_partners: float = 2.0
    victims_range: tuple[int, int] = (20, 60)
    cashout_range: tuple[int, int] = (1, 3)
    t0: int = 1_600_000_000


def _addresses(rng: np.random.Generator, n: int) -> list[str]:
    raw = rng.integers(0, 256, size=(n, 20), dtype=np.uint8)
    out = sorted({"0x" + row.tobytes().hex() for row in raw})
    while len(out) < n:  # astronomically unlikely collision
        out = sorted(set(out) | {"0x" + rng.integers(0, 256, 20, dtype=np.uint8).tobytes().hex()})
    return list(rng.permutation(out))


def make_transactions(spec: SyntheticSpec = SyntheticSpec(),
                      seed: int = 0) -> tuple[list[TransactionRecord], frozenset[str]]:
    """Generate (records, phishing labels)."""
    rng = np.random.default_rng(seed)
    ids = _addresses(rng, spec.n_accounts)
    phishers = np.arange(spec.n_phishing)
    normals = np.arange(spec.n_phishing, spec.n_accounts)
    records = []
    clock = spec.t0

    def emit(src, dst, times, scale):
        nonlocal clock
        for _ in range(times):
            clock += int(rng.integers(1, 600))
            amount = float(np.round(rng.lognormal(mean=np.log(scale), sigma=1.0), 6))
            records.append(TransactionRecord(ids[src], ids[dst], amount, clock))

    for u in normals:
        for _ in range(rng.poisson(spec.mean_out_partners)):
            v = int(rng.choice(normals))
            if v != u:
                emit(u, v, int(rng.geometric(0.5)), 1.0)

    lo, hi = spec.victims_range
    clo, chi = spec.cashout_range
    for p in phishers:
        victims = rng.choice(normals, size=int(rng.integers(lo, hi + 1)), replace=False)
        for v in victims:
            emit(v, p, int(rng.integers(1, 4)), 0.5)
        for c in rng.choice(normals, size=int(rng.integers(clo, chi + 1)), replace=False):
            emit(p, c, int(rng.integers(1, 3)), 10.0)

    order = rng.permutation(len(records))
    return [records[i] for i in order], frozenset(ids[i] for i in phishers)
