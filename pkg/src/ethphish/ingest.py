"""Parsing of raw transaction dumps and label lists, and graph construction."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import ConfigError, ParseError
from .graph import TransactionGraph

REQUIRED_COLUMNS = ("from", "to", "value", "timestamp")


@dataclass(frozen=True, slots=True)
class TransactionRecord:
    from_account: str
    to_account: str
    amount: float
    timestamp: int


def normalize_account(raw: str) -> str:
    return raw.strip().lower()


def _text_stream(source) -> IO[str]:
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"))
    if isinstance(source, str):
        return io.StringIO(source)
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8")


def parse_transactions(source, delimiter: str = ",") -> list[TransactionRecord]:
    """Parse a delimited transaction table.

    ``source`` may be bytes, str, a binary stream or a text stream. The header
    row must name the columns ``from``, ``to``, ``value`` and ``timestamp``
    (any order, extra columns ignored). Line numbers in errors are 1-based and
    count the header as line 1.
    """
    reader = csv.reader(_text_stream(source), delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigError("transaction file is empty (no header row)") from None
    header = [h.strip().lower() for h in header]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise ConfigError(f"transaction header lacks required column(s): {', '.join(missing)}")
    idx = [header.index(c) for c in REQUIRED_COLUMNS]
    width = len(header)

    records = []
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != width:
            raise ParseError(line, f"expected {width} columns, found {len(row)}")
        src, dst, value, ts = (row[i].strip() for i in idx)
        if not src or not dst:
            raise ParseError(line, "empty account identifier")
        try:
            amount = float(value)
        except ValueError:
            raise ParseError(line, f"unparsable value {value!r}") from None
        if not math.isfinite(amount) or amount < 0:
            raise ParseError(line, f"amount must be a finite non-negative number, got {value!r}")
        try:
            stamp = int(ts)
        except ValueError:
            raise ParseError(line, f"unparsable timestamp {ts!r}") from None
        if stamp < 0:
            raise ParseError(line, f"negative timestamp {ts!r}")
        records.append(TransactionRecord(normalize_account(src), normalize_account(dst), amount, stamp))
    return records


def parse_labels(source) -> frozenset[str]:
    """Read one account per line; ``#`` starts a comment, blank lines are skipped."""
    labels = set()
    for line in _text_stream(source):
        entry = line.split("#", 1)[0].strip()
        if entry:
            labels.add(normalize_account(entry))
    return frozenset(labels)


def build_graph(records: Sequence[TransactionRecord], labels: Iterable[str] = ()) -> TransactionGraph:
    """Aggregate records into one edge per ordered pair carrying (sum of amounts, count).

    Self-transfers are dropped, but their account still becomes a node.
    Nodes are indexed in sorted identifier order and amounts are summed in a
    canonical order, so any permutation of ``records`` gives an identical graph.
    """
    accounts = sorted({r.from_account for r in records} | {r.to_account for r in records})
    index = {acc: i for i, acc in enumerate(accounts)}
    n = len(accounts)
    src = np.fromiter((index[r.from_account] for r in records), dtype=np.int64, count=len(records))
    dst = np.fromiter((index[r.to_account] for r in records), dtype=np.int64, count=len(records))
    amt = np.fromiter((r.amount for r in records), dtype=np.float64, count=len(records))

    keep = src != dst
    src, dst, amt = src[keep], dst[keep], amt[keep]
    key = src * max(n, 1) + dst
    order = np.lexsort((amt, key))
    key, amt = key[order], amt[order]
    if len(key):
        starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
        a = np.add.reduceat(amt, starts)
        t = np.diff(np.r_[starts, len(key)]).astype(np.int64)
        ukey = key[starts]
    else:
        a = np.zeros(0)
        t = np.zeros(0, dtype=np.int64)
        ukey = np.zeros(0, dtype=np.int64)

    labels = {normalize_account(x) for x in labels}
    phishing = np.fromiter((acc in labels for acc in accounts), dtype=bool, count=n)
    return TransactionGraph(accounts, ukey // max(n, 1), ukey % max(n, 1), a, t, phishing)
