"""Tuple stores with interned constants and per-column indexes.

A database maps relation symbols to relations; constants are interned to
dense integers at load so downstream joins and semi-joins are integer
dictionary lookups.  The on-disk format is one headerless CSV per relation,
filename = relation symbol, fields opaque strings.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Iterator


class DatabaseError(ValueError):
    pass


class Relation:
    """A set of equal-arity tuples of interned constants."""

    def __init__(self, arity: int):
        if arity < 0:
            raise DatabaseError("arity must be nonnegative")
        self.arity = arity
        self.tuples: set[tuple[int, ...]] = set()
        self._col_index: list[dict[int, set[tuple[int, ...]]]] | None = None

    def add(self, row: tuple[int, ...]):
        if len(row) != self.arity:
            raise DatabaseError(
                f"tuple of arity {len(row)} added to relation of arity {self.arity}"
            )
        self.tuples.add(row)
        self._col_index = None

    def __len__(self):
        return len(self.tuples)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.tuples)

    def column_index(self, col: int) -> dict[int, set[tuple[int, ...]]]:
        if self._col_index is None:
            self._col_index = [dict() for _ in range(self.arity)]
            for row in self.tuples:
                for c, value in enumerate(row):
                    self._col_index[c].setdefault(value, set()).add(row)
        return self._col_index[col]

    def column_values(self, col: int) -> set[int]:
        return set(self.column_index(col)) if self.tuples else set()


class Database:
    """Relations plus an interned constant pool."""

    def __init__(self):
        self.relations: dict[str, Relation] = {}
        self._ids: dict[str, int] = {}
        self._values: list[str] = []

    # -- constant pool --
    def intern(self, value: str) -> int:
        i = self._ids.get(value)
        if i is None:
            i = len(self._values)
            self._ids[value] = i
            self._values.append(value)
        return i

    def lookup(self, value: str) -> int | None:
        return self._ids.get(value)

    def decode(self, i: int) -> str:
        return self._values[i]

    def decode_tuple(self, row: Iterable[int]) -> tuple[str, ...]:
        return tuple(self._values[i] for i in row)

    # -- relations --
    def add_tuple(self, symbol: str, values: Iterable[str]):
        row = tuple(self.intern(v) for v in values)
        rel = self.relations.get(symbol)
        if rel is None:
            rel = self.relations[symbol] = Relation(len(row))
        rel.add(row)

    def ensure_relation(self, symbol: str, arity: int) -> Relation:
        rel = self.relations.get(symbol)
        if rel is None:
            rel = self.relations[symbol] = Relation(arity)
        elif rel.arity != arity:
            raise DatabaseError(
                f"relation {symbol} has arity {rel.arity}, expected {arity}"
            )
        return rel

    def relation(self, symbol: str, arity: int) -> Relation:
        """The stored relation, or an empty one of the requested arity."""
        rel = self.relations.get(symbol)
        if rel is None:
            return Relation(arity)
        if rel.arity != arity:
            raise DatabaseError(
                f"relation {symbol} has arity {rel.arity}, query expects {arity}"
            )
        return rel

    def size(self) -> int:
        return sum(len(r) for r in self.relations.values())

    def active_domain(self) -> set[int]:
        out: set[int] = set()
        for rel in self.relations.values():
            for row in rel:
                out.update(row)
        return out


def load_database(path: str | Path) -> Database:
    """Load a directory of per-relation CSV files.

    Rows are deduplicated; ragged rows within one file are an arity error.
    """
    path = Path(path)
    if not path.is_dir():
        raise DatabaseError(f"{path} is not a directory")
    db = Database()
    for file in sorted(path.glob("*.csv")):
        symbol = file.stem
        with open(file, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row:
                    continue
                rel = db.relations.get(symbol)
                if rel is not None and len(row) != rel.arity:
                    raise DatabaseError(
                        f"{file}:{lineno}: row of arity {len(row)}, "
                        f"expected {rel.arity}"
                    )
                db.add_tuple(symbol, row)
    return db


def save_database(db: Database, path: str | Path):
    """Write one CSV per relation into `path` (created if needed)."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    for symbol, rel in sorted(db.relations.items()):
        with open(path / f"{symbol}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            for row in sorted(rel.tuples):
                writer.writerow(db.decode_tuple(row))
