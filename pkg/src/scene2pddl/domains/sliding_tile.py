"""Sliding-tile puzzle on a w x h grid with numbered tiles and one blank."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import ClassVar, Iterable

from ..pddl import Atom
from .base import (
    DomainId,
    DomainModel,
    InconsistentState,
    MissingAtoms,
    UniverseMismatch,
    UnparseableState,
    atoms_by_predicate,
    candidate_block,
    expect_arity,
)

BLANK = 0
_HEADER = re.compile(r"^grid\s+(\d+)\s*x\s*(\d+)\s*:?$")
_ROW = re.compile(r"^[\d_\s]+$")
_TILE = re.compile(r"^t(\d+)$")
_POS = re.compile(r"^p(\d+)$")


def tile_name(n: int) -> str:
    return f"t{n}"


def pos_name(i: int) -> str:
    return f"p{i}"


@dataclass(frozen=True)
class TileState:
    """Row-major cells, top row first; 0 marks the blank."""

    width: int
    height: int
    cells: tuple[int, ...]
    domain: ClassVar[DomainId] = DomainId.SLIDING_TILE

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        if self.width < 1 or self.height < 1 or self.width * self.height < 2:
            raise InconsistentState(f"bad grid size {self.width}x{self.height}", "GRID_SIZE")
        if sorted(self.cells) != list(range(self.width * self.height)):
            raise InconsistentState("cells must hold tiles 1..w*h-1 and one blank", "TILE_SET")

    @classmethod
    def solved(cls, width: int, height: int | None = None) -> TileState:
        height = height or width
        n = width * height
        return cls(width, height, tuple(range(1, n)) + (BLANK,))

    def at(self, x: int, y: int) -> int:
        return self.cells[(y - 1) * self.width + (x - 1)]

    def position(self, value: int) -> tuple[int, int]:
        i = self.cells.index(value)
        return i % self.width + 1, i // self.width + 1

    @property
    def blank(self) -> tuple[int, int]:
        return self.position(BLANK)

    @property
    def n_tiles(self) -> int:
        return self.width * self.height - 1

    def rows(self) -> list[tuple[int, ...]]:
        w = self.width
        return [self.cells[r * w : (r + 1) * w] for r in range(self.height)]

    def neighbors(self) -> list[TileState]:
        """States one slide away, in up/down/left/right blank-move order."""
        bx, by = self.blank
        out = []
        for dx, dy in ((0, -1), (0, 1), (-1, 0), (1, 0)):
            x, y = bx + dx, by + dy
            if 1 <= x <= self.width and 1 <= y <= self.height:
                cells = list(self.cells)
                i, j = (by - 1) * self.width + bx - 1, (y - 1) * self.width + x - 1
                cells[i], cells[j] = cells[j], cells[i]
                out.append(TileState(self.width, self.height, tuple(cells)))
        return out


def permutation_parity(perm: list[int]) -> int:
    """Parity (0 even, 1 odd) of a permutation of 0..n-1, via cycle count."""
    seen = [False] * len(perm)
    parity = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


class SlidingTileModel(DomainModel):
    id = DomainId.SLIDING_TILE
    asset = "sliding_tile.pddl"
    state_type = TileState
    static_predicates = frozenset({"inc", "dec"})

    def to_predicates(self, s: TileState) -> frozenset[Atom]:
        atoms = set()
        for y in range(1, s.height + 1):
            for x in range(1, s.width + 1):
                v = s.at(x, y)
                if v == BLANK:
                    atoms.add(Atom.of("blank", pos_name(x), pos_name(y)))
                else:
                    atoms.add(Atom.of("at", tile_name(v), pos_name(x), pos_name(y)))
        for i in range(1, max(s.width, s.height)):
            atoms.add(Atom.of("inc", pos_name(i), pos_name(i + 1)))
            atoms.add(Atom.of("dec", pos_name(i + 1), pos_name(i)))
        return frozenset(atoms)

    def objects(self, s: TileState) -> list[tuple[str, str]]:
        tiles = [(tile_name(n), "tile") for n in range(1, s.n_tiles + 1)]
        return tiles + [(pos_name(i), "position") for i in range(1, max(s.width, s.height) + 1)]

    def goal_atoms(self, s: TileState) -> tuple[Atom, ...]:
        atoms = [a for a in self.to_predicates(s) if a.predicate == "at"]
        return tuple(sorted(atoms, key=lambda a: a.key))

    @staticmethod
    def _index(name: str, pattern: re.Pattern, what: str) -> int:
        m = pattern.match(name)
        if m is None or int(m.group(1)) < 1:
            raise InconsistentState(f"{name!r} is not a valid {what} name", "BAD_NAME")
        return int(m.group(1))

    def from_predicates(self, atoms: Iterable[Atom], objects: dict[str, str] | None = None) -> TileState:
        by = atoms_by_predicate(atoms, ("at", "blank", "inc", "dec", "tile", "position"))
        where: dict[int, tuple[int, int]] = {}
        occupant: dict[tuple[int, int], int] = {}
        for args in by["at"]:
            expect_arity("at", args, 3)
            t = self._index(args[0], _TILE, "tile")
            cell = (self._index(args[1], _POS, "position"), self._index(args[2], _POS, "position"))
            if where.get(t, cell) != cell:
                raise InconsistentState(f"tile {t} is at two cells", "TILE_AT_TWO_CELLS")
            if occupant.get(cell, t) != t:
                raise InconsistentState(f"cell {cell} holds tiles {occupant[cell]} and {t}", "CELL_SHARED")
            where[t] = cell
            occupant[cell] = t
        blanks = set()
        for args in by["blank"]:
            expect_arity("blank", args, 2)
            blanks.add((self._index(args[0], _POS, "position"), self._index(args[1], _POS, "position")))
        if len(blanks) > 1:
            raise InconsistentState(f"several blank cells: {sorted(blanks)}", "TWO_BLANKS")
        for cell in blanks & set(occupant):
            raise InconsistentState(f"blank cell {cell} holds tile {occupant[cell]}", "BLANK_OCCUPIED")
        cells_seen = set(occupant) | blanks
        if not cells_seen:
            raise MissingAtoms("no tile positions given", "EMPTY")
        width = max(x for x, _ in cells_seen)
        height = max(y for _, y in cells_seen)
        n = width * height
        if objects is not None:
            declared = [o for o, t in objects.items() if _TILE.match(o)]
            for name in declared:
                t = self._index(name, _TILE, "tile")
                if t not in where:
                    raise MissingAtoms(f"tile {t} has no position", "UNPOSITIONED_TILE")
        bad = sorted(t for t in where if t >= n)
        if bad:
            raise InconsistentState(f"tile number(s) {bad} exceed a {width}x{height} grid", "TILE_SET")
        missing_tiles = sorted(set(range(1, n)) - set(where))
        if missing_tiles:
            raise MissingAtoms(f"tile(s) {missing_tiles} have no position", "UNPOSITIONED_TILE")
        empty = [(x, y) for y in range(1, height + 1) for x in range(1, width + 1) if (x, y) not in occupant]
        if blanks and set(empty) != blanks:
            raise InconsistentState("blank atom disagrees with the free cell", "BLANK_CONFLICT")
        cells = [occupant.get((x, y), BLANK) for y in range(1, height + 1) for x in range(1, width + 1)]
        return TileState(width, height, tuple(cells))

    def serialize(self, s: TileState) -> str:
        lines = [f"grid {s.width}x{s.height}"]
        for row in s.rows():
            lines.append(" ".join("_" if v == BLANK else str(v) for v in row))
        return "\n".join(lines) + "\n"

    def parse(self, text: str) -> TileState:
        block = candidate_block(text, lambda line: bool(_HEADER.match(line) or _ROW.match(line)))
        start = next((i for i, line in enumerate(block) if _HEADER.match(line)), None)
        if start is None:
            raise UnparseableState("missing 'grid WxH' header", line=block[0])
        m = _HEADER.match(block[start])
        width, height = int(m.group(1)), int(m.group(2))
        rows = block[start + 1 : start + 1 + height]
        if len(rows) < height:
            raise UnparseableState(f"expected {height} rows, found {len(rows)}", line=block[start])
        cells = []
        for line in rows:
            tokens = line.split()
            if len(tokens) != width:
                raise UnparseableState(f"expected {width} entries per row", line=line)
            for tok in tokens:
                if tok in ("_", "0"):
                    cells.append(BLANK)
                elif tok.isdigit():
                    cells.append(int(tok))
                else:
                    raise UnparseableState(f"bad tile entry {tok!r}", line=line)
        try:
            return TileState(width, height, tuple(cells))
        except InconsistentState as exc:
            raise UnparseableState(str(exc)) from exc

    def is_solvable(self, init: TileState, goal: TileState) -> bool:
        """Parity test: the cell permutation taking init to goal (blank included)
        must have the same parity as the blank's taxicab displacement."""
        if (init.width, init.height) != (goal.width, goal.height):
            raise UniverseMismatch("grids differ in size")
        target = {v: i for i, v in enumerate(goal.cells)}
        perm = [target[v] for v in init.cells]
        (ax, ay), (bx, by) = init.blank, goal.blank
        return permutation_parity(perm) == (abs(ax - bx) + abs(ay - by)) & 1


MODEL = SlidingTileModel()
