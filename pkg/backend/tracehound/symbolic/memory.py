"""Byte-addressed symbolic memory over concrete addresses."""

from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from tracehound.symbolic.expr import ZERO, Const, SymValue, const, mk
from tracehound.words import WORD_BYTES

# A cell is a concrete byte, or byte i (big-endian) of a symbolic word.
Cell = Union[int, Tuple[SymValue, int]]


def cell_value(cell: Cell) -> SymValue:
    """The cell as a word in 0..255."""
    if isinstance(cell, int):
        return const(cell)
    expr, i = cell
    if isinstance(expr, Const):
        return const((expr.value >> (8 * (WORD_BYTES - 1 - i))) & 0xFF)
    return mk("byte", const(i), expr)


def word_cells(value: SymValue) -> List[Cell]:
    if isinstance(value, Const):
        return list(value.value.to_bytes(WORD_BYTES, "big"))
    return [(value, i) for i in range(WORD_BYTES)]


def compose(cells: List[Cell]) -> SymValue:
    """Big-endian word from 32 cells."""
    if all(isinstance(c, int) for c in cells):
        return const(int.from_bytes(bytes(cells), "big"))
    first = cells[0]
    if isinstance(first, tuple) and all(
        isinstance(c, tuple) and c[0] == first[0] and c[1] == i for i, c in enumerate(cells)
    ):
        return first[0]
    out: SymValue = ZERO
    run = 0
    for pos, cell in enumerate(cells):
        shift = 8 * (WORD_BYTES - 1 - pos)
        if isinstance(cell, int):
            run |= cell << shift
        else:
            out = mk("or", out, mk("shl", const(shift), cell_value(cell)))
    return mk("or", out, const(run))


class SymMemory:
    """Zero-default byte map; copied on fork."""

    __slots__ = ("cells",)

    def __init__(self, cells: Optional[Dict[int, Cell]] = None):
        self.cells: Dict[int, Cell] = cells if cells is not None else {}

    def copy(self) -> "SymMemory":
        return SymMemory(dict(self.cells))

    def _put(self, offset: int, cell: Cell) -> None:
        if cell == 0:
            self.cells.pop(offset, None)
        else:
            self.cells[offset] = cell

    def store_word(self, offset: int, value: SymValue) -> None:
        for i, cell in enumerate(word_cells(value)):
            self._put(offset + i, cell)

    def store_byte(self, offset: int, value: SymValue) -> None:
        if isinstance(value, Const):
            self._put(offset, value.value & 0xFF)
        else:
            self._put(offset, (value, WORD_BYTES - 1))

    def store_cells(self, offset: int, cells: Iterable[Cell]) -> None:
        for i, cell in enumerate(cells):
            self._put(offset + i, cell)

    def load_cells(self, offset: int, size: int) -> List[Cell]:
        get = self.cells.get
        return [get(offset + i, 0) for i in range(size)]

    def load_word(self, offset: int) -> SymValue:
        return compose(self.load_cells(offset, WORD_BYTES))

    def load_words(self, offset: int, size: int) -> List[SymValue]:
        """`size` bytes as words, the last one zero-padded on the right."""
        cells = self.load_cells(offset, size)
        cells += [0] * (-len(cells) % WORD_BYTES)
        return [compose(cells[i: i + WORD_BYTES]) for i in range(0, len(cells), WORD_BYTES)]

    def concrete_bytes(self, offset: int, size: int) -> bytes:
        """Raises ValueError if any byte in range is symbolic."""
        out = bytearray()
        for cell in self.load_cells(offset, size):
            value = cell_value(cell)
            if not isinstance(value, Const):
                raise ValueError("symbolic byte in memory range")
            out.append(value.value)
        return bytes(out)

    def digest_into(self, h: Any) -> None:
        for offset in sorted(self.cells):
            cell = self.cells[offset]
            h.update(offset.to_bytes(8, "big"))
            if isinstance(cell, int):
                h.update(bytes([0, cell]))
            else:
                h.update(bytes([1, cell[1]]))
                h.update(cell[0].fp)
