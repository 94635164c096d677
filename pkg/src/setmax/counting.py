"""Boards of distinct cards and the engines that count the sets they contain.

count_sets is the fast pair-completion counter used everywhere;
count_sets_bruteforce enumerates all card triples and exists purely as a
cross-check oracle.  Boards are immutable once constructed.
"""

from __future__ import annotations

from itertools import combinations

from . import geometry


class DuplicateCardError(ValueError):
    """The same card appeared twice where distinct cards are required."""


class BoardParseError(ValueError):
    """A board text could not be parsed; carries source name and line number."""

    def __init__(self, source: str, line: int | None, message: str):
        self.source = source
        self.line = line
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")


class Board:
    """An immutable collection of distinct cards in a d-property deck.

    Cards are kept sorted, so equal boards compare equal field-wise, and a
    full-deck bitmask gives constant-time membership tests.
    """

    __slots__ = ("dim", "cards", "mask")

    def __init__(self, dim: int, cards=()):
        geometry.check_dimension(dim)
        mask = 0
        for c in cards:
            geometry.check_card(c, dim)
            bit = 1 << c
            if mask & bit:
                raise DuplicateCardError(f"card {c} appears more than once")
            mask |= bit
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "cards", tuple(sorted(self._bits(mask))))
        object.__setattr__(self, "mask", mask)

    @staticmethod
    def _bits(mask: int):
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def __setattr__(self, name, value):
        raise AttributeError("Board is immutable")

    @classmethod
    def from_coords(cls, dim: int, rows) -> "Board":
        return cls(dim, (geometry.encode_card(r) for r in rows))

    @classmethod
    def full_deck(cls, dim: int) -> "Board":
        return cls(dim, range(geometry.deck_size(dim)))

    @classmethod
    def parse(cls, text: str, *, dim: int | None = None, source: str = "<board>") -> "Board":
        """Parse the board text format: one card per line, comma-separated
        digits in {0,1,2}; blank lines and '#' comments are ignored.

        The dimension is inferred from the first card unless given.  An
        empty board defaults to the standard 4-property deck.
        """
        if dim is not None:
            geometry.check_dimension(dim)
        cards = []
        seen = set()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            try:
                digits = [int(p) for p in parts]
            except ValueError:
                raise BoardParseError(source, lineno, f"not a card: {line!r}") from None
            if any(v not in (0, 1, 2) for v in digits):
                raise BoardParseError(source, lineno, f"digits must be 0, 1 or 2: {line!r}")
            if dim is None:
                dim = len(digits)
                if not geometry.MIN_DIMENSION <= dim <= geometry.MAX_DIMENSION:
                    raise BoardParseError(source, lineno, f"unsupported card width {dim}")
            elif len(digits) != dim:
                raise BoardParseError(
                    source, lineno, f"expected {dim} digits, got {len(digits)}: {line!r}"
                )
            card = geometry.encode_card(digits)
            if card in seen:
                raise BoardParseError(source, lineno, f"duplicate card: {line!r}")
            seen.add(card)
            cards.append(card)
        return cls(dim if dim is not None else 4, cards)

    @classmethod
    def parse_file(cls, path, *, dim: int | None = None) -> "Board":
        with open(path, "r", encoding="utf-8") as f:
            return cls.parse(f.read(), dim=dim, source=str(path))

    def to_text(self) -> str:
        return "".join(
            ",".join(str(v) for v in geometry.decode_card(c, self.dim)) + "\n"
            for c in self.cards
        )

    def with_card(self, card: int) -> "Board":
        return Board(self.dim, self.cards + (card,))

    def coords(self) -> list[tuple[int, ...]]:
        return [geometry.decode_card(c, self.dim) for c in self.cards]

    def __len__(self) -> int:
        return len(self.cards)

    def __iter__(self):
        return iter(self.cards)

    def __contains__(self, card) -> bool:
        return isinstance(card, int) and 0 <= card and self.mask >> card & 1 == 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Board) and self.dim == other.dim and self.mask == other.mask
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.mask))

    def __repr__(self) -> str:
        return f"Board(dim={self.dim}, n={len(self.cards)})"


def count_sets(board: Board) -> int:
    """Number of sets in the board, by pair completion.

    Every unordered pair is completed to its third card and tested for
    membership; each set is found three times (once per pair it contains),
    so the tally divides by 3.  O(n^2) with O(1) membership.
    """
    cards = board.cards
    if len(cards) < 3:
        return 0
    mask = board.mask
    tally = 0
    if board.dim <= geometry.TABLE_MAX_DIM:
        rows = geometry.third_rows(board.dim)
        for i, a in enumerate(cards):
            row = rows[a]
            for b in cards[i + 1 :]:
                if mask >> row[b] & 1:
                    tally += 1
    else:
        d = board.dim
        for i, a in enumerate(cards):
            for b in cards[i + 1 :]:
                if mask >> geometry.third_value(a, b, d) & 1:
                    tally += 1
    return tally // 3


def list_sets(board: Board) -> list[tuple[int, int, int]]:
    """The sets in the board, materialized as sorted card triples."""
    cards = board.cards
    mask = board.mask
    d = board.dim
    found = []
    for i, a in enumerate(cards):
        for b in cards[i + 1 :]:
            t = geometry.third_value(a, b, d)
            if t > b and mask >> t & 1:
                found.append((a, b, t))
    return found


def count_sets_bruteforce(board: Board) -> int:
    """Slow oracle: test all C(n,3) card triples against the line condition."""
    d = board.dim
    return sum(1 for a, b, c in combinations(board.cards, 3) if geometry.is_line(a, b, c, d))


def delta_sets(board: Board, candidate: int) -> int:
    """How many sets adding `candidate` would create.

    Each new set contains the candidate plus a pair from the board, and the
    pair scan finds it twice (once through each of its board cards), so the
    tally divides by 2.
    """
    geometry.check_card(candidate, board.dim)
    if candidate in board:
        raise DuplicateCardError(f"card {candidate} is already on the board")
    mask = board.mask
    tally = 0
    if board.dim <= geometry.TABLE_MAX_DIM:
        row = geometry.third_rows(board.dim)[candidate]
        for b in board.cards:
            if mask >> row[b] & 1:
                tally += 1
    else:
        d = board.dim
        for b in board.cards:
            if mask >> geometry.third_value(candidate, b, d) & 1:
                tally += 1
    return tally // 2
