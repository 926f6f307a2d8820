"""Permutations of arc labels.

A :class:`Perm` stores only the labels it moves.  Products are read left to
right, matching the way words act on triangulations: ``p.then(q)`` first
applies ``p``, then ``q``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class Perm:
    moved: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        images = [b for _, b in self.moved]
        sources = [a for a, _ in self.moved]
        if sorted(images) != sorted(sources) or len(set(sources)) != len(sources):
            raise ValueError(f"not a bijection: {dict(self.moved)}")

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> "Perm":
        return cls(tuple(sorted((int(a), int(b)) for a, b in mapping.items() if a != b)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable[int]]) -> "Perm":
        """Build from disjoint cycles; ``[(1, 2, 3)]`` sends 1->2->3->1."""
        mapping: dict[int, int] = {}
        for cyc in cycles:
            cyc = list(cyc)
            for i, a in enumerate(cyc):
                if a in mapping:
                    raise ValueError(f"label {a} repeated in cycles")
                mapping[a] = cyc[(i + 1) % len(cyc)]
        return cls.from_mapping(mapping)

    @classmethod
    def from_two_line(cls, top: Iterable[int], bottom: Iterable[int]) -> "Perm":
        top, bottom = list(top), list(bottom)
        if len(top) != len(bottom):
            raise ValueError("two-line notation rows differ in length")
        return cls.from_mapping(dict(zip(top, bottom)))

    @classmethod
    def transposition(cls, a: int, b: int) -> "Perm":
        return cls.from_mapping({a: b, b: a})

    @classmethod
    def parse(cls, text: str) -> "Perm":
        """Parse cycle notation such as ``"(2 4)(1 3 5)"`` or ``"()"``."""
        text = text.strip()
        if text.startswith("P"):
            text = text[1:]
        cycles = []
        if _CYCLE_RE.sub("", text).strip():
            raise ValueError(f"bad cycle notation: {text!r}")
        for body in _CYCLE_RE.findall(text):
            parts = body.replace(",", " ").split()
            if parts:
                cycles.append([int(p) for p in parts])
        return cls.from_cycles(cycles)

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.moved)

    def __call__(self, x: int) -> int:
        for a, b in self.moved:
            if a == x:
                return b
        return x

    def is_identity(self) -> bool:
        return not self.moved

    def support(self) -> frozenset[int]:
        return frozenset(a for a, _ in self.moved)

    def inverse(self) -> "Perm":
        return Perm(tuple(sorted((b, a) for a, b in self.moved)))

    def then(self, other: "Perm") -> "Perm":
        labels = self.support() | other.support()
        return Perm.from_mapping({x: other(self(x)) for x in labels})

    def cycles(self) -> list[tuple[int, ...]]:
        m = self.mapping
        seen: set[int] = set()
        out = []
        for start in sorted(m):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = m[start]
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = m[x]
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        if not self.moved:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles())

    def __repr__(self) -> str:
        return f"Perm({self})"


IDENTITY = Perm()
