"""Two-state bit vectors, MSB-first in textual form."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BitVector:
    width: int
    value: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be >= 1")
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"value {self.value} does not fit in {self.width} bits")

    @property
    def bits(self) -> str:
        return format(self.value, f"0{self.width}b")

    @classmethod
    def from_bits(cls, bits: str) -> "BitVector":
        if not bits or any(c not in "01" for c in bits):
            raise ValueError(f"bad bit string {bits!r}")
        return cls(width=len(bits), value=int(bits, 2))

    def __str__(self) -> str:
        return self.bits
