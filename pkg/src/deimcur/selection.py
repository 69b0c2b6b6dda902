from dataclasses import dataclass

import numpy as np

SOURCES = ("deim", "leverage-top", "leverage-sample", "qr-pivot", "manual")


@dataclass(frozen=True)
class IndexSelection:
    """Ordered, distinct, 1-based row or column indices plus where they came from.

    Order is selection order.  Use :attr:`zero_based` for numpy indexing.
    """

    indices: tuple
    source: str = "manual"

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 1 for i in idx):
            raise ValueError("indices are 1-based and must be >= 1")
        if len(set(idx)) != len(idx):
            raise ValueError(f"indices must be distinct: {idx}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source tag {self.source!r}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_zero_based(cls, idx, source="manual"):
        return cls(tuple(int(i) + 1 for i in idx), source)

    @property
    def zero_based(self):
        return np.asarray(self.indices, dtype=np.intp) - 1

    def check_bound(self, n):
        if self.indices and max(self.indices) > n:
            raise ValueError(f"index {max(self.indices)} exceeds dimension {n}")
        return self

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def as_selection(idx, source="manual"):
    """Accept an IndexSelection or any sequence of 1-based integers."""
    if isinstance(idx, IndexSelection):
        return idx
    return IndexSelection(tuple(idx), source)
