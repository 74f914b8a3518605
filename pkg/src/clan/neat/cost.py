from __future__ import annotations


class GeneOps:
    """Running count of genes touched by an operation; pass ``None`` to skip counting."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def add(self, n: int) -> None:
        self.count += n


def tally(ops: GeneOps | None, n: int) -> None:
    if ops is not None:
        ops.count += n
