"""Minimal union-find over integer keys, used for orbits and event merging."""

from __future__ import annotations


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, k: int) -> int:
        root = k
        while root != self.parent[root]:
            root = self.parent[root]
        while k != root:
            self.parent[k], k = root, self.parent[k]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller index as root so class numbering is stable
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra
        return ra

    def groups(self) -> list[list[int]]:
        """Classes ordered by smallest member, members ascending."""
        by_root: dict[int, list[int]] = {}
        for k in range(len(self.parent)):
            by_root.setdefault(self.find(k), []).append(k)
        return [by_root[r] for r in sorted(by_root)]
