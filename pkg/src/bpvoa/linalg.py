"""Sparse exact Gaussian elimination over any field (Fraction or Scalar entries).

Vectors are dicts from orderable keys to nonzero coefficients.
"""

from __future__ import annotations

__all__ = ["RowSpace", "nullspace", "axpy"]


def axpy(acc: dict, c, v: dict) -> None:
    """acc += c * v, in place, dropping entries that cancel."""
    if not c:
        return
    for key, x in v.items():
        y = acc.get(key)
        y = c * x if y is None else y + c * x
        if y:
            acc[key] = y
        else:
            acc.pop(key, None)


class RowSpace:
    """A subspace kept in reduced row echelon form.

    Each row is stored under its pivot key (the least key in its support) with
    pivot coefficient 1, and no row has a nonzero entry at another row's pivot.
    With ``track=True`` every row also carries the combination of inserted
    vectors that produced it.
    """

    def __init__(self, track: bool = False):
        self.rows: dict = {}
        self.track = track
        self.tags: dict = {}

    def __len__(self) -> int:
        return len(self.rows)

    def __contains__(self, v: dict) -> bool:
        return not self.reduce(v)

    @property
    def pivots(self):
        return self.rows.keys()

    def reduce(self, v: dict, tag: dict | None = None):
        """Remainder of ``v`` modulo the space (supported off the pivots)."""
        v = dict(v)
        for p in [p for p in v if p in self.rows]:
            c = v.get(p)
            if c:
                axpy(v, -c, self.rows[p])
                if tag is not None:
                    axpy(tag, -c, self.tags[p])
        return v

    def add(self, v: dict, tag: dict | None = None):
        """Insert ``v``; return None if it was dependent, else its pivot.

        In tracking mode a dependent vector returns the relation it satisfies
        (a combination of tags) instead of None.
        """
        tag = dict(tag) if tag is not None else ({} if self.track else None)
        r = self.reduce(v, tag)
        if not r:
            return tag if self.track else None
        p = min(r)
        inv = 1 / r[p] if r[p] != 1 else None
        if inv is not None:
            r = {key: x * inv for key, x in r.items()}
            if tag is not None:
                tag = {key: x * inv for key, x in tag.items()}
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                axpy(row, -c, r)
                if self.track:
                    axpy(self.tags[q], -c, tag)
        self.rows[p] = r
        if self.track:
            self.tags[p] = tag
        return p

    def basis(self) -> list[dict]:
        return [dict(r) for _, r in sorted(self.rows.items())]


def nullspace(vectors: list[dict]) -> list[dict]:
    """Basis of {c : sum_s c[s] vectors[s] = 0}, as dicts from index to coefficient."""
    space = RowSpace(track=True)
    kernel = []
    for s, v in enumerate(vectors):
        res = space.add(v, {s: 1})
        if isinstance(res, dict):
            kernel.append(res)
    return kernel
