"""Stable forests: every non-leaf node has at least two children."""

from __future__ import annotations

from itertools import count
from typing import Hashable, Mapping

Forest = dict  # node -> parent (or None)


class CycleError(ValueError):
    pass


def _check_acyclic(parents: Mapping) -> None:
    for start in parents:
        seen = set()
        node = start
        while node is not None:
            if node in seen:
                raise CycleError(f"cycle through {node!r}")
            seen.add(node)
            node = parents.get(node)


def children_of(parents: Mapping) -> dict:
    kids = {v: [] for v in parents}
    for v, p in parents.items():
        if p is not None:
            kids[p].append(v)
    return kids


def is_stable(parents: Mapping) -> bool:
    return all(len(k) != 1 for k in children_of(parents).values())


def leaves(parents: Mapping) -> list:
    return [v for v, k in children_of(parents).items() if not k]


def induced_forest(ambient: Mapping, nodes) -> dict:
    """Restrict the ambient order to ``nodes``: parent = nearest ancestor inside the subset."""
    nodes = set(nodes)
    out = {}
    for v in nodes:
        p = ambient[v]
        while p is not None and p not in nodes:
            p = ambient[p]
        out[v] = p
    return out


def _ambient_leaf_beside(ambient_kids, node, avoid):
    """A maximal ambient element above ``node`` that is not above ``avoid``'s branch."""
    branch = avoid
    for ch in sorted(ambient_kids[node], key=repr):
        if ch == branch:
            continue
        leaf = ch
        while ambient_kids[leaf]:
            leaf = sorted(ambient_kids[leaf], key=repr)[0]
        return leaf
    return None


def stable_forest_reduce(forest: Mapping[Hashable, Hashable | None],
                         ambient: Mapping[Hashable, Hashable | None] | None = None) -> dict:
    """Smallest-effort stable superset of ``forest``.

    ``forest`` maps nodes to parents.  With an ambient stable tree (for instance
    the class tree of a partition) every node with a single child gets a maximal
    ambient element from another branch added above it.  Without an ambient tree
    a fresh leaf ``("leaf", n)`` is attached instead.  Either way the result has
    at most twice as many nodes as leaves.
    """
    forest = dict(forest)
    _check_acyclic(forest)
    if ambient is not None:
        ambient = dict(ambient)
        _check_acyclic(ambient)
        missing = set(forest) - set(ambient)
        if missing:
            raise ValueError(f"nodes outside the ambient tree: {sorted(map(repr, missing))}")
        nodes = set(forest)
        # the induced order must agree with the given parent pointers
        if induced_forest(ambient, nodes) != forest:
            raise ValueError("forest is not the restriction of the ambient order")
        ambient_kids = children_of(ambient)
        while True:
            current = induced_forest(ambient, nodes)
            lonely = [v for v, k in children_of(current).items() if len(k) == 1]
            if not lonely:
                return current
            v = sorted(lonely, key=repr)[0]
            (only,) = children_of(current)[v]
            step = only
            while ambient[step] != v:
                step = ambient[step]
            leaf = _ambient_leaf_beside(ambient_kids, v, step)
            if leaf is None:
                raise ValueError(f"ambient tree is not stable at {v!r}")
            nodes.add(leaf)
    fresh = count()
    out = dict(forest)
    for v, k in children_of(forest).items():
        if len(k) == 1:
            out[("leaf", next(fresh))] = v
    return out
