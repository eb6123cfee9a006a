"""Slow, obviously-correct reference implementations used only by the tests."""


def brute_dominates(a, b):
    better = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            better = True
    return better


def brute_fronts(F):
    """Peel non-dominated layers with an O(n^2) pairwise scan per layer."""
    rows = [tuple(r) for r in F]
    left = set(range(len(rows)))
    out = []
    while left:
        layer = sorted(i for i in left if not any(brute_dominates(rows[j], rows[i]) for j in left if j != i))
        out.append(layer)
        left -= set(layer)
    return out
