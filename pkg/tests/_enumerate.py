"""Reference maximum by direct enumeration over product sets (no conflict graph)."""


def brute_max(q: int, lam: int = 4) -> tuple[int, tuple[int, ...]]:
    """Largest B1[lam](q) set, lexicographically least among the largest."""
    cands = []
    for x in range(1, q):
        prods = [i * x % q for i in range(1, lam + 1)]
        if len(set(prods)) == lam:
            cands.append((x, frozenset(prods)))
    best: list = [0, ()]

    def go(k: int, used: frozenset, chosen: tuple) -> None:
        if len(chosen) > best[0]:
            best[0], best[1] = len(chosen), chosen
        left = len(cands) - k
        room = (q - len(used)) // lam
        if len(chosen) + min(left, room) <= best[0]:
            return
        for n in range(k, len(cands)):
            x, prods = cands[n]
            if used.isdisjoint(prods):
                go(n + 1, used | prods, chosen + (x,))
                if len(chosen) + min(len(cands) - n - 1, room) <= best[0]:
                    return

    go(0, frozenset(), ())
    return best[0], best[1]
