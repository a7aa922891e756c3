"""Brute-force reference implementations used only by the tests.

Nothing here imports the search or normalization code of the package; the
oracles work directly on Cayley tables, Python sets and itertools.
"""

import itertools


def set_partitions(n):
    """All partitions of range(n), as label tuples (restricted growth strings)."""
    def grow(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for lab in range(top + 2):
            yield from grow(prefix + [lab], max(top, lab))
    if n == 0:
        yield ()
        return
    yield from grow([0], 0)


def brute_congruences(rows):
    """Partitions of the carrier compatible with multiplication on both sides."""
    n = len(rows)
    out = []
    for labels in set_partitions(n):
        ok = True
        for a in range(n):
            for b in range(n):
                if labels[a] != labels[b]:
                    continue
                for z in range(n):
                    if labels[rows[a][z]] != labels[rows[b][z]] or \
                            labels[rows[z][a]] != labels[rows[z][b]]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            out.append(least_member_labels(labels))
    return out


def least_member_labels(labels):
    """Relabel a partition so each class is named by its least member."""
    first = {}
    for x, lab in enumerate(labels):
        first.setdefault(lab, x)
    return tuple(first[lab] for lab in labels)


def brute_identity(rows):
    n = len(rows)
    for e in range(n):
        if all(rows[e][x] == x == rows[x][e] for x in range(n)):
            return e
    return None


def brute_inverses(rows):
    e = brute_identity(rows)
    n = len(rows)
    return {x: next(y for y in range(n) if rows[x][y] == e == rows[y][x]) for x in range(n)}


def is_associative(rows):
    n = len(rows)
    return all(rows[rows[a][b]][c] == rows[a][rows[b][c]]
               for a in range(n) for b in range(n) for c in range(n))


def brute_regular(rows):
    n = len(rows)
    return {x for x in range(n) if any(rows[rows[x][w]][x] == x for w in range(n))}


def eval_table_poly(rows, coeffs, x):
    """a0 x a1 ... x an with None as the identity of X^1."""
    acc = coeffs[0]
    for c in coeffs[1:]:
        acc = x if acc is None else rows[acc][x]
        if c is not None:
            acc = rows[acc][c]
    return acc


def literal_covers(rows, pairs, elements):
    """Every element lies in some fiber, evaluated straight from the table."""
    return all(any(eval_table_poly(rows, f, x) == b for f, b in pairs) for x in elements)


def tables_up_to_iso(n):
    """Isomorphism classes of associative tables of order n, by full enumeration."""
    seen = set()
    classes = 0
    for flat in itertools.product(range(n), repeat=n * n):
        rows = [flat[i * n:(i + 1) * n] for i in range(n)]
        if not is_associative(rows):
            continue
        if flat in seen:
            continue
        classes += 1
        for p in itertools.permutations(range(n)):
            inv = [0] * n
            for i, pi in enumerate(p):
                inv[pi] = i
            seen.add(tuple(p[flat[inv[x] * n + inv[y]]] for x in range(n) for y in range(n)))
    return classes


def nat_sums(pool, count):
    """Sums of at most ``count`` values from pool (0 is the empty sum)."""
    out = {0}
    layer = {0}
    for _ in range(count):
        layer = {s + p for s in layer for p in pool}
        out |= layer
    return out


def nat_avoider(steps, window):
    """The least-index avoider sequence of (N,+), straight from the definition.

    x is rejected at step n when c + k x = b, 1 <= k <= n, where b is a word
    (a sum of at most n pool values) and c is a sum of k + 1 words.
    Returns the terms found before the window ran out.
    """
    xs = [0]
    for n in range(1, steps + 1):
        pool = sorted(set(range(n)) | set(xs[:n]))
        words = nat_sums(pool, n)
        top = max(words)
        coeffs = []
        acc = set(words)
        for k in range(1, n + 1):
            # sums of k + 1 words, capped at the largest word
            acc = {c + w for c in acc for w in words if c + w <= top}
            coeffs.append(acc)
        pick = None
        for x in range(window):
            if x in xs:
                continue
            if not any(b - k * x in coeffs[k - 1] for k in range(1, n + 1) for b in words):
                pick = x
                break
        if pick is None:
            break
        xs.append(pick)
    return xs
