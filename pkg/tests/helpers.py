import itertools

import numpy as np

from lgdiv.models.matgroup import GL2Element


def mat(entries, q):
    return GL2Element(tuple(entries), q)


def _act(entries, v, q):
    a, b, c, d = entries
    return ((a * v[0] + b * v[1]) % q, (c * v[0] + d * v[1]) % q)


def _add(u, v, q):
    return ((u[0] + v[0]) % q, (u[1] + v[1]) % q)


def extend_cocycle(G, x):
    """
    Spread generator values x over G by z(s h) = z(s) + s z(h), walking the
    elements in closure order. Returns the table, or None when an edge
    disagrees.
    """
    q = G.modulus
    k = len(G.generators)
    gen_vals = [tuple(int(t) for t in x[2 * s:2 * s + 2]) for s in range(k)]
    z = {0: (0, 0)}
    queue = [0]
    while queue:
        h = queue.pop(0)
        for s, g in enumerate(G.generators):
            t = int(G.gen_table[s, h])
            val = _add(gen_vals[s], _act(g.entries, z[h], q), q)
            if t in z:
                if z[t] != val:
                    return None
            else:
                z[t] = val
                queue.append(t)
    return z


def brute_h1(G, local=False):
    """
    (|Z^1|, |B^1|, |H^1| or |H^1_loc|) by enumerating every choice of
    generator values. Desk scale: q^(2k) candidates.
    """
    q = G.modulus
    k = len(G.generators)
    vectors = list(itertools.product(range(q), repeat=2))
    moves = {}
    for i, g in enumerate(G.elements):
        moves[i] = {_add(_act(g.entries, m, q), ((-m[0]) % q, (-m[1]) % q), q) for m in vectors}
    cocycles = []
    for x in itertools.product(range(q), repeat=2 * k):
        z = extend_cocycle(G, x)
        if z is not None:
            cocycles.append(z)
    boundary_values = set()
    for m in vectors:
        vals = []
        for g in G.generators:
            vals.extend(_add(_act(g.entries, m, q), ((-m[0]) % q, (-m[1]) % q), q))
        boundary_values.add(tuple(vals))
    z1 = len(cocycles)
    b1 = len(boundary_values)
    if not local:
        return z1, b1, z1 // b1
    loc = sum(1 for z in cocycles if all(z[i] in moves[i] for i in range(G.order)))
    return z1, b1, loc // b1


def fixed_vectors(G):
    q = G.modulus
    return [v for v in itertools.product(range(q), repeat=2)
            if all(_act(g.entries, v, q) == v for g in G.generators)]


def as_set(G):
    return {g.entries for g in G.elements}


def random_entries(rng, q):
    while True:
        m = tuple(int(t) for t in rng.integers(0, q, size=4))
        if np.gcd((m[0] * m[3] - m[1] * m[2]) % q, q) == 1:
            return m
