"""
First cohomology of finite matrix groups acting on (Z/p^nZ)^2.

A cocycle is determined by its values on the closure generators, so Z^1
and B^1 are computed inside M^k (k = number of generators) and expanded to
full value tables through the linear maps A_g with Z_g = A_g x. The maps
are built along a breadth-first spanning tree of the Cayley graph; every
non-tree edge (s, h) contributes the constraint Z_{sh} = Z_s + s Z_h.
"""
import logging

import numpy as np

from ..basics import same_modulus, split_modulus
from ..errors import CapExceeded, NotASubgroup
from ..linalg import RingMatrix, Submodule, apply, kernel, preimage, quotient_presentation
from .matgroup import close, cyclic_subgroups

mainlogger = logging.getLogger('mainlogger')

UNKNOWN_BUDGET = 60000


class GModule:
    """
    (Z/qZ)^2 with the matrix action, optionally cut down to a stable
    submodule of coefficients (used for fixed modules M^N).
    """

    rank = 2

    def __init__(self, modulus, coefficients=None):
        split_modulus(modulus)
        self.modulus = modulus
        if coefficients is None:
            coefficients = Submodule.full(2, modulus)
        same_modulus(modulus, coefficients.modulus)
        self.coefficients = coefficients

    @classmethod
    def standard(cls, modulus):
        return cls(modulus)

    def action(self, g):
        return g.matrix()

    @property
    def order(self):
        return self.coefficients.order

    def is_full(self):
        return self.coefficients.is_full()

    def check(self, G):
        """ Action is a homomorphism on G and the coefficients are G-stable. """
        same_modulus(self.modulus, G.modulus)
        arrays = G.arrays()
        q = self.modulus
        assert np.array_equal(arrays[0], np.eye(2, dtype=np.int64)), "identity must act trivially"
        for s, S in enumerate(G.generator_arrays()):
            prod = np.einsum('ij,hjk->hik', S, arrays) % q
            assert np.array_equal(prod, arrays[G.gen_table[s]]), "action is not a homomorphism"
            moved = apply(RingMatrix(S, q), self.coefficients)
            assert moved <= self.coefficients, "coefficients are not stable under the group"
        return True

    def __repr__(self):
        return f"GModule(mod {self.modulus}, order {self.order})"


class Cocycle:
    """ A full value table Z_g for g in group.elements. """

    def __init__(self, group, module, values):
        self.group = group
        self.module = module
        self.values = np.asarray(values, dtype=np.int64).reshape(group.order, 2) % module.modulus

    @classmethod
    def zero(cls, group, module):
        return cls(group, module, np.zeros((group.order, 2), dtype=np.int64))

    @classmethod
    def from_generator_values(cls, group, module, x, gen_maps=None):
        if gen_maps is None:
            gen_maps = generator_maps(group)
        x = np.asarray(x, dtype=np.int64).reshape(-1)
        values = np.einsum('gij,j->gi', gen_maps, x) % module.modulus
        return cls(group, module, values)

    def generator_values(self):
        return self.values[self.group.generator_indices()].reshape(-1)

    def is_cocycle(self, full=False):
        q = self.module.modulus
        G = self.group
        if self.values[0].any():
            return False
        arrays = G.arrays()
        if full:
            for i, g in enumerate(G.elements):
                for j, h in enumerate(G.elements):
                    k = G.index[(g * h).key]
                    rhs = (self.values[i] + arrays[i] @ self.values[j]) % q
                    if not np.array_equal(self.values[k], rhs):
                        return False
            return True
        for s, (S, si) in enumerate(zip(G.generator_arrays(), G.generator_indices())):
            lhs = self.values[G.gen_table[s]]
            rhs = (self.values[si][None, :] + self.values @ S.T) % q
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def is_coboundary(self):
        G = self.group
        gens = G.generator_arrays()
        if len(gens) == 0:
            return True
        q = self.module.modulus
        stacked = np.vstack([S - np.eye(2, dtype=np.int64) for S in gens])
        target = self.generator_values()
        reach = apply(RingMatrix(stacked, q), self.module.coefficients)
        return reach.contains(target)

    def __repr__(self):
        return f"Cocycle(|G|={self.group.order}, mod {self.module.modulus})"


class CohomologyGroup:
    """
    H^1 (or a subgroup of it) as z1 / b1 inside M^k, generator coordinates.
    """

    def __init__(self, group, module, z1, b1, gen_maps, label="H1"):
        self.group = group
        self.module = module
        self.z1 = z1
        self.b1 = b1
        self.gen_maps = gen_maps
        self.label = label
        pres = quotient_presentation(z1, b1)
        self.invariants = [order for order, _ in pres]
        self.class_reps = [Cocycle.from_generator_values(group, module, x, gen_maps)
                           for _, x in pres]

    @property
    def order(self):
        out = 1
        for e in self.invariants:
            out *= e
        return out

    def is_trivial(self):
        return not self.invariants

    def contains(self, cocycle):
        return self.z1.contains(cocycle.generator_values())

    def __repr__(self):
        return f"{self.label}(invariants={self.invariants})"


def _selector(k, s):
    e = np.zeros((2, 2 * k), dtype=np.int64)
    e[0, 2 * s] = 1
    e[1, 2 * s + 1] = 1
    return e


def generator_maps(G):
    """ A_g (shape (|G|, 2, 2k)) with Z_g = A_g x along a BFS spanning tree. """
    k = len(G.generators)
    q = G.modulus
    n = G.order
    maps = np.zeros((n, 2, 2 * k), dtype=np.int64)
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    gens = G.generator_arrays()
    frontier = np.array([0], dtype=np.int64)
    while frontier.size:
        layer = []
        for s in range(k):
            targets = G.gen_table[s, frontier]
            fresh = ~visited[targets]
            if not fresh.any():
                continue
            t, first = np.unique(targets[fresh], return_index=True)
            src = frontier[fresh][first]
            maps[t] = (_selector(k, s)[None] + np.einsum('ij,hjk->hik', gens[s], maps[src])) % q
            visited[t] = True
            layer.append(t)
        frontier = np.concatenate(layer) if layer else np.zeros(0, dtype=np.int64)
    assert visited.all(), "generators do not reach every element"
    return maps


def _constraints(G, gen_maps):
    k = len(G.generators)
    q = G.modulus
    blocks = []
    for s, S in enumerate(G.generator_arrays()):
        lhs = gen_maps[G.gen_table[s]]
        rhs = _selector(k, s)[None] + np.einsum('ij,hjk->hik', S, gen_maps)
        blocks.append(((lhs - rhs) % q).reshape(-1, 2 * k))
    if not blocks:
        return np.zeros((0, 0), dtype=np.int64)
    return np.vstack(blocks)


def _check_budget(G, M):
    unknowns = G.order * M.rank
    if unknowns > UNKNOWN_BUDGET:
        raise CapExceeded("cocycle system unknowns", UNKNOWN_BUDGET)


def cocycle_space(G, M, gen_maps=None):
    """ Z^1(G, M) inside M^k (values on the generators). """
    same_modulus(G.modulus, M.modulus)
    _check_budget(G, M)
    k = len(G.generators)
    q = M.modulus
    if k == 0:
        return Submodule.zero(0, q)
    if gen_maps is None:
        gen_maps = generator_maps(G)
    rows = _constraints(G, gen_maps)
    z1 = kernel(RingMatrix(rows, q))
    if not M.is_full():
        z1 = z1.intersect(Submodule.direct_power(M.coefficients, k))
    return z1


def coboundary_space(G, M):
    """ B^1(G, M) = {(s - 1) m : m in M} in generator coordinates. """
    same_modulus(G.modulus, M.modulus)
    q = M.modulus
    k = len(G.generators)
    if k == 0:
        return Submodule.zero(0, q)
    eye = np.eye(2, dtype=np.int64)
    stacked = np.vstack([S - eye for S in G.generator_arrays()])
    return apply(RingMatrix(stacked, q), M.coefficients)


def coboundary(G, M, m):
    q = M.modulus
    m = np.asarray(m, dtype=np.int64).reshape(2)
    values = (np.einsum('gij,j->gi', G.arrays(), m) - m[None, :]) % q
    return Cocycle(G, M, values)


def h1(G, M):
    gen_maps = generator_maps(G)
    z1 = cocycle_space(G, M, gen_maps)
    b1 = coboundary_space(G, M)
    return CohomologyGroup(G, M, z1, b1, gen_maps, label="H1")


def _local_by_elements(G, M, H):
    q = M.modulus
    eye = np.eye(2, dtype=np.int64)
    arrays = G.arrays()
    cur = H.z1
    # the condition at g implies it at every power of g
    implied = np.zeros(G.order, dtype=bool)
    implied[0] = True
    for g in range(1, G.order):
        if cur == H.b1:
            break
        if implied[g]:
            continue
        reach = apply(RingMatrix(arrays[g] - eye, q), M.coefficients)
        cond = preimage(RingMatrix(H.gen_maps[g], q), reach)
        cur = cur.intersect(cond)
        x = G.elements[g]
        power = x
        while not power.is_identity():
            implied[G.index[power.key]] = True
            power = power * x
    return cur


def _local_by_restriction(G, M, H):
    q = M.modulus
    eye = np.eye(2, dtype=np.int64)
    cur = H.z1
    for C in cyclic_subgroups(G, maximal_only=True):
        if cur == H.b1:
            break
        idx = [G.index[c.key] for c in C.elements]
        stacked = H.gen_maps[idx].reshape(-1, H.gen_maps.shape[2])
        moves = np.vstack([C.arrays()[i] - eye for i in range(C.order)])
        b1_c = apply(RingMatrix(moves, q), M.coefficients)
        cur = cur.intersect(preimage(RingMatrix(stacked, q), b1_c))
    return cur


def h1_loc(G, M, method="both", base=None):
    """
    H^1_loc(G, M): classes that restrict to coboundaries on every cyclic
    subgroup. method "elements" solves (g - 1) W = Z_g for every g,
    "restriction" restricts to each maximal cyclic subgroup, "both" runs the
    two and asserts they agree.
    """
    H = base if base is not None else h1(G, M)
    if H.is_trivial() or len(G.generators) == 0:
        return CohomologyGroup(G, M, H.z1, H.b1, H.gen_maps, label="H1loc")
    if method == "elements":
        z1 = _local_by_elements(G, M, H)
    elif method == "restriction":
        z1 = _local_by_restriction(G, M, H)
    elif method == "both":
        z1 = _local_by_elements(G, M, H)
        other = _local_by_restriction(G, M, H)
        assert z1 == other, "local conditions disagree between the two characterisations"
    else:
        raise ValueError(f"unknown h1_loc method '{method}'")
    return CohomologyGroup(G, M, z1, H.b1, H.gen_maps, label="H1loc")


def cyclic_h1(delta, M):
    """ H^1(<delta>, M) = ker(N) / Im(delta - 1), N = sum of delta^i. """
    same_modulus(delta.modulus, M.modulus)
    q = M.modulus
    G = close([delta], modulus=q)
    arrays = G.arrays()
    norm = RingMatrix(arrays.sum(axis=0) % q, q)
    step = RingMatrix(delta.as_array() - np.eye(2, dtype=np.int64), q)
    ker_n = kernel(norm).intersect(M.coefficients)
    im = apply(step, M.coefficients)
    partial = np.cumsum(np.vstack([np.zeros((1, 2, 2), dtype=np.int64), arrays[:-1]]), axis=0) % q
    gen_maps = partial
    return CohomologyGroup(G, M, ker_n, im, gen_maps, label="H1cyc")


def restriction(cls, C):
    G = cls.group
    if C.modulus != G.modulus:
        raise NotASubgroup("subgroup has a different modulus")
    try:
        idx = [G.index[c.key] for c in C.elements]
    except KeyError as exc:
        raise NotASubgroup("restriction target is not a subgroup") from exc
    return Cocycle(C, cls.module, cls.values[idx])


def fixed_submodule(S, M):
    q = M.modulus
    out = M.coefficients
    eye = np.eye(2, dtype=np.int64)
    for g in S.generator_arrays():
        out = out.intersect(kernel(RingMatrix(g - eye, q)))
    return out


def satisfies_local_conditions(z):
    q = z.module.modulus
    eye = np.eye(2, dtype=np.int64)
    arrays = z.group.arrays()
    for g in range(z.group.order):
        reach = apply(RingMatrix(arrays[g] - eye, q), z.module.coefficients)
        if not reach.contains(z.values[g]):
            return False
    return True


def cohomology_summary(G, M, method="elements"):
    """ The JSON record for one (G, M) pair. """
    H = h1(G, M)
    L = h1_loc(G, M, method=method, base=H)
    return {
        "group_order": G.order,
        "z1_order": H.z1.order,
        "b1_order": H.b1.order,
        "invariants": H.invariants,
        "h1loc_invariants": L.invariants,
    }
