"""
Finite subgroups of GL_2(Z/p^nZ), n in {1, 2}.

Elements are 2x2 matrices kept as 4-tuples (a, b, c, d) for fast hashing;
groups are closed breadth-first from their generators so that element order
is reproducible, and the left-multiplication table of every generator is
recorded during closure for the cohomology engine.
"""
import logging

import numpy as np

from ..basics import Residue, split_modulus, same_modulus
from ..errors import CapExceeded, NotASubgroup, NotReductionKernel, SylowNotNormal
from ..linalg import RingMatrix, Submodule

mainlogger = logging.getLogger('mainlogger')

DEFAULT_CAP = 20000


def gl2_order(p, n):
    return p ** (4 * (n - 1)) * (p * p - 1) * (p * p - p)


def _prime_factors(m):
    out, d = [], 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def p_part(m, p):
    out = 1
    while m % p == 0:
        m //= p
        out *= p
    return out


class GL2Element:
    __slots__ = ("entries", "modulus")

    def __init__(self, entries, modulus, check=True):
        a, b, c, d = (int(x) % modulus for x in entries)
        self.entries = (a, b, c, d)
        self.modulus = modulus
        if check:
            p, _ = split_modulus(modulus)
            if (a * d - b * c) % p == 0:
                raise ValueError(f"matrix {self!r} is not invertible mod {modulus}")

    @classmethod
    def identity(cls, modulus):
        return cls((1, 0, 0, 1), modulus, check=False)

    @classmethod
    def scalar(cls, lam, modulus):
        return cls((lam, 0, 0, lam), modulus)

    @classmethod
    def diag(cls, a, d, modulus):
        return cls((a, 0, 0, d), modulus)

    @property
    def prime(self):
        return split_modulus(self.modulus)[0]

    @property
    def key(self):
        return self.entries

    def __mul__(self, other):
        same_modulus(self.modulus, other.modulus)
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        q = self.modulus
        return GL2Element(((a * e + b * g) % q, (a * f + b * h) % q,
                           (c * e + d * g) % q, (c * f + d * h) % q), q, check=False)

    def inverse(self):
        a, b, c, d = self.entries
        q = self.modulus
        inv = pow((a * d - b * c) % q, -1, q)
        return GL2Element((d * inv, -b * inv, -c * inv, a * inv), q, check=False)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = GL2Element.identity(self.modulus)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def det(self):
        a, b, c, d = self.entries
        return Residue(a * d - b * c, self.modulus)

    def reduce(self, modulus):
        assert self.modulus % modulus == 0, f"cannot reduce mod {self.modulus} to mod {modulus}"
        return GL2Element(self.entries, modulus, check=False)

    def act(self, v):
        a, b, c, d = self.entries
        q = self.modulus
        x, y = int(v[0]), int(v[1])
        return ((a * x + b * y) % q, (c * x + d * y) % q)

    def is_identity(self):
        return self.entries == (1, 0, 0, 1)

    def is_diagonal(self):
        return self.entries[1] == 0 and self.entries[2] == 0

    def is_scalar(self):
        a, b, c, d = self.entries
        return b == 0 and c == 0 and a == d

    def is_upper_triangular(self):
        return self.entries[2] == 0

    def as_array(self):
        a, b, c, d = self.entries
        return np.array([[a, b], [c, d]], dtype=np.int64)

    def matrix(self):
        return RingMatrix(self.as_array(), self.modulus)

    def __eq__(self, other):
        if not isinstance(other, GL2Element):
            return NotImplemented
        return self.modulus == other.modulus and self.entries == other.entries

    def __hash__(self):
        return hash((self.entries, self.modulus))

    def __repr__(self):
        a, b, c, d = self.entries
        return f"[[{a},{b}],[{c},{d}]] mod {self.modulus}"


class MatrixGroup:
    """
    A closed subgroup of GL_2(Z/qZ). Build with `close` or `from_elements`.

    elements[0] is the identity; gen_table[s, h] is the index of
    generators[s] * elements[h].
    """

    def __init__(self, modulus, generators, elements, index, gen_table):
        self.modulus = modulus
        self.generators = generators
        self.elements = elements
        self.index = index
        self.gen_table = gen_table
        self._arrays = None
        self._key = None

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g):
        return g.modulus == self.modulus and g.key in self.index

    @property
    def prime(self):
        return split_modulus(self.modulus)[0]

    @property
    def level(self):
        return split_modulus(self.modulus)[1]

    @property
    def identity(self):
        return self.elements[0]

    def index_of(self, g):
        return self.index[g.key]

    def arrays(self):
        """ All elements as an (|G|, 2, 2) int64 array, in element order. """
        if self._arrays is None:
            self._arrays = np.array([g.entries for g in self.elements],
                                    dtype=np.int64).reshape(-1, 2, 2)
        return self._arrays

    def generator_arrays(self):
        return np.array([g.entries for g in self.generators], dtype=np.int64).reshape(-1, 2, 2)

    def generator_indices(self):
        return np.array([self.index[g.key] for g in self.generators], dtype=np.int64)

    def key(self):
        """ Canonical identity of the subgroup: sorted element entries. """
        if self._key is None:
            self._key = tuple(sorted(g.entries for g in self.elements))
        return self._key

    def is_subgroup_of(self, other):
        return self.modulus == other.modulus and all(g.key in other.index for g in self.elements)

    def check_closed(self):
        for g in self.generators:
            assert g.inverse().key in self.index, f"inverse of {g!r} missing"
        assert self.gen_table.shape == (len(self.generators), self.order)
        assert gl2_order(self.prime, self.level) % self.order == 0, \
            f"order {self.order} does not divide |GL_2|"
        return True

    def generator_literals(self):
        return [repr(g) for g in self.generators]

    def __repr__(self):
        return f"MatrixGroup(order={self.order}, modulus={self.modulus}, gens={self.generators!r})"


def close(generators, cap=DEFAULT_CAP, modulus=None):
    """ Breadth-first closure of the generators under left multiplication. """
    generators = list(generators)
    if modulus is None:
        assert generators, "closure of an empty generator list needs a modulus"
        modulus = generators[0].modulus
    for g in generators:
        same_modulus(modulus, g.modulus)
        if not g.det().is_unit():
            raise ValueError(f"generator {g!r} is not invertible")
    ident = GL2Element.identity(modulus)
    elements = [ident]
    index = {ident.key: 0}
    rows = [[] for _ in generators]
    pos = 0
    while pos < len(elements):
        h = elements[pos]
        for s, g in enumerate(generators):
            prod = g * h
            j = index.get(prod.key)
            if j is None:
                j = len(elements)
                if j >= cap:
                    raise CapExceeded("group closure", cap)
                index[prod.key] = j
                elements.append(prod)
            rows[s].append(j)
        pos += 1
    gen_table = np.array(rows, dtype=np.int64).reshape(len(generators), len(elements))
    group = MatrixGroup(modulus, generators, elements, index, gen_table)
    group.check_closed()
    mainlogger.debug(f"closed {len(generators)} generators mod {modulus}: order {group.order}")
    return group


def from_elements(elements, modulus, cap=DEFAULT_CAP):
    """ The subgroup generated by a list of elements, with a greedy generating set. """
    gens = []
    seen = {GL2Element.identity(modulus).key}
    for e in elements:
        if e.key in seen:
            continue
        gens.append(e)
        seen = set(close(gens, cap=cap, modulus=modulus).index)
    return close(gens, cap=cap, modulus=modulus)


def trivial_group(modulus):
    return close([], modulus=modulus)


def element_order(g):
    ident = GL2Element.identity(g.modulus)
    x, t = g, 1
    while x != ident:
        x = x * g
        t += 1
    return t


def is_cyclic(G):
    n = G.order
    if n == 1:
        return True
    primes = _prime_factors(n)
    for g in G.elements:
        if all(not (g ** (n // r)).is_identity() for r in primes):
            return True
    return False


def cyclic_generator(G):
    """ An element generating G when G is cyclic, else None. """
    n = G.order
    primes = _prime_factors(n)
    for g in G.elements:
        if all(not (g ** (n // r)).is_identity() for r in primes):
            return g
    return None


def _powers(g, G):
    out = [0]
    x = g
    while not x.is_identity():
        out.append(G.index[x.key])
        x = x * g
    return frozenset(out)


def cyclic_subgroups(G, maximal_only=False):
    """ Distinct cyclic subgroups <g>, g in G, in order of first appearance. """
    found = {}
    for g in G.elements:
        key = _powers(g, G)
        if key not in found:
            found[key] = g
    keys = list(found)
    if maximal_only:
        keep = []
        for key in sorted(keys, key=len, reverse=True):
            if not any(key < other for other in keep):
                keep.append(key)
        keep_set = set(keep)
        keys = [k for k in keys if k in keep_set]
    return [close([found[k]], modulus=G.modulus) for k in keys]


def conjugate(G, P):
    """ P^-1 G P, closed from conjugated generators. """
    Pinv = P.inverse()
    return close([Pinv * g * P for g in G.generators], modulus=G.modulus)


def reduction_split(G2):
    """ (G1, H): the image mod p and the kernel of reduction. """
    p, n = split_modulus(G2.modulus)
    assert n == 2, f"reduction_split needs a group mod p^2, got mod {G2.modulus}"
    G1 = close([g.reduce(p) for g in G2.generators], modulus=p)
    kernel_elems = [g for g in G2.elements if g.reduce(p).is_identity()]
    H = from_elements(kernel_elems, G2.modulus)
    assert G2.order == G1.order * H.order, \
        f"|G2|={G2.order} but |G1|*|H|={G1.order}*{H.order}"
    return G1, H


def h_dimension(H):
    """ dim over F_p of {A : I + pA in H}. """
    p, n = split_modulus(H.modulus)
    vecs = []
    for h in H.elements:
        a, b, c, d = h.entries
        if (a - 1) % p or b % p or c % p or (d - 1) % p:
            raise NotReductionKernel(f"{h!r} is not congruent to I mod {p}")
        if n == 1:
            continue
        vecs.append([((a - 1) // p) % p, (b // p) % p, (c // p) % p, ((d - 1) // p) % p])
    if not vecs:
        return 0
    span = Submodule.span(np.array(vecs, dtype=np.int64), p, 4)
    dim = span.basis.rows
    assert p ** dim == H.order, f"p^{dim} != |H| = {H.order}"
    return dim


def is_normal(Hsub, G):
    if not Hsub.is_subgroup_of(G):
        raise NotASubgroup("subgroup is not contained in the group")
    for g in G.generators:
        ginv = g.inverse()
        for h in Hsub.generators:
            if (g * h * ginv).key not in Hsub.index:
                return False
    return True


def p_sylow(G, strict=False):
    """
    A p-Sylow subgroup of G. When the p-elements of G form a subgroup it is
    the unique (normal) Sylow; otherwise one Sylow is found by greedy search,
    a warning is logged, and strict=True raises SylowNotNormal instead.
    """
    p = G.prime
    target = p_part(G.order, p)
    if target == 1:
        return trivial_group(G.modulus)
    p_elems = [g for g in G.elements if (g ** target).is_identity()]
    if len(p_elems) == target:
        P = from_elements(p_elems, G.modulus, cap=target + 1)
        if P.order == target and is_normal(P, G):
            return P
    if strict:
        raise SylowNotNormal(f"the {p}-Sylow subgroup of a group of order {G.order} is not normal")
    mainlogger.warning(f"{p}-Sylow of group of order {G.order} is not normal; returning one by search")
    gens = []
    P = trivial_group(G.modulus)
    while P.order < target:
        grown = False
        for x in p_elems:
            if x.key in P.index:
                continue
            try:
                Q = close(gens + [x], cap=target + 1, modulus=G.modulus)
            except CapExceeded:
                continue
            if p_part(Q.order, p) == Q.order:
                gens.append(x)
                P = Q
                grown = True
                break
        assert grown, "Sylow search stalled"
    return P


def diagonal_part(G1):
    return from_elements([g for g in G1.elements if g.is_diagonal()], G1.modulus)


def commutator(g, h):
    return g * h * g.inverse() * h.inverse()


def det_image(G, modulus_out):
    if G.modulus % modulus_out:
        raise ValueError(f"cannot read determinants mod {modulus_out} from a group mod {G.modulus}")
    return sorted({int(g.det()) % modulus_out for g in G.elements})


def contains_nontrivial_scalar(G1):
    for g in G1.elements:
        if g.is_scalar() and not g.is_identity():
            return g
    return None


def gl2_generators(p):
    """ Generators of GL_2(F_p): the Borel subgroup and the Weyl element. """
    w = primitive_root(p)
    return [GL2Element.diag(w, 1, p), GL2Element((1, 1, 0, 1), p), GL2Element((0, 1, 1, 0), p)]


def sl2_generators(p):
    return [GL2Element((1, 1, 0, 1), p), GL2Element((1, 0, 1, 1), p)]


def primitive_root(p):
    primes = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in primes):
            return g
    raise ValueError(f"no primitive root mod {p}")
