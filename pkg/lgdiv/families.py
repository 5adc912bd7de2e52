"""
Structured and seeded-random families of subgroups of GL_2(Z/p^nZ).

A family yields GroupInstance records (label + generator entries); closing
them is left to the caller so that sharded workers only close the groups
they own. Random choices come from a numpy Generator seeded by the caller.
"""
import logging
from collections.abc import Mapping

from .basics import check_modulus, split_modulus
from .errors import CapExceeded
from .literals import format_matrix_literal
from .models.matgroup import (GL2Element, close, element_order, gl2_generators, p_part,
                              primitive_root, sl2_generators)

mainlogger = logging.getLogger('mainlogger')


class GroupInstance:
    __slots__ = ("label", "family", "modulus", "generators")

    def __init__(self, label, family, modulus, generators):
        self.label = label
        self.family = family
        self.modulus = modulus
        self.generators = tuple(tuple(int(x) % modulus for x in g) for g in generators)

    def elements(self):
        return [GL2Element(g, self.modulus) for g in self.generators]

    def close(self, cap):
        return close(self.elements(), cap=cap, modulus=self.modulus)

    def to_dict(self):
        return {
            "label": self.label,
            "family": self.family,
            "modulus": self.modulus,
            "generators": [format_matrix_literal(g) for g in self.generators],
        }

    def __repr__(self):
        return f"GroupInstance({self.label}, mod {self.modulus})"


class AbstractFamily:
    name = "abstract"
    level = 1

    def __init__(self, p, limit=None):
        check_modulus(p, 1)
        self.p = p
        self.limit = limit

    @property
    def modulus(self):
        return self.p ** self.level

    def generator_sets(self, rng):
        raise NotImplementedError()

    def sample(self, rng):
        count = 0
        for label, gens in self.generator_sets(rng):
            if self.limit is not None and count >= self.limit:
                return
            yield GroupInstance(f"{self.name}/{label}", self.name, self.modulus, gens)
            count += 1


def random_invertible(rng, q):
    p, _ = split_modulus(q)
    while True:
        m = tuple(int(x) for x in rng.integers(0, q, size=4))
        if (m[0] * m[3] - m[1] * m[2]) % p:
            return m


def _units(p):
    return list(range(1, p))


SIGMA = (1, 1, 0, 1)


class ScalarFamily(AbstractFamily):
    """ Groups containing a nontrivial scalar lambda*I. """

    name = "scalar"

    def __init__(self, p, limit=None, extra=490):
        super().__init__(p, limit)
        self.extra = extra

    def generator_sets(self, rng):
        p = self.p
        for lam in range(2, p):
            s = (lam, 0, 0, lam)
            yield f"l{lam}", [s]
            yield f"l{lam}+sigma", [s, SIGMA]
            for a in _units(p):
                yield f"l{lam}+diag({a},1)", [s, (a, 0, 0, 1)]
        for i in range(self.extra):
            lam = int(rng.integers(2, p))
            yield f"l{lam}+rand{i}", [(lam, 0, 0, lam), random_invertible(rng, p)]


class SplitDiagonalFamily(AbstractFamily):
    """ Subgroups of the split torus, cyclic ones and products <diag(a,1), diag(1,b)>. """

    name = "split-diagonal"

    def generator_sets(self, rng):
        p = self.p
        for a in _units(p):
            for b in _units(p):
                if a == 1 and b == 1:
                    continue
                yield f"diag({a},{b})", [(a, 0, 0, b)]
        for a in range(2, p):
            for b in range(2, p):
                yield f"diag({a},1)xdiag(1,{b})", [(a, 0, 0, 1), (1, 0, 0, b)]


def nonsplit_generator(p):
    """ A generator of F_{p^2}^* acting on F_p^2 = F_p(sqrt(eps)). """
    eps = primitive_root(p)
    order = p * p - 1
    for a in range(p):
        for b in range(1, p):
            g = GL2Element((a, eps * b, b, a), p)
            if element_order(g) == order:
                return g
    raise AssertionError(f"no generator of the non-split torus mod {p}")


class NonSplitTorusFamily(AbstractFamily):
    """ Every subgroup of the non-split Cartan subgroup, one per divisor of p^2 - 1. """

    name = "nonsplit-torus"

    def generator_sets(self, rng):
        p = self.p
        g = nonsplit_generator(p)
        order = p * p - 1
        for d in range(1, order + 1):
            if order % d or d == 1:
                continue
            yield f"order{d}", [(g ** (order // d)).entries]


class BorelFamily(AbstractFamily):
    """ <diag(a,b), sigma> for every pair of units; a = b = 1 gives <sigma>. """

    name = "borel"

    def generator_sets(self, rng):
        p = self.p
        for a in _units(p):
            for b in _units(p):
                yield f"diag({a},{b})+sigma", [(a, 0, 0, b), SIGMA]


class UnipotentFamily(AbstractFamily):
    name = "unipotent"

    def generator_sets(self, rng):
        yield "sigma", [SIGMA]
        yield "lower", [(1, 0, 1, 1)]


class FullFamily(AbstractFamily):
    name = "full"

    def generator_sets(self, rng):
        p = self.p
        yield "GL2", [g.entries for g in gl2_generators(p)]
        yield "SL2", [g.entries for g in sl2_generators(p)]


class RandomFamily(AbstractFamily):
    """ Seeded random subgroups on one or two generators. """

    name = "random"

    def __init__(self, p, limit=None, count=100, cyclic_only=False, level=1):
        super().__init__(p, limit)
        check_modulus(p, level)
        self.count = count
        self.cyclic_only = cyclic_only
        self.level = level

    def generator_sets(self, rng):
        q = self.modulus
        for i in range(self.count):
            k = 1 if self.cyclic_only else int(rng.integers(1, 3))
            yield f"r{i}", [random_invertible(rng, q) for _ in range(k)]


FAMILIES = {
    cls.name: cls for cls in (ScalarFamily, SplitDiagonalFamily, NonSplitTorusFamily,
                              BorelFamily, UnipotentFamily, FullFamily, RandomFamily)
}


def teichmuller_lift(g, modulus):
    """
    Lift g in GL_2(F_p) to GL_2(Z/modulus). Elements of order prime to p
    get the unique lift of the same order; others the naive integer lift.
    """
    naive = GL2Element(g.entries, modulus)
    if p_part(element_order(g), g.prime) > 1:
        return naive
    o = element_order(naive)
    pe = p_part(o, g.prime)
    m = o // pe
    if m == 1:
        return naive
    x = naive ** pe
    return x ** pow(pe, -1, m)


def kernel_element(B, p):
    a, b, c, d = (int(x) % p for x in B)
    return (1 + p * a, p * b, p * c, 1 + p * d)


KERNEL_SLICES = {
    "none": [],
    "scalar": [(1, 0, 0, 1)],
    "nilpotent": [(0, 1, 0, 0)],
    "diagonal": [(1, 0, 0, 0), (0, 0, 0, 1)],
    "upper": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1)],
    "trace-zero": [(1, 0, 0, -1), (0, 1, 0, 0), (0, 0, 1, 0)],
    "full": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)],
}


class LiftFamily:
    """
    Level-2 groups over a level-1 family: every base group is lifted with
    Teichmueller or randomly perturbed generators, together with a slice
    I + pB of the reduction kernel (structured slices plus seeded random
    ones of dimension 0..4).
    """

    name = "lift"

    def __init__(self, base, slices=None, random_slices=2, perturb=True, limit=None):
        self.base = base
        self.p = base.p
        self.slices = list(KERNEL_SLICES) if slices is None else list(slices)
        self.random_slices = random_slices
        self.perturb = perturb
        self.limit = limit

    def _lifts(self, gens, rng):
        p = self.p
        q = p * p
        teich = [teichmuller_lift(GL2Element(g, p), q).entries for g in gens]
        yield "teich", teich
        if self.perturb:
            moved = []
            for g in gens:
                shift = rng.integers(0, p, size=4)
                moved.append(tuple(int(x) + p * int(s) for x, s in zip(g, shift)))
            yield "perturb", moved

    def sample(self, rng):
        p = self.p
        q = p * p
        count = 0
        for inst in self.base.sample(rng):
            for how, lifted in self._lifts(inst.generators, rng):
                slices = [(name, KERNEL_SLICES[name]) for name in self.slices]
                for i in range(self.random_slices):
                    dim = int(rng.integers(0, 5))
                    slices.append((f"rand{i}d{dim}",
                                   [tuple(int(x) for x in rng.integers(0, p, size=4)) for _ in range(dim)]))
                for sname, basis in slices:
                    if self.limit is not None and count >= self.limit:
                        return
                    gens = list(lifted) + [kernel_element(B, p) for B in basis]
                    yield GroupInstance(f"{inst.label}/{how}/{sname}", f"{self.base.name}-lift", q, gens)
                    count += 1


def _round_robin(streams):
    streams = list(streams)
    while streams:
        alive = []
        for s in streams:
            item = next(s, None)
            if item is not None:
                yield item
                alive.append(s)
        streams = alive


def family_instances(families, p, n, rng):
    """
    Instances of the given families at level n, taken in turn from each
    family so that any prefix covers all of them.

    families is a list of names or a mapping name -> constructor params; a
    `lift` entry in the params configures the LiftFamily used at level 2.
    """
    check_modulus(p, n)
    if not isinstance(families, Mapping):
        families = {name: {} for name in families}
    streams = []
    for name, params in families.items():
        params = dict(params or {})
        lift_params = dict(params.pop("lift", None) or {})
        base = FAMILIES[name](p, **params)
        if base.level == n:
            streams.append(base.sample(rng))
        elif n == 2:
            streams.append(LiftFamily(base, **lift_params).sample(rng))
    return _round_robin(streams)


def close_instance(inst, cap):
    """ The closed group, or None when the closure exceeds the cap. """
    try:
        return inst.close(cap)
    except CapExceeded:
        mainlogger.debug(f"{inst.label}: closure exceeds {cap} elements, skipped")
        return None
