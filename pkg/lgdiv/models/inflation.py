"""
Quotients G/N and the inflation-restriction sequence

    0 -> H^1(G/N, M^N) -> H^1(G, M) -> H^1(N, M)
"""
import logging

import numpy as np

from ..errors import NotNormal, ValuesNotFixed
from ..linalg import RingMatrix, Submodule, apply, preimage
from .cohomology import Cocycle, GModule, fixed_submodule, h1
from .matgroup import is_normal

mainlogger = logging.getLogger('mainlogger')


class QuotientGroup:
    """
    G/N as a multiplication table over coset labels. Each coset is
    represented by its element of smallest BFS index in G, and acts on M^N
    through that representative.
    """

    def __init__(self, G, N):
        if not is_normal(N, G):
            raise NotNormal(f"subgroup of order {N.order} is not normal in group of order {G.order}")
        self.parent = G
        self.normal = N
        self.modulus = G.modulus
        coset_of = np.full(G.order, -1, dtype=np.int64)
        reps = []
        for i, g in enumerate(G.elements):
            if coset_of[i] >= 0:
                continue
            label = len(reps)
            reps.append(i)
            for h in N.elements:
                coset_of[G.index[(g * h).key]] = label
        assert (coset_of >= 0).all()
        assert len(reps) * N.order == G.order, "cosets do not partition the group"
        self.coset_of = coset_of
        self.rep_indices = np.array(reps, dtype=np.int64)
        self.elements = [G.elements[i] for i in reps]
        self.generators = list(G.generators)
        self.gen_table = coset_of[G.gen_table[:, self.rep_indices]]
        self._arrays = None

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return self.order

    def arrays(self):
        if self._arrays is None:
            self._arrays = self.parent.arrays()[self.rep_indices]
        return self._arrays

    def generator_arrays(self):
        return self.arrays()[self.coset_of[self.parent.generator_indices()]]

    def generator_indices(self):
        return self.coset_of[self.parent.generator_indices()]

    def coset(self, g):
        return int(self.coset_of[self.parent.index[g.key]])

    def __repr__(self):
        return f"QuotientGroup(|G|={self.parent.order}, |N|={self.normal.order})"


def fixed_module(N, M):
    return GModule(M.modulus, fixed_submodule(N, M))


def inflation(cls, G):
    """ Z'_g = Z_{gN} for a cocycle on G/N with values in M^N. """
    Q = cls.group
    if not isinstance(Q, QuotientGroup) or Q.parent.key() != G.key():
        raise NotNormal("cocycle does not live on a quotient of this group")
    fixed = fixed_submodule(Q.normal, cls.module)
    for v in cls.values:
        if not fixed.contains(v):
            raise ValuesNotFixed(f"value {v.tolist()} is not fixed by the normal subgroup")
    values = cls.values[Q.coset_of]
    return Cocycle(G, GModule(cls.module.modulus), values)


def _restriction_kernel(G, N, M, H):
    """ Classes of H^1(G, M) vanishing on N, in G-generator coordinates. """
    if not N.generators:
        return H.z1
    q = M.modulus
    idx = [G.index[n.key] for n in N.generators]
    stacked = H.gen_maps[idx].reshape(-1, H.gen_maps.shape[2])
    eye = np.eye(2, dtype=np.int64)
    moves = np.vstack([n.as_array() - eye for n in N.generators])
    b1_n = apply(RingMatrix(moves, q), M.coefficients)
    return H.z1.intersect(preimage(RingMatrix(stacked, q), b1_n))


def inflation_restriction(G, N, M):
    """
    Check the inflation-restriction sequence on one (G, N, M) instance.
    Orders are of cohomology groups (quotients by coboundaries).
    """
    Q = QuotientGroup(G, N)
    MN = fixed_module(N, M)
    HQ = h1(Q, MN)
    HG = h1(G, M)
    rows = [Cocycle.from_generator_values(Q, MN, x, HQ.gen_maps) for x in HQ.z1.basis.data]
    images = [inflation(z, G).generator_values() for z in rows]
    k2 = HG.b1.ambient_rank
    if images:
        inflated = Submodule.span(np.array(images, dtype=np.int64).reshape(-1, k2), M.modulus, k2)
    else:
        inflated = Submodule.zero(k2, M.modulus)
    im = inflated + HG.b1
    ker = _restriction_kernel(G, N, M, HG)
    im_order = im.order // HG.b1.order
    ker_order = ker.order // HG.b1.order
    out = {
        "quotient_order": Q.order,
        "h1_quotient_order": HQ.order,
        "h1_order": HG.order,
        "inflation_image_order": im_order,
        "restriction_kernel_order": ker_order,
        "lands_in_kernel": im <= ker,
        "injective": im_order == HQ.order,
        "exact": im == ker,
    }
    mainlogger.debug(f"inflation-restriction |G|={G.order} |N|={N.order}: {out}")
    return out
