"""
Field hypotheses read off the Galois image.

The checks never see fields, only the images G_1 <= GL_2(F_p) and
G_2 <= GL_2(Z/p^2). Through g(zeta) = zeta^det(g) the statements translate as

    k contains zeta_p                   det(G_1) = {1}
    k does not contain L (deg p in      p divides |det(G_2) mod p^2|
      Q(zeta_{p^2}))
    K_1 = k(zeta_p)                     det is injective on G_1
    rational point of exact order p     a nonzero G_1-fixed vector in F_p^2
    K_1 = k'(zeta_p), k' fixed by rho   <rho> meets ker(det) trivially
"""
import numpy as np

from ..linalg import RingMatrix, Submodule, kernel
from ..models.matgroup import det_image, from_elements, is_cyclic


def contains_zeta_p(G1):
    return det_image(G1, G1.prime) == [1]


def excludes_L(G2):
    p = G2.prime
    return len(det_image(G2, p * p)) % p == 0


def k1_is_k_zeta_p(G1):
    return len(det_image(G1, G1.prime)) == G1.order


def rational_point(G1):
    """ A nonzero vector of F_p^2 fixed by G_1, or None. """
    p = G1.prime
    fixed = Submodule.full(2, p)
    eye = np.eye(2, dtype=np.int64)
    for g in G1.generator_arrays():
        fixed = fixed.intersect(kernel(RingMatrix(g - eye, p)))
    if fixed.is_zero():
        return None
    return tuple(int(x) for x in fixed.basis.data[0])


def k1_is_kprime_zeta_p(rho):
    x = rho
    while not x.is_identity():
        if int(x.det()) == 1:
            return False
        x = x * rho
    return True


def det_kernel(G, modulus_out):
    """ {g in G : det g = 1 mod modulus_out}, a normal subgroup. """
    return from_elements([g for g in G.elements if int(g.det()) % modulus_out == 1],
                         G.modulus, cap=G.order + 1)


def consistent(G1):
    """ det injective on G_1 forces G_1 cyclic (it embeds in F_p^*). """
    return not k1_is_k_zeta_p(G1) or is_cyclic(G1)
