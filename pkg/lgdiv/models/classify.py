import logging

from ..basics import split_modulus
from ..linalg import Submodule
from .matgroup import (GL2Element, conjugate, cyclic_generator, diagonal_part, is_cyclic)

mainlogger = logging.getLogger('mainlogger')

TWO_LINES = "TwoLines-DiagonalCyclic"
ONE_LINE = "OneLine-Borel"
NO_LINE = "NoLine"
MANY_LINES = "ManyLines-Scalarish"

LINE_COUNTS = {TWO_LINES: 2, ONE_LINE: 1, NO_LINE: 0}


def line_generators(p):
    """ Normalised generators of the p+1 lines of F_p^2, in lexicographic order. """
    return [(0, 1)] + [(1, t) for t in range(p)]


def _stabilises(g, v, p):
    x, y = g.act(v)
    return (v[0] * y - v[1] * x) % p == 0


def invariant_lines(G1, M=None):
    """ All order-p submodules of F_p^2 stable under every generator of G1. """
    p, n = split_modulus(G1.modulus)
    assert n == 1, f"invariant_lines works mod p, got mod {G1.modulus}"
    if M is not None:
        assert M.modulus == G1.modulus, "module and group moduli differ"
    out = []
    for v in line_generators(p):
        if all(_stabilises(g, v, p) for g in G1.generators):
            out.append(Submodule.span([v], p, 2))
    assert len(out) in (0, 1, 2, p + 1), f"impossible number of invariant lines: {len(out)}"
    return out


class Classification:
    """
    Shape of G1 <= GL_2(F_p) by its invariant lines.

    basis_change P has the new basis vectors as columns, so the conjugated
    group P^-1 G1 P is `conjugated`; rho and sigma are elements of it.
    """

    def __init__(self, tag, basis_change, conjugated, rho=None, sigma=None,
                 line_count=0, cyclic=False, diagonal_order=None):
        assert tag == MANY_LINES or LINE_COUNTS[tag] == line_count, \
            f"tag {tag} inconsistent with {line_count} invariant lines"
        self.tag = tag
        self.basis_change = basis_change
        self.conjugated = conjugated
        self.rho = rho
        self.sigma = sigma
        self.line_count = line_count
        self.cyclic = cyclic
        self.diagonal_order = diagonal_order

    def to_dict(self):
        return {
            "tag": self.tag,
            "lines": self.line_count,
            "cyclic": self.cyclic,
            "basis_change": repr(self.basis_change),
            "rho": repr(self.rho) if self.rho is not None else None,
            "sigma": repr(self.sigma) if self.sigma is not None else None,
            "diagonal_order": self.diagonal_order,
        }

    def __repr__(self):
        return f"Classification({self.tag}, rho={self.rho!r}, sigma={self.sigma!r})"


def _basis(v, w, p):
    return GL2Element((v[0], w[0], v[1], w[1]), p)


def classify_G1(G1):
    p, n = split_modulus(G1.modulus)
    assert n == 1, f"classify_G1 works mod p, got mod {G1.modulus}"
    lines = invariant_lines(G1)
    count = len(lines)
    ident = GL2Element.identity(p)
    cyclic = is_cyclic(G1)

    if count == 2:
        v, w = (tuple(int(x) for x in line.basis.data[0]) for line in lines)
        P = _basis(v, w, p)
        C = conjugate(G1, P)
        assert all(g.is_diagonal() for g in C.generators), "two lines but not diagonalised"
        rho = cyclic_generator(C) if cyclic else None
        return Classification(TWO_LINES, P, C, rho=rho, line_count=2, cyclic=cyclic,
                              diagonal_order=C.order)

    if count == 1:
        v = tuple(int(x) for x in lines[0].basis.data[0])
        w = (1, 0) if v == (0, 1) else (0, 1)
        P = _basis(v, w, p)
        C = conjugate(G1, P)
        unipotent = next((g for g in C.elements
                          if g.entries[0] == 1 and g.entries[3] == 1 and g.entries[1] != 0), None)
        sigma = None
        if unipotent is not None:
            P = P * GL2Element.diag(1, pow(unipotent.entries[1], -1, p), p)
            C = conjugate(G1, P)
            sigma = GL2Element((1, 1, 0, 1), p)
            assert sigma in C, "rescaled basis lost the unipotent element"
        assert all(g.is_upper_triangular() for g in C.generators), "one line but not triangular"
        GD = diagonal_part(C)
        rho = cyclic_generator(GD)
        if sigma is None:
            mainlogger.warning(f"single invariant line but no element of order {p}")
        return Classification(ONE_LINE, P, C, rho=rho, sigma=sigma, line_count=1,
                              cyclic=cyclic, diagonal_order=GD.order)

    if count == 0:
        return Classification(NO_LINE, ident, G1, line_count=0, cyclic=cyclic)

    return Classification(MANY_LINES, ident, G1, rho=cyclic_generator(G1),
                          line_count=count, cyclic=cyclic, diagonal_order=G1.order)
