import os

from lgdiv.errors import ParseError
from lgdiv.literals import format_matrix_literal, parse_matrix_literal
from lgdiv.models.classify import classify_G1, invariant_lines
from lgdiv.models.matgroup import (GL2Element, close, det_image, diagonal_part, h_dimension,
                                   reduction_split)
from utils.utils import load_group_file


def load_group(sources, q, cap, file_modulus=None):
    """
    A closed group from a group file path or from inline matrix literals.
    Literals without a `mod` suffix are read mod q; a group file carries its
    own modulus, which must equal file_modulus when that is given.
    """
    if len(sources) == 1 and os.path.isfile(sources[0]):
        return load_group_file(sources[0], modulus=file_modulus, cap=cap)
    gens = []
    for s in sources:
        entries, _ = parse_matrix_literal(s, modulus=q)
        try:
            gens.append(GL2Element(entries, q))
        except ValueError as exc:
            raise ParseError(str(exc), token=s) from exc
    return close(gens, cap=cap, modulus=q)


def group_summary(G):
    G1, Hk = (G, None) if G.level == 1 else reduction_split(G)
    cls = classify_G1(G1)
    lines = invariant_lines(G1)
    out = {
        "modulus": G.modulus,
        "order": G.order,
        "generators": [format_matrix_literal(g.entries) for g in G.generators],
        "diagonal_order": diagonal_part(cls.conjugated).order,
        "det_image": det_image(G, G.modulus),
        "invariant_lines": [str(tuple(int(x) for x in line.basis.data[0])) for line in lines],
        "classification": cls.to_dict(),
    }
    if Hk is not None:
        out["G1_order"] = G1.order
        out["dim_H"] = h_dimension(Hk)
    return out


def format_summary(summary):
    width = max(len(k) for k in summary)
    rows = []
    for key, value in summary.items():
        if isinstance(value, dict):
            value = ", ".join(f"{k}={v}" for k, v in value.items() if v is not None)
        elif isinstance(value, list):
            value = " ".join(str(v) for v in value) or "-"
        rows.append(f"{key.ljust(width)}  {value}")
    return "\n".join(rows) + "\n"
