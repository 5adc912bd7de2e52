"""
Text formats shared by the CLI, the group files and the verifier reports.

    matrix literal   [[a,b],[c,d]] mod m      (the ` mod m` suffix is optional
                                               when the modulus is known)
    group file       mod p^n                  header, once
                     [[1,1],[0,1]]            one generator per line
                     # comment
"""
import re

from .basics import split_modulus
from .errors import ParseError, ModulusError

_TOKEN = re.compile(r"\s*(\[|\]|,|mod\b|\^|-?\d+|\S)")


def _tokens(text):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or not m.group(1):
            break
        out.append(m.group(1))
        pos = m.end()
    return out


def _modulus_from_tokens(toks, line=None):
    if not toks:
        raise ParseError("missing modulus after 'mod'", line=line)
    if len(toks) == 3 and toks[1] == "^":
        base, exp = toks[0], toks[2]
        if not (base.isdigit() and exp.isdigit()):
            raise ParseError("modulus must be p^n with integers p, n", token="".join(toks), line=line)
        q = int(base) ** int(exp)
    elif len(toks) == 1 and toks[0].isdigit():
        q = int(toks[0])
    else:
        raise ParseError("malformed modulus", token=" ".join(toks), line=line)
    try:
        split_modulus(q)
    except ModulusError as exc:
        raise ParseError(str(exc), token=" ".join(toks), line=line) from exc
    return q


def parse_matrix_literal(text, modulus=None, line=None):
    """
    Parse `[[a,b],[c,d]]` with an optional ` mod m` suffix.
    Returns (entries, modulus) with entries a 4-tuple (a, b, c, d).
    """
    toks = _tokens(text)
    expected = ["[", "[", None, ",", None, "]", ",", "[", None, ",", None, "]", "]"]
    if len(toks) < len(expected):
        bad = toks[-1] if toks else text.strip() or "<empty>"
        raise ParseError("incomplete matrix literal, expected [[a,b],[c,d]]", token=bad, line=line)
    entries = []
    for tok, want in zip(toks, expected):
        if want is None:
            if not re.fullmatch(r"-?\d+", tok):
                raise ParseError("expected an integer entry", token=tok, line=line)
            entries.append(int(tok))
        elif tok != want:
            raise ParseError(f"expected {want!r}", token=tok, line=line)
    rest = toks[len(expected):]
    if rest:
        if rest[0] != "mod":
            raise ParseError("unexpected trailing input", token=rest[0], line=line)
        literal_mod = _modulus_from_tokens(rest[1:], line=line)
        if modulus is not None and literal_mod != modulus:
            raise ParseError(f"literal modulus {literal_mod} disagrees with {modulus}",
                             token=str(literal_mod), line=line)
        modulus = literal_mod
    if modulus is None:
        raise ParseError("no modulus given for matrix literal", token=text.strip(), line=line)
    for e in entries:
        if not 0 <= e < modulus:
            raise ParseError(f"entry outside [0, {modulus})", token=str(e), line=line)
    return tuple(entries), modulus


def format_matrix_literal(entries, modulus=None):
    a, b, c, d = (int(x) for x in entries)
    body = f"[[{a},{b}],[{c},{d}]]"
    return body if modulus is None else f"{body} mod {modulus}"


def parse_group_text(text, modulus=None):
    """
    Parse a group description. Returns (modulus, [entries, ...]).
    A `mod` header, when present, must agree with a modulus passed in.
    """
    header_mod = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("mod"):
            if header_mod is not None:
                raise ParseError("modulus declared twice", token=line, line=lineno)
            header_mod = _modulus_from_tokens(_tokens(line)[1:], line=lineno)
            if modulus is not None and header_mod != modulus:
                raise ParseError(f"file modulus {header_mod} disagrees with {modulus}",
                                 token=line, line=lineno)
            continue
        q = header_mod if header_mod is not None else modulus
        entries, _ = parse_matrix_literal(line, modulus=q, line=lineno)
        gens.append(entries)
    q = header_mod if header_mod is not None else modulus
    if q is None:
        raise ParseError("group description declares no modulus (add a 'mod p^n' line)")
    return q, gens


def format_group_text(entries_list, modulus):
    p, n = split_modulus(modulus)
    lines = [f"mod {p}^{n}"]
    lines.extend(format_matrix_literal(e) for e in entries_list)
    return "\n".join(lines) + "\n"
