"""
Matrix identities used inside the classification and the cyclic case,
checked exhaustively over F_p (and Z/p^2 for the lifts).
"""
import itertools
from math import gcd

from ..models.matgroup import GL2Element


def _units(p):
    return range(1, p)


def gamma_power(p):
    """ [[a,b],[0,a]]^(p-1) = [[1, (p-1) a^(p-2) b],[0,1]] for a, b != 0. """
    bad = []
    checked = 0
    for a in _units(p):
        for b in _units(p):
            g = GL2Element((a, b, 0, a), p)
            want = (1, ((p - 1) * pow(a, p - 2, p) * b) % p, 0, 1)
            checked += 1
            if (g ** (p - 1)).entries != want:
                bad.append({"a": a, "b": b})
    return checked, bad


def commutator(p):
    """
    delta gamma delta^-1 gamma^-1 = [[1, (d-a) b' / (d d')],[0,1]] for
    gamma = diag(a, d) with a != d and delta = [[a',b'],[0,d']], b' != 0.
    """
    bad = []
    checked = 0
    for a, d in itertools.permutations(_units(p), 2):
        gamma = GL2Element.diag(a, d, p)
        for a2, b2, d2 in itertools.product(_units(p), repeat=3):
            delta = GL2Element((a2, b2, 0, d2), p)
            top = ((d - a) * b2 * pow(d * d2, -1, p)) % p
            checked += 1
            got = delta * gamma * delta.inverse() * gamma.inverse()
            if got.entries != (1, top, 0, 1):
                bad.append({"a": a, "d": d, "a'": a2, "b'": b2, "d'": d2})
    return checked, bad


def lift_minus_identity_invertible(p):
    """ diag(l1, l2) + p*mu - I is invertible mod p^2 whenever l1, l2 != 1. """
    q = p * p
    bad = []
    checked = 0
    for l1, l2 in itertools.product(range(2, p), repeat=2):
        for mu in itertools.product(range(p), repeat=4):
            m = (l1 + p * mu[0] - 1, p * mu[1], p * mu[2], l2 + p * mu[3] - 1)
            det = (m[0] * m[3] - m[1] * m[2]) % q
            checked += 1
            if det % p == 0:
                bad.append({"l1": l1, "l2": l2, "mu": list(mu)})
    return checked, bad


def scaled_generator(p):
    """ (l + p*mu - 1) * a generates <a> in Z/p^2 for l != 1 mod p, a != 0. """
    q = p * p
    bad = []
    checked = 0
    for lam in range(2, p):
        for mu in range(p):
            unit = (lam + p * mu - 1) % q
            for a in range(1, q):
                checked += 1
                if _cyclic_order(unit * a % q, q) != _cyclic_order(a, q):
                    bad.append({"lambda": lam, "mu": mu, "a": a})
    return checked, bad


def _cyclic_order(x, q):
    return q // gcd(x, q)


IDENTITIES = {
    "gamma-power": gamma_power,
    "commutator": commutator,
    "lift-minus-identity": lift_minus_identity_invertible,
    "scaled-generator": scaled_generator,
}


def run_identities(names, p, report):
    """ Run the named identities, recording counts and any failures on the report. """
    for name in names:
        checked, bad = IDENTITIES[name](p)
        report.count(f"identity:{name}", checked)
        for params in bad:
            report.fail({"identity": name, "p": p}, params)
