"""
One check per statement in the registry. A check samples groups from its
families, closes them, and records failures, findings (search hits) and
observations (translations that did not hold on an abstract group) on a
VerdictReport.
"""
import logging
import time
from itertools import islice

import numpy as np
from tqdm import tqdm

from ..common import default
from ..errors import BudgetExceeded, CapExceeded, SylowNotNormal
from ..families import GroupInstance, close_instance, family_instances, random_invertible
from ..linalg import RingMatrix, Submodule, apply, quotient_invariants
from ..literals import parse_matrix_literal
from ..models.classify import MANY_LINES, ONE_LINE, TWO_LINES, classify_G1, invariant_lines
from ..models.cohomology import GModule, cyclic_h1, h1, h1_loc
from ..models.inflation import QuotientGroup, fixed_module, inflation_restriction
from ..models.matgroup import (close, contains_nontrivial_scalar, cyclic_generator,
                               cyclic_subgroups, diagonal_part, element_order, from_elements,
                               gl2_generators, h_dimension, is_cyclic, is_normal, p_sylow,
                               reduction_split)
from . import hypotheses
from .identities import IDENTITIES, run_identities
from .report import VerdictReport

mainlogger = logging.getLogger('mainlogger')


def shard(items, rank, world_size):
    """ Contiguous slice of items for one worker; the last worker takes the remainder. """
    split = len(items) // world_size
    stop = len(items) if rank == world_size - 1 else split * (rank + 1)
    return items[split * rank:stop]


def reduction(G):
    """ (G_1, H): the image mod p and the kernel of reduction (None at level 1). """
    if G.level == 1:
        return G, None
    return reduction_split(G)


def standard_module(G):
    return GModule(G.modulus)


class VerificationCheck:
    id = None
    families = {}
    # "base": level 1 only, "lift": level 2 only, "both": level 1, plus level 2 when n = 2
    levels = "both"

    def __init__(self, families=None, max_groups=None, base_groups=None, method="elements",
                 progress=True):
        if families is not None:
            self.families = dict(families) if not isinstance(families, (list, tuple)) \
                else {name: {} for name in families}
        self.max_groups = max_groups
        self.base_groups = base_groups
        self.method = method
        self.progress = progress

    def levels_for(self, spec):
        if self.levels == "base":
            return [1]
        if self.levels == "lift":
            return [2]
        return [1] if spec.n == 1 else [1, 2]

    def limit(self, spec, n=None):
        """ Instances drawn at level n; level 1 may carry its own limit. """
        limit = default(spec.max_groups, self.max_groups)
        if n == 1:
            return default(default(spec.base_groups, self.base_groups), limit)
        return limit

    def instances(self, spec):
        """ Sampled instances, at most `limit` per level. """
        rng = np.random.default_rng(spec.seed)
        out = []
        for n in self.levels_for(spec):
            level = family_instances(self.families, spec.p, n, rng)
            out.extend(islice(level, self.limit(spec, n)))
        return out

    def setup(self, spec, report):
        pass

    def examine(self, inst, G, report):
        raise NotImplementedError()

    def _tick(self, spec, start):
        if time.monotonic() - start > spec.budget_secs:
            raise BudgetExceeded(f"{self.id}: budget of {spec.budget_secs}s exhausted")

    def run(self, spec, rank=0, world_size=1):
        report = VerdictReport(spec)
        start = time.monotonic()
        if rank == 0:
            self.setup(spec, report)
        todo = shard(self.instances(spec), rank, world_size)
        mainlogger.info(f"{self.id} [rank {rank}/{world_size}]: {len(todo)} groups, p={spec.p}, n={spec.n}")
        try:
            for inst in tqdm(todo, desc=self.id, disable=not self.progress or rank != 0):
                self._tick(spec, start)
                G = close_instance(inst, spec.cap)
                if G is None:
                    report.skip("cap")
                    continue
                try:
                    self.examine(inst, G, report)
                except CapExceeded as exc:
                    mainlogger.debug(f"{inst.label}: {exc}")
                    report.skip("cap")
        except BudgetExceeded as exc:
            mainlogger.warning(str(exc))
            report.budget_hit = True
        report.elapsed = time.monotonic() - start
        mainlogger.info(f"{self.id} [rank {rank}]: {report.verdict}, {report.groups_tested} tested")
        return report

    def replay(self, spec, failure):
        """ Recompute the data recorded for a failure from its serialized subject. """
        subject = failure["subject"]
        if "identity" in subject:
            _, bad = IDENTITIES[subject["identity"]](subject["p"])
            return [params for params in bad if params == failure["data"]]
        gens = [parse_matrix_literal(g, subject["modulus"])[0] for g in subject["generators"]]
        inst = GroupInstance(subject["label"], subject["family"], subject["modulus"], gens)
        scratch = VerdictReport(spec)
        self.examine(inst, inst.close(spec.cap), scratch)
        return [f["data"] for f in scratch.failures if f["subject"] == subject]


def _summary(H):
    return {"order": H.order, "invariants": list(H.invariants)}


class LocalDefinitionCheck(VerificationCheck):
    """ Both descriptions of H^1_loc agree, and cyclic groups have none. """

    id = "def-h1loc"
    families = {"random": {"count": 500, "cyclic_only": True}, "borel": {}, "unipotent": {},
                "split-diagonal": {}}

    def examine(self, inst, G, report):
        M = standard_module(G)
        H = h1(G, M)
        by_elements = h1_loc(G, M, method="elements", base=H)
        by_restriction = h1_loc(G, M, method="restriction", base=H)
        cyclic = is_cyclic(G)
        report.tested()
        report.count("cyclic" if cyclic else "noncyclic")
        data = {"order": G.order, "h1": _summary(H), "loc_elements": _summary(by_elements),
                "loc_restriction": _summary(by_restriction)}
        if by_elements.z1 != by_restriction.z1:
            report.fail(inst.to_dict(), dict(data, reason="characterisations disagree"))
        if cyclic and not by_elements.is_trivial():
            report.fail(inst.to_dict(), dict(data, reason="cyclic group with nonzero H1_loc"))
        if H.z1.order != H.b1.order * H.order:
            report.fail(inst.to_dict(), dict(data, reason="|Z1| != |B1| |H1|"))


class IsogenyContrapositiveCheck(VerificationCheck):
    """ No invariant line mod p forces H^1 = 0. """

    id = "thm-2.2"
    families = {"full": {}, "nonsplit-torus": {}, "random": {"count": 100}}

    def examine(self, inst, G, report):
        G1, _ = reduction(G)
        if invariant_lines(G1):
            report.skip("has-line")
            return
        H = h1(G, standard_module(G))
        report.tested()
        report.count(f"level-{G.level}")
        if not H.is_trivial():
            report.fail(inst.to_dict(), {"order": G.order, "h1": _summary(H)})


class ScalarVanishingCheck(VerificationCheck):
    """ A nontrivial scalar in G_1 forces H^1 = 0. """

    id = "lemma-2.3"
    families = {"scalar": {"lift": {"random_slices": 1, "perturb": False}}}

    def examine(self, inst, G, report):
        G1, _ = reduction(G)
        tau = contains_nontrivial_scalar(G1)
        if tau is None:
            report.skip("no-scalar")
            return
        H = h1(G, standard_module(G))
        report.tested()
        report.count(f"level-{G.level}")
        if not H.is_trivial():
            report.fail(inst.to_dict(), {"order": G.order, "scalar": repr(tau), "h1": _summary(H)})


def adapted_diagonal_part(G1):
    """ G_D in a basis adapted to the invariant lines of G_1. """
    cls = classify_G1(G1)
    return cls, diagonal_part(cls.conjugated)


class NonCyclicDiagonalCheck(VerificationCheck):
    """ A non-cyclic G_D contains a scalar and forces H^1 = 0. """

    id = "cor-2.4"
    families = {"split-diagonal": {}, "borel": {}, "scalar": {"extra": 20}, "random": {"count": 50}}

    def examine(self, inst, G, report):
        G1, _ = reduction(G)
        _, GD = adapted_diagonal_part(G1)
        if is_cyclic(GD):
            report.skip("cyclic-GD")
            return
        report.tested()
        report.count(f"level-{G.level}")
        data = {"order": G.order, "diagonal_order": GD.order}
        if contains_nontrivial_scalar(GD) is None:
            report.fail(inst.to_dict(), dict(data, reason="non-cyclic G_D without a scalar"))
        H = h1(G, standard_module(G))
        if not H.is_trivial():
            report.fail(inst.to_dict(), dict(data, h1=_summary(H)))


def _two_line_case(cls, G1):
    if cls.tag == TWO_LINES:
        return cls.cyclic and cls.rho is not None
    # trivial G_1 fixes every line; it is generated by the diagonal identity
    return cls.tag == MANY_LINES and G1.order == 1


def borel_case_problems(cls, G1):
    """ Sub-claims of the one-line case; returns the ones that fail. """
    p = G1.prime
    problems = []
    rho, sigma, C = cls.rho, cls.sigma, cls.conjugated
    if sigma is None:
        return ["no unipotent element"]
    if rho is None:
        return ["diagonal part not cyclic"]
    if close([rho, sigma], modulus=p).order != G1.order:
        problems.append("G_1 != <rho, sigma>")
    if G1.order != p * cls.diagonal_order:
        problems.append("|G_1| / |G_D| != p")
    if element_order(rho) * p != G1.order:
        problems.append("[G_1 : <rho>] != p")
    if not is_normal(close([sigma], modulus=p), C):
        problems.append("<sigma> not normal")
    if is_normal(close([rho], modulus=p), C) != rho.is_identity():
        problems.append("<rho> normal but rho != I, or the converse")
    if not rho.is_scalar() and (sigma * rho * sigma.inverse()).is_diagonal():
        problems.append("sigma rho sigma^-1 diagonal")
    return problems


class ClassificationCheck(VerificationCheck):
    """ Shape of G_1 when H^1(G_2) is nonzero: one or two invariant lines. """

    id = "lemma-2.5"
    levels = "lift"
    families = {"borel": {}, "unipotent": {}, "split-diagonal": {}, "random": {"count": 40}}
    identities = ("gamma-power", "commutator")

    def setup(self, spec, report):
        run_identities(self.identities, spec.p, report)

    def examine(self, inst, G, report):
        H = h1(G, standard_module(G))
        if H.is_trivial():
            report.skip("h1-zero")
            return
        G1, _ = reduction(G)
        cls = classify_G1(G1)
        report.tested()
        data = {"order": G.order, "h1": _summary(H), "classification": cls.to_dict()}
        if _two_line_case(cls, G1):
            report.count("two-lines")
            return
        if cls.tag == ONE_LINE:
            problems = borel_case_problems(cls, G1)
            if not problems:
                report.count("one-line")
                report.count("rho-identity" if cls.rho.is_identity() else "rho-nontrivial")
                return
            report.fail(inst.to_dict(), dict(data, problems=problems))
            return
        report.fail(inst.to_dict(), dict(data, problems=["neither one nor two invariant lines"]))


def normal_sylow(G):
    try:
        return p_sylow(G, strict=True)
    except SylowNotNormal:
        return None


def kernel_in_sylow(P, Hk):
    """ H equals the intersection of the p-Sylow P with the reduction kernel. """
    p = P.prime
    congruent = {g.key for g in P.elements if g.reduce(p).is_identity()}
    return congruent == {h.key for h in Hk.elements}


class DimensionCheck(VerificationCheck):
    """ dim H != 2 forces H^1_loc(G_2) = 0. """

    id = "lemma-2.6"
    levels = "lift"
    families = {"borel": {}, "unipotent": {}, "split-diagonal": {}, "random": {"count": 40}}

    def examine(self, inst, G, report):
        G1, Hk = reduction(G)
        dim = h_dimension(Hk)
        if dim == 2:
            report.skip("dim-2")
            return
        report.tested()
        report.count(f"dim-{dim}")
        data = {"order": G.order, "dim_H": dim}
        cls = classify_G1(G1)
        shaped = (is_cyclic(G1) and G1.order % G.prime != 0) or (cls.tag == ONE_LINE and cls.rho is not None)
        P = normal_sylow(G)
        if shaped:
            if P is None:
                report.observe(inst.to_dict(), dict(data, note="p-Sylow not normal"))
            elif not kernel_in_sylow(P, Hk):
                report.fail(inst.to_dict(), dict(data, reason="H != H_p meet ker(reduction)"))
        if P is None:
            report.count("sylow-not-normal")
        else:
            LP = h1_loc(P, standard_module(P), method=self.method)
            if LP.is_trivial():
                report.count("sylow-loc-zero")
            else:
                report.fail(inst.to_dict(), dict(data, sylow_order=P.order, sylow_h1loc=_summary(LP),
                                                 reason="H1_loc of the p-Sylow is nonzero"))
        L = h1_loc(G, standard_module(G), method=self.method)
        if not L.is_trivial():
            report.fail(inst.to_dict(), dict(data, h1loc=_summary(L)))


class CyclicFormulaCheck(VerificationCheck):
    """ H^1 of a cyclic group equals ker(N) / Im(delta - 1). """

    id = "lemma-3.1"
    families = {}

    def __init__(self, random_lifts=200, **kwargs):
        super().__init__(**kwargs)
        self.random_lifts = random_lifts

    def instances(self, spec):
        p = spec.p
        out = []
        full = close(gl2_generators(p), modulus=p)
        for i, C in enumerate(cyclic_subgroups(full)):
            gen = cyclic_generator(C)
            out.append(GroupInstance(f"gl2-cyclic/{i}", "gl2-cyclic", p, [gen.entries]))
        if spec.n == 2:
            rng = np.random.default_rng(spec.seed)
            q = p * p
            for i in range(self.random_lifts):
                out.append(GroupInstance(f"cyclic-random/{i}", "cyclic-random", q,
                                         [random_invertible(rng, q)]))
        return out[:self.limit(spec)]

    def examine(self, inst, G, report):
        M = standard_module(G)
        delta = G.generators[0]
        generic = h1(G, M)
        formula = cyclic_h1(delta, M)
        report.tested()
        report.count(f"level-{G.level}")
        if generic.invariants != formula.invariants:
            report.fail(inst.to_dict(), {"order": G.order, "h1": _summary(generic),
                                         "cyclic_formula": _summary(formula)})


def gamma_subgroup(G):
    """ Elements congruent to I mod p with determinant 1 mod p^2. """
    p = G.prime
    q = G.modulus
    elems = [g for g in G.elements if g.reduce(p).is_identity() and int(g.det()) % q == 1]
    return from_elements(elems, q, cap=G.order + 1)


def line_eigenvalue(g, v):
    """ lambda with g v = lambda v mod p, or None when v is not an eigenvector. """
    p = g.prime
    w = g.reduce(p).act(v)
    i = next(j for j, x in enumerate(v) if x % p)
    lam = w[i] * pow(v[i], -1, p) % p
    return lam if all((w[j] - lam * v[j]) % p == 0 for j in range(2)) else None


def quotient_term(G, N, line=None):
    """
    H^1(G/N, M^N) with the data of the cyclic-quotient argument: whether the
    quotient is cyclic, and whether delta - 1 is onto M^N for a generator
    delta. With a line, also the eigenvalue of delta on it mod p.
    """
    Q = QuotientGroup(G, N)
    MN = fixed_module(N, standard_module(G))
    HQ = h1(Q, MN)
    out = {"quotient_order": Q.order, "fixed_order": MN.order, "h1": _summary(HQ), "cyclic": False,
           "fixed_invariants": quotient_invariants(MN.coefficients, Submodule.zero(2, G.modulus))}
    q = G.modulus
    for rep in Q.elements:
        x, t = rep, 1
        while Q.coset(x) != 0:
            x = x * rep
            t += 1
        if t == Q.order:
            step = RingMatrix(rep.as_array() - np.eye(2, dtype=np.int64), q)
            out.update(cyclic=True, generator=repr(rep),
                       onto=apply(step, MN.coefficients) == MN.coefficients)
            if line is not None:
                out["eigenvalue"] = line_eigenvalue(rep, tuple(int(x) for x in line.basis.data[0]))
            break
    return out


class CyclicCaseCheck(VerificationCheck):
    """ Cyclic G_1 with nonzero H^1_loc: a fixed vector of order p and det injective on G_1. """

    id = "prop-3.2"
    levels = "lift"
    families = {"split-diagonal": {}, "unipotent": {}, "nonsplit-torus": {}, "scalar": {"extra": 10},
                "random": {"count": 40, "cyclic_only": True}}
    identities = ("lift-minus-identity",)

    def setup(self, spec, report):
        run_identities(self.identities, spec.p, report)

    def examine(self, inst, G, report):
        G1, _ = reduction(G)
        if not hypotheses.excludes_L(G):
            report.skip("det-hypothesis")
            return
        if not is_cyclic(G1):
            report.skip("noncyclic")
            return
        report.tested()
        data = {"order": G.order, "G1_order": G1.order}
        p = G.prime
        gen1 = cyclic_generator(G1)
        a, b, c, d = gen1.entries
        if ((a - 1) * (d - 1) - b * c) % p:
            report.count("engine")
            term = quotient_term(G, gamma_subgroup(G))
            if not term["cyclic"]:
                report.observe(inst.to_dict(), dict(data, note="G_2 / Gamma not cyclic", term=term))
            elif not term["onto"] or term["h1"]["order"] != 1:
                report.fail(inst.to_dict(), dict(data, reason="inflation term does not vanish", term=term))
        L = h1_loc(G, standard_module(G), method=self.method)
        if L.is_trivial():
            report.count("h1loc-zero")
            return
        report.count("h1loc-nonzero")
        data["h1loc"] = _summary(L)
        point = hypotheses.rational_point(G1)
        if point is None:
            report.fail(inst.to_dict(), dict(data, reason="no fixed vector of order p"))
        if not hypotheses.k1_is_k_zeta_p(G1):
            report.fail(inst.to_dict(), dict(data, reason="det not injective on G_1"))


def h_prime(G, line):
    """ g in G_2 fixing the invariant line pointwise mod p, with det 1 mod p^2. """
    p = G.prime
    q = G.modulus
    v = tuple(int(x) for x in line.basis.data[0])
    elems = [g for g in G.elements
             if int(g.det()) % q == 1 and g.reduce(p).act(v) == v]
    return from_elements(elems, q, cap=G.order + 1)


class NonCyclicCaseCheck(VerificationCheck):
    """ Non-cyclic G_1 with nonzero H^1_loc: rho fixes the first basis vector. """

    id = "prop-3.3"
    levels = "lift"
    families = {"borel": {}, "random": {"count": 40}}
    identities = ("scaled-generator",)

    def setup(self, spec, report):
        run_identities(self.identities, spec.p, report)

    def mechanics(self, inst, G, G1, Hk, cls, report, data):
        p = G.prime
        if not is_normal(close([cls.sigma], modulus=p), cls.conjugated):
            report.fail(inst.to_dict(), dict(data, reason="<sigma> not normal in G_1"))
        line = invariant_lines(G1)[0]
        Hp = h_prime(G, line)
        meet = sum(1 for h in Hk.elements if h.key in Hp.index)
        data.update(h_prime_order=Hp.order, h_meet_h_prime=meet)
        if Hp.order != p * p or meet != p:
            report.observe(inst.to_dict(), dict(data, note="|H'| != p^2 or |H meet H'| != p"))
            return
        report.count("h-prime-ok")
        if cls.rho.entries[0] % p == 1:
            report.count("lambda1-one")
            return
        term = quotient_term(G, Hp, line=line)
        data["h_prime_term"] = term
        # delta acts on a cyclic M^{H'} by a scalar congruent to its eigenvalue on the line
        if not term["cyclic"] or len(term["fixed_invariants"]) != 1 or term.get("eigenvalue") in (None, 1):
            report.observe(inst.to_dict(), dict(data, note="H' quotient term outside the cyclic case"))
            return
        report.count("h-prime-term")
        if not term["onto"] or term["h1"]["order"] != 1:
            report.fail(inst.to_dict(), dict(data, reason="delta - I not onto M^{H'}"))

    def examine(self, inst, G, report):
        G1, Hk = reduction(G)
        if not hypotheses.excludes_L(G):
            report.skip("det-hypothesis")
            return
        if is_cyclic(G1):
            report.skip("cyclic")
            return
        report.tested()
        cls = classify_G1(G1)
        data = {"order": G.order, "G1_order": G1.order, "tag": cls.tag}
        if cls.tag == ONE_LINE and cls.sigma is not None and cls.rho is not None:
            report.count("borel")
            self.mechanics(inst, G, G1, Hk, cls, report, data)
        L = h1_loc(G, standard_module(G), method=self.method)
        if L.is_trivial():
            report.count("h1loc-zero")
            return
        report.count("h1loc-nonzero")
        data["h1loc"] = _summary(L)
        if cls.tag != ONE_LINE or cls.rho is None:
            report.fail(inst.to_dict(), dict(data, reason="not of the form <rho, sigma>"))
            return
        if cls.rho.entries[0] != 1:
            report.fail(inst.to_dict(), dict(data, reason="rho does not fix the first basis vector",
                                             rho=repr(cls.rho)))
        if not hypotheses.k1_is_kprime_zeta_p(cls.rho):
            report.fail(inst.to_dict(), dict(data, reason="<rho> meets ker(det)"))


class MainTheoremSearch(VerificationCheck):
    """
    Search for G_2 with the det hypothesis, nonzero H^1_loc and no G_1-fixed
    vector of order p. Hits are findings, never failures.
    """

    id = "main-thm-search"
    levels = "lift"
    families = {"borel": {}, "unipotent": {}, "split-diagonal": {}, "nonsplit-torus": {},
                "scalar": {"extra": 10}, "full": {}, "random": {"count": 100}}

    def examine(self, inst, G, report):
        if not hypotheses.excludes_L(G):
            report.skip("det-hypothesis")
            return
        report.tested()
        report.count(f"family:{inst.family}")
        L = h1_loc(G, standard_module(G), method=self.method)
        if L.is_trivial():
            return
        report.count("h1loc-nonzero")
        G1, Hk = reduction(G)
        if hypotheses.rational_point(G1) is None:
            report.find(inst.to_dict(), {"order": G.order, "dim_H": h_dimension(Hk),
                                         "h1loc": _summary(L), "flag": "possibly-non-realizable"})


def normal_subgroups(G):
    """ Normal subgroups the sequence is checked through, labelled. """
    out = []
    if G.level == 2:
        _, Hk = reduction_split(G)
        out.append(("reduction-kernel", Hk))
        out.append(("gamma", gamma_subgroup(G)))
    out.append(("det-kernel", hypotheses.det_kernel(G, G.modulus)))
    try:
        out.append(("p-sylow", p_sylow(G, strict=True)))
    except SylowNotNormal:
        pass
    return [(name, N) for name, N in out if 1 < N.order < G.order]


class InflationRestrictionCheck(VerificationCheck):
    """ 0 -> H^1(G/N, M^N) -> H^1(G, M) -> H^1(N, M) is exact. """

    id = "inf-res"
    families = {"borel": {"lift": {"random_slices": 0, "perturb": False}}, "unipotent": {},
                "split-diagonal": {"lift": {"random_slices": 0, "perturb": False}},
                "random": {"count": 30}}

    def examine(self, inst, G, report):
        M = standard_module(G)
        report.tested()
        for name, N in normal_subgroups(G):
            out = inflation_restriction(G, N, M)
            report.count(f"normal:{name}")
            if not (out["lands_in_kernel"] and out["injective"] and out["exact"]):
                report.fail(inst.to_dict(), dict(out, normal=name, normal_order=N.order))


CHECKS = {cls.id: cls for cls in (LocalDefinitionCheck, IsogenyContrapositiveCheck,
                                  ScalarVanishingCheck, NonCyclicDiagonalCheck, ClassificationCheck,
                                  DimensionCheck, CyclicFormulaCheck, CyclicCaseCheck,
                                  NonCyclicCaseCheck, InflationRestrictionCheck, MainTheoremSearch)}
