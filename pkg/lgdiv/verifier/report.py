import json
from collections import Counter

from ..basics import check_modulus

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive-budget"

EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}

CAVEAT = ("checks run over sampled abstract subgroups of GL_2, a superset of the "
          "Galois-realisable ones; a failure on a non-realisable group does not "
          "contradict the statement being checked")


class CheckSpec:
    """ What one check runs over: prime, level, seed and budgets. """

    def __init__(self, id, p=5, n=2, seed=42, max_groups=None, budget_secs=60.0, cap=20000,
                 families=None, base_groups=None):
        check_modulus(p, n)
        self.id = id
        self.p = p
        self.n = n
        self.seed = int(seed)
        self.max_groups = max_groups
        self.base_groups = base_groups
        self.budget_secs = float(budget_secs)
        self.cap = cap
        self.families = families

    def to_dict(self):
        return {
            "id": self.id,
            "p": self.p,
            "n": self.n,
            "seed": self.seed,
            "max_groups": self.max_groups,
            "base_groups": self.base_groups,
            "budget_secs": self.budget_secs,
            "cap": self.cap,
            "families": list(self.families) if self.families is not None else None,
        }

    def __repr__(self):
        return f"CheckSpec({self.id}, p={self.p}, n={self.n}, seed={self.seed})"


def _entry_key(entry):
    return json.dumps(entry["subject"], sort_keys=True)


class VerdictReport:
    """
    Outcome of one check. Failures, findings and observations are
    (subject, data) records; they are sorted by subject before emission so
    that merging shards in any order gives the same report.
    """

    def __init__(self, spec):
        self.spec = spec
        self.groups_tested = 0
        self.failures = []
        self.findings = []
        self.observations = []
        self.skipped = Counter()
        self.coverage = Counter()
        self.budget_hit = False
        self.elapsed = 0.0

    def tested(self):
        self.groups_tested += 1

    def skip(self, reason):
        self.skipped[reason] += 1

    def count(self, key, amount=1):
        self.coverage[key] += amount

    def fail(self, subject, data):
        self.failures.append({"subject": subject, "data": data})

    def find(self, subject, data):
        self.findings.append({"subject": subject, "data": data})

    def observe(self, subject, data):
        self.observations.append({"subject": subject, "data": data})

    @property
    def verdict(self):
        if self.failures:
            return FAIL
        if self.budget_hit:
            return INCONCLUSIVE
        return PASS

    @property
    def exit_code(self):
        return EXIT_CODES[self.verdict]

    def merge(self, other):
        assert other.spec.id == self.spec.id, "cannot merge reports of different checks"
        self.groups_tested += other.groups_tested
        self.failures.extend(other.failures)
        self.findings.extend(other.findings)
        self.observations.extend(other.observations)
        self.skipped.update(other.skipped)
        self.coverage.update(other.coverage)
        self.budget_hit = self.budget_hit or other.budget_hit
        self.elapsed = max(self.elapsed, other.elapsed)
        return self

    def finalize(self):
        for entries in (self.failures, self.findings, self.observations):
            entries.sort(key=_entry_key)
        return self

    def to_dict(self, timings=False):
        self.finalize()
        out = {
            "spec": self.spec.to_dict(),
            "groups_tested": self.groups_tested,
            "skipped": dict(sorted(self.skipped.items())),
            "coverage": dict(sorted(self.coverage.items())),
            "failures": self.failures,
            "findings": self.findings,
            "observations": self.observations,
            "budget_hit": self.budget_hit,
            "caveat": CAVEAT,
            "verdict": self.verdict,
        }
        if timings:
            out["elapsed"] = round(self.elapsed, 3)
        return out

    def __repr__(self):
        return (f"VerdictReport({self.spec.id}: {self.verdict}, tested={self.groups_tested}, "
                f"failures={len(self.failures)})")


def overall_verdict(reports):
    verdicts = {r.verdict for r in reports}
    if FAIL in verdicts:
        return FAIL
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return PASS


def reports_to_json(reports, timings=False):
    payload = {
        "reports": [r.to_dict(timings=timings) for r in reports],
        "verdict": overall_verdict(reports),
    }
    return json.dumps(payload, indent=2) + "\n"


def reports_to_table(reports, timings=False):
    header = ["check", "p", "n", "tested", "skipped", "failures", "findings", "verdict"]
    if timings:
        header.append("secs")
    rows = []
    for r in reports:
        r.finalize()
        row = [r.spec.id, str(r.spec.p), str(r.spec.n), str(r.groups_tested),
               str(sum(r.skipped.values())), str(len(r.failures)), str(len(r.findings)), r.verdict]
        if timings:
            row.append(f"{r.elapsed:.1f}")
        rows.append(row)
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)),
             "  ".join("-" * w for w in widths)]
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows)
    lines.append(f"overall: {overall_verdict(reports)}")
    return "\n".join(lines) + "\n"
