import argparse
import json
import logging
import os
import sys

from omegaconf import OmegaConf

sys.path.insert(1, os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', '..'))
from lgdiv.basics import check_modulus
from lgdiv.errors import CapExceeded, LgdivError, ModulusError, ParseError, UsageError
from lgdiv.models.cohomology import GModule, cohomology_summary
from lgdiv.models.matgroup import DEFAULT_CAP
from lgdiv.verifier.pool import run_checks
from lgdiv.verifier.report import CheckSpec, EXIT_CODES, overall_verdict, reports_to_json, reports_to_table
from scripts.evaluation.funcs import format_summary, group_summary, load_group
from utils.utils import instantiate_from_config

mainlogger = logging.getLogger('mainlogger')

EXIT_USAGE = 64
EXIT_ERROR = 1
REPO_ROOT = os.path.abspath(os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', '..'))
RUN_DEFAULTS = {"p": 5, "n": 2, "seed": 42, "cap": DEFAULT_CAP, "budget_secs": 60.0, "workers": None}


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class RunConfig:
    """ Flags over the `run` section of the YAML config over RUN_DEFAULTS. """

    def __init__(self, p, n, seed, cap, budget_secs, workers=None, output="json", out_path=None,
                 timings=False):
        check_modulus(p, n)
        if cap <= 0:
            raise UsageError(f"--cap must be positive, got {cap}")
        self.p = p
        self.n = n
        self.seed = seed
        self.cap = cap
        self.budget_secs = budget_secs
        self.workers = workers
        self.output = output
        self.out_path = out_path
        self.timings = timings

    @classmethod
    def from_args(cls, args, config=None):
        base = dict(RUN_DEFAULTS)
        if config is not None and "run" in config:
            base.update(OmegaConf.to_container(config.run, resolve=True))
        for key, flag in (("p", "p"), ("n", "n"), ("seed", "seed"), ("cap", "cap"),
                          ("budget_secs", "budget"), ("workers", "workers")):
            value = getattr(args, flag, None)
            if value is not None:
                base[key] = value
        return cls(int(base["p"]), int(base["n"]), int(base["seed"]), int(base["cap"]),
                   float(base["budget_secs"]), base["workers"], output=args.output,
                   out_path=args.out, timings=getattr(args, "timings", False))


def explicit_modulus(args, run):
    return run.p ** run.n if args.p is not None or args.n is not None else None


def emit(text, run):
    if run.out_path:
        with open(run.out_path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_close(args, run):
    G = load_group(args.group, run.p ** run.n, run.cap, file_modulus=explicit_modulus(args, run))
    summary = group_summary(G)
    emit(json.dumps(summary, indent=2) + "\n" if run.output == "json" else format_summary(summary), run)
    return 0


def _cohomology(args, run, method):
    G = load_group(args.group, run.p ** run.n, run.cap, file_modulus=explicit_modulus(args, run))
    summary = cohomology_summary(G, GModule(G.modulus), method=method)
    emit(json.dumps(summary, indent=2) + "\n" if run.output == "json" else format_summary(summary), run)
    return 0


def cmd_h1(args, run):
    return _cohomology(args, run, method="elements")


def cmd_h1loc(args, run):
    return _cohomology(args, run, method="both")


def default_config_path(p):
    path = os.path.join(REPO_ROOT, "configs", f"verify_p{p}.yaml")
    return path if os.path.exists(path) else os.path.join(REPO_ROOT, "configs", "verify_p5.yaml")


def cmd_verify(args, config, run):
    registry = config.checks
    known = list(registry.keys())
    if args.all:
        ids = known
    elif args.ids:
        ids = list(args.ids)
    else:
        raise UsageError("give check ids or --all")
    unknown = [i for i in ids if i not in registry]
    if unknown:
        raise UsageError(f"unknown check id {unknown[0]!r}; registry: {', '.join(known)}")
    pairs = []
    for check_id in ids:
        check = instantiate_from_config(registry[check_id], progress=not args.quiet)
        spec = CheckSpec(check_id, p=run.p, n=run.n, seed=run.seed, max_groups=check.max_groups,
                         base_groups=check.base_groups,
                         budget_secs=run.budget_secs, cap=run.cap, families=list(check.families))
        pairs.append((check, spec))
    reports = run_checks(pairs, workers=run.workers)
    if run.output == "json":
        emit(reports_to_json(reports, timings=run.timings), run)
    else:
        emit(reports_to_table(reports, timings=run.timings), run)
    return EXIT_CODES[overall_verdict(reports)]


def get_parser():
    common = ArgumentParser(add_help=False)
    common.add_argument("-p", type=int, default=None, help="prime p > 3")
    common.add_argument("-n", type=int, default=None, help="level n in {1, 2}")
    common.add_argument("--seed", type=int, default=None, help="seed for the sampled families")
    common.add_argument("--cap", type=int, default=None, help="maximal group order closed")
    common.add_argument("--budget", type=float, default=None, help="seconds per check")
    common.add_argument("--workers", type=int, default=None, help="worker processes (default: all CPUs)")
    common.add_argument("--output", choices=["json", "table"], default="json", help="output format")
    common.add_argument("--out", type=str, default=None, help="write output to this file")
    common.add_argument("--config", type=str, default=None, help="config (yaml) path")
    common.add_argument("--timings", action='store_true', default=False, help="include wall-clock times")
    common.add_argument("--verbose", action='store_true', default=False, help="debug logging")
    common.add_argument("--quiet", action='store_true', default=False, help="no progress bars, warnings only")

    parser = ArgumentParser(prog="lgdiv", description="H^1 and H^1_loc of subgroups of GL_2(Z/p^n)")
    sub = parser.add_subparsers(dest="command")
    for name, helptext in (("close", "close a group and summarise it"),
                           ("h1", "first cohomology with coefficients (Z/p^n)^2"),
                           ("h1loc", "locally trivial part of the first cohomology")):
        cmd = sub.add_parser(name, parents=[common], help=helptext)
        cmd.add_argument("group", nargs="+", help="a group file or matrix literals [[a,b],[c,d]]")
    verify = sub.add_parser("verify", parents=[common], help="run registered checks")
    verify.add_argument("ids", nargs="*", help="check ids from the registry")
    verify.add_argument("--all", action='store_true', default=False, help="run every registered check")
    return parser


def setup_logging(args):
    level = logging.DEBUG if args.verbose else (logging.WARNING if args.quiet else logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    mainlogger.setLevel(level)


def main(argv=None):
    parser = get_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command (close, h1, h1loc, verify)")
        setup_logging(args)
        if args.command == "verify":
            p = args.p if args.p is not None else RUN_DEFAULTS["p"]
            config = OmegaConf.load(args.config or default_config_path(p))
            run = RunConfig.from_args(args, config)
            return cmd_verify(args, config, run)
        run = RunConfig.from_args(args)
        return {"close": cmd_close, "h1": cmd_h1, "h1loc": cmd_h1loc}[args.command](args, run)
    except (UsageError, ParseError, ModulusError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except CapExceeded as exc:
        sys.stderr.write(f"error: {exc}; raise --cap to go further\n")
        return EXIT_ERROR
    except LgdivError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
