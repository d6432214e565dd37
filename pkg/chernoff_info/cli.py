"""
Command-line front end: compute_chernoff.py <subcommand> --problem problem.json [options]

A problem file holds conventional parameters of two members of one family:

    {"family": "poisson", "p": {"lambda": 2}, "q": {"lambda": 5}, "w1": 0.5}
"""
import json
import logging
import math
import sys
from argparse import ArgumentParser

from . import bayes, chernoff, divergences, oracle
from .config import SolverConfig
from .errors import ChernoffInfoError, NonConvergenceError, ProblemFileError
from .families import make_family
from .report import Report
from .utils import check_open_unit

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_NONCONVERGENCE = 3

COMMANDS = ("divergence", "chernoff", "sweep", "verify", "bound", "simulate")

VERIFY_TOLERANCE = 1e-6
VERIFY_GRID_STEP = 0.01
# Width of the Monte Carlo acceptance band, in standard errors.
MC_BAND = 5.0


class Problem(object):
    def __init__(self, family, p, q, w1=0.5):
        self.family = family
        self.p = p
        self.q = q
        self.w1 = w1

    def binary(self):
        return bayes.BinaryProblem(self.family, self.p, self.q, self.w1)

    def toDict(self):
        return {"family": self.family.name, "hyper": dict(self.family.hyper),
                "p": self.family.conventional(self.p), "q": self.family.conventional(self.q), "w1": self.w1}


def _line_of(text, key):
    needle = '"%s"' % key
    for number, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return number
    return 1


def load_problem(path):
    """Read and validate a problem file; every failure is a ProblemFileError naming the offending line."""
    try:
        with open(path) as fp:
            text = fp.read()
    except (IOError, OSError) as e:
        raise ProblemFileError("cannot read problem file: %s" % e.strerror, path, 1)
    try:
        obj = json.loads(text)
    except ValueError as e:
        raise ProblemFileError("malformed JSON: %s" % getattr(e, "msg", e), path, getattr(e, "lineno", 1))
    if not isinstance(obj, dict):
        raise ProblemFileError("problem must be a JSON object", path, 1)

    for key in ("family", "p", "q"):
        if key not in obj:
            raise ProblemFileError("missing required key '%s'" % key, path, 1)
    if not isinstance(obj["family"], str):
        raise ProblemFileError("'family' must be a string", path, _line_of(text, "family"))
    try:
        family = make_family(obj["family"], obj.get("hyper"))
    except ChernoffInfoError as e:
        key = "hyper" if "hyper" in obj else "family"
        raise ProblemFileError(str(e), path, _line_of(text, key))

    points = []
    for key in ("p", "q"):
        if not isinstance(obj[key], dict):
            raise ProblemFileError("'%s' must be an object of conventional parameters" % key, path, _line_of(text, key))
        try:
            points.append(family.point(obj[key]))
        except (ChernoffInfoError, TypeError, ValueError) as e:
            raise ProblemFileError("parameter '%s': %s" % (key, e), path, _line_of(text, key))

    w1 = obj.get("w1", 0.5)
    try:
        w1 = check_open_unit(w1, "w1")
    except ChernoffInfoError as e:
        raise ProblemFileError(str(e), path, _line_of(text, "w1"))
    return Problem(family, points[0], points[1], w1)


def build_parser():
    common = ArgumentParser(add_help=False)
    common.add_argument("--problem", required=True, help="Path to the JSON problem file.")
    common.add_argument("--output", help="Write the report here instead of stdout.")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="Report format; csv applies to sweep.")
    common.add_argument("--alpha", type=float, help="Exponent in (0, 1).")
    common.add_argument("--grid-points", type=int, default=99, help="Number of alpha values of a sweep.")
    common.add_argument("--seed", type=int, default=0, help="Random seed of simulations and Monte Carlo oracles.")
    common.add_argument("--samples", type=int, default=10 ** 6, help="Number of simulated observations.")
    common.add_argument("--alpha-tolerance", type=float, help="Bisection alpha interval tolerance.")
    common.add_argument("--gap-tolerance", type=float, help="Bisection Bregman gap tolerance.")
    common.add_argument("--max-iterations", type=int, help="Bisection iteration cap.")
    common.add_argument("--config-dir", help="Directory of *.cfg solver settings (default ~/.chernoff_info).")
    common.add_argument("--save-settings", action="store_true",
                        help="Store the given bisection tolerances in the settings directory for later runs.")
    common.add_argument("--verbose", action="store_true", help="Log solver progress to stderr.")

    parser = ArgumentParser(prog="compute_chernoff.py", description="Chernoff information between exponential family members.")
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True
    helps = {
        "divergence": "Every divergence between p and q.",
        "chernoff": "Chernoff information and the Chernoff point.",
        "sweep": "Chernoff alpha-divergences over a grid of alpha.",
        "verify": "Compare closed-form results against numerical integration.",
        "bound": "Bounds on the two-class Bayes error.",
        "simulate": "Monte Carlo estimate of the Bayes error of the MAP rule.",
    }
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common], help=helps[name])
    return parser


def _divergence(args, problem, solver):
    p, q = problem.p, problem.q
    alpha = 0.5 if args.alpha is None else args.alpha
    report = Report("divergence")
    report.add("problem", problem)
    report.add("kl_pq", divergences.kl(p, q))
    report.add("kl_qp", divergences.kl(q, p))
    report.add("bregman", divergences.bregman(problem.family, p, q))
    report.add("chernoff_alpha", divergences.chernoff_alpha_divergence(p, q, alpha))
    report.add("chernoff_coefficient", divergences.chernoff_coefficient(p, q, alpha))
    report.add("chernoff_alpha_second_type", divergences.chernoff_alpha_divergence_second_type(p, q, alpha))
    report.add("renyi", divergences.renyi(p, q, alpha))
    report.add("tsallis", divergences.tsallis(p, q, alpha))
    report.add("amari_alpha", divergences.amari_alpha(p, q, 1.0 - 2.0 * alpha))
    report.add("bhattacharyya", divergences.bhattacharyya(p, q))
    report.add("jeffreys", divergences.jeffreys(p, q))
    report.add("resistor_average", divergences.resistor_average(p, q))
    return report, EXIT_OK


def _chernoff(args, problem, solver):
    result = chernoff.chernoff_information(problem.p, problem.q, solver.bisection_config(**_tolerances(args)))
    report = Report("chernoff")
    report.add("problem", problem)
    report.add("chernoff", result)
    return report, EXIT_OK


def _sweep(args, problem, solver):
    table = chernoff.alpha_sweep(problem.p, problem.q, chernoff.default_grid(args.grid_points))
    if args.format == "csv":
        return table, EXIT_OK
    alpha, value = table.argmax()
    report = Report("sweep")
    report.add("problem", problem)
    report.add("sweep", table)
    report.add("argmax", {"alpha": alpha, "chernoff_alpha_divergence": value})
    return report, EXIT_OK


def _verify(args, problem, solver):
    p, q = problem.p, problem.q
    alpha = 0.5 if args.alpha is None else args.alpha
    spec = solver.integration_spec()
    records = []
    if oracle.resolve_scheme(problem.family, spec) == oracle.MONTE_CARLO:
        coefficient, std_error = oracle.monte_carlo_coefficient(p, q, alpha, spec, args.seed)
        records.append(oracle.VerificationRecord(
            "chernoff_coefficient", divergences.chernoff_coefficient(p, q, alpha), coefficient, MC_BAND * std_error))
    else:
        records.append(oracle.VerificationRecord(
            "chernoff_alpha", divergences.chernoff_alpha_divergence(p, q, alpha).value,
            -math.log(oracle.chernoff_coefficient_numeric(p, q, alpha, spec)), VERIFY_TOLERANCE))
        records.append(oracle.VerificationRecord(
            "kl", divergences.kl(p, q).value, oracle.kl_numeric(p, q, spec), VERIFY_TOLERANCE))
        result = chernoff.chernoff_information(p, q, solver.bisection_config(**_tolerances(args)))
        _, grid_value = oracle.alpha_grid_argmax(p, q, VERIFY_GRID_STEP, spec=spec, refine=True)
        records.append(oracle.VerificationRecord("chernoff_info", result.info, grid_value, VERIFY_TOLERANCE))
    for name, point in (("normalization_p", p), ("normalization_q", q)):
        records.append(oracle.VerificationRecord(
            name, oracle.normalization_check(problem.family, point, spec, args.seed), 0.0, VERIFY_TOLERANCE))

    for record in records:
        if not record.passed:
            logger.warning("Verification failed: %r", record)
    report = Report("verify")
    report.add("problem", problem)
    report.add("alpha", alpha)
    report.add("checks", records)
    report.add("passed", all(r.passed for r in records))
    return report, EXIT_OK if all(r.passed for r in records) else EXIT_VERIFY_FAILED


def _bound(args, problem, solver):
    binary = problem.binary()
    cfg = solver.bisection_config(**_tolerances(args))
    alpha, bound = bayes.optimal_bound_alpha(binary, cfg)
    report = Report("bound")
    report.add("problem", problem)
    report.add("ordering", bayes.bound_ordering_report(binary, cfg))
    report.add("best_chernoff_bound", bayes.best_chernoff_bound(binary, cfg))
    report.add("optimal_bound", {"alpha": alpha, "bound": bound})
    report.add("bhattacharyya_lower_bound", bayes.bhattacharyya_lower_bound(binary))
    if args.alpha is not None:
        report.add("chernoff_bound", {"alpha": args.alpha, "bound": bayes.chernoff_bound(binary, args.alpha)})
    spec = solver.integration_spec()
    if oracle.resolve_scheme(problem.family, spec) != oracle.MONTE_CARLO:
        report.add("bayes_error", oracle.bayes_error_numeric(problem.family, problem.p, problem.q, problem.w1, spec))
    return report, EXIT_OK


def _simulate(args, problem, solver):
    binary = problem.binary()
    report = Report("simulate")
    report.add("problem", problem)
    report.add("seed", args.seed)
    report.add("empirical_bayes_error", bayes.empirical_bayes_error(binary, args.samples, args.seed))
    report.add("best_chernoff_bound", bayes.best_chernoff_bound(binary, solver.bisection_config(**_tolerances(args))))
    return report, EXIT_OK


HANDLERS = {
    "divergence": _divergence,
    "chernoff": _chernoff,
    "sweep": _sweep,
    "verify": _verify,
    "bound": _bound,
    "simulate": _simulate,
}


def _tolerances(args):
    return {"alpha_tolerance": args.alpha_tolerance, "gap_tolerance": args.gap_tolerance,
            "max_iterations": args.max_iterations}


def _save_tolerances(args, solver):
    # rejects invalid values before anything is written
    solver.bisection_config(**_tolerances(args))
    for key, value in _tolerances(args).items():
        if value is not None:
            solver.set("bisection", key, value)
    solver.save()


def _emit(result, args):
    if args.format == "csv":
        writer = result.toCSV
    else:
        writer = result.toJSON
    if args.output:
        writer(args.output)
    else:
        writer(sys.stdout)


def run(argv=None):
    """Run one subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.verbose:
        logging.getLogger("chernoff_info").setLevel(logging.DEBUG)

    if args.format == "csv" and args.command != "sweep":
        sys.stderr.write("compute_chernoff.py: --format csv is only available for sweep\n")
        return EXIT_INVALID
    try:
        if args.alpha is not None:
            check_open_unit(args.alpha)
        if args.samples < 1:
            raise ValueError("--samples must be positive, got %d" % args.samples)
        problem = load_problem(args.problem)
        solver = SolverConfig(args.config_dir)
        if args.save_settings:
            _save_tolerances(args, solver)
        logger.info("Running %s on %s", args.command, args.problem)
        result, code = HANDLERS[args.command](args, problem, solver)
        _emit(result, args)
        return code
    except ProblemFileError as e:
        sys.stderr.write(e.diagnostic() + "\n")
        return EXIT_INVALID
    except NonConvergenceError as e:
        sys.stderr.write("%s: %s (best alpha %r, gap %r, iterations %r)\n"
                         % (args.problem, e, e.alpha, e.gap, e.iterations))
        return EXIT_NONCONVERGENCE
    except (ChernoffInfoError, ValueError) as e:
        sys.stderr.write("%s: %s\n" % (args.problem, e))
        return EXIT_INVALID


def main():
    sys.exit(run())
