import argparse
import logging
import math
import sys

from config.detection_config import CONFIG_FILE, DetectionConfig, load_detection_config
from core.errors import KDToolkitError, SchemaError
from core.kd_distribution import extended_kd, kd_distribution, mhq, negativity
from core.linalg import basis_from_states, validate_density, validate_observable, validate_state_vector
from core.moments import detect_coherence, detect_kd_nonpositivity, detect_work_nonclassicality
from core.property_suite import run_property_suite
from core.sweep import SweepSpec, run_sweep
from core.utils.serialization import (
    decode_complex_matrix,
    decode_complex_vector,
    dumps_report,
    load_json_document,
    require,
    table_csv_rows,
    write_csv,
)
from core.work import WorkDistribution, WorkProcess, mean_work, work_distribution, work_quasiprob
from scenarios.scenario_manager import ScenarioManager

logger = logging.getLogger(__name__)

EXIT_NOT_DETECTED = 0
EXIT_DETECTED = 1
EXIT_INPUT_ERROR = 2
# example and proptest report a failed check with the nonzero non-input-error code
EXIT_CHECK_FAILED = EXIT_DETECTED

SWEEP_DEFAULTS = {
    "fig1": {"min": 0.0, "max": math.pi, "steps": 181},
    "fig2": {"min": 0.025, "max": 5.0, "steps": 200},
}


def _configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %I:%M:%S %p'
    )
    logging.getLogger().setLevel(level)


def _effective_config(args) -> DetectionConfig:
    config = load_detection_config(args.config)
    return config.with_overrides(
        tol=args.tol,
        det_rel_tol=args.det_rel_tol,
        imag_tol=args.imag_tol,
        entry_tol=args.entry_tol,
        overlap_floor=args.overlap_floor,
        m_max=args.m_max,
    )


def _read_state(document: dict, config: DetectionConfig):
    if "rho" in document:
        return validate_density(decode_complex_matrix(document["rho"], "/rho"), config.tol)
    if "state" in document:
        state = validate_state_vector(decode_complex_vector(document["state"], "/state"), config.tol)
        return validate_density(state.projector(), config.tol)
    raise SchemaError("/rho", "missing required field (or give a pure 'state' vector)")


def _read_basis(document: dict, key: str, config: DetectionConfig):
    return basis_from_states(decode_complex_matrix(require(document, key), f"/{key}"), key, config.tol)


def _read_observable(document: dict, key: str, config: DetectionConfig):
    return validate_observable(decode_complex_matrix(require(document, key), f"/{key}"), config.tol)


def cmd_detect(args, config: DetectionConfig) -> int:
    if args.work_csv and args.mode != "work":
        raise SchemaError("/", "--work-csv needs --mode work")
    document = load_json_document(args.input)
    rho = _read_state(document, config)

    if args.mode == "kd":
        basis_a, basis_f = _read_basis(document, "basis_a", config), _read_basis(document, "basis_f", config)
        table = kd_distribution(rho, basis_a, basis_f)
        report = detect_kd_nonpositivity(rho, basis_a, basis_f, config)
        extra = {"kd": table.to_dict()}
    elif args.mode == "coherence":
        basis_a, basis_b = _read_basis(document, "basis_a", config), _read_basis(document, "basis_b", config)
        report = detect_coherence(rho, basis_a, basis_b, config)
        table = extended_kd(rho, (basis_a, basis_b, basis_a))
        extra = {"l1_coherence": report.quantities["l1_coherence"]}
    else:
        proc = WorkProcess.from_hamiltonians(
            rho,
            _read_observable(document, "h_initial", config),
            _read_observable(document, "h_final", config),
            decode_complex_matrix(require(document, "unitary"), "/unitary"),
            config.tol,
            config.degeneracy_rel_tol,
        )
        table = mhq(work_quasiprob(proc))
        report = detect_work_nonclassicality(table, config)
        distribution = work_distribution(table, proc.energies_initial, proc.energies_final,
                                         document.get("convention", WorkDistribution.FINAL_MINUS_INITIAL),
                                         config.merge_rel_tol, config.tol)
        extra = {"work_distribution": distribution.to_dict(), "mean_work": mean_work(proc),
                 "mhq": table.to_dict(), "negativity": negativity(table)}

    if args.csv:
        write_csv(args.csv, *table_csv_rows(table.entries))
    if args.work_csv:
        write_csv(args.work_csv, list(WorkDistribution.CSV_HEADER), distribution.to_rows())

    print(dumps_report({"command": "detect", "mode": args.mode, **report.to_dict(), **extra}))
    logger.info(report.summary())
    return EXIT_DETECTED if report.certifies_nonpositivity else EXIT_NOT_DETECTED


def cmd_example(args, config: DetectionConfig) -> int:
    parameters = {"p": args.p, "theta": args.theta, "alpha": args.alpha, "beta": args.beta,
                  "omega": args.omega, "rabi": args.rabi, "t": args.t}
    report = ScenarioManager().run(args.scenario, config, **parameters)
    print(dumps_report({"command": "example", **report}))
    return EXIT_NOT_DETECTED if report["passed"] else EXIT_CHECK_FAILED


def cmd_sweep(args, config: DetectionConfig) -> int:
    defaults = SWEEP_DEFAULTS[args.figure]
    if args.figure == "fig1":
        fixed = {"alpha": args.alpha if args.alpha is not None else 0.0,
                 "beta": args.beta if args.beta is not None else 0.0}
        parameter = "theta"
    else:
        if args.omega is None or args.t is None:
            raise SchemaError("/", "sweep fig2 needs both --omega and --t")
        fixed = {"omega": args.omega, "t": args.t}
        parameter = "rabi"

    spec = SweepSpec(
        scenario=args.figure,
        parameter=parameter,
        minimum=args.min if args.min is not None else defaults["min"],
        maximum=args.max if args.max is not None else defaults["max"],
        steps=args.steps if args.steps is not None else defaults["steps"],
        fixed=fixed,
        output_path=args.output,
    )
    _, rows = run_sweep(spec, config)
    logger.info(f"Sweep {args.figure} produced {len(rows)} rows")
    return EXIT_NOT_DETECTED


def cmd_proptest(args, config: DetectionConfig) -> int:
    report = run_property_suite(args.seed, args.dims, args.trials, args.check_tol, config)
    print(dumps_report({"command": "proptest", **report.to_dict()}))
    if not report.passed:
        print(f"property violation; replay seed {report.first_failing_seed}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_NOT_DETECTED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=CONFIG_FILE, help="JSON file with tolerance defaults")
    common.add_argument("--m-max", type=int, dest="m_max", help="highest Hankel level (1..6)")
    common.add_argument("--tol", type=float, help="validation tolerance")
    common.add_argument("--det-rel-tol", type=float, dest="det_rel_tol", help="relative determinant tolerance")
    common.add_argument("--imag-tol", type=float, dest="imag_tol", help="imaginary-moment tolerance")
    common.add_argument("--entry-tol", type=float, dest="entry_tol", help="entry oracle tolerance")
    common.add_argument("--overlap-floor", type=float, dest="overlap_floor", help="smallest usable basis overlap")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="warnings and errors only")

    parser = argparse.ArgumentParser(
        prog="kd-moments",
        description="Moment criteria for Kirkwood-Dirac nonpositivity, coherence and nonclassical work",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    detect = commands.add_parser("detect", parents=[common], help="run a detector on a JSON input")
    detect.add_argument("input", help="path to the JSON input")
    detect.add_argument("--mode", choices=["kd", "coherence", "work"], default="kd")
    detect.add_argument("--csv", help="write the quasiprobability table as CSV")
    detect.add_argument("--work-csv", dest="work_csv", help="write the work distribution as CSV (work mode)")
    detect.set_defaults(handler=cmd_detect)

    example = commands.add_parser("example", parents=[common], help="reproduce a worked example")
    example.add_argument("scenario", type=int, choices=[1, 2, 3, 4])
    example.add_argument("--p", type=float, help="example 1 mixing weight")
    example.add_argument("--theta", type=float, help="example 3 polar angle")
    example.add_argument("--alpha", type=float, help="example 3 state phase")
    example.add_argument("--beta", type=float, help="example 3 basis phase")
    example.add_argument("--omega", type=float, help="example 4 rotation frequency")
    example.add_argument("--rabi", type=float, help="example 4 drive strength Omega")
    example.add_argument("--t", type=float, help="example 4 final time")
    example.set_defaults(handler=cmd_example)

    sweep = commands.add_parser("sweep", parents=[common], help="write figure data as CSV")
    sweep.add_argument("figure", choices=["fig1", "fig2"])
    sweep.add_argument("--min", type=float, help="lower end of the swept parameter")
    sweep.add_argument("--max", type=float, help="upper end of the swept parameter")
    sweep.add_argument("--steps", type=int, help="number of grid points")
    sweep.add_argument("--alpha", type=float, help="fig1 state phase")
    sweep.add_argument("--beta", type=float, help="fig1 basis phase")
    sweep.add_argument("--omega", type=float, help="fig2 rotation frequency (required)")
    sweep.add_argument("--t", type=float, help="fig2 final time (required)")
    sweep.add_argument("--output", help="CSV path; stdout when omitted")
    sweep.set_defaults(handler=cmd_sweep)

    proptest = commands.add_parser("proptest", parents=[common], help="run the random-input property suite")
    proptest.add_argument("--seed", type=int, default=1)
    proptest.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4])
    proptest.add_argument("--trials", type=int, default=1000)
    proptest.add_argument("--check-tol", type=float, dest="check_tol",
                          help="override every numeric property limit")
    proptest.set_defaults(handler=cmd_proptest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args)

    try:
        config = _effective_config(args)
        return args.handler(args, config)
    except KDToolkitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error(f"Cannot read or write file: {e}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
