"""
Command-line interface.

Exit codes: 0 ok, 1 usage, 2 data error, 3 training failure.
Results go to stdout; logs go to stderr.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, TextIO

from fluxgate import __version__
from fluxgate.classifiers.config import TrainConfig
from fluxgate.classifiers.kernels import KERNEL_NAMES
from fluxgate.classifiers.registry import list_classifiers, train_classifier
from fluxgate.classifiers.serialization import save_model
from fluxgate.core import settings
from fluxgate.core.errors import DataError, FluxgateError
from fluxgate.core.logging_config import logger
from fluxgate.dns.parser import RecordFormat, iter_records, load_observations
from fluxgate.evaluation.grid_search import DEFAULT_GRIDS, GridSearchResult, check_grid, grid_search
from fluxgate.evaluation.harness import EvaluationOptions, evaluate
from fluxgate.features.scaler import ScalingMode, fit_scaler
from fluxgate.features.vector import read_features_csv, write_features_csv
from fluxgate.pipeline.detector import (
    Detector,
    Stores,
    build_feature_matrix,
    evaluate_observations,
    latency_summary,
)
from fluxgate.pipeline.serve import serve, serve_socket
from fluxgate.pipeline.synth import SynthConfig, synth_dataset
from fluxgate.stores.censys_store import ScanStore
from fluxgate.stores.geo_store import GeoStore

EXIT_OK = 0
EXIT_USAGE = 1

FORMATS = {"json": RecordFormat.JSON, "wire-hex": RecordFormat.WIRE}


class UsageError(Exception):
    """Bad command-line arguments."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _hidden_sizes(text: str):
    try:
        sizes = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated layer sizes, got {text!r}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("at least one hidden layer size is required")
    return sizes


def _add_train_options(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("hyperparameters")
    group.add_argument("--C", type=float, help="SVM box constraint (default 10)")
    group.add_argument("--gamma", type=float, help="Kernel scale for rbf, poly and sigmoid (default 1/8)")
    group.add_argument("--kernel", choices=list(KERNEL_NAMES), help="SVM kernel (default rbf)")
    group.add_argument("--degree", type=_positive_int, help="Polynomial kernel degree (default 3)")
    group.add_argument("--coef0", type=float, help="Offset of the poly and sigmoid kernels (default 0)")
    group.add_argument("--tolerance", type=float, help="SMO KKT tolerance (default 1e-3)")
    group.add_argument("--max-passes", type=_positive_int, help="SMO step budget per example (default 50)")
    group.add_argument("--seed", type=int, help="Random seed (default 0)")
    group.add_argument("--epochs", type=_positive_int, help="MLP epochs (default 200)")
    group.add_argument("--learning-rate", type=float, help="MLP learning rate (default 0.1)")
    group.add_argument("--batch-size", type=_positive_int, help="MLP mini-batch size (default 32)")
    group.add_argument("--hidden", type=_hidden_sizes, help="MLP hidden layer sizes, e.g. 16 or 16,8")
    group.add_argument("--centers", type=_positive_int, help="RBF-network centers (default 20)")
    group.add_argument("--activation", choices=["gaussian", "softmax"], help="RBF-network hidden activation")
    group.add_argument(
        "--scaling", choices=[m.value for m in ScalingMode], default=ScalingMode.MINMAX.value,
        help="Feature scaling mode (default minmax)",
    )


def _train_config(args) -> TrainConfig:
    try:
        return TrainConfig().with_overrides(
            C=args.C,
            gamma=args.gamma,
            kernel=args.kernel,
            degree=args.degree,
            coef0=args.coef0,
            tolerance=args.tolerance,
            max_passes=args.max_passes,
            seed=args.seed,
            epochs=args.epochs,
            learning_rate=args.learning_rate,
            batch_size=args.batch_size,
            hidden_sizes=args.hidden,
            n_centers=args.centers,
            rbf_activation=args.activation,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(payload: dict, out: TextIO):
    out.write(json.dumps(payload, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_ingest_censys(args, out: TextIO) -> int:
    store = ScanStore.from_file(args.file, strict=args.strict)
    _emit({"hosts": len(store), "skipped_lines": store.skipped_lines}, out)
    return EXIT_OK


def cmd_ingest_geo(args, out: TextIO) -> int:
    store = GeoStore.from_file(args.file)
    _emit({"ranges": len(store)}, out)
    return EXIT_OK


def cmd_extract(args, out: TextIO) -> int:
    observations = load_observations(args.obs, FORMATS[args.format])
    stores = Stores.from_files(args.censys, args.geo)
    vectors, labels = build_feature_matrix(stores, observations)
    rows = write_features_csv(args.out, vectors, labels)
    logger.success(f"Wrote {rows} feature rows to {args.out}")
    _emit({"rows": rows, "out": str(args.out)}, out)
    return EXIT_OK


def cmd_train(args, out: TextIO) -> int:
    cfg = _train_config(args)
    X, y = read_features_csv(args.features)
    if y.size == 0:
        raise DataError(f"{args.features} holds no examples")
    scaler = fit_scaler(X, args.scaling)
    model = train_classifier(args.model, scaler.transform(X), y, cfg)
    save_model(model, args.out, scaler=scaler)
    _emit({"model": model.summary(), "out": str(args.out)}, out)
    return EXIT_OK


def _load_grid(value: Optional[str]):
    if value in (None, "default"):
        return None
    try:
        return json.loads(Path(value).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read grid file {value}: {exc}") from exc


def cmd_evaluate(args, out: TextIO) -> int:
    cfg = _train_config(args)
    grid = _load_grid(args.grid) if args.grid is not None else None
    if grid is not None:
        try:
            check_grid(grid, base=cfg)
        except ValueError as exc:
            raise UsageError(f"invalid grid: {exc}") from exc
    options = EvaluationOptions(
        k=args.folds,
        seed=cfg.seed,
        scaling=ScalingMode(args.scaling),
        importance_repeats=args.importance_repeats,
    )
    if args.obs is not None:
        censys = args.censys or settings.censys_db_path()
        geo = args.geo or settings.geo_db_path()
        if not censys or not geo:
            raise UsageError("--obs needs --censys and --geo (or FLUXGATE_CENSYS_DB and FLUXGATE_GEO_DB)")
        observations = load_observations(args.obs, FORMATS[args.format])
        stores = Stores.from_files(censys, geo)
        search = {} if args.grid is None else {"grid": grid if grid is not None else DEFAULT_GRIDS[args.model_kind]}
        result = evaluate_observations(stores, observations, args.model_kind, cfg, options, **search)
    else:
        X, y = read_features_csv(args.features)
        if args.grid is not None:
            result = grid_search(X, y, args.model_kind, grid, base=cfg, options=options)
        else:
            result = evaluate(X, y, args.model_kind, cfg, options)

    if isinstance(result, GridSearchResult):
        out.write((json.dumps(result.to_dict(), sort_keys=True) if args.json else result.to_table()) + "\n")
    else:
        out.write((result.to_json() if args.json else result.to_table()) + "\n")
    return EXIT_OK


def _detector(args) -> Detector:
    censys = args.censys or settings.censys_db_path()
    geo = args.geo or settings.geo_db_path()
    if not censys or not geo:
        raise UsageError("--censys and --geo (or FLUXGATE_CENSYS_DB and FLUXGATE_GEO_DB) are required")
    return Detector.from_files(
        args.model,
        censys,
        geo,
        threshold=args.threshold,
        known_path=args.known_domains or settings.known_domains_path(),
        remember_detections=args.remember_detections,
    )


def _stdin_lines():
    """Undecoded stdin lines; each is decoded with its own record."""
    return getattr(sys.stdin, "buffer", sys.stdin)


def cmd_classify(args, out: TextIO) -> int:
    detector = _detector(args)
    lines = _stdin_lines() if args.obs == "-" else iter_records(args.obs)
    verdicts = detector.classify_lines(lines, FORMATS[args.format], strict=args.strict)
    for verdict in verdicts:
        out.write(verdict.to_json() + "\n")
    stats = latency_summary(verdicts)
    logger.info(
        f"Classified {len(verdicts)} records; latency median {stats['median']:.3f} ms, "
        f"p95 {stats['p95']:.3f} ms over {stats['count']} model calls"
    )
    return EXIT_OK


def cmd_serve(args, out: TextIO) -> int:
    detector = _detector(args)
    fmt = FORMATS[args.format]
    if args.socket:
        server = serve_socket(detector, args.socket, fmt, args.max_in_flight)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            logger.info("Interrupted; shutting down")
        finally:
            server.server_close()
            Path(args.socket).unlink(missing_ok=True)
        return EXIT_OK
    serve(detector, _stdin_lines(), out, fmt, args.max_in_flight)
    return EXIT_OK


def cmd_synth(args, out: TextIO) -> int:
    cfg = SynthConfig.from_file(args.config) if args.config else SynthConfig.default()
    cfg = cfg.with_overrides(seed=args.seed, n_fastflux=args.n_fastflux, n_legit=args.n_legit)
    corpus = synth_dataset(cfg)
    paths = corpus.write(args.out)
    _emit({"records": len(corpus.observations), **{k: str(v) for k, v in paths.items()}}, out)
    return EXIT_OK


def cmd_api(args, out: TextIO) -> int:
    import uvicorn

    uvicorn.run("fluxgate.api.main:app", host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="fluxgate", description="Fast-flux domain detection from single DNS responses.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("ingest-censys", help="Load and validate a scan snapshot")
    p.add_argument("file", help="JSON-lines snapshot (.gz accepted)")
    p.add_argument("--strict", action="store_true", help="Abort on the first malformed line")
    p.set_defaults(func=cmd_ingest_censys)

    p = sub.add_parser("ingest-geo", help="Load and validate a range database")
    p.add_argument("file", help="TSV range file (.gz accepted)")
    p.set_defaults(func=cmd_ingest_geo)

    p = sub.add_parser("extract", help="Write the feature CSV of labeled observations")
    p.add_argument("--obs", required=True, help="Observation file")
    p.add_argument("--censys", required=True, help="Scan snapshot")
    p.add_argument("--geo", required=True, help="Range database")
    p.add_argument("--out", required=True, help="Output CSV")
    p.add_argument("--format", choices=list(FORMATS), default="json", help="Observation record format")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="Train a model on a feature CSV")
    p.add_argument("--features", required=True, help="Feature CSV")
    p.add_argument("--model", required=True, choices=list_classifiers(), help="Model kind")
    p.add_argument("--out", required=True, help="Output model file")
    _add_train_options(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="Cross-validate a model kind")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--features", help="Feature CSV")
    source.add_argument("--obs", help="Labeled observation file; latency then includes feature extraction")
    p.add_argument("--censys", help="Scan snapshot for --obs (default $FLUXGATE_CENSYS_DB)")
    p.add_argument("--geo", help="Range database for --obs (default $FLUXGATE_GEO_DB)")
    p.add_argument("--format", choices=list(FORMATS), default="json", help="Observation record format")
    p.add_argument("--model-kind", required=True, choices=list_classifiers(), help="Model kind")
    p.add_argument(
        "--grid", nargs="?", const="default", default=None,
        help="Grid search; optional JSON file mapping parameter -> values",
    )
    p.add_argument("--folds", type=_positive_int, default=10, help="Number of folds (default 10)")
    p.add_argument("--importance-repeats", type=int, default=3, help="Permutation importance shuffles (0 to skip)")
    p.add_argument("--json", action="store_true", help="Print the report as JSON")
    _add_train_options(p)
    p.set_defaults(func=cmd_evaluate)

    for name, func, help_text in (
        ("classify", cmd_classify, "Classify a file of DNS responses"),
        ("serve", cmd_serve, "Classify an NDJSON stream on stdin or a Unix socket"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--model", required=True, help="Model file")
        p.add_argument("--censys", help="Scan snapshot (default $FLUXGATE_CENSYS_DB)")
        p.add_argument("--geo", help="Range database (default $FLUXGATE_GEO_DB)")
        p.add_argument("--threshold", type=_positive_int, help="Suspicious gate: minimum A records (default 5)")
        p.add_argument("--format", choices=list(FORMATS), default="json", help="Record format")
        p.add_argument("--known-domains", help="Known fast-flux domains, one per line (default $FLUXGATE_KNOWN_DOMAINS)")
        p.add_argument(
            "--remember-detections", action="store_true", help="Add fast-flux verdicts to the known-domain table"
        )
        if name == "classify":
            p.add_argument("--obs", required=True, help="Observation file, or - for stdin")
            p.add_argument("--strict", action="store_true", help="Abort on the first bad record")
        else:
            p.add_argument("--socket", help="Listen on this Unix socket instead of stdin/stdout")
            p.add_argument("--max-in-flight", type=_positive_int, help="Backpressure bound (default 64)")
        p.set_defaults(func=func)

    p = sub.add_parser("synth", help="Generate a synthetic labeled corpus")
    p.add_argument("--config", help="SynthConfig JSON (default: packaged configuration)")
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument("--seed", type=int, help="Override the configured seed")
    p.add_argument("--n-fastflux", type=_positive_int, help="Override the fast-flux record count")
    p.add_argument("--n-legit", type=_positive_int, help="Override the legitimate record count")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("api", help="Run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.set_defaults(func=cmd_api)

    return parser


def main(argv: Optional[List[str]] = None, out: Optional[TextIO] = None) -> int:
    """Run one command; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    out = out or sys.stdout
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        logger.error(str(exc))
        return EXIT_USAGE
    except FluxgateError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code
    except OSError as exc:
        logger.error(str(exc))
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
