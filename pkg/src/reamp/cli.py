"""Command-line front end: ``reamp detect|simulate|bench|emit``.

Exit codes: 0 success, 2 usage error, 3 input error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .bench import (SCENARIOS, FIG3_COMBOS, ScenarioSpec, SHIFT_SEGMENTS, combo_name,
                    fig1_data, fig2_experiment, fig3_experiment, generate_scenario,
                    run_benchmark, write_long_csv)
from .ingest import (BinningConfig, FormatError, MatrixSequence, load_frame_directory,
                     load_vector_sequence, parse_features, parse_range)
from .pipeline import NO_CHANGE_NOTE, PipelineConfig, StageError, detect_sequence
from .resonance import ResonanceConfig
from .sharpen import SharpenConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4

log = logging.getLogger("reamp")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class InputSpec:
    path: str
    format: str = "csv"
    skip_header: bool = False

    def load(self) -> MatrixSequence:
        if os.path.isdir(self.path):
            return load_frame_directory(self.path, self.format)
        if self.format != "csv":
            raise FormatError(f"{self.path}: a single input file must be CSV")
        return load_vector_sequence(self.path, self.skip_header)


@dataclass(frozen=True)
class RunConfig:
    input: InputSpec
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    output: str | None = None
    output_format: str = "json"


def detect(cfg: RunConfig) -> dict:
    """Load the input, run the pipeline and return the JSON-ready report."""
    try:
        seq = cfg.input.load()
    except (OSError, ValueError) as exc:
        raise StageError("input", exc) from exc
    report = detect_sequence(seq, cfg.pipeline)
    out = report.to_dict()
    out["config"]["input"] = {"path": cfg.input.path, "format": cfg.input.format,
                              "skip_header": cfg.input.skip_header}
    return out


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _seed(value):
    if value is not None:
        return value
    env = os.environ.get("REAMP_SEED")
    if env is None:
        return 0
    try:
        return int(env, 0)
    except ValueError:
        raise UsageError(f"REAMP_SEED must be an integer, got {env!r}") from None


def _pipeline_from_args(args, default_nb2=90) -> PipelineConfig:
    try:
        bandwidth = args.bandwidth if args.bandwidth == "auto" else float(args.bandwidth)
        return PipelineConfig(
            binning=BinningConfig(args.bins, parse_range(args.range),
                                  parse_features(args.features)),
            ground=args.ground,
            metric=args.metric,
            graph=args.graph,
            resonance=ResonanceConfig(args.resonance_a, args.resonance_b, args.iterations,
                                      _seed(args.seed)),
            sharpen=SharpenConfig(args.nb2 or default_nb2, bandwidth, args.threshold,
                                  not args.absolute_threshold),
            threads=args.threads,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _add_pipeline_args(p):
    g = p.add_argument_group("reduction")
    g.add_argument("--bins", type=int, default=100, help="histogram bins per frame (nb1)")
    g.add_argument("--range", default="global", help="'global' or lo:hi")
    g.add_argument("--features", default="mean,sd", help="comma list of mean,sd,skewness")
    g = p.add_argument_group("costs and graph")
    g.add_argument("--metric", choices=("emd", "ground"), default="emd")
    g.add_argument("--ground", choices=("manhattan", "euclidean"), default="euclidean")
    g.add_argument("--graph", choices=("shp", "mst"), default="shp")
    g = p.add_argument_group("resonance")
    g.add_argument("--iterations", type=int, default=10_000)
    g.add_argument("--seed", type=int, default=None, help="default: $REAMP_SEED or 0")
    g.add_argument("--resonance-a", type=float, default=2.0)
    g.add_argument("--resonance-b", type=float, default=10.0)
    g = p.add_argument_group("sharpening")
    g.add_argument("--nb2", type=int, default=None, help="cloud histogram bins (default 90)")
    g.add_argument("--bandwidth", default="auto")
    g.add_argument("--threshold", type=float, default=0.05)
    g.add_argument("--absolute-threshold", action="store_true",
                   help="compare peaks with the threshold itself, not threshold * max")
    p.add_argument("--threads", type=int, default=1, help="worker threads (result unaffected)")


def _cmd_detect(args):
    if args.replay:
        with open(args.replay, encoding="utf-8") as fh:
            saved = json.load(fh)["config"]
        inp = saved["input"]
        cfg = RunConfig(InputSpec(inp["path"], inp["format"], inp["skip_header"]),
                        PipelineConfig.from_dict(saved, threads=args.threads),
                        args.output, args.output_format)
    else:
        if not args.input:
            raise UsageError("detect needs an input path or --replay")
        cfg = RunConfig(InputSpec(args.input, args.format, args.skip_header),
                        _pipeline_from_args(args), args.output, args.output_format)

    report = detect(cfg)
    if not report["estimates"]:
        log.info(NO_CHANGE_NOTE)
    if cfg.output_format == "csv":
        text = "estimate\n" + "".join(f"{e}\n" for e in report["estimates"])
    else:
        text = dumps_report(report)
    _write_text(cfg.output, text)

    if args.export_curve:
        c = report["sharpenedCurve"] or {"x": [], "y": []}
        write_long_csv(args.export_curve, (("sharpened", x, y) for x, y in zip(c["x"], c["y"])))
    if args.export_cloud:
        freq = (report["cloud"] or {"frequencies": []})["frequencies"]
        write_long_csv(args.export_cloud, ((i, f) for i, f in enumerate(freq, start=1)),
                       header=("cut", "count"))
    return EXIT_OK


def _parse_taus(text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"taus must be comma-separated integers, got {text!r}") from None


def _cmd_simulate(args):
    seed = _seed(args.seed)
    try:
        if args.scenario:
            spec = SCENARIOS[args.scenario][0](seed)
        else:
            taus = _parse_taus(args.taus)
            segments = SHIFT_SEGMENTS[:len(taus) + 1]
            if len(taus) + 1 > len(SHIFT_SEGMENTS):
                raise UsageError("at most three change points with the built-in segments")
            spec = ScenarioSpec(args.n, args.d, taus, segments, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    seq = generate_scenario(spec)
    rows = seq.frames[:, 0, :]
    lines = [",".join(repr(float(v)) for v in row) for row in rows]
    _write_text(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_bench(args):
    make, nb2 = SCENARIOS[args.scenario]
    spec = make(_seed(args.seed))
    cfg = _pipeline_from_args(args, default_nb2=nb2)

    def progress(r, res):
        log.info("rep %d: estimates=%s H=%s", r, list(res.estimates), res.hausdorff)

    result = run_benchmark(spec, cfg, args.reps, progress=progress)
    out = result.to_dict()
    out.update({"scenario": args.scenario, "taus": list(spec.taus), "seed": spec.seed,
                "config": cfg.to_dict(), "version": __version__})
    _write_text(args.output, json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_emit(args):
    seed = _seed(args.seed)
    if args.figure == "fig1":
        rows = fig1_data(step=args.step)
    elif args.figure == "fig2":
        pairs = fig2_experiment(seed=seed, reps=args.reps)
        rows = [("delta_ed", r, a) for r, (a, _) in enumerate(pairs)]
        rows += [("delta_emd", r, b) for r, (_, b) in enumerate(pairs)]
    elif args.figure == "fig3":
        res = fig3_experiment(seed=seed, d=args.d, iterations=args.iterations,
                              threads=args.threads)
        rows = []
        for mode, kind in FIG3_COMBOS:
            name = combo_name(mode, kind)
            rows += [(name, i, int(c)) for i, c in
                     enumerate(res.clouds[name].frequencies(), start=1)]
    else:
        if not args.report:
            raise UsageError("emit curve needs --report")
        with open(args.report, encoding="utf-8") as fh:
            c = json.load(fh)["sharpenedCurve"] or {"x": [], "y": []}
        rows = [("sharpened", x, y) for x, y in zip(c["x"], c["y"])]
    write_long_csv(args.output, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reamp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"reamp {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect change points in a sequence")
    p.add_argument("input", nargs="?", help="CSV file (one row per frame) or frame directory")
    p.add_argument("--format", choices=("csv", "pgm"), default="csv")
    p.add_argument("--skip-header", action="store_true")
    p.add_argument("--replay", help="rerun with the config echoed in a previous report")
    p.add_argument("-o", "--output", help="report path (default stdout)")
    p.add_argument("--output-format", choices=("json", "csv"), default="json")
    p.add_argument("--export-curve", help="write the sharpened curve as CSV")
    p.add_argument("--export-cloud", help="write per-cut candidate counts as CSV")
    _add_pipeline_args(p)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("simulate", help="write a simulated mean/variance-shift sequence")
    p.add_argument("--scenario", choices=sorted(SCENARIOS))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--d", type=int, default=200)
    p.add_argument("--taus", default="20,40,75")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", help="CSV path (default stdout)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bench", help="Monte Carlo benchmark on a simulation scenario")
    p.add_argument("scenario", choices=sorted(SCENARIOS))
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("-o", "--output", help="JSON report path (default stdout)")
    _add_pipeline_args(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("emit", help="write figure data as long-format CSV")
    p.add_argument("figure", choices=("fig1", "fig2", "fig3", "curve"))
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--step", type=float, default=0.01, help="fig1 eta grid step")
    p.add_argument("--reps", type=int, default=200, help="fig2 repetitions")
    p.add_argument("--d", type=int, default=200, help="fig3 dimension (use 1000 for the full-size run)")
    p.add_argument("--iterations", type=int, default=10_000, help="fig3 resonance draws")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--report", help="detect report to take the curve from")
    p.set_defaults(func=_cmd_emit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"reamp: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"reamp: {exc}", file=sys.stderr)
        return EXIT_INPUT if exc.stage in ("input", "reduce") else EXIT_NUMERIC
    except (OSError, FormatError) as exc:
        print(f"reamp: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"reamp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
