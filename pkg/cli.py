"""Command-line driver: synth, sharpen, unmix, eval, sweep and serve."""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ValidationError, field_validator, model_validator

from core.errors import ConfigError, PeakSharpError
from core.metrics import metric_bundle
from core.models import UnmixOptions, WeightSpec
from core.pipeline import k_sweep, separate, sharpen_mixtures, snr_sweep
from core.synth import generate
from store.config import get_settings
from store.dals.spectra_dal import SpectraDAL, format_validation_error
from utils.validation import parse_range, validate_mode, validate_source_count, validate_weight_text

logger = logging.getLogger("peaksharp")

SCENARIO_SUFFIXES = {".yaml", ".yml"}


class RunConfig(BaseModel):
    command: Literal["synth", "sharpen", "unmix", "eval", "sweep", "serve"]
    input_path: Optional[Path] = None
    output_dir: Path = Path(".")
    n: Optional[int] = None
    weight: str = "off"
    mode: Optional[str] = None
    snr_db: Optional[float] = None
    seed: Optional[int] = None
    drop_tol: float = 1e-6
    min_angle_deg: float = 2.0
    prominence: float = 0.5
    clamp_negative: bool = True
    recovery_mode: Literal["auto", "nnls", "l1", "pinv"] = "auto"
    mu: Optional[float] = None
    noise_floor: Optional[float] = 5.0
    sharpen_method: Optional[Literal["difference", "model"]] = None
    truth_path: Optional[Path] = None
    sweep: Optional[Literal["k", "snr"]] = None
    values: Optional[List[float]] = None

    @field_validator("weight")
    @classmethod
    def validate_weight(cls, v):
        ok, message = validate_weight_text(v)
        if not ok:
            raise ValueError(message)
        return v.strip().lower()

    @field_validator("mode")
    @classmethod
    def check_mode(cls, v):
        if v is not None:
            ok, message = validate_mode(v)
            if not ok:
                raise ValueError(message)
        return v

    @field_validator("n")
    @classmethod
    def validate_n(cls, v):
        if v is not None:
            ok, message = validate_source_count(v)
            if not ok:
                raise ValueError(message)
        return v

    @model_validator(mode="after")
    def validate_command(self):
        needs_input = {"synth", "sharpen", "unmix", "sweep"}
        if self.command in needs_input and self.input_path is None:
            raise ValueError(f"'{self.command}' needs --input")
        if self.command == "unmix" and self.n is None:
            raise ValueError("'unmix' needs --n")
        if self.command == "eval" and self.truth_path is None:
            raise ValueError("'eval' needs --truth")
        if self.command == "sweep" and self.sweep is None:
            raise ValueError("'sweep' needs --sweep k|snr")
        return self

    @property
    def weight_spec(self) -> WeightSpec:
        return WeightSpec.parse(self.weight)

    @property
    def method(self) -> str:
        if self.mode is not None:
            return self.mode
        return "nn" if self.weight == "off" else "nnp"

    def unmix_options(self, sharpen_method: str = "difference") -> UnmixOptions:
        """``sharpen_method`` applies when --sharpen-method was not given."""
        return UnmixOptions(method=self.method, weight=self.weight_spec, drop_tol=self.drop_tol,
                            min_angle_deg=self.min_angle_deg, prominence=self.prominence,
                            clamp_negative=self.clamp_negative, recovery_mode=self.recovery_mode,
                            mu=self.mu, noise_floor=self.noise_floor,
                            sharpen_method=self.sharpen_method or sharpen_method)


def cmd_synth(config: RunConfig) -> int:
    dal = SpectraDAL(config.output_dir)
    scenario = dal.load_scenario(config.input_path.resolve())
    run = generate(scenario, snr_db=config.snr_db, seed=config.seed)
    paths = dal.write_synthetic(run, scenario)
    print(f"✅ Synthesized '{scenario.name}': {len(run.sources)} sources, {run.mixtures.m} mixtures, "
          f"p={run.mixtures.p}")
    print(f"📁 Output: {', '.join(str(p) for p in paths.values())}")
    return 0


def cmd_sharpen(config: RunConfig) -> int:
    dal = SpectraDAL(config.output_dir)
    X = dal.read_spectra(config.input_path.resolve())
    sharpened, record = sharpen_mixtures(X, config.weight_spec, config.prominence, config.clamp_negative,
                                         method=config.sharpen_method or "difference")
    record["input"] = str(config.input_path)
    dal.write_spectra("mixtures_sharp.csv", sharpened)
    dal.write_meta("sharpen.meta", record)
    for warning in record["warnings"]:
        print(f"⚠️  {warning}")
    print(f"✅ Sharpened {X.m} rows with k={record['k']:g}")
    print(f"📁 Output: {dal.path('mixtures_sharp.csv')}")
    return 0


def _truth_files(truth: Path):
    """mixing_true.csv and sources.csv given either a synth output directory or the mixing file."""
    if truth.is_dir():
        return truth / "mixing_true.csv", truth / "sources.csv"
    return truth, truth.parent / "sources.csv"


def cmd_unmix(config: RunConfig) -> int:
    dal = SpectraDAL(config.output_dir)
    X = dal.read_spectra(config.input_path.resolve())
    if config.mode == "nn" and config.weight != "off":
        print(f"⚠️  --mode nn ignores --k {config.weight}")
    truth = dal.read_mixing(_truth_files(config.truth_path.resolve())[0]) if config.truth_path else None
    report = separate(X, config.n, config.unmix_options(), truth=truth)
    dal.write_separation(report)
    for warning in report.warnings:
        print(f"⚠️  {warning}")
    print(f"✅ {report.method.upper()} selected columns {report.estimated_a.column_indices.tolist()} "
          f"(k={report.weight_k:g})")
    if report.metrics is not None:
        print(f"📊 Comon index vs truth: {report.metrics.comon_index:.6g}")
    print(f"📁 Output: {dal.root}")
    return 0


def cmd_eval(config: RunConfig) -> int:
    if config.sweep is not None:
        return cmd_sweep(config)
    dal = SpectraDAL(config.output_dir)
    estimate_dir = (config.input_path or config.output_dir).resolve()
    mixing_path, sources_path = _truth_files(config.truth_path.resolve())
    truth = dal.read_mixing(mixing_path)
    estimate = dal.read_mixing(estimate_dir / "mixing_est.csv")

    true_sources = est_sources = None
    if sources_path.is_file() and (estimate_dir / "sources_est.csv").is_file():
        true_sources = dal.read_spectra(sources_path).rows()
        est_sources = dal.read_spectra(estimate_dir / "sources_est.csv").rows()
    bundle = metric_bundle(truth, estimate, true_sources, est_sources)
    record = bundle.to_dict()
    record["cosine_basis"] = "sources" if true_sources is not None else "mixing_columns"
    dal.write_json("metrics.json", record)
    print(f"📊 Comon index: {record['comon_index']}")
    print(f"📊 Per-source cosine: {[round(c, 6) for c in record['per_source_cosine']]}")
    print(f"📁 Output: {dal.path('metrics.json')}")
    return 0


def cmd_sweep(config: RunConfig) -> int:
    dal = SpectraDAL(config.output_dir)
    options = config.unmix_options("model" if config.sweep == "snr" else "difference")
    source = config.input_path.resolve() if config.input_path else None
    if source is None:
        raise ConfigError("sweeps need --input (scenario file, or mixtures CSV with --truth)")

    if config.sweep == "snr":
        if source.suffix not in SCENARIO_SUFFIXES:
            raise ConfigError("an SNR sweep needs a scenario file as --input")
        scenario = dal.load_scenario(source)
        frame = snr_sweep(scenario, config.values or list(range(30, 121, 10)), options, seed=config.seed)
    else:
        if source.suffix in SCENARIO_SUFFIXES:
            scenario = dal.load_scenario(source)
            run = generate(scenario, snr_db=config.snr_db, seed=config.seed)
            X, truth, n = run.mixtures, run.mixing, scenario.n_sources
        else:
            if config.truth_path is None:
                raise ConfigError("a k sweep on a mixtures CSV needs --truth")
            X = dal.read_spectra(source)
            truth = dal.read_mixing(_truth_files(config.truth_path.resolve())[0])
            n = config.n or truth.n
        frame = k_sweep(X, n, truth, config.values or list(range(5, 101, 5)), options)

    dal.write_frame("sweep.csv", frame)
    print(f"✅ {config.sweep}-sweep over {len(frame)} points")
    print(f"📁 Output: {dal.path('sweep.csv')}")
    return 0


def cmd_serve(config: RunConfig) -> int:
    import uvicorn

    settings = get_settings()
    uvicorn.run("app:app", host=settings.host, port=settings.port, log_level=settings.log_level.lower())
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "sharpen": cmd_sharpen,
    "unmix": cmd_unmix,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "serve": cmd_serve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peaksharp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", dest="input_path", help="input file (scenario YAML or spectra CSV)")
        p.add_argument("--out", dest="output_dir", default=".", help="output directory (created if missing)")
        return p

    p = add("synth", "generate sources and mixtures from a scenario file")
    p.add_argument("--snr-db", type=float)
    p.add_argument("--seed", type=int)

    p = add("sharpen", "sharpen every mixture row")
    p.add_argument("--k", dest="weight", default="auto", help="off | auto | auto:<fraction> | <k>")
    p.add_argument("--prominence", type=float, default=0.5)
    p.add_argument("--no-clamp", dest="clamp_negative", action="store_false")
    p.add_argument("--sharpen-method", choices=["difference", "model"],
                   help="sharpen the samples or a joint Lorentzian fit of the rows")

    def add_unmix_flags(p):
        p.add_argument("--n", type=int)
        p.add_argument("--mode", choices=["nn", "nnp"])
        p.add_argument("--k", dest="weight", default="off", help="off | auto | auto:<fraction> | <k>")
        p.add_argument("--drop-tol", type=float, default=1e-6)
        p.add_argument("--min-angle-deg", type=float, default=2.0)
        p.add_argument("--prominence", type=float, default=0.5)
        p.add_argument("--recovery", dest="recovery_mode", default="auto",
                       choices=["auto", "nnls", "l1", "pinv"])
        p.add_argument("--mu", type=float)
        p.add_argument("--noise-floor", type=float, default=5.0,
                       help="drop columns below this many noise levels (0 disables)")
        p.add_argument("--sharpen-method", choices=["difference", "model"],
                       help="NNP sharpens the samples or a joint Lorentzian fit "
                            "(default: difference; model for snr sweeps)")
        p.add_argument("--no-clamp", dest="clamp_negative", action="store_false")
        p.add_argument("--truth", dest="truth_path", help="ground-truth mixing CSV or synth output directory")

    p = add("unmix", "estimate the mixing matrix and recover sources")
    add_unmix_flags(p)

    def add_sweep_flags(p):
        p.add_argument("--sweep", choices=["k", "snr"])
        p.add_argument("--range", dest="range_text", help="start:stop[:step], stop inclusive")
        p.add_argument("--snr-db", type=float)
        p.add_argument("--seed", type=int)

    p = add("eval", "compare an estimate with the ground truth")
    add_unmix_flags(p)
    add_sweep_flags(p)

    p = add("sweep", "Comon index against the sharpening weight or the noise level")
    add_unmix_flags(p)
    add_sweep_flags(p)

    sub.add_parser("serve", help="run the HTTP service")
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    fields = {key: value for key, value in vars(args).items() if value is not None}
    range_text = fields.pop("range_text", None)
    if range_text is not None:
        try:
            fields["values"] = parse_range(range_text)
        except ValueError as e:
            raise ConfigError(str(e)) from e
    return RunConfig.model_validate(fields)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        settings = get_settings()
    except ValueError as e:
        print(f"❌ Configuration error: {e}")
        return ConfigError.exit_code
    logging.basicConfig(level=settings.log_level, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = to_run_config(args)
        logger.debug("run config: %s", config)
        return COMMANDS[config.command](config)
    except ValidationError as e:
        print(f"❌ Configuration error: {format_validation_error(e)}")
        return ConfigError.exit_code
    except PeakSharpError as e:
        print(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        print(f"❌ I/O error: {e}")
        return 3


if __name__ == "__main__":
    sys.exit(main())
