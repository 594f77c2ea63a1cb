"""
Command-line front end.

    python run_bell.py value --d 3 --q 0.9 --xi 0.8 --filtered
    python run_bell.py threshold --d 7 --xi 0.25 --filtered --convention published
    python run_bell.py region --d 3 --q-min 0.6 --q-max 1 --q-step 0.01 \
        --xi-min 0.1 --xi-max 1 --xi-step 0.01 --format csv --output d3.csv
    python run_bell.py verify

Exit codes: 0 success, 2 invalid input, 3 numerical inconsistency, 4 I/O error.
"""

import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from bell.filtering import CouplingDomain, CrossTermConvention, success_probability_closed_form
from bell.functionals import LOCAL_BOUND, cglmp_closed_form_optimal, unfiltered_threshold
from cli.output import emit_json, emit_region_csv, emit_table_csv
from core.errors import BellToolkitError, InvalidParameterError, NumericalConsistencyError, OutputError
from core.logging_utils import configure_logging, get_logger
from core.settings import get_settings
from search.evaluators import BellEvaluator, Inequality, StateKind
from search.gammas import optimize_gammas
from search.region import grid_points, region_scan
from search.tables import reproduce_table, table_frame
from search.thresholds import optimize_xi, q_threshold

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

COMMANDS = ("value", "threshold", "optimize", "gammas", "region", "tables", "verify")
CSV_COMMANDS = ("region", "tables")
REGION_FIELDS = ("q_min", "q_max", "q_step", "xi_min", "xi_max", "xi_step")

logger = get_logger("CLI")


class RunConfig(BaseModel):
    """Validated invocation: one subcommand plus its parameters."""

    model_config = ConfigDict(extra="forbid")

    command: Literal["value", "threshold", "optimize", "gammas", "region", "tables", "verify"]
    d: Optional[int] = Field(default=None, ge=2)
    q: Optional[float] = Field(default=None, gt=0, le=1)
    xi: Optional[float] = Field(default=None, ge=0, le=1)
    filtered: bool = False
    state: StateKind = StateKind.MAX_ENTANGLED
    inequality: Inequality = Inequality.AUTO
    convention: CrossTermConvention = CrossTermConvention.EXACT
    coupling: Optional[CouplingDomain] = None
    oracle: bool = False
    restarts: Optional[int] = Field(default=None, ge=1)
    symmetric: bool = False
    q_min: Optional[float] = Field(default=None, gt=0, le=1)
    q_max: Optional[float] = Field(default=None, gt=0, le=1)
    q_step: Optional[float] = Field(default=None, gt=0)
    xi_min: Optional[float] = Field(default=None, ge=0, le=1)
    xi_max: Optional[float] = Field(default=None, ge=0, le=1)
    xi_step: Optional[float] = Field(default=None, gt=0)
    which: Optional[int] = None
    d_max: int = Field(default=10, ge=2)
    threads: Optional[int] = Field(default=None, ge=1)
    oracle_cap: Optional[int] = Field(default=None, ge=2)
    output: Optional[Path] = None
    report_dir: Optional[Path] = None
    format: Literal["json", "csv"] = "json"
    seed: Optional[int] = None
    verbose: bool = False

    @model_validator(mode="after")
    def check_required(self) -> "RunConfig":
        needs_d = self.command in ("value", "threshold", "optimize", "gammas", "region")
        if needs_d and self.d is None:
            raise ValueError(f"'{self.command}' needs --d")
        if self.command == "value" and self.q is None:
            raise ValueError("'value' needs --q")
        if self.command in ("value", "threshold") and self.filtered and self.xi is None:
            raise ValueError("--filtered needs --xi")
        if self.command in ("value", "threshold") and self.xi is not None and not self.filtered:
            raise ValueError("--xi only applies together with --filtered")
        if self.command == "region":
            missing = [f"--{name.replace('_', '-')}" for name in REGION_FIELDS if getattr(self, name) is None]
            if missing:
                raise ValueError(f"'region' needs {', '.join(missing)}")
            if self.q_max < self.q_min or self.xi_max < self.xi_min:
                raise ValueError("Grid maxima must not lie below the minima")
        if self.command == "tables" and self.which not in (1, 2):
            raise ValueError("'tables' needs --which 1 or --which 2")
        if self.report_dir is not None and self.command != "verify":
            raise ValueError("--report-dir only applies to 'verify'")
        if self.command == "gammas" and not 3 <= self.d <= 8:
            raise ValueError("'gammas' supports 3 <= d <= 8")
        if self.format == "csv" and self.command not in CSV_COMMANDS:
            raise ValueError(f"--format csv is available for {', '.join(CSV_COMMANDS)} only")
        return self

    def params(self) -> dict:
        return self.model_dump(mode="json", exclude_none=True, exclude={"output", "report_dir", "verbose", "seed", "format"})


class Check(BaseModel):
    """{name, pass, detail} record of one command-level check."""

    model_config = ConfigDict(populate_by_name=True)

    name: str
    passed: bool = Field(alias="pass")
    detail: str = ""

    def to_record(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


def _consistency(name: str, value: float, expected: float, tol: float) -> Check:
    diff = abs(value - expected)
    return Check(
        name=f"consistency:{name}",
        passed=bool(diff <= tol),
        detail=f"{value:.12g} vs {expected:.12g} (|diff| = {diff:.3e}, tol {tol:.1e})",
    )


def _domain(config: RunConfig) -> CouplingDomain:
    return config.coupling or CouplingDomain(get_settings().coupling_domain)


def _evaluator(config: RunConfig, filtered: bool) -> BellEvaluator:
    return BellEvaluator(
        d=config.d,
        state_kind=config.state,
        filtered=filtered,
        inequality=config.inequality,
        convention=config.convention,
        domain=_domain(config),
        use_oracle=config.oracle,
    )


# --------------------------------------------------------------------------
# Handlers: config -> (results, checks); CSV-capable handlers emit themselves
# --------------------------------------------------------------------------

Outcome = Tuple[dict, List[Check]]


def cmd_value(config: RunConfig) -> Outcome:
    evaluator = _evaluator(config, config.filtered)
    xi = config.xi if config.filtered else 1.0
    value = evaluator(config.q, xi)
    results = {
        "value": value,
        "violated": value > LOCAL_BOUND,
        "local_bound": LOCAL_BOUND,
        "evaluator": evaluator.describe(),
    }
    checks = []
    if evaluator.uses_closed_form and config.filtered:
        results["success_probability"] = success_probability_closed_form(config.d, config.q, xi, domain=evaluator.domain)
    exact_closed_form = evaluator.uses_closed_form and evaluator.convention is CrossTermConvention.EXACT
    if exact_closed_form and config.d <= get_settings().oracle_cap:
        oracle = BellEvaluator(
            d=config.d, filtered=config.filtered, inequality=evaluator.inequality, domain=evaluator.domain, use_oracle=True
        )
        checks.append(_consistency("closed_form_vs_oracle", value, oracle(config.q, xi), get_settings().consistency_tol))
    return results, checks


def cmd_threshold(config: RunConfig) -> Outcome:
    result = q_threshold(
        config.d,
        config.xi if config.filtered else 1.0,
        config.state,
        filtered=config.filtered,
        inequality=config.inequality,
        convention=config.convention,
        domain=_domain(config),
        use_oracle=config.oracle,
    )
    checks = []
    closed_form_case = (
        not config.filtered
        and config.state is StateKind.MAX_ENTANGLED
        and result.inequality is Inequality.CGLMP
        and result.q_star is not None
    )
    if closed_form_case:
        checks.append(_consistency("unfiltered_threshold", result.q_star, unfiltered_threshold(config.d), 1e-5))
    return result.to_dict(), checks


def cmd_optimize(config: RunConfig) -> Outcome:
    best = optimize_xi(
        config.d,
        config.state,
        inequality=config.inequality,
        convention=config.convention,
        domain=_domain(config),
        use_oracle=config.oracle,
    )
    unfiltered = q_threshold(config.d, 1.0, config.state, filtered=False, inequality=config.inequality)
    results = best.to_dict()
    results["q_unfiltered"] = unfiltered.q_star
    results["window"] = [best.q_star, unfiltered.q_star]
    checks = []
    if best.q_star is not None and unfiltered.q_star is not None:
        checks.append(
            Check(
                name="consistency:filtering_never_shrinks_range",
                passed=best.q_star <= unfiltered.q_star + get_settings().q_tol,
                detail=f"filtered {best.q_star:.6f} vs unfiltered {unfiltered.q_star:.6f}",
            )
        )
    return results, checks


def cmd_gammas(config: RunConfig) -> Outcome:
    optimum = optimize_gammas(config.d, restarts=config.restarts, symmetric=config.symmetric)
    results = {
        "d": optimum.d,
        "gammas": list(optimum.gammas.gammas),
        "value": optimum.value,
        "converged": optimum.converged,
        "sweeps": optimum.sweeps,
        "restarts": optimum.restarts,
        "symmetry_defect": optimum.symmetry_defect(),
    }
    baseline = cglmp_closed_form_optimal(config.d)
    checks = [
        Check(
            name="consistency:optimum_dominates_max_entangled",
            passed=optimum.value >= baseline - 1e-10,
            detail=f"{optimum.value:.10f} vs {baseline:.10f}",
        )
    ]
    if not optimum.converged:
        logger.warning("Schmidt optimization stopped at the sweep limit")
    return results, checks


def cmd_region(config: RunConfig) -> Outcome:
    grid = region_scan(
        config.d,
        grid_points(config.q_min, config.q_max, config.q_step),
        grid_points(config.xi_min, config.xi_max, config.xi_step),
        config.state,
        inequality=config.inequality,
        convention=config.convention,
        domain=_domain(config),
        use_oracle=config.oracle,
    )
    if config.format == "csv":
        emit_region_csv(grid, config.output)
        return {}, []
    frame = grid.to_frame()
    results = {
        "d": grid.d,
        "valid_cells": int(grid.valid.sum()),
        "violated_cells": int(grid.violated.sum()),
        "rows": frame.to_dict(orient="records"),
    }
    return results, []


def cmd_tables(config: RunConfig) -> Outcome:
    rows = reproduce_table(config.which, config.convention, config.coupling or CouplingDomain.EXTENDED)
    if config.format == "csv":
        emit_table_csv(rows, config.output)
        return {}, []
    checks = [
        Check(
            name=f"consistency:window_ordered[d={row['d']}]",
            passed=row["q_filtered"] <= row["q_unfiltered"] + get_settings().q_tol,
            detail=f"{row['q_filtered']} <= {row['q_unfiltered']}",
        )
        for row in rows
        if row["q_filtered"] is not None and row["q_unfiltered"] is not None
    ]
    return {"which": config.which, "rows": table_frame(rows).to_dict(orient="records")}, checks


def cmd_verify(config: RunConfig) -> Outcome:
    from evaluation import ReportGenerator, VerificationRunner

    runner = VerificationRunner(d_max=config.d_max)
    results = runner.run_full_verification()
    report = ReportGenerator(results)
    print(report.generate_text_report(), file=sys.stderr)
    if config.report_dir is not None:
        try:
            text_file, json_file = report.save_report(str(config.report_dir))
        except OSError as e:
            raise OutputError(f"Cannot write reports to {config.report_dir}: {e}") from e
        logger.info(f"Reports saved to {text_file} and {json_file}")
    payload = {
        "summary": results["summary"],
        "localization": results["localization"],
        "rational_forms": results["rational_forms"],
    }
    checks = [Check(**record) for record in report.check_records()]
    return payload, checks


HANDLERS: Dict[str, Callable[[RunConfig], Outcome]] = {
    "value": cmd_value,
    "threshold": cmd_threshold,
    "optimize": cmd_optimize,
    "gammas": cmd_gammas,
    "region": cmd_region,
    "tables": cmd_tables,
    "verify": cmd_verify,
}


def _apply_overrides(config: RunConfig) -> None:
    settings = get_settings()
    if config.threads is not None:
        settings.threads = config.threads
    if config.oracle_cap is not None:
        settings.oracle_cap = config.oracle_cap
    if config.seed is not None:
        logger.info(f"Seed {config.seed} ignored: every computation is deterministic")


def run(config: RunConfig) -> int:
    """
    Execute one validated configuration.

    Returns:
        Process exit code
    """
    configure_logging("INFO" if config.verbose else None)
    _apply_overrides(config)
    try:
        results, checks = HANDLERS[config.command](config)
        if config.format == "json":
            emit_json(
                {
                    "command": config.command,
                    "params": config.params(),
                    "results": results,
                    "checks": [c.to_record() for c in checks],
                },
                config.output,
            )
    except InvalidParameterError as e:
        logger.error(str(e))
        return EXIT_INVALID
    except NumericalConsistencyError as e:
        logger.error(str(e))
        return EXIT_NUMERICAL
    except OutputError as e:
        logger.error(str(e))
        return EXIT_IO
    except BellToolkitError as e:
        logger.error(str(e))
        return EXIT_NUMERICAL

    failed = [c.name for c in checks if c.name.startswith("consistency:") and not c.passed]
    if failed:
        logger.error(f"Failed consistency checks: {', '.join(failed)}")
        return EXIT_NUMERICAL
    return EXIT_OK


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, help="Worker threads for grid sweeps")
    common.add_argument("--oracle-cap", type=int, help="Largest d on the density-matrix path")
    common.add_argument("--output", type=Path, help="Write the result here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, help="Accepted for compatibility; results are deterministic")
    common.add_argument("--verbose", action="store_true", help="Log progress to stderr")
    return common


def _add_model_flags(parser: argparse.ArgumentParser, oracle: bool = True) -> None:
    parser.add_argument("--state", choices=[s.value for s in StateKind], default=StateKind.MAX_ENTANGLED.value)
    parser.add_argument("--inequality", choices=[i.value for i in Inequality], default=Inequality.AUTO.value)
    parser.add_argument(
        "--convention", choices=[c.value for c in CrossTermConvention], default=CrossTermConvention.EXACT.value
    )
    parser.add_argument("--coupling", choices=[c.value for c in CouplingDomain])
    if oracle:
        parser.add_argument("--oracle", action="store_true", help="Evaluate density matrices even where a closed form exists")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run_bell.py",
        description="CGLMP and CHSH violations of filtered qudit mixtures",
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    value = sub.add_parser("value", parents=[common], help="Bell value at one (q, xi)")
    value.add_argument("--d", type=int, required=True)
    value.add_argument("--q", type=float, required=True)
    value.add_argument("--xi", type=float)
    value.add_argument("--filtered", action="store_true")
    _add_model_flags(value)

    threshold = sub.add_parser("threshold", parents=[common], help="Smallest violating q at fixed xi")
    threshold.add_argument("--d", type=int, required=True)
    threshold.add_argument("--xi", type=float)
    threshold.add_argument("--filtered", action="store_true")
    _add_model_flags(threshold)

    optimize = sub.add_parser("optimize", parents=[common], help="Filter strength minimizing the threshold")
    optimize.add_argument("--d", type=int, required=True)
    _add_model_flags(optimize)

    gammas = sub.add_parser("gammas", parents=[common], help="Schmidt coefficients of the maximally violating state")
    gammas.add_argument("--d", type=int, required=True)
    gammas.add_argument("--restarts", type=int)
    gammas.add_argument("--symmetric", action="store_true")

    region = sub.add_parser("region", parents=[common], help="Bell values on a (q, xi) grid")
    region.add_argument("--d", type=int, required=True)
    for name in REGION_FIELDS:
        region.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, required=True)
    _add_model_flags(region)

    tables = sub.add_parser("tables", parents=[common], help="Threshold tables")
    tables.add_argument("--which", type=int, choices=[1, 2], required=True)
    tables.add_argument(
        "--convention", choices=[c.value for c in CrossTermConvention], default=CrossTermConvention.EXACT.value
    )
    tables.add_argument("--coupling", choices=[c.value for c in CouplingDomain])

    verify = sub.add_parser("verify", parents=[common], help="Run the verification suite")
    verify.add_argument("--d-max", dest="d_max", type=int, default=10)
    verify.add_argument("--report-dir", dest="report_dir", type=Path, help="Also save text and JSON reports here")
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse argv into a RunConfig; raises ValidationError on inconsistent flags."""
    args = vars(build_parser().parse_args(argv))
    return RunConfig(**{k: v for k, v in args.items() if v is not None})


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except ValidationError as e:
        configure_logging()
        for error in e.errors():
            location = ".".join(str(part) for part in error["loc"]) or "config"
            logger.error(f"{location}: {error['msg']}")
        return EXIT_INVALID
    return run(config)
