"""Command-line workbench: fit, analyze, simulate, serve.

Exit codes: 0 success, 1 runtime failure, 2 invalid input. Records travel as
JSON lines; every analysis is reproducible from its printed seed, and the
analyze command emits the same canonical bytes the HTTP service serves for
identical records and filters.
"""

from __future__ import annotations

import functools
import json
import secrets
import sys
from pathlib import Path
from typing import Optional

import click

from .analysis import (
    BootstrapSpec,
    RegressionSpec,
    build_analysis_report,
    report_to_json,
)
from .bayes import ObservedData
from .betadist import BetaParams
from .errors import BeliefBenchError, ValidationError
from .fitting import FitConfig
from .records import (
    Condition,
    Dataset,
    ParticipantRecord,
    ResponseFormat,
    fill_fits,
    records_to_jsonl,
)
from .simulate import KIND_EXACT, KIND_SAMPLE, simulate_cohort
from .validation import validate_payload

EXIT_RUNTIME = 1
EXIT_INVALID = 2


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    """Map domain validation to exit 2 and anything else unexpected to 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            _fail(EXIT_INVALID, str(exc))
        except (BeliefBenchError, OSError, json.JSONDecodeError) as exc:
            _fail(EXIT_RUNTIME, str(exc))

    return wrapper


def _read_record_lines(path: str) -> list:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return text.splitlines()


def _parse_records(lines, skip_invalid: bool) -> list:
    records = []
    bad = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
            validate_payload(payload, "participant-record")
            records.append(ParticipantRecord.from_dict(payload))
        except (json.JSONDecodeError, ValidationError, KeyError, TypeError) as exc:
            bad.append((line_no, str(exc)))
    if bad:
        for line_no, msg in bad:
            click.echo(f"line {line_no}: {msg}", err=True)
        if not skip_invalid:
            _fail(EXIT_INVALID, f"{len(bad)} invalid record(s); use --skip-invalid to drop them")
        click.echo(f"skipped {len(bad)} invalid record(s)", err=True)
    return records


def _write_text(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _parse_counts(value: str, flag: str) -> tuple:
    parts = value.split(",")
    if len(parts) != 2:
        raise ValidationError(f"{flag} expects SUCCESSES,FAILURES, got {value!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ValidationError(f"{flag} expects two integers, got {value!r}") from exc


@click.group()
def main() -> None:
    """Belief-elicitation workbench."""


@main.command("fit")
@click.argument("input_path")
@click.option("-o", "--output", default=None, help="Output path (default stdout).")
@click.option("--skip-invalid", is_flag=True, help="Drop malformed lines instead of failing.")
@click.option(
    "--deviant-policy",
    type=click.Choice(["uniform", "peaked"]),
    default="uniform",
    show_default=True,
    help="Fallback Beta when a response carries no usable spread.",
)
@click.option(
    "--peaked-concentration",
    type=float,
    default=None,
    help="Total concentration of the peaked fallback (required with peaked).",
)
@_guarded
def cmd_fit(
    input_path: str,
    output: Optional[str],
    skip_invalid: bool,
    deviant_policy: str,
    peaked_concentration: Optional[float],
) -> None:
    """Fit Beta parameters for every record in a JSONL file."""
    records = _parse_records(_read_record_lines(input_path), skip_invalid)
    cfg = FitConfig(deviant_policy=deviant_policy, peaked_concentration=peaked_concentration)
    fitted = [fill_fits(r, cfg) for r in records]
    _write_text(records_to_jsonl(fitted), output)


@main.command("analyze")
@click.argument("input_path")
@click.option("--data", "data_counts", default=None, help="SUCCESSES,FAILURES shown to every record.")
@click.option(
    "--datasets",
    "datasets_path",
    default=None,
    help="JSON file with a list of dataset definitions (multi-dataset cohorts).",
)
@click.option("--label", default="", help="Dataset label used with --data.")
@click.option("--icon-unit", default=600, show_default=True, help="Icon unit used with --data.")
@click.option("--condition", default=None, help="Keep only records in this condition key.")
@click.option("--dataset", "dataset_filter", default=None, help="Keep only records for this dataset.")
@click.option(
    "--attention-pass",
    type=click.Choice(["true", "false", "any"]),
    default="true",
    show_default=True,
    help="Attention-check filter.",
)
@click.option("--regress", is_flag=True, help="Include the Bayesian regression.")
@click.option("--first-n", is_flag=True, help="Include truncated-sample reanalyses.")
@click.option("--seed", type=int, default=None, help="Regression seed; random (and printed) if omitted.")
@click.option("--resample-size", type=int, default=100, show_default=True, help="Records drawn per bootstrap replicate.")
@click.option("--repetitions", type=int, default=2000, show_default=True, help="Bootstrap replicates.")
@click.option("--level", type=float, default=0.95, show_default=True, help="Bootstrap interval level.")
@click.option("--bootstrap-seed", type=int, default=0, show_default=True, help="Bootstrap seed.")
@click.option("--deviant-policy", type=click.Choice(["uniform", "peaked"]), default="uniform", show_default=True)
@click.option("--peaked-concentration", type=float, default=None, help="Total concentration of the peaked fallback.")
@click.option("-o", "--output", default=None, help="Output path (default stdout).")
@_guarded
def cmd_analyze(
    input_path: str,
    data_counts: Optional[str],
    datasets_path: Optional[str],
    label: str,
    icon_unit: int,
    condition: Optional[str],
    dataset_filter: Optional[str],
    attention_pass: str,
    regress: bool,
    first_n: bool,
    seed: Optional[int],
    resample_size: int,
    repetitions: int,
    level: float,
    bootstrap_seed: int,
    deviant_policy: str,
    peaked_concentration: Optional[float],
    output: Optional[str],
) -> None:
    """Build the full analysis report for a JSONL cohort."""
    if (data_counts is None) == (datasets_path is None):
        raise ValidationError("exactly one of --data or --datasets is required")
    if data_counts is not None:
        successes, failures = _parse_counts(data_counts, "--data")
        data = ObservedData(successes, failures, label=label, icon_unit=icon_unit)
    else:
        defs = json.loads(Path(datasets_path).read_text(encoding="utf-8"))
        if not isinstance(defs, list):
            raise ValidationError("--datasets file must hold a JSON array")
        try:
            data = {
                Dataset(d["name"]): ObservedData.from_dict(d)
                for d in defs
            }
        except (ValueError, KeyError, TypeError) as exc:
            raise ValidationError(f"--datasets entries must be dataset definitions: {exc}") from exc

    records = _parse_records(_read_record_lines(input_path), skip_invalid=False)
    filters: dict = {}
    if condition is not None:
        try:
            Condition.from_key(condition)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        filters["condition"] = condition
        records = [r for r in records if r.condition.key == condition]
    if dataset_filter is not None:
        try:
            ds = Dataset(dataset_filter)
        except ValueError as exc:
            raise ValidationError(f"unknown dataset {dataset_filter!r}") from exc
        filters["dataset"] = ds.value
        records = [r for r in records if r.dataset is ds]
    if attention_pass != "any":
        wanted = attention_pass == "true"
        filters["attention_pass"] = wanted
        records = [r for r in records if r.attention_pass == wanted]

    regression_spec = None
    if regress:
        if seed is None:
            seed = secrets.randbelow(2**31)
            click.echo(f"seed: {seed}", err=True)
        regression_spec = RegressionSpec(seed=seed)

    report = build_analysis_report(
        records,
        data,
        BootstrapSpec(
            resample_size=resample_size,
            repetitions=repetitions,
            level=level,
            seed=bootstrap_seed,
        ),
        regression_spec=regression_spec,
        fit_cfg=FitConfig(
            deviant_policy=deviant_policy, peaked_concentration=peaked_concentration
        ),
        filters=filters,
        first_n=first_n,
    )
    _summarize_report(report)
    _write_text(report_to_json(report), output)


def _summarize_report(report: dict) -> None:
    """Human-readable digest on stderr; stdout stays canonical JSON."""
    click.echo(f"records: {report['usable_record_count']} usable of {report['record_count']}", err=True)
    ind = report["individual"]
    if "insufficient_data" in ind:
        click.echo(f"individual: {ind['insufficient_data']}", err=True)
        return
    mean = ind["mean_log_kld"]
    shown = "n/a" if mean is None else f"{mean:.4f}"
    click.echo(
        f"mean individual log KLD: {shown} ({ind['zero_kld_count']} zero-KLD record(s))",
        err=True,
    )
    for name, block in sorted(report["aggregate"]["per_dataset"].items()):
        log_kld = block["log_kld"]
        shown = "-inf (exact)" if log_kld is None else f"{log_kld:.4f}"
        ci = report["bootstrap"]["per_dataset"][name]
        lo = "-inf" if ci["lo"] is None else f"{ci['lo']:.4f}"
        hi = "-inf" if ci["hi"] is None else f"{ci['hi']:.4f}"
        click.echo(
            f"{name}: aggregate log KLD {shown} (non-log {block['kld']:.6g}), "
            f"bootstrap [{lo}, {hi}]",
            err=True,
        )
    first_n_block = report.get("first_n")
    if isinstance(first_n_block, dict):
        for name, by_n in sorted(first_n_block.get("per_dataset", {}).items()):
            if "insufficient_data" in by_n:
                click.echo(f"warning: first-n on {name}: {by_n['insufficient_data']}", err=True)
    regression = report.get("regression")
    if isinstance(regression, dict) and "insufficient_data" in regression:
        if regression["insufficient_data"] != "regression not requested":
            click.echo(f"warning: regression: {regression['insufficient_data']}", err=True)


@main.command("simulate")
@click.option("--agents", type=int, required=True, help="Cohort size.")
@click.option(
    "--kind",
    default="exact",
    show_default=True,
    help="'exact' or 'sample:K' where K is draws per judgment (1-10).",
)
@click.option("--prior", "prior_str", required=True, help="ALPHA,BETA of the shared prior.")
@click.option("--data", "data_counts", required=True, help="SUCCESSES,FAILURES shown to agents.")
@click.option(
    "--format",
    "format_name",
    type=click.Choice([f.value for f in ResponseFormat]),
    required=True,
    help="Response format every agent answers in.",
)
@click.option("--dataset", default=Dataset.TECH_SMALL.value, show_default=True, help="Dataset tag on the records.")
@click.option("--seed", type=int, default=None, help="Cohort seed; random (and printed) if omitted.")
@click.option("-o", "--output", default=None, help="Output path (default stdout).")
@_guarded
def cmd_simulate(
    agents: int,
    kind: str,
    prior_str: str,
    data_counts: str,
    format_name: str,
    dataset: str,
    seed: Optional[int],
    output: Optional[str],
) -> None:
    """Generate a synthetic cohort as fitted participant records."""
    if agents < 0:
        raise ValidationError(f"--agents must be nonnegative, got {agents}")
    k = 5
    if kind.startswith("sample"):
        base, _, rest = kind.partition(":")
        if base != "sample":
            raise ValidationError(f"--kind must be 'exact' or 'sample:K', got {kind!r}")
        kind = KIND_SAMPLE
        if rest:
            try:
                k = int(rest)
            except ValueError as exc:
                raise ValidationError(f"sample draw count must be an integer, got {rest!r}") from exc
    elif kind != KIND_EXACT:
        raise ValidationError(f"--kind must be 'exact' or 'sample:K', got {kind!r}")

    parts = prior_str.split(",")
    if len(parts) != 2:
        raise ValidationError(f"--prior expects ALPHA,BETA, got {prior_str!r}")
    try:
        prior = BetaParams(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ValidationError(f"--prior expects two numbers, got {prior_str!r}") from exc

    successes, failures = _parse_counts(data_counts, "--data")
    if seed is None:
        seed = secrets.randbelow(2**31)
        click.echo(f"seed: {seed}", err=True)

    records = simulate_cohort(
        agents,
        kind,
        prior,
        ResponseFormat(format_name),
        ObservedData(successes, failures),
        seed,
        k=k,
        dataset=Dataset(dataset),
    )
    _write_text(records_to_jsonl(records), output)


@main.command("serve")
@click.option("--config", "config_paths", multiple=True, help="Study config JSON to create at startup.")
@click.option("--data-dir", default=None, help="Event-log directory (default $BELIEFBENCH_DATA_DIR).")
@click.option("--host", default=None, help="Bind address (default $BELIEFBENCH_HOST).")
@click.option("--port", type=int, default=None, help="Bind port (default $BELIEFBENCH_PORT).")
@click.option("--seed", type=int, default=None, help="Global assignment seed (default $BELIEFBENCH_SEED).")
@click.option("--ui-dir", default=None, help="Static UI bundle to host at /app (default $BELIEFBENCH_UI_DIR).")
@_guarded
def cmd_serve(config_paths, data_dir, host, port, seed, ui_dir) -> None:
    """Run the study service over HTTP."""
    import uvicorn

    from .service import StudyStore, create_app, env_settings

    settings = env_settings()
    store = StudyStore(
        data_dir if data_dir is not None else settings["data_dir"],
        seed if seed is not None else settings["seed"],
    )
    for path in config_paths:
        config = json.loads(Path(path).read_text(encoding="utf-8"))
        study_id, created = store.create_study(config)
        click.echo(f"study {study_id}: {'created' if created else 'already present'}", err=True)
    uvicorn.run(
        create_app(store, ui_dir if ui_dir is not None else settings["ui_dir"]),
        host=host if host is not None else settings["host"],
        port=port if port is not None else settings["port"],
        log_level="warning",
    )


if __name__ == "__main__":
    main()
