"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 parameters outside the asymptotic
regime, 3 verification failure.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import click

from . import oracle
from .model import Case, Convention, DomainError, LevelIndex, PotentialSpec, from_mu_lambda, landmarks, map_convention
from .series import energy_series, p_coeffs, s_coeffs
from .specfun import RegimeError, barrier_moduli
from .tunneling import complex_eigenvalue, level_splitting, splitting_mu_lambda
from .verify import CHECKS, run_check

EXIT_OK, EXIT_INPUT, EXIT_REGIME, EXIT_VERIFY = 0, 1, 2, 3
CSV_HEADER = ("sweep_value", "q0", "E0", "q_deviation", "delta_E_formula", "delta_E_numeric", "rel_dev")
SMALL_EXPONENT = 3.0


class RegimeRefusal(Exception):
    pass


class VerificationFailed(Exception):
    def __init__(self, text: str) -> None:
        super().__init__("verification failed")
        self.text = text


@dataclass
class Report:
    command: str
    spec: dict | None
    results: list[dict]
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"command": self.command, "spec": self.spec, "results": self.results, "warnings": self.warnings}


def _spec_json(spec: PotentialSpec) -> dict:
    lm = landmarks(spec)
    return {
        "case": spec.case.value,
        "h4": spec.h4,
        "c2": spec.c2,
        "convention": spec.convention.value,
        "derived": {"h2": spec.h2, "h6": spec.h6, "z_plus": lm.z_plus, "h6_over_c2": spec.h6 / spec.c2},
    }


def _levels(n: tuple[int, ...], q0: tuple[int, ...]) -> list[int]:
    out = [LevelIndex(k).q0 for k in n] + [LevelIndex.from_q0(k).q0 for k in q0]
    return out or [1]


def _render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        keys: list[str] = []
        for row in report.results:
            for k in row:
                if k not in keys and not isinstance(row[k], (dict, list)):
                    keys.append(k)
        writer = csv.DictWriter(buf, fieldnames=keys, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in report.results:
            writer.writerow(row)
        return buf.getvalue()
    lines = [f"# {report.command}"]
    if report.spec:
        lines.append(" ".join(f"{k}={_fmt(v)}" for k, v in report.spec.items() if not isinstance(v, dict)))
    for row in report.results:
        if "text" in row:
            lines.append(row["text"])
            continue
        lines.append("  ".join(f"{k}={_fmt(v)}" for k, v in row.items() if not isinstance(v, (dict, list))))
    lines.extend(f"warning: {w}" for w in report.warnings)
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _emit(ctx: click.Context, report: Report) -> None:
    text = _render(report, ctx.obj["format"])
    out = ctx.obj["out"]
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    for w in report.warnings:
        click.echo(f"warning: {w}", err=True)


def _make_spec(case: str, h4: float | None, c2: float | None, convention: str) -> PotentialSpec:
    if h4 is None or c2 is None:
        raise click.UsageError("--h4 and --c2 are required")
    return PotentialSpec(Case(case), h4, c2, Convention(convention))


_format_option = click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="text")
_out_option = click.option("--out", type=click.Path(dir_okay=False), default=None)


def _common(f):
    for deco in reversed(
        (
            click.option("--h4", type=float, default=None, help="h^4 > 0"),
            click.option("--c2", type=float, default=None, help="c^2 > 0"),
            click.option("--convention", type=click.Choice(["half", "one"]), default="half"),
            click.option("--n", "n", type=int, multiple=True, help="level index n (repeatable)"),
            click.option("--q0", type=int, multiple=True, help="odd q0 = 2n + 1 (repeatable)"),
            click.option("--order", type=int, default=3, show_default=True, help="number of series terms"),
            _format_option,
            _out_option,
        )
    ):
        f = deco(f)
    return f


@click.group()
def cli() -> None:
    """Large-h^2 spectra, level splittings and widths of quartic anharmonic oscillators."""


def _setup(ctx: click.Context, fmt: str, out: str | None) -> None:
    ctx.ensure_object(dict)
    ctx.obj["format"] = fmt
    ctx.obj["out"] = out


# -- spectrum ------------------------------------------------------------------------


def spectrum_report(spec: PotentialSpec, q0s: list[int], order: int) -> Report:
    warnings = []
    half, factor = map_convention(spec, Convention.HALF)
    series = energy_series(spec.case, order)
    rows = []
    for q0 in q0s:
        e_half = series.value(q0, half.h4, half.c2)
        rows.append({"q0": q0, "n": (q0 - 1) // 2, "E0": e_half / factor, "truncation_order": order})
        if spec.case is Case.DOUBLE_WELL and barrier_moduli(half, q0)[1] >= 1.0:
            warnings.append(f"q0={q0}: level lies above the barrier region (u >= 1)")
    return Report("spectrum", _spec_json(spec), rows, warnings)


@cli.command()
@click.option("--case", type=click.Choice([c.value for c in Case]), default="bounded")
@_common
@click.pass_context
def spectrum(ctx, case, h4, c2, convention, n, q0, order, fmt, out):
    """Energy eigenvalues from the truncated large-h^2 series."""
    _setup(ctx, fmt, out)
    spec = _make_spec(case, h4, c2, convention)
    _emit(ctx, spectrum_report(spec, _levels(n, q0), order))


# -- splitting -----------------------------------------------------------------------


def _double_guard(half: PotentialSpec, q0: int) -> list[str]:
    _, u = barrier_moduli(half, q0)
    exponent = half.h6 / (6.0 * math.sqrt(2.0) * half.c2)
    if u >= 1.0:
        raise RegimeRefusal(f"q0={q0}: u = {u:.3g} >= 1, the level is not below the barrier")
    if exponent < 1.0:
        raise RegimeRefusal(f"barrier exponent {exponent:.3g} < 1: the splitting formula does not apply")
    if exponent < SMALL_EXPONENT:
        return [f"barrier exponent {exponent:.3g} < {SMALL_EXPONENT}: exponential is not small"]
    return []


def splitting_report(spec: PotentialSpec, q0s: list[int], order: int, numeric: bool, points: int) -> Report:
    spec.require(Case.DOUBLE_WELL)
    half, factor = map_convention(spec, Convention.HALF)
    rows, warnings = [], []
    for q0 in q0s:
        warnings += _double_guard(half, q0)
        res = level_splitting(spec, q0, order)
        row = {
            "q0": q0,
            "n": (q0 - 1) // 2,
            "E0": res.E0,
            "q_deviation": res.q_deviation,
            "exponent": res.metadata["exponent"],
            "delta_E": res.splitting,
            "delta_wkb": res.metadata["delta_wkb"],
            "truncation_order": order,
        }
        if numeric:
            cfg = oracle.default_config(half, points, energy_max=res.E0 * factor + half.h2)
            value = oracle.splitting_numeric(half, cfg, (q0 - 1) // 2) / factor
            row["delta_E_numeric"] = value
            row["rel_dev"] = abs(res.splitting - value) / value
        rows.append(row)
    return Report("splitting", _spec_json(spec), rows, warnings)


@cli.command()
@click.option("--mu", type=float, default=None, help="with --lam: V = (lam/4)(z^2 - mu^2/lam)^2, unit mass")
@click.option("--lam", type=float, default=None)
@click.option("--numeric", is_flag=True, help="compare with the grid eigensolver")
@click.option("--points", type=int, default=3001, show_default=True)
@_common
@click.pass_context
def splitting(ctx, mu, lam, numeric, points, h4, c2, convention, n, q0, order, fmt, out):
    """Level splitting of the symmetric double well."""
    _setup(ctx, fmt, out)
    if (mu is None) != (lam is None):
        raise click.UsageError("--mu and --lam go together")
    q0s = _levels(n, q0)
    if mu is not None:
        spec = from_mu_lambda(mu, lam)
        report = splitting_report(spec, q0s, order, numeric, points)
        for row in report.results:
            row["delta_E_mu_lambda"] = splitting_mu_lambda(mu, lam, row["q0"])
    else:
        report = splitting_report(_make_spec("double", h4, c2, convention), q0s, order, numeric, points)
    _emit(ctx, report)


# -- width ---------------------------------------------------------------------------


def width_report(spec: PotentialSpec, q0s: list[int], order: int) -> Report:
    spec.require(Case.INVERTED)
    half, factor = map_convention(spec, Convention.HALF)
    exponent = half.h6 / (6.0 * half.c2)
    warnings = []
    if exponent < 1.0:
        raise RegimeRefusal(f"hump exponent {exponent:.3g} < 1: the width formula does not apply")
    if exponent < SMALL_EXPONENT:
        warnings.append(f"hump exponent h^6/6c^2 = {exponent:.3g} < {SMALL_EXPONENT}: exponential is not small")
    rows = []
    for q0 in q0s:
        if 2.0 * q0 * half.c2 / half.h6 >= 0.25:
            raise RegimeRefusal(f"q0={q0}: level too close to the hump top")
        res = complex_eigenvalue(half, q0, order)
        rows.append(
            {
                "q0": q0,
                "n": (q0 - 1) // 2,
                "E0": res.E0 / factor,
                "q_deviation": res.q_deviation,
                "im_E": res.imaginary_part / factor,
                "sign": res.metadata["sign"],
                "exponent": exponent,
                "bender_wu_K": res.metadata["bender_wu"]["K"],
                "bender_wu_epsilon": res.metadata["bender_wu"]["epsilon"],
                "truncation_order": order,
            }
        )
    return Report("width", _spec_json(spec), rows, warnings)


@cli.command()
@_common
@click.pass_context
def width(ctx, h4, c2, convention, n, q0, order, fmt, out):
    """Imaginary part of the inverted-well eigenvalues."""
    _setup(ctx, fmt, out)
    spec = _make_spec("inverted", h4, c2, convention)
    _emit(ctx, width_report(spec, _levels(n, q0), order))


# -- coefficients ----------------------------------------------------------------------


def coefficients_report(case: Case, order: int, tables: int) -> Report:
    series = energy_series(case, order)
    rows: list[dict] = [{"text": series.render(), "series": series.to_json()}]
    if case in (Case.INVERTED, Case.BOUNDED):
        for i in range(1, tables + 1):
            s_tab = {str(j): str(p) for j, p in sorted(s_coeffs(i).items())}
            rows.append({"text": f"S_{2 * i}: " + ", ".join(f"[{j}] {p}" for j, p in s_tab.items()), "S": s_tab})
        for i in range(1, tables + 1):
            p_tab = {
                str(j): {str(k): str(v) for k, v in dp.items} for j, dp in sorted(p_coeffs(i).items())
            }
            body = "; ".join(
                f"[{j}] " + " + ".join(f"({v}) D^{k}" for k, v in terms.items()) for j, terms in p_tab.items()
            )
            rows.append({"text": f"P_{i}: {body}", "P": p_tab})
    return Report("coefficients", {"case": case.value}, rows)


@cli.command()
@click.option("--case", type=click.Choice([c.value for c in Case]), default="inverted")
@click.option("--order", type=int, default=3, show_default=True)
@click.option("--tables", type=int, default=0, show_default=True, help="also list S and P tables up to this index")
@_format_option
@_out_option
@click.pass_context
def coefficients(ctx, case, order, tables, fmt, out):
    """Exact-rational series coefficients."""
    _setup(ctx, fmt, out)
    if order < 1 or order > 8:
        raise click.UsageError("--order must lie in [1, 8]")
    _emit(ctx, coefficients_report(Case(case), order, tables))


# -- verify --------------------------------------------------------------------------------


@cli.command()
@click.option("--only", type=int, multiple=True, help="criterion number (repeatable)")
@_format_option
@_out_option
@click.pass_context
def verify(ctx, only, fmt, out):
    """Run the acceptance suite; exit 3 if any criterion fails."""
    _setup(ctx, fmt, out)
    numbers = list(only) or list(range(1, len(CHECKS) + 1))
    for k in numbers:
        if not 1 <= k <= len(CHECKS):
            raise click.UsageError(f"no criterion {k}")
    results = [run_check(k) for k in numbers]
    rows = []
    for r in results:
        row = {"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
        if fmt == "text":
            row = {"text": r.line().rsplit(" (", 1)[0]}
        rows.append(row)
    report = Report("verify", None, rows)
    _emit(ctx, report)
    if not all(r.passed for r in results):
        raise VerificationFailed(f"{sum(not r.passed for r in results)} criterion(s) failed")


# -- sweep -----------------------------------------------------------------------------------


@cli.command()
@click.option("--over", "what", type=click.Choice(["splitting", "width", "spectrum"]), default="splitting")
@click.option("--axis", type=click.Choice(["h6_over_c2", "h4", "c2"]), default="h6_over_c2")
@click.option("--values", required=True, help="comma-separated axis values")
@click.option("--case", type=click.Choice([c.value for c in Case]), default=None)
@click.option("--h4", type=float, default=None)
@click.option("--c2", type=float, default=1.0, show_default=True)
@click.option("--convention", type=click.Choice(["half", "one"]), default="half")
@click.option("--q0", type=int, default=1, show_default=True)
@click.option("--order", type=int, default=3, show_default=True)
@click.option("--numeric", is_flag=True, help="add grid-eigensolver splittings")
@click.option("--points", type=int, default=3001, show_default=True)
@_out_option
@click.pass_context
def sweep(ctx, what, axis, values, case, h4, c2, convention, q0, order, numeric, points, out):
    """Repeat a command along one parameter axis and emit CSV rows.

    For width sweeps the delta_E_formula column carries |Im E|.
    """
    _setup(ctx, "csv", out)
    try:
        axis_values = [float(v) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise click.UsageError(f"--values: {exc}") from exc
    if not axis_values:
        raise click.UsageError("--values is empty")
    default_case = {"splitting": "double", "width": "inverted", "spectrum": "bounded"}[what]
    case = Case(case or default_case)
    LevelIndex.from_q0(q0)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    warnings: list[str] = []
    for x in axis_values:
        if axis == "h6_over_c2":
            spec = PotentialSpec(case, (x * c2) ** (2.0 / 3.0), c2, Convention(convention))
        elif axis == "h4":
            spec = PotentialSpec(case, x, c2, Convention(convention))
        else:
            spec = _make_spec(case.value, h4, x, convention)
        numeric_val, rel = "", ""
        if what == "splitting":
            rep = splitting_report(spec, [q0], order, numeric, points)
            row = rep.results[0]
            formula = row["delta_E"]
            if numeric:
                numeric_val, rel = row["delta_E_numeric"], row["rel_dev"]
        elif what == "width":
            rep = width_report(spec, [q0], order)
            row = rep.results[0]
            formula = row["im_E"]
        else:
            rep = spectrum_report(spec, [q0], order)
            row = {**rep.results[0], "q_deviation": ""}
            formula = ""
        warnings += rep.warnings
        writer.writerow([repr(x), q0, repr(row["E0"]), _cell(row["q_deviation"]), _cell(formula),
                         _cell(numeric_val), _cell(rel)])
    text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    for w in warnings:
        click.echo(f"warning: {w}", err=True)


def _cell(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


# -- entry point ------------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    try:
        oracle.default_tolerance()
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    try:
        cli.main(args=argv, prog_name="anharmonic", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except click.exceptions.Abort:
        return EXIT_INPUT
    except (RegimeRefusal, RegimeError) as exc:
        click.echo(f"out of regime: {exc}", err=True)
        return EXIT_REGIME
    except oracle.UnresolvedError as exc:
        click.echo(f"out of regime: {exc}", err=True)
        return EXIT_REGIME
    except VerificationFailed as exc:
        click.echo(str(exc), err=True)
        return EXIT_VERIFY
    except (DomainError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
