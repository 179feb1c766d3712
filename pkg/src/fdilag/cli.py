"""Command line front end: a thin HTTP client over the service API.

Every subcommand sends one JSON request and renders the JSON response; no
analysis happens in this module. By default the request is handled by an
in-process application instance, so the full pipeline works offline with no
server running; ``--server URL`` points the same commands at a remote
instance.

Exit codes: 0 success, 2 input validation, 3 numerical failure, 4 network
failure.
"""

from __future__ import annotations

import asyncio
import sys
from pathlib import Path

import click
import httpx

from . import __version__
from .reporting import render_checklist_text, render_significance_text
from .service.app import create_app

_EXIT_BY_CATEGORY = {"validation": 2, "numerical": 3, "network": 4}
_CATEGORY_BY_STATUS = {422: "validation", 500: "numerical", 502: "network"}


def _post(server: str | None, path: str, payload: dict) -> dict:
    if server is None:
        response = asyncio.run(_post_in_process(path, payload))
    else:
        try:
            with httpx.Client(base_url=server, timeout=300.0) as client:
                response = client.post(path, json=payload)
        except httpx.HTTPError as exc:
            click.echo(f"error [network]: cannot reach {server}: {exc}", err=True)
            sys.exit(_EXIT_BY_CATEGORY["network"])
    if response.status_code != 200:
        _fail(response)
    return response.json()


async def _post_in_process(path: str, payload: dict) -> httpx.Response:
    transport = httpx.ASGITransport(app=create_app())
    async with httpx.AsyncClient(
        transport=transport, base_url="http://fdilag.internal"
    ) as client:
        return await client.post(path, json=payload)


def _fail(response: httpx.Response):
    try:
        body = response.json()
    except ValueError:
        body = {}
    category = body.get(
        "category", _CATEGORY_BY_STATUS.get(response.status_code, "numerical")
    )
    message = body.get("message") or response.text[:200] or f"HTTP {response.status_code}"
    click.echo(f"error [{category}]: {message}", err=True)
    sys.exit(_EXIT_BY_CATEGORY.get(category, 1))


def _panel_source(panel_path, mapping_path, bundled) -> dict:
    if bundled:
        if panel_path or mapping_path:
            raise click.UsageError("--bundled excludes --panel/--mapping")
        return {"use_bundled": True}
    if panel_path is None:
        raise click.UsageError("provide --panel FILE or --bundled")
    source = {"panel_csv": Path(panel_path).read_text()}
    if mapping_path is not None:
        source["mapping_csv"] = Path(mapping_path).read_text()
    return source


def _coefficient_source(
    panel_path, mapping_path, bundled, coefficients_path, paper_tables
) -> dict:
    chosen = sum(
        [bool(panel_path or bundled), coefficients_path is not None, paper_tables]
    )
    if chosen != 1:
        raise click.UsageError(
            "choose exactly one source: --panel/--bundled, --coefficients FILE, "
            "or --paper-tables"
        )
    if paper_tables:
        return {"use_paper_tables": True}
    if coefficients_path is not None:
        return {"coefficients_csv": Path(coefficients_path).read_text()}
    return {"panel": _panel_source(panel_path, mapping_path, bundled)}


def _write_artifacts(artifacts: dict, output_dir: str) -> None:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in sorted(artifacts):
        (out / name).write_text(artifacts[name])
    names = ", ".join(sorted(artifacts))
    click.echo(f"wrote {names} to {out}")


_panel_options = [
    click.option(
        "--panel",
        "panel_path",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="panel CSV (country,year,fdi_usd,gdp_growth_pct)",
    ),
    click.option(
        "--mapping",
        "mapping_path",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="group mapping CSV (country,group); bundled mapping if omitted",
    ),
    click.option("--bundled", is_flag=True, help="use the bundled reconstructed panel"),
]


def _add(options):
    def wrap(command):
        for option in reversed(options):
            command = option(command)
        return command

    return wrap


@click.group()
@click.version_option(__version__)
@click.option(
    "--server",
    envvar="FDILAG_SERVER",
    default=None,
    metavar="URL",
    help="send requests to a running service instead of in-process",
)
@click.pass_context
def main(ctx, server):
    """Lagged FDI-GDP correlation toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@_add(_panel_options)
@click.option(
    "--output",
    "output_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="write the validated panel back out in canonical form",
)
@click.pass_context
def ingest(ctx, panel_path, mapping_path, bundled, output_path):
    """Validate a panel file and print its summary."""
    body = _post(
        ctx.obj["server"],
        "/v1/ingest",
        {"source": _panel_source(panel_path, mapping_path, bundled)},
    )
    first, last = body["year_range"]
    click.echo(
        f"panel: {body['countries']} countries, years {first}-{last}, "
        f"{body['observation_count']} observations"
    )
    sizes = ", ".join(f"{k}={v}" for k, v in body["group_sizes"].items())
    click.echo(f"groups: {sizes}")
    trimmed = [
        w for w in body["windows"] if (w["first_year"], w["last_year"]) != (first, last)
    ]
    for window in trimmed:
        click.echo(
            f"  note: {window['country']} window trimmed to "
            f"{window['first_year']}-{window['last_year']} ({window['years']} years)"
        )
    if output_path is not None:
        Path(output_path).write_text(body["panel_csv"])
        click.echo(f"wrote canonical panel to {output_path}")


@main.command()
@_add(_panel_options)
@click.option("--max-lag", default=3, show_default=True, type=click.IntRange(min=0))
@click.option(
    "--alpha",
    default=0.05,
    show_default=True,
    type=click.FloatRange(min=0.0, max=1.0, min_open=True, max_open=True),
    help="significance level for the per-coefficient t-test",
)
@click.option("--output-dir", default=".", show_default=True, type=click.Path(file_okay=False))
@click.pass_context
def correlate(ctx, panel_path, mapping_path, bundled, max_lag, alpha, output_dir):
    """Compute the per-country lagged correlation matrix."""
    body = _post(
        ctx.obj["server"],
        "/v1/correlate",
        {
            "source": _panel_source(panel_path, mapping_path, bundled),
            "max_lag": max_lag,
            "alpha": alpha,
        },
    )
    click.echo(render_significance_text(body["summary"]), nl=False)
    _write_artifacts(body["artifacts"], output_dir)


@main.command()
@_add(_panel_options)
@click.option("--max-lag", default=3, show_default=True, type=click.IntRange(min=0))
@click.option("--output-dir", default=".", show_default=True, type=click.Path(file_okay=False))
@click.pass_context
def trends(ctx, panel_path, mapping_path, bundled, max_lag, output_dir):
    """Average each cluster's coefficient trend across lags."""
    body = _post(
        ctx.obj["server"],
        "/v1/trends",
        {"source": _panel_source(panel_path, mapping_path, bundled), "max_lag": max_lag},
    )
    click.echo("cluster mean correlation vs lag (least-squares line):")
    for trend in body["trends"]:
        means = "  ".join(
            f"lag{k}={value:.4f}" for k, value in enumerate(trend["mean_rho"])
        )
        click.echo(
            f"  {trend['group']:<9} slope={trend['slope']:+.4f} "
            f"intercept={trend['intercept']:+.4f}  {means}"
        )
    _write_artifacts(body["artifacts"], output_dir)


_coefficient_options = _panel_options + [
    click.option(
        "--coefficients",
        "coefficients_path",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="wide coefficient CSV (country,group,lag0,...)",
    ),
    click.option(
        "--paper-tables",
        is_flag=True,
        help="use the bundled transcription of the published coefficient tables",
    ),
]


@main.command("fit-ranksize")
@_add(_coefficient_options)
@click.option("--max-lag", default=3, show_default=True, type=click.IntRange(min=0))
@click.option("--output-dir", default=".", show_default=True, type=click.Path(file_okay=False))
@click.pass_context
def fit_ranksize(
    ctx, panel_path, mapping_path, bundled, coefficients_path, paper_tables,
    max_lag, output_dir,
):
    """Fit the rank-size law to each lag's ranked coefficients."""
    body = _post(
        ctx.obj["server"],
        "/v1/fit-ranksize",
        {
            "source": _coefficient_source(
                panel_path, mapping_path, bundled, coefficients_path, paper_tables
            ),
            "max_lag": max_lag,
        },
    )
    click.echo("rank-size law fit per lag:")
    for fit in body["fits"]:
        click.echo(
            f"  lag {fit['lag']}: m1={fit['m1']:.4f}±{fit['se_m1']:.4f}  "
            f"m2={fit['m2']:.4f}±{fit['se_m2']:.4f}  "
            f"m3={fit['m3']:.4f}±{fit['se_m3']:.4f}  "
            f"R²={fit['r_squared']:.4f}  ({fit['iterations']} iterations)"
        )
    _write_artifacts(body["artifacts"], output_dir)
    if body["failures"]:
        for lag, message in sorted(body["failures"].items()):
            click.echo(f"  lag {lag} failed: {message}", err=True)
        sys.exit(_EXIT_BY_CATEGORY["numerical"])


@main.command()
@click.option(
    "--countries",
    default=None,
    metavar="ISO3[,ISO3...]",
    help="comma-separated ISO-3 codes; all 43 bundled countries if omitted",
)
@click.option("--first-year", default=1970, show_default=True, type=int)
@click.option("--last-year", default=2015, show_default=True, type=int)
@click.option(
    "--mapping",
    "mapping_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="group mapping CSV; bundled mapping if omitted",
)
@click.option("--live", is_flag=True, help="actually contact the indicator API")
@click.option(
    "--fixture-dir",
    type=click.Path(exists=True, file_okay=False),
    default=None,
    help="replay recorded response pages from this directory instead",
)
@click.option(
    "--output",
    "output_path",
    type=click.Path(dir_okay=False),
    default="fetched_panel.csv",
    show_default=True,
)
@click.pass_context
def fetch(ctx, countries, first_year, last_year, mapping_path, live, fixture_dir, output_path):
    """Build a panel from the World Bank indicator API (or a recording)."""
    payload: dict = {
        "first_year": first_year,
        "last_year": last_year,
        "live": live,
    }
    if countries is not None:
        payload["country_ids"] = [c.strip() for c in countries.split(",") if c.strip()]
    if mapping_path is not None:
        payload["mapping_csv"] = Path(mapping_path).read_text()
    if fixture_dir is not None:
        payload["fixture_dir"] = str(Path(fixture_dir).resolve())
    body = _post(ctx.obj["server"], "/v1/fetch", payload)
    first, last = body["year_range"]
    click.echo(
        f"fetched {body['countries']} countries, years {first}-{last}, "
        f"{body['observation_count']} observations"
    )
    if body["dropped"]:
        click.echo(f"dropped: {', '.join(body['dropped'])}")
    Path(output_path).write_text(body["panel_csv"])
    click.echo(f"wrote panel to {output_path}")


@main.command()
@_add(_coefficient_options)
@click.option("--max-lag", default=3, show_default=True, type=click.IntRange(min=0))
@click.option(
    "--alpha",
    default=0.05,
    show_default=True,
    type=click.FloatRange(min=0.0, max=1.0, min_open=True, max_open=True),
)
@click.option("--output-dir", default=".", show_default=True, type=click.Path(file_okay=False))
@click.pass_context
def report(
    ctx, panel_path, mapping_path, bundled, coefficients_path, paper_tables,
    max_lag, alpha, output_dir,
):
    """Run the whole pipeline and write the consolidated report."""
    body = _post(
        ctx.obj["server"],
        "/v1/report",
        {
            "source": _coefficient_source(
                panel_path, mapping_path, bundled, coefficients_path, paper_tables
            ),
            "max_lag": max_lag,
            "alpha": alpha,
        },
    )
    click.echo(render_checklist_text(body["report"]["checklist"]), nl=False)
    _write_artifacts(body["artifacts"], output_dir)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
