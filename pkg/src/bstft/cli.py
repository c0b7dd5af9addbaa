"""Command-line client for the simulator service.

Requests run against an in-process application instance by default; point
--server (or BSTFT_SERVER) at a remote `bstft serve` to run them there. Exit
codes: 0 success, 2 configuration/usage error, 3 runtime error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _request(server: str | None, method: str, path: str, **kwargs) -> dict:
    try:
        with _client(server) as client:
            resp = getattr(client, method)(path, **kwargs)
    except Exception as exc:  # connection problems, remote down
        click.echo(f"error: request failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail", resp.text)
    except Exception:
        detail = resp.text
    click.echo(f"error: {detail}", err=True)
    sys.exit(EXIT_CONFIG if resp.status_code in (404, 422) else EXIT_RUNTIME)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        click.echo(f"error: config file not found: {path}", err=True)
        sys.exit(EXIT_CONFIG)
    except json.JSONDecodeError as exc:
        click.echo(f"error: {path}: invalid JSON at line {exc.lineno}: {exc.msg}", err=True)
        sys.exit(EXIT_CONFIG)


def _float_list(_ctx, _param, value):
    if value is None:
        return None
    try:
        return [float(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter("expected a comma-separated list of numbers")


@click.group()
@click.option("--server", envvar="BSTFT_SERVER", default=None, help="Remote service URL.")
@click.pass_context
def main(ctx, server):
    """Swept-carrier Brillouin STFT simulator."""
    ctx.obj = server


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Experiment JSON.")
@click.option("--mode", type=click.Choice(["full", "lorentzian", "dirac"]), default=None)
@click.option("--out", "out_dir", default=None, help="Artifact directory.")
@click.option("--seed", type=int, default=None)
@click.pass_obj
def simulate(server, config_path, mode, out_dir, seed):
    """Run one experiment and write spectrogram artifacts."""
    config = _load_json(config_path)
    if out_dir is None:
        out_dir = (config.get("output") or {}).get("dir") or "bstft_out"
    body = {"config": config, "mode": mode, "out_dir": out_dir, "seed": seed}
    data = _request(server, "post", "/simulate", json=body)
    report = data["report"]
    click.echo(f"windows: {report['derived']['n_windows']}  fidelity: {report['fidelity']}")
    if report.get("oracle"):
        click.echo(f"oracle matched fraction: {report['oracle']['matched_peak_fraction']:.3f}")
    if report.get("ridge"):
        click.echo(f"ridge rms: {report['ridge']['rms_hz'] / 1e6:.2f} MHz")
    for p in data["artifacts"]:
        click.echo(f"wrote {p}")


@main.command()
@click.argument("name")
@click.option("--emit-config", is_flag=True, help="Print the full config JSON.")
@click.pass_obj
def preset(server, name, emit_config):
    """Show a named scenario configuration."""
    data = _request(server, "get", f"/presets/{name}")
    cfg = data["config"]
    if emit_config:
        click.echo(json.dumps(cfg, indent=2, sort_keys=True))
        return
    sweep = cfg["sweep"]
    chirp = (sweep["f2_hz"] - sweep["f1_hz"]) / sweep["period_s"]
    click.echo(
        f"{name}: sweep {sweep['f1_hz'] / 1e9:g}-{sweep['f2_hz'] / 1e9:g} GHz, "
        f"T={sweep['period_s'] * 1e6:g} us (K={chirp / 1e15:g} GHz/us), "
        f"duration {cfg['duration_s'] * 1e6:g} us, sut={cfg['sut']['variant']}"
    )


@main.command("presets")
@click.pass_obj
def list_presets(server):
    """List available scenario names."""
    for name in _request(server, "get", "/presets")["presets"]:
        click.echo(name)


@main.command("resolution-scan")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--periods", callback=_float_list, default=None, help="Comma list of periods (s).")
@click.option("--chirp-rates", callback=_float_list, default=None, help="Comma list of K (Hz/s).")
@click.option("--f-center", type=float, default=2e9, show_default=True)
@click.option("--out", "out_dir", default="bstft_out")
@click.pass_obj
def resolution_scan_cmd(server, config_path, periods, chirp_rates, f_center, out_dir):
    """Measure two-tone resolution across sweep periods or chirp rates."""
    if (periods is None) == (chirp_rates is None):
        click.echo("error: provide exactly one of --periods or --chirp-rates", err=True)
        sys.exit(EXIT_CONFIG)
    body = {
        "config": _load_json(config_path),
        "periods_s": periods,
        "chirp_rates_hz_per_s": chirp_rates,
        "f_center_hz": f_center,
        "out_dir": out_dir,
    }
    data = _request(server, "post", "/resolution-scan", json=body)
    curve = data["curve"]
    for point in curve["points"]:
        sep = point["min_resolvable_sep_hz"]
        sep_txt = "unresolvable" if sep is None else f"{sep / 1e6:.1f} MHz"
        click.echo(f"T={point['period_s'] * 1e6:g} us -> {sep_txt}")
    click.echo(f"non-increasing with period: {curve['non_increasing_with_period']}")
    for p in data["artifacts"]:
        click.echo(f"wrote {p}")


@main.command()
@click.option("--a", "a_path", required=True, type=click.Path())
@click.option("--b", "b_path", required=True, type=click.Path())
@click.option("--tol", required=True, type=float, help="Peak matching tolerance (Hz).")
@click.pass_obj
def compare(server, a_path, b_path, tol):
    """Match peaks between two spectrogram CSV files."""
    body = {"a_path": str(a_path), "b_path": str(b_path), "freq_tol_hz": tol}
    click.echo(json.dumps(_request(server, "post", "/compare", json=body), indent=2))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("bstft.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
