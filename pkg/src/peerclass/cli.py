"""Command line entry points: the service, the eval harness, and a thin
HTTP client for poking a running instance."""
from __future__ import annotations

import json
import sys

import click

from .errors import PlatformError
from .evalharness import (
    EvalReport,
    ExperimentConfig,
    SynthConfig,
    compare as compare_reports,
    generate,
    run_experiment,
    write_comparison,
)
from .recsys import ModelConfig
from .store import Repository


@click.group()
def main() -> None:
    """Peer-to-peer class platform."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--store", "store_path", default=None, help="File-backed store path (in-memory if omitted).")
@click.option("--secret", default="dev-secret", help="HMAC secret for signed links and tracking tokens.")
@click.option("--base-url", default=None, help="Public base URL used inside emails.")
@click.option("--admin", is_flag=True, help="Enable /admin routes and the virtual clock (test builds).")
@click.option("--seed", default=0, show_default=True, help="Seed for deterministic port stubs.")
def serve(host: str, port: int, store_path: str | None, secret: str, base_url: str | None, admin: bool, seed: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .api import create_app
    from .service import Platform, PlatformConfig

    config = PlatformConfig(
        secret=secret,
        base_url=base_url or f"http://{host}:{port}",
        store_path=store_path,
        admin_enabled=admin,
        seed=seed,
    )
    uvicorn.run(create_app(Platform(config)), host=host, port=port)


@main.group("eval")
def eval_group() -> None:
    """Synthetic-data experiments."""


def _fail(exc: Exception) -> None:
    raise click.ClickException(str(exc))


@eval_group.command("generate")
@click.option("--seed", required=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--students", default=900, show_default=True)
@click.option("--classes", "n_classes", default=80, show_default=True)
@click.option("--tags", "n_tags", default=20, show_default=True)
@click.option("--noise", default=0.0, show_default=True)
def eval_generate(seed: int, out_path: str, students: int, n_classes: int, n_tags: int, noise: float) -> None:
    """Generate a seeded fixture and write its datastore export."""
    try:
        repo = generate(SynthConfig(seed=seed, n_students=students, n_classes=n_classes, n_tags=n_tags, noise=noise))
    except PlatformError as exc:
        _fail(exc)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(repo.dump())
    total = sum(repo.signup_counts().values())
    click.echo(f"wrote {out_path}: {students} students, {n_classes} classes, {total} signups")


@eval_group.command("run")
@click.option("--fixture", "fixture_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--version", required=True)
@click.option("--model", "model_type", default="logreg", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--min-signups", default=5, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def eval_run(fixture_path: str, version: str, model_type: str, seed: int, min_signups: int, out_path: str) -> None:
    """Run one experiment; writes REPORT plus REPORT.timing.json."""
    repo = Repository()
    with open(fixture_path, encoding="utf-8") as fh:
        repo.load(fh.read())
    config = ExperimentConfig(
        version=version,
        model_type=model_type,
        model=ModelConfig(seed=seed, allow_constant=True),
        min_signups=min_signups,
    )
    try:
        report = run_experiment(repo, config)
    except PlatformError as exc:
        _fail(exc)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    with open(out_path + ".timing.json", "w", encoding="utf-8") as fh:
        fh.write(report.timing_json())
    click.echo(
        f"{version}/{report.model_type}: mean accuracy {report.mean_accuracy:.4f}, "
        f"train {report.train_seconds_total:.2f}s"
    )


@eval_group.command("compare")
@click.argument("reports", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def eval_compare(reports: tuple[str, ...], out_dir: str) -> None:
    """Compare reports from one fixture; writes delimited tables."""
    loaded = []
    for path in reports:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        timing = None
        try:
            with open(path + ".timing.json", encoding="utf-8") as fh:
                timing = fh.read()
        except FileNotFoundError:
            pass
        loaded.append(EvalReport.from_json(text, timing))
    try:
        written = write_comparison(compare_reports(loaded), out_dir)
    except PlatformError as exc:
        _fail(exc)
    for path in written:
        click.echo(path)


@main.group()
def client() -> None:
    """Thin HTTP client for a running service."""


def _request(method: str, url: str, **kwargs):
    import httpx

    resp = httpx.request(method, url, **kwargs)
    body = resp.json()
    if not body.get("ok"):
        raise click.ClickException(json.dumps(body.get("error")))
    return body["data"]


@client.command()
@click.option("--api", default="http://127.0.0.1:8000", show_default=True)
def catalog(api: str) -> None:
    """List published classes."""
    for cls in _request("GET", f"{api}/classes"):
        click.echo(f"{cls['class_id']}  {cls['title']}  [{', '.join(cls['tags'])}]  signups={cls['signup_count']}")


@client.command()
@click.option("--api", default="http://127.0.0.1:8000", show_default=True)
@click.option("--email", required=True)
@click.option("--class-id", required=True)
@click.option("--name", default=None)
@click.option("--grade", default=None, type=int)
def signup(api: str, email: str, class_id: str, name: str | None, grade: int | None) -> None:
    """Sign a student up for a class."""
    body: dict = {"email": email, "class_id": class_id}
    if name is not None and grade is not None:
        body["profile"] = {"name": name, "grade": grade}
    data = _request("POST", f"{api}/students/signup", json=body)
    click.echo(json.dumps(data, indent=1))


@client.command()
@click.option("--api", default="http://127.0.0.1:8000", show_default=True)
@click.option("--student", "student_id", required=True)
@click.option("-n", default=3, show_default=True)
def recommendations(api: str, student_id: str, n: int) -> None:
    """Top-N class recommendations for a student."""
    data = _request("GET", f"{api}/students/{student_id}/recommendations", params={"n": n})
    click.echo(json.dumps(data, indent=1))


@client.command()
@click.option("--api", default="http://127.0.0.1:8000", show_default=True)
def outbox(api: str) -> None:
    """Dump the outbox (admin builds only)."""
    for entry in _request("GET", f"{api}/admin/outbox"):
        click.echo(f"{entry['entry_id']}  {entry['template_id']:>18}  -> {entry['recipient']}  {entry['subject']}")


if __name__ == "__main__":
    main()
