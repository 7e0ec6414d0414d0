"""Command line entry point: build quivers, run check suites, mutation runs and round trips."""
from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click

from .cluster_functions import f_names, seed_dual, seed_F, seed_toda, seed_zero
from .exact_core import sample_generic
from .maps import psi_prime, psi_second, reconstruct_X
from .mutation_sequences import run_mu, run_W
from .quivers import B, boomerang_quiver, boomerang_word, glue, glue_hat, toda_quiver, zero_quiver, dual_quiver
from .verify import SUITES, report_json, run_checks

FORMATS = ("json", "dot", "text")


def _check_n(ctx, param, value: int) -> int:
    if value == 3:
        raise click.BadParameter("n = 3 carries a different structure with its own construction; use n >= 4")
    if not 4 <= value <= 6:
        raise click.BadParameter("supported range is 4 <= n <= 6")
    return value


n_option = click.option("--n", "n", default=4, show_default=True, callback=_check_n, help="matrix size")
seed_option = click.option("--seed", default=0, show_default=True, help="master RNG seed")
trials_option = click.option("--trials", default=5, show_default=True, help="random points per check")
out_option = click.option("--out", type=click.Path(path_type=Path), default=None, help="output file or directory")
format_option = click.option("--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True)


def _emit(text: str, out: Path | None) -> None:
    """Single writer for all command output."""
    if out is None:
        click.echo(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n")


def _point(n: int, seed: int, tag: str):
    X, _ = sample_generic(random.Random(f"{seed}:{tag}:{n}"), n)
    return X


def build_quivers(n: int) -> dict[str, tuple]:
    """Name -> (quiver, vertex labels) for every quiver the tool constructs at n."""
    m = n - 1
    dual = seed_dual(m)
    toda = seed_toda(m)
    names = f_names(n)
    zero = zero_quiver(n)
    boom = boomerang_quiver(n)
    boom_names = {B(i, j): (boomerang_word(n, i, j) or f"x_{n}1") for i, j in
                  ((int(a), int(b)) for a, b in (v.strip("|").split(",") for v in boom.labels))}
    return {
        "dual": (dual_quiver(m), dict(dual.names)),
        "toda": (toda_quiver(m), dict(toda.names)),
        "Q": (glue(n), names),
        "Q_hat": (glue_hat(n), names),
        "Q_zero": (zero, {v: names[v] for v in zero.labels}),
        "Q_boomerang": (boom, {k: f"[{v}]" if v[0] != "x" else v for k, v in boom_names.items()}),
    }


@click.group()
def main() -> None:
    """Generalized cluster structure on GL_n: construction and exact checks."""


@main.command()
@n_option
@out_option
@format_option
def build(n: int, out: Path | None, fmt: str) -> None:
    """Emit the dual, Toda, glued, extended, initial and boomerang quivers."""
    quivers = build_quivers(n)
    for name, (Q, labels) in quivers.items():
        if fmt == "json":
            data = Q.to_json()
            data["variables"] = {str(v): labels.get(v, "") for v in Q.labels}
            text = json.dumps(data, indent=2)
        elif fmt == "dot":
            text = Q.to_dot(name, labels)
        else:
            text = "\n".join([f"{name}: {len(Q.labels)} vertices, {len(Q.arrows)} arrows"] +
                             [f"  {v}{' *' if i.frozen else ''}  {labels.get(v, '')}" for v, i in Q.vertices])
        if out is None:
            click.echo(text)
        else:
            _emit(text, out / f"{name}_{n}.{ 'txt' if fmt == 'text' else fmt}")


@main.command()
@click.argument("suite", type=click.Choice(sorted(SUITES) + ["all"]))
@n_option
@seed_option
@trials_option
@click.option("--jobs", default=1, show_default=True, help="worker threads")
@out_option
@format_option
def verify(suite: str, n: int, seed: int, trials: int, jobs: int, out: Path | None, fmt: str) -> None:
    """Run one check suite (or all of them); exit code 0 iff every check passes."""
    names = list(SUITES) if suite == "all" else [suite]
    checks = [c for name in names for c in SUITES[name](n)]
    results = run_checks(checks, seed, trials, jobs)
    if fmt == "text":
        text = "\n".join(f"{r.status.upper():12} {r.name} (n={r.n}, trials={r.trials}, resamples={r.resamples})"
                         for r in results)
    else:
        text = report_json(results)
    _emit(text, out)
    sys.exit(0 if all(r.passed for r in results) else 1)


@main.command()
@click.argument("plan", type=click.Choice(["W", "mu"]))
@n_option
@seed_option
@out_option
@format_option
def mutate(plan: str, n: int, seed: int, out: Path | None, fmt: str) -> None:
    """Run W_n on Q_n^0 or mu on the extended Toda quiver, with a step trace."""
    if plan == "W":
        run = run_W(n, _point(n, seed, "mutate"))
        data = run.to_json()
    else:
        run = run_mu(n, psi_second(_point(n + 1, seed, "mutate")))
        data = run.to_json()
    if fmt == "text":
        lines = [f"{plan} n={n} ok={run.ok}"]
        for t in data.get("trace", []):
            lines.append(f"  {t['step']:3} {t['phase']:3} {t['vertex']:>6} {t['label']:>8}  {t['predicted']:12} "
                         f"{'ok' if t['ok'] else 'MISMATCH'}")
        text = "\n".join(lines)
    else:
        text = json.dumps(data, indent=2)
    _emit(text, out)
    sys.exit(0 if run.ok else 1)


@main.command()
@n_option
@seed_option
@click.option("--trials", default=10, show_default=True, help="random matrices")
@out_option
def roundtrip(n: int, seed: int, trials: int, out: Path | None) -> None:
    """Rebuild X from U = psi'(X) and the first and last rows; count exact reconstructions."""
    rng = random.Random(f"{seed}:roundtrip:{n}")
    exact = 0
    for _ in range(trials):
        X, _ = sample_generic(rng, n)
        exact += bool((reconstruct_X(psi_prime(X), X[0], X[n - 1]).X == X).all())
    _emit(json.dumps({"n": n, "trials": trials, "exact": exact, "summary": f"{exact}/{trials} exact reconstructions"}),
          out)
    sys.exit(0 if exact == trials else 1)


if __name__ == "__main__":
    main()
