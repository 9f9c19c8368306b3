"""Command line front end.

Subcommands: ``pool``, ``divergence``, ``weights``, ``axiom-check``,
``supra`` and ``fig4``. Densities are read from grid CSV or Gaussian
JSON files; results go to files or stdout. Identical inputs and seeds
produce byte-identical outputs.

Exit codes: 0 success (including an axiom check that finds violations),
2 invalid input, 3 numerical failure, 4 non-convergence. Failures print
one JSON object with "error" and "message" on stderr.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click
import numpy as np

from . import axioms as axmod
from . import divergence as divmod_
from . import weights as wmod
from .errors import (
    BoundednessError,
    DegenerateError,
    FusionError,
    NonConvergenceError,
    RankError,
    SingularityError,
)
from .fileio import read_density_csv, read_gaussian_json, read_model_json, write_density_csv
from .gaussian import DEFAULT_POINTS_1D, Gaussian, to_grid
from .grid import GridDensity, OpinionProfile, moments
from .pooling import ChiKind, ChiTransform, PoolingKind, PoolingSpec, pool
from .supra import (
    local_statistics,
    private_shared_model,
    scalar_fusion,
    vector_fusion,
)

FLOAT_FMT = "%.17g"

_NUMERICAL = (DegenerateError, SingularityError, BoundednessError, RankError)


def _fail(code: int, exc: BaseException) -> None:
    line = json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True)
    click.echo(line, err=True)
    sys.exit(code)


def wrap_errors(fn):
    """Map library exceptions onto the documented exit codes."""

    @functools.wraps(fn)
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NonConvergenceError as exc:
            _fail(4, exc)
        except _NUMERICAL as exc:
            _fail(3, exc)
        except (FusionError, ValueError, KeyError, IndexError, OSError, json.JSONDecodeError) as exc:
            _fail(2, exc)

    return inner


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",")])
    except ValueError:
        raise ValueError(f"could not parse {text!r} as comma-separated numbers")


def _grid_points() -> int:
    return int(os.environ.get("FUSION_GRID_POINTS", DEFAULT_POINTS_1D))


def _load_density(path):
    """Grid CSV or Gaussian JSON, told apart by extension."""
    if str(path).endswith(".json"):
        return read_gaussian_json(path)
    return read_density_csv(path)


def _as_profile(inputs) -> OpinionProfile:
    """Load agent densities, evaluating Gaussians on the shared grid."""
    loaded = [_load_density(p) for p in inputs]
    grids = [d for d in loaded if isinstance(d, GridDensity)]
    if grids:
        ref = grids[0]
    else:
        ref = to_grid(loaded[0], shape=(_grid_points(),) * 1)
    members = []
    for d in loaded:
        if isinstance(d, Gaussian):
            d = to_grid(d, lower=ref.lower, upper=ref.upper, shape=ref.shape)
        members.append(d)
    return OpinionProfile(tuple(members))


def _on_grid(d, ref: GridDensity) -> GridDensity:
    if isinstance(d, Gaussian):
        return to_grid(d, lower=ref.lower, upper=ref.upper, shape=ref.shape)
    return d


def _chi_from_flags(chi: str | None, chi_alpha: float | None) -> ChiTransform | None:
    if chi is None:
        return None
    kind = ChiKind(chi)
    if kind is ChiKind.POWER:
        if chi_alpha is None:
            raise ValueError("--chi power requires --chi-alpha")
        return ChiTransform(kind, alpha=chi_alpha)
    return ChiTransform(kind)


def _build_spec(kind, weights, alpha, w0, q0, xi0, dictator, chi, chi_alpha, ref=None):
    kind = PoolingKind(kind)
    w = _parse_floats(weights) if weights else None
    q0d = None
    if q0 is not None:
        q0d = _load_density(q0)
        if ref is not None:
            q0d = _on_grid(q0d, ref)
    xi = None
    if xi0 is not None:
        xi = read_density_csv(xi0).values
    return PoolingSpec(
        kind=kind,
        weights=w,
        alpha=alpha,
        q0=q0d,
        w0=w0,
        xi0=xi,
        dictator=dictator,
        chi=_chi_from_flags(chi, chi_alpha),
    )


def _json_line(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(", ", ": "))


_POOLING_FLAGS = [
    click.option("--kind", required=True, type=click.Choice([k.value for k in PoolingKind])),
    click.option("--weights", default=None, help="comma-separated agent weights"),
    click.option("--alpha", type=float, default=None),
    click.option("--w0", type=float, default=None),
    click.option("--q0", type=click.Path(exists=True, dir_okay=False), default=None),
    click.option("--xi0", type=click.Path(exists=True, dir_okay=False), default=None),
    click.option("--dictator", type=int, default=None),
    click.option("--chi", type=click.Choice([c.value for c in ChiKind]), default=None),
    click.option("--chi-alpha", type=float, default=None),
]


def pooling_flags(fn):
    for flag in reversed(_POOLING_FLAGS):
        fn = flag(fn)
    return fn


@click.group()
def main():
    """Fuse probability densities and inspect the fused results."""


@main.command("pool")
@pooling_flags
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", required=True, type=click.Path(dir_okay=False))
@wrap_errors
def pool_cmd(kind, weights, alpha, w0, q0, xi0, dictator, chi, chi_alpha, inputs, output):
    """Fuse agent densities; writes the fused CSV and prints its moments."""
    profile = _as_profile(inputs)
    spec = _build_spec(kind, weights, alpha, w0, q0, xi0, dictator, chi, chi_alpha, ref=profile.grid)
    fused = pool(spec, profile)
    write_density_csv(output, fused)
    mean, cov = moments(fused)
    click.echo(_json_line({"mean": mean.tolist(), "cov": cov.tolist()}))


@main.command("divergence")
@click.option("--kind", required=True, type=click.Choice([k.value for k in divmod_.DivergenceKind]))
@click.option("--alpha", type=float, default=None)
@click.option("--chi", type=click.Choice([c.value for c in ChiKind]), default=None)
@click.option("--chi-alpha", type=float, default=None)
@click.argument("inputs", nargs=2, type=click.Path(exists=True, dir_okay=False))
@wrap_errors
def divergence_cmd(kind, alpha, chi, chi_alpha, inputs):
    """Divergence between two densities; prints one number."""
    spec = divmod_.DivergenceSpec(
        divmod_.DivergenceKind(kind), alpha=alpha, chi=_chi_from_flags(chi, chi_alpha)
    )
    value = divmod_.evaluate(spec, _load_density(inputs[0]), _load_density(inputs[1]))
    click.echo(FLOAT_FMT % value)


@main.command("weights")
@click.option(
    "--method",
    required=True,
    type=click.Choice(["min-kld", "discrepancy", "ci"]),
)
@click.option("--criterion", type=click.Choice([c.value for c in wmod.CICriterion]), default="trace")
@click.option("--max-iter", type=int, default=500)
@click.option("--tol", type=float, default=1e-6)
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@wrap_errors
def weights_cmd(method, criterion, max_iter, tol, inputs):
    """Select pooling weights; prints a WeightResult as JSON."""
    if method == "ci":
        gaussians = [read_gaussian_json(p) for p in inputs]
        result = wmod.ci_weights(
            gaussians, criterion=wmod.CICriterion(criterion), max_iter=max_iter, tol=tol
        )
    else:
        profile = _as_profile(inputs)
        if method == "min-kld":
            result = wmod.min_kld_weights(profile, max_iter=max_iter, tol=tol)
        else:
            vec = wmod.discrepancy_weights(profile)
            click.echo(_json_line({"weights": vec.tolist()}))
            return
    click.echo(
        _json_line(
            {
                "weights": result.weights.tolist(),
                "objective": result.objective,
                "iterations": result.iterations,
                "converged": result.converged,
                "gradient_norm": result.gradient_norm,
            }
        )
    )


@main.command("axiom-check")
@pooling_flags
@click.option("--axiom", required=True, type=click.Choice([a.value for a in axmod.Axiom]))
@click.option("--trials", type=int, default=axmod.DEFAULT_TRIALS)
@click.option("--seed", type=int, default=0)
@click.option("--tol", type=float, default=axmod.DEFAULT_TOL)
@wrap_errors
def axiom_check_cmd(kind, weights, alpha, w0, q0, xi0, dictator, chi, chi_alpha, axiom, trials, seed, tol):
    """Check one axiom against one pooling rule; prints the report as JSON.

    A completed check exits 0 whether or not violations were found; the
    verdict is the "passed" field.
    """
    spec = _build_spec(kind, weights, alpha, w0, q0, xi0, dictator, chi, chi_alpha)
    report = axmod.check_axiom(spec, axiom, trials=trials, seed=seed, tol=tol)
    payload = {
        "axiom": report.axiom.value,
        "kind": spec.kind.value,
        "trials": report.trials,
        "max_violation": report.max_violation,
        "passed": report.passed,
        "counterexample": None
        if report.counterexample is None
        else {
            "trial": report.counterexample.trial,
            "seed": report.counterexample.seed,
            "detail": report.counterexample.detail,
        },
    }
    click.echo(_json_line(payload))


def _gaussian_payload(g: Gaussian | None):
    if g is None:
        return None
    return {"mean": g.mean.tolist(), "cov": g.cov.tolist()}


@main.command("supra")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option(
    "--private-shared",
    "private_shared",
    default=None,
    help="r0,r1,...,rK noise dimension counts; shorthand for the partly shared noise model",
)
@click.option("--y", "y_text", default=None, help="comma-separated stacked observation vector")
@click.option("--scalar", "mode", flag_value="scalar", default=None)
@click.option("--vector", "mode", flag_value="vector", default=None)
@wrap_errors
def supra_cmd(model_path, private_shared, y_text, mode):
    """Fuse local estimates of a linear Gaussian model; prints JSON.

    Without observations only the fusion weights and structural matrices
    are reported; with --y the fused posterior (and, when the joint noise
    covariance is invertible, the all-data oracle) is included.
    """
    if (model_path is None) == (private_shared is None):
        raise ValueError("provide exactly one of --model or --private-shared")
    if model_path is not None:
        model = read_model_json(model_path)
    else:
        counts = [int(v) for v in _parse_floats(private_shared)]
        if len(counts) < 2:
            raise ValueError("--private-shared needs r0 plus at least one agent count")
        model = private_shared_model(len(counts) - 1, counts[0], counts[1:])
    if mode is None:
        mode = "scalar" if model.d_theta == 1 else "vector"
    if mode == "scalar" and model.d_theta != 1:
        raise ValueError("--scalar requires a one-dimensional parameter")

    y = None
    if y_text is not None:
        y = _parse_floats(y_text)
        t, _ = local_statistics(model, y)
    else:
        t = np.zeros(model.K * model.d_theta)

    if mode == "scalar":
        res = scalar_fusion(model, t, y)
        payload = {
            "mode": "scalar",
            "weights": res.scalar_weights.tolist(),
            "sigma_hat_inv": res.Sigma_hat_inv.tolist(),
            "sigma_tilde": res.Sigma_tilde.tolist(),
        }
    else:
        res = vector_fusion(model, t, y)
        payload = {
            "mode": "vector",
            "weights": [w.tolist() for w in res.vector_weights],
            "sigma_hat_inv": res.Sigma_hat_inv.tolist(),
            "sigma_tilde": res.Sigma_tilde.tolist(),
            "G": res.G.tolist(),
        }
    if y is not None:
        payload["posterior"] = _gaussian_payload(res.posterior)
        payload["oracle"] = _gaussian_payload(res.oracle)
    click.echo(_json_line(payload))


FIG4_ALPHAS = (-1.0, 0.5, 1.0, 2.0)


def _fig4_panel(path, g1: Gaussian, g2: Gaussian, lower: float, upper: float) -> None:
    from .pooling import holder_pool, log_linear_pool

    n = _grid_points()
    shape = (n,)
    q1 = to_grid(g1, [lower], [upper], shape)
    q2 = to_grid(g2, [lower], [upper], shape)
    profile = OpinionProfile((q1, q2))
    w = np.array([0.5, 0.5])
    columns = {
        "theta": q1.axes[0],
        "q1": q1.values,
        "q2": q2.values,
        "holder_alpha_-1": holder_pool(profile, w, -1.0).values,
        "log_linear": log_linear_pool(profile, w).values,
        "holder_alpha_0.5": holder_pool(profile, w, 0.5).values,
        "holder_alpha_1": holder_pool(profile, w, 1.0).values,
        "holder_alpha_2": holder_pool(profile, w, 2.0).values,
    }
    names = list(columns)
    rows = [",".join(names)]
    data = np.column_stack([columns[c] for c in names])
    for row in data:
        rows.append(",".join(FLOAT_FMT % v for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


@main.command("fig4")
@click.option("--output-dir", "-d", default=".", type=click.Path(file_okay=False))
@wrap_errors
def fig4_cmd(output_dir):
    """Write the two-panel power-mean pooling sweep as plot-ready CSV.

    Panel (a): unit-variance pdfs centered at -2.5 and 2.5. Panel (b):
    pdfs centered at 0 with variances 5 and 0.5. Both fused with equal
    weights at powers -1, 0 (geometric), 0.5, 1 and 2.
    """
    os.makedirs(output_dir, exist_ok=True)
    half_a = 8.0
    _fig4_panel(
        os.path.join(output_dir, "fig4a.csv"),
        Gaussian([-2.5], [[1.0]]),
        Gaussian([2.5], [[1.0]]),
        -2.5 - half_a,
        2.5 + half_a,
    )
    half_b = 8.0 * np.sqrt(5.0)
    _fig4_panel(
        os.path.join(output_dir, "fig4b.csv"),
        Gaussian([0.0], [[5.0]]),
        Gaussian([0.0], [[0.5]]),
        -half_b,
        half_b,
    )
    click.echo(_json_line({"written": ["fig4a.csv", "fig4b.csv"], "dir": output_dir}))


if __name__ == "__main__":
    main()
