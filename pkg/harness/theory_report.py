"""
Theory Report
-------------
Evaluates the step-size region and linear rate for a configured experiment.
The norm and compression constants come from the config's ``theory``
section; nothing is defaulted. ``suggest`` adds heuristic norm constants
computed from the mixing matrices, reported separately and never fed into
the bounds.
"""

import logging
import math

import numpy as np

from algorithm.theory import TheoryInputs, absolute_error_term, compute_M, theory_bounds
from graph.spectral import suggest_norm_constants
from harness.config import ExperimentConfig
from harness.experiment import build_instance

logger = logging.getLogger(__name__)

REQUIRED = ("theta_R", "theta_C", "delta_R2", "delta_C2", "C", "delta")
NOISE = ("sigma2", "sigma2_r")


def missing_constants(config: ExperimentConfig) -> list[str]:
    theory = config.theory
    return [name for name in REQUIRED if theory is None or getattr(theory, name) is None]


def _fmt(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float) and math.isnan(value):
        return "n/a"
    return f"{value:.6g}"


def theory_report(config: ExperimentConfig, suggest: bool = False) -> tuple[int, str]:
    """(status, report text); status is 1 when required constants are missing."""
    instance = build_instance(config, with_reference=False)
    problem, pair, params = instance.problem, instance.pair, config.algorithm
    lambdas = params.lambdas(pair.n)
    lines = [f"Theory report: {config.experiment.name}", "=" * 40]

    if suggest:
        s = suggest_norm_constants(pair, params.gamma_x, params.gamma_y)
        lines += [
            "Suggested norm constants (heuristic, not used below):",
            f"  theta_R  = {_fmt(s.theta_R)}   (spectral radius {_fmt(s.rho_R)})",
            f"  theta_C  = {_fmt(s.theta_C)}   (spectral radius {_fmt(s.rho_C)})",
            f"  delta_R2 = {_fmt(s.delta_R2)}",
            f"  delta_C2 = {_fmt(s.delta_C2)}",
            "",
        ]

    missing = missing_constants(config)
    if missing:
        lines.append(
            "Missing theory constants: " + ", ".join(missing)
            + ". Set them under 'theory:' in the config (or with --set theory.<name>=<value>); no defaults are assumed."
        )
        return 1, "\n".join(lines)

    th = config.theory
    inputs = TheoryInputs(
        L=problem.lipschitz_bound(),
        theta_R=th.theta_R,
        theta_C=th.theta_C,
        delta_R2=th.delta_R2,
        delta_C2=th.delta_C2,
        C=th.C,
        delta=th.delta,
        r=params.r,
        sigma2=th.sigma2 or 0.0,
        sigma2_r=th.sigma2_r or 0.0,
        alpha_x=params.alpha_x,
        alpha_y=params.alpha_y,
        gamma_x=params.gamma_x,
        gamma_y=params.gamma_y,
        M=compute_M(pair, lambdas),
        norm_u_R=float(np.linalg.norm(pair.u_R)),
        norm_u_C=float(np.linalg.norm(pair.u_C)),
        n=pair.n,
        mu=problem.strong_convexity(),
        lambda_hat=float(lambdas.max()),
    )
    b = theory_bounds(inputs)
    lines += [
        f"L = {_fmt(inputs.L)}   mu = {_fmt(inputs.mu)}   M = {_fmt(inputs.M)}",
        f"|u_R| = {_fmt(inputs.norm_u_R)}   |u_C| = {_fmt(inputs.norm_u_C)}",
        "",
        f"{'parameter':<12}{'configured':>14}{'bound':>14}",
        f"{'lambda_hat':<12}{_fmt(inputs.lambda_hat):>14}{_fmt(b.lambda_hat_max):>14}",
        f"{'gamma_x':<12}{_fmt(inputs.gamma_x):>14}{_fmt(b.gamma_x_max):>14}",
        f"{'gamma_y':<12}{_fmt(inputs.gamma_y):>14}{_fmt(b.gamma_y_max):>14}",
        f"Inside guaranteed region: {_fmt(b.inside_region)}",
        "",
        "Constants: " + ", ".join(f"{k}={_fmt(getattr(b, k))}" for k in ("e1", "e2", "e3", "e4", "e5", "A", "B", "D", "E", "beta")),
    ]
    if inputs.mu:
        lines.append(f"Linear rate rho_tilde at configured lambda_hat: {_fmt(b.rho_tilde)}")
    else:
        lines.append("Linear rate: n/a (no strong convexity constant for this problem)")

    schedule = params.schedule
    noise_missing = [name for name in NOISE if getattr(th, name) is None]
    if schedule.a < 1 and params.iterations > 0 and not noise_missing:
        term = absolute_error_term(inputs, b, schedule.a0, schedule.a, params.iterations)
        lines.append(f"Absolute-error term after K={params.iterations}: {_fmt(term)}")
    elif noise_missing:
        lines.append("Absolute-error term: not computed (" + ", ".join(noise_missing) + " missing)")
    else:
        lines.append("Absolute-error term: not defined for a constant schedule")

    if not b.inside_region:
        logger.warning("Configured step-sizes lie outside the guaranteed region")
    return 0, "\n".join(lines)


def print_theory(config: ExperimentConfig, suggest: bool = False) -> int:
    """Print the theory report to stdout and return its status."""
    status, report = theory_report(config, suggest=suggest)
    print(report)
    return status
