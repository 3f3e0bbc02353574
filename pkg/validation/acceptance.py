"""
Desk-Scale Acceptance Run
-------------------------
Property and ordering checks for the simulator on the default desk instance
(params.yaml). Each step prints PASS/FAIL; the exit code is 1 if any step
failed. Runtime limits are machine dependent and reported as warnings.

    python validation/acceptance.py
"""

import filecmp
import logging
import os
import subprocess
import sys
import tempfile
import time

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from algorithm.rcpp import run, step  # noqa: E402
from algorithm.state import RngStreams, init_state  # noqa: E402
from compressors.constants import estimate_constants  # noqa: E402
from compressors.specs import (  # noqa: E402
    ComposeSpec,
    FixedLevelQuantSpec,
    IdentitySpec,
    InfNormQuantSpec,
    TopKSpec,
)
from harness.config import load_config  # noqa: E402
from harness.experiment import build_instance, run_experiment  # noqa: E402
from harness.suite import SuiteConfig, load_suite, run_suite  # noqa: E402
from metrics.records import tracking_gap  # noqa: E402
from problems.base import initial_point  # noqa: E402

PARAMS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "params.yaml")
# The nonconvex desk instance is the base of the seed sweep.
SEED_SWEEP = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "configs", "seed_sweep.yaml")

QN = InfNormQuantSpec(bits=2)
QTN = ComposeSpec(outer=InfNormQuantSpec(bits=2), inner=TopKSpec(k=5))
FIXED = FixedLevelQuantSpec(step=1.0, clamp_level=None)
LIBRARY = {
    "identity": IdentitySpec(),
    "qn": QN,
    "top5": TopKSpec(k=5),
    "fixed": FIXED,
    "fixed_clamped": FixedLevelQuantSpec(step=0.5, clamp_level=3),
    "qtn": QTN,
}

# Residuals below this are at the floating-point floor of f(x) - f*.
RESIDUAL_FLOOR = 1e-12
GRAD_FLOOR = 1e-12
DECAY_BAND = (1.5, 3.0)

# ANSI Colors
GREEN = "\033[92m"
RED = "\033[91m"
YELLOW = "\033[93m"
RESET = "\033[0m"


def log(msg, status="INFO"):
    if status == "PASS":
        print(f"{GREEN}[PASS]{RESET} {msg}")
    elif status == "FAIL":
        print(f"{RED}[FAIL]{RESET} {msg}")
    elif status == "WARN":
        print(f"{YELLOW}[WARN]{RESET} {msg}")
    else:
        print(f"[INFO] {msg}")


def desk_config(**overrides):
    return load_config(PARAMS, overrides)


def nonconvex_overrides():
    suite, _ = load_suite(SEED_SWEEP)
    return dict(suite.base_overrides)


def chains(spec):
    return {"algorithm.x_compressor": spec.model_dump(mode="json"), "algorithm.y_compressor": spec.model_dump(mode="json")}


def run_trace(config, instance):
    X0 = initial_point(instance.problem.n_agents, instance.problem.dim, config.experiment.seed)
    return run(instance.problem, instance.pair, config.algorithm, X0, config.experiment.seed, reference=instance.reference)


def check_runtime(label, elapsed, limit):
    if elapsed > limit:
        log(f"{label} took {elapsed:.1f}s (limit {limit}s on the reference machine)", "WARN")


def step_1_tracking_conservation(convex):
    log("Step 1: Gradient-tracking conservation for every compressor")
    start = time.perf_counter()
    worst = 0.0
    for name, spec in LIBRARY.items():
        config = desk_config(**chains(spec), **{"algorithm.iterations": 200})
        problem, pair = convex.problem, convex.pair
        state = init_state(problem, initial_point(problem.n_agents, problem.dim, config.experiment.seed))
        streams = RngStreams.from_seed(config.experiment.seed, problem.n_agents)
        for _ in range(200):
            state, _ = step(state, config.algorithm, pair, problem, streams)
            ratio = tracking_gap(state.Y, state.grad) / (1.0 + np.linalg.norm(state.grad))
            worst = max(worst, ratio)
            if ratio > 1e-8:
                log(f"{name}: tracking gap ratio {ratio:.3e} at k={state.k}", "FAIL")
                return False
    check_runtime("Step 1", time.perf_counter() - start, 10)
    log(f"Conservation holds for {len(LIBRARY)} compressors (worst ratio {worst:.2e})", "PASS")
    return True


def push_pull_oracle(problem, pair, lambdas, X0, iterations):
    X = X0.copy()
    G = problem.stacked_gradients(X)
    Y = G.copy()
    out = []
    for _ in range(iterations):
        X = pair.R @ (X - lambdas[:, None] * Y)
        G_next = problem.stacked_gradients(X)
        Y = pair.C @ (Y + G_next - G)
        G = G_next
        out.append((X.copy(), Y.copy()))
    return out


def step_2_push_pull(convex):
    log("Step 2: Push-pull recovery with identity compressors and unit consensus steps")
    config = desk_config(**chains(IdentitySpec()), **{"algorithm.gamma_x": 1.0, "algorithm.gamma_y": 1.0})
    problem, pair = convex.problem, convex.pair
    X0 = initial_point(problem.n_agents, problem.dim, config.experiment.seed)
    oracle = push_pull_oracle(problem, pair, config.algorithm.lambdas(problem.n_agents), X0, 200)
    state = init_state(problem, X0)
    streams = RngStreams.from_seed(config.experiment.seed, problem.n_agents)
    worst = 0.0
    for X_ref, Y_ref in oracle:
        state, _ = step(state, config.algorithm, pair, problem, streams)
        worst = max(worst, np.abs(state.X - X_ref).max(), np.abs(state.Y - Y_ref).max())
    if worst > 1e-10:
        log(f"Trajectory deviates from push-pull by {worst:.3e}", "FAIL")
        return False
    log(f"Trajectory matches push-pull over 200 iterations (max deviation {worst:.2e})", "PASS")
    return True


def step_3_linear_convergence(convex):
    log("Step 3: Linear convergence on the convex instance (Qn, decaying scaling)")
    start = time.perf_counter()
    config = desk_config(**chains(QN), **{"algorithm.iterations": 5000, "algorithm.record_every": 1})
    trace = run_trace(config, convex)
    check_runtime("Step 3", time.perf_counter() - start, 60)
    residual = np.array([r.residual for r in trace])
    hits = np.flatnonzero(residual < 1e-8)
    if hits.size == 0:
        log(f"Residual never fell below 1e-8 (final {residual[-1]:.3e})", "FAIL")
        return False

    # Fit only the part of the trace above the floating-point floor.
    floor = np.flatnonzero(residual <= RESIDUAL_FLOOR)
    end = floor[0] if floor.size else residual.size
    lo, hi = int(0.2 * end), int(0.8 * end)
    k = np.arange(lo, hi)
    y = np.log10(np.maximum(residual[lo:hi], RESIDUAL_FLOOR))
    slope, intercept = np.polyfit(k, y, 1)
    r2 = 1.0 - np.sum((y - (slope * k + intercept)) ** 2) / np.sum((y - y.mean()) ** 2)
    if r2 < 0.98:
        log(f"log10 residual fit R^2 = {r2:.4f} < 0.98", "FAIL")
        return False
    log(f"Residual < 1e-8 at k={hits[0]}; slope {slope:.3e}/iter, R^2 = {r2:.4f}", "PASS")
    return True


def nonconvex_decay(nonconvex):
    """min_{k<K} |grad f(xbar^k)|^2 at K = 500, 1000, 2000 and the best gradient norm over the full run."""
    config = desk_config(
        **nonconvex_overrides(),
        **chains(QN),
        **{"algorithm.iterations": 5000, "algorithm.record_every": 1},
    )
    trace = run_trace(config, nonconvex)
    g2 = np.array([r.grad_norm for r in trace]) ** 2
    mins = {K: float(g2[:K].min()) for K in (500, 1000, 2000)}
    return mins, float(np.sqrt(g2.min()))


def step_4_nonconvex_decay(nonconvex):
    log("Step 4: Gradient-norm decay on the nonconvex instance")
    mins, best = nonconvex_decay(nonconvex)
    log(f"min |grad|^2 at K=500/1000/2000: {mins[500]:.3e} / {mins[1000]:.3e} / {mins[2000]:.3e}")
    ok = True
    if best >= 1e-4:
        log(f"Gradient norm stays above 1e-4 (best {best:.3e})", "FAIL")
        ok = False
    else:
        log(f"Gradient norm reaches {best:.3e} by K=5000", "PASS")
    if mins[2000] <= GRAD_FLOOR ** 2:
        log(f"Gradient norm is below the {GRAD_FLOOR:g} floor by K=2000, decay per doubling is not measurable", "FAIL")
        return False
    ratios = [mins[500] / mins[1000], mins[1000] / mins[2000]]
    if not all(DECAY_BAND[0] <= r <= DECAY_BAND[1] for r in ratios):
        log(f"Decay per doubling {ratios[0]:.2f}, {ratios[1]:.2f} is outside [{DECAY_BAND[0]}, {DECAY_BAND[1]}]", "FAIL")
        return False
    if ok:
        log(f"Decay per doubling {ratios[0]:.2f}, {ratios[1]:.2f} is within [{DECAY_BAND[0]}, {DECAY_BAND[1]}]", "PASS")
    return ok


def step_5_scaling_ablation(convex):
    log("Step 5: Fixed-level quantizer, constant vs decaying scaling")
    base = {**chains(FIXED), "algorithm.iterations": 3000, "algorithm.record_every": 100}
    decaying = run_trace(desk_config(**base), convex)[-1].residual
    constant = run_trace(
        desk_config(**base, **{"algorithm.schedule": {"a0": 1.0, "a": 1.0, "constant_ablation": True}}), convex
    )[-1].residual
    ratio = constant / max(decaying, np.finfo(float).tiny)
    if ratio < 100:
        log(f"Constant scaling residual {constant:.3e} is only {ratio:.1f}x the decaying {decaying:.3e}", "FAIL")
        return False
    log(f"Constant scaling plateaus at {constant:.3e}, {ratio:.2e}x the decaying run ({decaying:.3e})", "PASS")
    return True


def step_6_contract_constants():
    log("Step 6: Compression-contract diagnostics")
    dim, r, samples, scale = 50, 1.0, 8000, 10.0
    topk = estimate_constants(TopKSpec(k=5), dim, r, samples, scale, np.random.default_rng(1))
    ident = estimate_constants(IdentitySpec(), dim, r, samples, scale, np.random.default_rng(2))
    fixed = estimate_constants(FIXED, dim, r, samples, scale, np.random.default_rng(3))
    ok = True
    if topk.delta_hat < 0.1 - 3 * topk.delta_stderr:
        log(f"Top-5 delta_hat {topk.delta_hat:.4f} below 0.1 - 3*stderr", "FAIL")
        ok = False
    if ident.C_hat > 1e-6 or ident.sigma2_hat > 1e-6:
        log(f"Identity constants C={ident.C_hat:.2e}, sigma2={ident.sigma2_hat:.2e} are not ~0", "FAIL")
        ok = False
    if fixed.sigma2_hat > dim / 4:
        log(f"Fixed-level sigma2_hat {fixed.sigma2_hat:.3f} exceeds dim/4 = {dim / 4}", "FAIL")
        ok = False
    if ok:
        log(
            f"top5 delta={topk.delta_hat:.4f}, identity C={ident.C_hat:.1e}, fixed sigma2={fixed.sigma2_hat:.3f}",
            "PASS",
        )
    return ok


def step_7_bits_ordering(convex):
    log("Step 7: Bits to reach residual 1e-6: QTn < Qn < Identity")
    bits = {}
    for name, spec in (("qtn", QTN), ("qn", QN), ("identity", IdentitySpec())):
        trace = run_trace(desk_config(**chains(spec), **{"algorithm.iterations": 5000, "algorithm.record_every": 1}), convex)
        reached = [rec.cumulative_bits for rec in trace if rec.residual <= 1e-6]
        if not reached:
            log(f"{name} never reached residual 1e-6", "FAIL")
            return False
        bits[name] = reached[0]
    log(f"Bits: qtn={bits['qtn']}, qn={bits['qn']}, identity={bits['identity']}")
    if not bits["qtn"] < bits["qn"] < bits["identity"]:
        log("Communication-efficiency ordering violated", "FAIL")
        return False
    log("QTn < Qn < Identity", "PASS")
    return True


def step_8_oracles():
    log("Step 8: Oracle equivalence tests")
    root = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
    result = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-k", "oracle", "tests"],
        cwd=root, stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True,
    )
    if result.returncode != 0:
        log(f"Oracle tests failed:\n{result.stdout}", "FAIL")
        return False
    log("Finite-difference, loop, re-transcription and single-agent oracles agree", "PASS")
    return True


def step_9_determinism():
    log("Step 9: Byte-identical reruns at any worker count")
    config = desk_config(**{"algorithm.iterations": 200, "experiment.svg": False})
    with tempfile.TemporaryDirectory() as tmp:
        a = run_experiment(config, out_dir=os.path.join(tmp, "a"))
        b = run_experiment(config, out_dir=os.path.join(tmp, "b"))
        if not filecmp.cmp(a.csv_path, b.csv_path, shallow=False):
            log("Re-run with the same seed produced a different CSV", "FAIL")
            return False
        suite = SuiteConfig(
            name="determinism",
            base=PARAMS,
            members=[
                {"name": "qn", "overrides": {}},
                {"name": "qtn", "overrides": chains(QTN)},
            ],
            svg=False,
        )
        _, serial = run_suite(suite, config, out_dir=os.path.join(tmp, "serial"), n_jobs=1)
        _, parallel = run_suite(suite, config, out_dir=os.path.join(tmp, "parallel"), n_jobs=2)
        for s, p in zip(serial, parallel):
            if not filecmp.cmp(s.csv_path, p.csv_path, shallow=False):
                log(f"{s.name}: CSV differs between 1 and 2 workers", "FAIL")
                return False
        if not filecmp.cmp(
            os.path.join(tmp, "serial", "comparison.csv"), os.path.join(tmp, "parallel", "comparison.csv"), shallow=False
        ):
            log("comparison.csv differs between 1 and 2 workers", "FAIL")
            return False
    log("Re-runs and worker counts give byte-identical CSVs", "PASS")
    return True


def main():
    logging.basicConfig(
        level=logging.WARNING,
        format="%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        handlers=[logging.StreamHandler()],
    )
    print("\n" + "=" * 50)
    print("   DESK-SCALE ACCEPTANCE")
    print("=" * 50)

    convex = build_instance(desk_config())
    nonconvex = build_instance(desk_config(**nonconvex_overrides()))
    steps = [
        lambda: step_1_tracking_conservation(convex),
        lambda: step_2_push_pull(convex),
        lambda: step_3_linear_convergence(convex),
        lambda: step_4_nonconvex_decay(nonconvex),
        lambda: step_5_scaling_ablation(convex),
        step_6_contract_constants,
        lambda: step_7_bits_ordering(convex),
        step_8_oracles,
        step_9_determinism,
    ]
    failed = 0
    for check in steps:
        if not check():
            failed += 1

    print("\n" + "=" * 50)
    if failed:
        print(f"{RED}ACCEPTANCE FAILED ({failed} of {len(steps)} steps){RESET}")
    else:
        print(f"{GREEN}ACCEPTANCE PASSED{RESET}")
    print("=" * 50 + "\n")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
