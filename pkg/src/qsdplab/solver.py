"""The two multiplicative-weights solving frameworks and their top level.

``arora_kale_solve`` answers the threshold question "OPT <= g + eps or
OPT > g" and, when the loop completes, emits a verified dual vector.
``primal_oracle_solve`` searches for violated constraints on the
slack-extended problem and emits a verified primal pair (y', z) on a clean
pass.  ``sdp_solve`` wraps both in a bisection over the guess value.

The inner loops run jitted (see _fastloop); a step-identical pure-Python
loop is kept for parity tests and trace capture.  Trace estimates reach the
oracle with error bars of half the resolution: the k-fold averaged estimator
is emulated by its normal limit clipped at that cap, so the bars hold on
every draw and the polytope's relaxation absorbs them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _fastloop as fast
from .errors import ContractViolation, SeedExhaustion
from .instance import SdpInstance
from .ledger import (
    QueryLedger,
    cost_gibbs_decomposition,
    cost_gibbs_operator,
    cost_solve_total,
    cost_solver_iterations,
    cost_trace_estimator,
    cost_trace_mean_k,
)
from .linalg import gibbs_state, min_eigenvalue
from .search import two_phase_min_find_sim
from .vecstore import SparseVectorTree, solver_grid

SIGMA = 6.0
VERIFY_TOL = 1e-7

MODELS = ("sparse", "state", "operator", "hamiltonian")


def state_norm_bound(instance: SdpInstance) -> float:
    """B = max_j (trace of positive part + trace of negative part)."""
    B = 1.0
    for j in range(instance.m + 1):
        w = np.linalg.eigvalsh(instance.constraint(j))
        B = max(B, float(np.abs(w).sum()))
    return B


@dataclass(frozen=True)
class ModelParams:
    model: str
    alpha: float            # operator normalization driving T_tr
    B: float                # state-model normalization bound
    tau: float              # evolution-model time-scale bound

    @classmethod
    def for_instance(cls, instance: SdpInstance, model: str, tau: float = 2.0):
        if model not in MODELS:
            raise ContractViolation(f"unknown input model {model!r}")
        if model == "sparse":
            alpha = float(instance.s)
        elif model == "operator":
            alpha = 1.0
        elif model == "hamiltonian":
            alpha = 2.0 * tau
        else:
            alpha = state_norm_bound(instance)
        return cls(model=model, alpha=alpha, B=state_norm_bound(instance)
                   if model == "state" else 1.0, tau=tau)

    def t_tr(self) -> int:
        return cost_trace_estimator(self.alpha if self.model != "state" else self.B)

    def t_gibbs(self, gamma: float, n: int) -> int:
        if self.model == "state":
            return cost_gibbs_decomposition(self.B, gamma)
        return cost_gibbs_operator(self.alpha, gamma, n)


@dataclass(frozen=True)
class SolverConfig:
    """Derived scalars of one framework run."""

    epsilon: float
    failure: float
    guess: float
    framework: str          # "full" or "primal"
    gamma: float
    theta: float
    iterations: int
    k: int
    noise_cap: float
    nu: float

    @classmethod
    def full(cls, instance: SdpInstance, epsilon: float, guess: float,
             zeta: float = 1e-2) -> "SolverConfig":
        if not 0 < epsilon <= 1:
            raise ContractViolation("epsilon must lie in (0, 1]")
        gamma = 6.0 * instance.R * instance.r / epsilon
        theta = 1.0 / gamma
        T = cost_solver_iterations(instance.n, theta)
        return cls(
            epsilon=epsilon, failure=zeta, guess=guess, framework="full",
            gamma=gamma, theta=theta, iterations=T,
            k=cost_trace_mean_k(gamma, SIGMA), noise_cap=0.5 / gamma,
            nu=zeta / (2.0 * T),
        )

    @classmethod
    def primal(cls, instance: SdpInstance, epsilon: float, guess: float,
               zeta: float = 1e-2) -> "SolverConfig":
        if not 0 < epsilon <= 1:
            raise ContractViolation("epsilon must lie in (0, 1]")
        gamma = 6.0 * instance.R / epsilon
        theta = epsilon / (2.0 * instance.R)
        T = cost_solver_iterations(instance.n + 1, theta)
        return cls(
            epsilon=epsilon, failure=zeta, guess=guess, framework="primal",
            gamma=gamma, theta=theta, iterations=T,
            k=cost_trace_mean_k(gamma, SIGMA), noise_cap=0.5 / gamma,
            nu=zeta / (2.0 * T),
        )


@dataclass
class FrameworkOutcome:
    verdict: str                      # "leq" | "gt" | "feasible" | "infeasible"
    guess: float
    iterations_run: int
    y: np.ndarray                     # accumulated weights, index 0 first
    dual: np.ndarray | None = None    # length-m dual vector (full framework)
    z: float | None = None            # primal scale (primal framework)
    report: dict | None = None
    retries: int = 0
    trace: list | None = None


# ---------------------------------------------------------------------------
# The per-iteration search (reference implementation of the polytope step)
# ---------------------------------------------------------------------------

def theta_oracle(
    traces,
    b_ext,
    r_dual: float,
    delta: float,
    error_bars: float = 0.0,
    ledger: QueryLedger | None = None,
    nu: float = 1e-2,
    budget_guard: float = 0.0,
):
    """Sparse completion (1/(2r)) e_0 + sum c_j e_j of the relaxed polytope.

    ``traces`` are estimates of Tr(A_j rho) for j = 0..m accurate to half the
    relaxation; ``b_ext`` carries b_0 = -g.  Single-index completions solve
    two half-line constraints in c; if none is feasible, index pairs are
    searched through the vertices of their two-variable region, so the
    output touches at most two indices beyond the objective slot.  The
    smallest feasible index, then the smallest feasible c, wins (selection
    run through minimum finding for the charge).  Returns a list of
    (index, weight) updates, or None only when no completion reaches the
    zero-margin polytope.
    """
    tr = np.asarray(traces, dtype=np.float64)
    b = np.asarray(b_ext, dtype=np.float64)
    bar = float(np.max(np.abs(error_bars)))
    if bar > delta / 2.0 + 1e-12:
        raise ContractViolation(
            f"estimate error bars {bar:.3e} exceed half the relaxation {delta / 2:.3e}"
        )
    g = -b[0]
    cmax = 1.0 - 1.0 / (2.0 * r_dual)
    e0 = tr[0] / (2.0 * r_dual)
    # the half-relaxation decision threshold: accepted completions lie in the
    # delta-relaxed polytope, and rejecting everything certifies emptiness at
    # zero margin, as long as the bars stay within delta/2
    q0 = -delta / 2.0 - e0
    gb = g / (2.0 * r_dual) - budget_guard
    scores = np.full(tr.size, float(tr.size + 1))
    cvals = np.zeros(tr.size)
    for j in range(1, tr.size):
        lo, hi = _interval(tr[j], b[j], q0, gb, cmax)
        if lo <= hi:
            scores[j] = float(j)
            cvals[j] = lo
    feasible = scores < tr.size
    if feasible.any():
        if ledger is not None:
            best = two_phase_min_find_sim(
                scores, np.zeros_like(scores), delta=0.5, M=float(tr.size + 2),
                nu_prime=nu, ledger=ledger,
            )
        else:
            best = int(np.flatnonzero(feasible)[0])
        return [(int(best), float(cvals[best]))]
    pair = _pair_completion(tr, b, q0, gb, cmax)
    if pair is not None and ledger is not None:
        ledger.charge_formula(
            "two_phase_minfind_samples", "gibbs-prep", m=tr.size,
            M=float(tr.size + 2), delta=0.5, nu=nu,
        )
    return pair


def _pair_completion(tr, b, q0, gb, cmax):
    """First index pair whose two-variable region reaches the trace target."""
    m = tr.size
    for j in range(1, m):
        for k in range(j + 1, m):
            ok, cj, ck = _pair_vertex_max(tr[j], tr[k], b[j], b[k], q0, gb, cmax)
            if ok:
                return [(j, cj), (k, ck)]
    return None


def _pair_vertex_max(tj, tk, bj, bk, q0, gb, cmax):
    candidates = [(0.0, 0.0), (0.0, cmax), (cmax, 0.0)]
    if abs(bk) > 1e-300:
        candidates.append((0.0, gb / bk))
    if abs(bj) > 1e-300:
        candidates.append((gb / bj, 0.0))
    if abs(bj - bk) > 1e-300:
        cj = (gb - bk * cmax) / (bj - bk)
        candidates.append((cj, cmax - cj))
    best, bcj, bck = -np.inf, -1.0, -1.0
    for cj, ck in candidates:
        if cj < -1e-12 or ck < -1e-12:
            continue
        cj, ck = max(cj, 0.0), max(ck, 0.0)
        if cj + ck > cmax + 1e-12 or bj * cj + bk * ck > gb + 1e-12:
            continue
        val = tj * cj + tk * ck
        if val > best:
            best, bcj, bck = val, cj, ck
    if best >= q0 and bcj >= 0.0:
        return True, bcj, bck
    return False, 0.0, 0.0


def _interval(est_j, b_j, q0, gb, cmax):
    lo, hi = 0.0, cmax
    if est_j > 1e-300:
        lo = max(lo, q0 / est_j)
    elif est_j < -1e-300:
        if q0 <= 0.0:
            hi = min(hi, q0 / est_j)
        else:
            hi = -1.0
    elif q0 > 0.0:
        hi = -1.0
    if b_j > 1e-300:
        hi = min(hi, gb / b_j)
    elif b_j < -1e-300:
        lo = max(lo, gb / b_j)
    elif gb < 0.0:
        hi = -1.0
    return lo, hi


def _python_ak_loop(ext_A, ext_b, g, r_dual, guard, theta, T, tree, k, cap,
                    rng, capture=False):
    """Step-identical reference for the jitted kernel (noise off when cap=0)."""
    mrows = ext_A.shape[0]
    n = ext_A.shape[1]
    H = np.zeros((n, n), dtype=np.complex128)
    grid = tree.grid
    units0 = int(round(theta / (2.0 * r_dual) / grid))
    trace = []
    for it in range(T):
        w, V = np.linalg.eigh(H)
        ew = np.exp(-(w - w.min()))
        ew /= ew.sum()
        rho = (V * ew) @ V.conj().T
        tr = np.array([float(np.trace(ext_A[j] @ rho).real) for j in range(mrows)])
        est = tr + np.clip(rng.normal(size=mrows) * _noise_std(tr, k), -cap, cap)
        picks = theta_oracle(est, ext_b, r_dual, theta, budget_guard=guard)
        if picks is None:
            return fast.STATUS_EARLY, it, trace
        tree.add([(0, units0 * grid)])
        H = H + (units0 * grid) * ext_A[0]
        for j, c in picks:
            unitsj = int(round(theta * c / grid))
            if unitsj:
                tree.add([(j, unitsj * grid)])
                H = H + (unitsj * grid) * ext_A[j]
        if capture:
            trace.append({"iteration": it, "picks": [(j, c) for j, c in picks],
                          "traces": tr.tolist()})
    return fast.STATUS_FULL, T, trace


def _python_primal_loop(ext_A, ext_b, theta, T, tree, k, cap, rng, capture=False):
    mrows = ext_A.shape[0]
    n = ext_A.shape[1]
    H = np.zeros((n, n), dtype=np.complex128)
    grid = tree.grid
    units = int(round(theta / grid))
    trace = []
    for it in range(T):
        w, V = np.linalg.eigh(H)
        ew = np.exp(-(w - w.min()))
        ew /= ew.sum()
        rho = (V * ew) @ V.conj().T
        violated = -1
        for j in range(mrows):
            tr = float(np.trace(ext_A[j] @ rho).real)
            z = np.clip(rng.normal() * _noise_std(np.array([tr]), k)[0], -cap, cap)
            if tr + z >= ext_b[j] + theta / 2.0:
                violated = j
                break
        if violated < 0:
            return fast.STATUS_EARLY, it, 1.0 - float(rho[n - 1, n - 1].real), trace
        tree.add([(violated, units * grid)])
        H = H + (units * grid) * ext_A[violated]
        if capture:
            trace.append({"iteration": it, "index": violated})
    return fast.STATUS_FULL, T, 0.0, trace


def _noise_std(tr, k):
    p = np.clip(0.125 + tr / 16.0, 0.0, 1.0)
    return 16.0 * np.sqrt(p * (1.0 - p) / k)


# ---------------------------------------------------------------------------
# Framework drivers
# ---------------------------------------------------------------------------

def _charge_framework(ledger, params: ModelParams, config: SolverConfig,
                      m: int, n: int, executed: int) -> None:
    t_tr = params.t_tr()
    t_gibbs = params.t_gibbs(config.gamma, n)
    parts = cost_solve_total(
        m=m, iterations=executed, k=config.k, t_tr=t_tr, t_gibbs=t_gibbs,
        nu=config.nu,
    )
    ledger.charge("gibbs-prep", parts["gibbs_preps"])
    ledger.charge("trace-est", parts["estimator_calls"])
    ledger.record_event(
        "solve_total", "gibbs-prep",
        dict(m=m, iterations=executed, k=config.k, t_tr=t_tr,
             t_gibbs=t_gibbs, nu=config.nu),
        parts["queries"],
    )


def arora_kale_solve(
    instance: SdpInstance,
    config: SolverConfig,
    model: str = "sparse",
    seed: int = 0,
    ledger: QueryLedger | None = None,
    tau: float = 2.0,
    use_python: bool = False,
    capture_trace: bool = False,
) -> FrameworkOutcome:
    """Threshold solve at the configured guess; dual emitted on completion."""
    if config.framework != "full":
        raise ContractViolation("configuration is not for the full framework")
    params = ModelParams.for_instance(instance, model, tau=tau)
    g = config.guess
    ext_A, ext_b = instance.extended(g)
    n, m = instance.n, instance.m
    T = config.iterations
    grid = solver_grid(config.gamma, T)
    tree = SparseVectorTree(capacity=m + 1, grid=grid)
    state_mode = 1 if model == "state" else 0
    trace = None
    retries = 0
    # weight updates are rounded in y-units (theta * c), so the budget guard
    # must cover grid/theta per touched index
    guard = 2.0 * (grid / config.theta) * float(np.abs(ext_b).max() + 1.0)
    if use_python:
        rng = np.random.default_rng(seed)
        status, iters, trace = _python_ak_loop(
            ext_A, ext_b, g, instance.r, guard, config.theta, T, tree,
            float(config.k), config.noise_cap, rng, capture=capture_trace,
        )
    elif instance.is_diagonal:
        Ad = np.ascontiguousarray(np.real(np.diagonal(ext_A, axis1=1, axis2=2)))
        status, iters, retries = fast.ak_loop_diag(
            Ad, ext_b, g, instance.r, guard, config.theta, np.int64(T),
            tree.heap, tree._size, grid, float(config.k), config.noise_cap,
            state_mode, params.B, np.int64(seed),
        )
    else:
        status, iters, retries = fast.ak_loop_dense(
            ext_A, ext_b, g, instance.r, guard, config.theta, np.int64(T),
            tree.heap, tree._size, grid, float(config.k), config.noise_cap,
            state_mode, params.B, np.int64(seed),
        )
    if status == fast.STATUS_SEED_EXHAUSTED:
        raise SeedExhaustion(f"difference-sampler seeds exhausted at iteration {iters}")
    executed = T if status == fast.STATUS_FULL else iters + 1
    if ledger is not None:
        _charge_framework(ledger, params, config, m, n, executed)
    y = tree.to_array()
    if status == fast.STATUS_EARLY:
        return FrameworkOutcome(verdict="gt", guess=g, iterations_run=executed,
                                y=y, retries=retries, trace=trace)
    dual = (2.0 * instance.r / (config.theta * T)) * y[1:]
    dual[0] += config.epsilon / instance.R
    report = verify_dual(dual, instance, g, config.epsilon)
    if not report["pass"]:
        raise ContractViolation(f"dual certificate failed verification: {report}")
    return FrameworkOutcome(verdict="leq", guess=g, iterations_run=executed,
                            y=y, dual=dual, report=report, retries=retries,
                            trace=trace)


def _reduced_stack(instance: SdpInstance, g: float):
    """Slack-extended constraint stack with bounds scaled down by R."""
    n, m = instance.n, instance.m
    R = instance.R
    ext = np.zeros((m + 1, n + 1, n + 1), dtype=np.complex128)
    for j in range(m + 1):
        ext[j, :n, :n] = instance.constraint(j)
    b = np.concatenate([[-g / R], instance.b / R])
    return ext, b


def primal_oracle_solve(
    instance: SdpInstance,
    config: SolverConfig,
    model: str = "sparse",
    seed: int = 0,
    ledger: QueryLedger | None = None,
    tau: float = 2.0,
    use_python: bool = False,
    capture_trace: bool = False,
) -> FrameworkOutcome:
    """Search for violated constraints; primal pair (y', z) on a clean pass."""
    if config.framework != "primal":
        raise ContractViolation("configuration is not for the primal framework")
    params = ModelParams.for_instance(instance, model, tau=tau)
    g = config.guess
    ext_A, ext_b = _reduced_stack(instance, g)
    n, m = instance.n, instance.m
    T = config.iterations
    grid = solver_grid(config.gamma, T)
    tree = SparseVectorTree(capacity=m + 1, grid=grid)
    state_mode = 1 if model == "state" else 0
    trace = None
    retries = 0
    if use_python:
        rng = np.random.default_rng(seed)
        status, iters, ratio, trace = _python_primal_loop(
            ext_A, ext_b, config.theta, T, tree, float(config.k),
            config.noise_cap, rng, capture=capture_trace,
        )
    elif instance.is_diagonal:
        Ad = np.ascontiguousarray(np.real(np.diagonal(ext_A, axis1=1, axis2=2)))
        status, iters, ratio, retries = fast.primal_loop_diag(
            Ad, ext_b, config.theta, np.int64(T), tree.heap, tree._size, grid,
            float(config.k), config.noise_cap, state_mode, params.B,
            np.int64(seed),
        )
    else:
        status, iters, ratio, retries = fast.primal_loop_dense(
            ext_A, ext_b, config.theta, np.int64(T), tree.heap, tree._size, grid,
            float(config.k), config.noise_cap, state_mode, params.B,
            np.int64(seed),
        )
    if status == fast.STATUS_SEED_EXHAUSTED:
        raise SeedExhaustion(f"difference-sampler seeds exhausted at iteration {iters}")
    executed = (iters + 1) if status == fast.STATUS_EARLY else T
    if ledger is not None:
        _charge_framework(ledger, params, config, m, n, executed)
    y = tree.to_array()
    if status == fast.STATUS_FULL:
        return FrameworkOutcome(verdict="infeasible", guess=g,
                                iterations_run=executed, y=y, retries=retries,
                                trace=trace)
    z = instance.R * float(ratio)
    report = verify_primal(y, z, instance, g, config.epsilon)
    if not report["pass"]:
        raise ContractViolation(f"primal certificate failed verification: {report}")
    return FrameworkOutcome(verdict="feasible", guess=g, iterations_run=executed,
                            y=y, z=z, report=report, retries=retries, trace=trace)


# ---------------------------------------------------------------------------
# Certificate verification
# ---------------------------------------------------------------------------

def verify_dual(dual, instance: SdpInstance, g: float, eps: float) -> dict:
    """Check nonnegativity, the shifted psd condition and the value bound."""
    d = np.asarray(dual, dtype=np.float64)
    conditions = {}
    conditions["nonnegative"] = {"margin": float(d.min()), "pass": bool(d.min() >= -VERIFY_TOL)}
    S = -instance.C.astype(np.complex128)
    for dj, Aj in zip(d, instance.A):
        S = S + dj * Aj
    lam = min_eigenvalue(S)
    conditions["psd_shift"] = {
        "margin": float(lam + eps), "pass": bool(lam >= -eps - VERIFY_TOL),
    }
    value = float(d @ instance.b)
    conditions["objective"] = {
        "value": value, "bound": g + eps,
        "pass": bool(value <= g + eps + VERIFY_TOL),
    }
    return {"pass": all(c["pass"] for c in conditions.values()),
            "conditions": conditions}


def primal_certificate_state(y_prime, instance: SdpInstance) -> np.ndarray:
    """The normalized certificate state exp(-sum_j y'_j A_j + y'_0 C)/Tr."""
    y = np.asarray(y_prime, dtype=np.float64)
    H = -y[0] * instance.C.astype(np.complex128)
    for j in range(1, y.size):
        if y[j] != 0.0:
            H = H + y[j] * instance.A[j - 1]
    return gibbs_state(H).mat


def verify_primal(y_prime, z, instance: SdpInstance, g: float, eps: float) -> dict:
    """Check every scaled-constraint bound and the objective floor."""
    rho = primal_certificate_state(y_prime, instance)
    X = float(z) * rho
    conditions = {"scale_nonneg": {"value": float(z), "pass": bool(z >= -VERIFY_TOL)}}
    worst = np.inf
    worst_j = 0
    for j in range(1, instance.m + 1):
        margin = instance.b[j - 1] + eps - float(np.trace(instance.A[j - 1] @ X).real)
        if margin < worst:
            worst, worst_j = margin, j
    conditions["constraints"] = {
        "worst_margin": float(worst), "worst_index": worst_j,
        "pass": bool(worst >= -VERIFY_TOL),
    }
    value = float(np.trace(instance.C @ X).real)
    conditions["objective"] = {
        "value": value, "floor": g - eps,
        "pass": bool(value >= g - eps - VERIFY_TOL),
    }
    return {"pass": all(c["pass"] for c in conditions.values()),
            "conditions": conditions}


# ---------------------------------------------------------------------------
# Top level: bisection plus both certificates
# ---------------------------------------------------------------------------

@dataclass
class SolveOutcome:
    opt_estimate: float
    dual: np.ndarray
    dual_guess: float
    dual_report: dict
    primal_y: np.ndarray
    primal_z: float
    primal_guess: float
    primal_report: dict
    calls: int
    iterations_total: int
    ledger: QueryLedger
    model: str
    epsilon: float
    call_log: list | None = None

    def summary(self) -> dict:
        return {
            "opt_estimate": self.opt_estimate,
            "epsilon": self.epsilon,
            "model": self.model,
            "dual_guess": self.dual_guess,
            "dual_pass": self.dual_report["pass"],
            "primal_guess": self.primal_guess,
            "primal_z": self.primal_z,
            "primal_pass": self.primal_report["pass"],
            "framework_calls": self.calls,
            "iterations_total": self.iterations_total,
            "ledger_total": self.ledger.total(),
            "ledger_audit": self.ledger.audit(),
        }


def sdp_solve(
    instance: SdpInstance,
    epsilon: float,
    zeta: float = 0.05,
    model: str = "sparse",
    seed: int = 0,
    tau: float = 2.0,
    ledger: QueryLedger | None = None,
) -> SolveOutcome:
    """Estimate the optimum by bisection and emit both certificates.

    The threshold solver answers each bisection query; the final interval
    (lo, lo + 2*eps] brackets the optimum so lo + eps is an eps-accurate
    estimate.  The dual certificate comes from a completing run at the upper
    end; the primal pair is produced at lo - 2*eps, comfortably inside the
    feasible range so the clean pass is reachable.
    """
    ledger = ledger if ledger is not None else QueryLedger()
    R = instance.R
    planned = math.ceil(math.log2(max(2 * R / epsilon, 2.0))) + 2
    zeta_call = zeta / planned
    lo, hi = -R - epsilon, float(R)
    calls = 0
    iterations_total = 0
    call_log: list = []
    dual_outcome: FrameworkOutcome | None = None
    while hi - lo > epsilon:
        g = (lo + hi) / 2.0
        cfg = SolverConfig.full(instance, epsilon, guess=g, zeta=zeta_call)
        out = arora_kale_solve(instance, cfg, model=model, seed=seed + calls,
                               ledger=ledger, tau=tau)
        calls += 1
        iterations_total += out.iterations_run
        call_log.append({"call": calls, "framework": "full", "guess": g,
                         "verdict": out.verdict,
                         "iterations": out.iterations_run})
        if out.verdict == "gt":
            lo = g
        else:
            hi = g
            dual_outcome = out
    # the optimum always lies in [-R, R], so clamping tightens the estimate
    estimate = min(max(lo + epsilon, -R), R)
    if dual_outcome is None or abs(dual_outcome.guess - hi) > 1e-12:
        for g_dual in (hi, hi + epsilon):
            cfg = SolverConfig.full(instance, epsilon, guess=g_dual, zeta=zeta_call)
            out = arora_kale_solve(instance, cfg, model=model, seed=seed + calls,
                                   ledger=ledger, tau=tau)
            calls += 1
            iterations_total += out.iterations_run
            call_log.append({"call": calls, "framework": "full",
                             "guess": g_dual, "verdict": out.verdict,
                             "iterations": out.iterations_run})
            if out.verdict == "leq":
                dual_outcome = out
                break
        if dual_outcome is None or dual_outcome.verdict != "leq":
            raise ContractViolation("no completing run found for the dual certificate")
    g_primal = lo - 2.0 * epsilon
    cfg = SolverConfig.primal(instance, epsilon, guess=g_primal, zeta=zeta_call)
    pout = primal_oracle_solve(instance, cfg, model=model, seed=seed + calls,
                               ledger=ledger, tau=tau)
    calls += 1
    iterations_total += pout.iterations_run
    call_log.append({"call": calls, "framework": "primal", "guess": g_primal,
                     "verdict": pout.verdict,
                     "iterations": pout.iterations_run})
    if pout.verdict != "feasible":
        raise ContractViolation(
            f"primal run at guess {g_primal} unexpectedly reported infeasible"
        )
    return SolveOutcome(
        opt_estimate=float(estimate),
        dual=dual_outcome.dual,
        dual_guess=dual_outcome.guess,
        dual_report=dual_outcome.report,
        primal_y=pout.y,
        primal_z=float(pout.z),
        primal_guess=g_primal,
        primal_report=pout.report,
        calls=calls,
        iterations_total=iterations_total,
        ledger=ledger,
        model=model,
        epsilon=epsilon,
        call_log=call_log,
    )
