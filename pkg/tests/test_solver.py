import numpy as np
import pytest

from qsdplab.apps import build_lower_bound_lp
from qsdplab.errors import ContractViolation
from qsdplab.instance import SdpInstance, random_instance
from qsdplab.ledger import QueryLedger
from qsdplab.reference import reference_optimum
from qsdplab.solver import (
    ModelParams,
    SolverConfig,
    arora_kale_solve,
    primal_oracle_solve,
    sdp_solve,
    theta_oracle,
    verify_dual,
    verify_primal,
)


# -- theta oracle ----------------------------------------------------------

def test_theta_oracle_objective_only_feasible():
    # b_0 = -g < 0 and trace_0 >= 0: the e_0-only completion works (c = 0)
    traces = np.array([0.2, 0.5])
    b_ext = np.array([-1.0, 1.0])
    out = theta_oracle(traces, b_ext, r_dual=1.0, delta=0.01)
    assert out is not None
    [(j, c)] = out
    assert c == 0.0


def test_theta_oracle_hand_interval():
    # m = 1, b = (-1, 2), traces = (1, -1), r = 1: feasible c in [0, 1/4]
    traces = np.array([1.0, -1.0])
    b_ext = np.array([-1.0, 2.0])
    out = theta_oracle(traces, b_ext, r_dual=1.0, delta=0.01)
    assert out is not None
    [(j, c)] = out
    assert j == 1 and 0.0 <= c <= 0.25


def test_theta_oracle_empty():
    # all traces negative, all bounds positive, g < 0: nothing feasible
    traces = np.array([-1.0, -1.0, -1.0])
    b_ext = np.array([0.5, 1.0, 1.0])
    assert theta_oracle(traces, b_ext, r_dual=1.0, delta=0.01) is None


def test_theta_oracle_tie_break_smallest_j():
    traces = np.array([0.5, 0.7, 0.9])
    b_ext = np.array([-1.0, 1.0, 1.0])
    out = theta_oracle(traces, b_ext, r_dual=1.0, delta=0.01)
    assert out == [(1, 0.0)]


def test_theta_oracle_pair_completion():
    # negative-bound row needed for the budget side, positive-trace row for
    # the trace side: no single index works but the pair does
    traces = np.array([0.0, -0.2, 0.9])
    b_ext = np.array([0.4, -1.0, 0.0])   # g = -0.4
    out = theta_oracle(traces, b_ext, r_dual=1.0, delta=0.01)
    assert out is not None and len(out) == 2
    (j1, c1), (j2, c2) = out
    # the returned completion really sits inside the relaxed polytope
    b = b_ext
    assert b[0] / 2.0 + c1 * b[j1] + c2 * b[j2] <= 1e-12
    total = traces[0] / 2.0 + c1 * traces[j1] + c2 * traces[j2]
    assert total >= -0.01 - 1e-12


def test_theta_oracle_charges_minfind():
    ledger = QueryLedger()
    traces = np.array([0.5, 0.7])
    b_ext = np.array([-1.0, 1.0])
    theta_oracle(traces, b_ext, r_dual=1.0, delta=0.01, ledger=ledger)
    assert ledger.counts["gibbs-prep"] > 0 and ledger.audit()


# -- framework drivers ------------------------------------------------------

def test_python_and_jitted_loops_agree(rng):
    # noise off (cap = 0) makes both paths deterministic and step-identical
    inst = random_instance(rng, n=3, m=3)
    cfg = SolverConfig.full(inst, epsilon=0.4, guess=0.3)
    cfg_quiet = SolverConfig(
        epsilon=cfg.epsilon, failure=cfg.failure, guess=cfg.guess,
        framework=cfg.framework, gamma=cfg.gamma, theta=cfg.theta,
        iterations=min(cfg.iterations, 400), k=cfg.k, noise_cap=0.0, nu=cfg.nu,
    )
    a = arora_kale_solve(inst, cfg_quiet, seed=1, use_python=True)
    b = arora_kale_solve(inst, cfg_quiet, seed=1, use_python=False)
    assert a.verdict == b.verdict
    assert a.iterations_run == b.iterations_run
    assert np.allclose(a.y, b.y)


def test_python_and_jitted_primal_agree(rng):
    inst = random_instance(rng, n=3, m=3)
    cfg = SolverConfig.primal(inst, epsilon=0.3, guess=0.1)
    cfg_quiet = SolverConfig(
        epsilon=cfg.epsilon, failure=cfg.failure, guess=cfg.guess,
        framework=cfg.framework, gamma=cfg.gamma, theta=cfg.theta,
        iterations=min(cfg.iterations, 400), k=cfg.k, noise_cap=0.0, nu=cfg.nu,
    )
    a = primal_oracle_solve(inst, cfg_quiet, seed=1, use_python=True)
    b = primal_oracle_solve(inst, cfg_quiet, seed=1, use_python=False)
    assert a.verdict == b.verdict
    assert a.iterations_run == b.iterations_run
    assert np.allclose(a.y, b.y)
    if a.z is not None:
        assert a.z == pytest.approx(b.z, abs=1e-9)


def test_zero_objective_concludes_leq(rng):
    n = 3
    inst = SdpInstance(
        A=np.stack([np.eye(n, dtype=complex)]), C=np.zeros((n, n), dtype=complex),
        b=np.array([1.0]), R=1.0, r=1.0,
    )
    cfg = SolverConfig.full(inst, epsilon=0.2, guess=1.0)
    out = arora_kale_solve(inst, cfg, seed=0)
    assert out.verdict == "leq"
    assert out.report["pass"]


def test_hard_lp_case_a_gt_below_optimum():
    inst, _, info = build_lower_bound_lp(m=4, eps=0.25, tau=2.0, case="a")
    cfg = SolverConfig.full(inst, epsilon=0.0625, guess=2.0 - 0.25)
    out = arora_kale_solve(inst, cfg, model="hamiltonian", seed=0)
    assert out.verdict == "gt"      # optimum is exactly 2


def test_dual_certificate_verified_on_completion(rng):
    inst = random_instance(rng, n=4, m=3)
    ref = reference_optimum(inst)
    cfg = SolverConfig.full(inst, epsilon=0.1, guess=ref + 0.05)
    out = arora_kale_solve(inst, cfg, seed=2)
    assert out.verdict == "leq"
    assert out.dual is not None
    rep = verify_dual(out.dual, inst, out.guess, 0.1)
    assert rep["pass"]


def test_primal_feasible_certificate(rng):
    inst = random_instance(rng, n=4, m=3)
    ref = reference_optimum(inst)
    cfg = SolverConfig.primal(inst, epsilon=0.1, guess=ref - 0.3)
    out = primal_oracle_solve(inst, cfg, seed=2)
    assert out.verdict == "feasible"
    assert out.z is not None and out.z >= 0
    assert verify_primal(out.y, out.z, inst, out.guess, 0.1)["pass"]


def test_primal_detects_infeasible_case_b():
    eps_i = 0.25
    inst, _, info = build_lower_bound_lp(m=4, eps=eps_i, tau=2.0, case="b")
    # guess above the bracketed optimum: the exact-membership set is empty
    cfg = SolverConfig.primal(inst, epsilon=eps_i / 4, guess=2.0 - eps_i / 2)
    out = primal_oracle_solve(inst, cfg, model="hamiltonian", seed=0)
    assert out.verdict == "infeasible"


def test_trivial_all_slack_primal(rng):
    n = 3
    inst = SdpInstance(
        A=np.stack([np.eye(n, dtype=complex)]),
        C=np.eye(n, dtype=complex) / 2, b=np.array([1.0]), R=1.0, r=1.0,
    )
    cfg = SolverConfig.primal(inst, epsilon=0.2, guess=-0.9)
    out = primal_oracle_solve(inst, cfg, seed=0)
    assert out.verdict == "feasible"
    assert out.iterations_run <= 5


# -- verifiers --------------------------------------------------------------

def test_verify_dual_trivial_cases(rng):
    n = 3
    inst = SdpInstance(
        A=np.stack([np.eye(n, dtype=complex)]),
        C=-np.eye(n, dtype=complex) / 2, b=np.array([1.0]), R=1.0, r=1.0,
    )
    rep = verify_dual(np.zeros(1), inst, g=0.1, eps=0.05)
    assert rep["pass"]   # -C psd, <y,b> = 0 <= g + eps


def test_verify_dual_flags_psd_violation(rng):
    n = 2
    inst = SdpInstance(
        A=np.stack([np.eye(n, dtype=complex)]),
        C=np.eye(n, dtype=complex), b=np.array([1.0]), R=1.0, r=1.0,
    )
    rep = verify_dual(np.zeros(1), inst, g=2.0, eps=0.1)
    assert not rep["pass"]
    assert not rep["conditions"]["psd_shift"]["pass"]


def test_verify_primal_flags_objective(rng):
    inst = random_instance(rng, n=3, m=2)
    rep = verify_primal(np.zeros(inst.m + 1), 0.0, inst, g=0.9, eps=0.05)
    assert not rep["conditions"]["objective"]["pass"]


# -- end to end -------------------------------------------------------------

def test_sdp_solve_identity_objective():
    n = 3
    inst = SdpInstance(
        A=np.stack([np.eye(n, dtype=complex)]), C=np.eye(n, dtype=complex),
        b=np.array([1.0]), R=1.0, r=1.0,
    )
    out = sdp_solve(inst, epsilon=0.1, seed=1)
    assert abs(out.opt_estimate - 1.0) <= 0.1
    assert out.dual_report["pass"] and out.primal_report["pass"]


def test_sdp_solve_random_vs_reference(rng):
    inst = random_instance(rng, n=4, m=4)
    ref = reference_optimum(inst)
    out = sdp_solve(inst, epsilon=0.1, seed=3)
    assert abs(out.opt_estimate - ref) <= 0.1
    assert out.ledger.audit()


def test_sdp_solve_state_model_small(rng):
    inst = random_instance(rng, n=4, m=3, diagonal=True)
    ref = reference_optimum(inst)
    out = sdp_solve(inst, epsilon=0.15, model="state", seed=4)
    assert abs(out.opt_estimate - ref) <= 0.15


def test_model_params_alpha_values(rng):
    inst = random_instance(rng, n=4, m=3)
    assert ModelParams.for_instance(inst, "sparse").alpha == inst.s
    assert ModelParams.for_instance(inst, "operator").alpha == 1.0
    assert ModelParams.for_instance(inst, "hamiltonian", tau=3.0).alpha == 6.0
    sp = ModelParams.for_instance(inst, "state")
    assert sp.B >= 1.0
    with pytest.raises(ContractViolation):
        ModelParams.for_instance(inst, "nope")


def test_solver_config_values(rng):
    inst = random_instance(rng, n=4, m=3, R=2.0)
    cfg = SolverConfig.full(inst, epsilon=0.1, guess=0.0)
    assert cfg.gamma == pytest.approx(6 * inst.R * inst.r / 0.1)
    assert cfg.theta == pytest.approx(1.0 / cfg.gamma)
    assert cfg.iterations >= np.log(inst.n) / cfg.theta**2 - 1
    pcfg = SolverConfig.primal(inst, epsilon=0.1, guess=0.0)
    assert pcfg.gamma == pytest.approx(6 * inst.R / 0.1)
    assert pcfg.theta == pytest.approx(0.1 / (2 * inst.R))


def test_gt_verdicts_sound_against_reference(rng):
    # whenever the threshold solver says the optimum exceeds the guess, the
    # desk oracle must agree
    for i in range(8):
        inst = random_instance(rng, n=int(rng.integers(3, 6)),
                               m=int(rng.integers(2, 6)))
        ref = reference_optimum(inst)
        for g in (ref - 0.3, ref - 0.12, ref + 0.12):
            cfg = SolverConfig.full(inst, epsilon=0.1, guess=g)
            out = arora_kale_solve(inst, cfg, seed=50 + i)
            if out.verdict == "gt":
                assert ref > g - 1e-6, (i, g, ref)
            else:
                assert ref <= g + 0.1 + 1e-6, (i, g, ref)


def test_theta_oracle_rejects_oversized_error_bars():
    traces = np.array([0.2, 0.5])
    b_ext = np.array([-1.0, 1.0])
    with pytest.raises(ContractViolation, match="error bars"):
        theta_oracle(traces, b_ext, r_dual=1.0, delta=0.01, error_bars=0.2)
    # bars within half the relaxation are fine
    assert theta_oracle(traces, b_ext, r_dual=1.0, delta=0.01,
                        error_bars=0.005) is not None


def test_all_models_agree_on_one_instance(rng):
    inst = random_instance(rng, n=4, m=3)
    ref = reference_optimum(inst)
    for model in ("sparse", "operator", "state", "hamiltonian"):
        out = sdp_solve(inst, epsilon=0.15, model=model, seed=17)
        assert abs(out.opt_estimate - ref) <= 0.15, model
        assert out.dual_report["pass"] and out.primal_report["pass"], model
