import pytest

from qsdplab.ledger import (
    FORMULAS,
    QueryLedger,
    cost_gibbs_decomposition,
    cost_gibbs_operator,
    cost_gibbs_seeded,
    cost_solve_total,
    cost_trace_mean_k,
    pow2_at_least,
)


def test_counters_monotone_and_named():
    ledger = QueryLedger()
    ledger.charge("sparse-index")
    ledger.charge("sparse-index", 3)
    assert ledger.counts["sparse-index"] == 4
    with pytest.raises(KeyError):
        ledger.charge("nope")
    with pytest.raises(ValueError):
        ledger.charge("sparse-index", -1)


def test_charge_formula_records_auditable_event():
    ledger = QueryLedger()
    amount = ledger.charge_formula("gibbs_operator", "gibbs-prep",
                                   alpha=2.0, K=3.0, n=16)
    assert amount == cost_gibbs_operator(2.0, 3.0, 16)
    assert ledger.counts["gibbs-prep"] == amount
    assert ledger.audit()


def test_sample_count_formula_matches_quoted_value():
    # gamma = 6, sigma = 6 -> 6 * 144^2
    assert cost_trace_mean_k(6.0, 6.0) == 6 * 144**2 == 124416


def test_gibbs_charges_scale_as_documented():
    assert cost_gibbs_operator(1.0, 4.0, 16) == 16
    assert cost_gibbs_operator(1.0, 8.0, 16) == 32  # doubling K doubles it
    assert cost_gibbs_seeded(2.0, 0.2) == pytest.approx(5 * 2**3.5, abs=1)
    one = cost_gibbs_seeded(2.0, 0.2)
    two = cost_gibbs_seeded(2.0 * 2 ** (1 / 3.5), 0.2)
    assert two == pytest.approx(2 * one, rel=0.02)
    assert cost_gibbs_decomposition(2.0, 3.0) == pytest.approx(5 * 6**3.5, abs=1)


def test_solve_total_composition_is_exact():
    parts = cost_solve_total(m=16, iterations=100, k=1000, t_tr=2, t_gibbs=7,
                             nu=1e-3)
    assert parts["queries"] == parts["gibbs_preps"] * 7 + parts["estimator_calls"] * 2
    # bulk-charged pieces recompute exactly from the registered formula
    ledger = QueryLedger()
    ledger.charge("gibbs-prep", parts["gibbs_preps"])
    ledger.charge("trace-est", parts["estimator_calls"])
    ledger.record_event("solve_total", "gibbs-prep",
                        dict(m=16, iterations=100, k=1000, t_tr=2, t_gibbs=7,
                             nu=1e-3), parts["queries"])
    assert ledger.audit()


def test_registry_covers_documented_ops():
    for name in ("sparse_to_block", "state_to_block", "hamiltonian_simulation",
                 "controlled_simulation", "smooth_function", "negative_power",
                 "positive_power", "trace_estimator", "gibbs_operator",
                 "gibbs_state_model", "gibbs_seeded", "gibbs_decomposition",
                 "two_phase_search_samples", "two_phase_minfind_samples",
                 "trace_mean_k", "solver_iterations", "solve_total",
                 "shadow_samples", "project_uniform"):
        assert name in FORMULAS


def test_pow2_helper():
    assert pow2_at_least(1) == 1
    assert pow2_at_least(3) == 4
    assert pow2_at_least(32.0) == 32


def test_snapshot_and_report_roundtrip():
    ledger = QueryLedger()
    ledger.charge_formula("trace_estimator", "trace-est", alpha=3.0)
    snap = ledger.snapshot()
    assert snap["counts"]["trace-est"] == 3
    assert snap["events"][0]["op"] == "trace_estimator"
    assert "trace-est" in ledger.report()


def test_concurrent_increments_are_atomic():
    import threading

    ledger = QueryLedger()

    def worker():
        for _ in range(10_000):
            ledger.charge("reflection")

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert ledger.counts["reflection"] == 40_000
