//! Deterministic cross-module invariant battery: seeded random draws,
//! dense α grids, and the statistical-convergence contract.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use ptsim_core::analysis::{
    check_no_signaling, sample_shots, sweep_alpha, trace_distance, SplitMix64,
};
use ptsim_core::linalg::{c64, eig2, expm_oracle, sigma_y, CMatrix};
use ptsim_core::protocol::{
    bob_marginal, joint_probabilities, phases, run_protocol, signaling_gap_analytic,
    signaling_gap_embedded, signaling_gap_numeric, AliceBit, Normalization,
};
use ptsim_core::pt::{
    eigensystem, evolution_operator, hermitian_counterpart, metric_operator, PtHamiltonian,
};

/// α values spread over the unbroken window, away from the conditioning
/// cliff at the breaking point (cos α ≥ 0.12).
fn seeded_alphas(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..count).map(|_| -1.45 + 2.9 * rng.next_f64()).collect()
}

#[test]
fn propagator_matches_series_over_four_periods() {
    for alpha in seeded_alphas(20, 0x5EED_0001) {
        let h = PtHamiltonian::new(1.0, alpha).unwrap();
        let tau = eigensystem(&h).unwrap().tau;
        for k in 0..=16 {
            let t = tau * 4.0 * k as f64 / 16.0;
            let u = evolution_operator(&h, t).unwrap();
            let series = expm_oracle(h.matrix(), t);
            let diff = u.max_abs_diff(&series);
            assert!(diff <= 1e-10, "closed form vs series {diff:.3e} at alpha {alpha}, t {t}");
        }
    }
}

#[test]
fn propagator_non_unitarity_is_macroscopic() {
    // The engine of the whole effect: at τ and α = π/4 the propagator
    // visibly fails 2-norm unitarity.
    let h = PtHamiltonian::new(1.0, FRAC_PI_4).unwrap();
    let tau = eigensystem(&h).unwrap().tau;
    let u = evolution_operator(&h, tau).unwrap();
    let deviation = u.adjoint().mul(&u).max_abs_diff(&CMatrix::identity(2));
    assert!(deviation > 1e-6, "deviation only {deviation:.3e}");
}

#[test]
fn eigensystem_matches_numeric_eigensolver_up_to_phase() {
    for alpha in seeded_alphas(20, 0x5EED_0002) {
        let h = PtHamiltonian::new(1.0, alpha).unwrap();
        let es = eigensystem(&h).unwrap();
        let pairs = eig2(h.matrix()).unwrap();
        for (e_formula, v_formula) in [(es.e_plus, &es.v_plus), (es.e_minus, &es.v_minus)] {
            let (lambda, v_num) = pairs
                .iter()
                .min_by(|a, b| {
                    (a.0 - c64(e_formula, 0.0))
                        .norm()
                        .total_cmp(&(b.0 - c64(e_formula, 0.0)).norm())
                })
                .unwrap();
            assert!((lambda - c64(e_formula, 0.0)).norm() <= 1e-10);
            let unit = v_formula.normalized();
            let overlap = unit.inner(v_num).norm();
            assert!(
                (overlap - 1.0).abs() <= 1e-10,
                "eigenvector overlap {overlap} at alpha {alpha}"
            );
        }
    }
}

#[test]
fn metric_solver_agrees_with_closed_form() {
    // Independent oracle for the linear-solve construction:
    // η = I + sin α·σ_y after trace normalization.
    for alpha in seeded_alphas(25, 0x5EED_0003) {
        let h = PtHamiltonian::new(1.0, alpha).unwrap();
        let eta = metric_operator(&h).unwrap();
        let want = CMatrix::identity(2).add(&sigma_y().scale(c64(alpha.sin(), 0.0)));
        let diff = eta.eta.max_abs_diff(&want);
        assert!(diff <= 1e-10, "metric differs from closed form by {diff:.3e} at alpha {alpha}");
    }
}

#[test]
fn counterpart_battery() {
    for alpha in seeded_alphas(20, 0x5EED_0004) {
        let s = 1.0;
        let h = PtHamiltonian::new(s, alpha).unwrap();
        let eta = metric_operator(&h).unwrap();
        let hp = hermitian_counterpart(&h, &eta).unwrap();
        assert!(hp.is_hermitian(1e-10));
        let [(l1, _), (l2, _)] = eig2(&hp).unwrap();
        let e = s * alpha.cos();
        let (want_hi, want_lo) = if e >= 0.0 { (e, -e) } else { (-e, e) };
        assert!((l1 - c64(want_hi, 0.0)).norm() <= 1e-10);
        assert!((l2 - c64(want_lo, 0.0)).norm() <= 1e-10);
    }
}

#[test]
fn analytic_and_numeric_gaps_agree_on_the_dense_grid() {
    let steps = 101;
    let lo = -FRAC_PI_2 + 1e-3;
    let hi = FRAC_PI_2 - 1e-3;
    for i in 0..steps {
        let alpha = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let h = PtHamiltonian::new(1.0, alpha).unwrap();
        let numeric = signaling_gap_numeric(&h, Normalization::Conventional).unwrap();
        let analytic = signaling_gap_analytic(alpha);
        assert!(
            (numeric - analytic).abs() <= 1e-10,
            "gap mismatch {:.3e} at alpha {alpha}",
            (numeric - analytic).abs()
        );
    }
}

#[test]
fn phase_identity_holds_everywhere() {
    // sin(2φ₊ − ε) = 1 for every α; the analytic marginal collapses to
    // ½[1 ± cos ε].
    for i in 0..=200 {
        let alpha = -PI + 2.0 * PI * i as f64 / 200.0;
        let ph = phases(alpha);
        let s = (2.0 * ph.phi_plus - ph.epsilon).sin();
        assert!((s - 1.0).abs() <= 1e-10, "identity off by {:.3e} at alpha {alpha}", s - 1.0);
    }
}

#[test]
fn gap_vanishes_exactly_at_hermitian_points_and_nowhere_nearby() {
    for alpha in [0.0, PI, -PI] {
        let h = PtHamiltonian::new(1.0, alpha).unwrap();
        let gap = signaling_gap_numeric(&h, Normalization::Conventional).unwrap();
        assert!(gap.abs() <= 1e-12, "gap {gap:.3e} at Hermitian alpha {alpha}");
    }
    for alpha in [FRAC_PI_4, -FRAC_PI_4, FRAC_PI_3, -FRAC_PI_3] {
        let h = PtHamiltonian::new(1.0, alpha).unwrap();
        let gap = signaling_gap_numeric(&h, Normalization::Conventional).unwrap();
        assert!(gap.abs() >= 0.1, "gap {gap:.3e} too small at alpha {alpha}");
    }
}

#[test]
fn hermitian_control_passes_fifty_random_bases() {
    let h = PtHamiltonian::new(1.0, 0.0).unwrap();
    let mut rng = SplitMix64::new(0x5EED_0005);
    let bases: Vec<_> = (0..50).map(|_| rng.random_bob_basis()).collect();
    let report = check_no_signaling(&h, &bases, 1e-10).unwrap();
    assert!(report.satisfied, "violation {:.3e}", report.max_violation);
}

#[test]
fn hermitian_marginals_are_exactly_even_for_any_time() {
    // With α = 0 the evolution is unitary, so Bob's marginal must be (½, ½)
    // whatever time Alice evolves for and whichever bit she applies.
    let h = PtHamiltonian::new(1.0, 0.0).unwrap();
    for t in [0.0, 0.3, 1.7, 4.0] {
        let u = evolution_operator(&h, t).unwrap();
        let dev = u.adjoint().mul(&u).max_abs_diff(&CMatrix::identity(2));
        assert!(dev <= 1e-12);
    }
    for bit in [AliceBit::Plus, AliceBit::Minus] {
        let state = run_protocol(&h, bit, Normalization::Conventional).unwrap();
        let (p, m) = bob_marginal(&joint_probabilities(&state));
        assert!((p - 0.5).abs() <= 1e-12 && (m - 0.5).abs() <= 1e-12);
    }
}

#[test]
fn gap_is_independent_of_the_energy_scale() {
    let reference = signaling_gap_numeric(
        &PtHamiltonian::new(1.0, FRAC_PI_4).unwrap(),
        Normalization::Conventional,
    )
    .unwrap();
    for s in [0.5, 3.0] {
        let gap = signaling_gap_numeric(
            &PtHamiltonian::new(s, FRAC_PI_4).unwrap(),
            Normalization::Conventional,
        )
        .unwrap();
        assert!((gap - reference).abs() <= 1e-12, "gap changed at s = {s}");
    }
    // τ = π/ΔE tracks the sign of ΔE too, so t' = ΔE·τ/2 = π/2 exactly and
    // even a negative scale cannot move (or flip) the gap.
    let negative = signaling_gap_numeric(
        &PtHamiltonian::new(-1.0, FRAC_PI_4).unwrap(),
        Normalization::Conventional,
    )
    .unwrap();
    assert!((negative - reference).abs() <= 1e-12);
}

#[test]
fn embedded_runs_reproduce_the_gap() {
    let h = PtHamiltonian::new(1.0, FRAC_PI_4).unwrap();
    let direct = signaling_gap_numeric(&h, Normalization::Conventional).unwrap();
    assert!((signaling_gap_embedded(&h, 4, 0.0).unwrap() - direct).abs() <= 1e-10);
    assert!((signaling_gap_embedded(&h, 4, 1.0).unwrap() - direct).abs() <= 1e-10);
}

#[test]
fn pt_metric_normalization_keeps_the_violation() {
    let h = PtHamiltonian::new(1.0, FRAC_PI_4).unwrap();
    let eta = metric_operator(&h).unwrap();
    let gap = signaling_gap_numeric(&h, Normalization::PtMetric(eta)).unwrap();
    assert!(gap.abs() > 0.1);
}

#[test]
fn sweep_records_hold_their_invariants_on_a_wide_grid() {
    let sweep = sweep_alpha(-1.5, 1.5, 61, Normalization::Conventional).unwrap();
    assert_eq!(sweep.records.len(), 61);
    let mut prev = f64::NEG_INFINITY;
    for r in &sweep.records {
        assert!(r.alpha > prev);
        prev = r.alpha;
        assert!((r.gap_analytic - r.gap_numeric).abs() <= 1e-10);
        assert!((0.0..=1.0).contains(&r.bob_trace_distance));
        assert!(r.gap_numeric.abs() <= r.bob_trace_distance + 1e-10);
        assert!((r.gap_numeric - (r.marginal_plus - r.marginal_minus)).abs() <= 1e-15);
    }
}

#[test]
fn bob_states_differ_by_exactly_the_trace_distance_bound() {
    // In the σ_y basis the marginal difference saturates the trace-distance
    // bound: |gap| = T(ρ⁺, ρ⁻).
    for alpha in [0.3, FRAC_PI_6, 1.1] {
        let h = PtHamiltonian::new(1.0, alpha).unwrap();
        let plus = run_protocol(&h, AliceBit::Plus, Normalization::Conventional).unwrap();
        let minus = run_protocol(&h, AliceBit::Minus, Normalization::Conventional).unwrap();
        let td = trace_distance(
            &ptsim_core::protocol::bob_reduced_state(&plus),
            &ptsim_core::protocol::bob_reduced_state(&minus),
        );
        let gap = signaling_gap_numeric(&h, Normalization::Conventional).unwrap();
        assert!((gap.abs() - td).abs() <= 1e-10);
    }
}

#[test]
fn shot_estimates_converge_at_three_scales() {
    // 100 seeded trials per shot count; at least 99 must land within five
    // standard errors of the exact marginal.
    let h = PtHamiltonian::new(1.0, FRAC_PI_6).unwrap();
    let state = run_protocol(&h, AliceBit::Plus, Normalization::Conventional).unwrap();
    let (exact, _) = bob_marginal(&joint_probabilities(&state));

    for shots in [100u64, 10_000, 1_000_000] {
        let mut hits = 0;
        for trial in 0..100u64 {
            let est = sample_shots(&h, AliceBit::Plus, shots, 0xC0FFEE + trial).unwrap();
            if (est.p_hat_plus - exact).abs() <= 5.0 * est.stderr {
                hits += 1;
            }
        }
        assert!(hits >= 99, "only {hits}/100 trials within 5 stderr at {shots} shots");
    }
}
