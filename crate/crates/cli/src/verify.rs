//! The cross-module invariant battery behind `ptsim verify`.
//!
//! Every check reduces to a single residual: the worst deviation it
//! observed, or, for must-exceed checks like "the propagator is visibly
//! non-unitary", the shortfall below the required magnitude (zero when
//! satisfied). A run passes at tolerance `tol` iff every residual is ≤ tol.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use ptsim_core::analysis::{
    check_no_signaling, sample_shots, sweep_alpha, trace_distance, SplitMix64,
};
use ptsim_core::linalg::{c64, eig2, expm_oracle, sigma_y, tensor_product, CMatrix};
use ptsim_core::protocol::{
    bob_marginal, bob_reduced_state, joint_probabilities, phases, run_protocol,
    signaling_gap_analytic, signaling_gap_embedded, signaling_gap_numeric, AliceBit, Normalization,
};
use ptsim_core::pt::{
    canonicalize, eigensystem, evolution_operator, hermitian_counterpart, metric_operator,
    PtHamiltonian,
};

pub struct Check {
    pub name: &'static str,
    pub residual: f64,
}

fn random_matrix(rng: &mut SplitMix64, n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = c64(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0);
        }
    }
    m
}

fn random_alpha(rng: &mut SplitMix64) -> f64 {
    -1.45 + 2.9 * rng.next_f64()
}

/// Shortfall of `value` below `needed`: 0 when the requirement is met.
fn shortfall(value: f64, needed: f64) -> f64 {
    (needed - value).max(0.0)
}

pub fn run_battery() -> Vec<Check> {
    let mut checks = Vec::new();
    let mut push = |name: &'static str, residual: f64| checks.push(Check { name, residual });

    // --- linear algebra ---------------------------------------------------
    {
        let mut rng = SplitMix64::new(0xB417_0001);
        let mut worst = 0.0f64;
        for _ in 0..40 {
            let (a, b) = (random_matrix(&mut rng, 2), random_matrix(&mut rng, 2));
            let (c, d) = (random_matrix(&mut rng, 2), random_matrix(&mut rng, 2));
            let lhs = tensor_product(&a, &b).mul(&tensor_product(&c, &d));
            let rhs = tensor_product(&a.mul(&c), &b.mul(&d));
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
        push("tensor product: (A x B)(C x D) = AC x BD", worst);
    }
    {
        let mut rng = SplitMix64::new(0xB417_0002);
        let mut worst = 0.0f64;
        for _ in 0..40 {
            let rho = random_matrix(&mut rng, 4);
            let reduced = ptsim_core::linalg::partial_trace_first(&rho).unwrap();
            worst = worst.max((reduced.trace() - rho.trace()).norm());
        }
        push("partial trace preserves the trace", worst);
    }
    {
        let mut rng = SplitMix64::new(0xB417_0003);
        let mut worst = 0.0f64;
        for _ in 0..40 {
            let m = random_matrix(&mut rng, 2);
            if let Ok(pairs) = eig2(&m) {
                for (lambda, v) in pairs {
                    worst = worst.max(m.matvec(&v).max_abs_diff(&v.scale(lambda)));
                }
            }
        }
        push("eigensolver residual: Mv = lambda v", worst);
    }
    {
        let mut rng = SplitMix64::new(0xB417_0004);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 2);
            let (t1, t2) = (2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0);
            let combined = expm_oracle(&m, t1 + t2);
            let split = expm_oracle(&m, t1).mul(&expm_oracle(&m, t2));
            worst = worst.max(combined.max_abs_diff(&split));
        }
        push("series exponential additivity", worst);
    }

    // --- PT machinery ------------------------------------------------------
    {
        let mut rng = SplitMix64::new(0xB417_0005);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let h = PtHamiltonian::new(1.0, random_alpha(&mut rng)).unwrap();
            let tau = eigensystem(&h).unwrap().tau;
            for k in 0..=8 {
                let t = 4.0 * tau * k as f64 / 8.0;
                let u = evolution_operator(&h, t).unwrap();
                worst = worst.max(u.max_abs_diff(&expm_oracle(h.matrix(), t)));
            }
        }
        push("closed-form propagator matches series exponential", worst);
    }
    {
        let mut rng = SplitMix64::new(0xB417_0006);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let h = PtHamiltonian::new(1.0, random_alpha(&mut rng)).unwrap();
            let eta = metric_operator(&h).unwrap();
            let t = 6.0 * rng.next_f64() - 3.0;
            let u = evolution_operator(&h, t).unwrap();
            worst = worst.max(u.adjoint().mul(&eta.eta).mul(&u).max_abs_diff(&eta.eta));
        }
        push("metric is preserved: U' eta U = eta", worst);
    }
    {
        let h = PtHamiltonian::new(1.0, FRAC_PI_4).unwrap();
        let tau = eigensystem(&h).unwrap().tau;
        let u = evolution_operator(&h, tau).unwrap();
        let dev = u.adjoint().mul(&u).max_abs_diff(&CMatrix::identity(2));
        push("propagator visibly breaks 2-norm unitarity (> 1e-6)", shortfall(dev, 1e-6));
    }
    {
        let mut rng = SplitMix64::new(0xB417_0007);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let h = PtHamiltonian::new(1.0, random_alpha(&mut rng)).unwrap();
            let es = eigensystem(&h).unwrap();
            let pairs = eig2(h.matrix()).unwrap();
            for (e, v) in [(es.e_plus, &es.v_plus), (es.e_minus, &es.v_minus)] {
                let (lambda, v_num) = pairs
                    .iter()
                    .min_by(|a, b| {
                        (a.0 - c64(e, 0.0)).norm().total_cmp(&(b.0 - c64(e, 0.0)).norm())
                    })
                    .unwrap();
                worst = worst.max((lambda - c64(e, 0.0)).norm());
                worst = worst.max((v.normalized().inner(v_num).norm() - 1.0).abs());
            }
        }
        push("closed-form eigensystem matches numeric eigensolver", worst);
    }
    {
        let mut rng = SplitMix64::new(0xB417_0008);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let alpha = random_alpha(&mut rng);
            let h = PtHamiltonian::new(1.0, alpha).unwrap();
            let eta = metric_operator(&h).unwrap();
            let solved = eta.eta;
            let closed = CMatrix::identity(2).add(&sigma_y().scale(c64(alpha.sin(), 0.0)));
            worst = worst.max(solved.max_abs_diff(&closed));
        }
        push("metric solver agrees with closed form I + sin(a) sigma_y", worst);
    }
    {
        let mut rng = SplitMix64::new(0xB417_0009);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let alpha = random_alpha(&mut rng);
            let h = PtHamiltonian::new(1.0, alpha).unwrap();
            let eta = metric_operator(&h).unwrap();
            let hp = hermitian_counterpart(&h, &eta).unwrap();
            worst = worst.max(hp.max_abs_diff(&hp.adjoint()));
            let [(l1, _), (l2, _)] = eig2(&hp).unwrap();
            let e = alpha.cos();
            let (hi, lo) = if e >= 0.0 { (e, -e) } else { (-e, e) };
            worst = worst.max((l1 - c64(hi, 0.0)).norm());
            worst = worst.max((l2 - c64(lo, 0.0)).norm());
        }
        push("Hermitian counterpart: Hermitian and isospectral", worst);
    }
    {
        let mut rng = SplitMix64::new(0xB417_000A);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let s = if rng.next_f64() < 0.5 { -1.0 } else { 1.0 } * (0.1 + 2.9 * rng.next_f64());
            let alpha = random_alpha(&mut rng);
            let shift = 4.0 * rng.next_f64() - 2.0;
            let h = PtHamiltonian::new(s, alpha).unwrap();
            let m = h.matrix().add(&CMatrix::identity(2).scale(c64(shift, 0.0)));
            let form = canonicalize(&m).unwrap();
            worst = worst
                .max((form.s - s).abs())
                .max((form.alpha - alpha).abs())
                .max((form.shift - shift).abs());
        }
        push("canonicalize inverts construction", worst);
    }

    // --- protocol -----------------------------------------------------------
    {
        let mut worst = 0.0f64;
        for i in 0..101 {
            let alpha = -FRAC_PI_2 + 1e-3 + (PI - 2e-3) * i as f64 / 100.0;
            let h = PtHamiltonian::new(1.0, alpha).unwrap();
            let numeric = signaling_gap_numeric(&h, Normalization::Conventional).unwrap();
            worst = worst.max((numeric - signaling_gap_analytic(alpha)).abs());
        }
        push("analytic gap matches numeric pipeline on 101-point grid", worst);
    }
    {
        let mut worst = 0.0f64;
        for i in 0..=100 {
            let alpha = -PI + 2.0 * PI * i as f64 / 100.0;
            let ph = phases(alpha);
            worst = worst.max(((2.0 * ph.phi_plus - ph.epsilon).sin() - 1.0).abs());
        }
        push("phase identity sin(2 phi+ - eps) = 1", worst);
    }
    {
        let mut worst = 0.0f64;
        for alpha in [0.0, PI, -PI] {
            let h = PtHamiltonian::new(1.0, alpha).unwrap();
            worst = worst.max(
                signaling_gap_numeric(&h, Normalization::Conventional).unwrap().abs(),
            );
        }
        push("gap vanishes at Hermitian points (sin a = 0)", worst);
    }
    {
        let mut short = 0.0f64;
        for alpha in [FRAC_PI_4, -FRAC_PI_4, FRAC_PI_3, -FRAC_PI_3] {
            let h = PtHamiltonian::new(1.0, alpha).unwrap();
            let gap = signaling_gap_numeric(&h, Normalization::Conventional).unwrap();
            short = short.max(shortfall(gap.abs(), 0.1));
        }
        push("gap exceeds 0.1 away from Hermitian points", short);
    }
    {
        let h = PtHamiltonian::new(1.0, 0.0).unwrap();
        let mut worst = 0.0f64;
        for bit in [AliceBit::Plus, AliceBit::Minus] {
            let state = run_protocol(&h, bit, Normalization::Conventional).unwrap();
            let (p, m) = bob_marginal(&joint_probabilities(&state));
            worst = worst.max((p - 0.5).abs()).max((m - 0.5).abs());
        }
        push("Hermitian control: Bob's marginal is exactly (1/2, 1/2)", worst);
    }
    {
        let h = PtHamiltonian::new(1.0, FRAC_PI_4).unwrap();
        let eta = metric_operator(&h).unwrap();
        let gap = signaling_gap_numeric(&h, Normalization::PtMetric(eta)).unwrap();
        push("gap survives metric normalization (> 0.1)", shortfall(gap.abs(), 0.1));
    }
    {
        let reference = signaling_gap_numeric(
            &PtHamiltonian::new(1.0, FRAC_PI_4).unwrap(),
            Normalization::Conventional,
        )
        .unwrap();
        let mut worst = 0.0f64;
        for s in [0.5, 3.0, -1.0] {
            let gap = signaling_gap_numeric(
                &PtHamiltonian::new(s, FRAC_PI_4).unwrap(),
                Normalization::Conventional,
            )
            .unwrap();
            worst = worst.max((gap - reference).abs());
        }
        push("gap is independent of the energy scale s", worst);
    }
    {
        let h = PtHamiltonian::new(1.0, FRAC_PI_4).unwrap();
        let direct = signaling_gap_numeric(&h, Normalization::Conventional).unwrap();
        let embedded = signaling_gap_embedded(&h, 4, 0.0).unwrap();
        push("4-dimensional embedding reproduces the gap", (direct - embedded).abs());
    }

    // --- analysis ------------------------------------------------------------
    {
        let sweep = sweep_alpha(-1.5, 1.5, 61, Normalization::Conventional).unwrap();
        let mut worst = 0.0f64;
        for r in &sweep.records {
            worst = worst.max((r.gap_analytic - r.gap_numeric).abs());
            worst = worst.max((-r.bob_trace_distance).max(r.bob_trace_distance - 1.0).max(0.0));
            worst = worst.max((r.gap_numeric.abs() - r.bob_trace_distance).max(0.0));
        }
        push("sweep records satisfy their invariants", worst);
    }
    {
        let h = PtHamiltonian::new(1.0, 0.0).unwrap();
        let mut rng = SplitMix64::new(0xB417_000B);
        let bases: Vec<_> = (0..50).map(|_| rng.random_bob_basis()).collect();
        let report = check_no_signaling(&h, &bases, 1e-10).unwrap();
        push("Hermitian audit over 50 random Bob bases", report.max_violation);
    }
    {
        let mut worst = 0.0f64;
        for alpha in [0.2, 0.7, 1.3] {
            let gp = signaling_gap_numeric(
                &PtHamiltonian::new(1.0, alpha).unwrap(),
                Normalization::Conventional,
            )
            .unwrap();
            let gm = signaling_gap_numeric(
                &PtHamiltonian::new(1.0, -alpha).unwrap(),
                Normalization::Conventional,
            )
            .unwrap();
            worst = worst.max((gp + gm).abs());
        }
        push("gap is odd in alpha", worst);
    }
    {
        let mut worst = 0.0f64;
        for alpha in [0.3, FRAC_PI_6, 1.1] {
            let h = PtHamiltonian::new(1.0, alpha).unwrap();
            let plus = run_protocol(&h, AliceBit::Plus, Normalization::Conventional).unwrap();
            let minus = run_protocol(&h, AliceBit::Minus, Normalization::Conventional).unwrap();
            let td = trace_distance(&bob_reduced_state(&plus), &bob_reduced_state(&minus));
            let gap = signaling_gap_numeric(&h, Normalization::Conventional).unwrap();
            worst = worst.max((gap.abs() - td).abs());
        }
        push("sigma_y marginal gap saturates the trace distance", worst);
    }
    {
        // 100 seeded trials at three shot counts; ≥ 99 must fall within five
        // standard errors, and a repeated seed must reproduce exactly.
        let h = PtHamiltonian::new(1.0, FRAC_PI_6).unwrap();
        let state = run_protocol(&h, AliceBit::Plus, Normalization::Conventional).unwrap();
        let (exact, _) = bob_marginal(&joint_probabilities(&state));
        let mut short = 0.0f64;
        for shots in [100u64, 10_000, 1_000_000] {
            let mut hits = 0u32;
            for trial in 0..100u64 {
                let est = sample_shots(&h, AliceBit::Plus, shots, 0xC0FFEE + trial).unwrap();
                if (est.p_hat_plus - exact).abs() <= 5.0 * est.stderr {
                    hits += 1;
                }
            }
            short = short.max(shortfall(hits as f64, 99.0));
        }
        let a = sample_shots(&h, AliceBit::Plus, 1000, 42).unwrap();
        let b = sample_shots(&h, AliceBit::Plus, 1000, 42).unwrap();
        if a != b {
            short = short.max(1.0);
        }
        push("shot estimates converge and reproduce by seed", short);
    }

    checks
}
