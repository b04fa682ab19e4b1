//! `ptsim`: command-line front end for the PT-symmetric signaling
//! simulator.
//!
//! Subcommands: `demo`, `sweep`, `verify`, `metric`, `sample`. All numeric
//! output is printed with 12 significant digits and every command is
//! deterministic given its flags, so primary output is byte-identical
//! across repeated invocations. Exit codes: 0 success, 1 verification
//! failure, 2 usage or domain error.

mod format;
mod verify;

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use format::{fmt12, fmt_matrix};
use ptsim_core::analysis::{sample_shots, sweep_alpha, AlphaSweep};
use ptsim_core::protocol::{
    bob_marginal, bob_reduced_state, joint_probabilities, phases, run_protocol,
    signaling_gap_analytic, AliceBit, Normalization,
};
use ptsim_core::pt::{
    eigensystem, evolution_operator, hermitian_counterpart, metric_operator, PtHamiltonian,
};

#[derive(Parser)]
#[command(
    name = "ptsim",
    version,
    about = "Simulate PT-symmetric two-level dynamics and the entangled-pair signaling protocol"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormalizationArg {
    Conventional,
    PtMetric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BitArg {
    Plus,
    Minus,
}

impl From<BitArg> for AliceBit {
    fn from(b: BitArg) -> AliceBit {
        match b {
            BitArg::Plus => AliceBit::Plus,
            BitArg::Minus => AliceBit::Minus,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol once and print every intermediate quantity.
    Demo {
        /// Non-Hermiticity angle (radians unless --degrees).
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// Interpret angle inputs as degrees.
        #[arg(long)]
        degrees: bool,
        /// Energy scale.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        s: f64,
        /// Renormalization convention for the evolved joint state.
        #[arg(long, value_enum, default_value_t = NormalizationArg::Conventional)]
        normalization: NormalizationArg,
    },
    /// Sweep alpha on a uniform grid and emit one record per point.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        alpha_start: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha_end: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        degrees: bool,
        #[arg(long, value_enum, default_value_t = NormalizationArg::Conventional)]
        normalization: NormalizationArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the cross-module invariant battery and report pass/fail.
    Verify {
        #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
        tol: f64,
    },
    /// Print the metric operator, its square root, and the Hermitian
    /// counterpart.
    Metric {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        degrees: bool,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        s: f64,
    },
    /// Simulate seeded finite-shot measurements of Bob's marginal.
    Sample {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        degrees: bool,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, value_enum)]
        bit: BitArg,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();

    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }

    let result = match cli.command {
        Command::Demo { alpha, degrees, s, normalization } => {
            cmd_demo(angle(alpha, degrees), s, normalization)
        }
        Command::Sweep { alpha_start, alpha_end, steps, degrees, normalization, format, output } => {
            cmd_sweep(
                angle(alpha_start, degrees),
                angle(alpha_end, degrees),
                steps,
                normalization,
                format,
                output,
            )
        }
        Command::Verify { tol } => cmd_verify(tol),
        Command::Metric { alpha, degrees, s } => cmd_metric(angle(alpha, degrees), s),
        Command::Sample { alpha, degrees, s, bit, shots, seed } => {
            cmd_sample(angle(alpha, degrees), s, bit.into(), shots, seed)
        }
    };

    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn angle(value: f64, degrees: bool) -> f64 {
    if degrees {
        value.to_radians()
    } else {
        value
    }
}

/// Honor PTSIM_THREADS as a cap on sweep parallelism.
fn configure_threads() -> Result<(), String> {
    match std::env::var("PTSIM_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .ok()
                .filter(|n| *n >= 1)
                .ok_or_else(|| format!("PTSIM_THREADS must be a positive integer, got {raw:?}"))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| format!("cannot configure thread pool: {e}"))
        }
    }
}

fn build_normalization(
    h: &PtHamiltonian,
    arg: NormalizationArg,
) -> Result<Normalization, String> {
    match arg {
        NormalizationArg::Conventional => Ok(Normalization::Conventional),
        NormalizationArg::PtMetric => {
            let eta = metric_operator(h).map_err(|e| e.to_string())?;
            Ok(Normalization::PtMetric(eta))
        }
    }
}

fn cmd_demo(alpha: f64, s: f64, normalization: NormalizationArg) -> Result<i32, String> {
    let h = PtHamiltonian::new(s, alpha).map_err(|e| e.to_string())?;
    if h.is_trivial() {
        return Err("trivial Hamiltonian (s = 0): the protocol has no time scale".into());
    }
    let norm = build_normalization(&h, normalization)?;
    let es = eigensystem(&h).map_err(|e| e.to_string())?;
    let u_tau = evolution_operator(&h, es.tau).map_err(|e| e.to_string())?;
    let ph = phases(alpha);

    println!("PT-symmetric signaling demo");
    println!(
        "alpha = {} rad, s = {}, normalization = {}",
        fmt12(alpha),
        fmt12(s),
        match normalization {
            NormalizationArg::Conventional => "conventional",
            NormalizationArg::PtMetric => "pt-metric",
        }
    );
    println!();
    println!("H =");
    print!("{}", fmt_matrix(h.matrix()));
    println!(
        "E+ = {}, E- = {}, dE = {}, tau = pi/dE = {}",
        fmt12(es.e_plus),
        fmt12(es.e_minus),
        fmt12(es.delta_e),
        fmt12(es.tau)
    );
    println!();
    println!("U(tau) =");
    print!("{}", fmt_matrix(&u_tau));
    println!();
    println!(
        "phi+ = {}, phi- = {}, epsilon = {}",
        fmt12(ph.phi_plus),
        fmt12(ph.phi_minus),
        fmt12(ph.epsilon)
    );
    println!("cos(epsilon) = {}", fmt12(ph.epsilon.cos()));
    println!();

    let mut marginals = [0.0f64; 2];
    for (i, (bit, label)) in [(AliceBit::Plus, "A+"), (AliceBit::Minus, "A-")].iter().enumerate() {
        let state = run_protocol(&h, *bit, norm.clone()).map_err(|e| e.to_string())?;
        let rho = bob_reduced_state(&state);
        let (p_plus, p_minus) = bob_marginal(&joint_probabilities(&state));
        marginals[i] = p_plus;
        println!("Bob's reduced state after {label}:");
        print!("{}", fmt_matrix(&rho));
        println!(
            "Bob marginal after {label}: P(+y) = {}, P(-y) = {}",
            fmt12(p_plus),
            fmt12(p_minus)
        );
        println!();
    }

    let gap_numeric = marginals[0] - marginals[1];
    let gap_analytic = signaling_gap_analytic(alpha);
    println!("signaling gap (numeric)  = {gap_numeric:.12}");
    println!("signaling gap (analytic) = {gap_analytic:.12}");
    if alpha.sin().abs() <= 1e-12 {
        println!("Hermitian: no-signaling holds");
    } else {
        println!(
            "non-Hermitian: no-signaling violated, |gap| = {}",
            fmt12(gap_numeric.abs())
        );
    }
    Ok(0)
}

const CSV_HEADER: &str = "alpha,gap_analytic,gap_numeric,marginal_plus,marginal_minus,bob_trace_distance";

fn cmd_sweep(
    alpha_start: f64,
    alpha_end: f64,
    steps: usize,
    normalization: NormalizationArg,
    format: FormatArg,
    output: Option<PathBuf>,
) -> Result<i32, String> {
    // The metric depends on α, so pt-metric sweeps rebuild it per grid
    // point.
    let sweep = match normalization {
        NormalizationArg::Conventional => {
            sweep_alpha(alpha_start, alpha_end, steps, Normalization::Conventional)
                .map_err(|e| e.to_string())?
        }
        NormalizationArg::PtMetric => {
            sweep_alpha_pt_metric(alpha_start, alpha_end, steps).map_err(|e| e.to_string())?
        }
    };

    if sweep.clipped {
        eprintln!(
            "warning: sweep endpoints clipped to +/-{} to stay inside the unbroken window",
            fmt12(ptsim_core::analysis::SWEEP_ALPHA_LIMIT)
        );
    }

    let body = match format {
        FormatArg::Csv => {
            let mut text = String::from(CSV_HEADER);
            text.push('\n');
            for r in &sweep.records {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt12(r.alpha),
                    fmt12(r.gap_analytic),
                    fmt12(r.gap_numeric),
                    fmt12(r.marginal_plus),
                    fmt12(r.marginal_minus),
                    fmt12(r.bob_trace_distance)
                ));
            }
            text
        }
        FormatArg::Json => {
            let mut text = serde_json::to_string_pretty(&sweep.records)
                .map_err(|e| format!("cannot serialize records: {e}"))?;
            text.push('\n');
            text
        }
    };

    match output {
        None => {
            print!("{body}");
            Ok(0)
        }
        Some(path) => {
            let mut file = File::create(&path)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            file.write_all(body.as_bytes())
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            Ok(0)
        }
    }
}

/// Sweep with each grid point renormalized in its own α's metric.
fn sweep_alpha_pt_metric(
    alpha_start: f64,
    alpha_end: f64,
    steps: usize,
) -> ptsim_core::Result<AlphaSweep> {
    // Delegate grid handling to the conventional sweep for validation and
    // clipping, then recompute each record under its point metric.
    let base = sweep_alpha(alpha_start, alpha_end, steps, Normalization::Conventional)?;
    let mut records = Vec::with_capacity(base.records.len());
    for r in &base.records {
        let h = PtHamiltonian::new(1.0, r.alpha)?;
        let eta = metric_operator(&h)?;
        let plus = run_protocol(&h, AliceBit::Plus, Normalization::PtMetric(eta.clone()))?;
        let minus = run_protocol(&h, AliceBit::Minus, Normalization::PtMetric(eta))?;
        let (marginal_plus, _) = bob_marginal(&joint_probabilities(&plus));
        let (marginal_minus, _) = bob_marginal(&joint_probabilities(&minus));
        records.push(ptsim_core::analysis::SweepRecord {
            alpha: r.alpha,
            gap_analytic: r.gap_analytic,
            gap_numeric: marginal_plus - marginal_minus,
            marginal_plus,
            marginal_minus,
            bob_trace_distance: ptsim_core::analysis::trace_distance(
                &bob_reduced_state(&plus),
                &bob_reduced_state(&minus),
            ),
        });
    }
    Ok(AlphaSweep { records, clipped: base.clipped })
}

fn cmd_verify(tol: f64) -> Result<i32, String> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(format!("tolerance must be positive, got {tol}"));
    }
    let checks = verify::run_battery();
    let mut failures = 0;
    println!("invariant battery at tol {}", fmt12(tol));
    println!();
    for check in &checks {
        let pass = check.residual <= tol;
        if !pass {
            failures += 1;
        }
        println!(
            "{}  {:<55} residual {}",
            if pass { "PASS" } else { "FAIL" },
            check.name,
            fmt12(check.residual)
        );
    }
    println!();
    println!(
        "RESULT: {} ({}/{} checks at tol {})",
        if failures == 0 { "PASS" } else { "FAIL" },
        checks.len() - failures,
        checks.len(),
        fmt12(tol)
    );
    Ok(if failures == 0 { 0 } else { 1 })
}

fn cmd_metric(alpha: f64, s: f64) -> Result<i32, String> {
    let h = PtHamiltonian::new(s, alpha).map_err(|e| e.to_string())?;
    let eta = metric_operator(&h).map_err(|e| e.to_string())?;
    let (l1, l2) = eta.eigenvalues();
    let rho = eta.sqrt();
    let hp = hermitian_counterpart(&h, &eta).map_err(|e| e.to_string())?;

    let pseudo_residual = h
        .matrix()
        .adjoint()
        .mul(&eta.eta)
        .max_abs_diff(&eta.eta.mul(h.matrix()));
    let hermiticity_residual = hp.max_abs_diff(&hp.adjoint());

    println!("metric operator at alpha = {} rad, s = {}", fmt12(alpha), fmt12(s));
    println!();
    println!("eta (trace-normalized) =");
    print!("{}", fmt_matrix(&eta.eta));
    println!("eta eigenvalues: {}, {}", fmt12(l1), fmt12(l2));
    println!();
    println!("rho = eta^(1/2) =");
    print!("{}", fmt_matrix(&rho));
    println!();
    println!("Hermitian counterpart h' = rho H rho^-1 =");
    print!("{}", fmt_matrix(&hp));
    println!();
    println!("residual |H^dag eta - eta H| = {}", fmt12(pseudo_residual));
    println!("residual |h' - h'^dag|       = {}", fmt12(hermiticity_residual));
    Ok(0)
}

fn cmd_sample(alpha: f64, s: f64, bit: AliceBit, shots: u64, seed: u64) -> Result<i32, String> {
    let h = PtHamiltonian::new(s, alpha).map_err(|e| e.to_string())?;
    let est = sample_shots(&h, bit, shots, seed).map_err(|e| e.to_string())?;

    let state = run_protocol(&h, bit, Normalization::Conventional).map_err(|e| e.to_string())?;
    let (exact_plus, exact_minus) = bob_marginal(&joint_probabilities(&state));

    println!(
        "shot sampling at alpha = {} rad, s = {}, bit = {}",
        fmt12(alpha),
        fmt12(s),
        match bit {
            AliceBit::Plus => "plus",
            AliceBit::Minus => "minus",
        }
    );
    println!("shots = {}, seed = {}", est.shots, est.seed);
    println!();
    println!("p_hat(+y) = {}", fmt12(est.p_hat_plus));
    println!("p_hat(-y) = {}", fmt12(est.p_hat_minus));
    println!("stderr    = {}", fmt12(est.stderr));
    println!();
    println!("exact P(+y) = {}", fmt12(exact_plus));
    println!("exact P(-y) = {}", fmt12(exact_minus));
    println!(
        "deviation |p_hat - p| = {} ({} stderr)",
        fmt12((est.p_hat_plus - exact_plus).abs()),
        if est.stderr > 0.0 {
            fmt12((est.p_hat_plus - exact_plus).abs() / est.stderr)
        } else {
            "inf".to_string()
        }
    );
    Ok(0)
}
