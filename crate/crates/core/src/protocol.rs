//! The entangled-pair signaling protocol, end to end.
//!
//! Alice and Bob share the Bell state `(|00> + |11>)/√2` (equivalently the
//! equal mixture of `|+x+x>` and `|-x-x>`). To send one bit, Alice applies
//! `A₊ = I` or `A₋ = σ_x`, then evolves her half under her PT-symmetric
//! `H(s, α)` for the time `τ = π/ΔE`; Bob idles (his identity evolution is
//! a global phase and is dropped). The joint state is renormalized once,
//! globally, under a selectable convention, and both parties measure in the
//! σ_y basis with conventional projectors.
//!
//! Because `U(τ)` is not 2-norm unitary for `sin α ≠ 0`, Bob's marginal
//! distribution depends on Alice's choice. The *signaling gap*
//! `P(+y | A₊) − P(+y | A₋)` comes out as `cos ε = −2 sin α/(1 + sin²α)`,
//! nonzero exactly when `H` is non-Hermitian. The phase bookkeeping
//! (`φ₊, φ₋, ε`) follows the closed-form final states; the identity
//! `sin(2φ₊ − ε) = 1` holds for every `α` and reduces the analytic marginal
//! `½[1 ± cos ε·sin(2φ₊ − ε)]` to `½[1 ± cos ε]`.
//!
//! Basis ordering is Alice ⊗ Bob with `|0>, |1>` per site; the σ_y outcome
//! convention is `|±y> = (|0> ± i|1>)/√2`.

use crate::linalg::{c64, sigma_x, CMatrix, CVector, Complex64, ONE, ZERO};
use crate::pt::{eigensystem, evolution_operator, MetricOperator, PtHamiltonian};
use crate::{Error, Result};

/// Which rule renormalizes the joint state after Alice's evolution.
#[derive(Debug, Clone, PartialEq)]
pub enum Normalization {
    /// Unit 2-norm (conventional quantum mechanics).
    Conventional,
    /// Unit norm in the `η ⊗ I` inner product: Alice's half is measured in
    /// her metric, Bob's conventionally.
    PtMetric(MetricOperator),
}

/// Alice's one-bit choice of local operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AliceBit {
    /// `A₊ = I`
    Plus,
    /// `A₋ = σ_x`
    Minus,
}

/// A σ_y-type measurement outcome on either side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

/// A pure two-qubit state with the normalization convention it satisfies
/// and, when produced by the protocol, the Alice setting that made it.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    amplitudes: CVector,
    normalization: Normalization,
    alice_setting: AliceBit,
}

impl BipartiteState {
    /// A conventionally normalized two-qubit state from raw amplitudes
    /// (ordering `|ab>` with Alice slow): the input is rescaled to unit
    /// 2-norm.
    pub fn from_amplitudes(amplitudes: CVector) -> Result<Self> {
        if amplitudes.dim() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "bipartite state needs 4 amplitudes, got {}",
                amplitudes.dim()
            )));
        }
        if !amplitudes.is_finite() {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let n = amplitudes.norm();
        if n <= 0.0 {
            return Err(Error::InvalidRange("cannot normalize the zero state".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.scale(c64(1.0 / n, 0.0)),
            normalization: Normalization::Conventional,
            alice_setting: AliceBit::Plus,
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    /// The Alice setting this state was prepared with ([`AliceBit::Plus`]
    /// for states not produced by [`run_protocol`]).
    pub fn alice_setting(&self) -> AliceBit {
        self.alice_setting
    }
}

/// The shared Bell state `(|00> + |11>)/√2`, conventionally normalized.
pub fn bell_state() -> BipartiteState {
    let inv = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    BipartiteState {
        amplitudes: CVector::new(vec![inv, ZERO, ZERO, inv]),
        normalization: Normalization::Conventional,
        alice_setting: AliceBit::Plus,
    }
}

/// Alice's encoding operator: identity for [`AliceBit::Plus`], σ_x for
/// [`AliceBit::Minus`].
pub fn alice_operator(bit: AliceBit) -> CMatrix {
    match bit {
        AliceBit::Plus => CMatrix::identity(2),
        AliceBit::Minus => sigma_x(),
    }
}

/// Apply `(m ⊗ I_bob)` to a joint vector with Alice as the slow index.
fn apply_alice(m: &CMatrix, v: &CVector, bob_dim: usize) -> CVector {
    let alice_dim = m.rows();
    assert_eq!(v.dim(), alice_dim * bob_dim);
    let mut out = CVector::zeros(v.dim());
    for a in 0..alice_dim {
        for b in 0..bob_dim {
            let mut acc = ZERO;
            for ap in 0..alice_dim {
                acc += m[(a, ap)] * v[ap * bob_dim + b];
            }
            out[a * bob_dim + b] = acc;
        }
    }
    out
}

/// Norm of a joint vector in the `η ⊗ I` inner product.
fn metric_joint_norm(v: &CVector, eta: &CMatrix, bob_dim: usize) -> f64 {
    let alice_dim = eta.rows();
    assert_eq!(v.dim(), alice_dim * bob_dim);
    let mut acc = ZERO;
    for i in 0..alice_dim {
        for j in 0..alice_dim {
            let mut overlap = ZERO; // <row_i | row_j>
            for k in 0..bob_dim {
                overlap += v[i * bob_dim + k].conj() * v[j * bob_dim + k];
            }
            acc += eta[(i, j)] * overlap;
        }
    }
    debug_assert!(acc.im.abs() <= 1e-10 * acc.re.abs().max(1.0));
    acc.re.sqrt()
}

/// Run the protocol for one choice of Alice's bit: apply `(U(τ)·A±) ⊗ I` to
/// the Bell state and renormalize once, globally, under `norm`.
pub fn run_protocol(
    h: &PtHamiltonian,
    bit: AliceBit,
    norm: Normalization,
) -> Result<BipartiteState> {
    if h.is_trivial() {
        return Err(Error::TrivialHamiltonian);
    }
    let tau = eigensystem(h)?.tau;
    let u = evolution_operator(h, tau)?;
    let op = u.mul(&alice_operator(bit));

    let raw = apply_alice(&op, bell_state().amplitudes(), 2);
    let scale = match &norm {
        Normalization::Conventional => raw.norm(),
        Normalization::PtMetric(eta) => metric_joint_norm(&raw, &eta.eta, 2),
    };
    if scale <= 0.0 || !scale.is_finite() {
        return Err(Error::NonFinite("protocol state norm"));
    }
    Ok(BipartiteState {
        amplitudes: raw.scale(c64(1.0 / scale, 0.0)),
        normalization: norm,
        alice_setting: bit,
    })
}

/// The phases `φ₊, φ₋, ε` of the closed-form final states, extracted on the
/// principal branch (−π, π] from
/// `e^{iφ±} = (sin α ∓ i)/√(1 + sin²α)` and
/// `e^{iε} = (−2 sin α + i cos²α)/(1 + sin²α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTriple {
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub epsilon: f64,
}

pub fn phases(alpha: f64) -> PhaseTriple {
    let sa = alpha.sin();
    let ca2 = alpha.cos().powi(2);
    PhaseTriple {
        phi_plus: (-1.0f64).atan2(sa),
        phi_minus: 1.0f64.atan2(sa),
        epsilon: ca2.atan2(-2.0 * sa),
    }
}

/// Joint σ_y ⊗ σ_y outcome distribution `P(a, b)` for one Alice setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    pub alice_setting: AliceBit,
    probs: [[f64; 2]; 2], // [alice outcome][bob outcome], index 0 = +y
}

impl ProbabilityTable {
    pub fn p(&self, a: Outcome, b: Outcome) -> f64 {
        self.probs[a.index()][b.index()]
    }

    pub fn entries(&self) -> impl Iterator<Item = ((Outcome, Outcome), f64)> + '_ {
        const OUTCOMES: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];
        OUTCOMES.into_iter().flat_map(move |a| {
            OUTCOMES.into_iter().map(move |b| ((a, b), self.p(a, b)))
        })
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().sum()
    }
}

/// A single-qubit measurement basis for Bob, as an orthonormal pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BobBasis {
    pub label: String,
    pub plus: CVector,
    pub minus: CVector,
}

impl BobBasis {
    /// Eigenbasis of `n̂·σ` for the Bloch direction
    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        let (st, ct) = (theta / 2.0).sin_cos();
        let ph = Complex64::from_polar(1.0, phi);
        BobBasis {
            label: format!("bloch(theta={theta:.6}, phi={phi:.6})"),
            plus: CVector::new(vec![c64(ct, 0.0), ph * st]),
            minus: CVector::new(vec![c64(st, 0.0), -ph * ct]),
        }
    }

    pub fn x() -> Self {
        let mut b = Self::from_bloch(std::f64::consts::FRAC_PI_2, 0.0);
        b.label = "sigma_x".into();
        b
    }

    /// The protocol's fixed basis: `|±y> = (|0> ± i|1>)/√2`.
    pub fn y() -> Self {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        BobBasis {
            label: "sigma_y".into(),
            plus: CVector::new(vec![c64(inv, 0.0), c64(0.0, inv)]),
            minus: CVector::new(vec![c64(inv, 0.0), c64(0.0, -inv)]),
        }
    }

    pub fn z() -> Self {
        let mut b = Self::from_bloch(0.0, 0.0);
        b.label = "sigma_z".into();
        b
    }
}

fn alice_y_states() -> [CVector; 2] {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    [
        CVector::new(vec![c64(inv, 0.0), c64(0.0, inv)]),
        CVector::new(vec![c64(inv, 0.0), c64(0.0, -inv)]),
    ]
}

/// Outcome distribution with Alice in the σ_y basis and Bob in `basis`.
///
/// Probabilities are conventional Born weights `|<a, b|ψ>|²` divided by the
/// state's 2-norm squared, so the table sums to one for either
/// normalization convention; for a metric-normalized state this is the
/// distribution Bob's conventional measurement actually produces.
pub fn joint_probabilities_in_basis(state: &BipartiteState, basis: &BobBasis) -> ProbabilityTable {
    let psi = state.amplitudes();
    let norm_sq: f64 = psi.as_slice().iter().map(|c| c.norm_sqr()).sum();

    let alice = alice_y_states();
    let bob = [basis.plus.clone(), basis.minus.clone()];
    let mut probs = [[0.0; 2]; 2];
    for (ai, a) in alice.iter().enumerate() {
        for (bi, b) in bob.iter().enumerate() {
            let amp = a.tensor(b).inner(psi);
            probs[ai][bi] = amp.norm_sqr() / norm_sq;
        }
    }
    ProbabilityTable { alice_setting: state.alice_setting, probs }
}

/// The protocol measurement: both parties in the σ_y basis.
pub fn joint_probabilities(state: &BipartiteState) -> ProbabilityTable {
    joint_probabilities_in_basis(state, &BobBasis::y())
}

/// Bob's marginal `(P(+y), P(−y))`: column sums over Alice's outcomes.
pub fn bob_marginal(table: &ProbabilityTable) -> (f64, f64) {
    let plus = table.p(Outcome::Plus, Outcome::Plus) + table.p(Outcome::Minus, Outcome::Plus);
    let minus = table.p(Outcome::Plus, Outcome::Minus) + table.p(Outcome::Minus, Outcome::Minus);
    (plus, minus)
}

/// Bob's reduced density matrix in conventional quantum mechanics: the
/// 2-norm-normalized state's density operator traced over Alice.
pub fn bob_reduced_state(state: &BipartiteState) -> CMatrix {
    let psi = state.amplitudes();
    let norm_sq: f64 = psi.as_slice().iter().map(|c| c.norm_sqr()).sum();
    let mut rho = CMatrix::zeros(2, 2);
    for k in 0..2 {
        for l in 0..2 {
            let mut acc = ZERO;
            for i in 0..2 {
                acc += psi[i * 2 + k] * psi[i * 2 + l].conj();
            }
            rho[(k, l)] = acc / norm_sq;
        }
    }
    rho
}

/// Signed signaling gap through the full numeric pipeline:
/// `P(+y | A₊) − P(+y | A₋)`.
pub fn signaling_gap_numeric(h: &PtHamiltonian, norm: Normalization) -> Result<f64> {
    let plus = run_protocol(h, AliceBit::Plus, norm.clone())?;
    let minus = run_protocol(h, AliceBit::Minus, norm)?;
    let (p_plus, _) = bob_marginal(&joint_probabilities(&plus));
    let (m_plus, _) = bob_marginal(&joint_probabilities(&minus));
    Ok(p_plus - m_plus)
}

/// Closed-form signed gap `cos ε · sin(2φ₊ − ε)`. The identity
/// `sin(2φ₊ − ε) = 1` makes this `−2 sin α/(1 + sin²α)`; both factors are
/// evaluated explicitly so the formula is checked as written. Total in `α`
/// (periodic through `sin α`), vanishing exactly at `sin α = 0`. Note that
/// this includes every multiple of π, where `H(s, nπ) = ±s·σ_x` is
/// Hermitian, not only the even ones.
pub fn signaling_gap_analytic(alpha: f64) -> f64 {
    let ph = phases(alpha);
    ph.epsilon.cos() * (2.0 * ph.phi_plus - ph.epsilon).sin()
}

/// Gap computed with Alice's system embedded in `n` dimensions
/// (`H ⊕ filler·I`, `A₋ = σ_x ⊕ I`), conventional normalization. Exercises
/// the statement that higher-dimensional embeddings reproduce the two-level
/// statistics exactly.
pub fn signaling_gap_embedded(h: &PtHamiltonian, n: usize, filler: f64) -> Result<f64> {
    if h.is_trivial() {
        return Err(Error::TrivialHamiltonian);
    }
    let tau = eigensystem(h)?.tau;
    let u2 = evolution_operator(h, tau)?;

    // U for the embedded Hamiltonian: the 2x2 block evolves under U(τ),
    // the filler levels pick up a pure phase e^{-i·filler·τ}.
    let mut u = CMatrix::zeros(n, n);
    for i in 0..2 {
        for j in 0..2 {
            u[(i, j)] = u2[(i, j)];
        }
    }
    let tail_phase = Complex64::from_polar(1.0, -filler * tau);
    for i in 2..n {
        u[(i, i)] = tail_phase;
    }

    // A₋ acts as σ_x on the embedded qubit and identity on the tail.
    let mut a_minus = CMatrix::identity(n);
    a_minus[(0, 0)] = ZERO;
    a_minus[(1, 1)] = ZERO;
    a_minus[(0, 1)] = ONE;
    a_minus[(1, 0)] = ONE;

    // Bell state on the embedded qubit ⊗ Bob.
    let inv = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut bell = CVector::zeros(2 * n);
    bell[0] = inv; // |0>_A |0>_B
    bell[2 + 1] = inv; // |1>_A |1>_B

    let bob_plus_y = BobBasis::y().plus;
    let mut marginals = [0.0; 2];
    for (idx, op) in [u.clone(), u.mul(&a_minus)].iter().enumerate() {
        let raw = apply_alice(op, &bell, 2);
        let norm_sq: f64 = raw.as_slice().iter().map(|c| c.norm_sqr()).sum();
        // P(+y) = Σ_a |<+y | bob block a>|²
        let mut p = 0.0;
        for a in 0..n {
            let block = CVector::new(vec![raw[2 * a], raw[2 * a + 1]]);
            p += bob_plus_y.inner(&block).norm_sqr();
        }
        marginals[idx] = p / norm_sq;
    }
    Ok(marginals[0] - marginals[1])
}
