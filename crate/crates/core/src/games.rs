//! The three-message referee protocol over a pair of channels.
//!
//! One prover (the yes side) hands the referee two input registers; the
//! referee picks i ∈ {0, 1} uniformly, pushes register i through channel Qᵢ,
//! and forwards the output to the opposing prover (the no side), who answers
//! with a bit b. The referee accepts when b ≠ i. If the channel images share
//! a point the yes side can pin acceptance at 1/2; if the images are far in
//! fidelity the no side can identify i and drive acceptance toward 0. Game
//! values, best responses, and equilibrium strategies all reduce to the
//! image-separation machinery.

use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{constant_channel, identity_channel, validate_channel, Channel};
use crate::error::{Error, Result};
use crate::operators::{
    sample_unitary, ComplexMatrix, DensityOperator, HermitianOperator,
};
use crate::separation::{
    helstrom, measurement_from_separator, solve_image_separation, BinaryMeasurement,
    SeparationConfig,
};

/// Promise status of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameLabel {
    Yes,
    No,
    Unknown,
}

/// A game instance: the channel pair, the promised fidelity-squared bound ε
/// for no instances, and the label under which it was generated.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "InstanceData", into = "InstanceData")]
pub struct GameInstance {
    q0: Channel,
    q1: Channel,
    epsilon: f64,
    label: GameLabel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceData {
    q0: Channel,
    q1: Channel,
    epsilon: f64,
    label: GameLabel,
}

impl TryFrom<InstanceData> for GameInstance {
    type Error = Error;
    fn try_from(d: InstanceData) -> Result<Self> {
        GameInstance::new(d.q0, d.q1, d.epsilon, d.label)
    }
}

impl From<GameInstance> for InstanceData {
    fn from(g: GameInstance) -> InstanceData {
        InstanceData {
            q0: g.q0,
            q1: g.q1,
            epsilon: g.epsilon,
            label: g.label,
        }
    }
}

impl GameInstance {
    pub fn new(q0: Channel, q1: Channel, epsilon: f64, label: GameLabel) -> Result<Self> {
        if q0.dim_in() != q1.dim_in() || q0.dim_out() != q1.dim_out() {
            return Err(Error::shape(format!(
                "instance channels must share dimensions, got {}→{} and {}→{}",
                q0.dim_in(),
                q0.dim_out(),
                q1.dim_in(),
                q1.dim_out()
            )));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParam(format!(
                "epsilon {epsilon} outside [0, 1]"
            )));
        }
        Ok(Self {
            q0,
            q1,
            epsilon,
            label,
        })
    }

    pub fn q0(&self) -> &Channel {
        &self.q0
    }

    pub fn q1(&self) -> &Channel {
        &self.q1
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn label(&self) -> GameLabel {
        self.label
    }

    pub fn dim_in(&self) -> usize {
        self.q0.dim_in()
    }

    pub fn dim_out(&self) -> usize {
        self.q0.dim_out()
    }
}

/// Yes-side strategy: the two input registers. Only the marginals matter —
/// the referee discards the unused register — so the pair is stored as two
/// independent states rather than a joint one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct YesStrategy {
    pub rho0: DensityOperator,
    pub rho1: DensityOperator,
}

impl YesStrategy {
    pub fn new(rho0: DensityOperator, rho1: DensityOperator) -> Self {
        Self { rho0, rho1 }
    }

    /// The honest strategy for generated yes instances: both registers
    /// maximally mixed, which the yes generators certify as a common image
    /// point.
    pub fn honest(g: &GameInstance) -> Self {
        Self {
            rho0: DensityOperator::maximally_mixed(g.q0.dim_in()),
            rho1: DensityOperator::maximally_mixed(g.q1.dim_in()),
        }
    }
}

/// No-side strategy: a binary measurement on the referee's output register;
/// the outcome index is the reported bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoStrategy {
    pub m: BinaryMeasurement,
}

impl NoStrategy {
    pub fn new(m: BinaryMeasurement) -> Self {
        Self { m }
    }

    pub fn coin(dim: usize) -> Self {
        Self {
            m: BinaryMeasurement::coin(dim),
        }
    }
}

/// Equilibrium summary: the game value, the certified image distance it came
/// from, and the strategies achieving it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameValueReport {
    pub value: f64,
    pub d: f64,
    pub gap: f64,
    pub eq_yes: YesStrategy,
    pub eq_no: NoStrategy,
}

/// Instance generator families. The no kinds use constant channels whose
/// image fidelity is known in closed form, so the promised ε is certified
/// by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstanceKind {
    /// Q0 = Q1 = identity on the given dimension.
    YesIdentical { dim: usize },
    /// Two dephase-then-rotate channels; both images contain I/d.
    YesSharedImage { dim: usize },
    /// Constants to |0⟩⟨0| and cos(angle)|0⟩ + sin(angle)|1⟩; ε = cos²(angle).
    NoConstantPair { angle: f64 },
    /// Constants to diag(1−δ, δ) and diag(δ, 1−δ); ε = 4δ(1−δ).
    NoDiagPair { delta: f64 },
}

/// Build a labeled instance from a generator family. Yes kinds certify a
/// common image point at the maximally mixed input pair; no kinds store the
/// closed-form image fidelity squared as ε.
pub fn generate_instance(kind: InstanceKind, seed: u64) -> Result<GameInstance> {
    match kind {
        InstanceKind::YesIdentical { dim } => {
            if dim < 2 {
                return Err(Error::InvalidParam("dimension must be at least 2".into()));
            }
            let q = identity_channel(dim);
            GameInstance::new(q.clone(), q, 1.0, GameLabel::Yes)
        }
        InstanceKind::YesSharedImage { dim } => {
            if dim < 2 {
                return Err(Error::InvalidParam("dimension must be at least 2".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q0 = dephase_then_rotate(dim, &mut rng)?;
            let q1 = dephase_then_rotate(dim, &mut rng)?;
            GameInstance::new(q0, q1, 1.0, GameLabel::Yes)
        }
        InstanceKind::NoConstantPair { angle } => {
            if !(angle > 0.0 && angle < std::f64::consts::PI) {
                return Err(Error::InvalidParam(format!(
                    "angle {angle} outside (0, π)"
                )));
            }
            let sigma0 = DensityOperator::basis_state(2, 0)?;
            let amps = [
                num_complex::Complex64::new(angle.cos(), 0.0),
                num_complex::Complex64::new(angle.sin(), 0.0),
            ];
            let sigma1 = DensityOperator::pure(&amps)?;
            let epsilon = angle.cos().powi(2);
            GameInstance::new(
                constant_channel(&sigma0)?,
                constant_channel(&sigma1)?,
                epsilon,
                GameLabel::No,
            )
        }
        InstanceKind::NoDiagPair { delta } => {
            if !(delta > 0.0 && delta < 0.5) {
                return Err(Error::InvalidParam(format!(
                    "delta {delta} outside (0, 1/2)"
                )));
            }
            let sigma0 = DensityOperator::from_probabilities(&[1.0 - delta, delta])?;
            let sigma1 = DensityOperator::from_probabilities(&[delta, 1.0 - delta])?;
            // Commuting states: F = Σ√(pᵢqᵢ) = 2√(δ(1−δ)).
            let epsilon = 4.0 * delta * (1.0 - delta);
            GameInstance::new(
                constant_channel(&sigma0)?,
                constant_channel(&sigma1)?,
                epsilon,
                GameLabel::No,
            )
        }
    }
}

/// ρ ↦ V·diag(ρ)·V†: the image is the V-rotated classical simplex, which
/// always contains I/d.
fn dephase_then_rotate(dim: usize, rng: &mut impl Rng) -> Result<Channel> {
    let v = sample_unitary(dim, rng);
    let kraus: Vec<ComplexMatrix> = (0..dim)
        .map(|i| {
            ComplexMatrix::from_fn(dim, dim, |r, c| {
                if c == i {
                    v.get(r, i)
                } else {
                    num_complex::Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    validate_channel(kraus, dim, dim)
}

/// Exact acceptance probability ½⟨E1, Q0(ρ0)⟩ + ½⟨E0, Q1(ρ1)⟩: the referee
/// accepts when the reported bit misses its coin.
pub fn acceptance_probability(
    g: &GameInstance,
    y: &YesStrategy,
    n: &NoStrategy,
) -> Result<f64> {
    if n.m.dim() != g.dim_out() {
        return Err(Error::shape(format!(
            "no-strategy dimension {} for output dimension {}",
            n.m.dim(),
            g.dim_out()
        )));
    }
    let x0 = g.q0.apply(&y.rho0)?;
    let x1 = g.q1.apply(&y.rho1)?;
    Ok(0.5 * n.m.e1().inner(x0.operator()) + 0.5 * n.m.e0().inner(x1.operator()))
}

/// Monte Carlo run of the protocol: sample i, push register i through Qᵢ,
/// sample the no-side bit from the Born probabilities, count accepts.
pub fn simulate_rounds(
    g: &GameInstance,
    y: &YesStrategy,
    n: &NoStrategy,
    rounds: u64,
    seed: u64,
) -> Result<(u64, f64)> {
    if rounds == 0 {
        return Err(Error::InvalidParam("rounds must be at least 1".into()));
    }
    // Outcome distributions are fixed by the strategies; resolve them once.
    let p1_given_0 = n.m.prob_one(&g.q0.apply(&y.rho0)?)?;
    let p1_given_1 = n.m.prob_one(&g.q1.apply(&y.rho1)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepts = 0u64;
    for _ in 0..rounds {
        let i = rng.gen_range(0..2u8);
        let p_one = if i == 0 { p1_given_0 } else { p1_given_1 };
        let b = u8::from(rng.gen::<f64>() < p_one);
        if b != i {
            accepts += 1;
        }
    }
    Ok((accepts, accepts as f64 / rounds as f64))
}

/// The no side's best reply to a fixed yes strategy: the optimal
/// discrimination measurement on (Q0(ρ0), Q1(ρ1)) and the rejection
/// probability ½ + ¼‖Q0(ρ0) − Q1(ρ1)‖_tr it achieves.
pub fn best_response_no(g: &GameInstance, y: &YesStrategy) -> Result<(NoStrategy, f64)> {
    let x0 = g.q0.apply(&y.rho0)?;
    let x1 = g.q1.apply(&y.rho1)?;
    let (m, reject_prob) = helstrom(&x0, &x1)?;
    Ok((NoStrategy::new(m), reject_prob))
}

/// The yes side's best reply to a fixed measurement: acceptance is linear in
/// each register, so each optimum is the top eigenprojector of the pulled-
/// back acceptance observable.
pub fn best_response_yes(g: &GameInstance, n: &NoStrategy) -> Result<(YesStrategy, f64)> {
    if n.m.dim() != g.dim_out() {
        return Err(Error::shape(format!(
            "no-strategy dimension {} for output dimension {}",
            n.m.dim(),
            g.dim_out()
        )));
    }
    let a0 = g.q0.adjoint_apply(n.m.e1())?;
    let a1 = g.q1.adjoint_apply(n.m.e0())?;
    let s0 = a0.eig()?;
    let s1 = a1.eig()?;
    let accept_prob = 0.5 * s0.lambda_max() + 0.5 * s1.lambda_max();
    Ok((
        YesStrategy::new(s0.top_projector(), s1.top_projector()),
        accept_prob,
    ))
}

/// Solve the instance: run the image separation, read the equilibrium
/// strategies off the separator and the primal witness, and certify the
/// value two ways — against ½ − d/4 within gap/4, and against the
/// best-response sandwich.
pub fn game_value(g: &GameInstance, cfg: &SeparationConfig) -> Result<GameValueReport> {
    let sep = solve_image_separation(&g.q0, &g.q1, cfg)?;
    let eq_no = NoStrategy::new(sep.measurement.clone());
    let eq_yes = YesStrategy::new(sep.rho0.clone(), sep.rho1.clone());
    let value = acceptance_probability(g, &eq_yes, &eq_no)?.clamp(0.0, 1.0);

    let target = 0.5 - sep.d_dual / 4.0;
    if (value - target).abs() > sep.gap / 4.0 + 1e-6 {
        return Err(Error::CertificationFailed(format!(
            "value {value} deviates from 1/2 - d/4 = {target} beyond gap/4 = {}",
            sep.gap / 4.0
        )));
    }

    let (_, reject_vs_eq_yes) = best_response_no(g, &eq_yes)?;
    let floor = 1.0 - reject_vs_eq_yes;
    let (_, ceiling) = best_response_yes(g, &eq_no)?;
    if value < floor - 1e-9 || value > ceiling + 1e-9 {
        return Err(Error::CertificationFailed(format!(
            "value {value} escapes the best-response sandwich [{floor}, {ceiling}]"
        )));
    }

    Ok(GameValueReport {
        value,
        d: sep.d_dual,
        gap: sep.gap,
        eq_yes,
        eq_no,
    })
}

/// Acceptance observable on the joint input space (register 0 slow):
/// M = ½[Q0†(E1) ⊗ I + I ⊗ Q1†(E0)], so ⟨M, ρ0 ⊗ ρ1⟩ is exactly the
/// acceptance probability and λ_max(M) the yes side's best response value.
pub fn effective_observable(g: &GameInstance, n: &NoStrategy) -> Result<HermitianOperator> {
    if n.m.dim() != g.dim_out() {
        return Err(Error::shape(format!(
            "no-strategy dimension {} for output dimension {}",
            n.m.dim(),
            g.dim_out()
        )));
    }
    let a0 = g.q0.adjoint_apply(n.m.e1())?;
    let a1 = g.q1.adjoint_apply(n.m.e0())?;
    let i0 = HermitianOperator::identity(g.q0.dim_in());
    let i1 = HermitianOperator::identity(g.q1.dim_in());
    Ok(a0.tensor(&i1).add(&i0.tensor(&a1)).scale(0.5))
}

/// Random yes strategy (pair of sampled states) for property suites.
pub fn sample_yes_strategy(g: &GameInstance, rng: &mut impl Rng) -> YesStrategy {
    YesStrategy::new(
        crate::operators::sample_density(g.q0.dim_in(), rng),
        crate::operators::sample_density(g.q1.dim_in(), rng),
    )
}

/// Random no strategy (sampled POVM) for property suites.
pub fn sample_no_strategy(g: &GameInstance, rng: &mut impl Rng) -> NoStrategy {
    NoStrategy::new(crate::separation::sample_measurement(g.dim_out(), rng))
}

/// The instance's separating measurement: the no strategy built from the
/// separator of a converged solve.
pub fn separator_strategy(g: &GameInstance, cfg: &SeparationConfig) -> Result<NoStrategy> {
    let sep = solve_image_separation(&g.q0, &g.q1, cfg)?;
    Ok(NoStrategy::new(measurement_from_separator(&sep.separator)?))
}
