//! Self-verification suite: every module's invariant checks plus the eight
//! headline properties, runnable in one pass and printable as a table.
//!
//! Each check is an ordinary function returning `Ok(detail)` or
//! `Err(failure)`, so the same code backs the `selftest` CLI subcommand and
//! the acceptance integration tests.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::random_channel;
use crate::games::{
    acceptance_probability, best_response_yes, effective_observable, game_value,
    generate_instance, sample_no_strategy, sample_yes_strategy, simulate_rounds, GameInstance,
    InstanceKind, NoStrategy, YesStrategy,
};
use crate::operators::{
    fidelity, positive_negative_parts, sample_density, sample_hermitian, sample_pure,
    ComplexMatrix, DensityOperator, HermitianOperator,
};
use crate::repetition::{
    discrimination_certificate, error_schedule, repeated_observable, seesaw_lower_bound,
    soundness_repeated, RepetitionMode, RepetitionReport,
};
use crate::separation::{
    discrimination_success, helstrom, solve_image_separation, SeparationConfig,
};

type Check = fn(u64) -> Result<String, String>;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

/// Results of a full selftest pass.
#[derive(Debug, Clone)]
pub struct SelfTestReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    /// Fixed-width pass/fail table.
    pub fn render(&self) -> String {
        let width = self
            .outcomes
            .iter()
            .map(|o| o.name.len())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for o in &self.outcomes {
            let status = if o.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{status}  {name:<width$}  {ms:>6} ms  {detail}\n",
                name = o.name,
                ms = o.millis,
                detail = o.detail
            ));
        }
        let (passed, total) = (
            self.outcomes.iter().filter(|o| o.passed).count(),
            self.outcomes.len(),
        );
        out.push_str(&format!("{passed}/{total} checks passed\n"));
        out
    }
}

/// Every check in suite order.
pub fn all_checks() -> Vec<(&'static str, Check)> {
    vec![
        ("operators.norm-order", check_norm_order),
        ("operators.sign-duality-witness", check_sign_duality_witness),
        ("operators.fidelity-trace-bounds", check_fidelity_trace_bounds),
        ("operators.positive-negative-parts", check_positive_negative_parts),
        ("channels.adjointness", check_channel_adjointness),
        ("channels.choi-certificates", check_choi_certificates),
        ("games.acceptance-affine", check_acceptance_affine),
        ("games.observable-best-response", check_observable_best_response),
        ("completeness-half", check_completeness_half),
        ("soundness-epsilon", check_soundness_epsilon),
        ("separation-guarantee", check_separation_guarantee),
        ("solver-certification", check_solver_certification),
        ("helstrom-exactness", check_helstrom_exactness),
        ("repetition-bounds", check_repetition_bounds),
        ("monte-carlo-consistency", check_monte_carlo_consistency),
    ]
}

/// Run the whole suite with one base seed.
pub fn run_all(seed: u64) -> SelfTestReport {
    let mut outcomes = Vec::new();
    for (name, check) in all_checks() {
        let start = Instant::now();
        let result = check(seed);
        let millis = start.elapsed().as_millis();
        let (passed, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        outcomes.push(CheckOutcome {
            name,
            passed,
            detail,
            millis,
        });
    }
    SelfTestReport { outcomes }
}

fn err(msg: String) -> Result<String, String> {
    Err(msg)
}

/// Operator norm ≤ trace norm ≤ dim · operator norm on sampled operators.
pub fn check_norm_order(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e6f726d);
    let mut count = 0;
    for dim in [2usize, 3, 4] {
        for _ in 0..100 {
            let h = sample_hermitian(dim, &mut rng);
            let op = h.matrix().operator_norm();
            let tr = h.matrix().trace_norm();
            if op > tr + 1e-9 || tr > dim as f64 * op + 1e-9 {
                return err(format!("norm ordering violated at dim {dim}: op {op}, tr {tr}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} sampled operators ordered"))
}

/// The sign operator of a Hermitian A (zero eigenvalues sent to +1) has unit
/// operator norm and pairs with A to exactly the trace norm: an explicit
/// achiever of the norm duality.
pub fn check_sign_duality_witness(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7369676e);
    let mut count = 0;
    for dim in [2usize, 3, 4] {
        for _ in 0..334 {
            let a = sample_hermitian(dim, &mut rng);
            let spec = a.eig().map_err(|e| e.to_string())?;
            let s = spec.map_eigenvalues(|l| if l < 0.0 { -1.0 } else { 1.0 });
            let pairing = s.inner(&a);
            let tn = a.matrix().trace_norm();
            if (pairing - tn).abs() > 1e-9 {
                return err(format!("⟨S, A⟩ = {pairing} misses trace norm {tn}"));
            }
            let s_norm = s.matrix().operator_norm();
            if (s_norm - 1.0).abs() > 1e-9 {
                return err(format!("sign operator norm {s_norm} is not 1"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} duality witnesses exact to 1e-9"))
}

/// Fidelity vs trace distance on 1000 sampled pairs: the lower bound
/// 1 − t/2 ≤ F and the squared-form upper bound F² ≤ 1 − (t/2)² are
/// asserted with 1e-8 slack. The alternative upper bound F ≤ √(1 − t/4)
/// (no square on the distance) is evaluated on the same samples and its
/// status is recorded, not asserted — it genuinely fails on high-fidelity
/// near-pure pairs.
pub fn check_fidelity_trace_bounds(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x66616374);
    let mut printed_form_violations = 0usize;
    let total = 1000usize;
    for i in 0..total {
        let dim = [2usize, 3, 4][i % 3];
        let (rho, xi) = if i % 10 < 7 {
            (sample_density(dim, &mut rng), sample_density(dim, &mut rng))
        } else {
            near_pure_overlapping_pair(dim, &mut rng)
        };
        let f = fidelity(&rho, &xi).map_err(|e| e.to_string())?;
        let t = (rho.matrix() - xi.matrix()).trace_norm();
        if 1.0 - t / 2.0 > f + 1e-8 {
            return err(format!("lower bound failed: 1 - t/2 = {} > F = {f}", 1.0 - t / 2.0));
        }
        if f * f > 1.0 - (t / 2.0) * (t / 2.0) + 1e-8 {
            return err(format!(
                "squared upper bound failed: F² = {} > 1 - (t/2)² = {}",
                f * f,
                1.0 - (t / 2.0) * (t / 2.0)
            ));
        }
        if f > (1.0 - t / 4.0).max(0.0).sqrt() + 1e-8 {
            printed_form_violations += 1;
        }
    }
    Ok(format!(
        "{total} pairs within 1e-8; unsquared-distance upper bound violated on {printed_form_violations}/{total} (recorded, not asserted)"
    ))
}

/// Two-overlapping near-pure states, the regime separating the two upper
/// bound forms.
fn near_pure_overlapping_pair(
    dim: usize,
    rng: &mut impl Rng,
) -> (DensityOperator, DensityOperator) {
    let base = sample_pure(dim, rng);
    let angle = 0.05 + 0.4 * rng.gen::<f64>();
    let other = sample_pure(dim, rng);
    // Rotate `base` slightly toward an orthogonalized companion.
    let overlap: num_complex::Complex64 =
        base.iter().zip(&other).map(|(a, b)| a.conj() * b).sum();
    let mut perp: Vec<num_complex::Complex64> = other
        .iter()
        .zip(&base)
        .map(|(o, b)| o - overlap * b)
        .collect();
    let norm: f64 = perp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-8 {
        return (sample_density(dim, rng), sample_density(dim, rng));
    }
    for z in perp.iter_mut() {
        *z /= norm;
    }
    let rotated: Vec<num_complex::Complex64> = base
        .iter()
        .zip(&perp)
        .map(|(b, p)| b * angle.cos() + p * angle.sin())
        .collect();
    let mix = 0.02 * rng.gen::<f64>();
    let soften = |amps: &[num_complex::Complex64]| {
        let pure = DensityOperator::pure(amps).expect("unit vector");
        let mixed = &pure.matrix().scale_re(1.0 - mix)
            + &ComplexMatrix::identity(dim).scale_re(mix / dim as f64);
        DensityOperator::new(HermitianOperator::new(mixed).expect("convex mix is Hermitian"))
            .expect("convex mix of densities is a density")
    };
    (soften(&base), soften(&rotated))
}

/// H = K⁺ − K⁻ with orthogonal PSD parts; tr(K⁺ + K⁻) = ‖H‖_tr; and for
/// contractions K⁺ + K⁻ ⪯ I.
pub fn check_positive_negative_parts(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x70617274);
    for _ in 0..100 {
        let h = sample_hermitian(3, &mut rng);
        let (p, m) = positive_negative_parts(&h).map_err(|e| e.to_string())?;
        if p.sub(&m).matrix().max_abs_diff(h.matrix()) > 1e-9 {
            return err("decomposition mismatch".into());
        }
        if p.inner(&m).abs() > 1e-10 {
            return err("parts are not orthogonal".into());
        }
        if (p.trace_re() + m.trace_re() - h.matrix().trace_norm()).abs() > 1e-9 {
            return err("part traces miss the trace norm".into());
        }
        let k = crate::operators::clip_to_unit_ball(&h).map_err(|e| e.to_string())?;
        let (kp, km) = positive_negative_parts(&k).map_err(|e| e.to_string())?;
        let slack = HermitianOperator::identity(3).sub(&kp.add(&km));
        let min = slack.eig().map_err(|e| e.to_string())?.lambda_min();
        if min < -1e-9 {
            return err(format!("K⁺ + K⁻ exceeds identity by {min:.3e}"));
        }
    }
    Ok("100 decompositions verified".into())
}

/// ⟨Q†(H), ρ⟩ = ⟨H, Q(ρ)⟩ on sampled channels, observables, and states.
pub fn check_channel_adjointness(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x61646a74);
    for _ in 0..100 {
        let ch = random_channel(2, 3, 2, &mut rng);
        let rho = sample_density(2, &mut rng);
        let h = sample_hermitian(3, &mut rng);
        let lhs = ch
            .adjoint_apply(&h)
            .map_err(|e| e.to_string())?
            .inner(rho.operator());
        let rhs = h.inner(ch.apply(&rho).map_err(|e| e.to_string())?.operator());
        if (lhs - rhs).abs() > 1e-10 {
            return err(format!("adjointness broken: {lhs} vs {rhs}"));
        }
    }
    Ok("100 triples within 1e-10".into())
}

/// Choi matrices of generated channels are PSD with identity reduction.
pub fn check_choi_certificates(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x63686f69);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let ch = random_channel(2, 2, 1 + (rng.gen::<u8>() % 4) as usize, &mut rng);
        let residual = ch.choi().certificate_residual().map_err(|e| e.to_string())?;
        worst = worst.max(residual);
        if residual > 1e-9 {
            return err(format!("Choi certificate residual {residual:.3e}"));
        }
    }
    Ok(format!("20 channels, worst residual {worst:.2e}"))
}

/// Acceptance probability is affine in ρ₀, ρ₁, and E0 separately.
pub fn check_acceptance_affine(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6166666e);
    let g = generate_instance(InstanceKind::YesSharedImage { dim: 2 }, seed)
        .map_err(|e| e.to_string())?;
    for _ in 0..50 {
        let ya = sample_yes_strategy(&g, &mut rng);
        let yb = sample_yes_strategy(&g, &mut rng);
        let na = sample_no_strategy(&g, &mut rng);
        let nb = sample_no_strategy(&g, &mut rng);
        let t = rng.gen::<f64>();

        let mix_state = |a: &DensityOperator, b: &DensityOperator| {
            DensityOperator::new(
                HermitianOperator::new(
                    &a.matrix().scale_re(t) + &b.matrix().scale_re(1.0 - t),
                )
                .expect("mixture is Hermitian"),
            )
            .expect("mixture is a density")
        };
        let p = |y: &YesStrategy, n: &NoStrategy| {
            acceptance_probability(&g, y, n).expect("dims agree")
        };

        let y_mix0 = YesStrategy::new(mix_state(&ya.rho0, &yb.rho0), ya.rho1.clone());
        let direct = p(&y_mix0, &na);
        let affine = t * p(&ya, &na)
            + (1.0 - t) * p(&YesStrategy::new(yb.rho0.clone(), ya.rho1.clone()), &na);
        if (direct - affine).abs() > 1e-10 {
            return err(format!("not affine in rho0: {direct} vs {affine}"));
        }

        let y_mix1 = YesStrategy::new(ya.rho0.clone(), mix_state(&ya.rho1, &yb.rho1));
        let direct = p(&y_mix1, &na);
        let affine = t * p(&ya, &na)
            + (1.0 - t) * p(&YesStrategy::new(ya.rho0.clone(), yb.rho1.clone()), &na);
        if (direct - affine).abs() > 1e-10 {
            return err(format!("not affine in rho1: {direct} vs {affine}"));
        }

        let e0_mix = HermitianOperator::new(
            &na.m.e0().matrix().scale_re(t) + &nb.m.e0().matrix().scale_re(1.0 - t),
        )
        .expect("mixture is Hermitian");
        let e1_mix = HermitianOperator::identity(2).sub(&e0_mix);
        let n_mix = NoStrategy::new(
            crate::separation::BinaryMeasurement::new(e0_mix, e1_mix)
                .expect("mixture of POVMs is a POVM"),
        );
        let direct = p(&ya, &n_mix);
        let affine = t * p(&ya, &na) + (1.0 - t) * p(&ya, &nb);
        if (direct - affine).abs() > 1e-10 {
            return err(format!("not affine in E0: {direct} vs {affine}"));
        }
    }
    Ok("50 convex-combination triples within 1e-10".into())
}

/// λ_max of the acceptance observable equals the yes side's best-response
/// value.
pub fn check_observable_best_response(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f627376);
    for trial in 0..20 {
        let g = generate_instance(InstanceKind::YesSharedImage { dim: 2 }, seed + trial)
            .map_err(|e| e.to_string())?;
        let n = sample_no_strategy(&g, &mut rng);
        let m = effective_observable(&g, &n).map_err(|e| e.to_string())?;
        let lmax = m.eig().map_err(|e| e.to_string())?.lambda_max();
        let (_, best) = best_response_yes(&g, &n).map_err(|e| e.to_string())?;
        if (lmax - best).abs() > 1e-9 {
            return err(format!("λ_max {lmax} vs best response {best}"));
        }
    }
    Ok("20 observables matched within 1e-9".into())
}

fn yes_instances(seed: u64) -> Result<Vec<GameInstance>, String> {
    let mut out = Vec::new();
    for dim in [2usize, 3, 4] {
        out.push(generate_instance(InstanceKind::YesIdentical { dim }, seed).map_err(|e| e.to_string())?);
    }
    for (i, dim) in [2usize, 2, 3, 3, 4, 4, 4].iter().enumerate() {
        out.push(
            generate_instance(InstanceKind::YesSharedImage { dim: *dim }, seed + i as u64)
                .map_err(|e| e.to_string())?,
        );
    }
    Ok(out)
}

fn no_instances(_seed: u64) -> Result<Vec<GameInstance>, String> {
    let mut out = Vec::new();
    for i in 0..10 {
        let delta = 0.01 + 0.04 * i as f64;
        out.push(generate_instance(InstanceKind::NoDiagPair { delta }, 0).map_err(|e| e.to_string())?);
    }
    for i in 0..10 {
        let angle = 0.15 + i as f64 * (std::f64::consts::FRAC_PI_2 - 0.15) / 9.0;
        out.push(
            generate_instance(InstanceKind::NoConstantPair { angle }, 0).map_err(|e| e.to_string())?,
        );
    }
    Ok(out)
}

/// Ten generated yes instances: game value ½ within 1e-6, and the honest
/// strategy holds acceptance at ½ − 1e-9 against 50 sampled measurements
/// each.
pub fn check_completeness_half(seed: u64) -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636f6d70);
    let cfg = SeparationConfig::default();
    let instances = yes_instances(seed)?;
    for (idx, g) in instances.iter().enumerate() {
        let report = game_value(g, &cfg).map_err(|e| format!("instance {idx}: {e}"))?;
        if (report.value - 0.5).abs() > 1e-6 {
            return err(format!("instance {idx}: value {} is not 1/2", report.value));
        }
        let honest = YesStrategy::honest(g);
        for _ in 0..50 {
            let n = sample_no_strategy(g, &mut rng);
            let p = acceptance_probability(g, &honest, &n).map_err(|e| e.to_string())?;
            if p < 0.5 - 1e-9 {
                return err(format!("instance {idx}: honest acceptance {p} below 1/2"));
            }
        }
    }
    Ok(format!(
        "{} yes instances at value 1/2 ± 1e-6, honest floor held, {} ms",
        instances.len(),
        start.elapsed().as_millis()
    ))
}

/// Twenty generated no instances with certified ε: the converged separator
/// measurement holds acceptance at √ε/2 + 1e-3 against 50 sampled yes
/// strategies each.
pub fn check_soundness_epsilon(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x736f756e);
    let cfg = SeparationConfig::default();
    let instances = no_instances(seed)?;
    for (idx, g) in instances.iter().enumerate() {
        let report = game_value(g, &cfg).map_err(|e| format!("instance {idx}: {e}"))?;
        let bound = g.epsilon().sqrt() / 2.0 + 1e-3;
        for _ in 0..50 {
            let y = sample_yes_strategy(g, &mut rng);
            let p = acceptance_probability(g, &y, &report.eq_no).map_err(|e| e.to_string())?;
            if p > bound {
                return err(format!(
                    "instance {idx} (ε = {:.4}): acceptance {p} above √ε/2 + 1e-3 = {bound}",
                    g.epsilon()
                ));
            }
        }
    }
    Ok(format!(
        "{} no instances held below √ε/2 + 1e-3 on 50 strategies each",
        instances.len()
    ))
}

/// Five random two-qubit channel pairs: the converged measurement reaches
/// success ½ + d_dual/4 − 1e-4 on 100 sampled image pairs.
pub fn check_separation_guarantee(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x67746565);
    let cfg = SeparationConfig::default();
    for idx in 0..5 {
        let q0 = random_channel(4, 4, 2, &mut rng);
        let q1 = random_channel(4, 4, 2, &mut rng);
        let res = solve_image_separation(&q0, &q1, &cfg)
            .map_err(|e| format!("pair {idx}: {e}"))?;
        let floor = 0.5 + 0.25 * res.d_dual - 1e-4;
        for _ in 0..100 {
            let sigma = q0.apply(&sample_density(4, &mut rng)).map_err(|e| e.to_string())?;
            let tau = q1.apply(&sample_density(4, &mut rng)).map_err(|e| e.to_string())?;
            let s = discrimination_success(&res.measurement, &sigma, &tau)
                .map_err(|e| e.to_string())?;
            if s < floor {
                return err(format!("pair {idx}: success {s} below floor {floor}"));
            }
        }
    }
    Ok("5 random channel pairs met the measurement guarantee on 100 samples each".into())
}

/// Gap ≤ 1e-3 within the iteration budget across the instance families, and
/// the reported distance matches the total-variation oracle on commuting
/// instances within 1e-4.
pub fn check_solver_certification(seed: u64) -> Result<String, String> {
    let cfg = SeparationConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x63657274);
    let mut worst_gap = 0.0f64;
    let mut solves = 0usize;

    let mut families = yes_instances(seed)?;
    families.extend(no_instances(seed)?);
    for (idx, g) in families.iter().enumerate() {
        let res = solve_image_separation(g.q0(), g.q1(), &cfg)
            .map_err(|e| format!("family instance {idx}: {e}"))?;
        worst_gap = worst_gap.max(res.gap);
        solves += 1;
    }
    for idx in 0..5 {
        let q0 = random_channel(4, 4, 2, &mut rng);
        let q1 = random_channel(4, 4, 2, &mut rng);
        let res = solve_image_separation(&q0, &q1, &cfg)
            .map_err(|e| format!("random pair {idx}: {e}"))?;
        worst_gap = worst_gap.max(res.gap);
        solves += 1;
    }

    // Classical instances against the total-variation oracle Σ|pᵢ − qᵢ|.
    for (p, q) in [
        (vec![0.9, 0.1], vec![0.2, 0.8]),
        (vec![0.99, 0.01], vec![0.01, 0.99]),
        (vec![0.6, 0.3, 0.1], vec![0.2, 0.5, 0.3]),
    ] {
        let tv: f64 = p.iter().zip(&q).map(|(a, b): (&f64, &f64)| (a - b).abs()).sum();
        let s0 = DensityOperator::from_probabilities(&p).map_err(|e| e.to_string())?;
        let s1 = DensityOperator::from_probabilities(&q).map_err(|e| e.to_string())?;
        let q0 = crate::channels::constant_channel(&s0).map_err(|e| e.to_string())?;
        let q1 = crate::channels::constant_channel(&s1).map_err(|e| e.to_string())?;
        let res = solve_image_separation(&q0, &q1, &cfg).map_err(|e| e.to_string())?;
        worst_gap = worst_gap.max(res.gap);
        solves += 1;
        if (res.d_dual - tv).abs() > 1e-4 || (res.d_primal - tv).abs() > 1e-4 {
            return err(format!(
                "classical oracle mismatch: d ∈ [{}, {}] vs TV {tv}",
                res.d_dual, res.d_primal
            ));
        }
    }
    Ok(format!("{solves} solves converged, worst gap {worst_gap:.2e}"))
}

/// Optimal-discrimination exactness on 1000 random qubit/qutrit pairs, and
/// agreement with a 10⁴-point projective grid search on the qubit pairs.
pub fn check_helstrom_exactness(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x68656c73);
    let mut grid_checked = 0usize;
    for i in 0..1000 {
        let dim = if i % 2 == 0 { 2 } else { 3 };
        let rho0 = sample_density(dim, &mut rng);
        let rho1 = sample_density(dim, &mut rng);
        let (m, success) = helstrom(&rho0, &rho1).map_err(|e| e.to_string())?;
        let tn = (rho0.matrix() - rho1.matrix()).trace_norm();
        if (success - (0.5 + 0.25 * tn)).abs() > 1e-9 {
            return err(format!("success formula off at pair {i}"));
        }
        let achieved = discrimination_success(&m, &rho0, &rho1).map_err(|e| e.to_string())?;
        if (achieved - success).abs() > 1e-9 {
            return err(format!("measurement misses its own bound at pair {i}"));
        }
        // The grid search is a qubit construction; run it on every tenth
        // qubit pair to keep the pass under a second.
        if dim == 2 && i % 10 == 0 {
            let grid = projective_grid_best(&rho0, &rho1, 100, 100);
            if success + 1e-12 < grid || (success - grid).abs() > 1e-3 {
                return err(format!("grid search disagrees at pair {i}: {success} vs {grid}"));
            }
            grid_checked += 1;
        }
    }
    Ok(format!(
        "1000 pairs exact to 1e-9; grid search matched on {grid_checked} qubit pairs"
    ))
}

fn projective_grid_best(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    n_theta: usize,
    n_phi: usize,
) -> f64 {
    let mut best: f64 = 0.0;
    for it in 0..n_theta {
        let theta = std::f64::consts::PI * it as f64 / (n_theta - 1) as f64;
        for ip in 0..n_phi {
            let phi = std::f64::consts::TAU * ip as f64 / n_phi as f64;
            let amps = [
                num_complex::Complex64::new((theta / 2.0).cos(), 0.0),
                num_complex::Complex64::new(
                    (theta / 2.0).sin() * phi.cos(),
                    (theta / 2.0).sin() * phi.sin(),
                ),
            ];
            // success = 1/2 + 1/2·⟨E0, ρ0 − ρ1⟩ for E0 = |ψ⟩⟨ψ|; the
            // complementary labeling gives 1 − that.
            let mut e0_pairing = 0.0;
            for r in 0..2 {
                for c in 0..2 {
                    let proj = amps[r] * amps[c].conj();
                    let diff = rho0.matrix().get(r, c) - rho1.matrix().get(r, c);
                    e0_pairing += (proj.conj() * diff).re;
                }
            }
            let p = 0.5 + 0.5 * e0_pairing;
            best = best.max(p.max(1.0 - p));
        }
    }
    best
}

/// Tensorization, discrimination certificates, exact unanimous-accept
/// products, the bound tables, and the 2^-p error schedule.
pub fn check_repetition_bounds(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x72657065);

    // λ_max multiplies under tensor powers for 20 acceptance observables.
    for trial in 0..20 {
        let g = generate_instance(InstanceKind::YesSharedImage { dim: 2 }, seed + trial)
            .map_err(|e| e.to_string())?;
        let n = sample_no_strategy(&g, &mut rng);
        let m = effective_observable(&g, &n).map_err(|e| e.to_string())?;
        let top = m.eig().map_err(|e| e.to_string())?.lambda_max();
        for k in [2usize, 3] {
            let (_, lmax) = repeated_observable(&m, k).map_err(|e| e.to_string())?;
            if (lmax - top.powi(k as i32)).abs() > 1e-9 {
                return err(format!(
                    "tensorization failed at trial {trial}, k = {k}: {lmax} vs {}",
                    top.powi(k as i32)
                ));
            }
            let (bound, verified) =
                soundness_repeated(&g, &n, k).map_err(|e| e.to_string())?;
            if (bound - verified).abs() > 1e-9 {
                return err(format!("joint-strategy maximum deviates at k = {k}"));
            }
        }
    }

    // Discrimination certificates across state pairs and k ≤ 3.
    for trial in 0..10 {
        let (s0, s1) = if trial % 2 == 0 {
            (sample_density(2, &mut rng), sample_density(2, &mut rng))
        } else {
            let delta = 0.05 + 0.04 * trial as f64;
            (
                DensityOperator::from_probabilities(&[1.0 - delta, delta]).map_err(|e| e.to_string())?,
                DensityOperator::from_probabilities(&[delta, 1.0 - delta]).map_err(|e| e.to_string())?,
            )
        };
        for k in [2usize, 3] {
            let cert = discrimination_certificate(&s0, &s1, k).map_err(|e| e.to_string())?;
            if cert.worst_residual() < -1e-9 {
                return err(format!(
                    "certificate eigenvalue {} below -1e-9",
                    cert.worst_residual()
                ));
            }
            let seesaw = seesaw_lower_bound(&s0, &s1, k, 5).map_err(|e| e.to_string())?;
            if seesaw > cert.value + 1e-6 {
                return err(format!("seesaw {seesaw} exceeds certificate {}", cert.value));
            }
        }
    }

    // Unanimous-accept honest acceptance is an exact power.
    let g = generate_instance(InstanceKind::YesSharedImage { dim: 2 }, seed)
        .map_err(|e| e.to_string())?;
    let honest = YesStrategy::honest(&g);
    let n = sample_no_strategy(&g, &mut rng);
    let p = acceptance_probability(&g, &honest, &n).map_err(|e| e.to_string())?;
    let m = effective_observable(&g, &n).map_err(|e| e.to_string())?;
    let joint = honest.rho0.tensor(&honest.rho1);
    for k in [2usize, 3] {
        let (mk, _) = repeated_observable(&m, k).map_err(|e| e.to_string())?;
        let mut state = joint.clone();
        for _ in 1..k {
            state = state.tensor(&joint);
        }
        let unanimous = mk.inner(state.operator());
        if (unanimous - p.powi(k as i32)).abs() > 1e-12 {
            return err(format!("unanimous acceptance is not p^k at k = {k}"));
        }
        if 1.0 - unanimous > k as f64 * (1.0 - p) + 1e-10 {
            return err("union bound violated".into());
        }
    }

    // Bound tables.
    let r = RepetitionReport::from_error_bounds(0.5, 0.01, 3, RepetitionMode::UnanimousReject)
        .map_err(|e| e.to_string())?;
    if (r.repeated.c - 0.125).abs() > 1e-15 || (r.repeated.s - 0.03).abs() > 1e-15 {
        return err("unanimous-reject table mismatch".into());
    }
    let r = RepetitionReport::from_error_bounds(0.1, 0.2, 2, RepetitionMode::UnanimousAccept)
        .map_err(|e| e.to_string())?;
    if (r.repeated.c - 0.2).abs() > 1e-15 || (r.repeated.s - 0.04).abs() > 1e-15 {
        return err("unanimous-accept table mismatch".into());
    }

    // 2^-p schedule up to p = 8.
    for p in 1..=8usize {
        let s = error_schedule(p).map_err(|e| e.to_string())?;
        let target = 0.5f64.powi(p as i32);
        if p as f64 * s.epsilon > target + 1e-18 {
            return err(format!("schedule p = {p}: p·ε exceeds 2^-p"));
        }
        if s.repeated.c > target + 1e-15 || s.repeated.s > target + 1e-15 {
            return err(format!("schedule p = {p}: repeated errors exceed 2^-p"));
        }
    }

    Ok("tensorization, certificates, exact products, tables, and schedules verified".into())
}

/// Monte Carlo frequencies sit within 4σ of the exact acceptance
/// probability at 10⁵ rounds with a fixed seed.
pub fn check_monte_carlo_consistency(seed: u64) -> Result<String, String> {
    let rounds = 100_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d6f6e74);
    let mut worst_sigmas = 0.0f64;

    let mut cases: Vec<(GameInstance, YesStrategy, NoStrategy)> = Vec::new();
    let g = generate_instance(InstanceKind::YesIdentical { dim: 2 }, seed)
        .map_err(|e| e.to_string())?;
    let honest = YesStrategy::honest(&g);
    let x0 = g.q0().apply(&honest.rho0).map_err(|e| e.to_string())?;
    let x1 = g.q1().apply(&honest.rho1).map_err(|e| e.to_string())?;
    let (hel, _) = helstrom(&x0, &x1).map_err(|e| e.to_string())?;
    cases.push((g.clone(), honest.clone(), NoStrategy::new(hel)));
    cases.push((g.clone(), honest, NoStrategy::coin(2)));
    let g2 = generate_instance(InstanceKind::NoDiagPair { delta: 0.2 }, seed)
        .map_err(|e| e.to_string())?;
    let y2 = sample_yes_strategy(&g2, &mut rng);
    let n2 = sample_no_strategy(&g2, &mut rng);
    cases.push((g2, y2, n2));

    for (idx, (g, y, n)) in cases.iter().enumerate() {
        let exact = acceptance_probability(g, y, n).map_err(|e| e.to_string())?;
        let (_, freq) = simulate_rounds(g, y, n, rounds, seed + idx as u64)
            .map_err(|e| e.to_string())?;
        let sigma = (exact * (1.0 - exact) / rounds as f64).sqrt();
        let tolerance = 4.0 * sigma + 1e-12;
        if (freq - exact).abs() > tolerance {
            return err(format!(
                "case {idx}: frequency {freq} vs exact {exact} beyond 4σ = {tolerance}"
            ));
        }
        if sigma > 0.0 {
            worst_sigmas = worst_sigmas.max((freq - exact).abs() / sigma);
        }
    }
    // Deterministic degenerate case: orthogonal images, optimal reply.
    let g = generate_instance(
        InstanceKind::NoConstantPair {
            angle: std::f64::consts::FRAC_PI_2,
        },
        seed,
    )
    .map_err(|e| e.to_string())?;
    let y = YesStrategy::honest(&g);
    let (n, _) = crate::games::best_response_no(&g, &y).map_err(|e| e.to_string())?;
    let (accepts, _) = simulate_rounds(&g, &y, &n, 10_000, seed).map_err(|e| e.to_string())?;
    if accepts != 0 {
        return err(format!("orthogonal instance accepted {accepts} times"));
    }
    Ok(format!(
        "3 cases within 4σ at 10⁵ rounds (worst {worst_sigmas:.2}σ); degenerate case exact"
    ))
}
