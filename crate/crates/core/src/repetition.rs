//! Error reduction by running k game copies in parallel under a unanimous
//! vote.
//!
//! Two vote rules are covered. Under unanimous accept the per-copy error
//! pair (c, s) becomes (min(kc, 1), s^k); under unanimous reject it becomes
//! (c^k, min(ks, 1)). The exponential direction is never taken on faith:
//! the s^k side is certified by explicit spectral computation on the k-fold
//! acceptance observable — entangled joint strategies included — and the
//! c^k side by a dual certificate for discriminating all 2^k product
//! hypotheses at once, cross-checked by a seesaw over product measurements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{effective_observable, game_value, GameInstance, NoStrategy, YesStrategy};
use crate::operators::{positive_negative_parts, DensityOperator, HermitianOperator};
use crate::separation::{helstrom, SeparationConfig};

/// Hard cap on the explicit product-operator dimension dim^k.
pub const SIZE_BUDGET: usize = 4096;

/// Vote rule for the repeated game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepetitionMode {
    #[serde(rename = "unanimous-accept")]
    UnanimousAccept,
    #[serde(rename = "unanimous-reject")]
    UnanimousReject,
}

/// Completeness/soundness error pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    pub c: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    Pass,
    Fail,
    Skipped,
}

/// One verification record attached to a repetition report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub name: String,
    pub status: CertificateStatus,
    pub residual: Option<f64>,
}

/// Bound bundle for k-fold repetition with attached verification records.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepetitionReport {
    pub k: usize,
    pub mode: RepetitionMode,
    pub per_copy: ErrorPair,
    pub repeated: ErrorPair,
    pub certificates: Vec<CertificateRecord>,
}

impl RepetitionReport {
    /// Pure bound arithmetic from a per-copy error pair.
    pub fn from_error_bounds(c: f64, s: f64, k: usize, mode: RepetitionMode) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParam("k must be at least 1".into()));
        }
        for (name, v) in [("c", c), ("s", s)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParam(format!("{name} = {v} outside [0, 1]")));
            }
        }
        let repeated = match mode {
            RepetitionMode::UnanimousAccept => ErrorPair {
                c: (k as f64 * c).min(1.0),
                s: s.powi(k as i32),
            },
            RepetitionMode::UnanimousReject => ErrorPair {
                c: c.powi(k as i32),
                s: (k as f64 * s).min(1.0),
            },
        };
        Ok(Self {
            k,
            mode,
            per_copy: ErrorPair { c, s },
            repeated,
            certificates: Vec::new(),
        })
    }
}

fn budget_check(dim: usize, k: usize) -> Result<usize> {
    let total = dim
        .checked_pow(k as u32)
        .filter(|&t| t <= SIZE_BUDGET)
        .ok_or(Error::TooLarge {
            dim,
            k,
            budget: SIZE_BUDGET,
        })?;
    Ok(total)
}

/// Explicit k-fold tensor power M^{⊗k} with its top eigenvalue.
pub fn repeated_observable(m: &HermitianOperator, k: usize) -> Result<(HermitianOperator, f64)> {
    if k < 1 {
        return Err(Error::InvalidParam("k must be at least 1".into()));
    }
    budget_check(m.dim(), k)?;
    let mut power = m.clone();
    for _ in 1..k {
        power = power.tensor(m);
    }
    let lambda_max = power.eig()?.lambda_max();
    Ok((power, lambda_max))
}

/// Soundness of the unanimous-accept repetition against a fixed no strategy:
/// the bound λ_max(M)^k and the exact maximum acceptance over all joint —
/// entangled or correlated — yes strategies on the k-fold input space,
/// which is λ_max(M^{⊗k}). The two must agree to 1e-9.
pub fn soundness_repeated(
    g: &GameInstance,
    n: &NoStrategy,
    k: usize,
) -> Result<(f64, f64)> {
    let m = effective_observable(g, n)?;
    let per_copy = m.eig()?.lambda_max();
    let bound = per_copy.powi(k as i32);
    let (_, verified_max) = repeated_observable(&m, k)?;
    if (bound - verified_max).abs() > 1e-9 {
        return Err(Error::CertificationFailed(format!(
            "tensor power top eigenvalue {verified_max} deviates from {bound}"
        )));
    }
    Ok((bound, verified_max))
}

/// Dual certificate for discriminating the 2^k equiprobable product
/// hypotheses σ_{b₁} ⊗ … ⊗ σ_{b_k}.
#[derive(Debug, Clone)]
pub struct DiscriminationCertificate {
    /// Per-copy certificate operator Z₁ = ½σ₁ + (½(σ₀ − σ₁))⁺.
    pub z1: HermitianOperator,
    /// Certified optimum tr(Z₁)^k.
    pub value: f64,
    /// λ_min(Z₁^{⊗k} − 2^{−k}·σ_{b₁}⊗…⊗σ_{b_k}) per bit string, in binary
    /// order.
    pub residuals: Vec<f64>,
}

impl DiscriminationCertificate {
    pub fn worst_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Build and verify the certificate: Z₁ dominates both ½σ₀ and ½σ₁, so its
/// k-fold power dominates every product hypothesis, bounding any joint
/// measurement's success by tr(Z₁)^k = (½ + ¼‖σ₀ − σ₁‖_tr)^k. Each of the
/// 2^k eigenvalue checks must clear −1e-9.
pub fn discrimination_certificate(
    sigma0: &DensityOperator,
    sigma1: &DensityOperator,
    k: usize,
) -> Result<DiscriminationCertificate> {
    if sigma0.dim() != sigma1.dim() {
        return Err(Error::shape(format!(
            "states of dimensions {} and {}",
            sigma0.dim(),
            sigma1.dim()
        )));
    }
    if k < 1 {
        return Err(Error::InvalidParam("k must be at least 1".into()));
    }
    budget_check(sigma0.dim(), k)?;

    let half_delta = sigma0.operator().sub(sigma1.operator()).scale(0.5);
    let (plus, _) = positive_negative_parts(&half_delta)?;
    let z1 = sigma1.operator().scale(0.5).add(&plus);
    let value = z1.trace_re().powi(k as i32);

    let mut z_power = z1.clone();
    for _ in 1..k {
        z_power = z_power.tensor(&z1);
    }
    let scale = 0.5f64.powi(k as i32);
    let mut residuals = Vec::with_capacity(1 << k);
    for bits in 0..(1u32 << k) {
        let mut hypothesis: Option<HermitianOperator> = None;
        for j in 0..k {
            // Bit j selects the state of copy j; copy 0 is the slow factor.
            let pick = if bits >> (k - 1 - j) & 1 == 0 {
                sigma0.operator()
            } else {
                sigma1.operator()
            };
            hypothesis = Some(match hypothesis {
                None => pick.clone(),
                Some(h) => h.tensor(pick),
            });
        }
        let h = hypothesis.expect("k >= 1");
        let slack = z_power.sub(&h.scale(scale));
        residuals.push(slack.eig()?.lambda_min());
    }

    let cert = DiscriminationCertificate {
        z1,
        value,
        residuals,
    };
    if cert.worst_residual() < -1e-9 {
        return Err(Error::CertificationFailed(format!(
            "discrimination certificate violated: min eigenvalue {}",
            cert.worst_residual()
        )));
    }
    Ok(cert)
}

/// Seesaw lower bound over product measurements: optimize one copy's binary
/// measurement at a time with the others fixed, starting from coins. The
/// joint success of a product strategy factorizes, so each pass solves k
/// independent two-state discriminations.
pub fn seesaw_lower_bound(
    sigma0: &DensityOperator,
    sigma1: &DensityOperator,
    k: usize,
    max_passes: usize,
) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidParam("k must be at least 1".into()));
    }
    let coin = crate::separation::BinaryMeasurement::coin(sigma0.dim());
    let per_copy_success = |m: &crate::separation::BinaryMeasurement| -> Result<f64> {
        crate::separation::discrimination_success(m, sigma0, sigma1)
    };
    let mut measurements = vec![coin; k];
    let mut best: f64 = measurements
        .iter()
        .map(per_copy_success)
        .collect::<Result<Vec<_>>>()?
        .iter()
        .product();
    for _ in 0..max_passes {
        let mut improved = false;
        for j in 0..k {
            let (candidate, _) = helstrom(sigma0, sigma1)?;
            let mut trial = measurements.clone();
            trial[j] = candidate;
            let value: f64 = trial
                .iter()
                .map(per_copy_success)
                .collect::<Result<Vec<_>>>()?
                .iter()
                .product();
            if value > best + 1e-15 {
                best = value;
                measurements = trial;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(best)
}

/// Instance-driven repetition report. The per-copy pair comes from the
/// equilibrium: c = 1 − value and s = λ_max of the acceptance observable
/// against the equilibrium no strategy. Verification records are attached
/// where the size budget allows and marked skipped where it does not.
pub fn repetition_report(
    g: &GameInstance,
    k: usize,
    mode: RepetitionMode,
    cfg: &SeparationConfig,
) -> Result<RepetitionReport> {
    let equilibrium = game_value(g, cfg)?;
    let m = effective_observable(g, &equilibrium.eq_no)?;
    let s = m.eig()?.lambda_max().clamp(0.0, 1.0);
    let c = (1.0 - equilibrium.value).clamp(0.0, 1.0);
    let mut report = RepetitionReport::from_error_bounds(c, s, k, mode)?;

    match soundness_repeated(g, &equilibrium.eq_no, k) {
        Ok((bound, verified)) => report.certificates.push(CertificateRecord {
            name: "tensorized-acceptance".into(),
            status: if (bound - verified).abs() <= 1e-9 {
                CertificateStatus::Pass
            } else {
                CertificateStatus::Fail
            },
            residual: Some((bound - verified).abs()),
        }),
        Err(Error::TooLarge { .. }) => report.certificates.push(CertificateRecord {
            name: "tensorized-acceptance".into(),
            status: CertificateStatus::Skipped,
            residual: None,
        }),
        Err(e) => return Err(e),
    }

    let honest = YesStrategy::honest(g);
    let sigma0 = g.q0().apply(&honest.rho0)?;
    let sigma1 = g.q1().apply(&honest.rho1)?;
    match discrimination_certificate(&sigma0, &sigma1, k) {
        Ok(cert) => {
            for (bits, residual) in cert.residuals.iter().enumerate() {
                report.certificates.push(CertificateRecord {
                    name: format!("discrimination-{bits:0width$b}", width = k),
                    status: if *residual >= -1e-9 {
                        CertificateStatus::Pass
                    } else {
                        CertificateStatus::Fail
                    },
                    residual: Some(*residual),
                });
            }
        }
        Err(Error::TooLarge { .. }) => report.certificates.push(CertificateRecord {
            name: "discrimination".into(),
            status: CertificateStatus::Skipped,
            residual: None,
        }),
        Err(e) => return Err(e),
    }

    Ok(report)
}

/// Error schedule: a target bound 2^{−p} with ε = 2^{−f} chosen so that
/// p·ε ≤ 2^{−p}, and the resulting unanimous-reject bounds from the
/// per-copy pair (1/2, ε).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorSchedule {
    pub p: usize,
    pub f: u32,
    pub epsilon: f64,
    pub repeated: ErrorPair,
}

/// Pick ε ∈ {2^{−f}} with p·ε ≤ 2^{−p} and run the (1/2, ε) pair through
/// k = p unanimous-reject repetitions; both repeated errors land at or below
/// 2^{−p}.
pub fn error_schedule(p: usize) -> Result<ErrorSchedule> {
    if p < 1 {
        return Err(Error::InvalidParam("p must be at least 1".into()));
    }
    let f = p as u32 + (usize::BITS - (p - 1).leading_zeros());
    let epsilon = 0.5f64.powi(f as i32);
    let report = RepetitionReport::from_error_bounds(
        0.5,
        epsilon,
        p,
        RepetitionMode::UnanimousReject,
    )?;
    let target = 0.5f64.powi(p as i32);
    if p as f64 * epsilon > target || report.repeated.c > target || report.repeated.s > target {
        return Err(Error::CertificationFailed(format!(
            "schedule for p = {p} misses the 2^-p target"
        )));
    }
    Ok(ErrorSchedule {
        p,
        f,
        epsilon,
        repeated: report.repeated,
    })
}
