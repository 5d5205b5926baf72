//! Completely positive trace-preserving maps in Kraus form.
//!
//! Kraus operators are the canonical representation; the Choi matrix is
//! derived on demand as a complete-positivity certificate. The tensor index
//! convention is fixed once: the left factor is the slow (most significant)
//! index, everywhere.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{
    sqrt_psd, ComplexMatrix, DensityOperator, HermitianOperator,
};

/// Tolerance on ‖ΣK†K − I‖ for trace preservation.
pub const TOL_TRACE_PRESERVING: f64 = 1e-9;

/// A channel: a CPTP map held as a list of Kraus operators, each of shape
/// dim_out × dim_in, with Σ Kᵢ†Kᵢ = I.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelData", into = "ChannelData")]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Wire form of a channel: `{"dim_in": n, "dim_out": m, "kraus": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelData {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<ComplexMatrix>,
}

impl TryFrom<ChannelData> for Channel {
    type Error = Error;
    fn try_from(d: ChannelData) -> Result<Self> {
        validate_channel(d.kraus, d.dim_in, d.dim_out)
    }
}

impl From<Channel> for ChannelData {
    fn from(c: Channel) -> ChannelData {
        ChannelData {
            dim_in: c.dim_in,
            dim_out: c.dim_out,
            kraus: c.kraus,
        }
    }
}

/// Check shapes and trace preservation, returning a validated [`Channel`].
pub fn validate_channel(
    kraus: Vec<ComplexMatrix>,
    dim_in: usize,
    dim_out: usize,
) -> Result<Channel> {
    if kraus.is_empty() {
        return Err(Error::shape("a channel needs at least one Kraus operator"));
    }
    if dim_in == 0 || dim_out == 0 {
        return Err(Error::shape("channel dimensions must be positive"));
    }
    for (i, k) in kraus.iter().enumerate() {
        if k.rows() != dim_out || k.cols() != dim_in {
            return Err(Error::shape(format!(
                "Kraus operator {} has shape {}x{}, expected {}x{}",
                i,
                k.rows(),
                k.cols(),
                dim_out,
                dim_in
            )));
        }
    }
    let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
    for k in &kraus {
        sum = &sum + &(&k.adjoint() * k);
    }
    let deviation = (&sum - &ComplexMatrix::identity(dim_in)).frobenius_norm();
    if deviation > TOL_TRACE_PRESERVING {
        return Err(Error::NotTracePreserving { deviation });
    }
    Ok(Channel {
        dim_in,
        dim_out,
        kraus,
    })
}

impl Channel {
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Schrödinger-picture action Σ KᵢρKᵢ†.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.dim_in {
            return Err(Error::shape(format!(
                "channel input dimension {} but state has dimension {}",
                self.dim_in,
                rho.dim()
            )));
        }
        let out = self.apply_matrix(rho.matrix());
        Ok(DensityOperator::new_unchecked(
            HermitianOperator::new(out).expect("CPTP output of a Hermitian input is Hermitian"),
        ))
    }

    pub(crate) fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &(&(k * m) * &k.adjoint());
        }
        out
    }

    /// Heisenberg-picture dual Σ Kᵢ†HKᵢ, satisfying
    /// ⟨adjoint_apply(H), ρ⟩ = ⟨H, apply(ρ)⟩.
    pub fn adjoint_apply(&self, h: &HermitianOperator) -> Result<HermitianOperator> {
        if h.dim() != self.dim_out {
            return Err(Error::shape(format!(
                "channel output dimension {} but observable has dimension {}",
                self.dim_out,
                h.dim()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out = &out + &(&(&k.adjoint() * h.matrix()) * k);
        }
        HermitianOperator::new(out)
    }

    /// Choi matrix Σᵢⱼ C(|i⟩⟨j|) ⊗ |i⟩⟨j| with the output factor slow.
    pub fn choi(&self) -> ChoiMatrix {
        let d_in = self.dim_in;
        let d_out = self.dim_out;
        let mut m = ComplexMatrix::zeros(d_out * d_in, d_out * d_in);
        for i in 0..d_in {
            for j in 0..d_in {
                let unit = ComplexMatrix::from_fn(d_in, d_in, |r, c| {
                    if r == i && c == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                let mapped = self.apply_matrix(&unit);
                let block = mapped.tensor(&ComplexMatrix::from_fn(d_in, d_in, |r, c| {
                    if r == i && c == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }));
                m = &m + &block;
            }
        }
        ChoiMatrix {
            dim_in: d_in,
            dim_out: d_out,
            matrix: HermitianOperator::new(m).expect("Choi matrix of a Kraus set is Hermitian"),
        }
    }

    /// Tensor product channel with Kraus set {Kᵢ ⊗ Lⱼ}.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for k in &self.kraus {
            for l in &other.kraus {
                kraus.push(k.tensor(l));
            }
        }
        Channel {
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
            kraus,
        }
    }
}

/// Choi matrix of a channel: PSD, with partial trace over the output factor
/// equal to the input identity.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    matrix: HermitianOperator,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &HermitianOperator {
        &self.matrix
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Verify the CPTP certificate: PSD within 1e-9 and tr_out = I within
    /// 1e-9. Returns the worst violation found (certificate residual).
    pub fn certificate_residual(&self) -> Result<f64> {
        let min = self.matrix.eig()?.lambda_min();
        let psd_violation = (-min).max(0.0);
        let reduced = self
            .matrix
            .matrix()
            .partial_trace((self.dim_out, self.dim_in), 1)?;
        let tp_violation = (&reduced - &ComplexMatrix::identity(self.dim_in)).frobenius_norm();
        Ok(psd_violation.max(tp_violation))
    }

    pub fn is_valid(&self) -> bool {
        matches!(self.certificate_residual(), Ok(r) if r <= 1e-9)
    }
}

/// Named channel families used by the instance generators.
#[derive(Debug, Clone)]
pub enum NamedChannel {
    /// Identity map on the given dimension.
    Identity { dim: usize },
    /// Unitary conjugation ρ ↦ UρU†.
    Unitary { u: ComplexMatrix },
    /// Constant map ρ ↦ tr(ρ)·σ.
    Constant { target: DensityOperator, dim_in: usize },
    /// ρ ↦ (1−p)ρ + p·I/d.
    Depolarizing { dim: usize, p: f64 },
    /// ρ ↦ (1−p)ρ + p·diag(ρ).
    Dephasing { dim: usize, p: f64 },
}

/// Build a channel from a named family.
pub fn make_named_channel(kind: NamedChannel) -> Result<Channel> {
    match kind {
        NamedChannel::Identity { dim } => {
            validate_channel(vec![ComplexMatrix::identity(dim)], dim, dim)
        }
        NamedChannel::Unitary { u } => {
            if !u.is_square() {
                return Err(Error::InvalidParam("unitary must be square".into()));
            }
            let dim = u.rows();
            validate_channel(vec![u], dim, dim)
        }
        NamedChannel::Constant { target, dim_in } => {
            let kraus = constant_kraus(&target, dim_in)?;
            validate_channel(kraus, dim_in, target.dim())
        }
        NamedChannel::Depolarizing { dim, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParam(format!(
                    "depolarizing probability {p} outside [0, 1]"
                )));
            }
            let mut kraus = Vec::new();
            if p < 1.0 {
                kraus.push(ComplexMatrix::identity(dim).scale_re((1.0 - p).sqrt()));
            }
            if p > 0.0 {
                let mixed = DensityOperator::maximally_mixed(dim);
                for k in constant_kraus(&mixed, dim)? {
                    kraus.push(k.scale_re(p.sqrt()));
                }
            }
            validate_channel(kraus, dim, dim)
        }
        NamedChannel::Dephasing { dim, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParam(format!(
                    "dephasing probability {p} outside [0, 1]"
                )));
            }
            let mut kraus = Vec::new();
            if p < 1.0 {
                kraus.push(ComplexMatrix::identity(dim).scale_re((1.0 - p).sqrt()));
            }
            if p > 0.0 {
                for i in 0..dim {
                    kraus.push(ComplexMatrix::matrix_unit(dim, i, i).scale_re(p.sqrt()));
                }
            }
            validate_channel(kraus, dim, dim)
        }
    }
}

/// Kraus set {√σ·|a⟩⟨i|} over output basis a and input basis i, realizing
/// ρ ↦ tr(ρ)·σ.
fn constant_kraus(target: &DensityOperator, dim_in: usize) -> Result<Vec<ComplexMatrix>> {
    let root = sqrt_psd(target.operator())?;
    let d_out = target.dim();
    let mut kraus = Vec::with_capacity(d_out * dim_in);
    for a in 0..d_out {
        for i in 0..dim_in {
            // Column i holds column a of √σ.
            let k = ComplexMatrix::from_fn(d_out, dim_in, |r, c| {
                if c == i {
                    root.matrix().get(r, a)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            kraus.push(k);
        }
    }
    Ok(kraus)
}

/// Convenience constructor for ρ ↦ tr(ρ)·σ with equal in/out dimensions.
pub fn constant_channel(target: &DensityOperator) -> Result<Channel> {
    make_named_channel(NamedChannel::Constant {
        dim_in: target.dim(),
        target: target.clone(),
    })
}

/// Convenience constructor for the identity channel.
pub fn identity_channel(dim: usize) -> Channel {
    make_named_channel(NamedChannel::Identity { dim }).expect("identity channel is CPTP")
}

/// Random CPTP map: Ginibre Kraus operators normalized by S^{-1/2} where
/// S = Σ Gᵢ†Gᵢ.
pub fn random_channel(
    dim_in: usize,
    dim_out: usize,
    n_kraus: usize,
    rng: &mut impl rand::Rng,
) -> Channel {
    let g: Vec<ComplexMatrix> = (0..n_kraus)
        .map(|_| crate::operators::sample_ginibre(dim_out, dim_in, rng))
        .collect();
    let mut s = ComplexMatrix::zeros(dim_in, dim_in);
    for gi in &g {
        s = &s + &(&gi.adjoint() * gi);
    }
    let h = HermitianOperator::new(s).expect("ΣG†G is Hermitian");
    let spec = h.eig().expect("Gram matrix eigendecomposition");
    let inv_root = spec.map_eigenvalues(|l| 1.0 / l.max(1e-12).sqrt());
    let kraus: Vec<ComplexMatrix> = g.iter().map(|gi| gi * inv_root.matrix()).collect();
    validate_channel(kraus, dim_in, dim_out).expect("normalized Kraus set is trace preserving")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{sample_density, sample_hermitian, sample_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    #[test]
    fn validate_accepts_identity() {
        let ch = validate_channel(vec![ComplexMatrix::identity(2)], 2, 2).unwrap();
        assert_eq!(ch.dim_in(), 2);
        assert_eq!(ch.dim_out(), 2);
    }

    #[test]
    fn validate_rejects_scaled_identity() {
        let k = ComplexMatrix::identity(2).scale_re(1.0 / 2f64.sqrt());
        match validate_channel(vec![k], 2, 2) {
            Err(Error::NotTracePreserving { deviation }) => {
                // Σ K†K = I/2, so the deviation is ‖I/2‖_F = √2/2.
                assert!((deviation - 2f64.sqrt() / 2.0).abs() < 1e-12);
            }
            other => panic!("expected NotTracePreserving, got {other:?}"),
        }
    }

    #[test]
    fn validate_accepts_pauli_mixture() {
        let s = 1.0 / 2f64.sqrt();
        let kraus = vec![pauli_x().scale_re(s), pauli_z().scale_re(s)];
        assert!(validate_channel(kraus, 2, 2).is_ok());
    }

    #[test]
    fn validate_rejects_shape_mismatch() {
        let kraus = vec![ComplexMatrix::identity(3)];
        assert!(matches!(
            validate_channel(kraus, 2, 2),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn apply_identity_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = sample_density(2, &mut rng);
        let ch = identity_channel(2);
        let out = ch.apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn fully_depolarizing_maps_to_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = make_named_channel(NamedChannel::Depolarizing { dim: 2, p: 1.0 }).unwrap();
        for _ in 0..5 {
            let rho = sample_density(2, &mut rng);
            let out = ch.apply(&rho).unwrap();
            let target = DensityOperator::maximally_mixed(2);
            assert!(out.matrix().max_abs_diff(target.matrix()) < 1e-10);
        }
    }

    #[test]
    fn constant_channel_hits_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sigma = sample_density(3, &mut rng);
        let ch = constant_channel(&sigma).unwrap();
        for _ in 0..5 {
            let rho = sample_density(3, &mut rng);
            let out = ch.apply(&rho).unwrap();
            assert!(out.matrix().max_abs_diff(sigma.matrix()) < 1e-10);
        }
    }

    #[test]
    fn adjoint_of_identity_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = sample_hermitian(2, &mut rng);
        let id = identity_channel(2);
        assert!(id.adjoint_apply(&h).unwrap().matrix().max_abs_diff(h.matrix()) < 1e-12);

        let u = sample_unitary(2, &mut rng);
        let ch = make_named_channel(NamedChannel::Unitary { u: u.clone() }).unwrap();
        let expected = &(&u.adjoint() * h.matrix()) * &u;
        assert!(ch.adjoint_apply(&h).unwrap().matrix().max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn adjoint_of_constant_channel_is_scalar_identity() {
        let sigma = DensityOperator::basis_state(2, 0).unwrap();
        let ch = constant_channel(&sigma).unwrap();
        let h = HermitianOperator::from_real_diag(&[2.0, 5.0]);
        let back = ch.adjoint_apply(&h).unwrap();
        // ⟨H, σ⟩·I with ⟨H, |0⟩⟨0|⟩ = 2.
        let expected = ComplexMatrix::identity(2).scale_re(2.0);
        assert!(back.matrix().max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn adjointness_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let ch = random_channel(2, 3, 2, &mut rng);
            let rho = sample_density(2, &mut rng);
            let h = sample_hermitian(3, &mut rng);
            let lhs = ch.adjoint_apply(&h).unwrap().inner(rho.operator());
            let rhs = h.inner(ch.apply(&rho).unwrap().operator());
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn apply_preserves_trace_and_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let ch = random_channel(3, 3, 3, &mut rng);
            let rho = sample_density(3, &mut rng);
            let out = ch.apply(&rho).unwrap();
            assert!((out.operator().trace_re() - 1.0).abs() < 1e-10);
            assert!(out.operator().eig().unwrap().lambda_min() > -1e-9);
        }
    }

    #[test]
    fn choi_of_identity_qubit_channel() {
        let ch = identity_channel(2);
        let choi = ch.choi();
        assert!((choi.matrix().trace_re() - 2.0).abs() < 1e-12);
        // Rank one: eigenvalues (0, 0, 0, 2).
        let spec = choi.matrix().eig().unwrap();
        assert!((spec.lambda_max() - 2.0).abs() < 1e-10);
        assert!(spec.eigenvalues()[..3].iter().all(|l| l.abs() < 1e-10));
        assert!(choi.is_valid());
    }

    #[test]
    fn choi_of_fully_depolarizing_qubit() {
        let ch = make_named_channel(NamedChannel::Depolarizing { dim: 2, p: 1.0 }).unwrap();
        let choi = ch.choi();
        let expected = ComplexMatrix::identity(4).scale_re(0.5);
        assert!(choi.matrix().matrix().max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn choi_certificate_holds_for_generator_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sigma = sample_density(2, &mut rng);
        let channels = vec![
            identity_channel(2),
            make_named_channel(NamedChannel::Unitary { u: sample_unitary(2, &mut rng) }).unwrap(),
            constant_channel(&sigma).unwrap(),
            make_named_channel(NamedChannel::Depolarizing { dim: 2, p: 0.3 }).unwrap(),
            make_named_channel(NamedChannel::Dephasing { dim: 2, p: 0.7 }).unwrap(),
            random_channel(2, 2, 3, &mut rng),
        ];
        for ch in channels {
            assert!(ch.choi().is_valid());
        }
    }

    #[test]
    fn dephasing_kills_off_diagonals() {
        let ch = make_named_channel(NamedChannel::Dephasing { dim: 2, p: 1.0 }).unwrap();
        let plus = DensityOperator::pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let out = ch.apply(&plus).unwrap();
        assert!(out.matrix().get(0, 1).norm() < 1e-12);
        assert!((out.matrix().get(0, 0).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_p_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ch = make_named_channel(NamedChannel::Depolarizing { dim: 2, p: 0.0 }).unwrap();
        let rho = sample_density(2, &mut rng);
        assert!(ch.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn named_channels_reject_bad_params() {
        assert!(matches!(
            make_named_channel(NamedChannel::Depolarizing { dim: 2, p: 1.2 }),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            make_named_channel(NamedChannel::Dephasing { dim: 2, p: -0.1 }),
            Err(Error::InvalidParam(_))
        ));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(make_named_channel(NamedChannel::Unitary { u: rect }).is_err());
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let t = identity_channel(2).tensor(&identity_channel(2));
        let rho = sample_density(4, &mut rng);
        assert!(t.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn tensor_of_constants_is_constant_on_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s0 = sample_density(2, &mut rng);
        let s1 = sample_density(2, &mut rng);
        let t = constant_channel(&s0).unwrap().tensor(&constant_channel(&s1).unwrap());
        let rho = sample_density(4, &mut rng);
        let out = t.apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(s0.tensor(&s1).matrix()) < 1e-10);
    }

    #[test]
    fn tensor_factorizes_on_product_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let c1 = random_channel(2, 2, 2, &mut rng);
        let c2 = random_channel(2, 2, 3, &mut rng);
        let rho = sample_density(2, &mut rng);
        let xi = sample_density(2, &mut rng);
        let lhs = c1.tensor(&c2).apply(&rho.tensor(&xi)).unwrap();
        let rhs = c1.apply(&rho).unwrap().tensor(&c2.apply(&xi).unwrap());
        assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-10);
    }

    #[test]
    fn serde_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ch = random_channel(2, 3, 2, &mut rng);
        let json = serde_json::to_string(&ch).unwrap();
        let back: Channel = serde_json::from_str(&json).unwrap();
        assert_eq!(ch, back);
    }

    #[test]
    fn serde_rejects_non_trace_preserving() {
        let json = r#"{"dim_in":2,"dim_out":2,"kraus":[[[[0.5,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]]}"#;
        assert!(serde_json::from_str::<Channel>(json).is_err());
    }
}
