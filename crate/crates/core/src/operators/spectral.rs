//! Spectral primitives: a cyclic Jacobi eigensolver for Hermitian matrices
//! and everything built on top of it (norms, positive/negative parts, matrix
//! square roots, fidelity, spectral projections).
//!
//! The eigensolver is deterministic: fixed sweep order, fixed tie-breaking,
//! no randomness. A complex off-diagonal pivot is first rotated to the real
//! axis by a phase, then annihilated by a plane rotation, exactly as in the
//! real symmetric case.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::hermitian::{DensityOperator, HermitianOperator};
use crate::operators::matrix::ComplexMatrix;

/// Convergence threshold on the Frobenius norm of the off-diagonal part.
const OFF_DIAG_TOL: f64 = 1e-12;

/// Sweep cap; exceeding it signals ill-conditioned input.
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as matrix columns, ordered like the values.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Rebuild V·Λ·V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|x| x).into_matrix()
    }

    /// Apply a real function to the spectrum: V·f(Λ)·V†. The function is
    /// invoked once per eigenvalue in ascending order.
    pub fn map_eigenvalues(&self, mut f: impl FnMut(f64) -> f64) -> HermitianOperator {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let fj = Complex64::new(f(self.eigenvalues[j]), 0.0);
            for i in 0..n {
                scaled.set(i, j, scaled.get(i, j) * fj);
            }
        }
        let m = &scaled * &self.eigenvectors.adjoint();
        HermitianOperator::new(m).expect("spectral reassembly stays Hermitian")
    }

    /// Column `k` of V as a normalized column vector.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.eigenvectors.get(i, k)).collect()
    }

    /// Rank-one projector onto the eigenvector of the largest eigenvalue.
    pub fn top_projector(&self) -> DensityOperator {
        self.projector_at(self.dim() - 1)
    }

    /// Rank-one projector onto the eigenvector of the smallest eigenvalue.
    pub fn bottom_projector(&self) -> DensityOperator {
        self.projector_at(0)
    }

    fn projector_at(&self, k: usize) -> DensityOperator {
        let v = self.eigenvector(k);
        DensityOperator::pure(&v).expect("eigenvector columns are unit vectors")
    }
}

impl HermitianOperator {
    /// Full eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Sweeps run in fixed (p, q) order until the off-diagonal Frobenius
    /// mass drops below 1e-12, capped at 100 sweeps. Eigenvalues come back
    /// ascending; ties keep the solver's internal column order.
    pub fn eig(&self) -> Result<SpectralDecomposition> {
        let n = self.dim();
        let mut a = self.matrix().clone();
        let mut v = ComplexMatrix::identity(n);

        if n > 1 {
            let mut converged = false;
            let mut off = off_diagonal_norm(&a);
            let mut sweeps = 0;
            while sweeps < MAX_SWEEPS {
                if off < OFF_DIAG_TOL {
                    converged = true;
                    break;
                }
                for p in 0..n - 1 {
                    for q in p + 1..n {
                        jacobi_rotate(&mut a, &mut v, p, q);
                    }
                }
                sweeps += 1;
                off = off_diagonal_norm(&a);
            }
            if !converged && off >= OFF_DIAG_TOL {
                return Err(Error::EigNoConvergence {
                    off_diagonal: off,
                    sweeps,
                });
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
        order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap().then(i.cmp(&j)));

        let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
        Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Largest eigenvalue.
    pub fn lambda_max(&self) -> Result<f64> {
        Ok(self.eig()?.lambda_max())
    }

    /// Smallest eigenvalue.
    pub fn lambda_min(&self) -> Result<f64> {
        Ok(self.eig()?.lambda_min())
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                sum += a.get(r, c).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One two-sided Jacobi rotation annihilating the (p, q) entry.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a.get(p, q);
    let babs = b.norm();
    if babs == 0.0 {
        return;
    }
    let phase = b / babs;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;

    // Annihilation condition for the phase-aligned 2x2 block.
    let theta = (app - aqq) / (2.0 * babs);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let cs = Complex64::new(c, 0.0);
    let s_ph = phase.conj() * s; // s·e^{-iφ}
    let s_ph_c = phase * s; // s·e^{+iφ}

    let n = a.rows();
    // Column update: right-multiply by the rotation.
    for j in 0..n {
        let ajp = a.get(j, p);
        let ajq = a.get(j, q);
        a.set(j, p, cs * ajp + s_ph * ajq);
        a.set(j, q, cs * ajq * phase.conj() - s * ajp);
    }
    // Row update: left-multiply by its conjugate transpose.
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, cs * apj + s_ph_c * aqj);
        a.set(q, j, cs * aqj * phase - s * apj);
    }
    // Accumulate eigenvectors.
    for j in 0..n {
        let vjp = v.get(j, p);
        let vjq = v.get(j, q);
        v.set(j, p, cs * vjp + s_ph * vjq);
        v.set(j, q, cs * vjq * phase.conj() - s * vjp);
    }
    // Pin the annihilated pair and the diagonal against round-off.
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let new_pp = c * c * app + 2.0 * c * s * babs + s * s * aqq;
    let new_qq = s * s * app - 2.0 * c * s * babs + c * c * aqq;
    a.set(p, p, Complex64::new(new_pp, 0.0));
    a.set(q, q, Complex64::new(new_qq, 0.0));
}

impl ComplexMatrix {
    /// Trace norm: the sum of singular values. Hermitian inputs take the
    /// eigenvalue route; general matrices go through A†A.
    pub fn trace_norm(&self) -> f64 {
        if self.is_square() && self.asymmetry() <= 1e-10 {
            let h = HermitianOperator::new(self.clone()).expect("checked asymmetry");
            let spec = h.eig().expect("Jacobi converges on Hermitian input");
            return spec.eigenvalues().iter().map(|l| l.abs()).sum();
        }
        self.singular_values().iter().sum()
    }

    /// Operator norm: the largest singular value, via the top eigenvalue
    /// of A†A.
    pub fn operator_norm(&self) -> f64 {
        let gram = &self.adjoint() * self;
        let h = HermitianOperator::new(gram).expect("A†A is Hermitian");
        let top = h.eig().expect("Jacobi converges on Hermitian input").lambda_max();
        top.max(0.0).sqrt()
    }

    fn singular_values(&self) -> Vec<f64> {
        let gram = &self.adjoint() * self;
        let h = HermitianOperator::new(gram).expect("A†A is Hermitian");
        let spec = h.eig().expect("Jacobi converges on Hermitian input");
        spec.eigenvalues().iter().map(|l| l.max(0.0).sqrt()).collect()
    }
}

/// Split a Hermitian operator into its positive and negative parts:
/// H = K⁺ − K⁻ with both PSD and ⟨K⁺, K⁻⟩ = 0.
pub fn positive_negative_parts(
    h: &HermitianOperator,
) -> Result<(HermitianOperator, HermitianOperator)> {
    let spec = h.eig()?;
    let plus = spec.map_eigenvalues(|l| l.max(0.0));
    let minus = spec.map_eigenvalues(|l| (-l).max(0.0));
    Ok((plus, minus))
}

/// Matrix square root of a positive semidefinite operator. Eigenvalues in
/// [-1e-10, 0) are clipped to zero; anything more negative is an error.
pub fn sqrt_psd(h: &HermitianOperator) -> Result<HermitianOperator> {
    let spec = h.eig()?;
    if spec.lambda_min() < -1e-10 {
        return Err(Error::NotDensity {
            context: format!(
                "square root of an operator with eigenvalue {:.3e}",
                spec.lambda_min()
            ),
        });
    }
    Ok(spec.map_eigenvalues(|l| l.max(0.0).sqrt()))
}

/// Fidelity F(ρ, ξ) = ‖√ρ·√ξ‖_tr, clamped to [0, 1] against round-off.
///
/// Evaluated as Σᵢ √λᵢ(√ρ·ξ·√ρ): the singular values of √ρ·√ξ squared are
/// the eigenvalues of √ρ·ξ·√ρ, and this form keeps eigenvalue round-off from
/// being amplified by the square root. Eigenvalues below the solver's
/// resolution (1e-14 relative to the largest) count as zero.
pub fn fidelity(rho: &DensityOperator, xi: &DensityOperator) -> Result<f64> {
    if rho.dim() != xi.dim() {
        return Err(Error::shape(format!(
            "fidelity between dimensions {} and {}",
            rho.dim(),
            xi.dim()
        )));
    }
    let a = sqrt_psd(rho.operator())?;
    let inner = &(a.matrix() * xi.matrix()) * a.matrix();
    let spec = HermitianOperator::new(inner.symmetrize())?.eig()?;
    let floor = 1e-14 * spec.lambda_max().max(0.0);
    let f = spec
        .eigenvalues()
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .sum::<f64>();
    Ok(f.clamp(0.0, 1.0))
}

/// Euclidean projection of a real vector onto the probability simplex
/// (sort-and-shift).
pub fn project_to_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (j, &mu) in sorted.iter().enumerate() {
        cumulative += mu;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if mu - candidate > 0.0 {
            threshold = candidate;
        }
    }
    values.iter().map(|&v| (v - threshold).max(0.0)).collect()
}

/// Euclidean projection of a Hermitian operator onto the density operators:
/// decompose, project the spectrum onto the simplex, reassemble.
pub fn project_to_density(h: &HermitianOperator) -> Result<DensityOperator> {
    let spec = h.eig()?;
    let projected = project_to_simplex(spec.eigenvalues());
    let op = spec_with_values(&spec, &projected);
    Ok(DensityOperator::new_unchecked(op))
}

/// Clip the spectrum of a Hermitian operator to [-1, 1] (projection onto the
/// unit operator-norm ball). Returns the operator unchanged when already
/// inside.
pub fn clip_to_unit_ball(h: &HermitianOperator) -> Result<HermitianOperator> {
    let spec = h.eig()?;
    if spec.lambda_min() >= -1.0 && spec.lambda_max() <= 1.0 {
        return Ok(h.clone());
    }
    Ok(spec.map_eigenvalues(|l| l.clamp(-1.0, 1.0)))
}

fn spec_with_values(spec: &SpectralDecomposition, values: &[f64]) -> HermitianOperator {
    debug_assert_eq!(spec.dim(), values.len());
    let mut i = 0;
    spec.map_eigenvalues(|_| {
        let v = values[i];
        i += 1;
        v
    })
}
