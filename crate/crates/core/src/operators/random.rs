//! Seeded random generators for states, operators, and unitaries.
//!
//! Every sampler takes the generator as an explicit argument; nothing here
//! touches global state. Normal deviates come from a Box-Muller transform so
//! the output stream depends only on the generator.

use num_complex::Complex64;
use rand::Rng;

use crate::operators::hermitian::{DensityOperator, HermitianOperator};
use crate::operators::matrix::ComplexMatrix;

/// One standard normal deviate (Box-Muller).
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    // gen() is in [0, 1); flip so the log argument stays positive.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Matrix with independent standard-normal complex entries.
pub fn sample_ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    })
}

/// Random Hermitian operator (G + G†)/2 from a Ginibre sample.
pub fn sample_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = sample_ginibre(dim, dim, rng);
    HermitianOperator::new(g.symmetrize()).expect("symmetrized matrix is Hermitian")
}

/// Random density operator GG†/tr(GG†).
pub fn sample_density(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    assert!(dim >= 1, "density operators need dimension at least 1");
    let g = sample_ginibre(dim, dim, rng);
    let gram = &g * &g.adjoint();
    let trace = gram.trace().re;
    let normalized = gram.scale_re(1.0 / trace);
    DensityOperator::new_unchecked(
        HermitianOperator::new(normalized).expect("GG† is Hermitian"),
    )
}

/// Random unit vector with complex normal amplitudes.
pub fn sample_pure(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
            .collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.iter().map(|z| z / norm).collect();
        }
    }
}

/// Random unitary: Gram-Schmidt on the columns of a Ginibre sample.
pub fn sample_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    'outer: loop {
        let g = sample_ginibre(dim, dim, rng);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut v: Vec<Complex64> = (0..dim).map(|i| g.get(i, j)).collect();
            for u in &cols {
                let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= overlap * ui;
                }
            }
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue 'outer;
            }
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            cols.push(v);
        }
        return ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][r]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn density_dim_one_is_scalar_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = sample_density(1, &mut rng);
        assert!((rho.matrix().get(0, 0).re - 1.0).abs() < 1e-12);
        assert!(rho.matrix().get(0, 0).im.abs() < 1e-15);
    }

    #[test]
    fn density_samples_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dim in [2, 3, 4] {
            for _ in 0..20 {
                let rho = sample_density(dim, &mut rng);
                assert!((rho.operator().trace_re() - 1.0).abs() < 1e-12);
                let min = rho.operator().eig().unwrap().lambda_min();
                assert!(min > -1e-10);
            }
        }
    }

    #[test]
    fn density_mean_approaches_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut mean = ComplexMatrix::zeros(2, 2);
        let samples = 10_000;
        for _ in 0..samples {
            mean = &mean + &rho_scaled(&mut rng, 1.0 / samples as f64);
        }
        let target = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(
            mean.max_abs_diff(&target) < 0.05,
            "mean deviates by {}",
            mean.max_abs_diff(&target)
        );
    }

    fn rho_scaled(rng: &mut impl Rng, w: f64) -> ComplexMatrix {
        sample_density(2, rng).matrix().scale_re(w)
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample_density(3, &mut ChaCha8Rng::seed_from_u64(77));
        let b = sample_density(3, &mut ChaCha8Rng::seed_from_u64(77));
        assert_eq!(a.matrix().max_abs_diff(b.matrix()), 0.0);
    }

    #[test]
    fn unitary_columns_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [2, 4] {
            let u = sample_unitary(dim, &mut rng);
            let gram = &u.adjoint() * &u;
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-10);
        }
    }
}
