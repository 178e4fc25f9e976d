#![allow(dead_code)]

use ks_collapse::operator::{eigendecompose, random_unitary};
use ks_collapse::{
    ComplexMatrix, HermitianOperator, SpectralDecomposition, SpectrumFunction, Tolerances, C64,
};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `values` repeated by `mult`, in that order along the diagonal.
pub fn with_multiplicities(values: &[f64], mult: &[usize]) -> Vec<f64> {
    values
        .iter()
        .zip(mult)
        .flat_map(|(&v, &m)| std::iter::repeat_n(v, m))
        .collect()
}

pub fn decompose(a: &HermitianOperator) -> SpectralDecomposition {
    eigendecompose(a, &Tolerances::default()).expect("decomposes")
}

pub fn diagonal(diag: &[f64]) -> (HermitianOperator, SpectralDecomposition) {
    let a = HermitianOperator::diagonal(diag);
    let sd = decompose(&a);
    (a, sd)
}

/// `U diag(diag) U†` for a seeded Haar-random `U`.
pub fn rotated(diag: &[f64], seed: u64) -> (HermitianOperator, SpectralDecomposition) {
    let n = diag.len();
    let u = random_unitary(n, &mut rng(seed));
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        diag.iter().map(|&x| C64::new(x, 0.0)),
    ));
    let m = ComplexMatrix::new(&u * d * u.adjoint())
        .unwrap()
        .hermitize();
    let a = HermitianOperator::new(m, &Tolerances::default()).unwrap();
    let sd = decompose(&a);
    (a, sd)
}

/// `g` sending the `k`-th spectral point to `labels[k]`.
pub fn table(sd: &SpectralDecomposition, labels: &[f64]) -> SpectrumFunction {
    SpectrumFunction::new(
        sd.eigenvalues()
            .iter()
            .copied()
            .zip(labels.iter().copied())
            .collect(),
    )
}
