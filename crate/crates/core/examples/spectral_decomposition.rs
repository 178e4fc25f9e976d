//! Decompose a degenerate observable and inspect its spectral projectors.

use ks_collapse::operator::eigendecompose;
use ks_collapse::{ComplexMatrix, HermitianOperator, Tolerances};

fn main() -> ks_collapse::Result<()> {
    let tol = Tolerances::default();
    // σ_x ⊗ σ_x: eigenvalues ±1, each twice
    let xx = ComplexMatrix::from_real_rows(&[
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0],
    ])?;
    let a = HermitianOperator::new(xx, &tol)?;
    let sd = eigendecompose(&a, &tol)?;

    for (alpha, e) in sd.eigenvalues().iter().zip(sd.projectors()) {
        println!("eigenvalue {alpha:+.3}  rank {}", e.rank());
    }
    let err = sd.reconstruct().distance(a.matrix());
    println!("reconstruction error ‖Σ α E_α − A‖_F = {err:.2e}");
    println!("nondegenerate: {}", sd.is_nondegenerate());
    Ok(())
}
