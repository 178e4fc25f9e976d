//! Build g(A) from a table on σ(A) and check that spectral projectors
//! transport: χ_Δ(g(A)) = χ_{g⁻¹(Δ)}(A).

use ks_collapse::calculus::{apply_function, is_coarse_graining, preimage_partition};
use ks_collapse::operator::{eigendecompose, spectral_projector};
use ks_collapse::{HermitianOperator, SpectrumFunction, Tolerances};

fn main() -> ks_collapse::Result<()> {
    let tol = Tolerances::default();
    let a = HermitianOperator::diagonal(&[2.0, 0.0, -2.0]);
    let sd = eigendecompose(&a, &tol)?;
    let square = SpectrumFunction::from_fn(&sd, |x| x * x);

    let g_sd = apply_function(&square, &sd, &tol)?;
    println!("σ(A)    = {:?}", sd.eigenvalues());
    println!("σ(A²)   = {:?}", g_sd.eigenvalues());
    println!("ranks   = {:?}", g_sd.ranks());
    println!(
        "coarse-graining: {}",
        is_coarse_graining(&square, &sd, &tol)?
    );

    for (beta, pre) in preimage_partition(&square, &sd, &tol)?.blocks() {
        let lhs = spectral_projector(&g_sd, &[*beta])?;
        let rhs = spectral_projector(&sd, pre)?;
        println!(
            "β = {beta}: g⁻¹(β) = {pre:?}, ‖χ_β(A²) − χ_g⁻¹(β)(A)‖_F = {:.1e}",
            lhs.matrix().distance(rhs.matrix())
        );
    }
    Ok(())
}
