//! With context-dependent collapse, (Δ, g(A), 𝔅) and (g⁻¹(Δ), A, 𝔅) update
//! identically in every basis, while distinct bases for a degenerate A do
//! not commute.

use ks_collapse::equivalence::{bases_commute, check_post_processing, CheckConfig};
use ks_collapse::operator::eigendecompose;
use ks_collapse::{HermitianOperator, MeasurementBasis, Semantics, SpectrumFunction, Tolerances};

fn main() -> ks_collapse::Result<()> {
    let tol = Tolerances::default();
    let sd = eigendecompose(&HermitianOperator::diagonal(&[1.0, 1.0, -1.0, 0.0]), &tol)?;
    let square = SpectrumFunction::from_fn(&sd, |x| x * x);
    let config = CheckConfig {
        all_subsets: true,
        ..CheckConfig::default()
    };

    for semantics in [Semantics::Noncontextual, Semantics::Contextual] {
        let v = check_post_processing(&sd, &square, semantics, &config, &tol)?;
        let equal = v.iter().filter(|v| v.update_equal).count();
        println!("{semantics:?}: {equal}/{} verdicts update_equal", v.len());
    }

    let canonical = MeasurementBasis::canonical(&sd);
    let rotated = MeasurementBasis::random_rotation(&sd, 1);
    println!(
        "canonical vs itself commute: {}",
        bases_commute(&canonical, &canonical, &tol)?
    );
    println!(
        "canonical vs rotated commute: {}",
        bases_commute(&canonical, &rotated, &tol)?
    );
    Ok(())
}
