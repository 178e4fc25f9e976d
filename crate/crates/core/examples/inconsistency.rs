//! The two post-measurement states assigned to one situation when standard
//! collapse on g(A) and subjective collapse on A are both accepted.

use ks_collapse::equivalence::exhibit_ttt_inconsistency;
use ks_collapse::json::matrix_to_value;
use ks_collapse::operator::eigendecompose;
use ks_collapse::{Error, HermitianOperator, SpectrumFunction, Tolerances};

fn main() -> ks_collapse::Result<()> {
    let tol = Tolerances::default();
    let sd = eigendecompose(&HermitianOperator::diagonal(&[1.0, -1.0]), &tol)?;
    let square = SpectrumFunction::from_fn(&sd, |x| x * x);

    let r = exhibit_ttt_inconsistency(&sd, &square, &tol)?;
    println!("β = {}, g⁻¹(β) = {:?}", r.beta, r.preimage);
    println!("standard   {}", matrix_to_value(r.standard_state.matrix()));
    println!(
        "subjective {}",
        matrix_to_value(r.subjective_state.matrix())
    );
    println!(
        "trace distance {:.6}, Frobenius {:.6}",
        r.trace_distance, r.frobenius_distance
    );

    let injective = eigendecompose(&HermitianOperator::diagonal(&[1.0, 2.0]), &tol)?;
    let g = SpectrumFunction::from_fn(&injective, |x| x * x);
    match exhibit_ttt_inconsistency(&injective, &g, &tol) {
        Err(Error::NotCoarseGraining) => {
            println!("diag(1, 2), g = square: injective, nothing to exhibit")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
