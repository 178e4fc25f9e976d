//! Measuring A² versus measuring A and squaring the outcome: the updates
//! agree exactly on outcomes with a one-point preimage.

use ks_collapse::equivalence::{check_post_processing, CheckConfig};
use ks_collapse::operator::eigendecompose;
use ks_collapse::{HermitianOperator, Semantics, SpectrumFunction, Tolerances};

fn main() -> ks_collapse::Result<()> {
    let tol = Tolerances::default();
    let a = HermitianOperator::diagonal(&[2.0, 1.0, 0.0, -1.0]);
    let sd = eigendecompose(&a, &tol)?;
    let g = SpectrumFunction::from_fn(&sd, |x| x * x);

    let verdicts = check_post_processing(
        &sd,
        &g,
        Semantics::Noncontextual,
        &CheckConfig::default(),
        &tol,
    )?;
    for v in &verdicts {
        print!(
            "β = {:?}  g⁻¹(β) = {:?}  probability_equal {}  update_equal {}",
            v.delta, v.preimage, v.probability_equal, v.update_equal
        );
        match &v.witness {
            Some(w) => println!("  witness distance {:.4}", w.distance),
            None => println!(),
        }
    }
    Ok(())
}
