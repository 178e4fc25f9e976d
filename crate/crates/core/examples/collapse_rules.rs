//! Apply the four update rules to one state and event and compare outputs.

use ks_collapse::collapse::{apply_rule, born_probability};
use ks_collapse::operator::{eigendecompose, random_density};
use ks_collapse::{HermitianOperator, MeasurementBasis, MeasurementEvent, Tolerances, UpdateKind};

fn main() -> ks_collapse::Result<()> {
    let tol = Tolerances::default();
    let a = HermitianOperator::diagonal(&[1.0, 1.0, -1.0, 2.0]);
    let sd = eigendecompose(&a, &tol)?;
    let rho = random_density(4, 3);
    let basis = MeasurementBasis::random_rotation(&sd, 5);

    let single = MeasurementEvent::new(sd.clone(), &[1.0], Some(basis.clone()), &tol)?;
    let pair = MeasurementEvent::new(sd.clone(), &[1.0, -1.0], Some(basis), &tol)?;
    println!("P(1) = {:.4}", born_probability(&rho, &[1.0], &sd)?);
    println!(
        "P({{1, -1}}) = {:.4}",
        born_probability(&rho, &[1.0, -1.0], &sd)?
    );

    for (label, event) in [("Δ = {1}", &single), ("Δ = {1, -1}", &pair)] {
        println!("{label}");
        let block = apply_rule(UpdateKind::LuedersBlock, &rho, event, &tol)?;
        for kind in [
            UpdateKind::Standard,
            UpdateKind::Subjective,
            UpdateKind::LuedersBlock,
            UpdateKind::Contextual,
        ] {
            let name = format!("{kind:?}");
            match apply_rule(kind, &rho, event, &tol) {
                Ok(out) => println!(
                    "  {name:<12} purity {:.4}  distance to block rule {:.4}",
                    out.purity(),
                    out.distance(&block)
                ),
                Err(e) => println!("  {name:<12} {e}"),
            }
        }
    }
    Ok(())
}
