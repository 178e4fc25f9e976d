//! Classical conditioning on a die: events with equal preimages always
//! update the same way.

use std::collections::BTreeMap;

use ks_collapse::classical::{classical_update, verify_contrast, ClassicalState, ClassicalSystem};

fn main() -> ks_collapse::Result<()> {
    let mut observables = BTreeMap::new();
    observables.insert("face".to_string(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    observables.insert("parity".to_string(), vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
    let die = ClassicalSystem::new((1..=6).map(|i| i.to_string()).collect(), observables)?;

    let uniform = ClassicalState::uniform(6);
    let odd = classical_update(&uniform, &[1.0], die.observable("parity")?)?;
    let odd_faces = classical_update(&uniform, &[1.0, 3.0, 5.0], die.observable("face")?)?;
    println!("parity = 1     → {:?}", odd.weights());
    println!("face ∈ {{1,3,5}} → {:?}", odd_faces.weights());

    let summary = verify_contrast(&die)?;
    println!(
        "{} events, {} equivalent pairs, {} post-processing cases, {} counterexamples",
        summary.events,
        summary.equivalent_pairs,
        summary.post_processing_cases,
        summary.counterexamples.len()
    );
    Ok(())
}
