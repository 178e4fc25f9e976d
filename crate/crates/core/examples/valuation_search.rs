//! Search for value assignments on a commuting family and on the bundled
//! Peres–Mermin family.

use std::path::Path;

use ks_collapse::valuation::{
    discover_functional_relations, search_valuation, FamilyFile, ObservableFamily,
};
use ks_collapse::{HermitianOperator, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let commuting = ObservableFamily::new(
        vec![
            HermitianOperator::diagonal(&[1.0, 2.0, 3.0]),
            HermitianOperator::diagonal(&[1.0, 1.0, -1.0]),
            HermitianOperator::diagonal(&[1.0, 4.0, 9.0]),
        ],
        &tol,
    )?;
    let commuting = discover_functional_relations(&commuting, &tol);
    println!(
        "commuting family: {}",
        search_valuation(&commuting, &tol)?.to_json()
    );

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/valuation-peres-mermin.json");
    let scenario: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let file: FamilyFile = serde_json::from_value(scenario["payload"]["family"].clone())?;
    let pm = discover_functional_relations(&ObservableFamily::from_file(&file, &tol)?, &tol);
    let outcome = search_valuation(&pm, &tol)?;
    let json = outcome.to_json();
    println!(
        "Peres-Mermin: {} members, {} relations, exists = {}, assignments tried = {}",
        pm.len(),
        pm.relations().len(),
        json["exists"],
        json["assignments_tried"]
    );
    Ok(())
}
