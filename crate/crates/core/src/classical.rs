//! Classical conditioning on a finite sample space.
//!
//! States are probability vectors over `Λ`, observables are real functions
//! on `Λ`, and an event `(Δ, A)` updates `μ` to `μ(· | A⁻¹(Δ))`. Events with
//! the same preimage always update identically, which is what makes `g ∘ A`
//! a faithful post-processing of `A`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::partition::{nonempty_subsets, set_partitions};
use crate::{Error, Result};

const PROB_TOL: f64 = 1e-12;

/// `{points: [labels], observables: {name: [values…]}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalSystem {
    pub points: Vec<String>,
    pub observables: BTreeMap<String, Vec<f64>>,
}

impl ClassicalSystem {
    pub fn new(points: Vec<String>, observables: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        let sys = Self {
            points,
            observables,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidClassical("no sample points".into()));
        }
        for (name, values) in &self.observables {
            if values.len() != self.points.len() {
                return Err(Error::InvalidClassical(format!(
                    "observable {name} has {} values for {} points",
                    values.len(),
                    self.points.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidClassical(format!(
                    "observable {name} is not finite"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn observable(&self, name: &str) -> Result<&[f64]> {
        self.observables
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidClassical(format!("unknown observable {name}")))
    }

    /// Point masses followed by the uniform distribution.
    pub fn test_states(&self) -> Vec<ClassicalState> {
        let m = self.len();
        (0..m)
            .map(|i| ClassicalState::point_mass(m, i))
            .chain(std::iter::once(ClassicalState::uniform(m)))
            .collect()
    }
}

/// A probability vector over `Λ`, or the null measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    weights: Vec<f64>,
    is_null: bool,
}

impl ClassicalState {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty()
            || weights.iter().any(|w| w.is_nan() || *w < 0.0)
            || (total - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidClassical(
                "weights must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(Self {
            weights,
            is_null: false,
        })
    }

    pub fn uniform(m: usize) -> Self {
        Self {
            weights: vec![1.0 / m as f64; m],
            is_null: false,
        }
    }

    pub fn point_mass(m: usize, at: usize) -> Self {
        let mut weights = vec![0.0; m];
        weights[at] = 1.0;
        Self {
            weights,
            is_null: false,
        }
    }

    pub fn null(m: usize) -> Self {
        Self {
            weights: vec![0.0; m],
            is_null: true,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_null(&self) -> bool {
        self.is_null
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self.is_null == other.is_null
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| (a - b).abs() <= PROB_TOL)
    }
}

/// `(Δ, A)` on a classical system, naming the observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalEvent {
    pub observable: String,
    pub outcomes: Vec<f64>,
}

fn in_range(values: &[f64], delta: &[f64]) -> Result<()> {
    match delta.iter().find(|d| !values.contains(d)) {
        Some(d) => Err(Error::InvalidClassical(format!(
            "{d} is not a value of the observable"
        ))),
        None => Ok(()),
    }
}

/// `A⁻¹(Δ)` as a membership mask over `Λ`.
pub fn preimage(values: &[f64], delta: &[f64]) -> Vec<bool> {
    values.iter().map(|v| delta.contains(v)).collect()
}

/// `μ(A⁻¹(Δ))`.
pub fn classical_probability(mu: &ClassicalState, delta: &[f64], values: &[f64]) -> Result<f64> {
    in_range(values, delta)?;
    Ok(mu
        .weights
        .iter()
        .zip(preimage(values, delta))
        .filter(|(_, hit)| *hit)
        .map(|(w, _)| w)
        .sum())
}

/// `μ(· ∩ A⁻¹(Δ)) / μ(A⁻¹(Δ))`, or the null measure when the event has
/// probability zero.
pub fn classical_update(
    mu: &ClassicalState,
    delta: &[f64],
    values: &[f64],
) -> Result<ClassicalState> {
    let m = mu.weights.len();
    if mu.is_null {
        return Ok(ClassicalState::null(m));
    }
    let p = classical_probability(mu, delta, values)?;
    if p <= PROB_TOL {
        return Ok(ClassicalState::null(m));
    }
    let weights = mu
        .weights
        .iter()
        .zip(preimage(values, delta))
        .map(|(w, hit)| if hit { w / p } else { 0.0 })
        .collect();
    Ok(ClassicalState {
        weights,
        is_null: false,
    })
}

/// When the two events have the same preimage, checks that they update
/// every test state identically; vacuously true otherwise.
pub fn classical_equivalence_check(
    system: &ClassicalSystem,
    e1: &ClassicalEvent,
    e2: &ClassicalEvent,
) -> Result<bool> {
    let a1 = system.observable(&e1.observable)?;
    let a2 = system.observable(&e2.observable)?;
    in_range(a1, &e1.outcomes)?;
    in_range(a2, &e2.outcomes)?;
    if preimage(a1, &e1.outcomes) != preimage(a2, &e2.outcomes) {
        return Ok(true);
    }
    for mu in system.test_states() {
        let u1 = classical_update(&mu, &e1.outcomes, a1)?;
        let u2 = classical_update(&mu, &e2.outcomes, a2)?;
        if !u1.approx_eq(&u2) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn range_of(values: &[f64]) -> Vec<f64> {
    let mut r = values.to_vec();
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

/// All events `(Δ, A)` of the system with `Δ` a nonempty subset of `A`'s
/// range, observables in name order.
pub fn all_events(system: &ClassicalSystem) -> Vec<ClassicalEvent> {
    system
        .observables
        .iter()
        .flat_map(|(name, values)| {
            let range = range_of(values);
            nonempty_subsets(range.len())
                .into_iter()
                .map(move |s| ClassicalEvent {
                    observable: name.clone(),
                    outcomes: s.iter().map(|&i| range[i]).collect(),
                })
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ContrastSummary {
    pub events: usize,
    /// Ordered pairs of distinct events with equal preimages.
    pub equivalent_pairs: usize,
    /// `(observable, g, Δ)` combinations checked for post-processing.
    pub post_processing_cases: usize,
    pub counterexamples: Vec<String>,
}

/// Exhaustive classical check: every pair of preimage-equivalent events
/// updates identically, and for every observable `A`, every coarse-graining
/// pattern `g` of its range and every `Δ`, `(Δ, g∘A)` and `(g⁻¹(Δ), A)`
/// agree in probability and update on all test states.
pub fn verify_contrast(system: &ClassicalSystem) -> Result<ContrastSummary> {
    system.validate()?;
    let events = all_events(system);
    let mut summary = ContrastSummary {
        events: events.len(),
        ..Default::default()
    };
    let masks: Vec<Vec<bool>> = events
        .iter()
        .map(|e| Ok(preimage(system.observable(&e.observable)?, &e.outcomes)))
        .collect::<Result<_>>()?;
    for (i, e1) in events.iter().enumerate() {
        for (j, e2) in events.iter().enumerate() {
            if i == j || masks[i] != masks[j] {
                continue;
            }
            summary.equivalent_pairs += 1;
            if !classical_equivalence_check(system, e1, e2)? {
                summary.counterexamples.push(format!(
                    "({:?}, {}) vs ({:?}, {})",
                    e1.outcomes, e1.observable, e2.outcomes, e2.observable
                ));
            }
        }
    }

    let states = system.test_states();
    for (name, values) in &system.observables {
        let range = range_of(values);
        for labels in set_partitions(range.len()) {
            let g = |v: f64| -> f64 {
                let k = range.iter().position(|&r| r == v).expect("value in range");
                labels[k] as f64
            };
            let composed: Vec<f64> = values.iter().map(|&v| g(v)).collect();
            let image = range_of(&composed);
            for subset in nonempty_subsets(image.len()) {
                let delta: Vec<f64> = subset.iter().map(|&i| image[i]).collect();
                let pre: Vec<f64> = range
                    .iter()
                    .copied()
                    .filter(|&a| delta.contains(&g(a)))
                    .collect();
                summary.post_processing_cases += 1;
                for mu in &states {
                    let p = classical_probability(mu, &delta, &composed)?;
                    let q = classical_probability(mu, &pre, values)?;
                    let u = classical_update(mu, &delta, &composed)?;
                    let w = classical_update(mu, &pre, values)?;
                    if (p - q).abs() > PROB_TOL || !u.approx_eq(&w) {
                        summary.counterexamples.push(format!(
                            "{name}: g = {labels:?}, delta = {delta:?}, state = {:?}",
                            mu.weights()
                        ));
                        break;
                    }
                }
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system() -> ClassicalSystem {
        let mut obs = BTreeMap::new();
        obs.insert("id".into(), vec![1.0, 2.0, 3.0, 4.0]);
        obs.insert("parity".into(), vec![1.0, 0.0, 1.0, 0.0]);
        obs.insert("sq".into(), vec![1.0, 4.0, 9.0, 16.0]);
        ClassicalSystem::new((1..=4).map(|i| format!("l{i}")).collect(), obs).unwrap()
    }

    #[test]
    fn probability_cases() {
        let s = system();
        let u = ClassicalState::uniform(4);
        assert_eq!(
            classical_probability(&u, &[1.0], s.observable("parity").unwrap()).unwrap(),
            0.5
        );
        assert_eq!(
            classical_probability(&u, &[0.0, 1.0], s.observable("parity").unwrap()).unwrap(),
            1.0
        );
        let pm = ClassicalState::point_mass(4, 2);
        assert_eq!(
            classical_probability(&pm, &[3.0], s.observable("id").unwrap()).unwrap(),
            1.0
        );
        assert_eq!(
            classical_probability(&pm, &[4.0], s.observable("id").unwrap()).unwrap(),
            0.0
        );
        assert!(classical_probability(&u, &[5.0], s.observable("id").unwrap()).is_err());
    }

    #[test]
    fn update_cases() {
        let s = system();
        let id = s.observable("id").unwrap();
        let out = classical_update(&ClassicalState::uniform(4), &[1.0, 2.0], id).unwrap();
        assert_eq!(out.weights(), &[0.5, 0.5, 0.0, 0.0]);
        let pm = ClassicalState::point_mass(4, 0);
        assert!(classical_update(&pm, &[3.0], id).unwrap().is_null());
        assert_eq!(classical_update(&pm, &[1.0, 3.0], id).unwrap(), pm);
    }

    #[test]
    fn equivalent_events_update_identically() {
        let s = system();
        let ev = |o: &str, d: &[f64]| ClassicalEvent {
            observable: o.into(),
            outcomes: d.to_vec(),
        };
        // parity = 1 ⇔ id ∈ {1, 3} ⇔ sq ∈ {1, 9}
        assert!(
            classical_equivalence_check(&s, &ev("parity", &[1.0]), &ev("id", &[1.0, 3.0])).unwrap()
        );
        assert!(
            classical_equivalence_check(&s, &ev("sq", &[1.0, 9.0]), &ev("id", &[1.0, 3.0]))
                .unwrap()
        );
        assert!(classical_equivalence_check(&s, &ev("id", &[2.0]), &ev("id", &[2.0])).unwrap());
        // disjoint preimages: vacuous
        assert!(classical_equivalence_check(&s, &ev("id", &[1.0]), &ev("id", &[2.0])).unwrap());
    }

    #[test]
    fn exhaustive_contrast_has_no_counterexamples() {
        let summary = verify_contrast(&system()).unwrap();
        assert!(
            summary.counterexamples.is_empty(),
            "{:?}",
            summary.counterexamples
        );
        assert!(summary.equivalent_pairs > 0);
        // id and sq: Σ over the 15 partitions of 4 points of (2^blocks − 1) = 79,
        // parity: partitions of 2 points
        assert_eq!(summary.post_processing_cases, 2 * 79 + (1 + 3));
    }

    #[test]
    fn bad_system_rejected() {
        let mut obs = BTreeMap::new();
        obs.insert("a".into(), vec![1.0]);
        assert!(ClassicalSystem::new(vec!["x".into(), "y".into()], obs).is_err());
    }
}
