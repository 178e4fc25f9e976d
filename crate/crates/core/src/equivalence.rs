//! Equivalence of measurement events and post-processing verdicts.
//!
//! Two events are *projector-equivalent* when they carry the same spectral
//! projector. Whether they also *update* the state the same way depends on
//! the collapse rule: with the standard rule on `g(A)` against the
//! subjective rule on `A`, the updates agree at `β` exactly when
//! `g⁻¹(β)` is a single point; with context-dependent collapse in a shared
//! measurement basis they always agree.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calculus::{apply_function, preimage_partition, SpectrumFunction};
use crate::collapse::{
    standard_collapse, subjective_collapse, to_update_map, MeasurementEvent, UpdateKind, UpdateMap,
};
use crate::json::matrix_to_value;
use crate::operator::{
    maximally_mixed, random_density_from, random_pure_vector, seeded_rng, SpectralDecomposition,
};
use crate::partition::{nonempty_subsets, set_partitions};
use crate::{DensityState, Error, MeasurementBasis, Result, Tolerances, C64};

/// Which pair of update rules a post-processing check compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    /// Standard (or subjective) collapse on `g(A)` against subjective
    /// collapse on `A` over the preimage.
    Noncontextual,
    /// Context-dependent collapse of both events in the same basis.
    Contextual,
}

/// A state on which two updates differ.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub state: DensityState,
    pub left: DensityState,
    pub right: DensityState,
    /// Frobenius distance between `left` and `right`.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceVerdict {
    pub case: String,
    /// Outcome set on the `g(A)` side.
    pub delta: Vec<f64>,
    /// `g⁻¹(Δ)` on the `A` side.
    pub preimage: Vec<f64>,
    pub probability_equal: bool,
    pub update_equal: bool,
    pub choi_distance: f64,
    /// Whether randomized state sampling reached the same update verdict.
    pub sampling_agrees: bool,
    pub witness: Option<Witness>,
}

impl EquivalenceVerdict {
    /// `{case, probability_equal, update_equal, witness?, distance?}`.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "case": self.case,
            "delta": self.delta,
            "preimage": self.preimage,
            "probability_equal": self.probability_equal,
            "update_equal": self.update_equal,
            "sampling_agrees": self.sampling_agrees,
        });
        if let Some(w) = &self.witness {
            v["witness"] = json!({
                "state": matrix_to_value(w.state.matrix()),
                "left": matrix_to_value(w.left.matrix()),
                "right": matrix_to_value(w.right.matrix()),
            });
            v["distance"] = json!(w.distance);
        }
        v
    }
}

/// Knobs for [`check_post_processing`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    /// Random bases sampled per degenerate observable, on top of the
    /// canonical eigenbasis.
    pub random_bases: usize,
    /// Random states for the probability clause and for the sampling
    /// cross-check of each Choi verdict.
    pub sample_states: usize,
    pub seed: u64,
    /// Compare every nonempty `Δ ⊆ σ(g(A))` instead of single outcomes.
    pub all_subsets: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            random_bases: 8,
            sample_states: 20,
            seed: 0,
            all_subsets: false,
        }
    }
}

/// `χ_{Δ₁}(A₁) = χ_{Δ₂}(A₂)` within `eq_tol · n`.
pub fn events_equivalent_projector(
    e1: &MeasurementEvent,
    e2: &MeasurementEvent,
    tol: &Tolerances,
) -> bool {
    e1.dim() == e2.dim()
        && e1
            .projector()
            .matrix()
            .approx_eq(e2.projector().matrix(), tol.eq_tol)
}

/// States used for randomized comparisons: maximally mixed first, then
/// seeded random densities.
fn sample_states(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<DensityState> {
    std::iter::once(maximally_mixed(n))
        .chain((0..count).map(|_| random_density_from(n, rng)))
        .collect()
}

fn outputs_differ(
    left: &UpdateMap,
    right: &UpdateMap,
    rho: &DensityState,
    tol: &Tolerances,
) -> Result<Option<Witness>> {
    let a = left.apply(rho, tol)?;
    let b = right.apply(rho, tol)?;
    let distance = a.distance(&b);
    if a.is_null() != b.is_null() || distance > tol.eq_tol * rho.dim() as f64 {
        Ok(Some(Witness {
            state: rho.clone(),
            left: a,
            right: b,
            distance,
        }))
    } else {
        Ok(None)
    }
}

/// `(φ₀ + φ₁)/√2` for eigenvectors of two distinct spectral points of `sd`.
fn superposition_of(sd: &SpectralDecomposition, i: usize, j: usize) -> Result<DensityState> {
    let phi0 = sd.projector(i).range_basis().into_iter().next();
    let phi1 = sd.projector(j).range_basis().into_iter().next();
    match (phi0, phi1) {
        (Some(a), Some(b)) => {
            let v: Vec<C64> = (a + b).iter().copied().collect();
            DensityState::pure(&v)
        }
        _ => Err(Error::NumericalFailure("empty spectral projector".into())),
    }
}

/// Finds a state separating two maps: the constructive superposition over
/// two points of `preimage` first, then random pure states.
fn find_witness(
    left: &UpdateMap,
    right: &UpdateMap,
    sd: &SpectralDecomposition,
    preimage: &[usize],
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
) -> Result<Option<Witness>> {
    if preimage.len() >= 2 {
        let psi = superposition_of(sd, preimage[0], preimage[1])?;
        if let Some(w) = outputs_differ(left, right, &psi, tol)? {
            return Ok(Some(w));
        }
    }
    for _ in 0..64 {
        let psi = DensityState::pure(&random_pure_vector(sd.dim(), rng))?;
        if let Some(w) = outputs_differ(left, right, &psi, tol)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

struct Comparison<'a> {
    case: String,
    delta: Vec<f64>,
    preimage_idx: Vec<usize>,
    left: UpdateMap,
    right: UpdateMap,
    sd: &'a SpectralDecomposition,
}

fn judge(
    cmp: Comparison<'_>,
    states: &[DensityState],
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
) -> Result<EquivalenceVerdict> {
    let sd = cmp.sd;
    let n = sd.dim() as f64;
    let e_left = cmp.left.event().projector();
    let e_right = cmp.right.event().projector();
    let probability_equal = states.iter().all(|rho| {
        let p = (rho.matrix() * e_left.matrix()).trace().re;
        let q = (rho.matrix() * e_right.matrix()).trace().re;
        (p - q).abs() <= tol.eq_tol
    });

    let choi_distance = cmp.left.choi_distance(&cmp.right);
    let update_equal = choi_distance <= tol.eq_tol * n * n;

    let mut sampled_equal = true;
    for rho in states {
        if outputs_differ(&cmp.left, &cmp.right, rho, tol)?.is_some() {
            sampled_equal = false;
            break;
        }
    }

    let witness = if update_equal {
        None
    } else {
        let w = find_witness(&cmp.left, &cmp.right, sd, &cmp.preimage_idx, rng, tol)?;
        if w.is_none() {
            return Err(Error::NumericalFailure(format!(
                "{}: Choi matrices differ by {choi_distance:e} but no separating state was found",
                cmp.case
            )));
        }
        w
    };

    Ok(EquivalenceVerdict {
        case: cmp.case,
        delta: cmp.delta,
        preimage: cmp
            .preimage_idx
            .iter()
            .map(|&i| sd.eigenvalues()[i])
            .collect(),
        probability_equal,
        update_equal,
        choi_distance,
        sampling_agrees: sampled_equal == update_equal,
        witness,
    })
}

/// Canonical eigenbasis, plus `extra` seeded rotations when `sd` is
/// degenerate.
pub fn sample_bases(sd: &SpectralDecomposition, extra: usize, seed: u64) -> Vec<MeasurementBasis> {
    let mut bases = vec![MeasurementBasis::canonical(sd)];
    if !sd.is_nondegenerate() {
        bases.extend(
            (0..extra as u64).map(|k| MeasurementBasis::random_rotation(sd, seed.wrapping_add(k))),
        );
    }
    bases
}

/// Compares measuring `g(A)` with measuring `A` and post-processing via
/// `g`, one verdict per outcome (or per outcome set when
/// `config.all_subsets`), and per sampled basis under contextual
/// semantics.
///
/// Under [`Semantics::Noncontextual`] the `g(A)` side uses the standard
/// rule for single outcomes and the subjective rule for larger sets; the
/// `A` side always uses the subjective rule on the preimage.
pub fn check_post_processing(
    sd: &SpectralDecomposition,
    g: &SpectrumFunction,
    semantics: Semantics,
    config: &CheckConfig,
    tol: &Tolerances,
) -> Result<Vec<EquivalenceVerdict>> {
    let g_sd = apply_function(g, sd, tol)?;
    let partition = preimage_partition(g, sd, tol)?;
    let blocks = partition.index_blocks();
    let mut rng = seeded_rng(config.seed);
    let states = sample_states(sd.dim(), config.sample_states, &mut rng);

    let deltas: Vec<Vec<usize>> = if config.all_subsets {
        nonempty_subsets(g_sd.len())
    } else {
        (0..g_sd.len()).map(|b| vec![b]).collect()
    };
    let preimage_of = |delta: &[usize]| -> Vec<usize> {
        let mut idx: Vec<usize> = delta
            .iter()
            .flat_map(|&b| blocks[b].iter().copied())
            .collect();
        idx.sort_unstable();
        idx
    };
    let values = |s: &SpectralDecomposition, idx: &[usize]| -> Vec<f64> {
        idx.iter().map(|&i| s.eigenvalues()[i]).collect()
    };

    let mut verdicts = Vec::new();
    match semantics {
        Semantics::Noncontextual => {
            for delta in &deltas {
                let pre = preimage_of(delta);
                let delta_vals = values(&g_sd, delta);
                let left_kind = if delta.len() == 1 {
                    UpdateKind::Standard
                } else {
                    UpdateKind::Subjective
                };
                let left_event = MeasurementEvent::new(g_sd.clone(), &delta_vals, None, tol)?;
                let right_event = MeasurementEvent::new(sd.clone(), &values(sd, &pre), None, tol)?;
                let cmp = Comparison {
                    case: format!("delta={delta_vals:?}"),
                    delta: delta_vals,
                    preimage_idx: pre,
                    left: to_update_map(left_kind, &left_event)?,
                    right: to_update_map(UpdateKind::Subjective, &right_event)?,
                    sd,
                };
                verdicts.push(judge(cmp, &states, &mut rng, tol)?);
            }
        }
        Semantics::Contextual => {
            let bases = sample_bases(sd, config.random_bases, config.seed);
            for (k, basis) in bases.iter().enumerate() {
                let g_basis = basis.relabel(&g_sd, tol)?;
                for delta in &deltas {
                    let pre = preimage_of(delta);
                    let delta_vals = values(&g_sd, delta);
                    let left_event = MeasurementEvent::new(
                        g_sd.clone(),
                        &delta_vals,
                        Some(g_basis.clone()),
                        tol,
                    )?;
                    let right_event = MeasurementEvent::new(
                        sd.clone(),
                        &values(sd, &pre),
                        Some(basis.clone()),
                        tol,
                    )?;
                    let cmp = Comparison {
                        case: format!("basis={k} delta={delta_vals:?}"),
                        delta: delta_vals,
                        preimage_idx: pre,
                        left: to_update_map(UpdateKind::Contextual, &left_event)?,
                        right: to_update_map(UpdateKind::Contextual, &right_event)?,
                        sd,
                    };
                    verdicts.push(judge(cmp, &states, &mut rng, tol)?);
                }
            }
        }
    }
    Ok(verdicts)
}

/// The verdict theory predicts: contextual updates always agree;
/// noncontextual ones agree iff every outcome has a one-point preimage.
pub fn predicted_update_equal(semantics: Semantics, verdict: &EquivalenceVerdict) -> bool {
    match semantics {
        Semantics::Contextual => true,
        Semantics::Noncontextual => verdict.preimage.len() == verdict.delta.len(),
    }
}

/// Two post-measurement states for one physical situation that the
/// standard rule on `g(A)` and the subjective rule on `A` disagree on.
#[derive(Debug, Clone, PartialEq)]
pub struct InconsistencyReport {
    pub beta: f64,
    pub preimage: Vec<f64>,
    /// The pure state `(φ₀ + φ₁)/√2`.
    pub state: DensityState,
    /// Standard collapse of `g(A)` at `β`.
    pub standard_state: DensityState,
    /// Subjective collapse of `A` on `g⁻¹(β)`.
    pub subjective_state: DensityState,
    pub trace_distance: f64,
    pub frobenius_distance: f64,
}

impl InconsistencyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "beta": self.beta,
            "preimage": self.preimage,
            "state": matrix_to_value(self.state.matrix()),
            "standard_state": matrix_to_value(self.standard_state.matrix()),
            "subjective_state": matrix_to_value(self.subjective_state.matrix()),
            "trace_distance": self.trace_distance,
            "frobenius_distance": self.frobenius_distance,
        })
    }
}

/// For the first `β` with a multi-point preimage, evaluates both rules on
/// `(φ₀ + φ₁)/√2`. Fails with [`Error::NotCoarseGraining`] when `g` is
/// injective on `σ(A)`.
pub fn exhibit_ttt_inconsistency(
    sd: &SpectralDecomposition,
    g: &SpectrumFunction,
    tol: &Tolerances,
) -> Result<InconsistencyReport> {
    let partition = preimage_partition(g, sd, tol)?;
    let (b, block) = partition
        .index_blocks()
        .iter()
        .enumerate()
        .find(|(_, blk)| blk.len() > 1)
        .ok_or(Error::NotCoarseGraining)?;
    let g_sd = apply_function(g, sd, tol)?;
    let beta = g_sd.eigenvalues()[b];
    let preimage: Vec<f64> = partition.blocks()[b].1.clone();
    let state = superposition_of(sd, block[0], block[1])?;
    let standard_state = standard_collapse(&state, beta, &g_sd, tol)?;
    let subjective_state = subjective_collapse(&state, &preimage, sd, tol)?;
    Ok(InconsistencyReport {
        beta,
        preimage,
        trace_distance: standard_state.trace_distance(&subjective_state),
        frobenius_distance: standard_state.distance(&subjective_state),
        state,
        standard_state,
        subjective_state,
    })
}

/// True iff every `E_i` of `b` commutes with every `F_j` of `c`. Both bases
/// must belong to the same observable (same dimension and label multiset).
pub fn bases_commute(b: &MeasurementBasis, c: &MeasurementBasis, tol: &Tolerances) -> Result<bool> {
    if b.dim() != c.dim() {
        return Err(Error::BasisMismatch(format!(
            "dimensions {} and {} differ",
            b.dim(),
            c.dim()
        )));
    }
    let sorted = |m: &MeasurementBasis| {
        let mut l = m.labels().to_vec();
        l.sort_by(f64::total_cmp);
        l
    };
    let (lb, lc) = (sorted(b), sorted(c));
    let scale = lb.iter().chain(&lc).fold(1.0f64, |m, x| m.max(x.abs()));
    if lb
        .iter()
        .zip(&lc)
        .any(|(x, y)| (x - y).abs() > tol.cluster_tol * scale * b.dim() as f64)
    {
        return Err(Error::BasisMismatch(
            "bases belong to different observables".into(),
        ));
    }
    Ok(b.projectors().iter().all(|e| {
        c.projectors().iter().all(|f| {
            e.matrix().commutator(f.matrix()).frobenius_norm() <= tol.eq_tol * b.dim() as f64
        })
    }))
}

/// If two contextual events have equal update maps, checks that their
/// spectral projectors agree by evaluating both maps on `I/n`, which
/// yields `E_Δ / tr(E_Δ)`. Vacuously true when the maps differ.
pub fn contextual_event_equal_implies_same_projector(
    e1: &MeasurementEvent,
    e2: &MeasurementEvent,
    tol: &Tolerances,
) -> Result<bool> {
    let m1 = to_update_map(UpdateKind::Contextual, e1)?;
    let m2 = to_update_map(UpdateKind::Contextual, e2)?;
    if !m1.choi_equal(&m2, tol.eq_tol) {
        return Ok(true);
    }
    let phi = maximally_mixed(e1.dim());
    let out1 = m1.apply(&phi, tol)?;
    let out2 = m2.apply(&phi, tol)?;
    let p1 = e1.projector();
    let p2 = e2.projector();
    let expected1 = p1.matrix().scale(1.0 / p1.rank() as f64);
    let expected2 = p2.matrix().scale(1.0 / p2.rank() as f64);
    Ok(out1.matrix().approx_eq(&expected1, tol.eq_tol)
        && out2.matrix().approx_eq(&expected2, tol.eq_tol)
        && out1.approx_eq(&out2, tol.eq_tol)
        && p1.matrix().approx_eq(p2.matrix(), tol.eq_tol))
}

/// Every function on `σ(A)` up to relabelling of values: one table per set
/// partition of the spectrum, block `k` mapped to the value `k`.
pub fn partition_functions(sd: &SpectralDecomposition) -> Vec<SpectrumFunction> {
    set_partitions(sd.len())
        .into_iter()
        .map(|labels| {
            SpectrumFunction::new(
                sd.eigenvalues()
                    .iter()
                    .zip(labels)
                    .map(|(&a, l)| (a, l as f64))
                    .collect(),
            )
        })
        .collect()
}
