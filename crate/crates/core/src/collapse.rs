//! State-update rules for projective measurement events.
//!
//! Every rule has the form `ρ ↦ Φ(ρ) / tr(ρ E_Δ)` with `Φ(X) = Σ_K K X K`
//! for a family of orthogonal projectors `K` whose squares sum to `E_Δ`:
//!
//! | rule             | projectors `K`                       |
//! |------------------|--------------------------------------|
//! | standard         | `E_α`                                |
//! | subjective       | `E_α` for `α ∈ Δ`                    |
//! | Lüders block     | `E_Δ`                                |
//! | contextual       | basis elements `E_i` with `α_i ∈ Δ`  |
//!
//! When `tr(ρ E_Δ)` is at or below `prob_floor` the result is the null
//! state, and the null state is absorbing.

use serde::{Deserialize, Serialize};

use crate::operator::{spectral_projector, SpectralDecomposition};
use crate::{ComplexMatrix, DensityState, Error, MeasurementBasis, Projector, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateKind {
    Standard,
    Subjective,
    LuedersBlock,
    Contextual,
}

/// `(Δ, A)` or, with a basis, `(Δ, A, 𝔅)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEvent {
    sd: SpectralDecomposition,
    outcomes: Vec<usize>,
    basis: Option<MeasurementBasis>,
}

impl MeasurementEvent {
    pub fn new(
        sd: SpectralDecomposition,
        outcomes: &[f64],
        basis: Option<MeasurementBasis>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidEvent("outcome set is empty".into()));
        }
        let outcomes = sd.snap_set(outcomes)?;
        let basis = basis.map(|b| b.relabel(&sd, tol)).transpose()?;
        Ok(Self {
            sd,
            outcomes,
            basis,
        })
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.sd
    }

    pub fn outcome_indices(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn outcomes(&self) -> Vec<f64> {
        self.outcomes
            .iter()
            .map(|&i| self.sd.eigenvalues()[i])
            .collect()
    }

    pub fn basis(&self) -> Option<&MeasurementBasis> {
        self.basis.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.sd.dim()
    }

    /// `E_Δ`.
    pub fn projector(&self) -> Projector {
        self.sd.projector_for_indices(&self.outcomes)
    }

    fn is_singleton(&self) -> bool {
        self.outcomes.len() == 1
    }
}

fn check_dim(rho: &DensityState, sd: &SpectralDecomposition) -> Result<()> {
    if rho.dim() != sd.dim() {
        return Err(Error::DimensionMismatch {
            expected: sd.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// `Σ_K K ρ K`.
fn sandwich_sum<'a>(
    rho: &ComplexMatrix,
    projectors: impl IntoIterator<Item = &'a Projector>,
) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rho.dim());
    for k in projectors {
        let m = k.matrix();
        out = &out + &(&(m * rho) * m);
    }
    out
}

/// `tr(ρ E)` clamped to `[0, 1]`.
fn probability_of(rho: &DensityState, e: &Projector) -> f64 {
    (rho.matrix() * e.matrix()).trace().re.clamp(0.0, 1.0)
}

fn normalize_or_null(
    rho: &DensityState,
    e_delta: &Projector,
    projectors: &[&Projector],
    tol: &Tolerances,
) -> DensityState {
    if rho.is_null() {
        return DensityState::null(rho.dim());
    }
    let p = probability_of(rho, e_delta);
    if p <= tol.prob_floor {
        return DensityState::null(rho.dim());
    }
    let out = sandwich_sum(rho.matrix(), projectors.iter().copied());
    let tr = out.trace().re;
    DensityState::from_unnormalized(out, tr)
}

/// Basis elements whose label lies in the outcome set.
fn basis_elements<'a>(
    basis: &'a MeasurementBasis,
    sd: &SpectralDecomposition,
    outcomes: &[usize],
) -> Vec<&'a Projector> {
    basis
        .projectors()
        .iter()
        .zip(basis.labels())
        .filter(|(_, &label)| {
            sd.index_of(label)
                .is_some_and(|idx| outcomes.contains(&idx))
        })
        .map(|(e, _)| e)
        .collect()
}

/// `P_ρ(Δ, A) = tr(ρ E_Δ)`.
pub fn born_probability(
    rho: &DensityState,
    delta: &[f64],
    sd: &SpectralDecomposition,
) -> Result<f64> {
    check_dim(rho, sd)?;
    if rho.is_null() {
        return Err(Error::InvalidState("probability of the null state".into()));
    }
    let e = spectral_projector(sd, delta)?;
    Ok(probability_of(rho, &e))
}

/// `E_α ρ E_α / tr(ρ E_α)`, or the null state on a zero-probability
/// outcome.
pub fn standard_collapse(
    rho: &DensityState,
    alpha: f64,
    sd: &SpectralDecomposition,
    tol: &Tolerances,
) -> Result<DensityState> {
    check_dim(rho, sd)?;
    let e = sd.projector(sd.snap(alpha)?);
    Ok(normalize_or_null(rho, e, &[e], tol))
}

/// `Σ_{α∈Δ} E_α ρ E_α / tr(ρ E_Δ)`: the mixture of standard collapses
/// weighted by `P(α | Δ)`.
pub fn subjective_collapse(
    rho: &DensityState,
    delta: &[f64],
    sd: &SpectralDecomposition,
    tol: &Tolerances,
) -> Result<DensityState> {
    check_dim(rho, sd)?;
    if delta.is_empty() {
        return Err(Error::InvalidEvent("outcome set is empty".into()));
    }
    let idx = sd.snap_set(delta)?;
    let e_delta = sd.projector_for_indices(&idx);
    let parts: Vec<&Projector> = idx.iter().map(|&i| sd.projector(i)).collect();
    Ok(normalize_or_null(rho, &e_delta, &parts, tol))
}

/// `ρ^A = Σ_α E_α ρ E_α`, measuring `A` and discarding the outcome.
pub fn loss_of_outcome(
    rho: &DensityState,
    sd: &SpectralDecomposition,
    tol: &Tolerances,
) -> Result<DensityState> {
    subjective_collapse(rho, sd.eigenvalues(), sd, tol)
}

/// `E_Δ ρ E_Δ / tr(ρ E_Δ)`. With `Δ = σ(A)` this leaves every state
/// unchanged.
pub fn lueders_block_collapse(
    rho: &DensityState,
    delta: &[f64],
    sd: &SpectralDecomposition,
    tol: &Tolerances,
) -> Result<DensityState> {
    check_dim(rho, sd)?;
    if delta.is_empty() {
        return Err(Error::InvalidEvent("outcome set is empty".into()));
    }
    let e_delta = spectral_projector(sd, delta)?;
    Ok(normalize_or_null(rho, &e_delta, &[&e_delta], tol))
}

/// `Σ_{i: α_i = α} E_i ρ E_i / tr(ρ E_α)` for a measurement basis `𝔅` of `A`.
pub fn contextual_collapse(
    rho: &DensityState,
    alpha: f64,
    sd: &SpectralDecomposition,
    basis: &MeasurementBasis,
    tol: &Tolerances,
) -> Result<DensityState> {
    contextual_subjective_collapse(rho, &[alpha], sd, basis, tol)
}

/// `Σ_{i: α_i ∈ Δ} E_i ρ E_i / tr(ρ E_Δ)`.
pub fn contextual_subjective_collapse(
    rho: &DensityState,
    delta: &[f64],
    sd: &SpectralDecomposition,
    basis: &MeasurementBasis,
    tol: &Tolerances,
) -> Result<DensityState> {
    check_dim(rho, sd)?;
    if delta.is_empty() {
        return Err(Error::InvalidEvent("outcome set is empty".into()));
    }
    let idx = sd.snap_set(delta)?;
    let basis = basis.relabel(sd, tol)?;
    let e_delta = sd.projector_for_indices(&idx);
    let parts = basis_elements(&basis, sd, &idx);
    Ok(normalize_or_null(rho, &e_delta, &parts, tol))
}

/// Applies `kind` to `rho` for `event`.
pub fn apply_rule(
    kind: UpdateKind,
    rho: &DensityState,
    event: &MeasurementEvent,
    tol: &Tolerances,
) -> Result<DensityState> {
    let sd = event.decomposition();
    let outcomes = event.outcomes();
    match kind {
        UpdateKind::Standard => {
            if !event.is_singleton() {
                return Err(Error::InvalidEvent(
                    "standard collapse needs a single outcome".into(),
                ));
            }
            standard_collapse(rho, outcomes[0], sd, tol)
        }
        UpdateKind::Subjective => subjective_collapse(rho, &outcomes, sd, tol),
        UpdateKind::LuedersBlock => lueders_block_collapse(rho, &outcomes, sd, tol),
        UpdateKind::Contextual => {
            let basis = event
                .basis()
                .ok_or_else(|| Error::BasisMismatch("contextual update needs a basis".into()))?;
            contextual_subjective_collapse(rho, &outcomes, sd, basis, tol)
        }
    }
}

/// An update rule materialized for one event, with the Choi matrix
/// `Σ_{kl} |k⟩⟨l| ⊗ Φ(|k⟩⟨l|)` of its unnormalized linear part `Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateMap {
    kind: UpdateKind,
    event: MeasurementEvent,
    operators: Vec<Projector>,
    e_delta: Projector,
    choi: ComplexMatrix,
}

/// Projectors `K` of the linear part `Φ(X) = Σ K X K` for `kind` on `event`.
fn linear_part(kind: UpdateKind, event: &MeasurementEvent) -> Result<Vec<Projector>> {
    let sd = event.decomposition();
    Ok(match kind {
        UpdateKind::Standard => {
            if !event.is_singleton() {
                return Err(Error::InvalidEvent(
                    "standard collapse needs a single outcome".into(),
                ));
            }
            vec![sd.projector(event.outcome_indices()[0]).clone()]
        }
        UpdateKind::Subjective => event
            .outcome_indices()
            .iter()
            .map(|&i| sd.projector(i).clone())
            .collect(),
        UpdateKind::LuedersBlock => vec![event.projector()],
        UpdateKind::Contextual => {
            let basis = event
                .basis()
                .ok_or_else(|| Error::BasisMismatch("contextual update needs a basis".into()))?;
            basis_elements(basis, sd, event.outcome_indices())
                .into_iter()
                .cloned()
                .collect()
        }
    })
}

fn choi_of(operators: &[Projector], n: usize) -> ComplexMatrix {
    let mut c = nalgebra::DMatrix::zeros(n * n, n * n);
    for k in operators {
        let m = k.matrix();
        for a in 0..n {
            for b in 0..n {
                // Φ(|a⟩⟨b|)[i, j] = Σ_K K[i, a] K[b, j]
                for i in 0..n {
                    let kia = m[(i, a)];
                    if kia.norm_sqr() == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        c[(a * n + i, b * n + j)] += kia * m[(b, j)];
                    }
                }
            }
        }
    }
    ComplexMatrix::new(c).expect("n >= 1")
}

/// Materializes `kind` on `event`.
pub fn to_update_map(kind: UpdateKind, event: &MeasurementEvent) -> Result<UpdateMap> {
    let operators = linear_part(kind, event)?;
    let choi = choi_of(&operators, event.dim());
    Ok(UpdateMap {
        kind,
        event: event.clone(),
        operators,
        e_delta: event.projector(),
        choi,
    })
}

impl UpdateMap {
    pub fn kind(&self) -> UpdateKind {
        self.kind
    }

    pub fn event(&self) -> &MeasurementEvent {
        &self.event
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// `Φ(X)`.
    pub fn apply_linear(&self, x: &ComplexMatrix) -> ComplexMatrix {
        sandwich_sum(x, &self.operators)
    }

    /// The normalized update `T(ρ)`; same result as [`apply_rule`] without
    /// re-deriving the operators.
    pub fn apply(&self, rho: &DensityState, tol: &Tolerances) -> Result<DensityState> {
        check_dim(rho, self.event.decomposition())?;
        let ops: Vec<&Projector> = self.operators.iter().collect();
        Ok(normalize_or_null(rho, &self.e_delta, &ops, tol))
    }

    /// `‖C₁ − C₂‖_F`.
    pub fn choi_distance(&self, other: &UpdateMap) -> f64 {
        if self.choi.dim() != other.choi.dim() {
            return f64::INFINITY;
        }
        self.choi.distance(&other.choi)
    }

    /// `‖C₁ − C₂‖_F ≤ eq_tol · n²`.
    pub fn choi_equal(&self, other: &UpdateMap, eq_tol: f64) -> bool {
        let n = self.event.dim() as f64;
        self.choi_distance(other) <= eq_tol * n * n
    }

    /// Rank of the Choi matrix (number of eigenvalues above `eq_tol`).
    pub fn choi_rank(&self, eq_tol: f64) -> usize {
        self.choi
            .hermitian_eigenvalues()
            .into_iter()
            .filter(|&x| x > eq_tol)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{eigendecompose, maximally_mixed, random_density};
    use crate::{HermitianOperator, C64};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag(d: &[f64]) -> SpectralDecomposition {
        eigendecompose(&HermitianOperator::diagonal(d), &tol()).unwrap()
    }

    fn plus() -> DensityState {
        DensityState::pure_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()
    }

    fn proj(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::diagonal(d)
    }

    #[test]
    fn born_probability_cases() {
        let sd = diag(&[1.0, 1.0, -1.0, 2.0]);
        let p = born_probability(&maximally_mixed(4), &[1.0], &sd).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let rho = random_density(4, 11);
        let p = born_probability(&rho, &[-1.0, 1.0, 2.0], &sd).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let p = born_probability(&plus(), &[1.0], &diag(&[1.0, -1.0])).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(matches!(
            born_probability(&plus(), &[3.0], &diag(&[1.0, -1.0])),
            Err(Error::UnknownSpectralPoint(_))
        ));
    }

    #[test]
    fn standard_collapse_cases() {
        let t = tol();
        let sd = diag(&[1.0, -1.0]);
        let out = standard_collapse(&plus(), 1.0, &sd, &t).unwrap();
        assert!(out.matrix().approx_eq(&proj(&[1.0, 0.0]), 1e-15));

        let zero = DensityState::pure_real(&[1.0, 0.0]).unwrap();
        assert_eq!(standard_collapse(&zero, 1.0, &sd, &t).unwrap(), zero);
        let null = standard_collapse(&zero, -1.0, &sd, &t).unwrap();
        assert!(null.is_null());
        assert!(standard_collapse(&null, 1.0, &sd, &t).unwrap().is_null());
    }

    #[test]
    fn subjective_full_spectrum_on_pure_state() {
        // nondegenerate A = diag(3, 1, -2): Σ |⟨φ_i|ψ⟩|² |φ_i⟩⟨φ_i|
        let t = tol();
        let sd = diag(&[3.0, 1.0, -2.0]);
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.48), C64::new(0.64, 0.0)];
        let rho = DensityState::pure(&psi).unwrap();
        let out = subjective_collapse(&rho, sd.eigenvalues(), &sd, &t).unwrap();
        let expected = proj(&[0.36, 0.2304, 0.4096]);
        assert!(out.matrix().approx_eq(&expected, 1e-14));
    }

    #[test]
    fn subjective_on_superposition_is_even_mixture() {
        let t = tol();
        let sd = diag(&[1.0, -1.0]);
        let out = subjective_collapse(&plus(), &[1.0, -1.0], &sd, &t).unwrap();
        assert!(out.matrix().approx_eq(&proj(&[0.5, 0.5]), 1e-15));
        assert!(out.distance(&plus()) > 0.5);
    }

    #[test]
    fn loss_of_outcome_cases() {
        let t = tol();
        let sd = diag(&[1.0, -1.0]);
        let out = loss_of_outcome(&plus(), &sd, &t).unwrap();
        assert!(out.matrix().approx_eq(&proj(&[0.5, 0.5]), 1e-15));

        let rho = DensityState::new(proj(&[0.3, 0.7]), &t).unwrap();
        assert!(loss_of_outcome(&rho, &sd, &t)
            .unwrap()
            .approx_eq(&rho, 1e-15));

        // generic ρ, nondegenerate A: diagonal part in the eigenbasis
        let rho = random_density(3, 5);
        let sd = diag(&[0.0, 4.0, -1.0]);
        let out = loss_of_outcome(&rho, &sd, &t).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j {
                    rho.matrix()[(i, j)]
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((out.matrix()[(i, j)] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn lueders_block_cases() {
        let t = tol();
        let sd = diag(&[1.0, -1.0]);
        assert!(lueders_block_collapse(&plus(), &[1.0, -1.0], &sd, &t)
            .unwrap()
            .approx_eq(&plus(), 1e-15));
        let rho = random_density(2, 1);
        let a = lueders_block_collapse(&rho, &[-1.0], &sd, &t).unwrap();
        let b = standard_collapse(&rho, -1.0, &sd, &t).unwrap();
        assert!(a.approx_eq(&b, 1e-15));
    }

    #[test]
    fn contextual_collapse_depends_on_basis() {
        let t = tol();
        let sd = diag(&[1.0, 1.0, -1.0]);
        let psi = DensityState::pure_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap();

        let standard = MeasurementBasis::canonical(&sd);
        let out = contextual_collapse(&psi, 1.0, &sd, &standard, &t).unwrap();
        // canonical basis for diag(1, 1, -1) spans e0, e1 in some order
        assert!(out.matrix().approx_eq(&proj(&[0.5, 0.5, 0.0]), 1e-12));

        let s = FRAC_1_SQRT_2;
        let c = |x: f64| C64::new(x, 0.0);
        let rotated = MeasurementBasis::from_vectors(
            &[
                vec![c(s), c(s), c(0.0)],
                vec![c(s), c(-s), c(0.0)],
                vec![c(0.0), c(0.0), c(1.0)],
            ],
            &sd,
            &t,
        )
        .unwrap();
        let out = contextual_collapse(&psi, 1.0, &sd, &rotated, &t).unwrap();
        assert!(out.approx_eq(&psi, 1e-12));
    }

    #[test]
    fn contextual_rejects_foreign_basis() {
        let t = tol();
        let sd = diag(&[1.0, 1.0, -1.0]);
        let other = MeasurementBasis::canonical(&diag(&[1.0, -1.0, -1.0]));
        let rho = maximally_mixed(3);
        let basis_for_other = MeasurementBasis::from_vectors(
            &[
                vec![C64::new(0.0, 0.0), C64::new(0.6, 0.0), C64::new(0.8, 0.0)],
                vec![C64::new(0.0, 0.0), C64::new(0.8, 0.0), C64::new(-0.6, 0.0)],
                vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            ],
            &diag(&[1.0, -1.0, -1.0]),
            &t,
        )
        .unwrap();
        assert!(contextual_collapse(&rho, 1.0, &sd, &other, &t).is_ok());
        assert!(matches!(
            contextual_collapse(&rho, 1.0, &sd, &basis_for_other, &t),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn maximally_mixed_contextual_identity() {
        let t = tol();
        let sd = diag(&[1.0, 1.0, -1.0, 2.0]);
        let basis = MeasurementBasis::random_rotation(&sd, 3);
        let out = contextual_subjective_collapse(&maximally_mixed(4), &[1.0, 2.0], &sd, &basis, &t)
            .unwrap();
        assert!(out
            .matrix()
            .approx_eq(&proj(&[1.0, 1.0, 0.0, 1.0]).scale(1.0 / 3.0), 1e-12));
    }

    #[test]
    fn update_map_choi() {
        let t = tol();
        let sd = diag(&[1.0, -1.0]);
        let ev = MeasurementEvent::new(sd.clone(), &[1.0], None, &t).unwrap();
        let map = to_update_map(UpdateKind::Standard, &ev).unwrap();
        assert_eq!(map.choi_rank(1e-12), 1);
        // X ↦ E₁XE₁ with E₁ = |0⟩⟨0|: Choi = |00⟩⟨00|
        assert!((map.choi()[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((map.choi().frobenius_norm() - 1.0).abs() < 1e-15);

        let full = MeasurementEvent::new(sd.clone(), &[1.0, -1.0], None, &t).unwrap();
        let deph = to_update_map(UpdateKind::Subjective, &full).unwrap();
        let c = deph.choi();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(c[(i, j)].norm() < 1e-15);
                }
            }
        }
        assert_eq!(deph.choi_rank(1e-12), 2);

        let again = to_update_map(UpdateKind::Standard, &ev).unwrap();
        assert_eq!(map.choi(), again.choi());
        assert!(matches!(
            to_update_map(UpdateKind::Standard, &full),
            Err(Error::InvalidEvent(_))
        ));
        assert!(matches!(
            to_update_map(UpdateKind::Contextual, &full),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn update_map_linear_part_matches_rule() {
        let t = tol();
        let sd = diag(&[1.0, 1.0, -1.0]);
        let basis = MeasurementBasis::random_rotation(&sd, 9);
        let ev = MeasurementEvent::new(sd, &[1.0], Some(basis), &t).unwrap();
        let rho = random_density(3, 4);
        for kind in [
            UpdateKind::Standard,
            UpdateKind::Subjective,
            UpdateKind::LuedersBlock,
            UpdateKind::Contextual,
        ] {
            let map = to_update_map(kind, &ev).unwrap();
            let lin = map.apply_linear(rho.matrix());
            let p = lin.trace().re;
            let via_map = map.apply(&rho, &t).unwrap();
            let via_rule = apply_rule(kind, &rho, &ev, &t).unwrap();
            assert!(
                lin.scale(1.0 / p).approx_eq(via_map.matrix(), 1e-12),
                "{kind:?}"
            );
            assert!(via_map.approx_eq(&via_rule, 1e-12), "{kind:?}");
            assert!(map.choi().hermitian_eigenvalues()[0] > -1e-12);
        }
    }
}
