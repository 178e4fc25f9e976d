//! Functional calculus on finite spectra.
//!
//! A function of an observable is stored as a table on the spectrum;
//! `g(A) = Σ_α g(α) E_α` with equal values merged into one spectral point.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::operator::{seeded_rng, HermitianOperator, MeasurementBasis, SpectralDecomposition};
use crate::{Error, Projector, Result, Tolerances};

/// A real function on `σ(A)`, as `(α, g(α))` pairs.
///
/// Serializes as `[[α, g(α)], …]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectrumFunction {
    table: Vec<(f64, f64)>,
}

impl SpectrumFunction {
    pub fn new(table: Vec<(f64, f64)>) -> Self {
        Self { table }
    }

    /// Tabulates `f` on every spectral point of `sd`.
    pub fn from_fn(sd: &SpectralDecomposition, f: impl Fn(f64) -> f64) -> Self {
        Self {
            table: sd.eigenvalues().iter().map(|&a| (a, f(a))).collect(),
        }
    }

    pub fn identity(sd: &SpectralDecomposition) -> Self {
        Self::from_fn(sd, |a| a)
    }

    /// Values indexed by spectral point of `sd`.
    pub fn values(&self, sd: &SpectralDecomposition) -> Result<Vec<f64>> {
        let mut values: Vec<Option<f64>> = vec![None; sd.len()];
        for &(alpha, value) in &self.table {
            let idx = sd
                .index_of(alpha)
                .ok_or_else(|| Error::DomainMismatch(format!("{alpha} is not in the spectrum")))?;
            if values[idx].replace(value).is_some() {
                return Err(Error::DomainMismatch(format!(
                    "spectral point {} listed twice",
                    sd.eigenvalues()[idx]
                )));
            }
            if !value.is_finite() {
                return Err(Error::DomainMismatch(format!("g({alpha}) is not finite")));
            }
        }
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::DomainMismatch(format!("no value for {}", sd.eigenvalues()[i]))
                })
            })
            .collect()
    }

    pub fn table(&self) -> &[(f64, f64)] {
        &self.table
    }

    /// `h ∘ g` as a table on `σ(A)`, where `self` is `h` on `σ(g(A))`.
    pub fn compose_after(
        &self,
        g: &SpectrumFunction,
        sd: &SpectralDecomposition,
        tol: &Tolerances,
    ) -> Result<SpectrumFunction> {
        let g_sd = apply_function(g, sd, tol)?;
        let h_vals = self.values(&g_sd)?;
        let g_vals = g.values(sd)?;
        let table = sd
            .eigenvalues()
            .iter()
            .zip(g_vals)
            .map(|(&a, gv)| {
                let j = g_sd.snap(gv)?;
                Ok((a, h_vals[j]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectrumFunction { table })
    }
}

/// `σ(A)` split into the level sets `Δ_β = g⁻¹(β)`, ascending in `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreimagePartition {
    blocks: Vec<(f64, Vec<f64>)>,
    indices: Vec<Vec<usize>>,
}

impl PreimagePartition {
    pub fn blocks(&self) -> &[(f64, Vec<f64>)] {
        &self.blocks
    }

    /// Block contents as indices into the source decomposition.
    pub fn index_blocks(&self) -> &[Vec<usize>] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn preimage(&self, beta: f64) -> Option<&[f64]> {
        self.blocks
            .iter()
            .min_by(|x, y| (x.0 - beta).abs().total_cmp(&(y.0 - beta).abs()))
            .filter(|(b, _)| (b - beta).abs() <= 1e-9 * beta.abs().max(1.0))
            .map(|(_, d)| d.as_slice())
    }
}

/// Level sets of `g` over the spectral indices of `sd`: `(β, indices)`
/// ascending in `β`. Values within `cluster_tol · max(1, ‖g(A)‖_F)` merge.
/// `(β, indices of g⁻¹(β))`, ascending in `β`.
type LevelSets = Vec<(f64, Vec<usize>)>;

fn level_sets(
    g: &SpectrumFunction,
    sd: &SpectralDecomposition,
    tol: &Tolerances,
) -> Result<(LevelSets, f64)> {
    let values = g.values(sd)?;
    let norm = values
        .iter()
        .zip(sd.ranks())
        .map(|(v, r)| v * v * r as f64)
        .sum::<f64>()
        .sqrt();
    let scale = tol.cluster_tol * norm.max(1.0);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some(grp) if values[i] - values[*grp.last().unwrap()] <= scale => grp.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let sets = groups
        .into_iter()
        .map(|mut grp| {
            let beta = grp.iter().map(|&i| values[i]).sum::<f64>() / grp.len() as f64;
            grp.sort_unstable();
            (beta, grp)
        })
        .collect();
    Ok((sets, scale))
}

/// Decomposition of `g(A) = Σ_α g(α) E_α`, with the projector of each
/// value `β` equal to `Σ_{g(α)=β} E_α`.
pub fn apply_function(
    g: &SpectrumFunction,
    sd: &SpectralDecomposition,
    tol: &Tolerances,
) -> Result<SpectralDecomposition> {
    let (sets, scale) = level_sets(g, sd, tol)?;
    let mut eigenvalues = Vec::with_capacity(sets.len());
    let mut projectors: Vec<Projector> = Vec::with_capacity(sets.len());
    for (beta, idx) in sets {
        eigenvalues.push(beta);
        projectors.push(sd.projector_for_indices(&idx));
    }
    Ok(SpectralDecomposition::from_parts(
        eigenvalues,
        projectors,
        sd.dim(),
        scale.max(sd.snap_tol()),
    ))
}

/// `{β ↦ g⁻¹(β)}` over `σ(g(A))`.
pub fn preimage_partition(
    g: &SpectrumFunction,
    sd: &SpectralDecomposition,
    tol: &Tolerances,
) -> Result<PreimagePartition> {
    let (sets, _) = level_sets(g, sd, tol)?;
    let blocks = sets
        .iter()
        .map(|(beta, idx)| (*beta, idx.iter().map(|&i| sd.eigenvalues()[i]).collect()))
        .collect();
    let indices = sets.into_iter().map(|(_, idx)| idx).collect();
    Ok(PreimagePartition { blocks, indices })
}

/// True iff `g` is non-injective on `σ(A)`.
pub fn is_coarse_graining(
    g: &SpectrumFunction,
    sd: &SpectralDecomposition,
    tol: &Tolerances,
) -> Result<bool> {
    Ok(preimage_partition(g, sd, tol)?
        .index_blocks()
        .iter()
        .any(|b| b.len() > 1))
}

/// Smallest gap accepted between coefficients of an induced observable,
/// relative to their magnitude.
const MIN_COEFFICIENT_GAP: f64 = 1e-6;

/// `B = Σ_i c_i E_i` with pairwise distinct, seeded `c_i`. The observable
/// the basis belongs to is a function of `B`.
pub fn induced_nondegenerate_family(
    basis: &MeasurementBasis,
    coefficient_seed: u64,
    tol: &Tolerances,
) -> HermitianOperator {
    let mut rng = seeded_rng(coefficient_seed);
    let n = basis.dim();
    loop {
        let coeffs: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut sorted = coeffs.clone();
        sorted.sort_by(f64::total_cmp);
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let gap = (tol.cluster_tol * norm.max(1.0)).max(MIN_COEFFICIENT_GAP * norm.max(1.0));
        if sorted.windows(2).all(|w| w[1] - w[0] > gap) {
            return basis.combination(&coeffs);
        }
    }
}

/// The table `g` with `target = g(source)`, if one exists: every spectral
/// projector of `source` must lie inside one eigenspace of `target`.
pub fn find_function(
    source: &SpectralDecomposition,
    target: &SpectralDecomposition,
    tol: &Tolerances,
) -> Option<SpectrumFunction> {
    if source.dim() != target.dim() {
        return None;
    }
    let n = source.dim() as f64;
    let t = target.reconstruct();
    let mut table = Vec::with_capacity(source.len());
    for (alpha, e) in source.eigenvalues().iter().zip(source.projectors()) {
        let te = &t * e.matrix();
        let raw = te.trace().re / e.rank() as f64;
        let beta = target.eigenvalues()[target.index_of(raw)?];
        if (&te - &e.matrix().scale(beta)).frobenius_norm() > tol.eq_tol * n {
            return None;
        }
        table.push((*alpha, beta));
    }
    Some(SpectrumFunction { table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{eigendecompose, spectral_projector};
    use crate::ComplexMatrix;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag(d: &[f64]) -> SpectralDecomposition {
        eigendecompose(&HermitianOperator::diagonal(d), &tol()).unwrap()
    }

    #[test]
    fn square_of_two_level_is_identity() {
        let sd = diag(&[1.0, -1.0]);
        let g = SpectrumFunction::from_fn(&sd, |a| a * a);
        let gsd = apply_function(&g, &sd, &tol()).unwrap();
        assert_eq!(gsd.eigenvalues(), &[1.0]);
        assert!(gsd
            .reconstruct()
            .approx_eq(&ComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn identity_function_is_noop() {
        let sd = diag(&[3.0, -1.0, 0.5, 3.0]);
        let gsd = apply_function(&SpectrumFunction::identity(&sd), &sd, &tol()).unwrap();
        assert_eq!(gsd.eigenvalues(), sd.eigenvalues());
        for (p, q) in gsd.projectors().iter().zip(sd.projectors()) {
            assert!(p.matrix().approx_eq(q.matrix(), 1e-15));
        }
    }

    #[test]
    fn square_of_three_level() {
        let sd = diag(&[2.0, 0.0, -2.0]);
        let g = SpectrumFunction::from_fn(&sd, |a| a * a);
        let gsd = apply_function(&g, &sd, &tol()).unwrap();
        assert_eq!(gsd.eigenvalues(), &[0.0, 4.0]);
        assert_eq!(gsd.ranks(), vec![1, 2]);
        let e_sum = spectral_projector(&sd, &[2.0, -2.0]).unwrap();
        assert!(gsd.projectors()[1]
            .matrix()
            .approx_eq(e_sum.matrix(), 1e-15));
        assert!(gsd
            .reconstruct()
            .approx_eq(&ComplexMatrix::diagonal(&[4.0, 0.0, 4.0]), 1e-15));
    }

    #[test]
    fn preimage_partitions() {
        let t = tol();
        let sd = diag(&[1.0, -1.0]);
        let p = preimage_partition(&SpectrumFunction::from_fn(&sd, |a| a * a), &sd, &t).unwrap();
        assert_eq!(p.blocks(), &[(1.0, vec![-1.0, 1.0])]);

        let sd = diag(&[2.0, 0.0, -2.0]);
        let p = preimage_partition(&SpectrumFunction::from_fn(&sd, |a| a * a), &sd, &t).unwrap();
        assert_eq!(p.blocks(), &[(0.0, vec![0.0]), (4.0, vec![-2.0, 2.0])]);
        assert_eq!(p.preimage(4.0), Some(&[-2.0, 2.0][..]));

        let sd = diag(&[5.0, 1.0, -3.0]);
        let p = preimage_partition(&SpectrumFunction::from_fn(&sd, |a| 2.0 * a), &sd, &t).unwrap();
        assert!(p.index_blocks().iter().all(|b| b.len() == 1));
    }

    #[test]
    fn coarse_graining_classification() {
        let t = tol();
        let sd = diag(&[1.0, -1.0]);
        assert!(is_coarse_graining(&SpectrumFunction::from_fn(&sd, |a| a * a), &sd, &t).unwrap());
        assert!(!is_coarse_graining(&SpectrumFunction::identity(&sd), &sd, &t).unwrap());
        let sd = diag(&[0.0, 1.0, 2.0]);
        assert!(!is_coarse_graining(&SpectrumFunction::from_fn(&sd, |a| a * a), &sd, &t).unwrap());
    }

    #[test]
    fn missing_domain_point_is_an_error() {
        let sd = diag(&[1.0, -1.0]);
        let g = SpectrumFunction::new(vec![(1.0, 1.0)]);
        assert!(matches!(
            apply_function(&g, &sd, &tol()),
            Err(Error::DomainMismatch(_))
        ));
        let extra = SpectrumFunction::new(vec![(1.0, 1.0), (-1.0, 1.0), (7.0, 0.0)]);
        assert!(matches!(
            preimage_partition(&extra, &sd, &tol()),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn induced_family_is_nondegenerate_and_refines() {
        let t = tol();
        let sd = eigendecompose(&HermitianOperator::diagonal(&[1.0, 1.0, -1.0]), &t).unwrap();
        for seed in 0..4 {
            let basis = MeasurementBasis::random_rotation(&sd, seed);
            let b = induced_nondegenerate_family(&basis, seed + 100, &t);
            let bsd = eigendecompose(&b, &t).unwrap();
            assert_eq!(bsd.len(), 3);
            let g = find_function(&bsd, &sd, &t).expect("A is a function of B");
            let rebuilt = apply_function(&g, &bsd, &t).unwrap().reconstruct();
            assert!(rebuilt.approx_eq(&sd.reconstruct(), t.eq_tol));
        }
    }

    #[test]
    fn standard_basis_dim_two_gives_distinct_diagonal() {
        let t = tol();
        let sd = diag(&[0.0, 1.0]);
        let basis = MeasurementBasis::canonical(&sd);
        let b = induced_nondegenerate_family(&basis, 5, &t);
        let m = b.matrix();
        assert!(m[(0, 1)].norm() < 1e-15 && m[(1, 0)].norm() < 1e-15);
        assert!((m[(0, 0)] - m[(1, 1)]).norm() > 1e-6);
    }
}
