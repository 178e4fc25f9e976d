//! Dense complex matrices, observables, spectral decompositions, density
//! states and measurement bases.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result, Tolerances, C64};

/// Square complex matrix, `dim ≥ 1`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl ComplexMatrix {
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() || inner.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        Ok(Self(inner))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// # Panics
    /// If `diag` is empty.
    pub fn diagonal(diag: &[f64]) -> Self {
        assert!(!diag.is_empty(), "diagonal matrix needs at least one entry");
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// `|ψ⟩⟨φ|`.
    pub fn outer(psi: &DVector<C64>, phi: &DVector<C64>) -> Self {
        Self(psi * phi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖X − Y‖_F ≤ eq_tol · n`.
    pub fn approx_eq(&self, other: &Self, eq_tol: f64) -> bool {
        self.dim() == other.dim() && self.distance(other) <= eq_tol * self.dim() as f64
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.map(|c| c * factor))
    }

    /// `(X + X†) / 2`.
    pub fn hermitize(&self) -> Self {
        Self((&self.0 + self.0.adjoint()).map(|c| c * 0.5))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Trace norm of a Hermitian matrix via its eigenvalues.
    pub fn hermitian_trace_norm(&self) -> f64 {
        SymmetricEigen::new(self.hermitize().0)
            .eigenvalues
            .iter()
            .map(|x| x.abs())
            .sum()
    }

    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = SymmetricEigen::new(self.hermitize().0)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// An observable: a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Accepts `matrix` when `‖A − A†‖_F ≤ herm_tol · n` and stores its
    /// Hermitian part.
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let bound = tol.herm_tol * matrix.dim() as f64;
        let deviation = matrix.distance(&matrix.adjoint());
        if deviation > bound || !deviation.is_finite() {
            return Err(Error::NonHermitianInput { deviation, bound });
        }
        Ok(Self {
            matrix: matrix.hermitize(),
        })
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::diagonal(diag),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Orthogonal projector with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: ComplexMatrix,
    rank: usize,
}

impl Projector {
    /// Checks idempotence and Hermiticity at `eq_tol · n`.
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let n = matrix.dim() as f64;
        let herm = matrix.distance(&matrix.adjoint());
        if herm > tol.eq_tol * n {
            return Err(Error::NotProjector(format!("|E - E^dag|_F = {herm:e}")));
        }
        let idem = (&matrix * &matrix).distance(&matrix);
        if idem > tol.eq_tol * n {
            return Err(Error::NotProjector(format!("|E^2 - E|_F = {idem:e}")));
        }
        Ok(Self::from_trusted(matrix.hermitize()))
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let rank = matrix.trace().re.round().max(0.0) as usize;
        Self { matrix, rank }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(n),
            rank: 0,
        }
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn rank_one(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotProjector("zero vector".into()));
        }
        let v = psi.unscale(norm);
        Ok(Self {
            matrix: ComplexMatrix::outer(&v, &v),
            rank: 1,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// An orthonormal basis of the range, as columns.
    pub fn range_basis(&self) -> Vec<DVector<C64>> {
        let eig = SymmetricEigen::new(self.matrix.inner().clone());
        (0..self.dim())
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .map(|i| eig.eigenvectors.column(i).into_owned())
            .collect()
    }
}

/// `A = Σ_j α_j E_j` with ascending distinct `α_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<Projector>,
    dim: usize,
    /// Absolute distance within which a real snaps onto a spectral point.
    snap_tol: f64,
}

/// Diagonalizes `a`, merging raw eigenvalues closer than
/// `cluster_tol · max(1, ‖A‖_F)` into a single spectral point.
pub fn eigendecompose(a: &HermitianOperator, tol: &Tolerances) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let bound = tol.herm_tol * n as f64;
    let deviation = a.matrix().distance(&a.matrix().adjoint());
    if deviation > bound {
        return Err(Error::NonHermitianInput { deviation, bound });
    }
    let scale = tol.cluster_tol * a.matrix().frobenius_norm().max(1.0);
    let eig = SymmetricEigen::new(a.matrix().inner().clone());
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(c) if eig.eigenvalues[i] - eig.eigenvalues[*c.last().unwrap()] <= scale => {
                c.push(i)
            }
            _ => clusters.push(vec![i]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    for c in &clusters {
        let mean = c.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / c.len() as f64;
        let mut p = DMatrix::<C64>::zeros(n, n);
        for &i in c {
            let v = eig.eigenvectors.column(i);
            p += v * v.adjoint();
        }
        eigenvalues.push(mean);
        projectors.push(Projector {
            matrix: ComplexMatrix(p).hermitize(),
            rank: c.len(),
        });
    }
    let sd = SpectralDecomposition {
        eigenvalues,
        projectors,
        dim: n,
        snap_tol: scale,
    };
    let recon = sd.reconstruct().distance(a.matrix());
    if recon > tol.recon_tol * n as f64 {
        return Err(Error::NumericalFailure(format!(
            "reconstruction error {recon:e} exceeds {:e}",
            tol.recon_tol * n as f64
        )));
    }
    Ok(sd)
}

impl SpectralDecomposition {
    /// Builds a decomposition from already-known spectral data. Used by the
    /// functional calculus, where projectors are sums of existing ones.
    pub(crate) fn from_parts(
        eigenvalues: Vec<f64>,
        projectors: Vec<Projector>,
        dim: usize,
        snap_tol: f64,
    ) -> Self {
        Self {
            eigenvalues,
            projectors,
            dim,
            snap_tol,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn snap_tol(&self) -> f64 {
        self.snap_tol
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.len() == self.dim
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(Projector::rank).collect()
    }

    /// Index of the spectral point nearest `value`, if within the snap
    /// tolerance.
    pub fn index_of(&self, value: f64) -> Option<usize> {
        let (idx, gap) = self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &a)| (i, (a - value).abs()))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        (gap <= self.snap_tol.max(f64::EPSILON * value.abs())).then_some(idx)
    }

    pub fn snap(&self, value: f64) -> Result<usize> {
        self.index_of(value)
            .ok_or(Error::UnknownSpectralPoint(value))
    }

    /// Sorted, deduplicated indices of the spectral points in `delta`.
    pub fn snap_set(&self, delta: &[f64]) -> Result<Vec<usize>> {
        let mut idx = delta
            .iter()
            .map(|&d| self.snap(d))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    pub fn projector(&self, idx: usize) -> &Projector {
        &self.projectors[idx]
    }

    /// `Σ_{i ∈ indices} E_i`.
    pub fn projector_for_indices(&self, indices: &[usize]) -> Projector {
        let mut m = ComplexMatrix::zeros(self.dim);
        for &i in indices {
            m = &m + self.projectors[i].matrix();
        }
        Projector::from_trusted(m)
    }

    /// `Σ_j α_j E_j`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for (a, e) in self.eigenvalues.iter().zip(&self.projectors) {
            m = &m + &e.matrix().scale(*a);
        }
        m
    }

    pub fn operator(&self) -> HermitianOperator {
        HermitianOperator {
            matrix: self.reconstruct().hermitize(),
        }
    }
}

/// `E_Δ = Σ_{α∈Δ} E_α`. Each element of `delta` is snapped to the nearest
/// eigenvalue; an element with no eigenvalue nearby is an error.
pub fn spectral_projector(sd: &SpectralDecomposition, delta: &[f64]) -> Result<Projector> {
    let idx = sd.snap_set(delta)?;
    Ok(sd.projector_for_indices(&idx))
}

/// A positive unit-trace operator, or the null state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: ComplexMatrix,
    is_null: bool,
}

impl DensityState {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let n = matrix.dim() as f64;
        let herm = matrix.distance(&matrix.adjoint());
        if herm > tol.herm_tol * n {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol.eq_tol * n || tr.im.abs() > tol.eq_tol * n {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = matrix.hermitian_eigenvalues()[0];
        if min < -tol.psd_tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            matrix: matrix.hermitize(),
            is_null: false,
        })
    }

    /// Hermitizes and renormalizes an unnormalized positive matrix with
    /// trace `p > 0`.
    pub(crate) fn from_unnormalized(matrix: ComplexMatrix, p: f64) -> Self {
        Self {
            matrix: matrix.hermitize().scale(1.0 / p),
            is_null: false,
        }
    }

    pub fn null(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(n),
            is_null: true,
        }
    }

    /// `|ψ⟩⟨ψ|` for the normalized `ψ`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState(
                "pure state needs a nonzero vector".into(),
            ));
        }
        let v = v.unscale(norm);
        Ok(Self {
            matrix: ComplexMatrix::outer(&v, &v),
            is_null: false,
        })
    }

    pub fn pure_real(psi: &[f64]) -> Result<Self> {
        let v: Vec<C64> = psi.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::pure(&v)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_null(&self) -> bool {
        self.is_null
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn approx_eq(&self, other: &Self, eq_tol: f64) -> bool {
        self.is_null == other.is_null && self.matrix.approx_eq(&other.matrix, eq_tol)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.matrix.distance(&other.matrix)
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        0.5 * (&self.matrix - &other.matrix).hermitian_trace_norm()
    }
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn random_complex_matrix(
    rows: usize,
    cols: usize,
    rng: &mut ChaCha8Rng,
) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Random normalized vector with complex normal components.
pub fn random_pure_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let v = DVector::from_fn(n, |_, _| complex_normal(rng));
    let norm = v.norm();
    v.unscale(norm).iter().copied().collect()
}

/// `GG† / tr(GG†)` with `G` an `n×n` matrix of standard complex normals.
///
/// # Panics
/// If `n == 0`.
pub fn random_density(n: usize, seed: u64) -> DensityState {
    assert!(n >= 1, "random_density needs n >= 1");
    let mut rng = seeded_rng(seed);
    random_density_from(n, &mut rng)
}

pub(crate) fn random_density_from(n: usize, rng: &mut ChaCha8Rng) -> DensityState {
    let g = random_complex_matrix(n, n, rng);
    let ggd = &g * g.adjoint();
    let tr = ggd.trace().re;
    DensityState::from_unnormalized(ComplexMatrix(ggd), tr)
}

/// Random Hermitian matrix with real-normal diagonal and complex-normal
/// off-diagonal entries.
pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let g = random_complex_matrix(n, n, rng);
    HermitianOperator {
        matrix: ComplexMatrix(g).hermitize(),
    }
}

/// Haar-distributed `k×k` unitary: QR of a complex normal matrix with the
/// phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary(k: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let qr = random_complex_matrix(k, k, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..k {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// `I / n`.
///
/// # Panics
/// If `n == 0`.
pub fn maximally_mixed(n: usize) -> DensityState {
    assert!(n >= 1, "maximally_mixed needs n >= 1");
    DensityState {
        matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64),
        is_null: false,
    }
}

/// A rank-one resolution of the identity compatible with an observable:
/// `E_i E_j = δ_ij E_i`, `Σ E_i = I`, `E_i A = α_i E_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    projectors: Vec<Projector>,
    labels: Vec<f64>,
}

impl MeasurementBasis {
    /// Validates `projectors` against `sd`. Labels are read off as
    /// `tr(E_i A)` and snapped to the spectrum.
    pub fn new(
        projectors: Vec<Projector>,
        sd: &SpectralDecomposition,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = sd.dim();
        if projectors.len() != n {
            return Err(Error::BasisMismatch(format!(
                "{} projectors for dimension {n}",
                projectors.len()
            )));
        }
        let nf = n as f64;
        let a = sd.reconstruct();
        let mut sum = ComplexMatrix::zeros(n);
        let mut labels = Vec::with_capacity(n);
        for (i, e) in projectors.iter().enumerate() {
            if e.dim() != n {
                return Err(Error::BasisMismatch(format!(
                    "projector {i} has wrong dimension"
                )));
            }
            if e.rank() != 1 {
                return Err(Error::BasisMismatch(format!(
                    "projector {i} has rank {}",
                    e.rank()
                )));
            }
            for (j, f) in projectors.iter().enumerate().skip(i + 1) {
                let overlap = (e.matrix() * f.matrix()).frobenius_norm();
                if overlap > tol.eq_tol * nf {
                    return Err(Error::BasisMismatch(format!(
                        "projectors {i} and {j} are not orthogonal"
                    )));
                }
            }
            sum = &sum + e.matrix();
            let raw = (e.matrix() * &a).trace().re;
            let idx = sd.index_of(raw).ok_or_else(|| {
                Error::BasisMismatch(format!(
                    "projector {i} has expectation {raw} off the spectrum"
                ))
            })?;
            let label = sd.eigenvalues()[idx];
            let dev = (&(e.matrix() * &a) - &e.matrix().scale(label)).frobenius_norm();
            if dev > tol.eq_tol * nf {
                return Err(Error::BasisMismatch(format!(
                    "projector {i} does not commute with the observable ({dev:e})"
                )));
            }
            labels.push(label);
        }
        if !sum.approx_eq(&ComplexMatrix::identity(n), tol.eq_tol) {
            return Err(Error::BasisMismatch(
                "projectors do not sum to the identity".into(),
            ));
        }
        Ok(Self { projectors, labels })
    }

    /// Basis from state vectors (normalized internally).
    pub fn from_vectors(
        vectors: &[Vec<C64>],
        sd: &SpectralDecomposition,
        tol: &Tolerances,
    ) -> Result<Self> {
        let projectors = vectors
            .iter()
            .map(|v| Projector::rank_one(&DVector::from_column_slice(v)))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::BasisMismatch(e.to_string()))?;
        Self::new(projectors, sd, tol)
    }

    /// Eigenbasis read off each spectral projector, ordered by eigenvalue.
    pub fn canonical(sd: &SpectralDecomposition) -> Self {
        Self::from_block_bases(
            sd,
            sd.projectors().iter().map(Projector::range_basis).collect(),
        )
    }

    /// Canonical eigenbasis with every degenerate block rotated by an
    /// independent Haar-random unitary.
    pub fn random_rotation(sd: &SpectralDecomposition, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let blocks = sd
            .projectors()
            .iter()
            .map(|e| {
                let basis = e.range_basis();
                if basis.len() < 2 {
                    return basis;
                }
                let v = DMatrix::from_columns(&basis);
                let rotated = v * random_unitary(basis.len(), &mut rng);
                rotated.column_iter().map(|c| c.into_owned()).collect()
            })
            .collect();
        Self::from_block_bases(sd, blocks)
    }

    fn from_block_bases(sd: &SpectralDecomposition, blocks: Vec<Vec<DVector<C64>>>) -> Self {
        let mut projectors = Vec::with_capacity(sd.dim());
        let mut labels = Vec::with_capacity(sd.dim());
        for (alpha, block) in sd.eigenvalues().iter().zip(blocks) {
            for v in block {
                projectors.push(Projector {
                    matrix: ComplexMatrix::outer(&v, &v),
                    rank: 1,
                });
                labels.push(*alpha);
            }
        }
        Self { projectors, labels }
    }

    /// Same projectors, labels re-read against another observable (for
    /// instance `g(A)` for a basis of `A`).
    pub fn relabel(&self, sd: &SpectralDecomposition, tol: &Tolerances) -> Result<Self> {
        Self::new(self.projectors.clone(), sd, tol)
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.projectors.len()
    }

    /// `Σ_i c_i E_i`.
    pub fn combination(&self, coefficients: &[f64]) -> HermitianOperator {
        let mut m = ComplexMatrix::zeros(self.dim());
        for (c, e) in coefficients.iter().zip(&self.projectors) {
            m = &m + &e.matrix().scale(*c);
        }
        HermitianOperator { matrix: m }
    }
}
