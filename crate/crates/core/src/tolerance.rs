use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every module.
///
/// Matrix equality is `‖X − Y‖_F ≤ eq_tol · n`; update maps compare Choi
/// matrices at `eq_tol · n²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Hermiticity check, scaled by dimension.
    pub herm_tol: f64,
    /// Relative gap below which raw eigenvalues (and function values) merge.
    pub cluster_tol: f64,
    /// Reconstruction bound for `Σ α E_α = A`, scaled by dimension.
    pub recon_tol: f64,
    /// Matrix equality, scaled by dimension.
    pub eq_tol: f64,
    /// Smallest eigenvalue tolerated in a density matrix.
    pub psd_tol: f64,
    /// Probabilities at or below this map to the null state.
    pub prob_floor: f64,
    /// Largest search space the valuation search will enumerate.
    pub search_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm_tol: 1e-10,
            cluster_tol: 1e-10,
            recon_tol: 1e-9,
            eq_tol: 1e-9,
            psd_tol: 1e-10,
            prob_floor: 1e-12,
            search_cap: 1e8,
        }
    }
}

impl Tolerances {
    pub fn with_eq_tol(mut self, eq_tol: f64) -> Self {
        self.eq_tol = eq_tol;
        self
    }
}
