//! Value assignments on finite families of observables.
//!
//! A valuation picks one spectral value per observable such that every
//! functional relation `A_j = g(A_i)` in the family is respected:
//! `V(A_j) = g(V(A_i))`. The search is exhaustive backtracking with
//! arc-consistency propagation over the relation graph.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calculus::{apply_function, find_function, SpectrumFunction};
use crate::json::JsonMatrix;
use crate::operator::{eigendecompose, SpectralDecomposition};
use crate::{Error, HermitianOperator, Result, Tolerances};

/// `members[target] = table(members[source])`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalRelation {
    pub source: usize,
    pub table: SpectrumFunction,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableFamily {
    dim: usize,
    members: Vec<(HermitianOperator, SpectralDecomposition)>,
    relations: Vec<FunctionalRelation>,
}

/// On-disk family: `{dim, members: [matrix…], relations?: [[i, table, j]…]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub dim: usize,
    pub members: Vec<JsonMatrix>,
    #[serde(default)]
    pub relations: Vec<(usize, SpectrumFunction, usize)>,
}

impl ObservableFamily {
    pub fn new(members: Vec<HermitianOperator>, tol: &Tolerances) -> Result<Self> {
        let dim = members
            .first()
            .map(HermitianOperator::dim)
            .ok_or_else(|| Error::Validation("family has no members".into()))?;
        let members = members
            .into_iter()
            .map(|a| {
                if a.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: a.dim(),
                    });
                }
                let sd = eigendecompose(&a, tol)?;
                Ok((a, sd))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim,
            members,
            relations: Vec::new(),
        })
    }

    pub fn from_file(file: &FamilyFile, tol: &Tolerances) -> Result<Self> {
        let members = file
            .members
            .iter()
            .map(|m| HermitianOperator::new(m.to_matrix()?, tol))
            .collect::<Result<Vec<_>>>()?;
        let mut family = Self::new(members, tol)?;
        if family.dim != file.dim {
            return Err(Error::DimensionMismatch {
                expected: file.dim,
                found: family.dim,
            });
        }
        for (i, table, j) in &file.relations {
            family.add_relation(*i, table.clone(), *j, tol)?;
        }
        Ok(family)
    }

    /// Adds `members[target] = table(members[source])` after checking it
    /// numerically.
    pub fn add_relation(
        &mut self,
        source: usize,
        table: SpectrumFunction,
        target: usize,
        tol: &Tolerances,
    ) -> Result<()> {
        let len = self.members.len();
        if source >= len || target >= len {
            return Err(Error::Validation(format!(
                "relation ({source}, {target}) refers past {len} members"
            )));
        }
        let image = apply_function(&table, &self.members[source].1, tol)?.reconstruct();
        let dist = image.distance(self.members[target].0.matrix());
        if dist > tol.eq_tol * self.dim as f64 {
            return Err(Error::Validation(format!(
                "member {target} is not the asserted function of member {source} (off by {dist:e})"
            )));
        }
        self.relations.push(FunctionalRelation {
            source,
            table,
            target,
        });
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> &HermitianOperator {
        &self.members[i].0
    }

    pub fn spectrum(&self, i: usize) -> &[f64] {
        self.members[i].1.eigenvalues()
    }

    pub fn decomposition(&self, i: usize) -> &SpectralDecomposition {
        &self.members[i].1
    }

    pub fn relations(&self) -> &[FunctionalRelation] {
        &self.relations
    }

    fn has_relation(&self, source: usize, target: usize) -> bool {
        self.relations
            .iter()
            .any(|r| r.source == source && r.target == target)
    }
}

/// Adds `(i, g, j)` for every ordered pair of commuting members where
/// `A_j = g(A_i)` holds for some table `g`, i.e. where each eigenspace of
/// `A_i` sits inside an eigenspace of `A_j`. Idempotent.
pub fn discover_functional_relations(
    family: &ObservableFamily,
    tol: &Tolerances,
) -> ObservableFamily {
    let mut out = family.clone();
    let n = family.dim as f64;
    for i in 0..family.len() {
        for j in 0..family.len() {
            if i == j || out.has_relation(i, j) {
                continue;
            }
            let (a, sa) = &family.members[i];
            let (b, sb) = &family.members[j];
            if a.matrix().commutator(b.matrix()).frobenius_norm() > tol.eq_tol * n {
                continue;
            }
            if let Some(table) = find_function(sa, sb, tol) {
                out.relations.push(FunctionalRelation {
                    source: i,
                    table,
                    target: j,
                });
            }
        }
    }
    out
}

/// One spectral value per member.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation {
    pub values: Vec<f64>,
}

impl Valuation {
    /// Re-checks the value rule `V(A) ∈ σ(A)` and `V(A_j) = g(V(A_i))` for
    /// every relation, by direct evaluation.
    pub fn verify(&self, family: &ObservableFamily) -> bool {
        if self.values.len() != family.len() {
            return false;
        }
        let value_rule = self
            .values
            .iter()
            .enumerate()
            .all(|(i, &v)| family.decomposition(i).index_of(v).is_some());
        value_rule
            && family.relations.iter().all(|r| {
                let src = family.decomposition(r.source);
                let Ok(vals) = r.table.values(src) else {
                    return false;
                };
                let Some(k) = src.index_of(self.values[r.source]) else {
                    return false;
                };
                let tgt = family.decomposition(r.target);
                let got = tgt.index_of(self.values[r.target]);
                got.is_some() && got == tgt.index_of(vals[k])
            })
    }
}

/// Evidence that no valuation exists on the family.
#[derive(Debug, Clone, PartialEq)]
pub struct NoValuationCertificate {
    /// `(source, target)` of every relation constraining the search.
    pub constraints: Vec<(usize, usize)>,
    pub assignments_tried: u64,
    pub search_space: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found {
        valuation: Valuation,
        assignments_tried: u64,
    },
    None(NoValuationCertificate),
}

impl SearchOutcome {
    pub fn valuation(&self) -> Option<&Valuation> {
        match self {
            SearchOutcome::Found { valuation, .. } => Some(valuation),
            SearchOutcome::None(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            SearchOutcome::Found {
                valuation,
                assignments_tried,
            } => json!({
                "exists": true,
                "values": valuation.values,
                "assignments_tried": assignments_tried,
            }),
            SearchOutcome::None(cert) => json!({
                "exists": false,
                "constraints": cert.constraints,
                "assignments_tried": cert.assignments_tried,
                "search_space": cert.search_space,
            }),
        }
    }
}

/// Relation lifted to spectral indices: `image[k]` is the target index of
/// source index `k`.
struct IndexRelation {
    source: usize,
    target: usize,
    image: Vec<usize>,
}

type Domain = u64;

struct Search<'a> {
    relations: &'a [IndexRelation],
    tried: u64,
}

impl Search<'_> {
    /// Shrinks domains to arc consistency; false on a wipe-out.
    fn propagate(&self, domains: &mut [Domain]) -> bool {
        let mut changed = true;
        while changed {
            changed = false;
            for r in self.relations {
                let src = domains[r.source];
                let image = r
                    .image
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| src & (1 << k) != 0)
                    .fold(0, |acc, (_, &t)| acc | (1 << t));
                let tgt = domains[r.target] & image;
                let pre = r
                    .image
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| tgt & (1 << t) != 0)
                    .fold(0, |acc, (k, _)| acc | (1 << k));
                let new_src = src & pre;
                if tgt != domains[r.target] || new_src != src {
                    domains[r.target] = tgt;
                    domains[r.source] = new_src;
                    changed = true;
                }
                if tgt == 0 || new_src == 0 {
                    return false;
                }
            }
        }
        true
    }

    fn solve(&mut self, domains: Vec<Domain>) -> Option<Vec<usize>> {
        // unassigned variable with the smallest domain, lowest index first
        let next = domains
            .iter()
            .enumerate()
            .filter(|(_, d)| d.count_ones() > 1)
            .min_by_key(|(i, d)| (d.count_ones(), *i))
            .map(|(i, _)| i);
        let Some(var) = next else {
            return Some(
                domains
                    .iter()
                    .map(|d| d.trailing_zeros() as usize)
                    .collect(),
            );
        };
        let mut bits = domains[var];
        while bits != 0 {
            let k = bits.trailing_zeros();
            bits &= bits - 1;
            self.tried += 1;
            let mut trial = domains.clone();
            trial[var] = 1 << k;
            if self.propagate(&mut trial) {
                if let Some(sol) = self.solve(trial) {
                    return Some(sol);
                }
            }
        }
        None
    }
}

/// Exhaustive search over `Π_i σ(A_i)` for a valuation respecting every
/// relation in the family. Deterministic for a fixed member order.
pub fn search_valuation(family: &ObservableFamily, tol: &Tolerances) -> Result<SearchOutcome> {
    let sizes: Vec<usize> = (0..family.len())
        .map(|i| family.spectrum(i).len())
        .collect();
    let search_space: f64 = sizes.iter().map(|&s| s as f64).product();
    if search_space > tol.search_cap {
        return Err(Error::SearchSpaceTooLarge {
            size: search_space,
            cap: tol.search_cap,
        });
    }
    if let Some(&big) = sizes.iter().find(|&&s| s > Domain::BITS as usize) {
        return Err(Error::Validation(format!(
            "spectrum of {big} points exceeds the search's limit of {}",
            Domain::BITS
        )));
    }
    let relations = family
        .relations
        .iter()
        .map(|r| {
            let src = family.decomposition(r.source);
            let tgt = family.decomposition(r.target);
            let image = r
                .table
                .values(src)?
                .into_iter()
                .map(|v| tgt.snap(v))
                .collect::<Result<Vec<_>>>()?;
            Ok(IndexRelation {
                source: r.source,
                target: r.target,
                image,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let full = |s: usize| if s == 64 { u64::MAX } else { (1u64 << s) - 1 };
    let mut domains: Vec<Domain> = sizes.iter().map(|&s| full(s)).collect();
    let mut search = Search {
        relations: &relations,
        tried: 0,
    };
    let solution = if search.propagate(&mut domains) {
        search.solve(domains)
    } else {
        None
    };
    Ok(match solution {
        Some(idx) => SearchOutcome::Found {
            valuation: Valuation {
                values: idx
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| family.spectrum(i)[k])
                    .collect(),
            },
            assignments_tried: search.tried,
        },
        None => SearchOutcome::None(NoValuationCertificate {
            constraints: relations.iter().map(|r| (r.source, r.target)).collect(),
            assignments_tried: search.tried,
            search_space,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ComplexMatrix;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn herm(rows: &[Vec<f64>]) -> HermitianOperator {
        HermitianOperator::new(ComplexMatrix::from_real_rows(rows).unwrap(), &tol()).unwrap()
    }

    #[test]
    fn square_relation_is_found() {
        let t = tol();
        let a = HermitianOperator::diagonal(&[1.0, -1.0, 2.0]);
        let a2 = HermitianOperator::diagonal(&[1.0, 1.0, 4.0]);
        let fam = ObservableFamily::new(vec![a, a2], &t).unwrap();
        let fam = discover_functional_relations(&fam, &t);
        assert_eq!(fam.relations().len(), 1);
        let r = &fam.relations()[0];
        assert_eq!((r.source, r.target), (0, 1));
        assert_eq!(r.table.table(), &[(-1.0, 1.0), (1.0, 1.0), (2.0, 4.0)]);
        // idempotent
        assert_eq!(discover_functional_relations(&fam, &t).relations().len(), 1);
    }

    #[test]
    fn noncommuting_pair_has_no_relation() {
        let t = tol();
        let x = herm(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let z = HermitianOperator::diagonal(&[1.0, -1.0]);
        let fam =
            discover_functional_relations(&ObservableFamily::new(vec![x, z], &t).unwrap(), &t);
        assert!(fam.relations().is_empty());
        let outcome = search_valuation(&fam, &t).unwrap();
        let v = outcome.valuation().unwrap();
        assert!(v.verify(&fam));
    }

    #[test]
    fn degenerate_is_function_of_nondegenerate() {
        let t = tol();
        let a = HermitianOperator::diagonal(&[1.0, 1.0, -1.0]);
        let b = HermitianOperator::diagonal(&[1.0, 2.0, 3.0]);
        let fam =
            discover_functional_relations(&ObservableFamily::new(vec![a, b], &t).unwrap(), &t);
        assert_eq!(fam.relations().len(), 1);
        let r = &fam.relations()[0];
        assert_eq!((r.source, r.target), (1, 0));
        assert_eq!(r.table.table(), &[(1.0, 1.0), (2.0, 1.0), (3.0, -1.0)]);
    }

    #[test]
    fn single_member_family() {
        let t = tol();
        let fam =
            ObservableFamily::new(vec![HermitianOperator::diagonal(&[5.0, 1.0])], &t).unwrap();
        let outcome = search_valuation(&fam, &t).unwrap();
        let v = outcome.valuation().unwrap();
        assert!([1.0, 5.0].contains(&v.values[0]));
        assert!(v.verify(&fam));
    }

    #[test]
    fn asserted_relation_is_checked() {
        let t = tol();
        let mut fam = ObservableFamily::new(
            vec![
                HermitianOperator::diagonal(&[1.0, -1.0]),
                HermitianOperator::diagonal(&[1.0, 1.0]),
            ],
            &t,
        )
        .unwrap();
        let wrong = SpectrumFunction::new(vec![(1.0, 1.0), (-1.0, -1.0)]);
        assert!(fam.add_relation(0, wrong, 1, &t).is_err());
        let right = SpectrumFunction::new(vec![(1.0, 1.0), (-1.0, 1.0)]);
        fam.add_relation(0, right, 1, &t).unwrap();
    }

    #[test]
    fn inconsistent_constraints_yield_certificate() {
        // identity one way, swap the other: no assignment satisfies both
        let t = tol();
        let a = HermitianOperator::diagonal(&[1.0, 2.0]);
        let b = HermitianOperator::diagonal(&[1.0, 2.0]);
        let mut fam = ObservableFamily::new(vec![a, b], &t).unwrap();
        fam.add_relation(
            0,
            SpectrumFunction::new(vec![(1.0, 1.0), (2.0, 2.0)]),
            1,
            &t,
        )
        .unwrap();
        fam.relations.push(FunctionalRelation {
            source: 1,
            table: SpectrumFunction::new(vec![(1.0, 2.0), (2.0, 1.0)]),
            target: 0,
        });
        match search_valuation(&fam, &t).unwrap() {
            SearchOutcome::None(cert) => assert_eq!(cert.constraints, vec![(0, 1), (1, 0)]),
            other => panic!("expected no valuation, got {other:?}"),
        }
    }

    #[test]
    fn cap_is_enforced() {
        let t = Tolerances {
            search_cap: 10.0,
            ..tol()
        };
        let fam = ObservableFamily::new(
            vec![
                HermitianOperator::diagonal(&[1.0, 2.0, 3.0, 4.0]),
                HermitianOperator::diagonal(&[1.0, 2.0, 3.0, 4.0]),
            ],
            &t,
        )
        .unwrap();
        assert!(matches!(
            search_valuation(&fam, &t),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }
}
