//! Finite atomic measures `μ = Σ a_i δ_{e_i}` on `S^n`.

use crate::error::{Error, Result};
use crate::geometry::Direction;

/// Directions closer than this (chord length) count as equal.
pub const DIRECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    n: usize,
    atoms: Vec<(Direction<f64>, f64)>,
    even: bool,
}

impl DiscreteMeasure {
    /// Validates dimensions, positive weights, distinct directions and, when
    /// `even` is set, the antipodal pairing `(e, a) ↔ (-e, a)`.
    pub fn new(n: usize, atoms: Vec<(Direction<f64>, f64)>, even: bool) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Spec("measure has no atoms".into()));
        }
        for (k, (d, a)) in atoms.iter().enumerate() {
            if d.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n + 1,
                    found: d.components().len(),
                });
            }
            if !(a.is_finite() && *a > 0.0) {
                return Err(Error::Spec(format!("atom {k} has non-positive weight {a}")));
            }
            for (j, (e, _)) in atoms.iter().enumerate().take(k) {
                if d.chord(e) < DIRECTION_TOL {
                    return Err(Error::Spec(format!("atoms {j} and {k} share a direction")));
                }
            }
        }
        let measure = Self { n, atoms, even };
        if even {
            measure.pairs()?;
        }
        Ok(measure)
    }

    /// Even measure with atoms `e_1, …, e_m, -e_1, …, -e_m`.
    pub fn from_pairs(n: usize, half: Vec<(Direction<f64>, f64)>) -> Result<Self> {
        let mut atoms = half.clone();
        atoms.extend(half.into_iter().map(|(d, a)| (d.antipode(), a)));
        Self::new(n, atoms, true)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[(Direction<f64>, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, a)| a).sum()
    }

    /// Antipodal index pairs `(i, j)` with `i < j`, ordered by `i`.
    pub fn pairs(&self) -> Result<Vec<(usize, usize)>> {
        let mut partner: Vec<Option<usize>> = vec![None; self.atoms.len()];
        let mut pairs = Vec::new();
        for i in 0..self.atoms.len() {
            if partner[i].is_some() {
                continue;
            }
            let (d, a) = &self.atoms[i];
            let anti = d.antipode();
            let j = (i + 1..self.atoms.len())
                .find(|&j| partner[j].is_none() && self.atoms[j].0.chord(&anti) < DIRECTION_TOL)
                .ok_or_else(|| Error::NotEven(format!("atom {i} has no antipodal partner")))?;
            let b = self.atoms[j].1;
            if (a - b).abs() > 1e-9 * a.max(b) {
                return Err(Error::NotEven(format!(
                    "atoms {i} and {j} are antipodal with weights {a} ≠ {b}"
                )));
            }
            partner[i] = Some(j);
            partner[j] = Some(i);
            pairs.push((i, j));
        }
        Ok(pairs)
    }

    /// Index of the atom with direction `e`, if any.
    pub fn find(&self, e: &Direction<f64>) -> Option<usize> {
        self.atoms.iter().position(|(d, _)| d.chord(e) < DIRECTION_TOL)
    }
}
