//! Dense state vectors.

use std::ops::{Index, IndexMut};

/// A point in phase space at one time level. Components are plain `f64`
/// scalars; the dimension is fixed for the lifetime of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    components: Vec<f64>,
}

impl StateVector {
    /// Wraps a component list. Panics on an empty vector; finiteness is the
    /// caller's responsibility at construction time (the solver re-checks at
    /// every step boundary).
    pub fn new(components: Vec<f64>) -> Self {
        assert!(
            !components.is_empty(),
            "state vector must have dimension >= 1"
        );
        Self { components }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.components
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.components.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }

    pub fn norm_inf(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn norm_l2(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Euclidean distance to `other`.
    pub fn dist_l2(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.components
            .iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn dist_inf(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.components
            .iter()
            .zip(other.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

impl Index<usize> for StateVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.components[i]
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.components[i]
    }
}

/// Linear combination `sum_i coeff_i * vec_i`. All vectors must share one
/// dimension; the term list must be non-empty.
pub fn lincomb(terms: &[(f64, &StateVector)]) -> StateVector {
    let dim = terms[0].1.dim();
    let mut out = vec![0.0; dim];
    for (c, v) in terms {
        debug_assert_eq!(v.dim(), dim);
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += c * x;
        }
    }
    StateVector::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_and_distance() {
        let a = StateVector::new(vec![3.0, -4.0]);
        assert_eq!(a.norm_inf(), 4.0);
        assert_eq!(a.norm_l2(), 5.0);
        let b = StateVector::new(vec![0.0, 0.0]);
        assert_eq!(a.dist_l2(&b), 5.0);
        assert_eq!(a.dist_inf(&b), 4.0);
    }

    #[test]
    fn lincomb_matches_hand_sum() {
        let a = StateVector::new(vec![1.0, 2.0]);
        let b = StateVector::new(vec![-1.0, 0.5]);
        let c = lincomb(&[(2.0, &a), (4.0, &b)]);
        assert_eq!(c.as_slice(), &[-2.0, 6.0]);
    }

    #[test]
    fn finiteness_flags_nan() {
        let a = StateVector::new(vec![1.0, f64::NAN]);
        assert!(!a.is_finite());
        assert!(StateVector::new(vec![0.0]).is_finite());
    }
}
