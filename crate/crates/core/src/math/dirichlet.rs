// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::MathError;

/// Dirichlet pseudocounts plus observed category counts for one discrete
/// attribute. Category order is the schema order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletState {
    pub alpha: Vec<f64>,
    pub counts: Vec<u64>,
}

impl DirichletState {
    pub fn symmetric(categories: usize, alpha: f64) -> Result<Self, MathError> {
        Self::new(vec![alpha; categories])
    }

    pub fn new(alpha: Vec<f64>) -> Result<Self, MathError> {
        if alpha.is_empty() || alpha.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(MathError::InvalidPrior("Dirichlet pseudocounts must be positive".into()));
        }
        let counts = vec![0; alpha.len()];
        Ok(Self { alpha, counts })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn observe(&mut self, category: usize) -> Result<(), MathError> {
        let size = self.len();
        let slot = self.counts.get_mut(category).ok_or(MathError::UnknownCategory { index: category, size })?;
        *slot += 1;
        Ok(())
    }

    fn denominator(&self) -> f64 {
        self.alpha.iter().sum::<f64>() + self.total_count() as f64
    }

    /// The whole predictive vector.
    pub fn predictive(&self) -> Vec<f64> {
        let denom = self.denominator();
        self.alpha.iter().zip(&self.counts).map(|(a, m)| (a + *m as f64) / denom).collect()
    }
}

/// `(α_k + m_k) / Σ_i (α_i + m_i)`
pub fn categorical_predictive(state: &DirichletState, category: usize) -> Result<f64, MathError> {
    if category >= state.len() {
        return Err(MathError::UnknownCategory { index: category, size: state.len() });
    }
    Ok((state.alpha[category] + state.counts[category] as f64) / state.denominator())
}
