// SPDX-License-Identifier: Apache-2.0

use super::MathError;

/// `log Σ exp(v)`, shifted by the maximum so neither tail overflows.
///
/// `-inf` entries are allowed as long as at least one entry is finite.
pub fn log_sum_exp(values: &[f64]) -> Result<f64, MathError> {
    if values.is_empty() {
        return Err(MathError::Degenerate("log_sum_exp of an empty slice"));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(MathError::Degenerate("every entry is -inf"));
    }
    if !max.is_finite() {
        return Err(MathError::Degenerate("non-finite log value"));
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    Ok(max + sum.ln())
}

/// Subtracts `log_sum_exp(values)` from every entry in place and returns the
/// normalizer.
pub fn log_normalize(values: &mut [f64]) -> Result<f64, MathError> {
    let lse = log_sum_exp(values)?;
    for v in values.iter_mut() {
        *v -= lse;
    }
    Ok(lse)
}
