use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::pareto::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DominanceError {
    #[error("sequences have different lengths or are empty")]
    Shape,
    #[error("entry {0} is negative")]
    Negative(usize),
    #[error("ratios increase after position {0}")]
    Unsorted(usize),
    #[error("λ is outside [0, 1]")]
    LambdaOutOfRange,
    #[error("prefix index {0} is outside 1..=k")]
    IndexOutOfRange(usize),
    #[error("prefix denominator is zero")]
    ZeroDenominator,
}

/// Compares `a1/b1` with `a2/b2`, where `x/0` is infinite.
fn cmp_ratio(a1: &Rational, b1: &Rational, a2: &Rational, b2: &Rational) -> Ordering {
    match (b1.is_zero(), b2.is_zero()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => (a1 * b2).cmp(&(a2 * b1)),
    }
}

/// Checks that the whole-sequence ratio `Σa / Σb` is at most the ratio of the
/// first `q - 1` terms plus a `λ` fraction of term `q`, for ratio-sorted
/// nonnegative sequences. `q` is 1-based.
pub fn prefix_dominance(
    a: &[Rational],
    b: &[Rational],
    q: usize,
    lambda: Rational,
) -> Result<bool, DominanceError> {
    if a.len() != b.len() || a.is_empty() {
        return Err(DominanceError::Shape);
    }
    if let Some(j) = a.iter().chain(b).position(|x| x.is_negative()) {
        return Err(DominanceError::Negative(j % a.len()));
    }
    if let Some(j) = (0..a.len() - 1)
        .find(|&j| cmp_ratio(&a[j], &b[j], &a[j + 1], &b[j + 1]) == Ordering::Less)
    {
        return Err(DominanceError::Unsorted(j));
    }
    if lambda.is_negative() || lambda > Rational::from(1) {
        return Err(DominanceError::LambdaOutOfRange);
    }
    if q == 0 || q > a.len() {
        return Err(DominanceError::IndexOutOfRange(q));
    }
    let prefix_a: Rational = a[..q - 1].iter().sum::<Rational>() + lambda * a[q - 1];
    let prefix_b: Rational = b[..q - 1].iter().sum::<Rational>() + lambda * b[q - 1];
    if prefix_b.is_zero() {
        return Err(DominanceError::ZeroDenominator);
    }
    let total_a: Rational = a.iter().sum();
    let total_b: Rational = b.iter().sum();
    Ok(total_a * prefix_b <= prefix_a * total_b)
}
