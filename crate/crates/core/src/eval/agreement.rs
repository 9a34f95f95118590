//! Inter-annotator agreement measures.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AgreementError {
    #[error("annotation sequences differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },

    #[error("agreement is undefined on empty annotations")]
    Empty,
}

/// Cohen's kappa between two label sequences over the same items:
/// `(p_o - p_e) / (1 - p_e)` with observed agreement `p_o` and chance
/// agreement `p_e` from the raters' marginal label distributions.
pub fn cohens_kappa<T: Eq + Hash>(a: &[T], b: &[T]) -> Result<f64, AgreementError> {
    if a.len() != b.len() {
        return Err(AgreementError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.is_empty() {
        return Err(AgreementError::Empty);
    }
    let n = a.len() as f64;
    let mut marginal_a: HashMap<&T, usize> = HashMap::new();
    let mut marginal_b: HashMap<&T, usize> = HashMap::new();
    let mut agreements = 0usize;
    for (x, y) in a.iter().zip(b) {
        *marginal_a.entry(x).or_default() += 1;
        *marginal_b.entry(y).or_default() += 1;
        agreements += usize::from(x == y);
    }
    let p_o = agreements as f64 / n;
    let p_e: f64 = marginal_a
        .iter()
        .filter_map(|(label, &count_a)| {
            marginal_b
                .get(label)
                .map(|&count_b| (count_a as f64 / n) * (count_b as f64 / n))
        })
        .sum();
    // Both raters constant on the same label: agreement is total but
    // chance-corrected agreement degenerates to 0/0.
    if (1.0 - p_e).abs() < f64::EPSILON {
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// F1 of one annotator's label sets against another's, the first being the
/// reference. Items line up pairwise; counts pool over all items.
pub fn pairwise_f1<T: Ord>(
    reference: &[BTreeSet<T>],
    candidate: &[BTreeSet<T>],
) -> Result<f64, AgreementError> {
    if reference.len() != candidate.len() {
        return Err(AgreementError::LengthMismatch {
            a: reference.len(),
            b: candidate.len(),
        });
    }
    if reference.is_empty() {
        return Err(AgreementError::Empty);
    }
    let mut true_positive = 0usize;
    let mut false_positive = 0usize;
    let mut false_negative = 0usize;
    for (gold, pred) in reference.iter().zip(candidate) {
        true_positive += gold.intersection(pred).count();
        false_positive += pred.difference(gold).count();
        false_negative += gold.difference(pred).count();
    }
    if true_positive == 0 {
        // No overlap anywhere. Two annotators who both left every item
        // empty agree perfectly; otherwise they share nothing.
        return Ok(if false_positive == 0 && false_negative == 0 {
            1.0
        } else {
            0.0
        });
    }
    let precision = true_positive as f64 / (true_positive + false_positive) as f64;
    let recall = true_positive as f64 / (true_positive + false_negative) as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}
