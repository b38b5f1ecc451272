//! Type classes of i.i.d. sequences over the distinct mass values of a pmf.
//!
//! A product mass depends only on how many positions carry each distinct
//! value, so sums over `X^k` collapse to sums over compositions of `k`.

use crate::error::{Error, Result};
use crate::pmf::Pmf;

/// Distinct positive masses (descending) with their multiplicities.
pub(crate) fn distinct_masses(p: &Pmf) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &m in p.sorted_masses().iter().filter(|&&m| m > 0.0) {
        match out.last_mut() {
            Some((v, c)) if *v == m => *c += 1,
            _ => out.push((m, 1)),
        }
    }
    out
}

/// Number of compositions of `k` into `d` non-negative parts.
pub(crate) fn class_count(k: usize, d: usize) -> f64 {
    if d == 0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    // C(k + d - 1, d - 1), accumulated in floating point.
    let r = (d - 1).min(k);
    let top = k + d - 1;
    (0..r).fold(1.0, |acc, j| acc * (top - j) as f64 / (j + 1) as f64)
}

pub(crate) fn check_class_count(k: usize, d: usize, limit: f64) -> Result<()> {
    let count = class_count(k, d);
    if count > limit {
        return Err(Error::TooLarge(format!(
            "{count:.3e} type classes for block length {k} over {d} distinct masses exceed the limit {limit:.0e}; reduce k or the alphabet"
        )));
    }
    Ok(())
}

/// `ln j!` for `j = 0..=k`.
pub(crate) fn ln_factorials(k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for j in 1..=k {
        acc += (j as f64).ln();
        out.push(acc);
    }
    out
}

/// One type class: `counts[v]` positions carry distinct value `v`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TypeClass {
    pub counts: Vec<usize>,
    /// `ln` of the common sequence probability.
    pub log_prob: f64,
    /// `ln` of the number of sequences in the class.
    pub log_count: f64,
}

/// Every type class of length-`k` sequences, in lexicographic order of
/// `counts` (descending in the first coordinate).
pub(crate) fn type_classes(groups: &[(f64, usize)], k: usize) -> Vec<TypeClass> {
    let d = groups.len();
    let ln_fact = ln_factorials(k);
    let log_vals: Vec<f64> = groups.iter().map(|&(v, _)| v.ln()).collect();
    let log_mult: Vec<f64> = groups.iter().map(|&(_, r)| (r as f64).ln()).collect();
    let mut out = Vec::new();
    if d == 0 {
        return out;
    }
    let mut counts = vec![0usize; d];
    fill(0, k, &mut counts, &mut |counts| {
        let mut log_prob = 0.0;
        let mut log_count = ln_fact[k];
        for (v, &c) in counts.iter().enumerate() {
            if c > 0 {
                log_prob += c as f64 * log_vals[v];
                log_count += c as f64 * log_mult[v] - ln_fact[c];
            }
        }
        out.push(TypeClass {
            counts: counts.to_vec(),
            log_prob,
            log_count,
        });
    });
    out
}

fn fill(pos: usize, left: usize, counts: &mut [usize], emit: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        emit(counts);
        return;
    }
    for c in (0..=left).rev() {
        counts[pos] = c;
        fill(pos + 1, left - c, counts, emit);
    }
}
