//! Guessing moments of i.i.d. blocks and the bounds on how much clustering
//! the source reduces them.
//!
//! The moment order is called `rho_g` to keep it apart from the mass ratio.

use serde::Serialize;

use crate::aggregate::max_entropy_envelope;
use crate::error::{Error, Result};
use crate::extremal::ratio_two_gap_nats;
use crate::pmf::Pmf;
use crate::renyi::{renyi_entropy_nats, LogBase, Order};
use crate::types::{distinct_masses, type_classes};

/// Largest product-space size `n^k` accepted by [`exact_guessing_moment`].
pub const ENUMERATION_LIMIT: f64 = 1e7;

/// Optimal guessing order: atoms by non-increasing mass, ties by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingFunction {
    ranks: Vec<usize>,
}

impl RankingFunction {
    pub fn of(p: &Pmf) -> Self {
        let mut ranks = vec![0; p.len()];
        for (r, &atom) in p.order().iter().enumerate() {
            ranks[atom] = r + 1;
        }
        Self { ranks }
    }

    /// 1-based rank of `atom`.
    pub fn rank(&self, atom: usize) -> usize {
        self.ranks[atom]
    }

    /// Atoms in the order they are guessed.
    pub fn guess_order(&self) -> Vec<usize> {
        let mut order = vec![0; self.ranks.len()];
        for (atom, &r) in self.ranks.iter().enumerate() {
            order[r - 1] = atom;
        }
        order
    }

    /// `E[g^rho_g(X)]` for this ranking.
    pub fn moment(&self, p: &Pmf, rho_g: f64) -> f64 {
        p.masses()
            .iter()
            .zip(&self.ranks)
            .map(|(&m, &r)| m * (r as f64).powf(rho_g))
            .sum()
    }
}

fn check_rho(rho_g: f64) -> Result<()> {
    if !(rho_g > 0.0) || !rho_g.is_finite() {
        return Err(Error::domain(format!(
            "moment order must be a positive real, got {rho_g}"
        )));
    }
    Ok(())
}

/// `E[g^rho_g(X^k)]` under the optimal ranking of the product pmf.
///
/// Product masses are grouped by type class; each class occupies a
/// contiguous block of ranks. Refuses when `n^k` exceeds the enumeration limit.
pub fn exact_guessing_moment(p: &Pmf, rho_g: f64, k: usize) -> Result<f64> {
    check_rho(rho_g)?;
    if k == 0 {
        return Err(Error::domain("block length must be at least 1"));
    }
    let size = (p.len() as f64).powi(k as i32);
    if size > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(format!(
            "{}^{k} sequences exceed the enumeration limit {ENUMERATION_LIMIT:.0e}",
            p.len()
        )));
    }
    let mut classes = type_classes(&distinct_masses(p), k);
    classes.sort_by(|a, b| b.log_prob.total_cmp(&a.log_prob));
    let mut rank = 0u64;
    let mut total = 0.0;
    for class in &classes {
        let count = class.log_count.exp().round() as u64;
        let powers: f64 = (rank + 1..=rank + count).map(|l| (l as f64).powf(rho_g)).sum();
        total += class.log_prob.exp() * powers;
        rank += count;
    }
    Ok(total)
}

/// `(1/k) log E[g^rho_g(X^k)]` in `base` units.
pub fn normalized_log_moment(p: &Pmf, rho_g: f64, k: usize, base: LogBase) -> Result<f64> {
    Ok(base.from_nats(exact_guessing_moment(p, rho_g, k)?.ln() / k as f64))
}

/// Arikan's bracket on `(1/k) log E[g^rho_g(X^k)]`:
/// `rho_g H_{1/(1+rho_g)}(X)` minus `rho_g log(1 + k ln n) / k`, and the entropy term alone.
pub fn guessing_moment_bounds(p: &Pmf, rho_g: f64, k: usize, base: LogBase) -> Result<(f64, f64)> {
    check_rho(rho_g)?;
    if k == 0 {
        return Err(Error::domain("block length must be at least 1"));
    }
    let alpha = Order::conjugate_of(rho_g)?;
    let upper = rho_g * renyi_entropy_nats(p, alpha);
    let lower = upper - rho_g * log_correction(p.len(), k);
    Ok((base.from_nats(lower), base.from_nats(upper)))
}

/// `ln(1 + k ln n) / k`, the vanishing penalty in Arikan's lower bound.
fn log_correction(n: usize, k: usize) -> f64 {
    (k as f64 * (n as f64).ln()).ln_1p() / k as f64
}

/// Bounds on `(1/k) log(E[g^rho_g(X^k)] / E[g^rho_g(Y^k)])` when `Y = f(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuessBoundReport {
    pub k: usize,
    pub rho_g: f64,
    /// Valid for every aggregation onto `m` symbols.
    pub lower: f64,
    /// Achieved by the Huffman aggregation.
    pub upper: f64,
}

impl GuessBoundReport {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Bounds on the guessing-moment reduction from clustering `X` into `m` symbols.
pub fn clustering_gain_bounds(p: &Pmf, m: usize, rho_g: f64, k: usize, base: LogBase) -> Result<GuessBoundReport> {
    check_rho(rho_g)?;
    if k == 0 {
        return Err(Error::domain("block length must be at least 1"));
    }
    let envelope = max_entropy_envelope(p, m)?;
    let alpha = Order::conjugate_of(rho_g)?;
    let drop = renyi_entropy_nats(p, alpha) - renyi_entropy_nats(&envelope, alpha);
    let lower = rho_g * drop - rho_g * log_correction(p.len(), k);
    let upper = rho_g * (drop + ratio_two_gap_nats(alpha)) + rho_g * log_correction(m, k);
    Ok(GuessBoundReport {
        k,
        rho_g,
        lower: base.from_nats(lower),
        upper: base.from_nats(upper),
    })
}
