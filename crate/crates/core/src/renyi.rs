//! Rényi entropy and divergence of extended order.
//!
//! Everything is evaluated in nats; conversion to the requested [`LogBase`]
//! happens once, at the public boundary.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pmf::Pmf;

/// Orders closer than this to one use a first-order expansion around the
/// Shannon value instead of the `1/(1-α)` form.
const NEAR_ONE: f64 = 1e-7;

/// Extended Rényi order `α ∈ [0, ∞]`.
///
/// `0`, `1` and `∞` are distinct variants; [`Order::new`] maps those exact
/// values onto them, so `Finite` never holds 0, 1 or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Zero,
    One,
    Infinity,
    Finite(f64),
}

impl Order {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::domain(format!("Rényi order must be in [0, inf], got {alpha}")));
        }
        Ok(if alpha == 0.0 {
            Order::Zero
        } else if alpha == 1.0 {
            Order::One
        } else if alpha.is_infinite() {
            Order::Infinity
        } else {
            Order::Finite(alpha)
        })
    }

    /// The order as a float (`f64::INFINITY` for `Infinity`).
    pub fn value(self) -> f64 {
        match self {
            Order::Zero => 0.0,
            Order::One => 1.0,
            Order::Infinity => f64::INFINITY,
            Order::Finite(a) => a,
        }
    }

    /// `1 / (1 + rho)`, the order that pairs with a moment or cumulant parameter.
    pub fn conjugate_of(rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::domain(format!(
                "moment parameter must be positive and finite, got {rho}"
            )));
        }
        Order::new(1.0 / (1.0 + rho))
    }

    fn canonical(self) -> Self {
        match self {
            Order::Finite(a) => Order::new(a).unwrap_or(self),
            other => other,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Infinity => write!(f, "inf"),
            other => write!(f, "{}", other.value()),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Order::Infinity),
            t => {
                let a = t
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("not a Rényi order: {s:?}")))?;
                Order::new(a)
            }
        }
    }
}

/// Logarithm base for reported information quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBase(f64);

impl LogBase {
    pub const BITS: LogBase = LogBase(2.0);
    pub const NATS: LogBase = LogBase(std::f64::consts::E);

    pub fn new(base: f64) -> Result<Self> {
        if !(base > 1.0) || !base.is_finite() {
            return Err(Error::domain(format!("log base must be a finite real > 1, got {base}")));
        }
        Ok(LogBase(base))
    }

    pub fn base(self) -> f64 {
        self.0
    }

    /// Natural log of the base.
    pub fn ln(self) -> f64 {
        if self.0 == 2.0 {
            std::f64::consts::LN_2
        } else {
            self.0.ln()
        }
    }

    /// Converts a quantity in nats into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        nats / self.ln()
    }

    /// Converts a quantity in this base into nats.
    pub fn to_nats(self, value: f64) -> f64 {
        value * self.ln()
    }
}

impl Default for LogBase {
    fn default() -> Self {
        LogBase::BITS
    }
}

/// Numerically stable `ln Σ exp(x_i)`; `-inf` for an empty input.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Rényi entropy in nats of a multiset of masses given as `(mass, multiplicity)`.
///
/// Multiplicities are counts stored as floats so that huge type classes fit;
/// zero masses and zero multiplicities contribute nothing.
pub(crate) fn entropy_nats_grouped(groups: &[(f64, f64)], alpha: Order) -> f64 {
    let live = || groups.iter().copied().filter(|&(m, c)| m > 0.0 && c > 0.0);
    match alpha.canonical() {
        Order::Zero => live().map(|(_, c)| c).sum::<f64>().ln(),
        Order::Infinity => -live().map(|(m, _)| m).fold(0.0, f64::max).ln(),
        Order::One => shannon_nats(live()),
        Order::Finite(a) if (a - 1.0).abs() < NEAR_ONE => {
            let h = shannon_nats(live());
            let second: f64 = live().map(|(m, c)| c * m * m.ln() * m.ln()).sum();
            let variance = (second - h * h).max(0.0);
            h - 0.5 * (a - 1.0) * variance
        }
        Order::Finite(a) => log_sum_exp(live().map(|(m, c)| c.ln() + a * m.ln())) / (1.0 - a),
    }
}

fn shannon_nats(groups: impl Iterator<Item = (f64, f64)>) -> f64 {
    groups.map(|(m, c)| -c * m * m.ln()).sum()
}

pub(crate) fn renyi_entropy_nats(p: &Pmf, alpha: Order) -> f64 {
    let groups: Vec<(f64, f64)> = p.masses().iter().map(|&m| (m, 1.0)).collect();
    entropy_nats_grouped(&groups, alpha)
}

/// Rényi entropy `H_α(p)` in the given base.
pub fn renyi_entropy(p: &Pmf, alpha: Order, base: LogBase) -> f64 {
    base.from_nats(renyi_entropy_nats(p, alpha))
}

pub(crate) fn renyi_divergence_nats(p: &Pmf, q: &Pmf, alpha: Order) -> f64 {
    let len = p.len().max(q.len());
    let at = |d: &Pmf, i: usize| d.masses().get(i).copied().unwrap_or(0.0);
    let pairs: Vec<(f64, f64)> = (0..len)
        .map(|i| (at(p, i), at(q, i)))
        .filter(|&(pm, _)| pm > 0.0)
        .collect();
    let escapes = pairs.iter().any(|&(_, qm)| qm == 0.0);

    match alpha.canonical() {
        // The only event of full P-probability worth maximizing over is the support of P.
        Order::Zero => -pairs.iter().map(|&(_, qm)| qm).sum::<f64>().ln(),
        Order::Infinity => {
            if escapes {
                return f64::INFINITY;
            }
            pairs
                .iter()
                .map(|&(pm, qm)| (pm / qm).ln())
                .fold(f64::NEG_INFINITY, f64::max)
        }
        Order::One => {
            if escapes {
                return f64::INFINITY;
            }
            pairs.iter().map(|&(pm, qm)| pm * (pm / qm).ln()).sum::<f64>().max(0.0)
        }
        Order::Finite(a) if a > 1.0 && escapes => f64::INFINITY,
        Order::Finite(a) if (a - 1.0).abs() < NEAR_ONE && !escapes => {
            let mean: f64 = pairs.iter().map(|&(pm, qm)| pm * (pm / qm).ln()).sum();
            let second: f64 = pairs.iter().map(|&(pm, qm)| pm * (pm / qm).ln().powi(2)).sum();
            (mean + 0.5 * (a - 1.0) * (second - mean * mean).max(0.0)).max(0.0)
        }
        Order::Finite(a) => {
            let lse = log_sum_exp(
                pairs
                    .iter()
                    .filter(|&&(_, qm)| qm > 0.0)
                    .map(|&(pm, qm)| a * pm.ln() + (1.0 - a) * qm.ln()),
            );
            (lse / (a - 1.0)).max(0.0)
        }
    }
}

/// Rényi divergence `D_α(p ‖ q)` in the given base; `+∞` is a legal result.
///
/// The shorter pmf is zero-padded.
pub fn renyi_divergence(p: &Pmf, q: &Pmf, alpha: Order, base: LogBase) -> f64 {
    base.from_nats(renyi_divergence_nats(p, q, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pmf(m: &[f64]) -> Pmf {
        Pmf::new(m.to_vec()).unwrap()
    }

    #[test]
    fn order_canonicalizes_special_points() {
        assert_eq!(Order::new(0.0).unwrap(), Order::Zero);
        assert_eq!(Order::new(1.0).unwrap(), Order::One);
        assert_eq!(Order::new(f64::INFINITY).unwrap(), Order::Infinity);
        assert_eq!(Order::new(2.5).unwrap(), Order::Finite(2.5));
        assert!(Order::new(-1.0).is_err());
        assert_eq!("inf".parse::<Order>().unwrap(), Order::Infinity);
        assert_eq!("0.5".parse::<Order>().unwrap(), Order::Finite(0.5));
    }

    #[test]
    fn entropy_examples() {
        let u4 = Pmf::uniform(4).unwrap();
        assert!((renyi_entropy(&u4, Order::new(2.0).unwrap(), LogBase::BITS) - 2.0).abs() < 1e-14);
        let point = pmf(&[1.0, 0.0, 0.0]);
        assert_eq!(renyi_entropy(&point, Order::new(0.5).unwrap(), LogBase::BITS), 0.0);
        let p = pmf(&[0.5, 0.25, 0.25]);
        let h2 = renyi_entropy(&p, Order::new(2.0).unwrap(), LogBase::BITS);
        assert!((h2 - (8.0f64 / 3.0).log2()).abs() < 1e-14);
        assert!((h2 - 1.4150).abs() < 1e-4);
    }

    #[test]
    fn special_orders() {
        let p = pmf(&[0.5, 0.25, 0.25, 0.0]);
        assert!((renyi_entropy(&p, Order::Zero, LogBase::BITS) - 3f64.log2()).abs() < 1e-14);
        assert!((renyi_entropy(&p, Order::One, LogBase::BITS) - 1.5).abs() < 1e-14);
        assert!((renyi_entropy(&p, Order::Infinity, LogBase::BITS) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn near_one_expansion_is_continuous() {
        let p = pmf(&[0.6, 0.3, 0.1]);
        let h1 = renyi_entropy(&p, Order::One, LogBase::NATS);
        for eps in [1e-8, 5e-8, 2e-7] {
            for a in [1.0 - eps, 1.0 + eps] {
                let h = renyi_entropy(&p, Order::new(a).unwrap(), LogBase::NATS);
                assert!((h - h1).abs() < 10.0 * eps * 3.0, "alpha {a}: {h} vs {h1}");
            }
        }
    }

    #[test]
    fn divergence_examples() {
        let p = pmf(&[0.5, 0.25, 0.25]);
        let u = Pmf::uniform(3).unwrap();
        for a in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            assert!(renyi_divergence(&p, &p, Order::new(a).unwrap(), LogBase::BITS).abs() < 1e-14);
        }
        let d2 = renyi_divergence(&p, &u, Order::new(2.0).unwrap(), LogBase::BITS);
        assert!((d2 - (9.0f64 / 8.0).log2()).abs() < 1e-14);
        assert!((d2 - 0.1699).abs() < 1e-4);
    }

    #[test]
    fn divergence_infinite_off_support() {
        let p = pmf(&[0.5, 0.5]);
        let q = pmf(&[1.0, 0.0]);
        assert_eq!(renyi_divergence(&p, &q, Order::One, LogBase::BITS), f64::INFINITY);
        assert_eq!(
            renyi_divergence(&p, &q, Order::new(2.0).unwrap(), LogBase::BITS),
            f64::INFINITY
        );
        assert_eq!(renyi_divergence(&p, &q, Order::Infinity, LogBase::BITS), f64::INFINITY);
        // Below order one only the overlap counts: D_0 = log 1/Q(supp P) = 0.
        assert_eq!(renyi_divergence(&p, &q, Order::Zero, LogBase::BITS), 0.0);
        let half = renyi_divergence(&p, &q, Order::new(0.5).unwrap(), LogBase::BITS);
        assert!((half - 1.0).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_eq!(log_sum_exp(std::iter::empty()), f64::NEG_INFINITY);
        assert!((log_sum_exp([1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((log_sum_exp([-1000.0, -1000.0]) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
