//! Extremal distributions under a mass-ratio constraint and the largest
//! Rényi entropy deficit below `log n` inside the class `P_n(rho)`.
//!
//! For a fixed minimal mass `beta`, every member of `P_n(rho)` is majorized
//! by a three-level pmf (a run of `rho * beta`, one middle mass, a run of
//! `beta`). Minimizing a Schur-concave entropy over the class therefore
//! reduces to a scalar search over `beta`. The objective is smooth between
//! the breakpoints `1 / (n + i (rho - 1))`, where the length of the
//! `rho * beta` run changes, so each piece is searched separately.

use crate::error::{Error, Result};
use crate::optimize::golden_section;
use crate::pmf::{MassRatioClass, Pmf};
use crate::renyi::{entropy_nats_grouped, LogBase, Order};

/// Bracket width at which the per-piece golden-section search stops.
pub const BETA_TOLERANCE: f64 = 1e-12;
/// Golden-section iteration cap per piece.
pub const MAX_GOLDEN_ITERATIONS: usize = 200;

/// Orders this close to one use the Shannon closed form for the asymptotic gap.
const ASYMPTOTIC_NEAR_ONE: f64 = 1e-6;

/// Admissible range `[1 / (1 + (n-1) rho), 1 / n]` of the minimal mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaWindow {
    pub lower: f64,
    pub upper: f64,
}

impl BetaWindow {
    pub fn new(n: usize, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("beta window needs n >= 2, got {n}")));
        }
        if !(rho >= 1.0) || !rho.is_finite() {
            return Err(Error::domain(format!(
                "mass ratio must be a finite real >= 1, got {rho}"
            )));
        }
        Ok(Self {
            lower: 1.0 / (1.0 + (n as f64 - 1.0) * rho),
            upper: 1.0 / n as f64,
        })
    }

    pub fn contains(&self, beta: f64) -> bool {
        beta >= self.lower * (1.0 - 1e-12) && beta <= self.upper * (1.0 + 1e-12)
    }
}

/// Breakpoints `1 / (n + i (rho - 1))` for `i = 0..n`, descending from `1/n`.
pub fn breakpoints(n: usize, rho: f64) -> Vec<f64> {
    (0..n).map(|i| 1.0 / (n as f64 + i as f64 * (rho - 1.0))).collect()
}

fn run_length(n: usize, rho: f64, beta: f64) -> usize {
    let x = (1.0 - n as f64 * beta) / ((rho - 1.0) * beta);
    // A relative nudge keeps exact breakpoints from flooring one step low.
    let i = (x + 1e-12 * x.abs().max(1.0)).floor();
    if i <= 0.0 {
        0
    } else {
        (i as usize).min(n - 1)
    }
}

fn three_level(n: usize, rho: f64, beta: f64, run: usize) -> Vec<(f64, f64)> {
    let high = rho * beta;
    let tail = (n - run - 1) as f64;
    let middle = 1.0 - (run as f64 * high + tail * beta);
    vec![(high, run as f64), (middle, 1.0), (beta, tail)]
}

fn three_level_pmf(n: usize, rho: f64, beta: f64, run: usize) -> Pmf {
    let levels = three_level(n, rho, beta, run);
    let mut masses = Vec::with_capacity(n);
    masses.extend(std::iter::repeat_n(levels[0].0, run));
    masses.push(levels[1].0.max(0.0));
    masses.extend(std::iter::repeat_n(beta, n - run - 1));
    Pmf::from_valid(masses)
}

/// The three-level pmf with minimal mass `beta`: `i` masses `rho * beta`,
/// one middle mass fixed by normalization, then `beta` repeated, where
/// `i = floor((1 - n beta) / ((rho - 1) beta))`.
pub fn extremal_pmf(n: usize, rho: f64, beta: f64) -> Result<Pmf> {
    if !(rho > 1.0) {
        return Err(Error::domain(format!("extremal pmf needs rho > 1, got {rho}")));
    }
    let window = BetaWindow::new(n, rho)?;
    if !window.contains(beta) {
        return Err(Error::domain(format!(
            "beta = {beta} outside [{}, {}]",
            window.lower, window.upper
        )));
    }
    let beta = beta.clamp(window.lower, window.upper);
    Ok(three_level_pmf(n, rho, beta, run_length(n, rho, beta)))
}

/// The three-level pmf built from `p_min` of `p`; it lies in `P_n(rho)`
/// and majorizes `p`.
pub fn ratio_class_majorant(p: &Pmf, rho: f64) -> Result<Pmf> {
    if !(rho > 1.0) {
        return Err(Error::domain(format!("majorant needs rho > 1, got {rho}")));
    }
    let class = MassRatioClass::new(p.len(), rho)?;
    if !class.contains(p)? {
        return Err(Error::domain(format!(
            "pmf has mass ratio {} > rho = {rho}",
            p.p_max() / p.p_min()
        )));
    }
    let beta = p.p_min();
    Ok(three_level_pmf(p.len(), rho, beta, run_length(p.len(), rho, beta)))
}

/// Largest entropy deficit inside `P_n(rho)` together with a minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalProfile {
    pub n: usize,
    pub rho: f64,
    pub alpha: Order,
    pub base: LogBase,
    /// `log n - min H_α` over the class, in `base` units.
    pub gap: f64,
    pub beta_star: f64,
    pub minimizer: Pmf,
}

/// Computes `log n - min_{P ∈ P_n(rho)} H_α(P)`.
///
/// Every piece between consecutive breakpoints is searched with golden
/// section and every breakpoint is evaluated; the global minimum wins.
/// `rho <= 1` and `n = 1` give a zero gap with the uniform minimizer.
pub fn entropy_gap(n: usize, rho: f64, alpha: Order, base: LogBase) -> Result<ExtremalProfile> {
    if n == 0 {
        return Err(Error::domain("support size must be positive"));
    }
    if rho.is_nan() {
        return Err(Error::domain("mass ratio is NaN"));
    }
    let uniform = |n: usize| ExtremalProfile {
        n,
        rho,
        alpha,
        base,
        gap: 0.0,
        beta_star: 1.0 / n as f64,
        minimizer: Pmf::from_valid(vec![1.0 / n as f64; n]),
    };
    if n == 1 || rho <= 1.0 {
        return Ok(uniform(n));
    }
    if !rho.is_finite() {
        return Err(Error::domain("mass ratio must be finite"));
    }

    let objective = |beta: f64, run: usize| entropy_nats_grouped(&three_level(n, rho, beta, run), alpha);
    let points = breakpoints(n, rho);

    let mut best_beta = points[0];
    let mut best_run = 0;
    let mut best_h = objective(points[0], 0);
    for (i, &beta) in points.iter().enumerate() {
        let h = objective(beta, i);
        if h < best_h {
            best_h = h;
            best_beta = beta;
            best_run = i;
        }
    }
    // On (b_{i+1}, b_i] the run length is i.
    for i in 0..n - 1 {
        let (lo, hi) = (points[i + 1], points[i]);
        let m = golden_section(|b| objective(b, i), lo, hi, BETA_TOLERANCE, MAX_GOLDEN_ITERATIONS);
        if m.value < best_h {
            best_h = m.value;
            best_beta = m.x;
            best_run = i;
        }
    }

    let gap_nats = ((n as f64).ln() - best_h).max(0.0);
    Ok(ExtremalProfile {
        n,
        rho,
        alpha,
        base,
        gap: base.from_nats(gap_nats),
        beta_star: best_beta,
        minimizer: three_level_pmf(n, rho, best_beta, best_run),
    })
}

/// `lim_{n→∞}` of the entropy gap, in closed form.
///
/// `rho <= 1` and order zero give 0; order infinity gives `log rho`.
pub fn asymptotic_entropy_gap(rho: f64, alpha: Order, base: LogBase) -> f64 {
    base.from_nats(asymptotic_gap_nats(rho, alpha))
}

/// `c_α^(∞)(2)`: the slack in the Huffman aggregation bound.
pub fn ratio_two_gap(alpha: Order, base: LogBase) -> f64 {
    asymptotic_entropy_gap(2.0, alpha, base)
}

pub(crate) fn ratio_two_gap_nats(alpha: Order) -> f64 {
    asymptotic_gap_nats(2.0, alpha)
}

pub(crate) fn asymptotic_gap_nats(rho: f64, alpha: Order) -> f64 {
    if !(rho > 1.0) {
        return 0.0;
    }
    if rho.is_infinite() {
        return f64::INFINITY;
    }
    match alpha {
        Order::Zero => 0.0,
        Order::Infinity => rho.ln(),
        Order::One => shannon_limit(rho),
        Order::Finite(a) if (a - 1.0).abs() < ASYMPTOTIC_NEAR_ONE => shannon_limit(rho),
        Order::Finite(a) => closed_form(rho, a).max(0.0),
    }
}

fn shannon_limit(rho: f64) -> f64 {
    let u = rho - 1.0;
    let t = ((1.0 + u) * u.ln_1p() - u) / u;
    (t - t.ln_1p()).max(0.0)
}

/// `1 + a u - (1 + u)^a`, with a series when both `u` and `a` are small
/// enough for direct evaluation to cancel.
fn curvature_term(u: f64, a: f64, rho_pow_minus_one: f64) -> f64 {
    if u <= 0.05 && a <= 10.0 {
        // -(sum_{j >= 2} C(a, j) u^j)
        let mut coeff = a;
        let mut power = u;
        let mut sum = 0.0;
        for j in 2..400 {
            coeff *= (a - (j as f64 - 1.0)) / j as f64;
            power *= u;
            let term = coeff * power;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        -sum
    } else {
        a * u - rho_pow_minus_one
    }
}

fn closed_form(rho: f64, a: f64) -> f64 {
    let u = rho - 1.0;
    let log_rho = u.ln_1p();
    if a > 1.0 && a * log_rho > 30.0 {
        // rho^a dominates; carry everything relative to it.
        let t = (-a * log_rho).exp();
        let eps = a * u * t / (1.0 - t);
        let x = (1.0 - eps) / ((a - 1.0) * u);
        let first = a * log_rho + (-t).ln_1p() + (x + t / (1.0 - t)).ln();
        let second = a * (u * x).ln_1p();
        return (first - second) / (a - 1.0);
    }
    let pow_m1 = (a * log_rho).exp_m1();
    let x = curvature_term(u, a, pow_m1) / ((1.0 - a) * u * pow_m1);
    ((pow_m1 * x).ln_1p() - a * (u * x).ln_1p()) / (a - 1.0)
}

/// Interior maximizer `x* ∈ (0, 1)` of the limiting single-parameter problem
/// `x ↦ (1/(α-1)) log[(1 + (rho^α - 1) x) / (1 + (rho - 1) x)^α]`.
///
/// `None` for `rho <= 1` and for orders zero and infinity.
pub fn asymptotic_maximizer(rho: f64, alpha: Order) -> Option<f64> {
    if !(rho > 1.0) || !rho.is_finite() {
        return None;
    }
    let u = rho - 1.0;
    match alpha {
        Order::Zero | Order::Infinity => None,
        Order::One => Some(((1.0 + u) * u.ln_1p() - u) / (u * u)),
        Order::Finite(a) if (a - 1.0).abs() < ASYMPTOTIC_NEAR_ONE => Some(((1.0 + u) * u.ln_1p() - u) / (u * u)),
        Order::Finite(a) => {
            let log_rho = u.ln_1p();
            if a > 1.0 && a * log_rho > 30.0 {
                let t = (-a * log_rho).exp();
                return Some((1.0 - a * u * t / (1.0 - t)) / ((a - 1.0) * u));
            }
            let pow_m1 = (a * log_rho).exp_m1();
            Some(curvature_term(u, a, pow_m1) / ((1.0 - a) * u * pow_m1))
        }
    }
}
