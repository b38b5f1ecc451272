//! Finite probability mass functions, partial-sum curves, the mass-ratio
//! class and the majorization preorder.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for sum-to-one and majorization comparisons.
pub const TOLERANCE: f64 = 1e-12;

/// A probability mass function on `{1, ..., n}`.
///
/// Masses are kept in their original order; a descending view and the
/// permutation that produces it are computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    masses: Vec<f64>,
    sorted: Vec<f64>,
    // order[r] is the original index of the r-th largest mass; ties keep
    // the original index order.
    order: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PmfFile {
    masses: Vec<f64>,
}

impl Pmf {
    /// Builds a pmf, checking that every mass is finite and non-negative and
    /// that the masses sum to one within [`TOLERANCE`].
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidPmf("empty mass vector".into()));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidPmf(format!(
                    "mass {} at index {} is not a probability",
                    m,
                    i + 1
                )));
            }
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidPmf(format!("masses sum to {sum}, not 1")));
        }
        Ok(Self::from_valid(masses))
    }

    /// Normalizes non-negative weights into a pmf.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidPmf("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidPmf("weights sum to zero".into()));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub(crate) fn from_valid(masses: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..masses.len()).collect();
        order.sort_by(|&a, &b| masses[b].total_cmp(&masses[a]));
        let sorted = order.iter().map(|&i| masses[i]).collect();
        Self { masses, sorted, order }
    }

    /// The equiprobable pmf on `n` atoms.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPmf("uniform(0) has no atoms".into()));
        }
        Ok(Self::from_valid(vec![1.0 / n as f64; n]))
    }

    /// Unit mass on the first of `n` atoms.
    pub fn point_mass(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPmf("point mass needs at least one atom".into()));
        }
        let mut masses = vec![0.0; n];
        masses[0] = 1.0;
        Ok(Self::from_valid(masses))
    }

    /// Geometric distribution truncated to `{1, ..., n}`:
    /// `P(j) = (1 - a) a^(j-1) / (1 - a^n)`.
    pub fn geometric(a: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidPmf(format!("geometric parameter {a} must be positive")));
        }
        if n == 0 {
            return Err(Error::InvalidPmf("geometric pmf needs at least one atom".into()));
        }
        if a == 1.0 {
            return Self::uniform(n);
        }
        let norm = (1.0 - a) / (1.0 - a.powi(n as i32));
        Self::new((0..n).map(|j| norm * a.powi(j as i32)).collect())
    }

    /// Parses a pmf description: `uniform(n)`, `geometric(a,n)`, an inline
    /// comma-separated list of masses, or a path to a `{"masses": [...]}` file.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if let Some(args) = call_args(s, "uniform") {
            let n = parse_usize(args)?;
            return Self::uniform(n);
        }
        if let Some(args) = call_args(s, "geometric") {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("geometric expects (a,n), got ({args})")));
            }
            let a = parse_f64(parts[0])?;
            let n = parse_usize(parts[1])?;
            return Self::geometric(a, n);
        }
        let path = Path::new(s);
        if path.is_file() {
            return Self::from_json_file(path);
        }
        let masses = s.split(',').map(|t| parse_f64(t.trim())).collect::<Result<Vec<_>>>()?;
        Self::new(masses)
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: PmfFile = serde_json::from_str(json)?;
        Self::new(file.masses)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PmfFile {
            masses: self.masses.clone(),
        })
        .expect("pmf serializes")
    }

    /// Number of atoms, including zero masses.
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Masses in their original order.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Masses sorted non-increasingly.
    pub fn sorted_masses(&self) -> &[f64] {
        &self.sorted
    }

    /// `order()[r]` is the original (0-based) index of the `r`-th largest mass.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Strictly positive masses, original order.
    pub fn positive(&self) -> impl Iterator<Item = f64> + '_ {
        self.masses.iter().copied().filter(|&m| m > 0.0)
    }

    /// Number of strictly positive masses.
    pub fn support_size(&self) -> usize {
        self.positive().count()
    }

    pub fn p_max(&self) -> f64 {
        self.sorted[0]
    }

    /// Smallest strictly positive mass.
    pub fn p_min(&self) -> f64 {
        self.sorted.iter().rev().copied().find(|&m| m > 0.0).unwrap_or(0.0)
    }

    /// True when the original order is already non-increasing.
    pub fn is_sorted_non_increasing(&self) -> bool {
        self.masses.windows(2).all(|w| w[0] >= w[1])
    }

    /// The same masses rearranged into non-increasing order.
    pub fn sorted(&self) -> Pmf {
        Self::from_valid(self.sorted.clone())
    }

    /// `G_P(k)`: the sum of the `k` largest masses.
    pub fn partial_sum(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.len() {
            return Err(Error::domain(format!(
                "partial sum index {k} outside 1..={}",
                self.len()
            )));
        }
        if k == self.len() {
            return Ok(1.0);
        }
        Ok(self.sorted[..k].iter().sum())
    }

    /// The whole curve `G_P(1), ..., G_P(n)`.
    pub fn partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .sorted
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }

    /// Product pmf on `self.len() * other.len()` atoms, row-major in `self`.
    pub fn product(&self, other: &Pmf) -> Pmf {
        let masses = self
            .masses
            .iter()
            .flat_map(|&a| other.masses.iter().map(move |&b| a * b))
            .collect();
        Self::from_valid(masses)
    }

    /// The `k`-fold i.i.d. product, refusing more than `max_atoms` atoms.
    pub fn power(&self, k: usize, max_atoms: usize) -> Result<Pmf> {
        if k == 0 {
            return Err(Error::domain("block length must be at least 1"));
        }
        let atoms = (self.len() as f64).powi(k as i32);
        if atoms > max_atoms as f64 {
            return Err(Error::TooLarge(format!(
                "{}^{} = {} outcomes exceeds the enumeration cap {}",
                self.len(),
                k,
                atoms,
                max_atoms
            )));
        }
        let mut out = self.clone();
        for _ in 1..k {
            out = out.product(self);
        }
        Ok(out)
    }
}

fn call_args<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("not a positive integer: {s:?}")))
}

/// True iff `q` majorizes `p` (`p ≺ q`), zero-padding the shorter pmf.
pub fn majorizes(q: &Pmf, p: &Pmf) -> bool {
    let len = p.len().max(q.len());
    let (mut gp, mut gq) = (0.0, 0.0);
    for k in 0..len.saturating_sub(1) {
        gp += p.sorted.get(k).copied().unwrap_or(0.0);
        gq += q.sorted.get(k).copied().unwrap_or(0.0);
        if gp > gq + TOLERANCE {
            return false;
        }
    }
    true
}

/// The class `P_n(rho)` of pmfs on `n` atoms with `p_max / p_min <= rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassRatioClass {
    n: usize,
    rho: f64,
}

impl MassRatioClass {
    pub fn new(n: usize, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("ratio class needs n >= 2, got {n}")));
        }
        if !(rho >= 1.0) {
            return Err(Error::domain(format!("mass ratio must be >= 1, got {rho}")));
        }
        Ok(Self { n, rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Membership test; the pmf must be strictly positive on exactly `n` atoms.
    pub fn contains(&self, p: &Pmf) -> Result<bool> {
        let support = p.support_size();
        if support != self.n {
            return Err(Error::domain(format!(
                "pmf has {support} positive masses, class expects {}",
                self.n
            )));
        }
        Ok(p.p_max() <= self.rho * p.p_min() * (1.0 + TOLERANCE))
    }
}

/// Free-function form of [`MassRatioClass::contains`].
pub fn in_ratio_class(p: &Pmf, class: &MassRatioClass) -> Result<bool> {
    class.contains(p)
}
