//! Deterministic aggregation of an `n`-ary source into `m < n` symbols:
//! the extremal aggregated distributions, the Huffman-merge construction and
//! a brute-force oracle for small instances.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extremal::ratio_two_gap_nats;
use crate::pmf::Pmf;
use crate::renyi::{entropy_nats_grouped, renyi_entropy_nats, LogBase, Order};

/// Largest number of maps `m^n` the exhaustive oracle will enumerate.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

const SCAN_TOLERANCE: f64 = 1e-12;

/// A surjective map `{0..n} → {0..m}`, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregation {
    map: Vec<usize>,
    m: usize,
}

impl Aggregation {
    pub fn new(map: Vec<usize>, m: usize) -> Result<Self> {
        let mut hit = vec![false; m];
        for &j in &map {
            if j >= m {
                return Err(Error::domain(format!("map value {j} outside 0..{m}")));
            }
            hit[j] = true;
        }
        if let Some(j) = hit.iter().position(|h| !h) {
            return Err(Error::domain(format!("map is not surjective: output {j} is never hit")));
        }
        Ok(Self { map, m })
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Pmf of `f(X)`.
    pub fn induced(&self, p: &Pmf) -> Result<Pmf> {
        if p.len() != self.map.len() {
            return Err(Error::domain(format!(
                "map has {} inputs but the pmf has {} atoms",
                self.map.len(),
                p.len()
            )));
        }
        let mut q = vec![0.0; self.m];
        for (&j, &mass) in self.map.iter().zip(p.masses()) {
            q[j] += mass;
        }
        Ok(Pmf::from_valid(q))
    }

    /// `{"f": [...]}` with 1-based output labels.
    pub fn to_json(&self) -> String {
        let f: Vec<usize> = self.map.iter().map(|j| j + 1).collect();
        serde_json::json!({ "f": f }).to_string()
    }
}

fn check_instance(p: &Pmf, m: usize) -> Result<()> {
    let n = p.len();
    if m < 2 || m >= n {
        return Err(Error::domain(format!("need 2 <= m < n, got m = {m}, n = {n}")));
    }
    if !p.is_sorted_non_increasing() {
        return Err(Error::domain("pmf must be sorted non-increasing"));
    }
    Ok(())
}

/// The aggregated pmf with the largest entropy upper bound: keep the `n*`
/// largest masses and spread the rest evenly over `m - n*` symbols, or the
/// uniform pmf when `p_max < 1/m`.
pub fn max_entropy_envelope(p: &Pmf, m: usize) -> Result<Pmf> {
    check_instance(p, m)?;
    let masses = p.masses();
    if masses[0] < 1.0 / m as f64 {
        return Pmf::uniform(m);
    }
    // tails[i] = sum of masses[i..]
    let mut tails = vec![0.0; masses.len() + 1];
    for i in (0..masses.len()).rev() {
        tails[i] = tails[i + 1] + masses[i];
    }
    // 1-based i: P(i) >= tail(i+1) / (m - i)
    let keep = (1..m)
        .rev()
        .find(|&i| masses[i - 1] >= tails[i] / (m - i) as f64 - SCAN_TOLERANCE)
        .ok_or_else(|| {
            Error::domain("no admissible split point although p_max >= 1/m; the input is numerically inconsistent")
        })?;
    let spread = tails[keep] / (m - keep) as f64;
    let mut out = masses[..keep].to_vec();
    out.extend(std::iter::repeat_n(spread, m - keep));
    Ok(Pmf::from_valid(out))
}

/// The aggregated pmf of least entropy: the `n - m + 1` largest masses
/// merged into one symbol, the rest passed through.
pub fn min_entropy_aggregate(p: &Pmf, m: usize) -> Result<Pmf> {
    min_entropy_map(p, m)?.induced(p)
}

fn min_entropy_map(p: &Pmf, m: usize) -> Result<Aggregation> {
    check_instance(p, m)?;
    let merged = p.len() - m + 1;
    let map = (0..p.len())
        .map(|k| if k < merged { 0 } else { k - merged + 1 })
        .collect();
    Aggregation::new(map, m)
}

/// Record of the Huffman merges that build the aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct HuffmanTrace {
    /// `(node a, node b, merged mass)`; atoms are nodes `0..n`, the `t`-th
    /// merge creates node `n + t`.
    pub merges: Vec<(usize, usize, f64)>,
    /// Number of leading outputs that are the untouched atom of the same rank.
    pub prefix_index: usize,
    /// Output masses, non-increasing.
    pub output: Vec<f64>,
}

impl HuffmanTrace {
    /// The factor-two property `Q(i+1) <= 2 Q(m)` of Huffman merging.
    pub fn satisfies_factor_two(&self) -> bool {
        let last = *self.output.last().expect("non-empty output");
        self.output[self.prefix_index] <= 2.0 * last * (1.0 + 1e-12)
    }

    /// Output masses with everything after the prefix replaced by its mean.
    pub fn balanced_tail(&self) -> Pmf {
        let i = self.prefix_index;
        let m = self.output.len();
        let tail: f64 = self.output[i..].iter().sum();
        let mut out = self.output[..i].to_vec();
        out.extend(std::iter::repeat_n(tail / (m - i) as f64, m - i));
        Pmf::from_valid(out)
    }
}

#[derive(Debug)]
struct Node {
    mass: f64,
    id: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap order: smallest mass first, larger id first among ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other.mass.total_cmp(&self.mass).then(self.id.cmp(&other.id))
    }
}

/// Merges the two smallest masses `n - m` times and labels the surviving
/// nodes by non-increasing mass.
pub fn huffman_aggregate(p: &Pmf, m: usize) -> Result<(Aggregation, HuffmanTrace)> {
    check_instance(p, m)?;
    let n = p.len();
    let mut members: Vec<Vec<usize>> = (0..n).map(|k| vec![k]).collect();
    let mut masses: Vec<f64> = p.masses().to_vec();
    let mut heap: BinaryHeap<Node> = masses.iter().enumerate().map(|(id, &mass)| Node { mass, id }).collect();
    let mut merges = Vec::with_capacity(n - m);

    for _ in 0..n - m {
        let a = heap.pop().expect("heap holds more than m nodes");
        let b = heap.pop().expect("heap holds more than m nodes");
        let id = members.len();
        let mass = a.mass + b.mass;
        let mut joined = std::mem::take(&mut members[a.id]);
        joined.append(&mut members[b.id]);
        joined.sort_unstable();
        members.push(joined);
        masses.push(mass);
        merges.push((a.id, b.id, mass));
        heap.push(Node { mass, id });
    }

    // Order by mass, treating masses equal up to rounding as ties broken by
    // the smallest member atom. Insertion sort keeps the tolerant comparison safe.
    let mut survivors: Vec<usize> = heap.into_iter().map(|node| node.id).collect();
    survivors.sort_by_key(|&id| members[id][0]);
    for t in 1..survivors.len() {
        let mut s = t;
        while s > 0 && clearly_larger(masses[survivors[s]], masses[survivors[s - 1]]) {
            survivors.swap(s, s - 1);
            s -= 1;
        }
    }

    let mut map = vec![0; n];
    for (j, &id) in survivors.iter().enumerate() {
        for &k in &members[id] {
            map[k] = j;
        }
    }
    let prefix_index = survivors
        .iter()
        .enumerate()
        .take_while(|&(j, &id)| members[id].as_slice() == [j])
        .count();
    let output = survivors.iter().map(|&id| masses[id]).collect();
    Ok((
        Aggregation::new(map, m)?,
        HuffmanTrace {
            merges,
            prefix_index,
            output,
        },
    ))
}

fn clearly_larger(a: f64, b: f64) -> bool {
    a - b > 1e-12 * a.abs().max(b.abs())
}

/// Entropy range of `f(X)` over all surjections onto `m` symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRange {
    /// Guaranteed lower end for the maximum: `upper - v(α)`.
    pub lower: f64,
    /// Upper bound on the maximum: entropy of the max-entropy envelope.
    pub upper: f64,
    /// Exact minimum, attained by the min-entropy aggregate.
    pub min_value: f64,
}

pub fn entropy_range(p: &Pmf, m: usize, alpha: Order, base: LogBase) -> Result<EntropyRange> {
    let upper = renyi_entropy_nats(&max_entropy_envelope(p, m)?, alpha);
    let min_value = renyi_entropy_nats(&min_entropy_aggregate(p, m)?, alpha);
    Ok(EntropyRange {
        lower: base.from_nats(upper - ratio_two_gap_nats(alpha)),
        upper: base.from_nats(upper),
        min_value: base.from_nats(min_value),
    })
}

/// Exact entropy extrema over every surjection, found by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveExtrema {
    pub max_value: f64,
    pub argmax: Aggregation,
    pub min_value: f64,
    pub argmin: Aggregation,
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    index: u64,
}

impl Best {
    fn pick(self, other: Best, larger: bool) -> Best {
        let ord = self.value.total_cmp(&other.value);
        let ord = if larger { ord } else { ord.reverse() };
        match ord.then(other.index.cmp(&self.index)) {
            Ordering::Less => other,
            _ => self,
        }
    }
}

fn decode(mut index: u64, n: usize, m: usize, map: &mut [usize]) {
    for slot in map.iter_mut().take(n) {
        *slot = (index % m as u64) as usize;
        index /= m as u64;
    }
}

/// Brute-force extrema of `H_α(f(X))`; refuses when `m^n` exceeds
/// [`EXHAUSTIVE_LIMIT`].
pub fn exhaustive_extrema(p: &Pmf, m: usize, alpha: Order, base: LogBase) -> Result<ExhaustiveExtrema> {
    let n = p.len();
    if m < 1 || m > n {
        return Err(Error::domain(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    let total = (m as f64).powi(n as i32);
    if total > EXHAUSTIVE_LIMIT as f64 {
        return Err(Error::TooLarge(format!(
            "{m}^{n} maps exceed the enumeration limit {EXHAUSTIVE_LIMIT}"
        )));
    }
    let total = total as u64;
    const CHUNK: u64 = 4096;
    let chunks = total.div_ceil(CHUNK);
    let empty = (
        Best {
            value: f64::NEG_INFINITY,
            index: u64::MAX,
        },
        Best {
            value: f64::INFINITY,
            index: u64::MAX,
        },
    );

    let (max, min) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut map = vec![0; n];
            let mut groups = vec![(0.0, 1.0); m];
            let mut hits = vec![0usize; m];
            let mut acc = empty;
            for index in c * CHUNK..((c + 1) * CHUNK).min(total) {
                decode(index, n, m, &mut map);
                hits.iter_mut().for_each(|h| *h = 0);
                groups.iter_mut().for_each(|g| g.0 = 0.0);
                for (&j, &mass) in map.iter().zip(p.masses()) {
                    hits[j] += 1;
                    groups[j].0 += mass;
                }
                if hits.contains(&0) {
                    continue;
                }
                let h = entropy_nats_grouped(&groups, alpha);
                let here = Best { value: h, index };
                acc = (acc.0.pick(here, true), acc.1.pick(here, false));
            }
            acc
        })
        .reduce(|| empty, |a, b| (a.0.pick(b.0, true), a.1.pick(b.1, false)));

    let to_map = |index: u64| {
        let mut map = vec![0; n];
        decode(index, n, m, &mut map);
        Aggregation::new(map, m)
    };
    Ok(ExhaustiveExtrema {
        max_value: base.from_nats(max.value),
        argmax: to_map(max.index)?,
        min_value: base.from_nats(min.value),
        argmin: to_map(min.index)?,
    })
}

/// A named way of choosing an aggregation.
pub trait AggregationStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn aggregate(&self, p: &Pmf, m: usize, alpha: Order) -> Result<Aggregation>;
}

/// Huffman merging; independent of the order.
pub struct HuffmanStrategy;

impl AggregationStrategy for HuffmanStrategy {
    fn name(&self) -> &'static str {
        "huffman"
    }
    fn describe(&self) -> &'static str {
        "merge the two smallest masses until m remain"
    }
    fn aggregate(&self, p: &Pmf, m: usize, _alpha: Order) -> Result<Aggregation> {
        Ok(huffman_aggregate(p, m)?.0)
    }
}

/// Lumps the `n - m + 1` largest atoms together.
pub struct MinEntropyStrategy;

impl AggregationStrategy for MinEntropyStrategy {
    fn name(&self) -> &'static str {
        "min-entropy"
    }
    fn describe(&self) -> &'static str {
        "merge the n-m+1 largest masses (entropy minimizer)"
    }
    fn aggregate(&self, p: &Pmf, m: usize, _alpha: Order) -> Result<Aggregation> {
        min_entropy_map(p, m)
    }
}

/// Exact maximizer by enumeration; small instances only.
pub struct ExhaustiveMaxStrategy;

impl AggregationStrategy for ExhaustiveMaxStrategy {
    fn name(&self) -> &'static str {
        "exhaustive-max"
    }
    fn describe(&self) -> &'static str {
        "enumerate every surjection and keep the entropy maximizer"
    }
    fn aggregate(&self, p: &Pmf, m: usize, alpha: Order) -> Result<Aggregation> {
        check_instance(p, m)?;
        Ok(exhaustive_extrema(p, m, alpha, LogBase::NATS)?.argmax)
    }
}

/// Every registered strategy, in a stable order.
pub fn strategies() -> Vec<Box<dyn AggregationStrategy>> {
    vec![
        Box::new(HuffmanStrategy),
        Box::new(MinEntropyStrategy),
        Box::new(ExhaustiveMaxStrategy),
    ]
}

pub fn strategy(name: &str) -> Result<Box<dyn AggregationStrategy>> {
    strategies().into_iter().find(|s| s.name() == name).ok_or_else(|| {
        let known: Vec<&str> = strategies().iter().map(|s| s.name()).collect();
        Error::Parse(format!(
            "unknown aggregation strategy {name:?}; known: {}",
            known.join(", ")
        ))
    })
}
