//! Block codes whose codeword lengths control the cumulant generating
//! function `Λ_k(ρ) = (1/k) log_D Σ P(x^k) D^{ρ ℓ(x^k)}`, the bounds on how
//! clustering changes it, and a rate bound for Tunstall codes.
//!
//! Lengths are assigned per type class, so `Λ_k`, Kraft sums and mean
//! lengths are exact for block lengths far beyond explicit enumeration.

use serde::Serialize;

use crate::aggregate::max_entropy_envelope;
use crate::error::{Error, Result};
use crate::extremal::{asymptotic_entropy_gap, entropy_gap, ratio_two_gap_nats};
use crate::pmf::Pmf;
use crate::renyi::{log_sum_exp, renyi_entropy, renyi_entropy_nats, LogBase, Order};
use crate::types::{check_class_count, distinct_masses, type_classes};

/// Largest number of type classes a code may have.
pub const CLASS_LIMIT: f64 = 1e7;
/// Largest codebook that [`build_prefix_code`] will materialize.
pub const CODEBOOK_LIMIT: usize = 1 << 20;

const KRAFT_SLACK: f64 = 1e-12;
const INTEGER_GUARD: f64 = 1e-9;

/// Codeword length shared by every sequence of one type class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassLength {
    /// Occurrences of each distinct mass value (descending values).
    pub counts: Vec<usize>,
    /// Natural log of the common sequence probability.
    pub log_prob: f64,
    /// Natural log of the number of sequences in the class.
    pub log_count: f64,
    pub length: u32,
}

/// A length assignment for `D`-ary codes on blocks of `k` source symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    pub alphabet_size: usize,
    pub block_length: usize,
    pub rho_c: f64,
    pub classes: Vec<ClassLength>,
    source: Vec<f64>,
    /// Distinct-value slot of each atom; `None` for zero-mass atoms.
    slot: Vec<Option<usize>>,
}

fn check_alphabet(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain(format!(
            "code alphabet needs at least 2 letters, got {d}"
        )));
    }
    Ok((d as f64).ln())
}

fn check_order(rho_c: f64) -> Result<()> {
    if !(rho_c > 0.0) || !rho_c.is_finite() {
        return Err(Error::domain(format!(
            "cumulant order must be a positive real, got {rho_c}"
        )));
    }
    Ok(())
}

/// Ceiling that treats values within [`INTEGER_GUARD`] of an integer as that integer.
fn guarded_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= INTEGER_GUARD {
        r
    } else {
        x.ceil()
    }
}

/// `ℓ = ⌈-α log_D P(x^k) + log_D Q_k⌉` with `α = 1/(1+ρ)` and
/// `Q_k = (Σ p^α)^k`, at least 1. Zero-mass atoms get no codewords.
pub fn campbell_lengths(p: &Pmf, rho_c: f64, k: usize, d: usize) -> Result<CodeSpec> {
    check_order(rho_c)?;
    let ln_d = check_alphabet(d)?;
    if k == 0 {
        return Err(Error::domain("block length must be at least 1"));
    }
    let groups = distinct_masses(p);
    check_class_count(k, groups.len(), CLASS_LIMIT)?;

    let alpha = 1.0 / (1.0 + rho_c);
    let log_q1 = log_sum_exp(p.positive().map(|m| alpha * m.ln()));
    let classes = type_classes(&groups, k)
        .into_iter()
        .map(|c| {
            let exact = (-alpha * c.log_prob + k as f64 * log_q1) / ln_d;
            let length = guarded_ceil(exact).max(1.0) as u32;
            ClassLength {
                counts: c.counts,
                log_prob: c.log_prob,
                log_count: c.log_count,
                length,
            }
        })
        .collect();

    let slot = p
        .masses()
        .iter()
        .map(|&m| groups.iter().position(|&(v, _)| v == m))
        .collect();
    Ok(CodeSpec {
        alphabet_size: d,
        block_length: k,
        rho_c,
        classes,
        source: p.masses().to_vec(),
        slot,
    })
}

impl CodeSpec {
    fn ln_d(&self) -> f64 {
        (self.alphabet_size as f64).ln()
    }

    /// `ln Σ count · D^{-ℓ}`.
    pub fn log_kraft_sum(&self) -> f64 {
        let ln_d = self.ln_d();
        log_sum_exp(self.classes.iter().map(|c| c.log_count - c.length as f64 * ln_d))
    }

    pub fn kraft_sum(&self) -> f64 {
        self.log_kraft_sum().exp()
    }

    pub fn satisfies_kraft(&self) -> bool {
        self.log_kraft_sum() <= KRAFT_SLACK.ln_1p()
    }

    /// `E[ℓ(X^k)]`.
    pub fn expected_length(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| (c.log_count + c.log_prob).exp() * c.length as f64)
            .sum()
    }

    /// Number of codewords, i.e. sequences with positive probability.
    pub fn codeword_count(&self) -> f64 {
        self.classes.iter().map(|c| c.log_count.exp()).sum()
    }

    /// `Λ_k(ρ)` of these lengths at any `ρ > 0`, in `log_D` units per symbol.
    pub fn cumulant(&self, rho: f64) -> f64 {
        let ln_d = self.ln_d();
        let terms = self
            .classes
            .iter()
            .map(|c| (c.log_count + c.log_prob, rho * c.length as f64 * ln_d));
        log_moment(terms) / (self.block_length as f64 * ln_d)
    }

    /// Length of the codeword for `sequence` (0-based atom indices).
    pub fn length_of(&self, sequence: &[usize]) -> Result<u32> {
        if sequence.len() != self.block_length {
            return Err(Error::domain(format!(
                "sequence has {} symbols, block length is {}",
                sequence.len(),
                self.block_length
            )));
        }
        let mut counts = vec![0; self.classes.first().map_or(0, |c| c.counts.len())];
        for &x in sequence {
            match self.slot.get(x) {
                Some(Some(v)) => counts[*v] += 1,
                Some(None) => return Err(Error::domain(format!("atom {x} has zero probability and no codeword"))),
                None => return Err(Error::domain(format!("atom {x} outside the source alphabet"))),
            }
        }
        self.classes
            .iter()
            .find(|c| c.counts == counts)
            .map(|c| c.length)
            .ok_or_else(|| Error::domain("sequence matches no type class"))
    }
}

/// `ln Σ w_i e^{x_i} - ln Σ w_i` from `(ln w_i, x_i)` pairs. Small exponents go
/// through `expm1`/`ln_1p` so that `Λ/ρ` stays accurate as `ρ → 0`.
fn log_moment(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    let terms: Vec<(f64, f64)> = terms.collect();
    let largest = terms.iter().map(|t| t.1.abs()).fold(0.0, f64::max);
    if largest < 1.0 {
        let weight: f64 = terms.iter().map(|t| t.0.exp()).sum();
        let excess: f64 = terms.iter().map(|&(lw, x)| lw.exp() * x.exp_m1()).sum();
        (excess / weight).ln_1p()
    } else {
        log_sum_exp(terms.iter().map(|&(lw, x)| lw + x)) - log_sum_exp(terms.iter().map(|t| t.0))
    }
}

/// Scaled cumulant generating function of a code's lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CumulantValue {
    /// `Λ_k(ρ)` in `log_D` units per source symbol.
    pub lambda: f64,
}

/// `Λ_k(ρ_c)` of `spec`, which must have been built for `p`.
pub fn scaled_cumulant(spec: &CodeSpec, p: &Pmf) -> Result<CumulantValue> {
    if spec.source != p.masses() {
        return Err(Error::domain("code was built for a different pmf"));
    }
    Ok(CumulantValue {
        lambda: spec.cumulant(spec.rho_c),
    })
}

/// Converse `H_{1/(1+ρ)}(X) / log D` on `Λ_k/ρ` for every uniquely decodable
/// code, and the achievable `converse + 1/k`.
pub fn campbell_bounds(p: &Pmf, rho_c: f64, d: usize, k: usize) -> Result<(f64, f64)> {
    check_order(rho_c)?;
    let ln_d = check_alphabet(d)?;
    if k == 0 {
        return Err(Error::domain("block length must be at least 1"));
    }
    let converse = renyi_entropy_nats(p, Order::conjugate_of(rho_c)?) / ln_d;
    Ok((converse, converse + 1.0 / k as f64))
}

/// Bounds on `Λ_k(ρ) - Λ̄_k(ρ)` between a code for `X^k` and one for the
/// Huffman-clustered `Y^k`, in `log_D` units per symbol. The gap is
/// `(ρ / log D) v(1/(1+ρ)) + 2ρ/k`.
pub fn clustering_cumulant_bounds(p: &Pmf, m: usize, rho_c: f64, d: usize, k: usize) -> Result<(f64, f64)> {
    check_order(rho_c)?;
    let ln_d = check_alphabet(d)?;
    if k == 0 {
        return Err(Error::domain("block length must be at least 1"));
    }
    let alpha = Order::conjugate_of(rho_c)?;
    let drop = renyi_entropy_nats(p, alpha) - renyi_entropy_nats(&max_entropy_envelope(p, m)?, alpha);
    let block = rho_c / k as f64;
    let lower = rho_c / ln_d * drop - block;
    let upper = rho_c / ln_d * (drop + ratio_two_gap_nats(alpha)) + block;
    Ok((lower, upper))
}

/// Bracket on `(E[ℓ(X^k)] - E[ℓ̄(Y^k)]) / k` obtained by letting `ρ → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AverageLengthBracket {
    /// `(H(X) - H(X̃_m)) / log D - 1/k`.
    pub lower: f64,
    /// `(H(X) - H(X̃_m) + v(1)) / log D`, the commonly quoted upper end.
    pub upper: f64,
    /// `upper + 1/k`: the limit of the cumulant upper bound, which keeps
    /// the block term of the code for `X^k`.
    pub upper_with_block_term: f64,
}

pub fn average_length_bracket(p: &Pmf, m: usize, d: usize, k: usize) -> Result<AverageLengthBracket> {
    let ln_d = check_alphabet(d)?;
    if k == 0 {
        return Err(Error::domain("block length must be at least 1"));
    }
    let drop = renyi_entropy_nats(p, Order::One) - renyi_entropy_nats(&max_entropy_envelope(p, m)?, Order::One);
    let upper = (drop + ratio_two_gap_nats(Order::One)) / ln_d;
    Ok(AverageLengthBracket {
        lower: drop / ln_d - 1.0 / k as f64,
        upper,
        upper_with_block_term: upper + 1.0 / k as f64,
    })
}

/// Decodes the `index`-th sequence of `k` symbols over `0..n`, first symbol
/// most significant.
pub fn sequence_at(mut index: usize, n: usize, k: usize) -> Vec<usize> {
    let mut seq = vec![0; k];
    for slot in seq.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    seq
}

/// `Λ_k(ρ)` of an arbitrary per-sequence length table, indexed as in
/// [`sequence_at`] over all `p.len()^k` sequences.
pub fn cumulant_of_lengths(p: &Pmf, k: usize, lengths: &[u32], rho: f64, d: usize) -> Result<f64> {
    let ln_d = check_alphabet(d)?;
    let n = p.len();
    let expected = n.checked_pow(k as u32).filter(|&t| t <= CODEBOOK_LIMIT);
    if expected != Some(lengths.len()) {
        return Err(Error::domain(format!(
            "expected {n}^{k} lengths, got {}",
            lengths.len()
        )));
    }
    let terms = lengths.iter().enumerate().filter_map(|(i, &l)| {
        let log_prob: f64 = sequence_at(i, n, k).iter().map(|&x| p.masses()[x].ln()).sum();
        (log_prob > f64::NEG_INFINITY).then_some((log_prob, rho * l as f64 * ln_d))
    });
    Ok(log_moment(terms) / (k as f64 * ln_d))
}

/// Kraft sum `Σ D^{-ℓ}` of an explicit length list.
pub fn kraft_sum(lengths: &[u32], d: usize) -> f64 {
    let ln_d = (d as f64).ln();
    log_sum_exp(lengths.iter().map(|&l| -(l as f64) * ln_d)).exp()
}

/// Canonical prefix code for `lengths`: codewords are assigned in order of
/// (length, position) by counting up in base `D` and padding with zeros.
pub fn canonical_code(lengths: &[u32], d: usize) -> Result<Vec<Vec<u8>>> {
    check_alphabet(d)?;
    if d > 256 {
        return Err(Error::domain("code alphabets above 256 letters are not supported"));
    }
    if lengths.len() > CODEBOOK_LIMIT {
        return Err(Error::TooLarge(format!(
            "{} codewords exceed the cap {CODEBOOK_LIMIT}",
            lengths.len()
        )));
    }
    if lengths.contains(&0) {
        return Err(Error::domain("codeword lengths must be positive"));
    }
    if kraft_sum(lengths, d) > 1.0 + KRAFT_SLACK {
        return Err(Error::domain("lengths violate the Kraft inequality"));
    }
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| (lengths[i], i));

    let mut codes = vec![Vec::new(); lengths.len()];
    let mut current: Vec<u8> = Vec::new();
    for (t, &i) in order.iter().enumerate() {
        if t > 0 {
            increment(&mut current, d).ok_or_else(|| Error::domain("lengths violate the Kraft inequality"))?;
        }
        current.resize(lengths[i] as usize, 0);
        codes[i] = current.clone();
    }
    Ok(codes)
}

fn increment(digits: &mut [u8], d: usize) -> Option<()> {
    for digit in digits.iter_mut().rev() {
        if (*digit as usize) + 1 < d {
            *digit += 1;
            return Some(());
        }
        *digit = 0;
    }
    None
}

/// True iff no codeword is a prefix of another.
pub fn is_prefix_free(codes: &[Vec<u8>]) -> bool {
    let mut sorted: Vec<&Vec<u8>> = codes.iter().collect();
    sorted.sort();
    sorted.windows(2).all(|w| !w[1].starts_with(w[0]))
}

/// One entry of a materialized codebook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    /// Source block as 0-based atom indices.
    pub symbols: Vec<usize>,
    pub digits: Vec<u8>,
}

/// Materializes the canonical prefix code for every positive-probability block.
pub fn build_prefix_code(spec: &CodeSpec) -> Result<Vec<Codeword>> {
    let atoms: Vec<usize> = (0..spec.source.len()).filter(|&x| spec.slot[x].is_some()).collect();
    let k = spec.block_length;
    let total = atoms
        .len()
        .checked_pow(k as u32)
        .filter(|&t| t <= CODEBOOK_LIMIT)
        .ok_or_else(|| {
            Error::TooLarge(format!(
                "{}^{k} codewords exceed the cap {CODEBOOK_LIMIT}; per-class lengths remain available",
                atoms.len()
            ))
        })?;
    let mut symbols = Vec::with_capacity(total);
    let mut lengths = Vec::with_capacity(total);
    for index in 0..total {
        let seq: Vec<usize> = sequence_at(index, atoms.len(), k)
            .into_iter()
            .map(|j| atoms[j])
            .collect();
        lengths.push(spec.length_of(&seq)?);
        symbols.push(seq);
    }
    let codes = canonical_code(&lengths, spec.alphabet_size)?;
    Ok(symbols
        .into_iter()
        .zip(codes)
        .map(|(symbols, digits)| Codeword { symbols, digits })
        .collect())
}

/// `[{"symbols": [..1-based..], "codeword": "..."}]`, digits written in base 36.
pub fn code_to_json(code: &[Codeword], d: usize) -> Result<String> {
    if d > 36 {
        return Err(Error::domain(
            "codewords can only be rendered for alphabets of at most 36 letters",
        ));
    }
    let entries: Vec<serde_json::Value> = code
        .iter()
        .map(|c| {
            let word: String = c
                .digits
                .iter()
                .map(|&g| char::from_digit(g as u32, 36).expect("digit < 36"))
                .collect();
            let symbols: Vec<usize> = c.symbols.iter().map(|s| s + 1).collect();
            serde_json::json!({ "symbols": symbols, "codeword": word })
        })
        .collect();
    Ok(serde_json::to_string(&entries)?)
}

/// Compression-rate bound for Tunstall codes with `n_cw` codewords.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TunstallBound {
    /// Mass ratio `1 / p_min`.
    pub rho: f64,
    /// Shannon entropy gap for `n_cw` atoms, bits.
    pub gap_finite: f64,
    /// Its `n → ∞` limit, bits.
    pub gap_asymptotic: f64,
    /// `⌈log₂ n_cw⌉ H(X) / (log₂ n_cw - gap_finite)`, bits per source symbol.
    pub bound: f64,
    /// Same with `gap_asymptotic`; `None` when its denominator is not positive.
    pub asymptotic_bound: Option<f64>,
}

pub fn tunstall_rate_bound(p: &Pmf, n_cw: usize) -> Result<TunstallBound> {
    if p.support_size() != p.len() {
        return Err(Error::domain("Tunstall bound needs a strictly positive pmf"));
    }
    if n_cw < 2 {
        return Err(Error::domain(format!("need at least 2 codewords, got {n_cw}")));
    }
    let rho = 1.0 / p.p_min();
    let gap_finite = entropy_gap(n_cw, rho, Order::One, LogBase::BITS)?.gap;
    let gap_asymptotic = asymptotic_entropy_gap(rho, Order::One, LogBase::BITS);
    let log_n = (n_cw as f64).log2();
    let ceil_log_n = n_cw.next_power_of_two().trailing_zeros() as f64;
    let h = renyi_entropy(p, Order::One, LogBase::BITS);
    if log_n <= gap_finite {
        return Err(Error::Degenerate(format!(
            "log2 of {n_cw} codewords does not exceed the entropy gap {gap_finite}"
        )));
    }
    let asymptotic_bound = (log_n > gap_asymptotic).then(|| ceil_log_n * h / (log_n - gap_asymptotic));
    Ok(TunstallBound {
        rho,
        gap_finite,
        gap_asymptotic,
        bound: ceil_log_n * h / (log_n - gap_finite),
        asymptotic_bound,
    })
}
