//! Figure data as deterministic CSV tables, plus the geometric-source
//! clustering example. Figure values are in bits.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::aggregate::max_entropy_envelope;
use crate::error::{Error, Result};
use crate::extremal::{asymptotic_entropy_gap, entropy_gap};
use crate::guess::{clustering_gain_bounds, GuessBoundReport};
use crate::pmf::Pmf;
use crate::renyi::{LogBase, Order};

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Real(v) if v.is_infinite() => out.push_str(if *v > 0.0 { "inf" } else { "-inf" }),
            Cell::Real(v) => write!(out, "{v:.16e}").unwrap(),
            Cell::Text(s) => out.push_str(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Real(v) => Some(*v),
            Cell::Text(s) if s == "inf" => Some(f64::INFINITY),
            Cell::Text(_) => None,
        }
    }
}

impl From<Order> for Cell {
    fn from(alpha: Order) -> Self {
        match alpha {
            Order::Infinity => Cell::Text("inf".into()),
            other => Cell::Real(other.value()),
        }
    }
}

/// A header plus rows, rendered with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        let mut field = String::new();
        for row in &self.rows {
            let record: Vec<String> = row
                .iter()
                .map(|cell| {
                    field.clear();
                    cell.render(&mut field);
                    field.clone()
                })
                .collect();
            writer.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

/// `steps` points from `lo` to `hi`, evenly spaced in the logarithm.
pub fn log_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..steps)
        .map(|i| match i {
            0 => lo,
            _ if i == steps - 1 => hi,
            _ => (a + (b - a) * i as f64 / (steps - 1) as f64).exp(),
        })
        .collect()
}

/// `steps` evenly spaced points from `lo` to `hi`.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Figure identifier plus grid resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureRequest {
    pub id: String,
    pub resolution: usize,
}

impl FigureRequest {
    pub fn new(id: &str, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::domain(format!(
                "grid resolution must be at least 2, got {resolution}"
            )));
        }
        figure(id)?;
        Ok(Self {
            id: id.to_string(),
            resolution,
        })
    }

    pub fn emit(&self) -> Result<Table> {
        figure(&self.id)?.emit(self.resolution)
    }
}

/// Produces the data table behind one figure.
pub trait FigureEmitter: Send + Sync {
    fn id(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn emit(&self, resolution: usize) -> Result<Table>;
}

pub const FIGURE1_ORDERS: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, f64::INFINITY];
pub const FIGURE2_RATIOS: [f64; 2] = [2.0, 256.0];
pub const FIGURE3_SIZES: [usize; 4] = [8, 32, 128, 512];

/// Asymptotic entropy gap against the mass ratio for several orders.
pub struct AsymptoticGapFigure;

impl FigureEmitter for AsymptoticGapFigure {
    fn id(&self) -> &'static str {
        "1"
    }
    fn describe(&self) -> &'static str {
        "asymptotic gap vs rho in [1, 1e3] for alpha in {0.25, 0.5, 1, 2, 4, inf}"
    }
    fn emit(&self, resolution: usize) -> Result<Table> {
        let rhos = log_grid(1.0, 1e3, resolution);
        let mut table = Table::new(&["rho", "alpha", "c_inf"]);
        for a in FIGURE1_ORDERS {
            let alpha = Order::new(a)?;
            for &rho in &rhos {
                let c = asymptotic_entropy_gap(rho, alpha, LogBase::BITS);
                table.rows.push(vec![Cell::Real(rho), alpha.into(), Cell::Real(c)]);
            }
        }
        Ok(table)
    }
}

/// Finite-n gap against the order for two mass ratios.
pub struct FiniteGapFigure;

/// `n = 2, 4, ..., 2048` followed by the limit.
pub fn figure2_sizes() -> Vec<Option<usize>> {
    (1..=11)
        .map(|e| Some(1usize << e))
        .chain(std::iter::once(None))
        .collect()
}

impl FigureEmitter for FiniteGapFigure {
    fn id(&self) -> &'static str {
        "2"
    }
    fn describe(&self) -> &'static str {
        "gap vs alpha in [0.05, 20] for rho in {2, 256}, n = 2..2048 and the limit"
    }
    fn emit(&self, resolution: usize) -> Result<Table> {
        let alphas = log_grid(0.05, 20.0, resolution);
        let mut cells: Vec<(f64, Option<usize>, f64)> = Vec::new();
        for rho in FIGURE2_RATIOS {
            for n in figure2_sizes() {
                cells.extend(alphas.iter().map(|&a| (rho, n, a)));
            }
        }
        let values = cells
            .par_iter()
            .map(|&(rho, n, a)| {
                let alpha = Order::new(a)?;
                match n {
                    Some(n) => Ok(entropy_gap(n, rho, alpha, LogBase::BITS)?.gap),
                    None => Ok(asymptotic_entropy_gap(rho, alpha, LogBase::BITS)),
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut table = Table::new(&["rho", "alpha", "n", "c"]);
        for (&(rho, n, a), c) in cells.iter().zip(values) {
            let n = n.map_or(Cell::Text("inf".into()), |n| Cell::Int(n as i64));
            table.rows.push(vec![Cell::Real(rho), Cell::Real(a), n, Cell::Real(c)]);
        }
        Ok(table)
    }
}

/// Finite-n Shannon gap against its limit over a wide ratio range.
pub struct ShannonGapFigure;

impl FigureEmitter for ShannonGapFigure {
    fn id(&self) -> &'static str {
        "3"
    }
    fn describe(&self) -> &'static str {
        "Shannon gap for n in {8, 32, 128, 512} and its limit vs rho in [1, 1e5]"
    }
    fn emit(&self, resolution: usize) -> Result<Table> {
        let rhos = log_grid(1.0, 1e5, resolution);
        let cells: Vec<(f64, usize)> = FIGURE3_SIZES
            .iter()
            .flat_map(|&n| rhos.iter().map(move |&rho| (rho, n)))
            .collect();
        let values = cells
            .par_iter()
            .map(|&(rho, n)| entropy_gap(n, rho, Order::One, LogBase::BITS).map(|g| g.gap))
            .collect::<Result<Vec<f64>>>()?;
        let mut table = Table::new(&["rho", "n", "c1_n", "c1_inf"]);
        for (&(rho, n), c) in cells.iter().zip(values) {
            let limit = asymptotic_entropy_gap(rho, Order::One, LogBase::BITS);
            table.rows.push(vec![
                Cell::Real(rho),
                Cell::Int(n as i64),
                Cell::Real(c),
                Cell::Real(limit),
            ]);
        }
        Ok(table)
    }
}

/// Parameters of the geometric clustering example.
pub const EXAMPLE_RATIO: f64 = 24.0 / 25.0;
pub const EXAMPLE_SIZE: usize = 128;
pub const EXAMPLE_CLUSTERS: usize = 16;

pub fn example_source() -> Result<Pmf> {
    Pmf::geometric(EXAMPLE_RATIO, EXAMPLE_SIZE)
}

/// `rho_g = 10 i / resolution`, `i = 1..=resolution`.
pub fn example_moment_grid(resolution: usize) -> Vec<f64> {
    (1..=resolution).map(|i| 10.0 * i as f64 / resolution as f64).collect()
}

/// Guessing-moment reduction bounds (bits) for the geometric example.
pub fn example_curves(k: usize, resolution: usize) -> Result<Vec<GuessBoundReport>> {
    let p = example_source()?;
    max_entropy_envelope(&p, EXAMPLE_CLUSTERS)?;
    example_moment_grid(resolution)
        .par_iter()
        .map(|&rho_g| clustering_gain_bounds(&p, EXAMPLE_CLUSTERS, rho_g, k, LogBase::BITS))
        .collect()
}

/// Guessing bounds for the geometric example at one block length.
pub struct ClusteringGuessFigure {
    pub id: &'static str,
    pub k: usize,
}

impl FigureEmitter for ClusteringGuessFigure {
    fn id(&self) -> &'static str {
        self.id
    }
    fn describe(&self) -> &'static str {
        if self.k == 100 {
            "guessing-moment reduction bounds, geometric(24/25, 128) into 16 clusters, k = 100"
        } else {
            "guessing-moment reduction bounds, geometric(24/25, 128) into 16 clusters, k = 1000"
        }
    }
    fn emit(&self, resolution: usize) -> Result<Table> {
        let mut table = Table::new(&["rho_g", "lower_bits", "upper_bits"]);
        for r in example_curves(self.k, resolution)? {
            table
                .rows
                .push(vec![Cell::Real(r.rho_g), Cell::Real(r.lower), Cell::Real(r.upper)]);
        }
        Ok(table)
    }
}

/// Every registered figure, in a stable order.
pub fn figures() -> Vec<Box<dyn FigureEmitter>> {
    vec![
        Box::new(AsymptoticGapFigure),
        Box::new(FiniteGapFigure),
        Box::new(ShannonGapFigure),
        Box::new(ClusteringGuessFigure { id: "4L", k: 100 }),
        Box::new(ClusteringGuessFigure { id: "4R", k: 1000 }),
    ]
}

pub fn figure(id: &str) -> Result<Box<dyn FigureEmitter>> {
    figures()
        .into_iter()
        .find(|f| f.id().eq_ignore_ascii_case(id))
        .ok_or_else(|| {
            let known: Vec<&str> = figures().iter().map(|f| f.id()).collect();
            Error::Parse(format!("unknown figure {id:?}; known: {}", known.join(", ")))
        })
}

/// Both bound curves of the geometric example and their widest gaps.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Example1Report {
    pub short_block: Vec<GuessBoundReport>,
    pub long_block: Vec<GuessBoundReport>,
    pub max_gap_short: f64,
    pub max_gap_long: f64,
}

pub fn run_example1(resolution: usize) -> Result<Example1Report> {
    let short_block = example_curves(100, resolution)?;
    let long_block = example_curves(1000, resolution)?;
    let widest = |rs: &[GuessBoundReport]| rs.iter().map(GuessBoundReport::gap).fold(0.0, f64::max);
    Ok(Example1Report {
        max_gap_short: widest(&short_block),
        max_gap_long: widest(&long_block),
        short_block,
        long_block,
    })
}
