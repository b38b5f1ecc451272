use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use renyi_bounds::campbell::{average_length_bracket, build_prefix_code, code_to_json};
use renyi_bounds::figures::{linear_grid, log_grid, run_example1, Cell, FigureRequest, Table};
use renyi_bounds::{
    asymptotic_entropy_gap, campbell_bounds, campbell_lengths, clustering_cumulant_bounds, clustering_gain_bounds,
    entropy_gap, entropy_range, exhaustive_extrema, huffman_aggregate, renyi_divergence, renyi_entropy, strategy,
    tunstall_rate_bound, Error, LogBase, Order, Pmf,
};
use serde_json::{json, Value};

/// Rényi-entropy bounds under mass-ratio constraints, with clustering,
/// guessing and source-coding applications.
#[derive(Parser)]
#[command(name = "renyi-bounds", version)]
struct Cli {
    /// Logarithm base for reported values: a number > 1, or `e`.
    #[arg(long, global = true, default_value = "2", value_parser = parse_base)]
    base: LogBase,

    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for grid evaluations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rényi entropy of a pmf, optionally with the divergence from another.
    Entropy(EntropyArgs),
    /// Largest entropy gap below log n over pmfs with mass ratio <= rho.
    Cgap(CgapArgs),
    /// Entropy range of aggregations onto m symbols and a chosen aggregation.
    Aggregate(AggregateArgs),
    /// Bounds on the guessing-moment reduction from clustering.
    GuessBounds(GuessArgs),
    /// Cumulant-optimal block code lengths and their bounds.
    Campbell(CampbellArgs),
    /// Compression-rate bound for Tunstall codes.
    TunstallBound(TunstallArgs),
    /// Emit the CSV data behind a figure.
    Figure(FigureArgs),
    /// Geometric-source clustering example: bound curves and widest gaps.
    Example1(Example1Args),
}

#[derive(Args)]
struct EntropyArgs {
    /// `uniform(n)`, `geometric(a,n)`, a comma list, or a JSON file.
    #[arg(long)]
    pmf: String,
    /// Order: a non-negative real or `inf`.
    #[arg(long, default_value = "1")]
    alpha: Order,
    /// Also report the divergence of `--pmf` from this pmf.
    #[arg(long)]
    divergence_from: Option<String>,
}

#[derive(Args)]
struct CgapArgs {
    /// Support size, or `inf` for the limit.
    #[arg(long)]
    n: String,
    #[arg(long, default_value = "2")]
    rho: f64,
    #[arg(long, default_value = "1")]
    alpha: Order,
    /// Sweep rho over `lo:hi:steps[:log]`.
    #[arg(long)]
    sweep_rho: Option<String>,
    /// Sweep alpha over `lo:hi:steps[:log]`.
    #[arg(long)]
    sweep_alpha: Option<String>,
    /// Write rows to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct AggregateArgs {
    /// Source pmf, sorted non-increasing.
    #[arg(long)]
    pmf: String,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value = "1")]
    alpha: Order,
    /// Evaluate the range over `lo:hi:steps[:log]` orders instead of one.
    #[arg(long)]
    alpha_sweep: Option<String>,
    /// `huffman`, `min-entropy` or `exhaustive-max`.
    #[arg(long, default_value = "huffman")]
    strategy: String,
    /// Also run the brute-force oracle (small instances only).
    #[arg(long)]
    exhaustive: bool,
    /// Write the chosen map as `{"f": [...]}`.
    #[arg(long)]
    emit_map: Option<PathBuf>,
}

#[derive(Args)]
struct GuessArgs {
    #[arg(long)]
    pmf: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    /// Single moment order.
    #[arg(long, default_value = "1")]
    rho: f64,
    /// Moment orders `lo:hi:steps[:log]`.
    #[arg(long)]
    rho_sweep: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CampbellArgs {
    #[arg(long)]
    pmf: String,
    /// Cumulant order.
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    k: usize,
    /// Code alphabet size.
    #[arg(long = "D", default_value = "2")]
    d: usize,
    /// Also bound the change from clustering into this many symbols.
    #[arg(long)]
    m: Option<usize>,
    /// Write the materialized prefix code as JSON.
    #[arg(long)]
    emit_code: Option<PathBuf>,
    /// Write per-type-class lengths as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct TunstallArgs {
    #[arg(long)]
    pmf: String,
    #[arg(long)]
    codewords: usize,
}

#[derive(Args)]
struct FigureArgs {
    /// 1, 2, 3, 4L or 4R.
    #[arg(long)]
    id: String,
    #[arg(long, default_value = "100")]
    resolution: usize,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Example1Args {
    #[arg(long, default_value = "100")]
    resolution: usize,
}

fn parse_base(s: &str) -> Result<LogBase, String> {
    let b = if s.eq_ignore_ascii_case("e") {
        std::f64::consts::E
    } else {
        s.parse::<f64>().map_err(|e| e.to_string())?
    };
    LogBase::new(b).map_err(|e| e.to_string())
}

/// `lo:hi:steps` (linear) or `lo:hi:steps:log`.
fn parse_range(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Parse(format!("expected lo:hi:steps[:log], got {s:?}"));
    if parts.len() != 3 && parts.len() != 4 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if steps == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    match parts.get(3).map(|t| t.trim()) {
        None | Some("lin") => Ok(linear_grid(lo, hi, steps)),
        Some("log") if lo > 0.0 && hi > 0.0 => Ok(log_grid(lo, hi, steps)),
        _ => Err(bad()),
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit(json: bool, value: Value, text: String) {
    if json {
        println!("{}", serde_json::to_string_pretty(&value).expect("json value"));
    } else {
        print!("{text}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let category = err.downcast_ref::<Error>().map_or("io", Error::category);
            if json {
                eprintln!(
                    "{}",
                    json!({ "error": { "category": category, "message": format!("{err:#}") } })
                );
            } else {
                eprintln!("error[{category}]: {err:#}");
            }
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring thread pool")?;
    }
    let (base, json) = (cli.base, cli.json);
    match cli.command {
        Command::Entropy(a) => entropy(a, base, json),
        Command::Cgap(a) => cgap(a, base, json),
        Command::Aggregate(a) => aggregate(a, base, json),
        Command::GuessBounds(a) => guess_bounds(a, base, json),
        Command::Campbell(a) => campbell(a, json),
        Command::TunstallBound(a) => tunstall(a, json),
        Command::Figure(a) => figure(a, json),
        Command::Example1(a) => example1(a, json),
    }
}

fn entropy(a: EntropyArgs, base: LogBase, json: bool) -> anyhow::Result<()> {
    let p = Pmf::parse_spec(&a.pmf)?;
    let h = renyi_entropy(&p, a.alpha, base);
    let mut value = json!({ "alpha": a.alpha.to_string(), "base": base.base(), "entropy": h });
    let mut text = format!("H_{}(P) = {h:.12}\n", a.alpha);
    if let Some(q) = &a.divergence_from {
        let q = Pmf::parse_spec(q)?;
        let d = renyi_divergence(&p, &q, a.alpha, base);
        value["divergence"] = json!(if d.is_finite() { json!(d) } else { json!("inf") });
        text.push_str(&format!("D_{}(P||Q) = {d:.12}\n", a.alpha));
    }
    emit(json, value, text);
    Ok(())
}

fn cgap(a: CgapArgs, base: LogBase, json: bool) -> anyhow::Result<()> {
    let n: Option<usize> = match a.n.trim() {
        "inf" | "infinity" => None,
        s => Some(
            s.parse()
                .map_err(|_| Error::Parse(format!("n must be a positive integer or inf, got {s:?}")))?,
        ),
    };
    if let Some(n) = n {
        if n > 100_000 {
            eprintln!("warning: n = {n} makes the finite search slow; `--n inf` gives the limit in closed form");
        }
    }
    let rhos = a
        .sweep_rho
        .as_deref()
        .map(parse_range)
        .transpose()?
        .unwrap_or_else(|| vec![a.rho]);
    let alphas = match a.sweep_alpha.as_deref() {
        Some(r) => parse_range(r)?
            .into_iter()
            .map(Order::new)
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![a.alpha],
    };
    let cells: Vec<(Order, f64)> = alphas
        .iter()
        .flat_map(|&al| rhos.iter().map(move |&r| (al, r)))
        .collect();
    use rayon::prelude::*;
    let rows = cells
        .par_iter()
        .map(|&(alpha, rho)| match n {
            Some(n) => entropy_gap(n, rho, alpha, base).map(|g| (alpha, rho, g.gap, Some(g.beta_star))),
            None => Ok((alpha, rho, asymptotic_entropy_gap(rho, alpha, base), None)),
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut table = Table::new(&["alpha", "rho", "n", "gap", "beta_star"]);
    let n_cell = || n.map_or(Cell::Text("inf".into()), |n| Cell::Int(n as i64));
    let mut text = String::new();
    let mut values = Vec::new();
    for &(alpha, rho, gap, beta) in &rows {
        table.rows.push(vec![
            alpha.into(),
            Cell::Real(rho),
            n_cell(),
            Cell::Real(gap),
            beta.map_or(Cell::Text(String::new()), Cell::Real),
        ]);
        text.push_str(&format!("alpha={alpha} rho={rho} n={} gap={gap:.12}\n", a.n));
        values.push(json!({ "alpha": alpha.to_string(), "rho": rho, "n": a.n, "gap": gap, "beta_star": beta }));
    }
    if let Some(path) = &a.csv {
        write_file(path, &table.to_csv())?;
    }
    emit(json, json!(values), text);
    Ok(())
}

fn aggregate(a: AggregateArgs, base: LogBase, json: bool) -> anyhow::Result<()> {
    let p = Pmf::parse_spec(&a.pmf)?;
    let alphas = match a.alpha_sweep.as_deref() {
        Some(r) => parse_range(r)?
            .into_iter()
            .map(Order::new)
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![a.alpha],
    };
    let chosen = strategy(&a.strategy)?;
    let f = chosen.aggregate(&p, a.m, alphas[0])?;
    let q = f.induced(&p)?;
    let (_, trace) = huffman_aggregate(&p, a.m)?;

    let mut text = format!("strategy {} map {}\n", chosen.name(), f.to_json());
    let mut rows = Vec::new();
    for &alpha in &alphas {
        let range = entropy_range(&p, a.m, alpha, base)?;
        let achieved = renyi_entropy(&q, alpha, base);
        let mut row = json!({
            "alpha": alpha.to_string(),
            "lower": range.lower,
            "upper": range.upper,
            "min_value": range.min_value,
            "achieved": achieved,
        });
        text.push_str(&format!(
            "alpha={alpha} max in [{:.12}, {:.12}] min={:.12} {}={achieved:.12}\n",
            range.lower,
            range.upper,
            range.min_value,
            chosen.name()
        ));
        if a.exhaustive {
            let ex = exhaustive_extrema(&p, a.m, alpha, base)?;
            row["exhaustive_max"] = json!(ex.max_value);
            row["exhaustive_min"] = json!(ex.min_value);
            text.push_str(&format!(
                "  exhaustive max={:.12} min={:.12}\n",
                ex.max_value, ex.min_value
            ));
        }
        rows.push(row);
    }
    if let Some(path) = &a.emit_map {
        write_file(path, &f.to_json())?;
    }
    let value = json!({
        "strategy": chosen.name(),
        "f": f.map().iter().map(|j| j + 1).collect::<Vec<_>>(),
        "output": q.masses(),
        "huffman_prefix_index": trace.prefix_index,
        "ranges": rows,
    });
    emit(json, value, text);
    Ok(())
}

fn guess_bounds(a: GuessArgs, base: LogBase, json: bool) -> anyhow::Result<()> {
    let p = Pmf::parse_spec(&a.pmf)?;
    let rhos = a
        .rho_sweep
        .as_deref()
        .map(parse_range)
        .transpose()?
        .unwrap_or_else(|| vec![a.rho]);
    use rayon::prelude::*;
    let reports = rhos
        .par_iter()
        .map(|&r| clustering_gain_bounds(&p, a.m, r, a.k, base))
        .collect::<Result<Vec<_>, Error>>()?;
    let units = if base == LogBase::BITS { "bits" } else { "units" };
    let lower_col = format!("lower_{units}");
    let upper_col = format!("upper_{units}");
    let mut table = Table::new(&["rho_g", &lower_col, &upper_col]);
    let mut text = String::new();
    for r in &reports {
        table
            .rows
            .push(vec![Cell::Real(r.rho_g), Cell::Real(r.lower), Cell::Real(r.upper)]);
        text.push_str(&format!(
            "rho_g={} lower={:.12} upper={:.12}\n",
            r.rho_g, r.lower, r.upper
        ));
    }
    if let Some(path) = &a.csv {
        write_file(path, &table.to_csv())?;
    }
    emit(json, serde_json::to_value(&reports)?, text);
    Ok(())
}

fn campbell(a: CampbellArgs, json: bool) -> anyhow::Result<()> {
    let p = Pmf::parse_spec(&a.pmf)?;
    let spec = campbell_lengths(&p, a.rho, a.k, a.d)?;
    let lambda = spec.cumulant(a.rho);
    let (converse, achievability) = campbell_bounds(&p, a.rho, a.d, a.k)?;
    let mut value = json!({
        "rho": a.rho,
        "k": a.k,
        "D": a.d,
        "type_classes": spec.classes.len(),
        "kraft_sum": spec.kraft_sum(),
        "lambda": lambda,
        "lambda_over_rho": lambda / a.rho,
        "mean_length_per_symbol": spec.expected_length() / a.k as f64,
        "converse": converse,
        "achievability": achievability,
    });
    let mut text = format!(
        "Lambda/rho = {:.12} in [{converse:.12}, {achievability:.12}], Kraft sum {:.12}, E[l]/k = {:.12}\n",
        lambda / a.rho,
        spec.kraft_sum(),
        spec.expected_length() / a.k as f64
    );
    if let Some(m) = a.m {
        let (lower, upper) = clustering_cumulant_bounds(&p, m, a.rho, a.d, a.k)?;
        let avg = average_length_bracket(&p, m, a.d, a.k)?;
        value["clustering"] = json!({ "lower": lower, "upper": upper, "average_length": avg });
        text.push_str(&format!(
            "clustering into {m}: Lambda difference in [{lower:.12}, {upper:.12}]\n"
        ));
    }
    if let Some(path) = &a.csv {
        let mut table = Table::new(&["counts", "log_prob", "log_count", "length"]);
        for c in &spec.classes {
            let counts: Vec<String> = c.counts.iter().map(usize::to_string).collect();
            table.rows.push(vec![
                Cell::Text(counts.join(" ")),
                Cell::Real(c.log_prob),
                Cell::Real(c.log_count),
                Cell::Int(c.length as i64),
            ]);
        }
        write_file(path, &table.to_csv())?;
    }
    if let Some(path) = &a.emit_code {
        let code = build_prefix_code(&spec)?;
        write_file(path, &code_to_json(&code, a.d)?)?;
    }
    emit(json, value, text);
    Ok(())
}

fn tunstall(a: TunstallArgs, json: bool) -> anyhow::Result<()> {
    let p = Pmf::parse_spec(&a.pmf)?;
    let b = tunstall_rate_bound(&p, a.codewords)?;
    let text = format!(
        "rate <= {:.12} bits/symbol (gap {:.12}); with the limiting gap: {}\n",
        b.bound,
        b.gap_finite,
        b.asymptotic_bound
            .map_or("undefined".to_string(), |v| format!("{v:.12}"))
    );
    emit(json, serde_json::to_value(b)?, text);
    Ok(())
}

fn figure(a: FigureArgs, json: bool) -> anyhow::Result<()> {
    let table = FigureRequest::new(&a.id, a.resolution)?.emit()?;
    let csv = table.to_csv();
    match &a.out {
        Some(path) => {
            write_file(path, &csv)?;
            emit(
                json,
                json!({ "figure": a.id, "rows": table.rows.len(), "path": path }),
                format!("wrote {} rows to {}\n", table.rows.len(), path.display()),
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn example1(a: Example1Args, json: bool) -> anyhow::Result<()> {
    if a.resolution < 1 {
        return Err(anyhow!(Error::Domain("resolution must be positive".into())));
    }
    let report = run_example1(a.resolution)?;
    let mut text = String::from("rho_g,lower_k100,upper_k100,lower_k1000,upper_k1000\n");
    for (s, l) in report.short_block.iter().zip(&report.long_block) {
        text.push_str(&format!(
            "{:.4},{:.6},{:.6},{:.6},{:.6}\n",
            s.rho_g, s.lower, s.upper, l.lower, l.upper
        ));
    }
    text.push_str(&format!(
        "widest gap: k=100 {:.6} bits, k=1000 {:.6} bits\n",
        report.max_gap_short, report.max_gap_long
    ));
    emit(json, serde_json::to_value(&report)?, text);
    Ok(())
}
