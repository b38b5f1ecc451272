//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;
use renyi_bounds::campbell::{average_length_bracket, canonical_code, cumulant_of_lengths, is_prefix_free, kraft_sum};
use renyi_bounds::figures::{example_curves, example_moment_grid, FigureRequest};
use renyi_bounds::guess::normalized_log_moment;
use renyi_bounds::{
    asymptotic_entropy_gap, build_prefix_code, campbell_bounds, campbell_lengths, clustering_cumulant_bounds,
    entropy_gap, exhaustive_extrema, guessing_moment_bounds, huffman_aggregate, majorizes, max_entropy_envelope,
    min_entropy_aggregate, ratio_two_gap, renyi_divergence, renyi_entropy, LogBase, Order, Pmf,
};

const BITS: LogBase = LogBase::BITS;

// Tolerances and budgets, one block per criterion.
const C1_REFERENCE: f64 = 0.08607;
const C1_TOL: f64 = 1e-4;
const C1_BUDGET: Duration = Duration::from_millis(1);
const C2_TOL: f64 = 1e-10;
const C2_RATIOS: [f64; 4] = [1.1, 2.0, 10.0, 1000.0];
const C3_LARGE_ORDER: f64 = 1e6;
const C3_LARGE_ORDER_TOL: f64 = 1e-3;
const C3_NEAR_UNIT_RATIO: f64 = 1.0 + 1e-9;
const C3_NEAR_UNIT_TOL: f64 = 1e-6;
const C3_ORDER_OFFSET: f64 = 1e-4;
const C3_NEAR_ONE_TOL: f64 = 1e-6;
const C4_SLACK: f64 = 1e-9;
const C4_BUDGET: Duration = Duration::from_secs(10);
const C5_TOL: f64 = 1e-10;
const C5_BUDGET: Duration = Duration::from_secs(60);
const C6_SLACK: f64 = 1e-10;
const C7_V1: f64 = 0.08607;
const C7_BUDGET: Duration = Duration::from_secs(5);
const C7_RESOLUTION: usize = 100;
const C8_KRAFT_SLACK: f64 = 1e-12;
const C8_BOUND_SLACK: f64 = 1e-12;
const C8_CONVERSE_SLACK: f64 = 1e-10;
const C8_SMALL_ORDER: f64 = 1e-6;
const C8_MEAN_TOL: f64 = 1e-4;
const C9_SLACK: f64 = 1e-10;
const C9_SMALL_ORDER: f64 = 1e-6;
const C10_SLACK: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn order(a: f64) -> Order {
    Order::new(a).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let v = ratio_two_gap(Order::One, BITS);
    let elapsed = start.elapsed();
    let closed = (2.0 / (std::f64::consts::E * std::f64::consts::LN_2)).log2();
    let pass = (v - C1_REFERENCE).abs() <= C1_TOL && (v - closed).abs() <= 1e-14 && elapsed < C1_BUDGET;
    outcome(
        pass,
        format!("v(1) = {v:.10} bits, closed form {closed:.10}, {elapsed:?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for rho in C2_RATIOS {
        let c = asymptotic_entropy_gap(rho, order(2.0), BITS);
        let expected = ((1.0 + rho) * (1.0 + rho) / (4.0 * rho)).log2();
        worst = worst.max((c - expected).abs());
    }
    outcome(
        worst <= C2_TOL,
        format!("max |c_2 - log2((1+rho)^2/(4 rho))| = {worst:.3e} over rho in {C2_RATIOS:?}"),
    )
}

fn criterion_3() -> Outcome {
    let large = asymptotic_entropy_gap(3.0, order(C3_LARGE_ORDER), BITS);
    let large_err = (large - 3f64.log2()).abs();
    let small = asymptotic_entropy_gap(C3_NEAR_UNIT_RATIO, order(2.0), BITS)
        .max(asymptotic_entropy_gap(C3_NEAR_UNIT_RATIO, order(0.5), BITS))
        .max(asymptotic_entropy_gap(C3_NEAR_UNIT_RATIO, Order::One, BITS));
    let mut near_one = Vec::new();
    for rho in C2_RATIOS {
        let shannon = asymptotic_entropy_gap(rho, Order::One, BITS);
        let diff = [1.0 - C3_ORDER_OFFSET, 1.0 + C3_ORDER_OFFSET]
            .iter()
            .map(|&a| (asymptotic_entropy_gap(rho, order(a), BITS) - shannon).abs())
            .fold(0.0, f64::max);
        near_one.push((rho, diff));
    }
    let ok = [
        large_err <= C3_LARGE_ORDER_TOL,
        small <= C3_NEAR_UNIT_TOL,
        near_one.iter().all(|&(_, d)| d <= C3_NEAR_ONE_TOL),
    ];
    let near: Vec<String> = near_one.iter().map(|(r, d)| format!("rho={r}: {d:.2e}")).collect();
    outcome(
        ok.iter().all(|&b| b),
        format!(
            "alpha=1e6: err {large_err:.2e} [{}]; rho=1+1e-9: {small:.2e} [{}]; alpha=1±1e-4 vs Shannon form: {} [{}]",
            verdict(ok[0]),
            verdict(ok[1]),
            near.join(", "),
            verdict(ok[2])
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut checked = 0;
    for a in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for rho in [1.5, 2.0, 8.0, 256.0] {
            let limit = asymptotic_entropy_gap(rho, order(a), BITS);
            for n in [2, 4, 8, 16, 32] {
                let c_n = entropy_gap(n, rho, order(a), BITS).unwrap().gap;
                let c_2n = entropy_gap(2 * n, rho, order(a), BITS).unwrap().gap;
                let chain = [0.0, c_n, c_2n, limit, rho.log2()];
                checked += 1;
                if chain.windows(2).any(|w| w[0] > w[1] + C4_SLACK) {
                    violations.push(format!("(alpha={a}, rho={rho}, n={n}): {chain:?}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        violations.is_empty() && elapsed < C4_BUDGET,
        format!(
            "{checked} chains, {} violations {violations:?}, {elapsed:?}",
            violations.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(5);
    let orders = [order(0.5), Order::One, order(2.0), Order::Infinity];
    let mut bad = Vec::new();
    for i in 0..100 {
        let n = [5, 6, 7][i % 3];
        let m = [2, 3, 4][(i / 3) % 3];
        let p = common::random_sorted_pmf(&mut rng, n);
        let (f, _) = huffman_aggregate(&p, m).unwrap();
        let q = f.induced(&p).unwrap();
        for &alpha in &orders {
            let upper = renyi_entropy(&max_entropy_envelope(&p, m).unwrap(), alpha, BITS);
            let lower = upper - ratio_two_gap(alpha, BITS);
            let ex = exhaustive_extrema(&p, m, alpha, BITS).unwrap();
            let huff = renyi_entropy(&q, alpha, BITS);
            let min = renyi_entropy(&min_entropy_aggregate(&p, m).unwrap(), alpha, BITS);
            let inside = |h: f64| h >= lower - C5_TOL && h <= upper + C5_TOL;
            if !inside(ex.max_value) || !inside(huff) || (ex.min_value - min).abs() > C5_TOL {
                bad.push(format!("case {i} alpha={alpha}"));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < C5_BUDGET,
        format!("400 (pmf, alpha) cases, {} violations {bad:?}, {elapsed:?}", bad.len()),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = common::rng(6);
    let mut bad = Vec::new();
    for i in 0..100 {
        let n = rng.gen_range(2..=6);
        let k = rng.gen_range(1..=3);
        let rho_g = [0.5, 1.0, 2.0][i % 3];
        let p = common::random_pmf(&mut rng, n);
        let exact = normalized_log_moment(&p, rho_g, k, BITS).unwrap();
        let (lower, upper) = guessing_moment_bounds(&p, rho_g, k, BITS).unwrap();
        if exact < lower - C6_SLACK || exact > upper + C6_SLACK {
            bad.push(format!("case {i}: {lower} <= {exact} <= {upper}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!("100 instances, {} violations {bad:?}", bad.len()),
    )
}

fn criterion_7() -> Outcome {
    let long = example_curves(1000, C7_RESOLUTION).unwrap();
    let short = example_curves(100, C7_RESOLUTION).unwrap();
    let term = (1.0 + 1000.0 * 128f64.ln()).log2() + (1.0 + 1000.0 * 16f64.ln()).log2();
    let mut over = Vec::new();
    let mut not_wider = Vec::new();
    for (s, l) in short.iter().zip(&long) {
        if l.gap() >= C7_V1 + l.rho_g * term / 1000.0 {
            over.push(l.rho_g);
        }
        if s.gap() <= l.gap() {
            not_wider.push(s.rho_g);
        }
    }
    let start = Instant::now();
    let mut rows = 0;
    for id in ["4L", "4R"] {
        rows += FigureRequest::new(id, C7_RESOLUTION)
            .unwrap()
            .emit()
            .unwrap()
            .to_csv()
            .lines()
            .count();
    }
    let elapsed = start.elapsed();
    let max_gap = long.iter().map(|r| r.gap()).fold(0.0, f64::max);
    outcome(
        over.is_empty() && not_wider.is_empty() && elapsed < C7_BUDGET,
        format!(
            "{} grid points in (0, 10]; k=1000 widest gap {max_gap:.5} bits, over bound at {over:?}; k=100 not wider at {not_wider:?}; {rows} CSV lines in {elapsed:?}",
            example_moment_grid(C7_RESOLUTION).len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = common::rng(8);
    let mut kraft_bad = 0;
    let mut achieve_bad = 0;
    let mut mean_worst: f64 = 0.0;
    for i in 0..50 {
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(1..=4);
        let rho = [0.5, 1.0, 2.0][i % 3];
        let d = [2, 3][(i / 3) % 2];
        let p = common::random_pmf(&mut rng, n);
        let spec = campbell_lengths(&p, rho, k, d).unwrap();
        if spec.kraft_sum() > 1.0 + C8_KRAFT_SLACK {
            kraft_bad += 1;
        }
        let (_, achievable) = campbell_bounds(&p, rho, d, k).unwrap();
        if spec.cumulant(rho) / rho > achievable + C8_BOUND_SLACK {
            achieve_bad += 1;
        }
        for code in [&spec, &campbell_lengths(&p, C8_SMALL_ORDER, k, d).unwrap()] {
            let ratio = code.cumulant(C8_SMALL_ORDER) / C8_SMALL_ORDER;
            mean_worst = mean_worst.max((ratio - code.expected_length() / k as f64).abs());
        }
    }

    // Converse: random Kraft-feasible length tables on tiny product spaces.
    let mut converse_bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(1..=3);
        let d = rng.gen_range(2..=3);
        let rho = rng.gen_range(0.1..4.0);
        let p = common::random_pmf(&mut rng, n);
        let size = n.pow(k as u32);
        let target: Vec<f64> = (0..size).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = target.iter().sum();
        let lengths: Vec<u32> = target
            .iter()
            .map(|t| ((total / t).ln() / (d as f64).ln()).ceil().max(1.0) as u32 + rng.gen_range(0..2))
            .collect();
        assert!(kraft_sum(&lengths, d) <= 1.0 + 1e-12);
        let lambda = cumulant_of_lengths(&p, k, &lengths, rho, d).unwrap();
        let (converse, _) = campbell_bounds(&p, rho, d, k).unwrap();
        if lambda / rho < converse - C8_CONVERSE_SLACK {
            converse_bad += 1;
        }
    }
    outcome(
        kraft_bad == 0 && achieve_bad == 0 && converse_bad == 0 && mean_worst <= C8_MEAN_TOL,
        format!(
            "Kraft violations {kraft_bad}/50, achievability violations {achieve_bad}/50, converse violations {converse_bad}/1000, max |Lambda/rho - E[l]/k| at rho=1e-6: {mean_worst:.2e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let (n, m, k, d, rho) = (6, 3, 3, 2, 1.0);
    let mut rng = common::rng(9);
    let mut lambda_bad = Vec::new();
    let mut avg_bad = Vec::new();
    let mut avg_bad_with_block = 0;
    let cases = 100;
    for i in 0..cases {
        let p = common::random_sorted_pmf(&mut rng, n);
        let (f, _) = huffman_aggregate(&p, m).unwrap();
        let q = f.induced(&p).unwrap();

        let x_code = campbell_lengths(&p, rho, k, d).unwrap();
        let y_code = campbell_lengths(&q, rho, k, d).unwrap();
        let diff = x_code.cumulant(rho) - y_code.cumulant(rho);
        let (lower, upper) = clustering_cumulant_bounds(&p, m, rho, d, k).unwrap();
        if diff < lower - C9_SLACK || diff > upper + C9_SLACK {
            lambda_bad.push(format!("case {i}: {lower:.5} <= {diff:.5} <= {upper:.5}"));
        }

        let x_avg = campbell_lengths(&p, C9_SMALL_ORDER, k, d).unwrap();
        let y_avg = campbell_lengths(&q, C9_SMALL_ORDER, k, d).unwrap();
        let mean_diff = (x_avg.expected_length() - y_avg.expected_length()) / k as f64;
        let bracket = average_length_bracket(&p, m, d, k).unwrap();
        if mean_diff < bracket.lower - C9_SLACK || mean_diff > bracket.upper + C9_SLACK {
            avg_bad.push(format!(
                "case {i}: {:.5} <= {mean_diff:.5} <= {:.5}",
                bracket.lower, bracket.upper
            ));
        }
        if mean_diff < bracket.lower - C9_SLACK || mean_diff > bracket.upper_with_block_term + C9_SLACK {
            avg_bad_with_block += 1;
        }
    }
    outcome(
        lambda_bad.is_empty() && avg_bad.is_empty(),
        format!(
            "{cases} pmfs (n={n}, m={m}, k={k}, D={d}): cumulant-difference violations {} {lambda_bad:?}; average-length bracket violations {} {avg_bad:?} (with the +1/k block term on the upper end: {avg_bad_with_block})",
            lambda_bad.len(),
            avg_bad.len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = common::rng(10);
    let orders = [order(0.25), order(0.5), Order::One, order(2.0), Order::Infinity];

    let mut schur_bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=8);
        let p = common::random_pmf(&mut rng, n);
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let lambda: f64 = rng.gen_range(0.0..1.0);
        let mut w = p.masses().to_vec();
        let (a, b) = (w[i], w[j]);
        w[i] = lambda * a + (1.0 - lambda) * b;
        w[j] = lambda * b + (1.0 - lambda) * a;
        let smoothed = Pmf::from_weights(&w).unwrap();
        if !majorizes(&p, &smoothed) {
            schur_bad += 1;
            continue;
        }
        for &alpha in &orders {
            if renyi_entropy(&smoothed, alpha, BITS) < renyi_entropy(&p, alpha, BITS) - C10_SLACK {
                schur_bad += 1;
            }
        }
    }

    let mut identity_bad = 0;
    let mut monotone_bad = 0;
    let mut additive_bad = 0;
    let grid = [
        Order::Zero,
        order(0.25),
        order(0.5),
        order(0.9999),
        Order::One,
        order(1.0001),
        order(2.0),
        order(5.0),
        Order::Infinity,
    ];
    for _ in 0..500 {
        let n = rng.gen_range(2..=8);
        let p = common::random_pmf(&mut rng, n);
        let u = Pmf::uniform(n).unwrap();
        for &alpha in &orders {
            let d = renyi_divergence(&p, &u, alpha, BITS);
            if (d - ((n as f64).log2() - renyi_entropy(&p, alpha, BITS))).abs() > C10_SLACK {
                identity_bad += 1;
            }
        }
        let values: Vec<f64> = grid.iter().map(|&a| renyi_entropy(&p, a, BITS)).collect();
        if values.windows(2).any(|w| w[1] > w[0] + C10_SLACK) {
            monotone_bad += 1;
        }
        let m = rng.gen_range(2..=5);
        let q = common::random_pmf(&mut rng, m);
        for &alpha in &orders {
            let joint = renyi_entropy(&p.product(&q), alpha, BITS);
            let sum = renyi_entropy(&p, alpha, BITS) + renyi_entropy(&q, alpha, BITS);
            if (joint - sum).abs() > C10_SLACK {
                additive_bad += 1;
            }
        }
    }

    let mut prefix_bad = 0;
    let mut codes = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(1..=3);
        let d = rng.gen_range(2..=3);
        let p = common::random_pmf(&mut rng, n);
        let spec = campbell_lengths(&p, rng.gen_range(0.1..3.0), k, d).unwrap();
        let words: Vec<Vec<u8>> = build_prefix_code(&spec)
            .unwrap()
            .into_iter()
            .map(|c| c.digits)
            .collect();
        codes += 1;
        if !is_prefix_free(&words) {
            prefix_bad += 1;
        }
    }
    for _ in 0..500 {
        let d = rng.gen_range(2..=4);
        let count = rng.gen_range(1..=40);
        let lengths: Vec<u32> = (0..count).map(|_| rng.gen_range(1..=8)).collect();
        if kraft_sum(&lengths, d) > 1.0 {
            continue;
        }
        codes += 1;
        if !is_prefix_free(&canonical_code(&lengths, d).unwrap()) {
            prefix_bad += 1;
        }
    }

    let total = schur_bad + identity_bad + monotone_bad + additive_bad + prefix_bad;
    outcome(
        total == 0,
        format!(
            "Schur {schur_bad}/1000x5, divergence identity {identity_bad}/500x5, monotone in alpha {monotone_bad}/500, additivity {additive_bad}/500x5, prefix-free {prefix_bad}/{codes} codes"
        ),
    )
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "ok"
    } else {
        "violated"
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("v(1) matches the Shannon closed form", criterion_1),
        ("order-2 closed form", criterion_2),
        ("limits in alpha and rho", criterion_3),
        ("finite-n monotonicity chain", criterion_4),
        ("aggregation entropy sandwich", criterion_5),
        ("guessing-moment oracle sandwich", criterion_6),
        ("geometric clustering example", criterion_7),
        ("cumulant code construction", criterion_8),
        ("clustered-code end-to-end bounds", criterion_9),
        ("property suite", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let result = run();
        println!(
            "criterion {:>2} {} {title}: {}",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
        if !result.pass {
            failed.push(i + 1);
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
