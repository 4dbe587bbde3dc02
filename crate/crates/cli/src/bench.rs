//! The benchmark suite: regenerate each dataset shape under several seeds,
//! score it with k-NS and LOF, and tabulate accuracy and runtime.

use std::io::Write;
use std::time::Instant;

use kns_core::dataset::generate_synthetic;
use kns_core::eval::{label_map, pr_curve, PrCurve};
use kns_core::kns::Execution;
use kns_core::{detect, DistanceMatrix, GeneratorSpec, KnsParams, LofParams, PointId};

use crate::args::BenchArgs;
use crate::commands::{create, echo_head, push, write_echo, Echo};
use crate::{CliError, CliResult};

/// (m, n) for each benchmark dataset, numbered from 1.
pub const BENCH_SHAPES: [(usize, usize); 8] = [
    (10, 500),
    (100, 500),
    (100, 1000),
    (500, 500),
    (500, 1000),
    (1000, 500),
    (1000, 1000),
    (10000, 1000),
];

const OUTLIERS: usize = 10;

/// Parses `2`, `1-8`, or `1,2,6` (and mixtures) into dataset numbers.
pub fn parse_datasets(text: &str, max: usize) -> CliResult<Vec<usize>> {
    let bad = || {
        CliError::usage(format!(
            "bad --datasets {text:?}; expected e.g. 2, 1-8, or 1,2,6 within 1..={max}"
        ))
    };
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
            None => {
                let v: usize = part.parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        if lo == 0 || hi > max || lo > hi {
            return Err(bad());
        }
        for d in lo..=hi {
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

struct Run {
    dataset: usize,
    seed: u64,
    method: &'static str,
    param: String,
    seconds: f64,
    curve: PrCurve,
}

fn ids_by_rank(ids: &[PointId], order: Vec<usize>) -> Vec<PointId> {
    order.into_iter().map(|i| ids[i]).collect()
}

pub fn run(a: &BenchArgs) -> CliResult<()> {
    if a.suite != "table3" {
        return Err(CliError::usage(format!(
            "unknown --suite {:?}; only table3 exists",
            a.suite
        )));
    }
    if a.seeds == 0 || a.lof_k.is_empty() {
        return Err(CliError::usage("--seeds and --lof-k must be non-empty"));
    }
    let datasets = parse_datasets(&a.datasets, BENCH_SHAPES.len())?;
    std::fs::create_dir_all(&a.output)?;

    let mut runs = Vec::new();
    for &d in &datasets {
        let (m, n) = BENCH_SHAPES[d - 1];
        for seed in a.first_seed..a.first_seed + a.seeds {
            let data =
                generate_synthetic::<f64>(&GeneratorSpec::table_row(m, n, OUTLIERS, seed))?.dataset;
            let ids = data.point_ids();
            let labels = label_map(ids, data.labels().expect("generator labels every point"));

            let params = KnsParams {
                k: a.k,
                rounds: a.rounds,
                score_mode: a.mode.into(),
                seed,
                execution: if a.deterministic {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
                ..KnsParams::default()
            };
            let report = detect(&data, &params)?;
            let curve = pr_curve(&ids_by_rank(ids, report.ranking()), &labels)?;
            eprintln!(
                "dataset {d} (m={m}, n={n}) seed {seed}: kns max_f={:.3}",
                curve.max_f
            );
            runs.push(Run {
                dataset: d,
                seed,
                method: "kns",
                param: format!("{}:{}", report.strategy.as_str(), report.scn),
                seconds: report.seconds,
                curve,
            });

            let started = Instant::now();
            let distances = DistanceMatrix::euclidean(&data);
            let matrix_seconds = started.elapsed().as_secs_f64();
            let mut best: Option<(usize, f64, PrCurve)> = None;
            for &k_nn in &a.lof_k {
                let lof = distances.lof(&LofParams { k_nn })?;
                let curve = pr_curve(&ids_by_rank(ids, lof.ranking()), &labels)?;
                if best.as_ref().is_none_or(|b| curve.max_f > b.2.max_f) {
                    best = Some((k_nn, lof.seconds, curve));
                }
            }
            let (k_nn, lof_seconds, curve) = best.expect("lof_k is non-empty");
            eprintln!(
                "dataset {d} (m={m}, n={n}) seed {seed}: lof max_f={:.3} (k={k_nn})",
                curve.max_f
            );
            runs.push(Run {
                dataset: d,
                seed,
                method: "lof",
                param: format!("k={k_nn}"),
                seconds: matrix_seconds + lof_seconds,
                curve,
            });
        }
    }

    let mut echo = echo_head("bench");
    push(&mut echo, "suite", &a.suite);
    push(&mut echo, "datasets", &a.datasets);
    push(&mut echo, "seeds", a.seeds);
    push(&mut echo, "first-seed", a.first_seed);
    push(&mut echo, "k", a.k);
    push(&mut echo, "rounds", a.rounds);
    push(
        &mut echo,
        "mode",
        kns_core::ScoreMode::from(a.mode).as_str(),
    );
    push(
        &mut echo,
        "lof-k",
        a.lof_k
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    push(&mut echo, "deterministic", a.deterministic);
    write_tables(a, &datasets, &runs, &echo)
}

fn write_tables(a: &BenchArgs, datasets: &[usize], runs: &[Run], echo: &Echo) -> CliResult<()> {
    let timing = |s: f64| {
        if a.deterministic {
            String::new()
        } else {
            s.to_string()
        }
    };

    let mut out = std::io::BufWriter::new(create(&a.output.join("runs.csv"))?);
    write_echo(&mut out, echo)?;
    writeln!(
        out,
        "dataset,m,n,seed,method,param,max_f,precision_at_full_recall,seconds"
    )?;
    for r in runs {
        let (m, n) = BENCH_SHAPES[r.dataset - 1];
        writeln!(
            out,
            "{},{m},{n},{},{},{},{},{},{}",
            r.dataset,
            r.seed,
            r.method,
            r.param,
            r.curve.max_f,
            r.curve.precision_at_full_recall(),
            timing(r.seconds)
        )?;
    }
    out.flush()?;

    let mut out = std::io::BufWriter::new(create(&a.output.join("curves.csv"))?);
    write_echo(&mut out, echo)?;
    writeln!(
        out,
        "dataset,seed,method,recall_level,cutoff,precision,f_measure"
    )?;
    for r in runs {
        for level in &r.curve.levels {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.dataset,
                r.seed,
                r.method,
                level.recall,
                level.cutoff,
                level.precision,
                level.f_measure
            )?;
        }
    }
    out.flush()?;

    let medians = |d: usize, method: &str, field: fn(&Run) -> f64| {
        let mut v: Vec<f64> = runs
            .iter()
            .filter(|r| r.dataset == d && r.method == method)
            .map(field)
            .collect();
        median(&mut v)
    };

    let mut out = std::io::BufWriter::new(create(&a.output.join("accuracy.csv"))?);
    write_echo(&mut out, echo)?;
    writeln!(out, "dataset,m,n,kns_median_max_f,lof_median_max_f")?;
    for &d in datasets {
        let (m, n) = BENCH_SHAPES[d - 1];
        let f = |r: &Run| r.curve.max_f;
        writeln!(
            out,
            "{d},{m},{n},{},{}",
            medians(d, "kns", f),
            medians(d, "lof", f)
        )?;
    }
    out.flush()?;

    let mut out = std::io::BufWriter::new(create(&a.output.join("runtime.csv"))?);
    write_echo(&mut out, echo)?;
    writeln!(out, "dataset,m,n,kns_median_seconds,lof_median_seconds")?;
    for &d in datasets {
        let (m, n) = BENCH_SHAPES[d - 1];
        let s = |r: &Run| r.seconds;
        writeln!(
            out,
            "{d},{m},{n},{},{}",
            timing(medians(d, "kns", s)),
            timing(medians(d, "lof", s))
        )?;
    }
    out.flush()?;
    Ok(())
}
