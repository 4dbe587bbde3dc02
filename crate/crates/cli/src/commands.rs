use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use kns_core::dataset::{generate_synthetic, inject_noise_points};
use kns_core::eval::{compare, label_map, read_score_file, MethodRanking};
use kns_core::kns::Execution;
use kns_core::{
    load_matrix, write_csv, Dataset64, GeneratorSpec, KnsParams, LofParams, SectionSpace,
};

use crate::args::{Algo, Command, DetectArgs, EvalArgs, GenerateArgs};
use crate::{bench, CliError, CliResult};

/// Full-strategy runs above this many dimensions need `--force`.
const FULL_STRATEGY_GUARD: usize = 2000;

pub type Echo = Vec<(String, String)>;

pub fn dispatch(cli: crate::Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(a) => generate(&a),
        Command::Detect(a) => detect(&a),
        Command::Eval(a) => eval(&a),
        Command::Bench(a) => bench::run(&a),
    }
}

pub fn echo_head(command: &str) -> Echo {
    vec![
        ("command".into(), command.into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
    ]
}

pub fn push(echo: &mut Echo, key: &str, value: impl ToString) {
    echo.push((key.into(), value.to_string()));
}

pub fn create(path: &Path) -> CliResult<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    File::create(path).map_err(|e| CliError {
        code: 2,
        kind: "io",
        message: format!("cannot create {}: {e}", path.display()),
    })
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError {
        code: 2,
        kind: "io",
        message: format!("cannot open {}: {e}", path.display()),
    })
}

fn generate(a: &GenerateArgs) -> CliResult<()> {
    let n_normal = a
        .points
        .checked_sub(a.outliers + a.noise)
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage("--points must exceed --outliers plus --noise"))?;
    let spec = GeneratorSpec {
        m: a.dims,
        n_normal,
        n_outliers: a.outliers,
        n_clusters: a.clusters,
        mu_range: (a.mu_min, a.mu_max),
        sigma_range: (a.sigma_min, a.sigma_max),
        outlier_region: (a.region_min, a.region_max),
        n_noise: a.noise,
        noise_dims: a.noise_dims,
        seed: a.seed,
    };
    let base = generate_synthetic::<f64>(&spec)?;
    let data = inject_noise_points(&base, &spec)?;

    let mut echo = echo_head("generate");
    push(&mut echo, "dims", a.dims);
    push(&mut echo, "points", a.points);
    push(&mut echo, "outliers", a.outliers);
    push(&mut echo, "clusters", a.clusters);
    push(&mut echo, "mu-min", a.mu_min);
    push(&mut echo, "mu-max", a.mu_max);
    push(&mut echo, "sigma-min", a.sigma_min);
    push(&mut echo, "sigma-max", a.sigma_max);
    push(&mut echo, "region-min", a.region_min);
    push(&mut echo, "region-max", a.region_max);
    push(&mut echo, "noise", a.noise);
    push(&mut echo, "noise-dims", a.noise_dims);
    push(&mut echo, "seed", a.seed);
    write_csv(&data.dataset, &echo, create(&a.output)?)?;
    Ok(())
}

/// Whether the first non-comment line of `path` names `column`.
fn header_has(path: &Path, column: &str) -> CliResult<bool> {
    for line in BufReader::new(open(path)?).lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        return Ok(line.split(',').any(|f| f.trim() == column));
    }
    Ok(false)
}

pub fn load_input(path: &Path, has_header: bool, label_column: &str) -> CliResult<Dataset64> {
    let label = (has_header && header_has(path, label_column)?).then_some(label_column);
    Ok(load_matrix(BufReader::new(open(path)?), has_header, label)?)
}

fn detect(a: &DetectArgs) -> CliResult<()> {
    let data = load_input(&a.input, !a.no_header, &a.label_column)?;
    let mut echo = echo_head("detect");
    push(&mut echo, "algo", a.algo.to_possible_value_name());
    push(&mut echo, "input", a.input.display());
    if a.no_header {
        push(&mut echo, "no-header", true);
    }
    push(&mut echo, "label-column", &a.label_column);
    push(&mut echo, "k", a.k);
    push(&mut echo, "n", data.n());
    push(&mut echo, "m", data.m());

    match a.algo {
        Algo::Kns => {
            let mut params = KnsParams {
                k: a.k,
                scn: a.scn,
                strategy: a.strategy.map(Into::into),
                rounds: a.rounds,
                score_mode: a.mode.into(),
                seed: a.seed,
                execution: if a.deterministic {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
                max_work: a.max_work,
            };
            params.validate()?;
            let scn = params.resolve_scn(data.n());
            let strategy = params.resolve_strategy(data.m());
            if strategy == kns_core::Strategy::Full && data.m() > FULL_STRATEGY_GUARD && !a.force {
                return Err(CliError::capacity(format!(
                    "full strategy on {} dimensions needs m(m-1) = {} projections; \
                     use --strategy sampled or pass --force",
                    data.m(),
                    data.m() * (data.m() - 1)
                )));
            }
            params.scn = Some(scn);
            params.strategy = Some(strategy);
            push(&mut echo, "scn", scn);
            push(&mut echo, "strategy", strategy.as_str());
            push(&mut echo, "rounds", a.rounds);
            push(&mut echo, "mode", params.score_mode.as_str());
            push(&mut echo, "seed", a.seed);
            push(&mut echo, "max-work", a.max_work);
            push(&mut echo, "deterministic", a.deterministic);
            if a.force {
                push(&mut echo, "force", true);
            }

            let started = Instant::now();
            let space = SectionSpace::build(&data, scn)?;
            let report = kns_core::score(&space, &params)?;
            let seconds = started.elapsed().as_secs_f64();
            for d in space.diagnostics().iter().chain(&report.diagnostics) {
                eprintln!("warning: {d}");
            }
            if !a.deterministic {
                push(&mut echo, "seconds", seconds);
            }
            if let Some(path) = &a.section_info {
                space.write_section_info(create(path)?)?;
            }
            report.write_csv(&echo, create(&a.output)?)?;
        }
        Algo::Lof => {
            push(&mut echo, "deterministic", a.deterministic);
            let report = kns_core::lof_score(&data, &LofParams { k_nn: a.k })?;
            if !a.deterministic {
                push(&mut echo, "seconds", report.seconds);
            }
            report.write_csv(&echo, create(&a.output)?)?;
        }
    }
    Ok(())
}

/// `<dir>/<stem>_summary.csv` next to the curve file.
pub fn summary_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "eval".into());
    output.with_file_name(format!("{stem}_summary.csv"))
}

fn eval(a: &EvalArgs) -> CliResult<()> {
    let truth = load_input(&a.labels, true, &a.label_column)?;
    let labels = truth.labels().ok_or_else(|| CliError {
        code: 2,
        kind: "data",
        message: format!("{} has no {:?} column", a.labels.display(), a.label_column),
    })?;
    let labels = label_map(truth.point_ids(), labels);

    let mut methods: Vec<MethodRanking> = Vec::new();
    for path in &a.scores {
        let file = read_score_file(open(path)?)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut name = file
            .echo_value("algo")
            .map_or_else(|| stem.clone(), str::to_owned);
        if methods.iter().any(|m| m.name == name) {
            name = format!("{name}-{stem}");
        }
        let seconds = file.echo_value("seconds").and_then(|s| s.parse().ok());
        methods.push(MethodRanking {
            name,
            ranking: file.ranking,
            seconds,
        });
    }
    let summary = compare(&methods, &labels)?;

    let mut echo = echo_head("eval");
    for path in &a.scores {
        push(&mut echo, "scores", path.display());
    }
    push(&mut echo, "labels", a.labels.display());
    push(&mut echo, "label-column", &a.label_column);

    let mut curves = create(&a.output)?;
    write_echo(&mut curves, &echo)?;
    summary.write_curves(curves)?;
    let mut table = create(&summary_path(&a.output))?;
    write_echo(&mut table, &echo)?;
    summary.write_summary(table)?;
    for row in &summary.rows {
        eprintln!(
            "{}: max_f={:.4} precision_at_full_recall={:.4}",
            row.method, row.max_f, row.precision_at_full_recall
        );
    }
    Ok(())
}

pub fn write_echo<W: Write>(out: &mut W, echo: &[(String, String)]) -> CliResult<()> {
    for (k, v) in echo {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

trait PossibleValueName {
    fn to_possible_value_name(&self) -> String;
}

impl<E: clap::ValueEnum> PossibleValueName for E {
    fn to_possible_value_name(&self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_owned())
            .unwrap_or_default()
    }
}
