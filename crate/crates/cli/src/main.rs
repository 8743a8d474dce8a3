//! `copula-gof` command-line tool.

mod args;
mod render;

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde::Serialize;

use copula_gof::copula::{
    param_to_tau, parse_grid, sample, tau_to_param, CopulaSpec, Family, ParameterGrid,
};
use copula_gof::empirical::{kendall_tau_empirical, BivariateSample};
use copula_gof::experiments::{
    fit_by_ase, fit_by_tau, lb_alternative_sample, load_csv, power_study, write_csv, CsvData,
    LbAlternativeSpec, PowerTable,
};
use copula_gof::gof::{adaptive_test, two_sample_test};
use copula_gof::parallel::with_threads;
use copula_gof::report;
use copula_gof::rng::{label, stream};
use copula_gof::wavelet::LevelIndex;

use args::{Cli, Command, Format, OutputArgs, SpecArgs};

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    let threads = cli.command.output().threads;
    let outcome = with_threads(threads, || run(cli.command)).map_err(anyhow::Error::from);
    match outcome.and_then(|r| r) {
        Ok(()) => eprintln!("elapsed: {:.2}s", start.elapsed().as_secs_f64()),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Test(a) => {
            let data = single_sample(&a.data)?;
            let family: Family = a.family.parse()?;
            let config = a.test.config(family)?;
            let report = adaptive_test(&data, family, &config)?;
            emit(&a.output, &report, || render::test_report(&report))
        }
        Command::Power(a) => {
            let h0s = parse_families(&a.family)?;
            let trues = parse_families(&a.true_family)?;
            if a.test.grid.is_some() && h0s.len() != 1 {
                bail!("--grid needs exactly one null family");
            }
            let (n, n_mc) = if a.paper_scale {
                (2048, 500)
            } else {
                (a.n, a.n_mc)
            };
            let references = args::parse_references(&a.reference)?;
            let mut table = PowerTable::default();
            for &h0 in &h0s {
                let config = a.test.config(h0)?;
                for &tf in &trues {
                    for &tau in &a.tau {
                        let spec = tau_to_param(tf, tau)
                            .with_context(|| format!("true family {tf} at tau {tau}"))?;
                        let mut row = power_study(h0, &spec, n, n_mc, &config)?;
                        row.reference = references
                            .iter()
                            .find(|r| {
                                r.h0 == h0 && r.true_family == tf && (r.tau - tau).abs() < 1e-9
                            })
                            .map(|r| r.value);
                        eprintln!(
                            "H0 {h0:<12} true {tf:<12} tau {tau:.2}: {:.2}",
                            row.rejection_rate
                        );
                        table.rows.push(row);
                    }
                }
            }
            emit(&a.output, &table, || {
                copula_gof::experiments::render_power_table(&table)
            })
        }
        Command::FitTau(a) => {
            let data = single_sample(&a.data)?;
            let tau_hat = kendall_tau_empirical(&data);
            let fits: Vec<TauFit> = parse_families(&a.family)?
                .into_iter()
                .map(|family| match fit_by_tau(&data, family) {
                    Ok(spec) => TauFit {
                        family,
                        tau_hat,
                        parameter: Some(spec.parameter()),
                        error: None,
                    },
                    Err(e) => TauFit {
                        family,
                        tau_hat,
                        parameter: None,
                        error: Some(e.to_string()),
                    },
                })
                .collect();
            emit(&a.output, &fits, || render::tau_fits(&fits))
        }
        Command::FitAse(a) => {
            let data = single_sample(&a.data)?;
            let families = parse_families(&a.family)?;
            if a.grid.is_some() && families.len() != 1 {
                bail!("--grid needs exactly one family");
            }
            let j = LevelIndex::new(a.level)?;
            let fits = families
                .into_iter()
                .map(|family| {
                    let grid = match &a.grid {
                        Some(text) => parse_grid(family, text)?,
                        None => ParameterGrid::default_for(family)?,
                    };
                    Ok(fit_by_ase(&data, &grid, j)?)
                })
                .collect::<Result<Vec<_>>>()?;
            emit(&a.output, &fits, || render::ase_fits(&fits))
        }
        Command::Compare(a) => {
            let (first, second) = match (&a.data2, load_csv(&a.data)?) {
                (None, CsvData::Paired(x, y)) => (x, y),
                (Some(path), CsvData::Single(x)) => (x, single_sample(path)?),
                (None, CsvData::Single(_)) => bail!("compare needs a 4-column file or --data2"),
                (Some(_), CsvData::Paired(..)) => {
                    bail!("--data2 cannot be combined with a 4-column file")
                }
            };
            let config = a.test.config(Family::Independence)?;
            let report = two_sample_test(&first, &second, &config)?;
            emit(&a.output, &report, || render::test_report(&report))
        }
        Command::Simulate(a) => {
            let spec = a.spec.resolve()?;
            let points = sample(&spec, a.n, &mut stream(a.seed, &[label::DATA]))?;
            eprintln!(
                "{spec}, tau {:.4}, {} points",
                param_to_tau(&spec)?,
                points.len()
            );
            write_points(a.out.as_deref(), &points)
        }
        Command::LbSample(a) => {
            let base = a.spec.resolve()?;
            let spec =
                LbAlternativeSpec::new(base, LevelIndex::new(a.level)?, a.s, a.m, a.c1, a.n)?;
            let drawn = lb_alternative_sample(&spec, &mut stream(a.seed, &[label::DATA]))?;
            let summary = LbSummary {
                spec: &spec,
                amplitude: drawn.amplitude,
                l2_distance: drawn.l2_distance,
                projection_error: drawn.projection_error,
                signs: &drawn.signs,
            };
            if let Some(path) = &a.summary {
                std::fs::write(path, report::to_json(&summary)? + "\n")
                    .with_context(|| format!("cannot write {}", path.display()))?;
            } else {
                eprintln!("{}", report::to_json(&summary)?);
            }
            write_points(a.out.as_deref(), &drawn.points)
        }
    }
}

#[derive(Serialize)]
struct TauFit {
    family: Family,
    tau_hat: f64,
    parameter: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct LbSummary<'a> {
    spec: &'a LbAlternativeSpec,
    amplitude: f64,
    l2_distance: f64,
    projection_error: f64,
    signs: &'a [i8],
}

fn parse_families(list: &str) -> Result<Vec<Family>> {
    if list.trim().eq_ignore_ascii_case("study") {
        return Ok(Family::STUDY.to_vec());
    }
    list.split(',')
        .map(|s| s.parse::<Family>().map_err(anyhow::Error::from))
        .collect()
}

fn single_sample(path: &Path) -> Result<BivariateSample> {
    match load_csv(path).with_context(|| format!("reading {}", path.display()))? {
        CsvData::Single(sample) => {
            eprintln!("read {} rows from {}", sample.len(), path.display());
            Ok(sample)
        }
        CsvData::Paired(..) => bail!(
            "{} has 4 columns; use the compare subcommand",
            path.display()
        ),
    }
}

fn emit<T: Serialize>(output: &OutputArgs, item: &T, table: impl FnOnce() -> String) -> Result<()> {
    let text = match output.format {
        Format::Json => report::to_json(item)? + "\n",
        Format::Table => table(),
    };
    write_text(output.out.as_deref(), &text)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_points(path: Option<&Path>, points: &[(f64, f64)]) -> Result<()> {
    let header = Some(["u", "v"]);
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
            write_csv(io::BufWriter::new(file), header, points)?;
        }
        None => write_csv(io::stdout().lock(), header, points)?,
    }
    Ok(())
}

impl SpecArgs {
    fn resolve(&self) -> Result<CopulaSpec> {
        let family: Family = self.family.parse()?;
        Ok(match (self.tau, self.param) {
            (_, Some(p)) => CopulaSpec::new(family, p)?,
            (Some(t), None) => tau_to_param(family, t)?,
            (None, None) if family == Family::Independence => CopulaSpec::Independence,
            (None, None) => bail!("give --tau or --param for {family}"),
        })
    }
}
