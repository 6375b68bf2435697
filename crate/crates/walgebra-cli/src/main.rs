//! Batch command-line front end: configure an algebra, run verification
//! suites, emit machine-readable reports.
//!
//! Exit codes: 0 when every enabled check passes, 1 on any FAIL or ERROR,
//! 2 on configuration errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use walgebra::current::{build_currents, TailReading};
use walgebra::report::{self, RunConfig, Suites};
use walgebra::structfn::AlgebraSpec;
use walgebra::vertex::System;

#[derive(Parser)]
#[command(name = "walgebra", about = "Exact verification of deformed W-algebra current identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a report.
    Verify {
        /// lemma | duality | vanishing | quadratic | toroidal | oracle | all
        suite: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Build currents by fusion and print the requested one.
    Fuse {
        /// degree of the current to build
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Print series coefficients of a structure function.
    Expand {
        /// f (pair series), g (ratio series) or d (closed form expansion)
        #[arg(long, default_value = "f")]
        function: String,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Print the effective configuration in config-file syntax.
    DumpConfig {
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// flat key=value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// twisted | corner
    #[arg(long)]
    algebra: Option<String>,
    /// twisted rank
    #[arg(long, short = 'N')]
    n: Option<usize>,
    #[arg(long)]
    l1: Option<usize>,
    #[arg(long)]
    l2: Option<usize>,
    #[arg(long)]
    l3: Option<usize>,
    /// corner color word, e.g. 223
    #[arg(long)]
    colors: Option<String>,
    /// structure-series truncation
    #[arg(long, short = 'K')]
    k: Option<i64>,
    /// Fock grade cutoff for oracle suites
    #[arg(long)]
    grade: Option<i64>,
    /// mode window for oracle suites
    #[arg(long)]
    window: Option<i64>,
    /// relation pairs, e.g. "1,1;1,2"
    #[arg(long)]
    pairs: Option<String>,
    /// tail product reading: range | fixed
    #[arg(long)]
    tail: Option<String>,
    /// re-check coefficient matches at a seeded rational point
    #[arg(long, default_value_t = false)]
    numeric_sample: bool,
    /// report output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Effective {
    algebra: String,
    n: usize,
    l: [usize; 3],
    colors: Option<String>,
    k: i64,
    grade: i64,
    window: i64,
    pairs: Vec<(usize, usize)>,
    tail: TailReading,
    numeric_sample: bool,
    out: Option<PathBuf>,
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for part in s.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (a, b) = part
            .split_once(',')
            .with_context(|| format!("pair '{}' is not of the form i,j", part))?;
        pairs.push((a.trim().parse()?, b.trim().parse()?));
    }
    if pairs.is_empty() {
        bail!("no pairs given");
    }
    Ok(pairs)
}

fn effective(opts: &CommonOpts) -> Result<Effective> {
    let mut file: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .with_context(|| format!("config line '{}' is not key=value", line))?;
            file.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let from_file = |key: &str| file.get(key).cloned();
    let algebra = opts
        .algebra
        .clone()
        .or_else(|| from_file("algebra"))
        .unwrap_or_else(|| "twisted".into());
    let n = match opts.n {
        Some(v) => v,
        None => from_file("N").map(|v| v.parse()).transpose()?.unwrap_or(1),
    };
    let l1 = opts.l1.or(from_file("L1").map(|v| v.parse()).transpose()?).unwrap_or(0);
    let l2 = opts.l2.or(from_file("L2").map(|v| v.parse()).transpose()?).unwrap_or(2);
    let l3 = opts.l3.or(from_file("L3").map(|v| v.parse()).transpose()?).unwrap_or(0);
    let colors = opts.colors.clone().or_else(|| from_file("colors"));
    let k = match opts.k {
        Some(v) => v,
        None => from_file("K").map(|v| v.parse()).transpose()?.unwrap_or(12),
    };
    let grade = match opts.grade {
        Some(v) => v,
        None => from_file("grade").map(|v| v.parse()).transpose()?.unwrap_or(2),
    };
    let window = match opts.window {
        Some(v) => v,
        None => from_file("window").map(|v| v.parse()).transpose()?.unwrap_or(5),
    };
    let pairs = match &opts.pairs {
        Some(s) => parse_pairs(s)?,
        None => match from_file("pairs") {
            Some(s) => parse_pairs(&s)?,
            None => vec![(1, 1)],
        },
    };
    let tail = match opts
        .tail
        .clone()
        .or_else(|| from_file("tail"))
        .unwrap_or_else(|| "range".into())
        .as_str()
    {
        "range" => TailReading::RangeProduct,
        "fixed" => TailReading::FixedPower,
        other => bail!("unknown tail reading '{}'", other),
    };
    let numeric_sample = opts.numeric_sample
        || from_file("numeric-sample")
            .map(|v| v == "true" || v == "1")
            .unwrap_or(false);
    Ok(Effective {
        algebra,
        n,
        l: [l1, l2, l3],
        colors,
        k,
        grade,
        window,
        pairs,
        tail,
        numeric_sample,
        out: opts.out.clone(),
    })
}

fn build_spec(eff: &Effective) -> Result<AlgebraSpec> {
    match eff.algebra.as_str() {
        "twisted" => Ok(AlgebraSpec::twisted(eff.n)),
        "corner" => {
            let spec = match &eff.colors {
                Some(word) => {
                    let colors: Vec<u8> = word
                        .chars()
                        .map(|c| c.to_digit(10).map(|d| d as u8).context("bad color digit"))
                        .collect::<Result<_>>()?;
                    AlgebraSpec::corner_with_colors(eff.l, colors)?
                }
                None => AlgebraSpec::corner(eff.l[0], eff.l[1], eff.l[2]),
            };
            Ok(spec)
        }
        other => bail!("unknown algebra '{}'", other),
    }
}

fn run_config(eff: &Effective, suites: Suites) -> Result<RunConfig> {
    let spec = build_spec(eff)?;
    let mut config = RunConfig::new(spec);
    config.series_order = eff.k;
    config.grade = eff.grade;
    config.window = eff.window;
    config.pairs = eff.pairs.clone();
    config.suites = suites;
    config.tail = eff.tail;
    config.numeric_sample = eff.numeric_sample;
    Ok(config)
}

fn emit(eff: &Effective, text: &str) -> Result<()> {
    match &eff.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", text),
    }
    Ok(())
}

fn cmd_verify(suite: &str, opts: &CommonOpts) -> Result<ExitCode> {
    let eff = effective(opts)?;
    let mut suites = Suites::none();
    match suite {
        "lemma" => suites.lemma = true,
        "duality" => suites.duality = true,
        "vanishing" => suites.vanishing = true,
        "quadratic" => {
            suites.lemma = true;
            suites.quadratic = true;
        }
        "toroidal" => suites.toroidal = true,
        "oracle" => {
            suites.lemma = true;
            suites.oracle = true;
        }
        "all" => suites = Suites::all(),
        other => bail!("unknown suite '{}'", other),
    }
    let config = run_config(&eff, suites)?;
    let report = report::run(&config).map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let mut text = report.body();
    text.push_str(&report.timings());
    emit(&eff, &text)?;
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_fuse(degree: usize, opts: &CommonOpts) -> Result<ExitCode> {
    let eff = effective(opts)?;
    let config = run_config(&eff, Suites::none())?;
    let order = config
        .working_order()
        .max(walgebra::current::required_order(degree.max(2) * 2));
    let sys = System::new(&config.spec, order).map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let currents =
        build_currents(&sys, degree, order).map_err(|e| anyhow::anyhow!(e.to_string()))?;
    emit(&eff, &report::emit_current_table(&sys, &currents[degree]))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_expand(function: &str, i: usize, j: usize, opts: &CommonOpts) -> Result<ExitCode> {
    let eff = effective(opts)?;
    let spec = build_spec(&eff)?;
    let names = spec.var_names();
    let text = match function {
        "f" | "g" => {
            let s = spec.pair_series(i, j, eff.k);
            format!("{}\n", s.display(&names))
        }
        "G" => {
            let s = spec.g_ratio_series(eff.k);
            format!("{}\n", s.display(&names))
        }
        "d" => {
            let d = spec.d_fn();
            let s = d
                .expand(walgebra::Region::Inside, 0, eff.k)
                .map_err(|e| anyhow::anyhow!(e.to_string()))?;
            format!("{}\n", s.display(&names))
        }
        other => bail!("unknown function '{}'", other),
    };
    emit(&eff, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_dump_config(opts: &CommonOpts) -> Result<ExitCode> {
    let eff = effective(opts)?;
    let mut text = String::new();
    text.push_str(&format!("algebra={}\n", eff.algebra));
    if eff.algebra == "twisted" {
        text.push_str(&format!("N={}\n", eff.n));
    } else {
        text.push_str(&format!("L1={}\nL2={}\nL3={}\n", eff.l[0], eff.l[1], eff.l[2]));
        if let Some(c) = &eff.colors {
            text.push_str(&format!("colors={}\n", c));
        }
    }
    text.push_str(&format!("K={}\n", eff.k));
    text.push_str(&format!("grade={}\n", eff.grade));
    text.push_str(&format!("window={}\n", eff.window));
    let pairs = eff
        .pairs
        .iter()
        .map(|(a, b)| format!("{},{}", a, b))
        .collect::<Vec<_>>()
        .join(";");
    text.push_str(&format!("pairs={}\n", pairs));
    text.push_str(&format!(
        "tail={}\n",
        match eff.tail {
            TailReading::RangeProduct => "range",
            TailReading::FixedPower => "fixed",
        }
    ));
    text.push_str(&format!("numeric-sample={}\n", eff.numeric_sample));
    emit(&eff, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify { suite, opts } => cmd_verify(suite, opts),
        Command::Fuse { degree, opts } => cmd_fuse(*degree, opts),
        Command::Expand { function, i, j, opts } => cmd_expand(function, *i, *j, opts),
        Command::DumpConfig { opts } => cmd_dump_config(opts),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("configuration error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
