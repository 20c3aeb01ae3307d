use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use bianchi_core::pipeline::{self, Verdict};
use bianchi_core::tables;
use bianchi_core::vinberg::Budget;
use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;

#[derive(Parser)]
#[command(name = "bianchi", version, about = "Decide reflectivity of Bianchi groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Stop after this many roots.
    #[arg(long, default_value_t = 200)]
    max_roots: usize,
    /// Largest squared weight to explore, e.g. `10000` or `2025/2`.
    #[arg(long, default_value = "10000")]
    max_weight_sq: Ratio<i64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget { max_roots: self.max_roots, max_weight_sq: self.max_weight_sq }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify a single field Q(sqrt(-m)).
    Classify {
        #[arg(long)]
        m: i64,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the Coxeter diagram in DOT format here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Classify a range or list of m.
    Scan {
        #[arg(long, requires = "to", conflicts_with = "list")]
        from: Option<i64>,
        #[arg(long, requires = "from")]
        to: Option<i64>,
        /// File with one m per line (blank lines and `#` comments ignored).
        #[arg(long, required_unless_present = "from")]
        list: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Directory for per-m JSON reports.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Reproduce a published reference table.
    Tables {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(tables::TABLE_IDS))]
        which: String,
    },
}

fn summary_line(v: &Verdict) -> String {
    let mut line = format!("m={:<4} hat: {:<28} bi: {}", v.m, v.hat_status, v.bi_status);
    if let Some(c) = &v.certificate {
        line.push_str(&format!("  [{}]", c.kind()));
    }
    if v.unmatched_filled {
        line.push_str("  (filled set outside the rank-reading rule)");
    }
    line
}

fn write_json(path: &Path, v: &Verdict) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&pipeline::report(v))?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn read_list(path: &Path) -> anyhow::Result<Vec<i64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let m = line
            .parse()
            .with_context(|| format!("{}:{}: not an integer: {line}", path.display(), n + 1))?;
        out.push(m);
    }
    Ok(out)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Classify { m, budget, json, dot } => {
            let v = pipeline::classify(m, &budget.budget())?;
            println!("{}", summary_line(&v));
            if let Some(note) = v.note {
                println!("note: {note}");
            }
            if let Some(path) = json {
                write_json(&path, &v)?;
            }
            if let Some(path) = dot {
                let Some(d) = &v.diagram else {
                    bail!("no diagram is computed for m = {m}");
                };
                fs::write(&path, d.export_dot())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Scan { from, to, list, jobs, out, budget } => {
            let ms = match (from, to, list) {
                (Some(a), Some(b), _) => (a..=b).collect(),
                (_, _, Some(path)) => read_list(&path)?,
                _ => bail!("give either --from/--to or --list"),
            };
            let res = pipeline::scan(&ms, &budget.budget(), jobs)?;
            for m in &res.skipped {
                eprintln!("warning: skipping m={m}, not square-free");
            }
            if let Some(dir) = &out {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            for v in &res.verdicts {
                println!("{}", summary_line(v));
                if let Some(dir) = &out {
                    write_json(&dir.join(format!("m{}.json", v.m)), v)?;
                }
            }
        }
        Command::Tables { which } => {
            let r = tables::reproduce_table(&which)?;
            print!("{}", r.text);
            if !r.pass {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
