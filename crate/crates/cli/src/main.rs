//! `gdf`: enumerate arrow diagrams, generate relator systems, solve them,
//! evaluate the resulting formulas and run the verification checks.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gdf_core::analysis::{relator_system, solve, Source, SystemName};
use gdf_core::corpus::{classical_entries, resolve};
use gdf_core::moves::{fuzz_invariance, FuzzConfig};
use gdf_core::relators::Flavor;
use gdf_core::{enumerate_diagrams, Connectivity, GaussFormula, GaussWord, Kind};
use gdf_verify::{run, virtual_seeds, Check, Options};
use serde_json::{json, Value};

/// `println!` that reports write errors instead of panicking.
macro_rules! say {
    ($($t:tt)*) => {
        writeln!(io::stdout().lock(), $($t)*)?
    };
}

#[derive(Parser)]
#[command(name = "gdf", version, about = "Gauss diagram formulas of degree at most three")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Root seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Directory for formula files and reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConnectivityArg {
    All,
    Connected,
}

#[derive(Clone, Copy, ValueEnum)]
enum YesNo {
    Yes,
    No,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Based,
    Cyclic,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Virtual,
    Classical,
    ClassicalSplit,
}

impl From<SystemArg> for SystemName {
    fn from(s: SystemArg) -> SystemName {
        match s {
            SystemArg::Virtual => SystemName::Virtual,
            SystemArg::Classical => SystemName::Classical,
            SystemArg::ClassicalSplit => SystemName::ClassicalSplit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Generated,
    Transcribed,
}

impl From<SourceArg> for Source {
    fn from(s: SourceArg) -> Source {
        match s {
            SourceArg::Generated => Source::Generated,
            SourceArg::Transcribed => Source::Transcribed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List arrow diagrams up to isomorphism, in canonical order.
    Enumerate {
        #[arg(long)]
        arrows: usize,
        #[arg(long, value_enum, default_value_t = ConnectivityArg::All)]
        connectivity: ConnectivityArg,
        #[arg(long, value_enum, default_value_t = YesNo::Yes)]
        signed: YesNo,
        #[arg(long, value_enum, default_value_t = KindArg::Based)]
        kind: KindArg,
    },
    /// Print a relator system.
    Relators {
        #[arg(long, value_enum, default_value_t = SystemArg::Virtual)]
        system: SystemArg,
        #[arg(long, value_enum, default_value_t = SourceArg::Generated)]
        source: SourceArg,
    },
    /// Solve a relator system; with --out, write one formula file per nullspace vector.
    Solve {
        #[arg(long, value_enum, default_value_t = SystemArg::Classical)]
        system: SystemArg,
        #[arg(long, value_enum, default_value_t = SourceArg::Generated)]
        source: SourceArg,
        /// Write the evaluation matrix (basis rows, relator columns) as CSV.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Evaluate formulas on knots given by builtin name or Gauss code.
    Eval {
        /// A formula file or a directory of them.
        #[arg(long)]
        formulas: PathBuf,
        /// Expand cyclic entries over their base placements first.
        #[arg(long)]
        sum_base_placements: bool,
        #[arg(required = true)]
        targets: Vec<String>,
    },
    /// Check formulas for invariance along seeded random move walks.
    Fuzz {
        #[arg(long, value_enum, default_value_t = SystemArg::Classical)]
        system: SystemArg,
        /// Formula file or directory; defaults to the solved system.
        #[arg(long)]
        formulas: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        /// Start words (builtin name or Gauss code); defaults depend on the flavor.
        #[arg(long = "start")]
        starts: Vec<String>,
        /// Succeed only when some value changes.
        #[arg(long)]
        expect_violation: bool,
    },
    /// Run verification checks.
    Verify {
        /// A check name or `all`.
        #[arg(long, default_value = "all")]
        check: String,
        /// Classical system used by the fuzz and rotation checks.
        #[arg(long, value_enum, default_value_t = SystemArg::Classical)]
        classical: SystemArg,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 30)]
        steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` reports a failed check or an unexpected fuzz outcome.
fn dispatch(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::Enumerate { arrows, connectivity, signed, kind } => {
            enumerate(g, *arrows, *connectivity, *signed, *kind)?;
            Ok(true)
        }
        Command::Relators { system, source } => {
            relators(g, (*system).into(), (*source).into())?;
            Ok(true)
        }
        Command::Solve { system, source, dump_matrix } => {
            solve_cmd(g, (*system).into(), (*source).into(), dump_matrix.as_deref())?;
            Ok(true)
        }
        Command::Eval { formulas, sum_base_placements, targets } => {
            eval(g, formulas, *sum_base_placements, targets)?;
            Ok(true)
        }
        Command::Fuzz { system, formulas, trials, steps, starts, expect_violation } => {
            let found = fuzz(g, (*system).into(), formulas.as_deref(), *trials, *steps, starts)?;
            Ok(found == *expect_violation)
        }
        Command::Verify { check, classical, trials, steps } => {
            let opts = Options { seed: g.seed, trials: *trials, steps: *steps, classical: (*classical).into() };
            verify(g, check, &opts)
        }
    }
}

fn print_json(v: &Value) -> Result<()> {
    say!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn write_json(dir: &Path, name: &str, v: &Value) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{}.json", name));
    fs::write(&path, serde_json::to_string_pretty(v)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn enumerate(g: &Global, arrows: usize, connectivity: ConnectivityArg, signed: YesNo, kind: KindArg) -> Result<()> {
    if arrows > 6 {
        bail!("--arrows {} is above the supported maximum of 6", arrows);
    }
    let conn = match connectivity {
        ConnectivityArg::All => Connectivity::All,
        ConnectivityArg::Connected => Connectivity::Connected,
    };
    let kind = match kind {
        KindArg::Based => Kind::Based,
        KindArg::Cyclic => Kind::Cyclic,
    };
    let basis = enumerate_diagrams(arrows, conn, matches!(signed, YesNo::Yes), kind);
    let texts: Vec<String> = basis.entries().iter().map(|d| d.text()).collect();
    match g.format {
        Format::Text => {
            for t in &texts {
                say!("{}", t);
            }
        }
        Format::Json => print_json(&json!({ "arrows": arrows, "count": texts.len(), "diagrams": texts }))?,
    }
    Ok(())
}

fn relators(g: &Global, system: SystemName, source: Source) -> Result<()> {
    let rs = relator_system(system, source)?;
    if let Some(dir) = &g.out {
        write_json(dir, &format!("relators-{}", system), &rs.to_json())?;
    }
    match g.format {
        Format::Json => print_json(&rs.to_json())?,
        Format::Text => {
            for r in rs.relators() {
                let terms: Vec<String> = r.sum().iter().map(|(d, c)| format!("{:+} [{}]", c, d.text())).collect();
                say!("{}: {}", r.provenance(), terms.join(" "));
            }
            say!("{} relators", rs.len());
        }
    }
    Ok(())
}

fn solve_cmd(g: &Global, system: SystemName, source: Source, dump: Option<&Path>) -> Result<()> {
    let rs = relator_system(system, source)?;
    let sol = solve(system.to_string(), &rs);
    let formulas = sol.formulas();
    if let Some(path) = dump {
        fs::write(path, sol.matrix.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(dir) = &g.out {
        for f in &formulas {
            write_json(dir, f.label(), &f.to_json())?;
        }
    }
    let support = |f: &GaussFormula| f.coefficients().iter().filter(|&&c| c != 0).count();
    match g.format {
        Format::Json => print_json(&json!({
            "system": system.to_string(),
            "relators": rs.len(),
            "matrix": { "rows": sol.matrix.rows(), "cols": sol.matrix.cols() },
            "rank": sol.matrix.rank(),
            "dimension": sol.dim(),
            "formulas": formulas.iter().map(|f| json!({ "label": f.label(), "support": support(f) })).collect::<Vec<_>>(),
        }))?,
        Format::Text => {
            say!(
                "{}: {} relators, matrix {}x{}, nullspace dimension {}",
                system,
                rs.len(),
                sol.matrix.rows(),
                sol.matrix.cols(),
                sol.dim()
            );
            for f in &formulas {
                say!("{} ({} terms)", f.label(), support(f));
            }
        }
    }
    Ok(())
}

/// Formula files hold one formula object or an array of them; directories
/// are read in file-name order.
fn load_formulas(path: &Path) -> Result<Vec<GaussFormula>> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .with_context(|| format!("reading {}", path.display()))?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| p.extension().is_some_and(|x| x == "json"));
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    let mut out = Vec::new();
    for file in &files {
        let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
        let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
        let items = match value {
            Value::Array(items) => items,
            other => vec![other],
        };
        for item in &items {
            out.push(GaussFormula::from_json(item).with_context(|| format!("in {}", file.display()))?);
        }
    }
    if out.is_empty() {
        bail!("no formulas found in {}", path.display());
    }
    Ok(out)
}

fn eval(g: &Global, path: &Path, expand: bool, targets: &[String]) -> Result<()> {
    let mut formulas = load_formulas(path)?;
    if expand {
        formulas = formulas.iter().map(|f| f.sum_base_placements()).collect();
    }
    let words: Vec<GaussWord> =
        targets.iter().map(|t| resolve(t).with_context(|| format!("target {:?}", t))).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for f in &formulas {
        for (t, w) in targets.iter().zip(&words) {
            let value = f.evaluate(w).with_context(|| format!("{} on {}", f.label(), t))?;
            rows.push((f.label().to_string(), t.clone(), value));
        }
    }
    match g.format {
        Format::Json => print_json(&Value::Array(
            rows.iter().map(|(f, t, v)| json!({ "formula": f, "target": t, "value": v })).collect(),
        ))?,
        Format::Text => {
            for (f, t, v) in &rows {
                say!("{} {} {}", f, t, v);
            }
        }
    }
    Ok(())
}

/// True when some formula changed value.
fn fuzz(g: &Global, system: SystemName, path: Option<&Path>, trials: usize, steps: usize, starts: &[String]) -> Result<bool> {
    let flavor = if system == SystemName::Virtual { Flavor::Virtual } else { Flavor::Classical };
    let formulas = match path {
        Some(p) => load_formulas(p)?,
        None => solve(system.to_string(), &relator_system(system, Source::Generated)?).formulas(),
    };
    let seeds: Vec<GaussWord> = if !starts.is_empty() {
        starts.iter().map(|s| resolve(s).with_context(|| format!("start {:?}", s))).collect::<Result<_>>()?
    } else if flavor == Flavor::Virtual {
        virtual_seeds(g.seed)
    } else {
        classical_entries().into_iter().map(|e| e.word).collect()
    };
    let report = fuzz_invariance(&formulas, &seeds, FuzzConfig { flavor, trials, steps, seed: g.seed })?;
    let value = serde_json::to_value(&report)?;
    if let Some(dir) = &g.out {
        write_json(dir, "fuzz", &value)?;
    }
    match g.format {
        Format::Json => print_json(&value)?,
        Format::Text => {
            say!(
                "{} flavor, {} formulas, {} trials x {} steps: {} violations in {} trials",
                report.flavor,
                report.formulas,
                report.trials,
                report.steps,
                report.violations.len(),
                report.violating_trials()
            );
            if let Some(v) = report.violations.first() {
                say!("first: trial {} formula {} value {} -> {} from {}", v.trial, v.formula, v.before, v.after, v.seed_word);
                for m in &v.trace {
                    say!("  {}", m);
                }
            }
        }
    }
    Ok(!report.passed())
}

fn verify(g: &Global, check: &str, opts: &Options) -> Result<bool> {
    let checks: Vec<Check> =
        if check == "all" { Check::ALL.to_vec() } else { vec![check.parse::<Check>().map_err(anyhow::Error::msg)?] };
    let ctx = gdf_verify::Context::new();
    let reports: Vec<_> = checks.iter().map(|&c| run(c, &ctx, opts)).collect();
    if let Some(dir) = &g.out {
        for r in &reports {
            write_json(dir, &format!("verify-{}", r.check), &r.to_json())?;
        }
        if checks.contains(&Check::Pv) {
            for (i, pv) in gdf_verify::polyak_viro(&ctx).iter().enumerate() {
                let f = GaussFormula::sparse(format!("polyak-viro-{}", i + 1), ctx.classical.basis.entries(), &pv.vector);
                write_json(dir, f.label(), &f.to_json())?;
            }
        }
    }
    match g.format {
        Format::Json => print_json(&Value::Array(reports.iter().map(|r| r.to_json()).collect()))?,
        Format::Text => {
            for r in &reports {
                say!("{}", r);
            }
        }
    }
    Ok(reports.iter().all(|r| r.passed))
}
