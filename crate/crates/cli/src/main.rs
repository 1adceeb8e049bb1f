use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qdisc_core::formulas::{formula_for, BuiltinSpec};
use qdisc_core::verify::{self, Config, DiscMethod, Outcome};
use qdisc_core::{Algebra, Error};

#[derive(Parser)]
#[command(name = "qdisc", version, about = "Discriminants and Poisson brackets of quantum algebras at roots of unity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an algebra, its Gram matrix and its discriminant.
    Compute(RunArgs),
    /// Run a named verification suite.
    Verify {
        /// thm-3-4, thm-B, thm-5-5, lemma-4-2, remark-4-3, prop-3-2, poisson-normal or props
        suite: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Built-in algebra: qweyl, qplane or qmatrix.
    #[arg(long, conflicts_with = "spec")]
    builtin: Option<String>,
    /// Algebra spec file (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Order of the root of unity.
    #[arg(long, allow_negative_numbers = true)]
    l: Option<i64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// symbolic, eval or modular.
    #[arg(long)]
    method: Option<String>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    primes: usize,
    /// Write the JSON-lines certificate here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include the Gram matrix in the output.
    #[arg(long)]
    dump_gram: bool,
}

impl RunArgs {
    fn config(&self) -> Result<Config, Error> {
        let l = match self.l {
            Some(l) if l < 2 => return Err(Error::InvalidOrder(l)),
            Some(l) => Some(u32::try_from(l).map_err(|_| Error::InvalidOrder(l))?),
            None => None,
        };
        let method = self.method.as_deref().map(DiscMethod::parse).transpose()?;
        Ok(Config { l, m: self.m, n: self.n, method, trials: self.trials, seed: self.seed, primes: self.primes })
    }

    fn algebra(&self) -> Result<(String, Algebra, Option<BuiltinSpec>), Error> {
        if let Some(path) = &self.spec {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| Error::Invalid(format!("{} is not JSON: {e}", path.display())))?;
            let alg = Algebra::from_json(&v)?;
            return Ok((alg.name.clone(), alg, None));
        }
        let name = self
            .builtin
            .as_deref()
            .ok_or_else(|| Error::Invalid("compute needs --builtin or --spec".into()))?;
        let l = self.l.ok_or_else(|| Error::Invalid("--l is required".into()))?;
        let mut v = json!({"builtin": name, "l": l});
        if let Some(n) = self.n {
            v["n"] = json!(n);
        }
        if let Some(m) = self.m {
            v["m"] = json!(m);
        }
        let spec = BuiltinSpec::from_json(&v)?;
        let alg = spec.build()?;
        Ok((spec.name(), alg, Some(spec)))
    }
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(s) = std::env::var("QDISC_THREADS") {
        let n: usize = s
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("QDISC_THREADS must be a positive integer, got {s:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(Outcome, Option<&PathBuf>, u64), Error> {
    configure_threads()?;
    match &cli.command {
        Command::Compute(args) => {
            let cfg = args.config()?;
            let (label, alg, spec) = args.algebra()?;
            let formula = match &spec {
                Some(s) => match formula_for(s) {
                    Ok(f) => Some(f),
                    Err(Error::OutOfHypothesis(_)) | Err(Error::Invalid(_)) => None,
                    Err(e) => return Err(e),
                },
                None => None,
            };
            let records = verify::compute(&label, &alg, formula.as_ref(), &cfg, args.dump_gram)?;
            Ok((Outcome { suite: "compute".into(), records }, args.out.as_ref(), cfg.seed))
        }
        Command::Verify { suite, run } => {
            let cfg = run.config()?;
            Ok((verify::run_suite(suite, &cfg)?, run.out.as_ref(), cfg.seed))
        }
    }
}

fn emit(outcome: &Outcome, out: Option<&PathBuf>, seed: u64) -> std::io::Result<()> {
    let mut lines = String::new();
    for r in &outcome.records {
        let mut r = r.clone();
        if let Value::Object(o) = &mut r {
            o.insert("suite".into(), json!(outcome.suite));
            o.entry("seed").or_insert(json!(seed));
        }
        lines.push_str(&r.to_string());
        lines.push('\n');
    }
    let stdout = std::io::stdout();
    let mut so = stdout.lock();
    match out {
        Some(path) => fs::write(path, lines)?,
        None => so.write_all(lines.as_bytes())?,
    }
    for line in outcome.summary().lines() {
        writeln!(so, "# {line}")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((outcome, out, seed)) => {
            if let Err(e) = emit(&outcome, out, seed) {
                eprintln!("qdisc: cannot write output: {e}");
                return ExitCode::from(3);
            }
            if outcome.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            println!("{}", json!({"error": e.code(), "message": e.to_string()}));
            eprintln!("qdisc: {e}");
            ExitCode::from(2)
        }
    }
}
