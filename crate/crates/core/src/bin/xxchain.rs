use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use xxchain::cli::{
    self, parse_measures, parse_separations, AxisRange, Measure, OutputFormat, ScanGrid, Suite,
};
use xxchain::ed_oracle::{self, FiniteChainSpec};
use xxchain::format::significant;
use xxchain::free_fermion::{fermi_coefficients, ModelParams};
use xxchain::measures::two_site_state;
use xxchain::Error;

#[derive(Parser)]
#[command(name = "xxchain", version, about = "Correlations in the spin-1/2 XX chain via free fermions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

/// Every flag is kept as text so that flag and config values share one parser.
#[derive(Args, Default)]
struct Flags {
    /// Magnetic field
    #[arg(long = "h", global = true, allow_hyphen_values = true)]
    field: Option<String>,
    /// Temperature (0 selects the ground state)
    #[arg(long = "T", global = true, allow_hyphen_values = true)]
    temperature: Option<String>,
    /// Site separation; comma-separated list for `scan`
    #[arg(long = "m", global = true)]
    separation: Option<String>,
    /// Field sweep a:b:n
    #[arg(long = "h-range", global = true, allow_hyphen_values = true)]
    h_range: Option<String>,
    /// Temperature sweep a:b:n
    #[arg(long = "T-range", global = true)]
    t_range: Option<String>,
    /// Measure name; comma-separated list for `scan` and `measures`
    #[arg(long = "measure", global = true)]
    measure: Option<String>,
    /// csv or json
    #[arg(long = "format", global = true)]
    format: Option<String>,
    /// Output file (default stdout)
    #[arg(long = "out", global = true)]
    out: Option<String>,
    #[arg(long = "seed", global = true)]
    seed: Option<String>,
    /// Ring length for `spectrum`
    #[arg(long = "N", global = true)]
    sites: Option<String>,
    /// Worker threads (default: available cores)
    #[arg(long = "threads", global = true)]
    threads: Option<String>,
    /// Exchange coupling
    #[arg(long = "J", global = true, allow_hyphen_values = true)]
    coupling: Option<String>,
    /// Field step for `qpt`
    #[arg(long = "dh", global = true)]
    dh: Option<String>,
    /// Field resolution for `onset`
    #[arg(long = "resolution", global = true)]
    resolution: Option<String>,
    /// Non-zero threshold for `onset`
    #[arg(long = "threshold", global = true)]
    threshold: Option<String>,
    /// Flat `key = value` file; keys are long flag names
    #[arg(long = "config", global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fermi coefficients f_0..f_m
    Fm,
    /// Two-site density matrix
    Rdm,
    /// All correlation measures at one point
    Measures,
    /// Measures over a (T, h) grid
    Scan,
    /// Peak of |d measure / dh|
    Qpt,
    /// Smallest field where a measure becomes non-zero
    Onset,
    /// Spin vs fermion spectrum of a finite ring
    Spectrum,
    /// Run an oracle suite: wick, discord, coherence, spectrum, finite_size or all
    Validate { suite: String },
}

enum Failure {
    Usage(String),
    Numerical(String),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let root = match &e {
            Error::AtPoint { source, .. } => source.as_ref(),
            other => other,
        };
        match root {
            Error::InvalidParams(_)
            | Error::InvalidGrid(_)
            | Error::UnsupportedSeparation(_)
            | Error::BudgetExceeded { .. }
            | Error::DegenerateRange(_)
            | Error::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

struct Settings(BTreeMap<String, String>);

impl Settings {
    fn resolve(flags: &Flags) -> Outcome<Self> {
        let mut map = BTreeMap::new();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Failure::Usage(format!("config {}:{}: expected key = value", path.display(), n + 1))
                })?;
                map.insert(k.trim().trim_start_matches("--").to_string(), v.trim().to_string());
            }
        }
        let explicit = [
            ("h", &flags.field),
            ("T", &flags.temperature),
            ("m", &flags.separation),
            ("h-range", &flags.h_range),
            ("T-range", &flags.t_range),
            ("measure", &flags.measure),
            ("format", &flags.format),
            ("out", &flags.out),
            ("seed", &flags.seed),
            ("N", &flags.sites),
            ("threads", &flags.threads),
            ("J", &flags.coupling),
            ("dh", &flags.dh),
            ("resolution", &flags.resolution),
            ("threshold", &flags.threshold),
        ];
        for (key, value) in explicit {
            if let Some(v) = value {
                map.insert(key.to_string(), v.clone());
            }
        }
        Ok(Settings(map))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Outcome<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Failure::Usage(format!("invalid value '{v}' for --{key}"))),
        }
    }

    fn text<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    fn params(&self) -> Outcome<ModelParams> {
        Ok(ModelParams::new(
            self.get("J", 1.0)?,
            self.get("h", 0.5)?,
            self.get("T", 0.0)?,
        )?)
    }

    fn separation(&self) -> Outcome<usize> {
        self.get("m", 2)
    }

    fn format(&self) -> Outcome<OutputFormat> {
        Ok(self.text("format", "csv").parse()?)
    }

    fn measure(&self, default: &str) -> Outcome<Measure> {
        Ok(self.text("measure", default).parse()?)
    }

    fn sink(&self) -> Outcome<Box<dyn Write>> {
        Ok(match self.raw("out") {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn number(x: f64) -> String {
    significant(x, cli::OUTPUT_DIGITS)
}

fn run(command: Command, s: &Settings) -> Outcome {
    if let Some(n) = s.raw("threads") {
        let n: usize = n
            .parse()
            .map_err(|_| Failure::Usage(format!("invalid value '{n}' for --threads")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let seed: u64 = s.get("seed", 42)?;

    match command {
        Command::Fm => {
            let params = s.params()?;
            let m = s.separation()?;
            let f = fermi_coefficients(m.max(4), &params)?;
            let mut out = s.sink()?;
            writeln!(out, "m,f_m")?;
            for (i, v) in f.values().iter().enumerate().take(m.max(4) + 1) {
                writeln!(out, "{i},{}", number(*v))?;
            }
            out.flush()?;
        }
        Command::Rdm => {
            let rdm = two_site_state(&s.params()?, s.separation()?)?;
            let mut out = s.sink()?;
            writeln!(out, "{}", rdm.pretty())?;
            out.flush()?;
        }
        Command::Measures => {
            let p = s.params()?;
            let grid = ScanGrid::new(
                p.coupling(),
                AxisRange::single(p.field())?,
                AxisRange::single(p.temperature())?,
                vec![s.separation()?],
                parse_measures(s.text("measure", "concurrence,mutual_info,cc,qd,qc"))?,
            )?;
            cli::emit(&cli::scan(&grid, seed)?, s.format()?, s.sink()?)?;
        }
        Command::Scan => {
            let grid = ScanGrid::new(
                s.get("J", 1.0)?,
                s.text("h-range", "0:1.5:200").parse()?,
                s.text("T-range", "0:2:200").parse()?,
                parse_separations(s.text("m", "2,3,4"))?,
                parse_measures(s.text("measure", "concurrence,mutual_info,cc,qd,qc"))?,
            )?;
            cli::emit(&cli::scan(&grid, seed)?, s.format()?, s.sink()?)?;
        }
        Command::Qpt => {
            let range: AxisRange = s.text("h-range", "0.5:1.5:1001").parse()?;
            let dh = match s.raw("dh") {
                Some(_) => s.get("dh", 0.0)?,
                None if range.steps > 1 => (range.stop - range.start) / (range.steps - 1) as f64,
                None => return Err(Failure::Usage("qpt needs --dh or a swept --h-range".into())),
            };
            let profile = cli::qpt_locate(
                s.get("J", 1.0)?,
                s.get("T", 0.0)?,
                range.start,
                range.stop,
                dh,
                s.measure("qd")?,
                s.separation()?,
            )?;
            println!(
                "peak h = {} ({} derivative {})",
                number(profile.peak_field),
                profile.measure,
                number(profile.peak_derivative)
            );
            if s.raw("out").is_some() {
                profile.write_csv(s.sink()?)?;
            }
        }
        Command::Onset => {
            let range: AxisRange = s.text("h-range", "0:1.5:2").parse()?;
            let h = cli::onset_locate(
                s.get("J", 1.0)?,
                s.get("T", 0.0)?,
                s.measure("concurrence")?,
                s.separation()?,
                range.start,
                range.stop,
                s.get("resolution", 1e-4)?,
                s.get("threshold", cli::ONSET_THRESHOLD)?,
            )?;
            let mut out = s.sink()?;
            writeln!(out, "{}", number(h))?;
            out.flush()?;
        }
        Command::Spectrum => {
            let params = ModelParams::new(s.get("J", 1.0)?, s.get("h", 0.0)?, 0.0)?;
            let spec = FiniteChainSpec::new(s.get("N", 8)?, params)?;
            let report = ed_oracle::spectrum_match(&spec)?;
            let mut out = s.sink()?;
            writeln!(out, "index,spin_energy,fermion_energy,abs_dev")?;
            for (i, (a, b)) in report.spin_energies.iter().zip(&report.fermion_energies).enumerate() {
                writeln!(out, "{i},{},{},{}", number(*a), number(*b), number((a - b).abs()))?;
            }
            out.flush()?;
            eprintln!("max |E_spin - E_fermion| = {:.3e}", report.max_abs_deviation);
        }
        Command::Validate { suite } => {
            let suites = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let mut ok = true;
            for suite in suites {
                let report = cli::validate(suite, seed)?;
                println!("{report}");
                ok &= report.passed();
            }
            if !ok {
                return Err(Failure::Validation);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = Settings::resolve(&cli.flags).and_then(|s| run(cli.command, &s));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(3)
        }
    }
}
