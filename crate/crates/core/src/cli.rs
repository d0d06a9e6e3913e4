//! Command-line front end. [`run`] parses arguments, applies the optional
//! TOML config, sets the thread count and dispatches to one analysis.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::bias::{self, CkMethodTag, Pattern};
use crate::characters::{CharacterTable, PrimeContext, DEFAULT_A_CUTOFF, DEFAULT_MAX_Q};
use crate::correlations::{self, DEFAULT_PERIOD_CAP};
use crate::dedekind::{self, DedekindMethod, DftAlgorithm, TruncatedSpectrum, DEFAULT_SPECTRUM_CAP};
use crate::distribution::{DistKind, EmpiricalDistribution, Side, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::moments::{self, MomentKind, DEFAULT_TUPLE_BUDGET};
use crate::phi_error::{self, PhiAccumulator};
use crate::primes::{self, DEFAULT_X_CAP};
use crate::report::{Cell, Format, Record};

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// A computation failed (precondition or budget).
pub const EXIT_COMPUTATION: i32 = 1;
/// Invalid flags or arguments outside the domain.
pub const EXIT_USAGE: i32 = 2;
/// A resource cap or I/O failure.
pub const EXIT_RESOURCE: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Domain(_) => EXIT_USAGE,
        Error::Resource { .. } | Error::Io(_) => EXIT_RESOURCE,
        Error::Precondition(_) | Error::Budget { .. } => EXIT_COMPUTATION,
    }
}

#[derive(Debug, Parser)]
#[command(name = "sawspec", version, about = "Sawtooth spectra, Dedekind sums and prime-race bias constants")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write results to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "SAWSPEC_THREADS")]
    pub threads: Option<usize>,
    /// TOML file with defaults for format, threads and caps.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Defaults read from `--config`. Flags win over the file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub max_q: Option<u64>,
    pub period_cap: Option<u64>,
    pub tuple_budget: Option<u64>,
    pub x_cap: Option<u64>,
    pub a_cutoff: Option<u64>,
}

/// Validated settings shared by every subcommand.
#[derive(Debug)]
pub struct RunConfig {
    pub format: Format,
    pub threads: usize,
    pub output: Option<PathBuf>,
    pub max_q: u64,
    pub period_cap: u64,
    pub tuple_budget: u64,
    pub x_cap: u64,
    pub a_cutoff: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Dedekind sum s_q(a).
    Dedekind(DedekindArgs),
    /// Imaginary part of the spectrum s-hat_q(t), t = 0..q-1.
    Spectrum(SpectrumArgs),
    /// Bias constants C(k).
    Ck(CkArgs),
    /// c1 and c2 of a residue pattern.
    C2(C2Args),
    /// Correlation integral B(n_1, ..., n_l).
    Bcorr(BcorrArgs),
    /// Theoretical and model moments.
    Moments(MomentsArgs),
    /// Distribution statistics of C(k) or pi i s-hat_q(t).
    Dist(DistArgs),
    /// Totient summatory error R(x).
    Phi(PhiArgs),
    /// Consecutive-prime residue census.
    Primes(PrimesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DedekindArg {
    Direct,
    Reciprocity,
}

#[derive(Debug, Args)]
pub struct DedekindArgs {
    #[arg(long)]
    pub q: u64,
    /// Residue a; omit with --all.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<i64>,
    /// Emit s_q(a) for every a in 1..q-1 coprime to q.
    #[arg(long)]
    pub all: bool,
    #[arg(long, value_enum, default_value = "reciprocity")]
    pub method: DedekindArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SpectrumArg {
    Naive,
    ChirpZ,
    Truncated,
    Characters,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, value_enum, default_value = "chirp-z")]
    pub method: SpectrumArg,
    /// Truncation x for the truncated route (default q^2).
    #[arg(long)]
    pub x: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CkArg {
    Characters,
    Truncated,
}

#[derive(Debug, Args)]
pub struct CkArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, value_enum, default_value = "characters")]
    pub method: CkArg,
    /// Truncation N for the truncated route (default max(1000, q)).
    #[arg(long = "N", alias = "n")]
    pub n: Option<u64>,
    /// Single residue k instead of the full vector.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Cutoff of the A_{q,chi} series.
    #[arg(long)]
    pub a_cutoff: Option<u64>,
    /// Multiply values by 2/e^gamma.
    #[arg(long)]
    pub scale: bool,
}

#[derive(Debug, Args)]
pub struct C2Args {
    #[arg(long)]
    pub q: u64,
    /// Comma-separated residues a_1,...,a_r (r >= 2).
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub pattern: Vec<i64>,
    #[arg(long)]
    pub a_cutoff: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BcorrArg {
    Exact,
    Lattice,
    Discrete,
}

#[derive(Debug, Args)]
pub struct BcorrArgs {
    /// Comma-separated positive moduli.
    #[arg(long, value_delimiter = ',', required = true)]
    pub moduli: Vec<u64>,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: BcorrArg,
    /// Box size K for the lattice estimator.
    #[arg(long = "K", alias = "k", default_value_t = 100)]
    pub k: u64,
    /// Prime modulus for the discrete correlation.
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    C,
    S,
    R,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MomentRoute {
    /// Truncated multi-sum over correlation integrals.
    Theory,
    /// Exact integral of the continuous model C(x;B) (C^l omitted).
    ModelExact,
    /// Same quantity as a tuple sum over correlation integrals.
    ModelTuples,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub kind: KindArg,
    #[arg(long)]
    pub ell: u32,
    #[arg(long = "B", alias = "b")]
    pub b: u64,
    #[arg(long, value_enum, default_value = "theory")]
    pub route: MomentRoute,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DistStat {
    Summary,
    Ecdf,
    Histogram,
    Tails,
    Extremes,
    Period,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// C for C(k), s for pi i s-hat_q(t).
    #[arg(long, value_enum, ignore_case = true)]
    pub kind: KindArg,
    #[arg(long)]
    pub q: u64,
    #[arg(long, value_enum, default_value = "summary")]
    pub stat: DistStat,
    /// Shifts for the almost-periodicity statistic.
    #[arg(long, value_delimiter = ',', default_value = "60,61")]
    pub m: Vec<u64>,
    /// Histogram bin count (default Freedman-Diaconis).
    #[arg(long)]
    pub bins: Option<usize>,
    /// Scaled abscissae for tail frequencies.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2,2.5,3")]
    pub xs: Vec<f64>,
    #[arg(long)]
    pub a_cutoff: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PhiStat {
    Moments,
    Histogram,
    Signs,
    Model,
    Pair,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[arg(long)]
    pub y: u64,
    #[arg(long, value_enum, default_value = "moments")]
    pub stat: PhiStat,
    /// Largest moment order.
    #[arg(long, default_value_t = 4)]
    pub ell: u32,
    /// Truncation N for the model and pair statistics.
    #[arg(long = "N", alias = "n", default_value_t = 1000)]
    pub n: u64,
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PrimesArgs {
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    /// Emit the conjecture comparison for every reduced pattern.
    #[arg(long)]
    pub report: bool,
    #[arg(long)]
    pub a_cutoff: Option<u64>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn positive(name: &str, v: u64) -> Result<u64> {
    if v == 0 {
        Err(usage(format!("--{name} must be positive")))
    } else {
        Ok(v)
    }
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file: FileConfig = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let threads = cli.threads.or(file.threads).unwrap_or(0);
        if cli.threads == Some(0) {
            return Err(usage("--threads must be positive"));
        }
        Ok(RunConfig {
            format: cli.format.or(file.format).unwrap_or(Format::Csv),
            threads,
            output: cli.output.clone(),
            max_q: file.max_q.unwrap_or(DEFAULT_MAX_Q.min(DEFAULT_SPECTRUM_CAP)),
            period_cap: file.period_cap.unwrap_or(DEFAULT_PERIOD_CAP),
            tuple_budget: file.tuple_budget.unwrap_or(DEFAULT_TUPLE_BUDGET),
            x_cap: file.x_cap.unwrap_or(DEFAULT_X_CAP),
            a_cutoff: file.a_cutoff.unwrap_or(DEFAULT_A_CUTOFF),
        })
    }

    fn table(&self, q: u64, a_cutoff: Option<u64>) -> Result<CharacterTable> {
        let ctx = PrimeContext::with_cap(q, self.max_q)?;
        CharacterTable::build_with_context(ctx, a_cutoff.unwrap_or(self.a_cutoff))
    }
}

/// Parses `args`, runs the command and returns the exit status. Results go
/// to `out` (or the `--output` file), diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "sawspec: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::resolve(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    let record = pool.install(|| dispatch(&cli.command, &cfg))?;
    match &cfg.output {
        Some(path) => {
            let mut f = File::create(path)?;
            record.write(cfg.format, &mut f)?;
            f.flush()?;
        }
        None => record.write(cfg.format, out)?,
    }
    Ok(())
}

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Record> {
    match cmd {
        Command::Dedekind(a) => cmd_dedekind(a),
        Command::Spectrum(a) => cmd_spectrum(a, cfg),
        Command::Ck(a) => cmd_ck(a, cfg),
        Command::C2(a) => cmd_c2(a, cfg),
        Command::Bcorr(a) => cmd_bcorr(a, cfg),
        Command::Moments(a) => cmd_moments(a, cfg),
        Command::Dist(a) => cmd_dist(a, cfg),
        Command::Phi(a) => cmd_phi(a),
        Command::Primes(a) => cmd_primes(a, cfg),
    }
}

fn cmd_dedekind(a: &DedekindArgs) -> Result<Record> {
    positive("q", a.q)?;
    let method = match a.method {
        DedekindArg::Direct => DedekindMethod::Direct,
        DedekindArg::Reciprocity => DedekindMethod::Reciprocity,
    };
    let residues: Vec<i64> = match (a.a, a.all) {
        (Some(x), false) => vec![x],
        (None, true) => (1..a.q as i64).filter(|&x| crate::foundations::gcd(x as u64, a.q) == 1).collect(),
        _ => return Err(usage("give exactly one of --a or --all")),
    };
    let mut rec = Record::new("dedekind", vec!["q", "a", "s"]).param("method", format!("{:?}", a.method).to_lowercase());
    for x in residues {
        let s = dedekind::dedekind_sum(a.q, x, method)?;
        rec.push(vec![Cell::UInt(a.q), Cell::Int(x), Cell::Text(s.to_fraction_string())]);
    }
    Ok(rec)
}

fn cmd_spectrum(a: &SpectrumArgs, cfg: &RunConfig) -> Result<Record> {
    positive("q", a.q)?;
    let spec = match a.method {
        SpectrumArg::Naive => dedekind::spectrum_all_with_cap(a.q, DftAlgorithm::Naive, cfg.max_q)?,
        SpectrumArg::ChirpZ => dedekind::spectrum_all_with_cap(a.q, DftAlgorithm::ChirpZ, cfg.max_q)?,
        SpectrumArg::Truncated => {
            let x = match a.x {
                Some(x) => positive("x", x)?,
                None => a.q.checked_mul(a.q).ok_or_else(|| usage("q^2 overflows; give --x"))?,
            };
            let ctx = PrimeContext::with_cap(a.q, cfg.max_q)?;
            TruncatedSpectrum::with_context(ctx, x)?.spectrum()
        }
        SpectrumArg::Characters => dedekind::spectrum_from_characters(&cfg.table(a.q, Some(2))?),
    };
    let mut rec = Record::new("spectrum", vec!["t", "im_s_hat"])
        .param("q", a.q)
        .param("method", spec.method().as_str())
        .param("x", spec.truncation());
    for (t, v) in spec.values().iter().enumerate() {
        rec.push(vec![Cell::UInt(t as u64), Cell::Num(*v)]);
    }
    Ok(rec)
}

fn cmd_ck(a: &CkArgs, cfg: &RunConfig) -> Result<Record> {
    positive("q", a.q)?;
    let factor = if a.scale { 2.0 / EULER_GAMMA.exp() } else { 1.0 };
    let n = a.n.unwrap_or_else(|| bias::default_truncation(a.q));
    positive("N", n)?;
    let vector = match a.method {
        CkArg::Characters => bias::ck_all_characters(&cfg.table(a.q, a.a_cutoff)?)?,
        CkArg::Truncated => {
            crate::foundations::arith::require_odd_prime(a.q)?;
            if a.q > cfg.max_q {
                return Err(Error::resource("q", a.q, cfg.max_q));
            }
            bias::ck_all_truncated(a.q, n)?
        }
    };
    let mut rec = Record::new("ck", vec!["k", "c_k"])
        .param("q", a.q)
        .param("method", match vector.method() {
            CkMethodTag::Characters => "characters",
            CkMethodTag::Truncated => "truncated",
        })
        .param("truncation", vector.truncation())
        .param("scale", if a.scale { "2/e^gamma" } else { "1" })
        .field("max_asymmetry", vector.max_asymmetry())
        .field("max_imaginary", vector.max_imaginary());
    rec.csv_preamble = true;
    let ks: Vec<i64> = match a.k {
        Some(k) => {
            if k.rem_euclid(a.q as i64) == 0 {
                return Err(Error::domain("C(k) is undefined for k = 0 mod q"));
            }
            vec![k]
        }
        None => (1..a.q as i64).collect(),
    };
    for k in ks {
        rec.push(vec![Cell::Int(k), Cell::Num(factor * vector.get(k))]);
    }
    Ok(rec)
}

fn cmd_c2(a: &C2Args, cfg: &RunConfig) -> Result<Record> {
    positive("q", a.q)?;
    if a.pattern.len() < 2 {
        return Err(usage("--pattern needs at least two residues"));
    }
    let table = cfg.table(a.q, a.a_cutoff)?;
    let pattern = Pattern::new(a.q, &a.pattern)?;
    let c1 = bias::c1_pattern(&pattern);
    let c2 = bias::c2_pattern(&table, &pattern)?;
    let mut rec = Record::new("c2", vec![])
        .param("q", a.q)
        .param("a_cutoff", table.a_cutoff())
        .field("pattern", pattern.residues().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
        .field("c1", c1)
        .field("c2", c2);
    if pattern.len() == 2 {
        let (x, y) = (pattern.residues()[0] as i64, pattern.residues()[1] as i64);
        if x != y {
            let ck = bias::ck_point_complex(&table, y - x)?.re;
            let lq = (a.q as f64).ln();
            rec = rec
                .field("c2_over_q", c2 / a.q as f64)
                .field("c_of_difference", ck)
                .field("bridge_gap", (c2 / a.q as f64 - ck).abs())
                .field("bridge_scale", lq * lq / (a.q as f64).sqrt());
        }
    }
    Ok(rec)
}

fn cmd_bcorr(a: &BcorrArgs, cfg: &RunConfig) -> Result<Record> {
    if a.moduli.contains(&0) {
        return Err(usage("--moduli must be positive"));
    }
    let moduli_text = a.moduli.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    let rec = Record::new("bcorr", vec![]).field("moduli", moduli_text);
    match a.method {
        BcorrArg::Exact => {
            let v = correlations::b_exact_with_cap(&a.moduli, cfg.period_cap)?;
            Ok(rec
                .param("period_cap", cfg.period_cap)
                .field("method", "exact")
                .field("value", v.to_fraction_string())
                .field("value_num", v.numer().to_string())
                .field("value_den", v.denom().to_string())
                .field("value_float", v.to_f64())
                .field("error_bound", 0.0))
        }
        BcorrArg::Lattice => {
            let v = correlations::b_lattice_estimate(&a.moduli, positive("K", a.k)?)?;
            Ok(rec
                .param("K", a.k)
                .field("method", "lattice")
                .field("value_float", v)
                .field("error_bound", serde_json::Value::Null))
        }
        BcorrArg::Discrete => {
            let q = a.q.ok_or_else(|| usage("--q is required for the discrete correlation"))?;
            let v = correlations::discrete_correlation_exact(q, &a.moduli)?;
            Ok(rec
                .param("q", q)
                .field("method", "discrete")
                .field("value", v.to_fraction_string())
                .field("value_num", v.numer().to_string())
                .field("value_den", v.denom().to_string())
                .field("value_float", v.to_f64())
                .field("error_bound", correlations::discrete_bound(q, &a.moduli)))
        }
    }
}

fn moment_kind(k: KindArg) -> MomentKind {
    match k {
        KindArg::C => MomentKind::C,
        KindArg::S => MomentKind::S,
        KindArg::R => MomentKind::R,
    }
}

fn cmd_moments(a: &MomentsArgs, cfg: &RunConfig) -> Result<Record> {
    positive("B", a.b)?;
    if a.ell == 0 {
        return Err(usage("--ell must be positive"));
    }
    let kind = moment_kind(a.kind);
    let rec = Record::new("moments", vec![])
        .param("B", a.b)
        .field("kind", kind.as_str())
        .field("ell", a.ell)
        .field("B", a.b);
    match a.route {
        MomentRoute::Theory => {
            let est = moments::theoretical_moment_with_budget(kind, a.ell, a.b, cfg.tuple_budget)?;
            Ok(rec
                .param("tuple_budget", cfg.tuple_budget)
                .field("route", "theory")
                .field("value", est.value)
                .field("tail_note", est.tail_note)
                .field("pruned_mass", est.pruned_mass))
        }
        MomentRoute::ModelExact | MomentRoute::ModelTuples => {
            if kind != MomentKind::C {
                return Err(usage("model routes apply to kind C only"));
            }
            let v = match a.route {
                MomentRoute::ModelExact => moments::continuous_model_moment_exact(a.ell, a.b)?,
                _ => moments::model_tuple_sum_exact(a.ell, a.b)?,
            };
            Ok(rec
                .field("route", if matches!(a.route, MomentRoute::ModelExact) { "model-exact" } else { "model-tuples" })
                .field("value", v.to_f64())
                .field("value_exact", v.to_fraction_string())
                .field("tail_note", "pre-limit model moment with C^l omitted"))
        }
    }
}

fn cmd_dist(a: &DistArgs, cfg: &RunConfig) -> Result<Record> {
    positive("q", a.q)?;
    let dist = match a.kind {
        KindArg::C => EmpiricalDistribution::from_ck(&bias::ck_all_characters(&cfg.table(a.q, a.a_cutoff)?)?)?,
        KindArg::S => EmpiricalDistribution::from_spectrum(&dedekind::spectrum_all_with_cap(
            a.q,
            DftAlgorithm::ChirpZ,
            cfg.max_q,
        )?)?,
        KindArg::R => return Err(usage("dist supports kinds C and s; use `phi --stat histogram` for R")),
    };
    let label = match a.kind {
        KindArg::C => "C",
        _ => "s",
    };
    let base = |cols| {
        Record::new("dist", cols)
            .param("q", a.q)
            .field("kind", label)
            .field("scale", dist.scale())
    };
    Ok(match a.stat {
        DistStat::Summary => {
            let s = dist.summary();
            base(vec![])
                .field("count", s.count)
                .field("min", s.min)
                .field("max", s.max)
                .field("moments", s.moments)
                .field("symmetry_stat", s.symmetry_stat)
        }
        DistStat::Ecdf => {
            let mut rec = base(vec!["x", "F"]);
            for (x, f) in dist.ecdf_table(-4.0, 4.0, 161) {
                rec.push(vec![Cell::Num(x), Cell::Num(f)]);
            }
            rec
        }
        DistStat::Histogram => histogram_record(base(vec!["bin_lo", "bin_hi", "count"]), &dist, a.bins),
        DistStat::Tails => {
            let mut rec = base(vec!["x", "upper", "lower", "log_log_upper"]);
            for &x in &a.xs {
                let up = dist.tail_frequency(x, Side::Upper);
                let lo = dist.tail_frequency(x, Side::Lower);
                rec.push(vec![
                    Cell::Num(x),
                    Cell::Num(up.frequency),
                    Cell::Num(lo.frequency),
                    up.log_log.map(Cell::Num).unwrap_or(Cell::Text(String::new())),
                ]);
            }
            rec
        }
        DistStat::Extremes => {
            let e = dist.extremes();
            base(vec![])
                .field("min", e.min)
                .field("argmin", e.argmin)
                .field("max", e.max)
                .field("argmax", e.argmax)
                .field("ratio", e.ratio)
        }
        DistStat::Period => {
            let mut rec = base(vec!["m", "value", "pairs", "flagged"]);
            for &m in &a.m {
                let s = dist.almost_period_stat(m)?;
                rec.push(vec![
                    Cell::UInt(m),
                    Cell::Num(s.value),
                    Cell::UInt(s.pairs),
                    Cell::Text(s.flagged.to_string()),
                ]);
            }
            rec
        }
    })
}

fn histogram_record(mut rec: Record, dist: &EmpiricalDistribution, bins: Option<usize>) -> Record {
    rec = rec.param("bins", bins.map(|b| b.to_string()).unwrap_or_else(|| "freedman-diaconis".into()));
    for b in dist.histogram(bins) {
        rec.push(vec![Cell::Num(b.lo), Cell::Num(b.hi), Cell::UInt(b.count)]);
    }
    rec
}

fn cmd_phi(a: &PhiArgs) -> Result<Record> {
    if a.y < 2 {
        return Err(usage("--y must be at least 2"));
    }
    let acc = PhiAccumulator::new(a.y)?;
    let rec = Record::new("phi", vec![]).param("y", a.y);
    Ok(match a.stat {
        PhiStat::Moments => {
            if a.ell == 0 || a.ell > phi_error::MAX_ELL {
                return Err(usage(format!("--ell must be in 1..={}", phi_error::MAX_ELL)));
            }
            let mut rec = Record::new("phi", vec!["ell", "moment"]).param("y", a.y);
            for ell in 1..=a.ell {
                rec.push(vec![Cell::UInt(ell as u64), Cell::Num(phi_error::rtilde_moment_with(&acc, a.y, ell)?)]);
            }
            rec
        }
        PhiStat::Histogram => {
            // R~ at interval midpoints
            let samples: Vec<f64> = (1..a.y)
                .map(|m| phi_error::r_values(m as f64 + 0.5, &acc).map(|v| v.1))
                .collect::<Result<_>>()?;
            let dist = EmpiricalDistribution::new(DistKind::R, samples)?;
            let rec = Record::new("phi", vec!["bin_lo", "bin_hi", "count"])
                .param("y", a.y)
                .field("skewness", phi_error::rtilde_skewness(&acc, a.y)?);
            histogram_record(rec, &dist, a.bins)
        }
        PhiStat::Signs => {
            let s = phi_error::r_sign_changes(&acc, a.y)?;
            rec.field("sign_changes", s.changes)
                .field("positive_seen", s.positive_seen)
                .field("negative_seen", s.negative_seen)
        }
        PhiStat::Model => {
            positive("N", a.n)?;
            if (a.n as f64) >= a.y as f64 {
                return Err(usage("--N must be below --y"));
            }
            let gap = phi_error::model_mean_abs_gap(&acc, a.n, a.n as f64, a.y as f64, 20_000)?;
            rec.param("N", a.n).field("mean_abs_gap", gap)
        }
        PhiStat::Pair => {
            positive("N", a.n)?;
            let v = phi_error::pair_correlation_stat(a.n, a.y)?;
            let ly = (a.y as f64).ln();
            let nf = a.n as f64;
            rec.param("N", a.n)
                .field("statistic", v)
                .field("bound_shape", ly * ly * (nf + nf * nf * nf.sqrt() / (a.y as f64).sqrt()))
        }
    })
}

fn cmd_primes(a: &PrimesArgs, cfg: &RunConfig) -> Result<Record> {
    positive("q", a.q)?;
    if a.r == 0 {
        return Err(usage("--r must be positive"));
    }
    let census = primes::pattern_census_with_cap(a.x, a.q, a.r, cfg.x_cap)?;
    if !a.report {
        let mut rec = Record::new("primes", vec!["pattern", "count"])
            .param("x", a.x)
            .param("q", a.q)
            .param("r", a.r as u64);
        for (k, v) in &census.counts {
            let key = k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            rec.push(vec![Cell::Text(key), Cell::UInt(*v)]);
        }
        return Ok(rec);
    }
    let table = cfg.table(a.q, a.a_cutoff)?;
    let mut rec = Record::new(
        "primes",
        vec![
            "pattern",
            "observed",
            "main_term",
            "c1",
            "c2",
            "prediction1",
            "prediction2",
            "residual0",
            "residual1",
            "residual2",
        ],
    )
    .param("x", a.x)
    .param("q", a.q)
    .param("r", a.r as u64)
    .field("label", "conjecture comparison");
    for key in all_patterns(a.q, a.r) {
        let signed: Vec<i64> = key.iter().map(|&v| v as i64).collect();
        let p = Pattern::new(a.q, &signed)?;
        let rep = primes::conjecture_report(&census, &p, &table)?;
        rec.push(vec![
            Cell::Text(key.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")),
            Cell::UInt(rep.observed),
            Cell::Num(rep.main_term),
            Cell::Num(rep.c1),
            rep.c2.map(Cell::Num).unwrap_or(Cell::Text(String::new())),
            Cell::Num(rep.prediction1),
            Cell::Num(rep.prediction2),
            Cell::Num(rep.residual0),
            Cell::Num(rep.residual1),
            Cell::Num(rep.residual2),
        ]);
    }
    Ok(rec)
}

fn all_patterns(q: u64, r: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u64>| {
                (1..q).map(move |a| {
                    let mut v = p.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}
