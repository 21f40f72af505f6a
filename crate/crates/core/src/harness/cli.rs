//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::energy::{j_energy, t_energy, Algorithm};
use crate::error::{Error, Result};
use crate::expsum::{cs_bound_ratio, eval_f, eval_f_fft, restriction_ratio, ExpSumRow, WeightFunction};
use crate::field::PrimeContext;
use crate::harness::experiments::{incidence_rows, mobius_summary, prune_summary, HSource};
use crate::harness::fit::fit_exponent;
use crate::harness::manifest::{digest_file, projection, projections_match, sha256_hex, Manifest};
use crate::harness::sweep::{run_recursion, run_sweep, DEFAULT_PRIME_FACTOR};
use crate::harness::verify::{verify_suite, Fault, VerifyOptions};
use crate::moebius::EhAlgorithm;
use crate::setlib::{generate_set, ResidueSet, SetKind, SetSpec};
use crate::Limits;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "vmv", version, about = "Exact quadratic Vinogradov mean values over prime fields")]
struct Cli {
    /// Worker threads for counting kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SetArgs {
    /// Read the set from a set file.
    #[arg(long, conflicts_with_all = ["p", "kind", "n"])]
    set: Option<PathBuf>,
    /// Prime modulus for a generated set.
    #[arg(long)]
    p: Option<u64>,
    /// interval, random, quadratic-residues or geometric.
    #[arg(long)]
    kind: Option<String>,
    /// Size of the generated set.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generator for the geometric family.
    #[arg(long)]
    base: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Output file; a manifest is written beside it. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a set file.
    Gen {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// J_s(A) as a JSON row.
    Energy {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = 3)]
        s: usize,
        /// auto, brute, mitm or conv.
        #[arg(long, default_value = "auto")]
        algo: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// T(A) as a JSON row.
    TEnergy {
        #[command(flatten)]
        set: SetArgs,
        /// auto, brute or incidence.
        #[arg(long, default_value = "auto")]
        algo: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Incidence experiments as CSV.
    Incidence {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// E(H) for the Möbius family of the rich hyperbolae.
    MobiusEnergy {
        #[command(flatten)]
        set: SetArgs,
        /// brute or hash.
        #[arg(long, default_value = "hash")]
        algo: String,
        /// v (pruned V) or s (all of S).
        #[arg(long = "from", default_value = "v")]
        source: String,
        #[arg(long)]
        tau: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// L^q norm of the moment-curve exponential sum of 1_A.
    Expsum {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = 6)]
        q: u32,
        /// direct or fft.
        #[arg(long, default_value = "direct")]
        algo: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Partition of 2𝒜 − 𝒜 and rich-curve pruning.
    Prune {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        tau: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Size sweep with theorem and lower-bound ratios (JSONL, or CSV for a .csv output).
    Sweep {
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', default_value = "8,12,16,24,32")]
        sizes: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        s: usize,
        #[arg(long, default_value = "interval")]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        base: Option<u32>,
        /// Constant in the prime rule.
        #[arg(long, default_value_t = DEFAULT_PRIME_FACTOR)]
        c: u64,
        /// Emit recursion rows instead.
        #[arg(long)]
        recursion: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the verification suite.
    Verify {
        /// Time budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        budget: f64,
        /// Inject a fault: drop-m-nonzero.
        #[arg(long)]
        inject: Option<String>,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Re-run a manifest and compare outputs.
    Replay {
        manifest: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen { .. } => "gen",
            Command::Energy { .. } => "energy",
            Command::TEnergy { .. } => "t-energy",
            Command::Incidence { .. } => "incidence",
            Command::MobiusEnergy { .. } => "mobius-energy",
            Command::Expsum { .. } => "expsum",
            Command::Prune { .. } => "prune",
            Command::Sweep { .. } => "sweep",
            Command::Verify { .. } => "verify",
            Command::Replay { .. } => "replay",
        }
    }
}

/// Outcome of a subcommand that ran to completion.
enum Done {
    Ok,
    CheckFailed,
}

/// Output is buffered so the run can move onto a worker pool.
struct Run {
    manifest: Manifest,
    stdout: Vec<u8>,
    stderr: Vec<u8>,
    limits: Limits,
}

fn parse_kind(kind: &str, base: Option<u32>) -> Result<SetKind> {
    match kind {
        "interval" => Ok(SetKind::Interval),
        "random" => Ok(SetKind::Random),
        "quadratic-residues" | "qr" => Ok(SetKind::QuadraticResidues),
        "geometric" => match base {
            Some(base) => Ok(SetKind::Geometric { base }),
            None => Err(Error::InvalidArgument("--kind geometric needs --base".into())),
        },
        other => Err(Error::InvalidArgument(format!("unknown set kind {other:?}"))),
    }
}

fn parse_algo(s: &str, allowed: &[Algorithm]) -> Result<Algorithm> {
    let a: Algorithm = s.parse()?;
    if allowed.contains(&a) {
        Ok(a)
    } else {
        Err(Error::InvalidArgument(format!("--algo {s} is not available here")))
    }
}

fn json_line(v: &impl Serialize) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string(v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

fn is_csv(out: &Option<PathBuf>) -> bool {
    out.as_ref().and_then(|p| p.extension()).is_some_and(|e| e == "csv")
}

#[derive(Serialize)]
struct EnergyJson {
    p: u64,
    #[serde(rename = "|A|")]
    a_len: u64,
    s: usize,
    algo: String,
    value: String,
    elapsed_ms: f64,
}

#[derive(Serialize)]
struct TEnergyJson {
    p: u64,
    #[serde(rename = "|A|")]
    a_len: u64,
    algo: String,
    value: String,
    elapsed_ms: f64,
}

impl Run {
    fn load_set(&mut self, args: &SetArgs) -> Result<ResidueSet> {
        let a = if let Some(path) = &args.set {
            let text = std::fs::read_to_string(path)?;
            self.manifest.inputs.push(digest_file(path)?);
            ResidueSet::parse_file(&text)?
        } else {
            let missing = |f: &str| Error::InvalidArgument(format!("either --set or --{f} is required"));
            let p = args.p.ok_or_else(|| missing("p"))?;
            let kind = parse_kind(args.kind.as_deref().ok_or_else(|| missing("kind"))?, args.base)?;
            let n = args.n.ok_or_else(|| missing("n"))?;
            let spec = SetSpec { kind, n, seed: args.seed };
            self.manifest.seed = Some(args.seed);
            generate_set(PrimeContext::new(p)?, &spec)?
        };
        self.manifest.set_specs.push(a.provenance().to_string());
        self.manifest.primes.push(a.ctx().p64());
        Ok(a)
    }

    /// Write to `--out` (with a manifest) or to stdout.
    fn emit(&mut self, out: &OutArgs, bytes: &[u8]) -> Result<()> {
        match &out.out {
            Some(path) => {
                std::fs::write(path, bytes)?;
                self.manifest.outputs.push(digest_file(path)?);
            }
            None => self.stdout.extend_from_slice(bytes),
        }
        Ok(())
    }

    fn finish(&mut self, out: &OutArgs, start: Instant) -> Result<()> {
        if let Some(path) = &out.out {
            self.manifest.wall_clock_ms = start.elapsed().as_secs_f64() * 1e3;
            self.manifest.write(&Manifest::path_for(path))?;
        }
        Ok(())
    }

    fn dispatch(&mut self, cmd: Command) -> Result<Done> {
        let start = Instant::now();
        self.manifest.operations.push(cmd.name().to_string());
        match cmd {
            Command::Gen { set, out } => {
                let a = self.load_set(&set)?;
                self.emit(&out, a.to_file_string().as_bytes())?;
                self.finish(&out, start)?;
            }
            Command::Energy { set, s, algo, out } => {
                let algo = parse_algo(&algo, &[Algorithm::Auto, Algorithm::Brute, Algorithm::Mitm, Algorithm::Conv])?;
                let a = self.load_set(&set)?;
                let r = j_energy(&a, s, algo, &self.limits)?;
                let row = EnergyJson {
                    p: a.ctx().p64(),
                    a_len: a.len() as u64,
                    s,
                    algo: r.algo.name().to_string(),
                    value: r.value.to_string(),
                    elapsed_ms: r.elapsed_ms,
                };
                self.emit(&out, &json_line(&row)?)?;
                self.finish(&out, start)?;
            }
            Command::TEnergy { set, algo, out } => {
                let algo = parse_algo(&algo, &[Algorithm::Auto, Algorithm::Brute, Algorithm::Incidence])?;
                let a = self.load_set(&set)?;
                let r = t_energy(&a, algo, &self.limits)?;
                let row = TEnergyJson {
                    p: a.ctx().p64(),
                    a_len: a.len() as u64,
                    algo: r.algo.name().to_string(),
                    value: r.value.to_string(),
                    elapsed_ms: r.elapsed_ms,
                };
                self.emit(&out, &json_line(&row)?)?;
                self.finish(&out, start)?;
            }
            Command::Incidence { set, out } => {
                let a = self.load_set(&set)?;
                let rows = incidence_rows(&a, &self.limits)?;
                self.emit(&out, &csv_bytes(&rows)?)?;
                self.finish(&out, start)?;
            }
            Command::MobiusEnergy { set, algo, source, tau, out } => {
                let algo = match algo.as_str() {
                    "brute" => EhAlgorithm::Brute,
                    "hash" => EhAlgorithm::Hash,
                    other => return Err(Error::InvalidArgument(format!("--algo {other:?}: expected brute or hash"))),
                };
                let source = match source.as_str() {
                    "v" | "V" => HSource::V,
                    "s" | "S" => HSource::S,
                    other => return Err(Error::InvalidArgument(format!("--from {other:?}: expected v or s"))),
                };
                let a = self.load_set(&set)?;
                let summary = mobius_summary(&a, source, algo, tau, &self.limits)?;
                self.emit(&out, &json_line(&summary)?)?;
                self.finish(&out, start)?;
            }
            Command::Expsum { set, q, algo, out } => {
                if q == 0 {
                    return Err(Error::InvalidArgument("--q must be positive".into()));
                }
                let a = self.load_set(&set)?;
                let w = WeightFunction::indicator(&a);
                let grid = match algo.as_str() {
                    "direct" => eval_f(&w, &self.limits)?,
                    "fft" => eval_f_fft(&w, &self.limits)?,
                    other => return Err(Error::InvalidArgument(format!("--algo {other:?}: expected direct or fft"))),
                };
                let lq = grid.lq_norm(q);
                let l2 = w.l2_norm();
                let row = ExpSumRow {
                    p: a.ctx().p64(),
                    a_len: a.len() as u64,
                    q,
                    lq_norm: lq,
                    ratio_to_cs_bound: cs_bound_ratio(lq, a.len(), l2, q),
                    restriction_ratio: (q == 6).then(|| restriction_ratio(lq, a.len(), l2)),
                };
                self.emit(&out, &json_line(&row)?)?;
                self.finish(&out, start)?;
            }
            Command::Prune { set, tau, out } => {
                let a = self.load_set(&set)?;
                let summary = prune_summary(&a, tau, &self.limits)?;
                self.emit(&out, &json_line(&summary)?)?;
                self.finish(&out, start)?;
            }
            Command::Sweep { sizes, s, kind, seed, base, c, recursion, out } => {
                if s < 2 || (recursion && s < 3) {
                    return Err(Error::InvalidArgument(format!("--s {s} is too small")));
                }
                if c == 0 || sizes.contains(&0) {
                    return Err(Error::InvalidArgument("sizes and --c must be positive".into()));
                }
                let template = SetSpec { kind: parse_kind(&kind, base)?, n: 0, seed };
                self.manifest.seed = Some(seed);
                self.manifest.set_specs.push(template.kind.name().to_string());
                let csv = is_csv(&out.out);
                if recursion {
                    let rows = run_recursion(&template, &sizes, s, c, &self.limits)?;
                    self.manifest.primes = rows.iter().map(|r| r.p).collect();
                    let bytes = if csv { csv_bytes(&rows)? } else { jsonl(&rows)? };
                    self.emit(&out, &bytes)?;
                } else {
                    let rows = run_sweep(&template, &sizes, s, c, &self.limits)?;
                    self.manifest.primes = rows.iter().map(|r| r.p).collect();
                    let bytes = if csv { csv_bytes(&rows)? } else { jsonl(&rows)? };
                    self.emit(&out, &bytes)?;
                    let points: Vec<(f64, f64)> =
                        rows.iter().map(|r| (r.a_len as f64, r.j_s.parse::<f64>().unwrap_or(f64::NAN))).collect();
                    match fit_exponent(&points) {
                        Ok(fit) => {
                            let text = json_line(&fit)?;
                            match &out.out {
                                Some(path) => {
                                    let fit_path = sibling(path, ".fit.json");
                                    std::fs::write(&fit_path, &text)?;
                                    self.manifest.outputs.push(digest_file(&fit_path)?);
                                }
                                None => self.stderr.write_all(&text)?,
                            }
                        }
                        Err(e) => writeln!(self.stderr, "fit skipped: {e}")?,
                    }
                }
                self.finish(&out, start)?;
            }
            Command::Verify { budget, inject, seed, out } => {
                if !(budget > 0.0) {
                    return Err(Error::InvalidArgument("--budget must be positive".into()));
                }
                let inject = inject.as_deref().map(str::parse::<Fault>).transpose()?;
                self.manifest.seed = Some(seed);
                let report = verify_suite(&VerifyOptions { budget_secs: budget, seed, inject, limits: self.limits });
                self.emit(&out, &jsonl(&report.checks)?)?;
                self.finish(&out, start)?;
                for c in &report.checks {
                    writeln!(
                        self.stderr,
                        "{} {} ({} trials, {:.0} ms)",
                        if c.passed { "ok  " } else { "FAIL" },
                        c.name,
                        c.trials,
                        c.elapsed_ms
                    )?;
                }
                for (name, f) in report.failures() {
                    writeln!(self.stderr, "  {name}: {f}")?;
                }
                if !report.passed() {
                    return Ok(Done::CheckFailed);
                }
            }
            Command::Replay { manifest } => return self.replay(&manifest),
        }
        Ok(Done::Ok)
    }

    fn replay(&mut self, path: &Path) -> Result<Done> {
        let m = Manifest::read(path)?;
        let mut ok = true;
        for input in &m.inputs {
            let now = digest_file(Path::new(&input.path))?;
            if now.sha256 != input.sha256 {
                writeln!(self.stderr, "input {} changed since the manifest was written", input.path)?;
                ok = false;
            }
        }
        let Some(original) = m.outputs.first() else {
            return Err(Error::InvalidArgument("manifest records no outputs".into()));
        };
        let original_path = PathBuf::from(&original.path);
        let scratch = scratch_path(&original_path);
        let mut argv = vec!["vmv".to_string()];
        argv.extend(redirect_out(&m.argv, &scratch)?);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with_io(&argv, &mut out, &mut err);
        let outcome = (|| -> Result<bool> {
            if code != EXIT_OK {
                writeln!(self.stderr, "re-run exited with {code}: {}", String::from_utf8_lossy(&err).trim())?;
                return Ok(false);
            }
            let mut all = true;
            let redo = redirected_outputs(&m, &original_path, &scratch);
            for (recorded, fresh) in m.outputs.iter().zip(&redo) {
                let bytes = std::fs::read(fresh)?;
                let digest = sha256_hex(&projection(fresh, &bytes)?);
                let same = digest == recorded.sha256
                    || std::fs::read(&recorded.path).ok().is_some_and(|old| {
                        let p = Path::new(&recorded.path);
                        sha256_hex(&projection(p, &old).unwrap_or_default()) == recorded.sha256
                            && matches!(
                                (projection(p, &old), projection(fresh, &bytes)),
                                (Ok(a), Ok(b)) if projections_match(p, &a, &b)
                            )
                    });
                writeln!(self.stdout, "{} {}", if same { "match" } else { "MISMATCH" }, recorded.path)?;
                all &= same;
            }
            Ok(all)
        })();
        let redo = redirected_outputs(&m, &original_path, &scratch);
        for f in redo.iter().chain(std::iter::once(&Manifest::path_for(&scratch))) {
            let _ = std::fs::remove_file(f);
        }
        ok &= outcome?;
        Ok(if ok { Done::Ok } else { Done::CheckFailed })
    }
}

fn jsonl<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in rows {
        out.extend(json_line(r)?);
    }
    Ok(out)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    s.into()
}

/// A fresh temporary path with the same extension as `like`.
fn scratch_path(like: &Path) -> PathBuf {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let ext = like.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("vmv-replay-{}-{n}{ext}", std::process::id()))
}

/// Where the re-run writes each recorded output: the main output and its siblings.
fn redirected_outputs(m: &Manifest, original: &Path, scratch: &Path) -> Vec<PathBuf> {
    let orig = original.as_os_str().to_string_lossy().into_owned();
    m.outputs
        .iter()
        .map(|o| match o.path.strip_prefix(&orig) {
            Some(suffix) => sibling(scratch, suffix),
            None => PathBuf::from(&o.path),
        })
        .collect()
}

fn redirect_out(argv: &[String], to: &Path) -> Result<Vec<String>> {
    let target = to.display().to_string();
    let mut out = Vec::with_capacity(argv.len());
    let mut found = false;
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
            out.extend(["--out".to_string(), target.clone()]);
            found = true;
        } else if a.starts_with("--out=") {
            out.push(format!("--out={target}"));
            found = true;
        } else {
            out.push(a.clone());
        }
    }
    if found {
        Ok(out)
    } else {
        Err(Error::InvalidArgument("manifest argv has no --out".into()))
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit { .. } => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

/// Parse `argv` (program name first), run, and return the process exit code.
pub fn run_with_io(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().ansi().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let mut run = Run {
        manifest: Manifest::new("", &argv[1..]),
        stdout: Vec::new(),
        stderr: Vec::new(),
        limits: Limits::default(),
    };
    run.manifest.command = cli.command.name().to_string();
    let result = match cli.threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run.dispatch(cli.command)),
            Err(e) => Err(Error::InvalidArgument(e.to_string())),
        },
        None => run.dispatch(cli.command),
    };
    let code = match result {
        Ok(Done::Ok) => EXIT_OK,
        Ok(Done::CheckFailed) => EXIT_CHECK,
        Err(e) => {
            let _ = writeln!(run.stderr, "error: {e}");
            exit_code(&e)
        }
    };
    let _ = stdout.write_all(&run.stdout).and_then(|_| stdout.flush());
    let _ = stderr.write_all(&run.stderr);
    code
}

pub fn run(argv: &[String]) -> i32 {
    run_with_io(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
