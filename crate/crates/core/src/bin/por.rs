use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use por_core::analysis::{
    dstar_lc_v1, max_n, parse_probability, table1, table1_csv, threshold, threshold_from, verifier_storage_lower_bound,
    MaxNMethod, ThresholdParams,
};
use por_core::audit::{omega_from_threshold, plan, Decision, Sampling};
use por_core::coding::{CodeKind, DEFAULT_CODEWORD_CAP};
use por_core::extractor::{extract, ProverSpec};
use por_core::keyed::{sw_keygen, sw_tag, SwKey, SwTag};
use por_core::schemes::{Scheme, SchemeConfig, SchemeKind};
use por_core::service::{
    audit_session, encode_bytes, precompute_pairs, remote_prover, write_atomic, AuditPlan, BlocksFile,
    PairStore, Server, ServerState, VerificationSource,
};
use por_core::Error;

const EXIT_INSUFFICIENT: u8 = 3;
const EXIT_TIE: u8 = 4;

#[derive(Parser)]
#[command(name = "por", version, about = "Proof-of-retrievability toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a raw file of 8-byte big-endian values into a blocks file.
    Encode(EncodeArgs),
    /// Precompute challenge-response pairs for bounded-use audits.
    Pairs(PairsArgs),
    /// Serve a blocks file to auditors.
    Serve(ServeArgs),
    /// Audit a remote prover.
    Audit(AuditArgs),
    /// Extract the message from a remote prover.
    Extract(ExtractArgs),
    /// Distances, thresholds and block-length bounds.
    Analyze {
        #[command(subcommand)]
        what: Analyze,
    },
    /// Choose an audit sample size.
    Plan(PlanArgs),
}

#[derive(Args, Clone, Default)]
struct SchemeArgs {
    /// Scheme config file (key=value lines).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<SchemeKind>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    /// `rs` or `matrix`.
    #[arg(long)]
    code_kind: Option<String>,
    #[arg(long)]
    code_file: Option<String>,
}

impl SchemeArgs {
    fn is_empty(&self) -> bool {
        self.config.is_none() && self.scheme.is_none() && self.q.is_none() && self.n.is_none() && self.k.is_none()
    }

    /// Config file values overridden by flags.
    fn config(&self) -> Result<SchemeConfig, Error> {
        let mut text = match &self.config {
            Some(p) => read_text(p)?,
            None => String::new(),
        };
        let mut set = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                text.push_str(&format!("\n{key}={v}"));
            }
        };
        set("scheme", self.scheme.map(|s| s.to_string()));
        set("q", self.q.map(|v| v.to_string()));
        set("n", self.n.map(|v| v.to_string()));
        set("k", self.k.map(|v| v.to_string()));
        set("ell", self.ell.map(|v| v.to_string()));
        set("code-kind", self.code_kind.clone());
        set("code-file", self.code_file.clone());
        // later lines win
        let mut merged: Vec<(String, String)> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("expected key=value, found '{line}'")))?;
            merged.retain(|(key, _)| key != k.trim());
            merged.push((k.trim().to_string(), v.trim().to_string()));
        }
        let flat: String = merged.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        let mut cfg = SchemeConfig::parse(&flat)?;
        if let (Some(file), Some(cfg_path)) = (&cfg.code_file, &self.config) {
            if self.code_file.is_none() && Path::new(file).is_relative() {
                let base = cfg_path.parent().unwrap_or(Path::new("."));
                cfg.code_file = Some(base.join(file).to_string_lossy().into_owned());
            }
        }
        Ok(cfg)
    }

    fn scheme(&self) -> Result<Scheme, Error> {
        self.config()?.build()
    }
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long)]
    out: PathBuf,
    /// Keyed scheme: where to write the verifier's key.
    #[arg(long)]
    key: Option<PathBuf>,
    /// Keyed scheme: where to write the tag handed to the prover.
    #[arg(long)]
    tag: Option<PathBuf>,
    /// Keyed scheme: key generation seed (random when absent).
    #[arg(long)]
    key_seed: Option<u64>,
}

#[derive(Args)]
struct PairsArgs {
    #[arg(long)]
    blocks: PathBuf,
    /// Message unit within the blocks file.
    #[arg(long, default_value_t = 0)]
    unit: usize,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    blocks: PathBuf,
    #[arg(long, default_value_t = 0)]
    unit: usize,
    /// Tag file for the keyed scheme.
    #[arg(long)]
    tag: Option<PathBuf>,
    /// Prover behaviour: honest, corrupt:<ordinals>, rate:<p>[:<seed>],
    /// decoy:<index>:<budget>[:<seed>].
    #[arg(long, default_value = "honest")]
    fault: String,
    #[arg(long)]
    listen: String,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    endpoint: String,
    /// Comma-separated `t=`, `alpha=`, `sampling=`, `seed=`, `omega=`.
    #[arg(long)]
    plan: String,
    /// Verify against precomputed pairs (consumed and rewritten).
    #[arg(long, conflicts_with_all = ["key", "blocks"])]
    pairs: Option<PathBuf>,
    /// Verify with the keyed scheme's key.
    #[arg(long, conflicts_with = "blocks")]
    key: Option<PathBuf>,
    /// Verify against a retained copy of the blocks file.
    #[arg(long)]
    blocks: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    unit: usize,
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Write the wire transcript (hex, one frame per line).
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    endpoint: String,
    /// Take the scheme from a blocks file header.
    #[arg(long)]
    blocks: Option<PathBuf>,
    #[command(flatten)]
    scheme: SchemeArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Estimate,
    Both,
}

#[derive(Subcommand)]
enum Analyze {
    /// Response-code distance: closed form and (when enumerable) brute force.
    Dstar(SchemeArgs),
    /// Extraction threshold for a scheme.
    Threshold(ThresholdArgs),
    /// Largest block count for which a success rate still guarantees extraction.
    MaxN {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        d: u64,
        /// Decimal or fraction.
        #[arg(long)]
        succ: String,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
    },
    /// Verifier storage lower bound for unkeyed schemes, in bits.
    LowerBound {
        #[arg(long)]
        k: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        gamma: f64,
        /// Size of the response alphabet.
        #[arg(long)]
        delta: f64,
    },
    /// Recompute the block-length table and compare with the published values.
    Table1 {
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Code distance; skips building the code (closed forms only).
    #[arg(long)]
    d: Option<u64>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long, default_value = "with_replacement")]
    sampling: Sampling,
    #[arg(long)]
    gamma: Option<u128>,
    #[arg(long)]
    omega: Option<u128>,
    /// Derive gamma and omega from a scheme.
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Success rate of the prover the audit should catch.
    #[arg(long)]
    succ_true: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.9)]
    power: f64,
    #[arg(long, default_value_t = 1000)]
    t_max: u64,
    /// Print every row, not just the summary.
    #[arg(long)]
    table: bool,
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parameter(_) | Error::InvalidParams(_) | Error::NotPrime(_) | Error::InvalidChallenge(_) => 10,
        Error::Io(_) | Error::Format(_) => 11,
        Error::Connection { .. } | Error::Protocol(_) | Error::Remote { .. } => 12,
        Error::StoreExhausted { .. } => 13,
        Error::TooLargeToEnumerate { .. } => 14,
        _ => 15,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 10 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Encode(a) => encode(a),
        Command::Pairs(a) => pairs(a),
        Command::Serve(a) => serve_cmd(a),
        Command::Audit(a) => audit(a),
        Command::Extract(a) => extract_cmd(a),
        Command::Analyze { what } => analyze(what),
        Command::Plan(a) => plan_cmd(a),
    }
}

fn encode(a: EncodeArgs) -> Result<u8, Error> {
    let scheme = a.scheme.scheme()?;
    let raw = fs::read(&a.input).map_err(|e| Error::Io(format!("{}: {e}", a.input.display())))?;
    let mut file = encode_bytes(&scheme, &raw)?;
    file.config = a.scheme.config()?;
    if scheme.kind() == SchemeKind::ShachamWaters {
        let (Some(key_path), Some(tag_path)) = (&a.key, &a.tag) else {
            return Err(Error::Parameter("the keyed scheme needs --key and --tag output paths".into()));
        };
        if file.units.len() != 1 {
            return Err(Error::Parameter(format!(
                "the keyed scheme encodes a single unit; input holds {} units of k={}",
                file.units.len(),
                scheme.code().k()
            )));
        }
        let seed = a.key_seed.unwrap_or_else(rand::random);
        let key = sw_keygen(scheme.field(), scheme.n(), seed);
        let tag = sw_tag(&key, file.units[0].blocks())?;
        write_atomic(key_path, &key.to_text())?;
        write_atomic(tag_path, &tag.to_text())?;
    } else if a.key.is_some() || a.tag.is_some() {
        return Err(Error::Parameter("--key/--tag apply to the keyed scheme only".into()));
    }
    write_atomic(&a.out, &file.to_text())?;
    println!("units={}", file.units.len());
    println!("n={}", scheme.n());
    Ok(0)
}

fn load_blocks(path: &Path) -> Result<BlocksFile, Error> {
    BlocksFile::from_text(&read_text(path)?)
}

fn pairs(a: PairsArgs) -> Result<u8, Error> {
    let file = load_blocks(&a.blocks)?;
    let scheme = file.scheme()?;
    let mut store = precompute_pairs(&scheme, file.unit(a.unit)?, a.count, a.seed)?;
    store.config = file.config.clone();
    store.save(&a.out)?;
    println!("count={}", store.count());
    Ok(0)
}

fn serve_cmd(a: ServeArgs) -> Result<u8, Error> {
    let file = load_blocks(&a.blocks)?;
    let scheme = file.scheme()?;
    let tag = a.tag.as_deref().map(|p| read_text(p).and_then(|t| SwTag::from_text(&t))).transpose()?;
    let fault: ProverSpec = a.fault.parse()?;
    let state = ServerState::new(scheme, file.unit(a.unit)?.clone(), tag, fault)?;
    let server = Server::bind(a.listen.as_str(), state)?;
    eprintln!("serving {} on {}", a.blocks.display(), server.local_addr()?);
    server.run()?;
    Ok(0)
}

fn parse_plan(text: &str) -> Result<AuditPlan, Error> {
    let mut plan = AuditPlan {
        t: 0,
        alpha: 0.05,
        sampling: Sampling::WithReplacement,
        seed: 0,
        omega: None,
    };
    let mut have_t = false;
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parameter(format!("plan entry '{part}' is not key=value")))?;
        let bad = || Error::Parameter(format!("bad plan value '{part}'"));
        match k.trim() {
            "t" => {
                plan.t = v.parse().map_err(|_| bad())?;
                have_t = true;
            }
            "alpha" => plan.alpha = v.parse().map_err(|_| bad())?,
            "sampling" => plan.sampling = v.parse()?,
            "seed" => plan.seed = v.parse().map_err(|_| bad())?,
            "omega" => plan.omega = Some(v.parse().map_err(|_| bad())?),
            other => return Err(Error::Parameter(format!("unknown plan key '{other}'"))),
        }
    }
    if !have_t || plan.t == 0 {
        return Err(Error::Parameter("plan needs t >= 1".into()));
    }
    Ok(plan)
}

fn audit(a: AuditArgs) -> Result<u8, Error> {
    let plan = parse_plan(&a.plan)?;
    let outcome = if let Some(path) = &a.pairs {
        let mut store = PairStore::load(path)?;
        let scheme = store.config.build()?;
        // consumption is persisted even when the session fails
        let result = audit_session(a.endpoint.as_str(), &scheme, &plan, VerificationSource::Store(&mut store));
        store.save(path)?;
        println!("cursor={}", store.cursor());
        result
    } else if let Some(path) = &a.key {
        let key = SwKey::from_text(&read_text(path)?)?;
        let scheme = a.scheme.scheme()?;
        audit_session(a.endpoint.as_str(), &scheme, &plan, VerificationSource::Key(&key))
    } else if let Some(path) = &a.blocks {
        let file = load_blocks(path)?;
        let scheme = file.scheme()?;
        audit_session(a.endpoint.as_str(), &scheme, &plan, VerificationSource::Local(file.unit(a.unit)?))
    } else {
        return Err(Error::Parameter("choose a verification source: --pairs, --key or --blocks".into()));
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(f) => {
            if let Some(p) = &a.transcript {
                write_atomic(p, &f.transcript.to_text())?;
            }
            return Err(f.error);
        }
    };
    if let Some(p) = &a.transcript {
        write_atomic(p, &outcome.transcript.to_text())?;
    }
    let feedback = outcome.transcript.check_no_feedback();
    print!("{}", outcome.report.to_text());
    let failed: Vec<String> = outcome.failed.iter().map(|o| o.to_string()).collect();
    println!("failed_ordinals={}", failed.join(","));
    println!("no_feedback={}", feedback.is_ok());
    feedback?;
    Ok(match outcome.report.decision {
        Decision::RejectH0 => 0,
        Decision::InsufficientEvidence => EXIT_INSUFFICIENT,
    })
}

fn extract_cmd(a: ExtractArgs) -> Result<u8, Error> {
    let scheme = match &a.blocks {
        Some(p) => load_blocks(p)?.scheme()?,
        None => a.scheme.scheme()?,
    };
    let mut prover = remote_prover(a.endpoint.as_str(), &scheme)?;
    let result = extract(&mut prover, &scheme)?;
    let m: Vec<String> = result.m_hat.values().iter().map(u64::to_string).collect();
    let c: Vec<String> = result.codeword.blocks().values().iter().map(u64::to_string).collect();
    println!("message={}", m.join(" "));
    println!("codeword={}", c.join(" "));
    println!("distance={}", result.distance);
    println!("tie={}", result.tie);
    println!("queries={}", result.queries);
    for t in prover.close() {
        t.check_no_feedback()?;
    }
    Ok(if result.tie { EXIT_TIE } else { 0 })
}

fn analyze(what: Analyze) -> Result<u8, Error> {
    let mut out = std::io::stdout().lock();
    match what {
        Analyze::Dstar(s) => {
            let scheme = s.scheme()?;
            let report = threshold(&scheme, DEFAULT_CODEWORD_CAP)?;
            writeln!(out, "scheme={}", scheme.kind()).ok();
            writeln!(out, "gamma={}", report.gamma).ok();
            writeln!(out, "d={}", report.params.d).ok();
            writeln!(out, "dstar_formula={}", report.dstar_formula).ok();
            if let Some(x) = &report.dstar_exact {
                writeln!(out, "dstar_exact={x}").ok();
            }
            if scheme.kind() == SchemeKind::LcV1 {
                let v1 = dstar_lc_v1(scheme.field().modulus(), scheme.n() as u32);
                writeln!(out, "dstar_count={}", v1.dstar_count).ok();
            }
            match scheme.response_code() {
                Ok(code) => writeln!(out, "dstar_bruteforce={}", code.dstar()).ok(),
                Err(Error::TooLargeToEnumerate { .. }) => writeln!(out, "dstar_bruteforce=not-enumerable").ok(),
                Err(e) => return Err(e),
            };
        }
        Analyze::Threshold(a) => {
            let report = match a.d {
                Some(d) => {
                    let cfg = a.scheme.config()?;
                    if cfg.code_kind != CodeKind::ReedSolomon && a.scheme.code_file.is_some() {
                        return Err(Error::Parameter("--d replaces the code; omit code-file".into()));
                    }
                    threshold_from(
                        &ThresholdParams {
                            kind: cfg.scheme,
                            q: cfg.q,
                            n: cfg.n as u64,
                            k: cfg.k as u64,
                            d,
                            ell: cfg.ell.map(|l| l as u64),
                        },
                        None,
                    )?
                }
                None => threshold(&a.scheme.scheme()?, DEFAULT_CODEWORD_CAP)?,
            };
            write!(out, "{}", report.to_text()).ok();
            // omega is only meaningful when gamma fits an audit
            let Ok(omega) = omega_from_threshold(&report) else {
                return Ok(0);
            };
            writeln!(out, "omega={}", omega.omega).ok();
            if omega.differs() {
                writeln!(out, "omega_from_threshold={}", omega.from_threshold).ok();
                writeln!(out, "omega_from_basic_form={}", omega.from_basic_form.unwrap_or(0)).ok();
            }
        }
        Analyze::MaxN { ell, d, succ, method } => {
            let succ = parse_probability(&succ)?;
            if matches!(method, MethodArg::Exact | MethodArg::Both) {
                writeln!(out, "max_n_exact={}", max_n(ell, d, &succ, MaxNMethod::Exact)?).ok();
            }
            if matches!(method, MethodArg::Estimate | MethodArg::Both) {
                writeln!(out, "max_n_estimate={}", max_n(ell, d, &succ, MaxNMethod::Estimate)?).ok();
            }
        }
        Analyze::LowerBound { k, q, gamma, delta } => {
            let b = verifier_storage_lower_bound(k, q, gamma, delta)?;
            writeln!(out, "bits={}", b.bits).ok();
            writeln!(out, "raw={}", b.raw).ok();
            writeln!(out, "unkeyed_feasible={}", b.unkeyed_feasible).ok();
        }
        Analyze::Table1 { csv } => {
            let rows = table1()?;
            if csv {
                write!(out, "{}", table1_csv(&rows)).ok();
            } else {
                writeln!(out, "{:>6} {:>6} {:>5} {:>12} {:>12}  flag", "ell", "d", "succ", "n_exact", "n_estimate").ok();
                for line in table1_csv(&rows).lines().skip(1) {
                    let f: Vec<&str> = line.split(',').collect();
                    writeln!(out, "{:>6} {:>6} {:>5} {:>12} {:>12}  {}", f[0], f[1], f[2], f[3], f[4], f[7]).ok();
                }
            }
        }
    }
    Ok(0)
}

fn plan_cmd(a: PlanArgs) -> Result<u8, Error> {
    let (gamma, omega) = if a.scheme.is_empty() {
        match (a.gamma, a.omega) {
            (Some(g), Some(w)) => (g, w),
            _ => return Err(Error::Parameter("give --gamma and --omega, or a scheme".into())),
        }
    } else {
        let derived = omega_from_threshold(&threshold(&a.scheme.scheme()?, DEFAULT_CODEWORD_CAP)?)?;
        (a.gamma.unwrap_or(derived.gamma), a.omega.unwrap_or(derived.omega))
    };
    let p = plan(a.sampling, gamma, omega, a.succ_true, a.alpha, a.power, a.t_max)?;
    if a.table {
        print!("{}", p.to_text());
    } else {
        let text = p.to_text();
        for line in text.lines().take_while(|l| !l.starts_with("t,")) {
            println!("{line}");
        }
        if let Some(t) = p.recommended_t {
            let row = &p.rows[t as usize - 1];
            println!("critical_g={}", row.critical_g.map_or("-".into(), |g| g.to_string()));
            println!("power={:.6}", row.power);
        }
    }
    println!("gamma={gamma}");
    println!("omega={omega}");
    Ok(0)
}
