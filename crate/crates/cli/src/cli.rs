use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;

use inexpress::algebra::reduce;
use inexpress::certificate::{refuter_from_certificate, verify_certificate, Certificate, Report};
use inexpress::determinize::determinize_nbw;
use inexpress::game::{ArenaStats, Route};
use inexpress::hoa::{emit, parse_automaton, Parsed};
use inexpress::oracle::{enumerate_dpws, landweber_check, EnumerationSpec};
use inexpress::separation::{
    approx_start_with, approx_step, decide, ApproximationSession, Decision, Options, Status, Verdict, DEFAULT_CAP, DEFAULT_MAX_STEPS,
};
use inexpress::{make_gamma, DetOmegaAutomaton, Mode};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_REFUTED: i32 = 10;
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "inexpress", version, about = "Refuters, certificates and separators for deterministic omega-automata")]
pub struct Cli {
    /// Print machine-readable JSON reports.
    #[arg(long, global = true)]
    pub json: bool,
    /// Abort a game solve after this many seconds.
    #[arg(long, global = true, value_name = "SECS")]
    pub timeout: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the language is in the family; writes the witness.
    Decide {
        aut: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Write a certificate of non-membership.
    Certify {
        aut: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a certificate against one language or a pair.
    VerifyCert {
        cert: PathBuf,
        #[arg(required = true, num_args = 1..=2)]
        automata: Vec<PathBuf>,
    },
    /// Build the refuter a certificate describes.
    RefuterFromCert {
        cert: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether a separator exists in the family.
    Separate {
        aut1: PathBuf,
        aut2: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run the approximation loop.
    Approximate {
        aut: PathBuf,
        #[arg(long)]
        family: String,
        /// `always-Ck` or `round-robin`
        #[arg(long, conflicts_with = "interactive")]
        policy: Option<String>,
        #[arg(long)]
        interactive: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Session record path.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Structural check for deterministic Büchi recognizability.
    Landweber { aut: PathBuf },
    /// List every small parity automaton up to renumbering.
    Enumerate {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        letters: usize,
        #[arg(long, default_value = "0..2")]
        colors: String,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Mirror artifacts into this directory.
        #[arg(long)]
        artifacts: Option<PathBuf>,
    },
}

/// Reads an automaton file; nondeterministic Büchi input is determinized.
pub fn load_automaton(path: &Path) -> anyhow::Result<DetOmegaAutomaton> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_text(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_text(text: &str) -> anyhow::Result<DetOmegaAutomaton> {
    Ok(match parse_automaton(text)? {
        Parsed::Det(a) => a,
        Parsed::Nondet(n) => reduce(&determinize_nbw(&n, DEFAULT_CAP)?),
    })
}

fn load_certificate(path: &Path) -> anyhow::Result<Certificate> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Certificate::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn stem(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    name.split('.').next().filter(|s| !s.is_empty()).unwrap_or("out").to_string()
}

fn write_file(path: &Path, content: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Serialize)]
struct WitnessFile {
    kind: &'static str,
    states: usize,
    file: String,
}

#[derive(Debug, Serialize)]
struct CertificateFile {
    text: String,
    file: String,
}

#[derive(Debug, Serialize)]
struct DecideReport {
    decision: Decision,
    family: String,
    route: Route,
    stats: ArenaStats,
    witness: WitnessFile,
    certificate: Option<CertificateFile>,
}

fn headline(d: Decision) -> &'static str {
    match d {
        Decision::Recognizable => "RECOGNIZABLE",
        Decision::Separable => "SEPARABLE",
        Decision::Refuted => "REFUTED",
    }
}

fn exit_for(d: Decision) -> i32 {
    if d.is_positive() {
        EXIT_POSITIVE
    } else {
        EXIT_REFUTED
    }
}

struct Ctx<'a> {
    json: bool,
    timeout: Option<Duration>,
    input: &'a mut dyn BufRead,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn options(&self) -> Options {
        Options {
            deadline: self.timeout.map(|t| Instant::now() + t),
            ..Options::default()
        }
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) -> anyhow::Result<()> {
        writeln!(self.out, "{}", serde_json::to_string_pretty(value)?)?;
        Ok(())
    }
}

fn write_verdict(ctx: &mut Ctx, v: &Verdict, family: &str, out_dir: &Path, base: &str) -> anyhow::Result<i32> {
    let (witness, certificate) = match (v.automaton(), v.refuter()) {
        (Some(a), _) => {
            let path = out_dir.join(format!("{base}.witness.hoa"));
            write_file(&path, &emit(a))?;
            (
                WitnessFile {
                    kind: "automaton",
                    states: a.num_states(),
                    file: path.display().to_string(),
                },
                None,
            )
        }
        (None, Some(r)) => {
            let path = out_dir.join(format!("{base}.refuter.json"));
            write_file(&path, &serde_json::to_string_pretty(r)?)?;
            let cert = match v.certificate() {
                Some(c) => {
                    let cpath = out_dir.join(format!("{base}.cert.json"));
                    write_file(&cpath, &c.to_json())?;
                    Some(CertificateFile {
                        text: c.to_string(),
                        file: cpath.display().to_string(),
                    })
                }
                None => None,
            };
            (
                WitnessFile {
                    kind: "refuter",
                    states: r.num_states(),
                    file: path.display().to_string(),
                },
                cert,
            )
        }
        (None, None) => bail!("verdict without a witness"),
    };
    let report = DecideReport {
        decision: v.decision,
        family: family.to_string(),
        route: v.route,
        stats: v.stats,
        witness,
        certificate,
    };
    if ctx.json {
        ctx.emit_json(&report)?;
    } else {
        let o = &mut ctx.out;
        writeln!(o, "{}", headline(report.decision))?;
        writeln!(o, "family       {}", report.family)?;
        writeln!(o, "route        {}", if report.route == Route::Rabin { "rabin" } else { "generic" })?;
        writeln!(o, "arena        {} positions, {} edges", report.stats.positions, report.stats.edges)?;
        writeln!(o, "{:<12} {} states -> {}", report.witness.kind, report.witness.states, report.witness.file)?;
        if let Some(c) = &report.certificate {
            writeln!(o, "certificate  {} -> {}", c.text, c.file)?;
        }
    }
    Ok(exit_for(v.decision))
}

fn write_report(ctx: &mut Ctx, r: &Report) -> anyhow::Result<i32> {
    if ctx.json {
        ctx.emit_json(r)?;
    } else {
        writeln!(ctx.out, "{}", if r.valid { "VALID" } else { "INVALID" })?;
        for k in &r.checks {
            let side = match k.side {
                inexpress::certificate::Side::Inside => "inside ",
                inexpress::certificate::Side::Outside => "outside",
            };
            write!(ctx.out, "  {} {side} {}", if k.holds { "ok  " } else { "FAIL" }, k.pattern)?;
            match &k.counterexample {
                Some(w) => writeln!(ctx.out, "  counterexample {w}")?,
                None => writeln!(ctx.out)?,
            }
        }
    }
    Ok(if r.valid { EXIT_POSITIVE } else { EXIT_REFUTED })
}

fn print_step(ctx: &mut Ctx, s: &ApproximationSession) -> anyhow::Result<()> {
    if ctx.json {
        return Ok(());
    }
    let last = s.last();
    write!(
        ctx.out,
        "step {}: {} / {} states, {}",
        s.steps_taken(),
        last.l1.num_states(),
        last.l2.num_states(),
        headline(last.verdict.decision)
    )?;
    match s.certificate() {
        Some(c) => writeln!(ctx.out, " {c}")?,
        None => writeln!(ctx.out)?,
    }
    if s.status == Status::Running {
        for o in s.candidates() {
            match &o.error {
                None if o.available => writeln!(ctx.out, "  {}  {}", o.name, o.pattern)?,
                e => writeln!(ctx.out, "  {}  {}  (unavailable: {})", o.name, o.pattern, e.as_deref().unwrap_or("no pair"))?,
            }
        }
    }
    Ok(())
}

fn prompt(ctx: &mut Ctx, s: &ApproximationSession) -> anyhow::Result<String> {
    loop {
        write!(ctx.out, "choose a candidate: ")?;
        ctx.out.flush()?;
        let mut line = String::new();
        if ctx.input.read_line(&mut line)? == 0 {
            bail!("input closed before a choice was made");
        }
        let pick = line.trim();
        match s.resolve(pick) {
            Ok(name) if s.candidates().iter().any(|o| o.name == name && o.available) => return Ok(name),
            Ok(name) => writeln!(ctx.out, "`{name}` is not an available candidate")?,
            Err(e) => writeln!(ctx.out, "{e}")?,
        }
    }
}

#[derive(Debug, Serialize)]
struct ApproxReport {
    status: &'static str,
    steps: usize,
    choices: Vec<String>,
    session: String,
    separator: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn approximate(
    ctx: &mut Ctx,
    aut: &Path,
    family: &str,
    policy: Option<String>,
    interactive: bool,
    max_steps: usize,
    cap: usize,
    output: Option<PathBuf>,
) -> anyhow::Result<i32> {
    let l = load_automaton(aut)?;
    let g = make_gamma(family)?;
    let mut s = approx_start_with(&l, &g, max_steps, cap)?;
    let policy = policy.unwrap_or_else(|| "round-robin".into());
    print_step(ctx, &s)?;
    while s.status == Status::Running {
        let choice = if interactive { prompt(ctx, &s)? } else { s.resolve(&policy)? };
        if !ctx.json {
            writeln!(ctx.out, "choice: {choice}")?;
        }
        s = approx_step(s, &choice)?;
        print_step(ctx, &s)?;
    }
    let base = stem(aut);
    let session_path = output.unwrap_or_else(|| PathBuf::from(format!("{base}.session.json")));
    write_file(&session_path, &s.to_json())?;
    let mut separator = None;
    if let Status::Separated { separator: a } = &s.status {
        let p = session_path.with_file_name(format!("{base}.separator.hoa"));
        write_file(&p, &emit(a))?;
        separator = Some(p.display().to_string());
    }
    let report = ApproxReport {
        status: if separator.is_some() { "separated" } else { "exhausted" },
        steps: s.steps_taken(),
        choices: s.history.iter().filter_map(|h| h.choice.clone()).collect(),
        session: session_path.display().to_string(),
        separator,
    };
    if ctx.json {
        ctx.emit_json(&report)?;
    } else {
        let plural = if report.steps == 1 { "" } else { "s" };
        writeln!(ctx.out, "{} after {} step{plural}", report.status.to_uppercase(), report.steps)?;
        writeln!(ctx.out, "session      {}", report.session)?;
        if let Some(p) = &report.separator {
            writeln!(ctx.out, "separator    {p}")?;
        }
    }
    Ok(if report.separator.is_some() { EXIT_POSITIVE } else { EXIT_REFUTED })
}

fn parse_colors(text: &str) -> anyhow::Result<(u32, u32)> {
    let (a, b) = text.split_once("..").ok_or_else(|| anyhow!("color range must look like 0..2, got `{text}`"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn dispatch(ctx: &mut Ctx, command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Decide { aut, family, out_dir } => {
            let l = load_automaton(&aut)?;
            let v = decide(&Mode::recognize(l), &make_gamma(&family)?, &ctx.options())?;
            write_verdict(ctx, &v, &family, &out_dir, &stem(&aut))
        }
        Command::Separate {
            aut1,
            aut2,
            family,
            out_dir,
        } => {
            let (l1, l2) = (load_automaton(&aut1)?, load_automaton(&aut2)?);
            let v = decide(&Mode::separate(l1, l2), &make_gamma(&family)?, &ctx.options())?;
            write_verdict(ctx, &v, &family, &out_dir, &format!("{}-{}", stem(&aut1), stem(&aut2)))
        }
        Command::Certify { aut, family, output } => {
            let l = load_automaton(&aut)?;
            let g = make_gamma(&family)?;
            let v = decide(&Mode::recognize(l), &g, &ctx.options())?;
            if v.decision.is_positive() {
                if ctx.json {
                    ctx.emit_json(&serde_json::json!({ "decision": v.decision, "certificate": null }))?;
                } else {
                    writeln!(ctx.out, "{}: no certificate exists", headline(v.decision))?;
                }
                return Ok(EXIT_POSITIVE);
            }
            let c = v.certificate().ok_or_else(|| anyhow!("family `{family}` has no certificate shape"))?;
            let path = output.unwrap_or_else(|| PathBuf::from(format!("{}.cert.json", stem(&aut))));
            write_file(&path, &c.to_json())?;
            if ctx.json {
                ctx.emit_json(&serde_json::json!({
                    "decision": v.decision,
                    "certificate": c,
                    "text": c.to_string(),
                    "file": path.display().to_string(),
                }))?;
            } else {
                writeln!(ctx.out, "REFUTED")?;
                writeln!(ctx.out, "certificate  {c} -> {}", path.display())?;
            }
            Ok(EXIT_REFUTED)
        }
        Command::VerifyCert { cert, automata } => {
            let c = load_certificate(&cert)?;
            let mode = match automata.as_slice() {
                [a] => Mode::recognize(load_automaton(a)?),
                [a, b] => Mode::separate(load_automaton(a)?, load_automaton(b)?),
                _ => bail!("expected one automaton or a pair"),
            };
            let r = verify_certificate(&c, &mode)?;
            write_report(ctx, &r)
        }
        Command::RefuterFromCert { cert, output } => {
            let c = load_certificate(&cert)?;
            let r = refuter_from_certificate(&c)?;
            let path = output.unwrap_or_else(|| PathBuf::from(format!("{}.refuter.json", stem(&cert))));
            write_file(&path, &serde_json::to_string_pretty(&r)?)?;
            if ctx.json {
                ctx.emit_json(&serde_json::json!({ "states": r.num_states(), "file": path.display().to_string() }))?;
            } else {
                writeln!(ctx.out, "refuter      {} states -> {}", r.num_states(), path.display())?;
                write!(ctx.out, "{}", r.render())?;
            }
            Ok(EXIT_POSITIVE)
        }
        Command::Approximate {
            aut,
            family,
            policy,
            interactive,
            max_steps,
            cap,
            output,
        } => approximate(ctx, &aut, &family, policy, interactive, max_steps, cap, output),
        Command::Landweber { aut } => {
            let l = load_automaton(&aut)?;
            let dbw = landweber_check(&l);
            if ctx.json {
                ctx.emit_json(&serde_json::json!({ "dbw": dbw }))?;
            } else {
                writeln!(ctx.out, "{}", if dbw { "IN DBW" } else { "NOT IN DBW" })?;
            }
            Ok(if dbw { EXIT_POSITIVE } else { EXIT_REFUTED })
        }
        Command::Enumerate { states, letters, colors } => {
            let (low, high) = parse_colors(&colors)?;
            let spec = EnumerationSpec::new(states, letters, low, high)?;
            let docs: Vec<String> = enumerate_dpws(spec)?.map(|a| emit(&a)).collect();
            if ctx.json {
                ctx.emit_json(&serde_json::json!({ "count": docs.len(), "automata": docs }))?;
            } else {
                for d in &docs {
                    write!(ctx.out, "{d}")?;
                }
                writeln!(ctx.out, "# {} automata", docs.len())?;
            }
            Ok(EXIT_POSITIVE)
        }
        Command::Serve { port, host, artifacts } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port)).await?;
                writeln!(ctx.out, "listening on {}", listener.local_addr()?)?;
                ctx.out.flush()?;
                let app = crate::service::router(crate::service::AppState::new(artifacts));
                axum::serve(listener, app).await?;
                anyhow::Ok(())
            })?;
            Ok(EXIT_POSITIVE)
        }
    }
}

/// Runs one invocation and returns its exit code: 0 positive, 10 refuted, 1 error.
pub fn run_cli<I, T>(argv: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                EXIT_POSITIVE
            } else {
                let _ = write!(err, "{e}");
                EXIT_ERROR
            };
        }
    };
    let mut ctx = Ctx {
        json: cli.json,
        timeout: cli.timeout.map(Duration::from_secs_f64),
        input,
        out,
    };
    match dispatch(&mut ctx, cli.command) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}
