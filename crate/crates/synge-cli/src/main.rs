//! Command-line front end: radial initial-value problems, shock
//! constructions, the spherical piston problem, certification runs, and
//! equation-of-state tables. Profiles are emitted as CSV, summaries as JSON
//! with 17-significant-digit decimal numbers; identical configurations
//! produce byte-identical outputs.
//!
//! Exit codes: 0 success, 1 certification failure, 2 usage error,
//! 3 solver failure.

use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use synge::certify::{self, CertifyOptions, GammaGrid};
use synge::eos::{self, GasKind};
use synge::flow::{self, FlowState, Regime, SimParams, TerminalEvent};
use synge::piston::{solve_piston, PistonProblem};
use synge::shock::{find_shock_sstar_opts, ShockRecord};

#[derive(Parser)]
#[command(
    name = "synge",
    version,
    about = "Self-similar radially symmetric relativistic Euler flows with Synge-type energies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the radial initial-value problem (smooth or shocked)
    Solve(SolveArgs),
    /// Solve the spherical piston problem
    Piston(PistonArgs),
    /// Run the certification suite and emit the report as JSON
    Certify(CertifyArgs),
    /// Tabulate the equation of state along a gamma grid
    EosTable(EosTableArgs),
}

fn parse_gas(s: &str) -> Result<GasKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Gas kind: mono (monatomic) or diat (diatomic)
    #[arg(long, env = "SYNGE_GAS", default_value = "mono", value_parser = parse_gas)]
    gas: GasKind,
    /// Spatial dimension
    #[arg(long = "dim", env = "SYNGE_DIM", default_value_t = 3)]
    dim: u32,
    /// Rest-state coldness gamma_0 = m c^2 / (k_B T_0)
    #[arg(long, env = "SYNGE_GAMMA0", default_value_t = 3.0)]
    gamma0: f64,
    /// Reference pressure p_0
    #[arg(long, env = "SYNGE_P0", default_value_t = 1.0)]
    p0: f64,
    /// Integration horizon in cs units
    #[arg(long = "s-max", env = "SYNGE_S_MAX", default_value_t = 50.0)]
    s_max: f64,
    /// Relative ODE tolerance
    #[arg(long = "tol-ode-rel", env = "SYNGE_TOL_ODE_REL", default_value_t = 1e-11)]
    tol_ode_rel: f64,
    /// Absolute ODE tolerance
    #[arg(long = "tol-ode-abs", env = "SYNGE_TOL_ODE_ABS", default_value_t = 1e-13)]
    tol_ode_abs: f64,
    /// Event root tolerance in s
    #[arg(long = "tol-event", env = "SYNGE_TOL_EVENT", default_value_t = 1e-12)]
    tol_event: f64,
    /// Profile CSV output path (stdout when omitted and no JSON requested)
    #[arg(long = "out-csv", env = "SYNGE_OUT_CSV")]
    out_csv: Option<PathBuf>,
    /// Summary JSON output path
    #[arg(long = "out-json", env = "SYNGE_OUT_JSON")]
    out_json: Option<PathBuf>,
    /// Number of profile rows
    #[arg(long, env = "SYNGE_SAMPLES", default_value_t = 512)]
    samples: usize,
}

impl CommonArgs {
    fn params(&self) -> SimParams {
        let mut p = SimParams::new(self.gas);
        p.d = self.dim;
        p.rel_tol = self.tol_ode_rel;
        p.abs_tol = self.tol_ode_abs;
        p.event_tol = self.tol_event;
        p.s_max = self.s_max;
        p
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Initial radial velocity u_0/c in (-1, 1)
    #[arg(long, env = "SYNGE_U0", allow_hyphen_values = true)]
    u0: f64,
    /// Shock bisection tolerance on |u_delta|
    #[arg(long = "tol-shock-u", env = "SYNGE_TOL_SHOCK_U", default_value_t = 1e-6)]
    tol_shock_u: f64,
}

#[derive(Args)]
struct PistonArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Piston speed alpha/c in (0, 1)
    #[arg(long, env = "SYNGE_ALPHA")]
    alpha: f64,
    /// Matching tolerance on |u(1/alpha) - alpha|
    #[arg(long = "tol-piston", env = "SYNGE_TOL_PISTON", default_value_t = 1e-8)]
    tol_piston: f64,
}

#[derive(Args)]
struct CertifyArgs {
    /// Lower end of the certification gamma grid
    #[arg(long = "gamma-min", env = "SYNGE_GAMMA_MIN")]
    gamma_min: Option<f64>,
    /// Upper end of the certification gamma grid
    #[arg(long = "gamma-max", env = "SYNGE_GAMMA_MAX")]
    gamma_max: Option<f64>,
    /// Grid point count (defaults to the standard 2048 + refinements)
    #[arg(long, env = "SYNGE_POINTS")]
    points: Option<usize>,
    /// Skip the shock-structure scenarios (faster subset report)
    #[arg(long, env = "SYNGE_SKIP_SHOCKS", default_value_t = false)]
    skip_shocks: bool,
    /// Report JSON output path (stdout when omitted)
    #[arg(long = "out-json", env = "SYNGE_OUT_JSON")]
    out_json: Option<PathBuf>,
    /// Test hook: flip one margin sign to exercise the failure path
    #[arg(long = "inject-fault", hide = true, default_value_t = false)]
    inject_fault: bool,
}

#[derive(Args)]
struct EosTableArgs {
    /// Gas kind: mono or diat
    #[arg(long, env = "SYNGE_GAS", default_value = "mono", value_parser = parse_gas)]
    gas: GasKind,
    #[arg(long = "gamma-min", env = "SYNGE_GAMMA_MIN", default_value_t = 1e-3)]
    gamma_min: f64,
    #[arg(long = "gamma-max", env = "SYNGE_GAMMA_MAX", default_value_t = 1e3)]
    gamma_max: f64,
    /// Number of rows (log-spaced)
    #[arg(long, env = "SYNGE_SAMPLES", default_value_t = 256)]
    samples: usize,
    /// CSV output path (stdout when omitted)
    #[arg(long = "out-csv", env = "SYNGE_OUT_CSV")]
    out_csv: Option<PathBuf>,
}

/// Decimal with 17 significant digits; round-trips f64 exactly.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct JsonWriter {
    out: String,
}

impl JsonWriter {
    fn new() -> Self {
        JsonWriter { out: String::new() }
    }

    fn raw(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn string(&mut self, s: &str) {
        let _ = write!(self.out, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
    }

    fn number(&mut self, x: f64) {
        if x.is_finite() {
            self.out.push_str(&num(x));
        } else {
            self.string(&format!("{x}"));
        }
    }
}

fn state_json(w: &mut JsonWriter, st: &FlowState) {
    w.raw("{\"u_over_c\":");
    w.number(st.u);
    w.raw(",\"gamma\":");
    w.number(st.gamma);
    w.raw(",\"p_over_p0\":");
    w.number(st.p);
    w.raw("}");
}

fn shock_json(w: &mut JsonWriter, rec: &ShockRecord) {
    w.raw("{\"cs_star\":");
    w.number(rec.s_star);
    w.raw(",\"sigma_over_c\":");
    w.number(rec.sigma);
    w.raw(",\"upstream\":");
    state_json(w, &rec.upstream);
    w.raw(",\"downstream\":");
    state_json(w, &rec.downstream);
    w.raw(",\"lax_margin\":");
    w.number(rec.lax_margin);
    w.raw(",\"entropy_ratio\":");
    w.number(rec.entropy_ratio);
    w.raw("}");
}

fn event_kind(ev: TerminalEvent) -> &'static str {
    match ev {
        TerminalEvent::None => "none",
        TerminalEvent::UHitsPhiA => "u_hits_phi_a",
        TerminalEvent::PHitsZero => "p_hits_zero",
        TerminalEvent::UHitsZero => "u_hits_zero",
        TerminalEvent::UHitsOneOverS => "u_hits_one_over_s",
        TerminalEvent::GHitsZero => "g_hits_zero",
        TerminalEvent::Horizon => "horizon",
    }
}

struct ProfileRow {
    cs: f64,
    state: FlowState,
    segment_id: usize,
}

fn write_profile(path: Option<&PathBuf>, regime: &str, rows: &[ProfileRow]) -> std::io::Result<()> {
    let mut out = String::from("cs,u_over_c,gamma,p_over_p0,regime,segment_id\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(r.cs),
            num(r.state.u),
            num(r.state.gamma),
            num(r.state.p),
            regime,
            r.segment_id
        );
    }
    match path {
        Some(p) => std::fs::write(p, out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn write_text(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<(), synge::Error> {
    let params = args.common.params();
    let p0 = args.common.p0;
    let initial = FlowState::new(args.u0, args.common.gamma0, p0)?;

    let (regime, rows, events, shock) = if args.u0 < 0.0 {
        let run = flow::find_blowup_sbar(&initial, &params)?;
        let rec = find_shock_sstar_opts(&run, &params, args.tol_shock_u, 64)?;
        let n = args.common.samples.max(8);
        let n_pre = (n * 3) / 4;
        let mut rows = Vec::with_capacity(n + 2);
        for k in 0..n_pre {
            let s = rec.s_star * k as f64 / n_pre as f64;
            rows.push(ProfileRow { cs: s, state: run.segment.state_at(s), segment_id: 0 });
        }
        rows.push(ProfileRow { cs: rec.s_star, state: rec.upstream, segment_id: 0 });
        // trailing constant state behind the shock
        let tail = FlowState { u: 0.0, gamma: rec.downstream.gamma, p: rec.downstream.p };
        rows.push(ProfileRow { cs: rec.s_star, state: tail, segment_id: 1 });
        let n_post = n - n_pre;
        for k in 1..=n_post {
            let s = rec.s_star + (params.s_max - rec.s_star) * k as f64 / n_post as f64;
            rows.push(ProfileRow { cs: s, state: tail, segment_id: 1 });
        }
        let events = vec![("u_hits_phi_a", run.s_bar), ("shock", rec.s_star)];
        (Regime::Shocked, rows, events, Some(rec))
    } else {
        let sol = flow::solve_radial(&initial, &params)?;
        let n = args.common.samples.max(2);
        let s_hi = sol.segments.last().expect("segments").s_end().min(params.s_max);
        let mut rows = Vec::with_capacity(n);
        for k in 0..n {
            let s = s_hi * k as f64 / (n - 1) as f64;
            let seg = sol
                .segments
                .iter()
                .find(|seg| s <= seg.s_end())
                .unwrap_or_else(|| sol.segments.last().expect("segments"));
            rows.push(ProfileRow { cs: s, state: seg.state_at(s), segment_id: 0 });
        }
        // make the terminal state exact
        if let Some(last) = rows.last_mut() {
            last.cs = s_hi;
            last.state = sol.segments.last().expect("segments").last_state();
        }
        let events: Vec<(&'static str, f64)> = sol
            .segments
            .iter()
            .filter(|seg| seg.terminal_event != TerminalEvent::None)
            .map(|seg| (event_kind(seg.terminal_event), seg.s_end()))
            .collect();
        (sol.regime, rows, events, None)
    };

    if let Some(csv) = args.common.out_csv.as_ref() {
        write_profile(Some(csv), &regime.to_string(), &rows).map_err(io_err)?;
    } else if args.common.out_json.is_none() {
        write_profile(None, &regime.to_string(), &rows).map_err(io_err)?;
    }

    let mut w = JsonWriter::new();
    w.raw("{\"regime\":");
    w.string(&regime.to_string());
    w.raw(",\"events\":[");
    for (i, (kind, cs)) in events.iter().enumerate() {
        if i > 0 {
            w.raw(",");
        }
        w.raw("{\"kind\":");
        w.string(kind);
        w.raw(",\"cs\":");
        w.number(*cs);
        w.raw("}");
    }
    w.raw("],\"shock\":");
    match &shock {
        Some(rec) => shock_json(&mut w, rec),
        None => w.raw("null"),
    }
    w.raw(",\"piston\":null}");
    if let Some(path) = args.common.out_json.as_ref() {
        write_text(Some(path), &w.out).map_err(io_err)?;
    }
    Ok(())
}

fn cmd_piston(args: &PistonArgs) -> Result<(), synge::Error> {
    let problem = PistonProblem {
        alpha: args.alpha,
        p0: args.common.p0,
        gamma0: args.common.gamma0,
        gas: args.common.gas,
        d: args.common.dim,
    };
    let sol = solve_piston(&problem, args.tol_piston)?;

    let n = args.common.samples.max(8);
    let n_rest = n / 3;
    let mut rows = Vec::with_capacity(n + 2);
    let rest = sol.shock.upstream;
    for k in 0..n_rest {
        let s = sol.s_p * k as f64 / n_rest as f64;
        rows.push(ProfileRow { cs: s, state: rest, segment_id: 0 });
    }
    rows.push(ProfileRow { cs: sol.s_p, state: rest, segment_id: 0 });
    rows.push(ProfileRow { cs: sol.s_p, state: sol.shock.downstream, segment_id: 1 });
    let n_arc = n - n_rest;
    for k in 1..=n_arc {
        let s = sol.s_p + (sol.s_tilde - sol.s_p) * k as f64 / n_arc as f64;
        rows.push(ProfileRow { cs: s, state: sol.arc.state_at(s), segment_id: 1 });
    }
    if let Some(csv) = args.common.out_csv.as_ref() {
        write_profile(Some(csv), "Piston", &rows).map_err(io_err)?;
    } else if args.common.out_json.is_none() {
        write_profile(None, "Piston", &rows).map_err(io_err)?;
    }

    let mut w = JsonWriter::new();
    w.raw("{\"regime\":\"Piston\",\"events\":[{\"kind\":\"shock\",\"cs\":");
    w.number(sol.s_p);
    w.raw("},{\"kind\":\"u_hits_one_over_s\",\"cs\":");
    w.number(sol.s_tilde);
    w.raw("}],\"shock\":");
    shock_json(&mut w, &sol.shock);
    w.raw(",\"piston\":{\"cs_P\":");
    w.number(sol.s_p);
    w.raw(",\"cs_tilde\":");
    w.number(sol.s_tilde);
    w.raw(",\"residual\":");
    w.number(sol.residual);
    w.raw("}}");
    if let Some(path) = args.common.out_json.as_ref() {
        write_text(Some(path), &w.out).map_err(io_err)?;
    }
    Ok(())
}

fn cmd_certify(args: &CertifyArgs) -> Result<bool, synge::Error> {
    let mut opts = CertifyOptions::default();
    if let (Some(lo), Some(hi)) = (args.gamma_min, args.gamma_max) {
        opts.grid = GammaGrid::plain(lo, hi, args.points.unwrap_or(256));
    } else if let Some(n) = args.points {
        opts.grid.n = n;
    }
    if args.skip_shocks {
        opts.scenarios.clear();
    }
    opts.inject_fault = args.inject_fault;
    let report = certify::run_all(&opts)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_text(args.out_json.as_ref(), &json).map_err(io_err)?;
    if !report.all_pass() {
        for c in report.checks.iter().filter(|c| !c.pass) {
            eprintln!("FAIL {} (margin {} at gamma = {})", c.name, c.worst_margin, c.arg_worst);
        }
    }
    Ok(report.all_pass())
}

fn cmd_eos_table(args: &EosTableArgs) -> Result<(), synge::Error> {
    let gas = args.gas;
    let mut out = String::from("gamma,h0,h1,Phi,e_over_p,e_p,p_epp,lambda_tilde\n");
    for &g in &certify::log_grid(args.gamma_min, args.gamma_max, args.samples.max(1)) {
        let phi = eos::phi(gas, g)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(g),
            num(synge::bessel::ratio_h(0, g)?),
            num(synge::bessel::ratio_h(1, g)?),
            num(phi),
            num(g * phi),
            num(eos::e_p(gas, g)?),
            num(eos::p_epp(gas, g)?),
            num(eos::char_speed(gas, g)?),
        );
    }
    match args.out_csv.as_ref() {
        Some(p) => std::fs::write(p, out).map_err(io_err)?,
        None => print!("{out}"),
    }
    Ok(())
}

fn io_err(e: std::io::Error) -> synge::Error {
    synge::Error::Inconsistency {
        context: "cli::io",
        message: e.to_string(),
    }
}

fn emit_error(json_path: Option<&PathBuf>, err: &synge::Error) {
    let mut w = JsonWriter::new();
    w.raw("{\"error\":{\"message\":");
    w.string(&err.to_string());
    w.raw("}}");
    eprintln!("{}", w.out);
    if let Some(path) = json_path {
        let _ = std::fs::write(path, &w.out);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Solve(args) => match cmd_solve(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                emit_error(args.common.out_json.as_ref(), &e);
                ExitCode::from(3)
            }
        },
        Command::Piston(args) => match cmd_piston(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                emit_error(args.common.out_json.as_ref(), &e);
                ExitCode::from(3)
            }
        },
        Command::Certify(args) => match cmd_certify(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                emit_error(args.out_json.as_ref(), &e);
                ExitCode::from(3)
            }
        },
        Command::EosTable(args) => match cmd_eos_table(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                emit_error(None, &e);
                ExitCode::from(3)
            }
        },
    }
}
