//! Command-line surface for the `nearlift` library.
//!
//! Exposes class-number tables, the exact polynomial families, trace
//! functionals, and half-integral-weight lift expansions as deterministic
//! JSON (or CSV for scalar tables). All floating-point output uses a fixed
//! 17-significant-digit format, so identical flags produce byte-identical
//! output and every float survives a parse round trip exactly.
//!
//! Exit codes: 0 success, 2 usage error, 3 violated precondition,
//! 4 numerical certification failure.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::complex::Complex64;

use nearlift::bqf::hurwitz;
use nearlift::lift::{evaluate_lift, lift_e2k, lift_jE2, lift_nearly_hol, LiftExpansion, LiftKind};
use nearlift::modular::{Coeff, NearlyHolForm};
use nearlift::poly::{e_poly, hermite, omega_poly, p_poly, pi_poly, q_poly};
use nearlift::trace::{trace_cm, trace_cycle, trace_square, twisted_trace, TraceValue};
use nearlift::Error;

// ---------------------------------------------------------------------------
// Command-line grammar
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "nearlift",
    version,
    about = "Class numbers, exact polynomial families, modular traces, and lift expansions"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Truncation order of q-expansions.
    #[arg(long = "q-order", default_value_t = 64, global = true)]
    q_order: i64,
    /// Gauss-Legendre node count for numerical integrals.
    #[arg(long = "quad-nodes", default_value_t = 128, global = true)]
    quad_nodes: usize,
    /// Certification tolerance for evaluations and tail bounds.
    #[arg(long, default_value_t = 1e-8, global = true)]
    tol: f64,
    /// Regularization cutoff for split-geodesic traces.
    #[arg(long = "reg-T", default_value_t = 8.0, global = true)]
    reg_t: f64,
    /// Output format (lift expansions are JSON-only).
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,
    /// Working precision; computation is IEEE binary64 in both modes, the
    /// flag is accepted for interface compatibility.
    #[arg(long, value_enum, default_value_t = Precision::Double, global = true)]
    precision: Precision,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Precision {
    Double,
    Extended,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceKind {
    Cm,
    Cycle,
    Square,
    Twisted,
}

#[derive(Subcommand)]
enum Command {
    /// Table of Hurwitz class numbers H(n) for n in [LO, HI].
    Classnum { lo: u64, hi: u64 },
    /// Print one member of an exact polynomial family
    /// (families: P, Q, He, Pi, Omega, E).
    Poly { family: String, index: i64 },
    /// Trace functionals: CM traces, geodesic cycle traces, regularized
    /// square-index traces, and genus-character twists.
    Trace {
        #[arg(value_enum)]
        kind: TraceKind,
        /// Discriminant (negative for cm, positive for cycle/square).
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
        /// Twisting fundamental discriminant.
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        /// Second discriminant of a twisted trace.
        #[arg(long = "D", allow_hyphen_values = true)]
        big_d: Option<i64>,
        /// Input form: J, E2star, JE2star, E2k:<k> (the k-th power of
        /// (pi/3)*E2star), or file:<path> (serialized form).
        #[arg(long, default_value = "J")]
        form: String,
    },
    /// Assemble a lift expansion (theorems: cycjE2, E2klift, liftnoc0k).
    Lift {
        theorem: String,
        /// Twisting fundamental discriminant (cycjE2).
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        /// Half-integral weight parameter k (E2klift; optional cross-check
        /// against the input weight for liftnoc0k).
        #[arg(long)]
        k: Option<i64>,
        /// Input form for liftnoc0k (same grammar as `trace --form`).
        #[arg(long)]
        form: Option<String>,
        /// Largest exponent magnitude to assemble.
        #[arg(long, default_value_t = 8)]
        dmax: i64,
    },
}

// ---------------------------------------------------------------------------
// Failure handling
// ---------------------------------------------------------------------------

enum Failure {
    Usage(String),
    Core(Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(Error::Domain(_)) => 2,
            Failure::Core(Error::Precondition(_)) => 3,
            Failure::Core(Error::Certification(_)) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage error: {m}"),
            Failure::Core(e) => e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    validate_config(&cli.config)?;
    match &cli.command {
        Command::Classnum { lo, hi } => cmd_classnum(&cli.config, *lo, *hi),
        Command::Poly { family, index } => cmd_poly(family, *index),
        Command::Trace {
            kind,
            d,
            delta,
            big_d,
            form,
        } => cmd_trace(&cli.config, *kind, *d, *delta, *big_d, form),
        Command::Lift {
            theorem,
            delta,
            k,
            form,
            dmax,
        } => cmd_lift(&cli.config, theorem, *delta, *k, form.as_deref(), *dmax),
    }
}

fn validate_config(cfg: &ConfigArgs) -> Result<(), Failure> {
    if cfg.q_order <= 0 {
        return Err(Failure::Usage("--q-order must be positive".into()));
    }
    if cfg.quad_nodes == 0 {
        return Err(Failure::Usage("--quad-nodes must be positive".into()));
    }
    if !cfg.tol.is_finite() || cfg.tol <= 0.0 || cfg.tol >= 1.0 {
        return Err(Failure::Usage("--tol must lie in (0, 1)".into()));
    }
    if !cfg.reg_t.is_finite() || cfg.reg_t <= 0.0 {
        return Err(Failure::Usage("--reg-T must be positive".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Deterministic float and JSON formatting
// ---------------------------------------------------------------------------

/// Format with at most 17 significant digits (printf `%.17g` semantics):
/// every binary64 value round-trips exactly and identical inputs always
/// produce identical bytes.
fn fmt_g17(x: f64) -> String {
    fn trim(mut s: String) -> String {
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("scientific notation");
    let x10: i32 = exp.parse().expect("exponent");
    if (-4..17).contains(&x10) {
        let prec = (16 - x10).max(0) as usize;
        trim(format!("{x:.prec$}"))
    } else {
        let m = trim(mant.to_string());
        format!("{m}e{}{:02}", if x10 < 0 { '-' } else { '+' }, x10.abs())
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// classnum
// ---------------------------------------------------------------------------

fn cmd_classnum(cfg: &ConfigArgs, lo: u64, hi: u64) -> CmdResult {
    if lo > hi {
        return Err(Failure::Usage(format!("empty range: {lo} > {hi}")));
    }
    let rows: Vec<(u64, String)> = (lo..=hi)
        .filter(|n| n % 4 == 0 || n % 4 == 3)
        .map(|n| (n, hurwitz(n).to_string()))
        .collect();
    match cfg.output {
        Output::Json => {
            if rows.is_empty() {
                return Ok("[]".into());
            }
            let mut out = String::from("[\n");
            for (i, (n, h)) in rows.iter().enumerate() {
                let sep = if i + 1 < rows.len() { "," } else { "" };
                let _ = writeln!(out, "  {{ \"n\": {n}, \"H\": \"{h}\" }}{sep}");
            }
            out.push(']');
            Ok(out)
        }
        Output::Csv => {
            let mut out = String::from("n,H");
            for (n, h) in &rows {
                let _ = write!(out, "\n{n},{h}");
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// poly
// ---------------------------------------------------------------------------

fn cmd_poly(family: &str, index: i64) -> CmdResult {
    let nonneg = |index: i64| -> Result<usize, Failure> {
        usize::try_from(index)
            .map_err(|_| Failure::Usage(format!("family {family} needs a nonnegative index")))
    };
    let rendered = match family {
        "P" => p_poly(index).to_string(),
        "Q" => q_poly(index).to_string(),
        "He" => hermite(nonneg(index)?).to_string(),
        "Pi" => pi_poly(nonneg(index)?).to_string(),
        "Omega" => omega_poly(nonneg(index)?).to_string(),
        "E" => e_poly(nonneg(index)?).to_string(),
        other => {
            return Err(Failure::Usage(format!(
                "unknown family {other}; expected one of P, Q, He, Pi, Omega, E"
            )))
        }
    };
    Ok(rendered)
}

// ---------------------------------------------------------------------------
// Form resolution
// ---------------------------------------------------------------------------

fn resolve_form(spec: &str, q_order: i64) -> Result<NearlyHolForm, Failure> {
    match spec {
        "J" => Ok(NearlyHolForm::j_normalized(q_order)?),
        "E2star" => Ok(NearlyHolForm::e2_star(q_order)),
        "JE2star" => {
            Ok(NearlyHolForm::j_normalized(q_order)?.multiply(&NearlyHolForm::e2_star(q_order)))
        }
        _ => {
            if let Some(k) = spec.strip_prefix("E2k:") {
                let k: u32 = k.parse().map_err(|_| {
                    Failure::Usage(format!("bad power in form spec {spec}; expected E2k:<k>"))
                })?;
                let base = NearlyHolForm::e2_star(q_order)
                    .scale(&Coeff::Float(std::f64::consts::PI / 3.0));
                Ok(base.power(k))
            } else if let Some(path) = spec.strip_prefix("file:") {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read form file {path}: {e}")))?;
                serde_json_parse_form(&text)
            } else {
                Err(Failure::Usage(format!(
                    "unknown form spec {spec}; expected J, E2star, JE2star, E2k:<k>, or file:<path>"
                )))
            }
        }
    }
}

fn serde_json_parse_form(text: &str) -> Result<NearlyHolForm, Failure> {
    nearlift::modular::form_from_json(text).map_err(Failure::Core)
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

fn cmd_trace(
    cfg: &ConfigArgs,
    kind: TraceKind,
    d: Option<i64>,
    delta: Option<i64>,
    big_d: Option<i64>,
    form: &str,
) -> CmdResult {
    let f = resolve_form(form, cfg.q_order)?;
    let need = |v: Option<i64>, flag: &str| {
        v.ok_or_else(|| Failure::Usage(format!("trace kind needs {flag}")))
    };
    let (label, indices, tv): (&str, Vec<(&str, i64)>, TraceValue) = match kind {
        TraceKind::Cm => {
            let d = need(d, "--d")?;
            ("cm", vec![("d", d)], trace_cm(&f, d)?)
        }
        TraceKind::Cycle => {
            let d = need(d, "--d")?;
            ("cycle", vec![("d", d)], trace_cycle(&f, d, cfg.quad_nodes)?)
        }
        TraceKind::Square => {
            let d = need(d, "--d")?;
            (
                "square",
                vec![("d", d)],
                trace_square(&f, d, cfg.reg_t, cfg.quad_nodes)?,
            )
        }
        TraceKind::Twisted => {
            let delta = need(delta, "--delta")?;
            let big_d = need(big_d, "--D")?;
            (
                "twisted",
                vec![("delta", delta), ("D", big_d)],
                twisted_trace(&f, delta, big_d, cfg.reg_t, cfg.quad_nodes)?,
            )
        }
    };
    let reg = tv.regularization_t;
    match cfg.output {
        Output::Json => {
            let mut out = String::from("{\n");
            let _ = writeln!(out, "  \"kind\": \"{label}\",");
            for (name, v) in &indices {
                let _ = writeln!(out, "  \"{name}\": {v},");
            }
            let _ = writeln!(out, "  \"value\": {},", fmt_g17(tv.value));
            let _ = writeln!(out, "  \"err\": {},", fmt_g17(tv.err));
            let reg_text = reg.map_or("null".into(), fmt_g17);
            let _ = writeln!(out, "  \"regularization_T\": {reg_text}");
            out.push('}');
            Ok(out)
        }
        Output::Csv => {
            let mut head = String::from("kind");
            let mut row = label.to_string();
            for (name, v) in &indices {
                let _ = write!(head, ",{name}");
                let _ = write!(row, ",{v}");
            }
            let reg_text = reg.map_or(String::new(), fmt_g17);
            Ok(format!(
                "{head},value,err,regularization_T\n{row},{},{},{reg_text}",
                fmt_g17(tv.value),
                fmt_g17(tv.err)
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// lift
// ---------------------------------------------------------------------------

fn kind_name(kind: LiftKind) -> &'static str {
    match kind {
        LiftKind::Holo => "holo",
        LiftKind::YPow => "ypow",
        LiftKind::HShape => "h_shape",
        LiftKind::JShape => "J_shape",
        LiftKind::IShape => "I_shape",
        LiftKind::LogShape => "log_shape",
        LiftKind::Const => "const",
    }
}

/// Render a lift expansion with fixed field order and `%.17g` floats; the
/// output re-parses (via the library's JSON reader) into an equal expansion.
fn render_lift(lift: &LiftExpansion) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"theorem\": \"{}\",", json_escape(&lift.theorem));
    let _ = writeln!(out, "  \"k\": {},", lift.k);
    if let Some(delta) = lift.delta {
        let _ = writeln!(out, "  \"delta\": {delta},");
    }
    let _ = writeln!(out, "  \"terms\": [");
    for (i, t) in lift.terms.iter().enumerate() {
        let params: Vec<String> = t.params.iter().map(|&p| fmt_g17(p)).collect();
        let sep = if i + 1 < lift.terms.len() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{ \"d\": {}, \"kind\": \"{}\", \"coeff_re\": {}, \"coeff_im\": {}, \"params\": [{}] }}{sep}",
            t.d,
            kind_name(t.kind),
            fmt_g17(t.coeff_re),
            fmt_g17(t.coeff_im),
            params.join(", ")
        );
    }
    let _ = writeln!(out, "  ],");
    let tols = &lift.meta.tolerances;
    let _ = writeln!(out, "  \"meta\": {{");
    let _ = writeln!(out, "    \"d_max\": {},", lift.meta.d_max);
    let _ = writeln!(
        out,
        "    \"tolerances\": {{ \"tol\": {}, \"reg_t\": {}, \"quad_nodes\": {} }}",
        fmt_g17(tols.tol),
        fmt_g17(tols.reg_t),
        tols.quad_nodes
    );
    let _ = writeln!(out, "  }}");
    out.push('}');
    out
}

fn cmd_lift(
    cfg: &ConfigArgs,
    theorem: &str,
    delta: Option<i64>,
    k: Option<i64>,
    form: Option<&str>,
    dmax: i64,
) -> CmdResult {
    if cfg.output == Output::Csv {
        return Err(Failure::Usage(
            "lift expansions are JSON-only (nested shapes)".into(),
        ));
    }
    let lift = match theorem {
        "cycjE2" => {
            let delta = delta.ok_or_else(|| Failure::Usage("lift cycjE2 needs --delta".into()))?;
            lift_jE2(delta, dmax, cfg.quad_nodes, cfg.reg_t)?
        }
        "E2klift" => {
            let k = k.ok_or_else(|| Failure::Usage("lift E2klift needs --k".into()))?;
            lift_e2k(k, dmax, cfg.quad_nodes, cfg.reg_t)?
        }
        "liftnoc0k" => {
            let spec = form.ok_or_else(|| Failure::Usage("lift liftnoc0k needs --form".into()))?;
            let f = resolve_form(spec, cfg.q_order)?;
            if let Some(k) = k {
                if f.weight() != 2 * k {
                    return Err(Failure::Usage(format!(
                        "--k {k} expects weight {}, but the form has weight {}",
                        2 * k,
                        f.weight()
                    )));
                }
            }
            lift_nearly_hol(&f, dmax, cfg.quad_nodes, cfg.reg_t)?
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown theorem {other}; expected cycjE2, E2klift, or liftnoc0k"
            )))
        }
    };
    // Certify the truncation tail at a representative point before emitting.
    evaluate_lift(&lift, Complex64::new(0.13, 1.0), cfg.tol)?;
    Ok(render_lift(&lift))
}
