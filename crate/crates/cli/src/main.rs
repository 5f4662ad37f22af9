//! `qhecke`: expand series, verify registered identities, run the
//! root-of-unity duality grid.
//!
//! Exit status is 0 on success or equality, 1 when a verification finds a
//! difference, 2 on any usage or parameter error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qhecke::appell::{appell_m, g3, AppellSpec};
use qhecke::blocks::{th, theta_prod};
use qhecke::cyclo::duality_check;
use qhecke::family::{f_tm, g_tm, u_tm, FamilyParams};
use qhecke::format::{parse_monomial, series_json, series_text};
use qhecke::hecke::{fabc, theta_pm};
use qhecke::report::IdentityReport;
use qhecke::verify::{find_identity, list_identities, run_identity_with, Params, Weights};
use qhecke::{Error, QExp, QSeries, WeightedMonomial};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qhecke", version, about = "Exact q-series for Hecke-type double sums, Appell and theta functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Expand one function as a truncated series.
    Expand(ExpandArgs),
    /// Check a registered identity at the given order.
    Verify(VerifyArgs),
    /// Compare F_t^(m)(1/ζ_N) with U_t^(m)(-1; ζ_N) for N = 1..N-max.
    Duality(DualityArgs),
    /// List the registered identities.
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Fabc,
    Theta,
    ThetaPm,
    Appell,
    G3,
    GTm,
    FTm,
    UTm,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long, value_enum)]
    what: What,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<i64>,
    /// Monomial such as `q^1/7*x` or `-q^2*x^-1`.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Modulus exponent ρ of `q^ρ` for theta and Appell functions.
    #[arg(long, default_value = "1")]
    rho: String,
    #[arg(long, allow_hyphen_values = true)]
    order: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    identity: String,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    l: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<i64>,
    #[arg(long = "N")]
    big_n: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    g1: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    g2: Option<i64>,
    #[arg(long)]
    rho: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    order: String,
    /// Weight assignments, `x:1/7,y:1/11;x:1/11,y:-2/13`.
    #[arg(long, allow_hyphen_values = true)]
    weights: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct DualityArgs {
    #[arg(long)]
    t: i64,
    #[arg(long)]
    m: i64,
    #[arg(long = "N-max")]
    n_max: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// Usage or parameter problem: exit 2 with a one-line diagnostic.
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Usage {
        Usage(e.to_string())
    }
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, Usage> {
    v.ok_or_else(|| Usage(format!("--{name} is required here")))
}

fn monomial(v: &Option<String>, name: &str, default: Option<&str>) -> Result<WeightedMonomial, Usage> {
    match (v.as_deref(), default) {
        (Some(s), _) | (None, Some(s)) => Ok(parse_monomial(s)?),
        (None, None) => Err(Usage(format!("--{name} is required here"))),
    }
}

fn rational(s: &str, name: &str) -> Result<QExp, Usage> {
    s.parse().map_err(|_| Usage(format!("--{name}: expected an integer or n/d, got `{s}`")))
}

fn expand(a: &ExpandArgs) -> Result<QSeries, Usage> {
    let order = rational(&a.order, "order")?;
    let rho = rational(&a.rho, "rho")?;
    let s = match a.what {
        What::Fabc => {
            let x = monomial(&a.x, "x", None)?;
            let y = monomial(&a.y, "y", None)?;
            fabc(need(a.a, "a")?, need(a.b, "b")?, need(a.c, "c")?, &x, &y, order)?
        }
        What::Theta => {
            if !rho.is_positive() {
                return Err(Usage("--rho must be positive".into()));
            }
            theta_prod(&th(monomial(&a.x, "x", None)?, rho), order)
        }
        What::ThetaPm => theta_pm(need(a.t, "t")?, need(a.p, "p")?, need(a.m, "m")?, order)?,
        What::Appell => {
            let spec = AppellSpec::new(monomial(&a.x, "x", None)?, monomial(&a.z, "z", None)?, rho)?;
            appell_m(&spec, order)?
        }
        What::G3 => g3(&monomial(&a.x, "x", None)?, order)?,
        What::GTm => g_tm(&FamilyParams::new(need(a.t, "t")?, need(a.m, "m")?, monomial(&a.x, "x", Some("x"))?, order))?,
        What::FTm => f_tm(&FamilyParams::new(need(a.t, "t")?, need(a.m, "m")?, monomial(&a.x, "x", Some("x"))?, order))?,
        What::UTm => u_tm(need(a.t, "t")?, need(a.m, "m")?, &monomial(&a.x, "x", Some("x"))?, order)?,
    };
    Ok(s)
}

fn parse_weights(s: &str) -> Result<Vec<Weights>, Usage> {
    let mut out = Vec::new();
    for group in s.split(';').filter(|g| !g.trim().is_empty()) {
        let mut w = Weights::new(QExp::zero(), QExp::zero());
        for item in group.split(',') {
            let (k, v) = item.split_once(':').ok_or_else(|| Usage(format!("--weights: expected var:rational, got `{item}`")))?;
            let v = rational(v.trim(), "weights")?;
            match k.trim() {
                "x" => w.x = v,
                "y" => w.y = v,
                other => return Err(Usage(format!("--weights: unknown variable `{other}`"))),
            }
        }
        out.push(w);
    }
    if out.is_empty() {
        return Err(Usage("--weights: no assignment given".into()));
    }
    Ok(out)
}

/// Report JSON without the wall-clock field, so reruns are byte-identical.
fn stable_json(rep: &IdentityReport) -> serde_json::Value {
    let mut v = rep.to_json();
    if let Some(o) = v.as_object_mut() {
        o.remove("runtime_ms");
    }
    v
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
}

fn run(cli: Cli) -> Result<ExitCode, Usage> {
    match cli.cmd {
        Cmd::Expand(a) => {
            let s = expand(&a)?;
            match a.format {
                Format::Text => emit(&series_text(&s)),
                Format::Json => emit(&format!("{}\n", series_json(&s))),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify(v) => {
            find_identity(&v.identity)?;
            let order = rational(&v.order, "order")?;
            let given = [
                ("t", v.t),
                ("m", v.m),
                ("p", v.p),
                ("l", v.l),
                ("a", v.a),
                ("b", v.b),
                ("c", v.c),
                ("n", v.n),
                ("N", v.big_n),
                ("g1", v.g1),
                ("g2", v.g2),
                ("rho", v.rho),
                ("k", v.k),
            ];
            let params: Params = given.iter().filter_map(|(k, val)| val.map(|x| (k.to_string(), x))).collect();
            let weights = v.weights.as_deref().map(parse_weights).transpose()?;
            let rep = run_identity_with(&v.identity, &params, order, weights.as_deref())?;
            match v.format {
                Format::Text => emit(&format!("{rep}\n")),
                Format::Json => emit(&format!("{}\n", stable_json(&rep))),
            }
            Ok(if rep.is_equal() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Duality(d) => {
            if d.t < 1 || d.m < 1 || d.m > d.t {
                return Err(Usage(format!("need 1 <= m <= t, got t = {}, m = {}", d.t, d.m)));
            }
            if d.n_max < 1 {
                return Err(Usage("--N-max must be at least 1".into()));
            }
            let mut all = true;
            let mut rows = Vec::new();
            for n in 1..=d.n_max {
                let rep = duality_check(d.t, d.m, n)?;
                all &= rep.is_equal();
                rows.push(rep);
            }
            match d.format {
                Format::Text => {
                    let mut text = String::new();
                    for r in &rows {
                        text.push_str(&format!("N={:<3} {}\n", r.params["N"], r.verdict));
                        if let Some(diff) = &r.difference {
                            text.push_str(&format!("      F: {}\n      U: {}\n", diff.left, diff.right));
                        }
                    }
                    text.push_str(&format!("t={} m={}: {}\n", d.t, d.m, if all { "all equal" } else { "differences found" }));
                    emit(&text);
                }
                Format::Json => {
                    let v = json!({"t": d.t, "m": d.m, "all_equal": all, "rows": rows.iter().map(stable_json).collect::<Vec<_>>()});
                    emit(&format!("{v}\n"));
                }
            }
            Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::List { format } => {
            match format {
                Format::Text => {
                    let mut text = String::new();
                    for d in list_identities() {
                        let ps: Vec<String> = d.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
                        text.push_str(&format!("{:<20} [{}]  {}\n", d.name, ps.join(" "), d.anchor));
                    }
                    emit(&text);
                }
                Format::Json => {
                    let v: Vec<_> = list_identities()
                        .iter()
                        .map(|d| {
                            json!({
                                "name": d.name,
                                "anchor": d.anchor,
                                "params": d.params.iter().map(|p| json!({"name": p.name, "default": p.default})).collect::<Vec<_>>(),
                                "weights": d.default_weights().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    emit(&format!("{}\n", serde_json::Value::Array(v)));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {}", msg.lines().next().unwrap_or(""));
            ExitCode::from(2)
        }
    }
}
