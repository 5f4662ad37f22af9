//! The identity registry. Each entry builds both sides of one identity for
//! given integer parameters and compares them exactly below the requested
//! order, once per weight assignment of the formal variables.

use std::collections::BTreeMap;

use crate::appell::{
    appell_factor, g3, lerch_kernel, lerch_kernel_rhs, double_geometric, double_geometric_rhs, rhs_general_fabc,
    rhs_general_hecke, rhs_thetaless,
};
use crate::blocks::{
    eta_factor, poch_finite, sum_of_products, th, theta_factor, theta_inverse_factor, theta_prod, theta_sum, Factor, Term,
};
use crate::cyclo;
use crate::error::{Error, Result};
use crate::family::{
    f1m_closed, f_tm, f_tm_corollary, f_tm_from_u, f_tm_main, g_tm, restricted_double_sum, theta_pm_via_hecke, twee_sides,
    u_tm, FamilyParams,
};
use crate::format::parse_monomial;
use crate::hecke::{fabc, quad_sum_half, theta_pm, theta_pm_star};
use crate::int::Int;
use crate::qring::{FormalVar, LaurentCoeff, QExp, QSeries, WeightedMonomial};
use crate::report::{IdentityReport, Stopwatch};

/// Integer parameters by name.
pub type Params = BTreeMap<String, i64>;

pub fn params(list: &[(&str, i64)]) -> Params {
    list.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Weights of the formal variables `x` and `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Weights {
    pub x: QExp,
    pub y: QExp,
}

impl Weights {
    pub fn new(x: QExp, y: QExp) -> Weights {
        Weights { x, y }
    }
}

impl std::fmt::Display for Weights {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x:{},y:{}", self.x, self.y)
    }
}

pub struct ParamSpec {
    pub name: &'static str,
    pub default: i64,
}

const fn ps(name: &'static str, default: i64) -> ParamSpec {
    ParamSpec { name, default }
}

/// `((nx, dx), (ny, dy))`: x = nx/dx, y = ny/dy.
type WeightPair = ((i64, i64), (i64, i64));

type Builder = fn(&Ctx, &mut IdentityReport) -> Result<()>;

pub struct IdentityDescriptor {
    pub name: &'static str,
    pub anchor: &'static str,
    pub params: &'static [ParamSpec],
    /// `((nx, dx), (ny, dy))` weight pairs; empty when no variable carries a weight.
    weights: &'static [WeightPair],
    build: Builder,
}

impl IdentityDescriptor {
    pub fn default_weights(&self) -> Vec<Weights> {
        self.weights.iter().map(|&((a, b), (c, d))| Weights::new(QExp::new(a, b), QExp::new(c, d))).collect()
    }

    pub fn uses_weights(&self) -> bool {
        !self.weights.is_empty()
    }
}

struct Ctx {
    params: Params,
    weights: Weights,
    order: QExp,
}

impl Ctx {
    fn p(&self, name: &str) -> i64 {
        self.params[name]
    }

    fn x(&self) -> WeightedMonomial {
        WeightedMonomial::generic(FormalVar::X1, self.weights.x)
    }

    fn y(&self) -> WeightedMonomial {
        WeightedMonomial::generic(FormalVar::Y1, self.weights.y)
    }

    fn fam(&self, x: WeightedMonomial) -> FamilyParams {
        FamilyParams::new(self.p("t"), self.p("m"), x, self.order)
    }
}

fn qi(n: i64) -> QExp {
    QExp::int(n)
}

fn qr(n: i64, d: i64) -> QExp {
    QExp::new(n, d)
}

fn qm(e: QExp) -> WeightedMonomial {
    WeightedMonomial::q(e)
}

fn one() -> WeightedMonomial {
    WeightedMonomial::one()
}

const W_ONE: &[WeightPair] = &[((1, 7), (1, 11)), ((1, 11), (-2, 13))];
const W_HECKE: &[WeightPair] = &[((2, 7), (3, 7)), ((3, 11), (2, 13))];
const W_KERNEL: &[WeightPair] = &[((1, 7), (5, 11)), ((3, 13), (7, 11))];
const NONE: &[WeightPair] = &[];

const TPM: &[ParamSpec] = &[ps("t", 2), ps("p", 1), ps("m", 1)];
const TM: &[ParamSpec] = &[ps("t", 2), ps("m", 1)];
const ABC: &[ParamSpec] = &[ps("a", 1), ps("b", 2), ps("c", 1)];

static REGISTRY: &[IdentityDescriptor] = &[
    IdentityDescriptor { name: "lem-theta-a", anchor: "lem:theta (a): θ_{p,m} = q^{p+t} θ_{p+2t,m}, θ*_{p+2t,m} = θ*_{p,m}", params: TPM, weights: NONE, build: lem_theta_a },
    IdentityDescriptor { name: "lem-theta-b", anchor: "lem:theta (b): θ_{p,m} = -q^{-m-t+1/2} θ_{p,m+2t-1}, θ*_{p,m+2t-1} = -θ*_{p,m}", params: TPM, weights: NONE, build: lem_theta_b },
    IdentityDescriptor { name: "lem-theta-c", anchor: "lem:theta (c): θ_{-p,m} = θ_{p,-m} = -θ_{p,m}, same for θ*", params: TPM, weights: NONE, build: lem_theta_c },
    IdentityDescriptor { name: "lem-lem2-g", anchor: "lem:lem2: \"a functional equation for both\", the g_{t,m} form", params: TM, weights: W_ONE, build: lem2_g },
    IdentityDescriptor { name: "lem-lem2-f", anchor: "lem:lem2: \"a functional equation for both\", the f_{t,m} form", params: TM, weights: W_ONE, build: lem2_f },
    IdentityDescriptor { name: "theo-main", anchor: "theo:main: \"For t >= 2 and 1 <= m < t\"", params: TM, weights: W_ONE, build: theo_main },
    IdentityDescriptor { name: "theo-twee", anchor: "theo:twee: \"1 <= m < t and ℓ ∈ Z\"", params: &[ps("t", 2), ps("m", 1), ps("l", 1)], weights: NONE, build: theo_twee },
    IdentityDescriptor { name: "theo-general-hecke", anchor: "theo:general-hecke: \"positive integers such that D := b^2 - ac > 0\"", params: ABC, weights: W_HECKE, build: general_hecke },
    IdentityDescriptor { name: "theo-general-fabc", anchor: "theo:general-fabc: \"most general identity for Hecke-type\"", params: ABC, weights: W_ONE, build: general_fabc },
    IdentityDescriptor { name: "cor-main", anchor: "cor:main: \"in terms of double-sums\"; t, m index U_t^{(m)}", params: TM, weights: W_ONE, build: cor_main },
    IdentityDescriptor { name: "lem-thetaToHecke", anchor: "lem:thetaToHecke: \"converts θ_{p,m} into double-sums\"", params: TPM, weights: NONE, build: theta_to_hecke },
    IdentityDescriptor { name: "thetaless", anchor: "theta-less theorem: \"theta-less expression for the Hecke-type\"", params: ABC, weights: W_HECKE, build: thetaless },
    IdentityDescriptor { name: "f121-display", anchor: "f_{1,2,1} display: \"a special case of more general results\"", params: &[], weights: W_ONE, build: f121_display },
    IdentityDescriptor { name: "f123-example", anchor: "f123-example: f_{2,1} from theo:main with θ_{±1,1}", params: &[], weights: W_ONE, build: f123_example },
    IdentityDescriptor { name: "f123-final", anchor: "f123-final: \"can thus be written\"", params: &[], weights: W_ONE, build: f123_final },
    IdentityDescriptor { name: "f123-mxzq", anchor: "f123-mxzq: \"we have the slightly rewritten\"", params: &[], weights: W_ONE, build: f123_mxzq },
    IdentityDescriptor { name: "love-equiv", anchor: "Love-equiv: \"(slightly rewritten)\", with its equivalent form", params: &[], weights: W_ONE, build: love_equiv },
    IdentityDescriptor { name: "kernel-lem2", anchor: "lem:lem2 proof: Σ_k (-1)^k q^{k²/2+(n+1/2)k}/(1-xq^k) = (q)³/(x^n Θ(x))", params: &[ps("n", 0)], weights: W_ONE, build: kernel_lem2 },
    IdentityDescriptor { name: "double-geom-kernel", anchor: "double geometric kernel: \"holds with the conditions\"", params: &[ps("g1", 0), ps("g2", 0)], weights: W_KERNEL, build: double_geom },
    IdentityDescriptor { name: "triple-product", anchor: "Θ(x;q) = (x)_∞(q/x)_∞(q)_∞ = Σ (-1)^n q^{C(n,2)} x^n", params: &[ps("rho", 1), ps("k", 0)], weights: W_ONE, build: triple_product },
    IdentityDescriptor { name: "elliptic-shift", anchor: "j-elliptic: Θ(q^n x;q) = (-1)^n q^{-C(n,2)} x^{-n} Θ(x;q)", params: &[ps("n", 1)], weights: W_ONE, build: elliptic_shift },
    IdentityDescriptor { name: "g3-func", anchor: "g-func: g₃(qx) = -x - x² - x³ g₃(x)", params: &[], weights: W_ONE, build: g3_func },
    IdentityDescriptor { name: "g3-inv", anchor: "g-inv: g₃(1/x) = g₃(qx)", params: &[], weights: W_ONE, build: g3_inv },
    IdentityDescriptor { name: "t1-closed", anchor: "t = 1 example: \"have no poles\", f_{1,m} closed form", params: &[ps("m", 1)], weights: W_ONE, build: t1_closed },
    IdentityDescriptor { name: "u-table-2", anchor: "printed expansions of U_2^{(1)}, U_2^{(2)}", params: &[], weights: NONE, build: u_table_2 },
    IdentityDescriptor { name: "u-table-3", anchor: "printed expansions of U_3^{(m)}, \"a few typos have also been corrected\"", params: &[], weights: NONE, build: u_table_3 },
    IdentityDescriptor { name: "duality", anchor: "\"identity analogous to\": F_t^{(m)}(ζ_N^{-1}) = U_t^{(m)}(-1;ζ_N)", params: &[ps("t", 2), ps("m", 1), ps("N", 5)], weights: NONE, build: duality },
];

pub fn list_identities() -> &'static [IdentityDescriptor] {
    REGISTRY
}

pub fn find_identity(name: &str) -> Result<&'static IdentityDescriptor> {
    REGISTRY.iter().find(|d| d.name == name).ok_or_else(|| Error::UnknownIdentity(name.to_string()))
}

/// Runs an identity at its default weights.
pub fn run_identity(name: &str, given: &Params, order: QExp) -> Result<IdentityReport> {
    run_identity_with(name, given, order, None)
}

/// Runs an identity; `Equal` requires every weight assignment to pass.
/// Parameter, weight and pole problems are returned as errors, failures
/// inside a check end up in the report.
pub fn run_identity_with(name: &str, given: &Params, order: QExp, weights: Option<&[Weights]>) -> Result<IdentityReport> {
    let desc = find_identity(name)?;
    let mut full = Params::new();
    for spec in desc.params {
        full.insert(spec.name.to_string(), given.get(spec.name).copied().unwrap_or(spec.default));
    }
    if let Some(k) = given.keys().find(|k| !full.contains_key(*k)) {
        return Err(Error::ParamOutOfRange(format!("{name} takes no parameter {k}")));
    }
    let ws = match weights {
        Some(w) => w.to_vec(),
        None => desc.default_weights(),
    };
    let runs = if ws.is_empty() { vec![Weights::new(QExp::zero(), QExp::zero())] } else { ws.clone() };
    let mut shown: BTreeMap<String, String> = full.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
    if desc.uses_weights() || weights.is_some() {
        shown.insert("weights".into(), ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(";"));
    }
    let mut rep = IdentityReport::new(name, shown, order);
    let start = Stopwatch::start();
    for w in runs {
        let ctx = Ctx { params: full.clone(), weights: w, order };
        match (desc.build)(&ctx, &mut rep) {
            Ok(()) => {}
            Err(e @ (Error::ParamOutOfRange(_) | Error::WeightOutOfStrip(_) | Error::PoleHit(_) | Error::UnknownIdentity(_))) => return Err(e),
            Err(e) => rep.fail(format!("at weights {w}: {e}")),
        }
        if !rep.is_equal() {
            if let Some(d) = rep.difference.as_mut() {
                if desc.uses_weights() && !d.check.contains("weights") {
                    d.check = format!("{} at weights {w}", d.check);
                }
            }
            break;
        }
    }
    rep.runtime_ms = start.millis();
    Ok(rep)
}

fn single<'a>(pref: WeightedMonomial, factors: Vec<Factor<'a>>, order: QExp) -> Result<QSeries> {
    sum_of_products(&[Term::new(pref, factors)], order)
}

fn lem_theta_a(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (t, p, m, n) = (c.p("t"), c.p("p"), c.p("m"), c.order);
    let shift = qi(p + t);
    let rhs = theta_pm(t, p + 2 * t, m, n - shift)?.mul_monomial(&qm(shift));
    rep.compare("θ", &theta_pm(t, p, m, n)?, &rhs);
    rep.compare("θ*", &theta_pm_star(t, p + 2 * t, m, n)?, &theta_pm_star(t, p, m, n)?);
    Ok(())
}

fn lem_theta_b(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (t, p, m, n) = (c.p("t"), c.p("p"), c.p("m"), c.order);
    let e = qi(-m - t) + qr(1, 2);
    let rhs = theta_pm(t, p, m + 2 * t - 1, n - e)?.mul_monomial(&-qm(e));
    rep.compare("θ", &theta_pm(t, p, m, n)?, &rhs);
    rep.compare("θ*", &theta_pm_star(t, p, m + 2 * t - 1, n)?, &theta_pm_star(t, p, m, n)?.neg());
    Ok(())
}

fn lem_theta_c(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (t, p, m, n) = (c.p("t"), c.p("p"), c.p("m"), c.order);
    let base = theta_pm(t, p, m, n)?.neg();
    rep.compare("θ_{-p,m}", &theta_pm(t, -p, m, n)?, &base);
    rep.compare("θ_{p,-m}", &theta_pm(t, p, -m, n)?, &base);
    let star = theta_pm_star(t, p, m, n)?.neg();
    rep.compare("θ*_{-p,m}", &theta_pm_star(t, -p, m, n)?, &star);
    rep.compare("θ*_{p,-m}", &theta_pm_star(t, p, -m, n)?, &star);
    Ok(())
}

fn one_minus(m: WeightedMonomial) -> Factor<'static> {
    Box::new(move |o| {
        let mut s = QSeries::one(o);
        s.add_term(&m, -1);
        Ok(s)
    })
}

fn theta_sum_factors<'a>(t: i64, m: i64, x: WeightedMonomial, lead: QExp) -> Vec<Term<'a>> {
    (0..2 * t)
        .map(|k| {
            let th: Factor = Box::new(move |o| theta_pm(t, k - t, m, o));
            Term::new(x.pow(k).times_q(qr(k, 2) + lead), vec![th])
        })
        .collect()
}

fn lem2_g(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (t, m, x, n) = (c.p("t"), c.p("m"), c.x(), c.order);
    let lhs = g_tm(&c.fam(x.times_q(1)))?;
    let fam = c.fam(x);
    let g: Factor = Box::new(move |o| g_tm(&FamilyParams { order: o, ..fam }));
    let mut terms = vec![
        Term::new(x.pow(2 * t).times_q(t), vec![g]),
        Term::new(
            x.pow(t - m + 1).times_q(qr(1, 8) - qr(m, 2) + qr(t, 2)),
            vec![eta_factor(qi(1), 3), theta_inverse_factor(th(x, qi(1))), one_minus(x.pow(2 * m).times_q(m))],
        ),
    ];
    terms.extend(theta_sum_factors(t, m, x, QExp::zero()));
    rep.compare("g(qx)", &lhs, &sum_of_products(&terms, n)?);
    Ok(())
}

fn lem2_f(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (t, m, x, n) = (c.p("t"), c.p("m"), c.x(), c.order);
    let lhs = f_tm(&c.fam(x.times_q(1)))?;
    let fam = c.fam(x);
    let f: Factor = Box::new(move |o| f_tm(&FamilyParams { order: o, ..fam }));
    let inner = theta_sum_factors(t, m, x, qr(-t, 2));
    let theta_part: Factor = Box::new(move |o| sum_of_products(&inner, o));
    let terms = vec![
        Term::new(-x.pow(2 * t - 1).times_q(t), vec![f]),
        Term::new(x.pow(t - m).times_q(1 - m), vec![one_minus(x.pow(2 * m).times_q(m))]),
        Term::new(x.inv().times_q(qr(-m, 2) + qr(7, 8)), vec![theta_factor(th(x, qi(1))), eta_factor(qi(1), -3), theta_part]),
    ];
    rep.compare("f(qx)", &lhs, &sum_of_products(&terms, n)?);
    Ok(())
}

fn theo_main(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let fam = c.fam(c.x());
    fam.require_main_range()?;
    rep.compare("f_tm vs theta expansion", &f_tm(&fam)?, &f_tm_main(&fam)?);
    Ok(())
}

fn theo_twee(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (t, m, l, n) = (c.p("t"), c.p("m"), c.p("l"), c.order);
    let (lhs, rhs) = twee_sides(t, m, l, n)?;
    rep.compare("restricted unary sums", &lhs, &rhs);
    if (t, m) == (2, 1) {
        let eta2 = |e: QExp| single(-qm(e), vec![eta_factor(qi(1), 2)], n);
        rep.compare("θ*_{1,1}", &theta_pm_star(2, 1, 1, n)?, &eta2(qr(1, 12))?);
        rep.compare("θ_{1,1}", &theta_pm(2, 1, 1, n)?, &eta2(qr(1, 8))?);
    }
    Ok(())
}

/// `x2`, `y2` as pure q-powers putting `x1^c y1^{-b} x2` and `x1^{-b} y1^a y2`
/// at weights `D/2 + 1/5` and `D/2 + 1/13`.
pub fn hecke_companions(a: i64, b: i64, c: i64, x1: &WeightedMonomial, y1: &WeightedMonomial) -> (WeightedMonomial, WeightedMonomial) {
    let d = b * b - a * c;
    let wx2 = qr(d, 2) + qr(1, 5) - (x1.qexp * c - y1.qexp * b);
    let wy2 = qr(d, 2) + qr(1, 13) - (y1.qexp * a - x1.qexp * b);
    (qm(wx2), qm(wy2))
}

fn abc(c: &Ctx) -> (i64, i64, i64) {
    (c.p("a"), c.p("b"), c.p("c"))
}

fn general_hecke(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (a, b, cc) = abc(c);
    let (x1, y1) = (c.x(), c.y());
    let (x2, y2) = hecke_companions(a, b, cc, &x1, &y1);
    let rhs = rhs_general_hecke(a, b, cc, &x1, &y1, &x2, &y2, c.order)?;
    rep.compare("half-convention sum", &quad_sum_half(a, b, cc, &x1, &y1, c.order)?, &rhs);
    Ok(())
}

fn general_fabc(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (a, b, cc) = abc(c);
    let (x, y) = (c.x(), c.y());
    rep.compare("f_abc", &fabc(a, b, cc, &x, &y, c.order)?, &rhs_general_fabc(a, b, cc, &x, &y, c.order)?);
    Ok(())
}

fn cor_main(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (t, m, x) = (c.p("t"), c.p("m"), c.x());
    if t < 1 || m < 1 || m > t {
        return Err(Error::ParamOutOfRange(format!("cor-main indexes U_t^(m): need 1 <= m <= t, got t = {t}, m = {m}")));
    }
    let fam = FamilyParams::new(t + 1, m, x, c.order);
    rep.compare("(1-x)U(-x) vs double sums", &f_tm_from_u(&fam)?, &f_tm_corollary(&fam)?);
    Ok(())
}

fn theta_to_hecke(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (t, p, m, n) = (c.p("t"), c.p("p"), c.p("m"), c.order);
    rep.compare("θ_{p,m}", &theta_pm(t, p, m, n)?, &theta_pm_via_hecke(t, p, m, n)?);
    Ok(())
}

fn thetaless(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (a, b, cc) = abc(c);
    let (x1, y1) = (c.x(), c.y());
    let (x2, _) = hecke_companions(a, b, cc, &x1, &y1);
    let rhs = rhs_thetaless(a, b, cc, &x1, &y1, &x2, c.order)?;
    rep.compare("half-convention sum", &quad_sum_half(a, b, cc, &x1, &y1, c.order)?, &rhs);
    Ok(())
}

fn f121_display(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (x, y, n) = (c.x(), c.y(), c.order);
    let m1 = WeightedMonomial::minus_one();
    let terms = vec![
        Term::new(one(), vec![theta_factor(th(y, qi(1))), appell_factor((x * y.pow(-2)).times_q(2), m1, qi(3))?]),
        Term::new(one(), vec![theta_factor(th(x, qi(1))), appell_factor((y * x.pow(-2)).times_q(2), m1, qi(3))?]),
        Term::new(
            -y,
            vec![
                eta_factor(qi(3), 3),
                theta_factor(th(-(x * y.inv()), qi(1))),
                theta_factor(th((x * y).times_q(2), qi(3))),
                theta_inverse_factor(th(m1, qi(3))),
                theta_inverse_factor(th(-(y.pow(2) * x.inv()).times_q(1), qi(3))),
                theta_inverse_factor(th(-(x.pow(2) * y.inv()).times_q(1), qi(3))),
            ],
        ),
    ];
    rep.compare("f_{1,2,1}", &fabc(1, 2, 1, &x, &y, n)?, &sum_of_products(&terms, n)?);
    Ok(())
}

fn f123(x: WeightedMonomial) -> impl Fn(QExp) -> Result<QSeries> {
    move |o| fabc(1, 2, 3, &x.inv().times_q(2), &qm(qi(4)), o)
}

fn f21(c: &Ctx) -> Result<QSeries> {
    f_tm(&FamilyParams::new(2, 1, c.x(), c.order))
}

fn f123_example(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (x, n) = (c.x(), c.order);
    let lhs = f21(c)?;
    let th11 = || -> Factor { Box::new(|o| theta_pm(2, 1, 1, o)) };
    let restricted: Factor = Box::new(move |o| Ok(restricted_double_sum(2, 1, &x, o)?.sub(&restricted_double_sum(2, 3, &x, o)?)));
    let first = single(-qm(qi(-1)), vec![th11(), eta_factor(qi(1), -3), restricted], n)?;
    rep.compare("l mod 4 form", &lhs, &first);
    let second = single(-qm(qr(-1, 8)), vec![th11(), eta_factor(qi(1), -3), Box::new(f123(x))], n)?;
    rep.compare("merged double sum", &lhs, &second);
    Ok(())
}

fn f123_final(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let rhs = single(one(), vec![eta_factor(qi(1), -1), Box::new(f123(c.x()))], c.order)?;
    rep.compare("f_{2,1}", &f21(c)?, &rhs);
    Ok(())
}

fn f123_mxzq(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (x, n) = (c.x(), c.order);
    let lhs = f_tm_from_u(&FamilyParams::new(2, 1, x, n))?;
    let z = (x * x).times_q(2);
    let terms = vec![
        Term::new(x.pow(-2).times_q(-2), vec![appell_factor(x.pow(-3).times_q(-1), z, qi(3))?]),
        Term::new(-qm(qi(-1)), vec![appell_factor(x.pow(-3).times_q(1), z, qi(3))?]),
        Term::new(-x.times_q(-1), vec![theta_factor(th(x, qi(1))), eta_factor(qi(1), -1), appell_factor(x * x, x.inv(), qi(1))?]),
    ];
    rep.compare("(1-x)U_1(-x)", &lhs, &sum_of_products(&terms, n)?);
    rep.compare("f_{2,1}", &lhs, &f21(c)?);
    Ok(())
}

/// `Σ_{n>=0} q^{n+s} (qx)_n (q/x)_n`, summed directly.
fn love_sum(x: &WeightedMonomial, s: i64, order: QExp) -> QSeries {
    let mut acc = QSeries::zero(order);
    let mut n = 0;
    while qi(n + s) < order {
        let inner = order - qi(n + s);
        let a = poch_finite(&x.times_q(1), n as u32, inner);
        let b = poch_finite(&x.inv().times_q(1), n as u32, inner);
        acc.add_assign(&a.mul_trunc(&b, Some(inner)).mul_monomial(&qm(qi(n + s))));
        n += 1;
    }
    acc
}

fn love_equiv(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (x, n) = (c.x(), c.order);
    let big = n + qi(1);
    let lin = {
        let mut s = QSeries::one(big);
        s.add_term(&x, -1);
        s
    };
    let mut lhs = love_sum(&x, 1, big).mul_trunc(&lin, Some(n));
    lhs.add_term(&one(), 1);
    let rhs = single(
        -x.inv().times_q(3),
        vec![eta_factor(qi(1), -1), Box::new(move |o| fabc(1, 2, 3, &x.inv().times_q(3), &qm(qi(6)), o))],
        n,
    )?;
    rep.compare("1 + (1-x) Σ q^{n+1}(qx)_n(q/x)_n", &lhs, &rhs);
    let lhs2 = love_sum(&x, 0, big).mul_trunc(&lin, Some(n));
    let rhs2 = single(one(), vec![eta_factor(qi(1), -1), Box::new(f123(x))], n)?;
    rep.compare("(1-x) Σ q^n(qx)_n(q/x)_n", &lhs2, &rhs2);
    Ok(())
}

fn kernel_lem2(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (k, x, n) = (c.p("n"), c.x(), c.order);
    rep.compare("unary kernel", &lerch_kernel(k, &x, n)?, &lerch_kernel_rhs(k, &x, n)?);
    Ok(())
}

fn double_geom(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (g1, g2, n) = (c.p("g1"), c.p("g2"), c.order);
    if !(-1..=1).contains(&g1) || !(-1..=1).contains(&g2) {
        return Err(Error::ParamOutOfRange(format!("need γ in {{-1, 0, 1}}², got ({g1}, {g2})")));
    }
    let z1 = c.x().times_q(g1);
    let z2 = c.y().times_q(g2);
    rep.compare("double geometric", &double_geometric(&z1, &z2, g1, g2, n)?, &double_geometric_rhs(&z1, &z2, n)?);
    Ok(())
}

fn triple_product(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (rho, k, n) = (c.p("rho"), c.p("k"), c.order);
    if rho < 1 {
        return Err(Error::ParamOutOfRange(format!("need rho >= 1, got {rho}")));
    }
    let spec = th(c.x().times_q(k), qi(rho));
    rep.compare("product vs sum", &theta_prod(&spec, n), &theta_sum(&spec, n)?);
    Ok(())
}

fn elliptic_shift(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (k, x, n) = (c.p("n"), c.x(), c.order);
    let lhs = theta_sum(&th(x.times_q(k), qi(1)), n)?;
    let mut pref = x.pow(-k).times_q(-(k * (k - 1) / 2));
    if k % 2 != 0 {
        pref = -pref;
    }
    let rhs = single(pref, vec![Box::new(move |o| Ok(theta_prod(&th(x, qi(1)), o)))], n)?;
    rep.compare("Θ(q^n x)", &lhs, &rhs);
    Ok(())
}

fn g3_func(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (x, n) = (c.x(), c.order);
    let mut rhs = single(-x.pow(3), vec![Box::new(move |o| g3(&x, o))], n)?;
    rhs.add_term(&-x, 1);
    rhs.add_term(&-x.pow(2), 1);
    rep.compare("g₃(qx)", &g3(&x.times_q(1), n)?, &rhs);
    Ok(())
}

fn g3_inv(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (x, n) = (c.x(), c.order);
    rep.compare("g₃(1/x)", &g3(&x.inv(), n)?, &g3(&x.times_q(1), n)?);
    Ok(())
}

fn t1_closed(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (m, x, n) = (c.p("m"), c.x(), c.order);
    rep.compare("f_{1,m}", &f_tm(&FamilyParams::new(1, m, x, n))?, &f1m_closed(m, &x, n)?);
    Ok(())
}

/// A printed coefficient table: `(t, m, printed order, series)`.
pub struct GoldenTable {
    pub t: i64,
    pub m: i64,
    pub order: QExp,
    pub series: QSeries,
}

pub const U_TABLE_2: &str = include_str!("../data/u_table_2.txt");
pub const U_TABLE_3: &str = include_str!("../data/u_table_3.txt");

fn parse_poly(text: &str) -> Result<LaurentCoeff> {
    let mut p = LaurentCoeff::zero();
    let normalized = text.replace(" - ", " + -");
    for term in normalized.split(" + ") {
        let term = term.trim();
        let (neg, body) = match term.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, term),
        };
        let (coeff, mono) = match body.split_once('*') {
            Some((c, rest)) if c.chars().all(|ch| ch.is_ascii_digit()) => (c.parse::<i64>().ok(), rest),
            _ if body.chars().all(|ch| ch.is_ascii_digit()) => (body.parse::<i64>().ok(), "1"),
            _ => (Some(1), body),
        };
        let coeff = coeff.ok_or_else(|| Error::Parse(format!("bad coefficient in {term:?}")))?;
        let m = parse_monomial(mono)?;
        let c = if neg { -coeff } else { coeff };
        p.add_monomial(m.vexp, &Int::from(m.sign() * c));
    }
    Ok(p)
}

/// Parses the embedded table format: `U t m order` headers followed by
/// `q^e: polynomial` lines; `#` starts a comment.
pub fn parse_golden(text: &str) -> Result<Vec<GoldenTable>> {
    let mut out: Vec<GoldenTable> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("U ") {
            let nums: Vec<i64> = rest.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| Error::Parse(format!("bad header {line:?}")))?;
            if nums.len() != 3 {
                return Err(Error::Parse(format!("bad header {line:?}")));
            }
            out.push(GoldenTable { t: nums[0], m: nums[1], order: qi(nums[2]), series: QSeries::zero(qi(nums[2])) });
            continue;
        }
        let table = out.last_mut().ok_or_else(|| Error::Parse("coefficient line before any header".into()))?;
        let (e, poly) = line.split_once(':').ok_or_else(|| Error::Parse(format!("bad line {line:?}")))?;
        let e: QExp = e.trim().strip_prefix("q^").ok_or_else(|| Error::Parse(format!("bad exponent in {line:?}")))?.parse()?;
        let coeff = parse_poly(poly.trim())?;
        let add = QSeries::from_terms([(e, coeff)], Int::one(), table.order);
        table.series.add_assign(&add);
    }
    Ok(out)
}

fn u_table(text: &str, c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let x = WeightedMonomial::var(FormalVar::X1);
    for table in parse_golden(text)? {
        let cut = table.order.min(c.order);
        let u = u_tm(table.t, table.m, &x, cut)?;
        rep.compare_below(&format!("U_{}^({})", table.t, table.m), &u, &table.series, cut);
    }
    Ok(())
}

fn u_table_2(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    u_table(U_TABLE_2, c, rep)
}

fn u_table_3(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    u_table(U_TABLE_3, c, rep)
}

fn duality(c: &Ctx, rep: &mut IdentityReport) -> Result<()> {
    let (t, m, n) = (c.p("t"), c.p("m"), c.p("N"));
    if n < 1 {
        return Err(Error::ParamOutOfRange(format!("need N >= 1, got {n}")));
    }
    let f = cyclo::f_root(t, m, n as u64)?;
    let u = cyclo::u_root(t, m, n as u64)?;
    rep.compare_values("F(1/z) vs U(-1;z)", f.to_string(), u.to_string());
    Ok(())
}
