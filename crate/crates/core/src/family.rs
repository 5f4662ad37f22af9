//! The families `g_{t,m}`, `f_{t,m}` and `U_t^{(m)}`, with the independent
//! routes to `f_{t,m}`: the defining sum, the theta/double-sum expansion, the
//! expansion purely in Hecke-type double sums, and `(1-x) U_{t-1}^{(m)}(-x)`.

use std::collections::HashMap;

use num_rational::Rational64;

use crate::blocks::{eta_factor, qbinom_coeffs, sum_of_products, th, theta_factor, Factor, Term};
use crate::error::{Error, Result};
use crate::hecke::{fabc, theta_pm, theta_pm_star};
use crate::int::Int;
use crate::qring::{add_geometric, QExp, QSeries, WeightedMonomial};
use crate::window::{self, Quad, Region};

fn qi(n: i64) -> QExp {
    QExp::int(n)
}

fn qr(n: i64, d: i64) -> QExp {
    QExp::new(n, d)
}

fn qm(e: QExp) -> WeightedMonomial {
    WeightedMonomial::q(e)
}

/// Parameters `t`, `m` and the argument `x` of the family functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyParams {
    pub t: i64,
    pub m: i64,
    pub x: WeightedMonomial,
    pub order: QExp,
}

impl FamilyParams {
    pub fn new(t: i64, m: i64, x: WeightedMonomial, order: QExp) -> FamilyParams {
        FamilyParams { t, m, x, order }
    }

    /// `t >= 2` and `1 <= m < t`.
    pub fn require_main_range(&self) -> Result<()> {
        if self.t < 2 || self.m < 1 || self.m >= self.t {
            return Err(Error::ParamOutOfRange(format!("need t >= 2 and 1 <= m < t, got t = {}, m = {}", self.t, self.m)));
        }
        Ok(())
    }

    fn require_basic(&self) -> Result<()> {
        if self.t < 1 {
            return Err(Error::ParamOutOfRange(format!("need t >= 1, got {}", self.t)));
        }
        Ok(())
    }
}

fn require_unit_strip(x: &WeightedMonomial) -> Result<()> {
    if x.qexp.abs() >= qi(1) {
        return Err(Error::ParamOutOfRange(format!("argument {x} must have weight strictly between -1 and 1")));
    }
    Ok(())
}

/// `g_{t,m}(x) = Σ_{r ≢ s (2)} sg(r,s) (-1)^{(r-s-1)/2} q^{r²/8 + (4t-1)rs/4 + s²/8 + (t+m)r/2 + (t-m)s/2} / (1 - x q^{(r+s+1)/2})`.
///
/// The terms on the line `r + s + 1 = 0` have `sg = 0`, so an unweighted
/// formal `x` is fine; a nonzero integer weight puts a pole on a live term.
pub fn g_tm(p: &FamilyParams) -> Result<QSeries> {
    g_tm_with_slack(p, 0)
}

pub fn g_tm_with_slack(p: &FamilyParams, slack: i64) -> Result<QSeries> {
    p.require_basic()?;
    if p.x.qexp.is_integer() && !p.x.qexp.is_zero() {
        return Err(Error::PoleHit(format!("1 - x q^((r+s+1)/2) vanishes for x = {}", p.x)));
    }
    let (t, m) = (p.t, p.m);
    let form = Quad {
        a: Rational64::new(1, 8),
        b: Rational64::new(4 * t - 1, 4),
        c: Rational64::new(1, 8),
        lr: Rational64::new(t + m, 2),
        ls: Rational64::new(t - m, 2),
        k: 0.into(),
    };
    // expanding a denominator never lowers the exponent below the numerator's
    let order = p.order;
    let mut out = QSeries::zero(order);
    let one = Int::one();
    for (rr, rs) in [(0, 1), (1, 0)] {
        for (region, sg) in [(Region::Pos, 1), (Region::Neg, -1)] {
            let sub = form.substitute(2, rr, 2, rs);
            for (i, j) in window::points(&sub, region, order.rational(), slack)? {
                let (r, s) = (2 * i + rr, 2 * j + rs);
                let sign = if ((r - s - 1) / 2).rem_euclid(2) == 0 { sg } else { -sg };
                let mut pref = qm(QExp::from(form.eval(r, s)));
                if sign < 0 {
                    pref = -pref;
                }
                let u = p.x.times_q((r + s + 1) / 2);
                add_geometric(&mut out, &pref, &one, &u)?;
            }
        }
    }
    Ok(out)
}

/// `f_{t,m}(x) = -q^{-t/2 - m/2 + 7/8} Θ(x;q) / (q)_∞³ · g_{t,m}(x)`.
pub fn f_tm(p: &FamilyParams) -> Result<QSeries> {
    p.require_basic()?;
    let pref = -qm(qr(-p.t, 2) - qr(p.m, 2) + qr(7, 8));
    let pc = *p;
    let g: Factor = Box::new(move |o| g_tm(&FamilyParams { order: o, ..pc }));
    let terms = vec![Term::new(pref, vec![theta_factor(th(p.x, qi(1))), eta_factor(qi(1), -3), g])];
    sum_of_products(&terms, p.order)
}

/// Polynomial helpers over `Z[q]`, truncated to a fixed length.
fn poly_mul(a: &[Int], b: &[Int], len: usize) -> Vec<Int> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = (a.len() + b.len() - 1).min(len);
    let mut out = vec![Int::zero(); n];
    for (i, x) in a.iter().enumerate() {
        if i >= n {
            break;
        }
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j >= n {
                break;
            }
            out[i + j].add_mul(x, y);
        }
    }
    out
}

fn poly_add_shifted(acc: &mut Vec<Int>, p: &[Int], shift: usize, len: usize) {
    for (i, c) in p.iter().enumerate() {
        let k = i + shift;
        if k >= len {
            break;
        }
        if acc.len() <= k {
            acc.resize(k + 1, Int::zero());
        }
        acc[k].add_assign(c);
    }
}

struct Chains {
    t: i64,
    m: i64,
    /// Degrees below this bound are kept.
    deg_bound: i64,
    binoms: HashMap<(i64, i64), Vec<Int>>,
    /// `B[k_t]`: polynomial collecting every chain with that top entry.
    by_top: HashMap<i64, Vec<Int>>,
}

impl Chains {
    fn binom(&mut self, n: i64, k: i64) -> Vec<Int> {
        let cap = self.deg_bound.max(1) as usize;
        self.binoms.entry((n, k)).or_insert_with(|| qbinom_coeffs(n, k, Some(cap - 1))).clone()
    }

    fn top_arg(&self, i: i64, ks: &[i64], next: i64) -> (i64, i64) {
        let mut top = next - ks[(i - 1) as usize] - i;
        for j in 1..=i {
            top += 2 * ks[(j - 1) as usize] + if self.m > j { 1 } else { 0 };
        }
        (top, next - ks[(i - 1) as usize])
    }

    /// `ks` holds `k_1..k_j`; `sq` is their square sum and `poly` the product
    /// of the binomial factors for `i < j`.
    fn descend(&mut self, ks: &mut Vec<i64>, sq: i64, poly: Vec<Int>) {
        let t = self.t;
        let j = ks.len() as i64;
        if j == t - 1 {
            let last = *ks.last().unwrap_or(&0);
            let mut kt = last.max(1);
            loop {
                let low = -t + kt + sq;
                if low >= self.deg_bound - t {
                    break;
                }
                let factor = if t >= 2 {
                    let (n, k) = self.top_arg(t - 1, ks, kt);
                    self.binom(n, k)
                } else {
                    vec![Int::one()]
                };
                let len = (self.deg_bound - kt).max(0) as usize;
                let p = poly_mul(&poly, &factor, len);
                if !p.is_empty() {
                    let len_all = self.deg_bound.max(0) as usize;
                    let mut acc = self.by_top.remove(&kt).unwrap_or_default();
                    poly_add_shifted(&mut acc, &p, sq as usize, len_all);
                    self.by_top.insert(kt, acc);
                }
                kt += 1;
            }
            return;
        }
        let lo = *ks.last().unwrap_or(&0);
        let mut k = lo;
        loop {
            let remaining = t - 1 - (j + 1);
            let bound = -t + sq + k * k + remaining * k * k + k.max(1);
            if bound >= self.deg_bound - t {
                break;
            }
            // k_m >= 1
            if j + 1 == self.m && k == 0 {
                k += 1;
                continue;
            }
            let next_poly = if j >= 1 {
                let (n, kk) = self.top_arg(j, ks, k);
                let b = self.binom(n, kk);
                let len = (self.deg_bound - sq).max(0) as usize;
                poly_mul(&poly, &b, len)
            } else {
                poly.clone()
            };
            if !next_poly.is_empty() {
                ks.push(k);
                self.descend(ks, sq + k * k, next_poly);
                ks.pop();
            }
            k += 1;
        }
    }
}

/// `U_t^{(m)}(x; q)` from its chain sum over `k_t >= … >= k_1 >= 0` with
/// `k_m >= 1`. The argument must have weight in `(-1, 1)`.
pub fn u_tm(t: i64, m: i64, x: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    if t < 1 || m < 1 || m > t {
        return Err(Error::ParamOutOfRange(format!("need t >= 1 and 1 <= m <= t, got t = {t}, m = {m}")));
    }
    require_unit_strip(x)?;
    // Every coefficient of the chain polynomials lives at an integer degree;
    // with the prefactor q^{-t} the exponents below `order` are those with
    // degree below order + t.
    let deg_bound = (order + qi(t)).ceil();
    let mut chains = Chains { t, m, deg_bound, binoms: HashMap::new(), by_top: HashMap::new() };
    chains.descend(&mut Vec::new(), 0, vec![Int::one()]);
    let mut tops: Vec<(i64, Vec<Int>)> = chains.by_top.into_iter().collect();
    tops.sort_by_key(|(k, _)| *k);
    let inner = order + qi(t);
    let mut out = QSeries::zero(inner);
    let mut poch = QSeries::one(inner);
    let a = -*x;
    let b = -x.inv();
    let mut done = 0;
    for (kt, poly) in tops {
        while done < kt - 1 {
            done += 1;
            poch.mul_one_minus(&a.times_q(done));
            poch.mul_one_minus(&b.times_q(done));
        }
        let mut bpoly = QSeries::zero(inner);
        for (d, c) in poly.iter().enumerate() {
            if !c.is_zero() {
                bpoly.add_monomial(&qm(qi(d as i64 + kt)), c);
            }
        }
        out.add_assign(&poch.mul_trunc(&bpoly, Some(inner)));
    }
    let mut res = out.mul_monomial(&qm(qi(-t)));
    res.truncate(order);
    Ok(res)
}

/// `(1 - x) U_{t-1}^{(m)}(-x; q)`, which equals `f_{t,m}(x)`.
pub fn f_tm_from_u(p: &FamilyParams) -> Result<QSeries> {
    let slack = p.x.qexp.abs();
    let u = u_tm(p.t - 1, p.m, &-p.x, p.order + slack)?;
    let mut lin = QSeries::one(p.order + slack + qi(1) - u.low_bound());
    lin.add_term(&p.x, -1);
    let mut r = u.mul_trunc(&lin, Some(p.order));
    r.truncate(p.order);
    Ok(r)
}

/// `Σ_{r, l; l ≡ k (2t)} sg(r,l) (-1)^r q^{r²/2 + l r + (2t-1) l²/(4t) + r/2 + l/2} x^{-r}`.
pub fn restricted_double_sum(t: i64, k: i64, x: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    restricted_double_sum_with_slack(t, k, x, order, 0)
}

pub fn restricted_double_sum_with_slack(t: i64, k: i64, x: &WeightedMonomial, order: QExp, slack: i64) -> Result<QSeries> {
    let form = Quad {
        a: Rational64::new(1, 2),
        b: 1.into(),
        c: Rational64::new(2 * t - 1, 4 * t),
        lr: Rational64::new(1, 2) - x.qexp.rational(),
        ls: Rational64::new(1, 2),
        k: 0.into(),
    };
    let k = k.rem_euclid(2 * t);
    let sub = form.substitute(1, 0, 2 * t, k);
    let xi = x.inv();
    let mut out = QSeries::zero(order);
    for (region, sg) in [(Region::Pos, 1), (Region::Neg, -1)] {
        for (r, j) in window::points(&sub, region, order.rational(), slack)? {
            let l = 2 * t * j + k;
            let mut m = xi.pow(r);
            m.qexp = QExp::from(form.eval(r, l));
            out.add_term(&m, if r.rem_euclid(2) == 0 { sg } else { -sg });
        }
    }
    Ok(out)
}

/// `f_{t,m}` through the theta/double-sum expansion, for `t >= 2`, `1 <= m < t`.
pub fn f_tm_main(p: &FamilyParams) -> Result<QSeries> {
    p.require_main_range()?;
    let (t, m, x) = (p.t, p.m, p.x);
    let lead = qr(-3 * t, 4) - qr(m, 2) + qr(7, 8);
    let mut terms = Vec::new();
    for k in 0..2 * t {
        let e = qr((k - t) * (k - t), 4 * t);
        let mut pref = qm(lead + e);
        if k % 2 == 0 {
            pref = -pref;
        }
        let th: Factor = Box::new(move |o| theta_pm(t, k - t, m, o));
        let h: Factor = Box::new(move |o| restricted_double_sum(t, k, &x, o));
        terms.push(Term::new(pref, vec![eta_factor(qi(1), -3), th, h]));
    }
    sum_of_products(&terms, p.order)
}

/// `θ_{p,m} = -q^{1/8 + (p-m)/2} (f_{1,4t-1,1}(q^{p+m+2t}, q^{p-m+1}) - q^m f_{1,4t-1,1}(q^{p+m+1}, q^{p-m+2t}))`.
pub fn theta_pm_via_hecke(t: i64, p: i64, m: i64, order: QExp) -> Result<QSeries> {
    let b = 4 * t - 1;
    let shift = qr(1, 8) + qr(p - m, 2);
    let inner = order - shift;
    let first = fabc(1, b, 1, &qm(qi(p + m + 2 * t)), &qm(qi(p - m + 1)), inner)?;
    let second = fabc(1, b, 1, &qm(qi(p + m + 1)), &qm(qi(p - m + 2 * t)), inner - qi(m))?.mul_monomial(&qm(qi(m)));
    Ok(first.sub(&second).mul_monomial(&-qm(shift)))
}

/// `f_{t,m}` written purely with Hecke-type double sums.
pub fn f_tm_corollary(p: &FamilyParams) -> Result<QSeries> {
    p.require_main_range()?;
    let (t, m, x) = (p.t, p.m, p.x);
    let b = 4 * t - 1;
    let mut terms = Vec::new();
    for k in 0..2 * t {
        let mut pref = qm(qi(-m + 1 - t + k * (k + 1) / 2));
        if k % 2 == 1 {
            pref = -pref;
        }
        let modular: Factor = Box::new(move |o| {
            let f1 = fabc(1, b, 1, &qm(qi(k + m + t)), &qm(qi(k - t - m + 1)), o)?;
            let f2 = fabc(1, b, 1, &qm(qi(k - t + m + 1)), &qm(qi(k - m + t)), o - qi(m))?.mul_monomial(&qm(qi(m)));
            Ok(f1.sub(&f2))
        });
        let mock: Factor = Box::new(move |o| {
            fabc(1, 2 * t, 2 * t * (2 * t - 1), &x.inv().times_q(1 + k), &-qm(qi((2 * t - 1) * (k + t) + t)), o)
        });
        terms.push(Term::new(pref, vec![eta_factor(qi(1), -3), modular, mock]));
    }
    sum_of_products(&terms, p.order)
}

/// `f_{1,m}(x) = (-1)^{m+1} q^{(m²-m)/2} Σ_{n=-m+1}^{m} (-1)^n q^{(-n²+n)/2} x^n`.
pub fn f1m_closed(m: i64, x: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    if m < 1 {
        return Err(Error::ParamOutOfRange(format!("need m >= 1, got {m}")));
    }
    let mut out = QSeries::zero(order);
    let outer = (m * m - m) / 2;
    for n in (-m + 1)..=m {
        let e = outer + (-n * n + n) / 2;
        let sign = if (m + 1 + n).rem_euclid(2) == 0 { 1 } else { -1 };
        out.add_term(&x.pow(n).times_q(e), sign);
    }
    Ok(out)
}

/// `Σ_{r ≡ c (M)} q^{r² / (4t(2t-1))}` with `M = 2t(2t-1)`.
fn restricted_unary(t: i64, c: i64, order: QExp) -> Result<QSeries> {
    let modulus = 2 * t * (2 * t - 1);
    let c = c.rem_euclid(modulus);
    let scale = Rational64::new(1, 4 * t * (2 * t - 1));
    // r = M j + c
    let a = scale * modulus * modulus;
    let l = scale * 2 * modulus * c;
    let k = scale * c * c;
    let mut out = QSeries::zero(order);
    for j in window::quadratic_line(a, l, k, order.rational(), 0)? {
        let r = modulus * j + c;
        out.add_term(&qm(QExp::from(scale * r * r)), 1);
    }
    Ok(out)
}

/// Both sides of the restricted unary theta identity for `θ*_{k,m}`:
/// `Σ_{k mod 2t} (-1)^k θ*_{k,m} Σ_{r ≡ 2tℓ + (2t-1)k (2t(2t-1))} q^{r²/(4t(2t-1))}`
/// against `±q^{1/8} (q)_∞³` or zero according to `ℓ mod 2t-1`.
pub fn twee_sides(t: i64, m: i64, ell: i64, order: QExp) -> Result<(QSeries, QSeries)> {
    FamilyParams::new(t, m, WeightedMonomial::one(), order).require_main_range()?;
    let mut terms = Vec::new();
    for k in 0..2 * t {
        let star: Factor = Box::new(move |o| theta_pm_star(t, k, m, o));
        let unary: Factor = Box::new(move |o| restricted_unary(t, 2 * t * ell + (2 * t - 1) * k, o));
        let mut term = Term::new(WeightedMonomial::one(), vec![star, unary]);
        if k % 2 == 1 {
            term.coeff = -1;
        }
        terms.push(term);
    }
    let lhs = sum_of_products(&terms, order)?;
    let r = 2 * t - 1;
    let sign = if ell.rem_euclid(r) == m.rem_euclid(r) {
        if m % 2 == 0 {
            1
        } else {
            -1
        }
    } else if ell.rem_euclid(r) == (-m).rem_euclid(r) {
        if m % 2 == 0 {
            -1
        } else {
            1
        }
    } else {
        0
    };
    let rhs = if sign == 0 {
        QSeries::zero(order)
    } else {
        let mut pref = qm(qr(1, 8));
        if sign < 0 {
            pref = -pref;
        }
        sum_of_products(&[Term::new(pref, vec![eta_factor(qi(1), 3)])], order)?
    };
    Ok((lhs, rhs))
}
