//! Appell functions `m(x, z; q)`, the universal mock theta function `g₃`, and
//! the theta/Appell right-hand sides for general Hecke-type double sums.
//!
//! Every unary sum with a geometric denominator goes through [`LerchSum`],
//! whose window is driven by the exact lowest exponent of each summand after
//! the geometric expansion.

use num_rational::Rational64;

use crate::blocks::{eta_factor, sum_of_products, th, theta_factor, theta_inverse, theta_inverse_factor, Factor, Term};
use crate::error::{Error, Result};
use crate::int::Int;
use crate::qring::{add_geometric, QExp, QSeries, WeightedMonomial};
use crate::window::{self, Quad, Region};

fn qm(e: QExp) -> WeightedMonomial {
    WeightedMonomial::q(e)
}

fn qi(n: i64) -> QExp {
    QExp::int(n)
}

fn qr(n: i64, d: i64) -> QExp {
    QExp::new(n, d)
}

fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// `Σ_r q^{quad r²} base^r / (1 - u0 ustep^r)` over all integers `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LerchSum {
    pub quad: QExp,
    pub base: WeightedMonomial,
    pub u0: WeightedMonomial,
    pub ustep: WeightedMonomial,
}

impl LerchSum {
    fn denominator(&self, r: i64) -> WeightedMonomial {
        self.u0 * self.ustep.pow(r)
    }

    fn low(&self, r: i64) -> Rational64 {
        let u = self.denominator(r).qexp.rational();
        let corr = if u < Rational64::from_integer(0) { -u } else { Rational64::from_integer(0) };
        self.quad.rational() * r * r + self.base.qexp.rational() * r + corr
    }

    /// Errors when some denominator has weight zero.
    pub fn check_poles(&self) -> Result<()> {
        let (w0, ws) = (self.u0.qexp, self.ustep.qexp);
        let hit = if ws.is_zero() { w0.is_zero() } else { (-w0 / ws).is_integer() };
        if hit {
            let r = if ws.is_zero() { 0 } else { (-w0 / ws).floor() };
            return Err(Error::PoleHit(format!("denominator 1 - {} has weight zero", self.denominator(r))));
        }
        Ok(())
    }

    pub fn expand(&self, order: QExp) -> Result<QSeries> {
        self.expand_with_slack(order, 0)
    }

    pub fn expand_with_slack(&self, order: QExp, slack: i64) -> Result<QSeries> {
        if !self.quad.is_positive() {
            return Err(Error::DivergentWindow(format!("unary sum with quadratic coefficient {}", self.quad)));
        }
        self.check_poles()?;
        let hint = (-self.base.qexp / (self.quad * 2)).floor();
        let rs = window::line(|r| self.low(r), hint, order.rational(), slack)?;
        let mut acc = QSeries::zero(order);
        let one = Int::one();
        for r in rs {
            let pref = self.base.pow(r).times_q(self.quad * (r * r));
            add_geometric(&mut acc, &pref, &one, &self.denominator(r))?;
        }
        Ok(acc)
    }
}

/// `m(x, z; q^ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AppellSpec {
    pub x: WeightedMonomial,
    pub z: WeightedMonomial,
    pub modulus: QExp,
}

impl AppellSpec {
    pub fn new(x: WeightedMonomial, z: WeightedMonomial, modulus: QExp) -> Result<AppellSpec> {
        if !modulus.is_positive() {
            return Err(Error::NonPositiveWeight(modulus));
        }
        let spec = AppellSpec { x, z, modulus };
        spec.lerch().check_poles()?;
        Ok(spec)
    }

    /// The numerator sum `Σ (-1)^r q^{ρ C(r,2)} z^r / (1 - q^{ρ(r-1)} x z)`.
    pub fn lerch(&self) -> LerchSum {
        let rho = self.modulus;
        LerchSum {
            quad: rho / 2,
            base: -self.z.times_q(-(rho / 2)),
            u0: (self.x * self.z).times_q(-rho),
            ustep: qm(rho),
        }
    }
}

/// `m(x, z; q^ρ) = Θ(z; q^ρ)^{-1} Σ_r (-1)^r q^{ρ C(r,2)} z^r / (1 - q^{ρ(r-1)} x z)`.
pub fn appell_m(spec: &AppellSpec, order: QExp) -> Result<QSeries> {
    appell_m_with_slack(spec, order, 0)
}

pub fn appell_m_with_slack(spec: &AppellSpec, order: QExp, slack: i64) -> Result<QSeries> {
    let sum = spec.lerch();
    let theta = th(spec.z, spec.modulus);
    let factors: Vec<Factor> = vec![Box::new(move |o| sum.expand_with_slack(o, slack)), Box::new(move |o| theta_inverse(&theta, o))];
    crate::blocks::product(&factors, order)
}

/// Appell function as a product factor; the `AppellSpec` is validated first.
pub fn appell_factor<'a>(x: WeightedMonomial, z: WeightedMonomial, modulus: QExp) -> Result<Factor<'a>> {
    let spec = AppellSpec::new(x, z, modulus)?;
    Ok(Box::new(move |o| appell_m(&spec, o)))
}

/// `g₃(x; q) = -x^{-1} m(q² x^{-3}, x²; q³) - x^{-2} m(q x^{-3}, x²; q³)`.
pub fn g3(x: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    let x3i = x.pow(-3);
    let z = x.pow(2);
    let terms = vec![
        Term::new(-x.inv(), vec![appell_factor(x3i.times_q(2), z, qi(3))?]),
        Term::new(-x.pow(-2), vec![appell_factor(x3i.times_q(1), z, qi(3))?]),
    ];
    sum_of_products(&terms, order)
}

fn discriminant(a: i64, b: i64, c: i64) -> Result<i64> {
    let d = b * b - a * c;
    if d <= 0 || a <= 0 || b <= 0 || c <= 0 {
        return Err(Error::ParamOutOfRange(format!("need positive a, b, c with b² - ac > 0, got ({a}, {b}, {c})")));
    }
    Ok(d)
}

/// `g_{a,b,c}(x, y, z1, z0; q)`, the two finite sums of theta-Appell products.
pub fn g_abc(a: i64, b: i64, c: i64, x: &WeightedMonomial, y: &WeightedMonomial, z1: &WeightedMonomial, z0: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    let d = discriminant(a, b, c)?;
    let (mx, my) = (-*x, -*y);
    let mut terms = Vec::new();
    for t in 0..a {
        let arg = -(my.pow(a) * mx.pow(-b)).times_q(a * binom2(b + 1) - c * binom2(a + 1) - t * d);
        terms.push(Term::new(
            my.pow(t).times_q(c * binom2(t)),
            vec![theta_factor(th(x.times_q(b * t), qi(a))), appell_factor(arg, *z0, qi(a * d))?],
        ));
    }
    for t in 0..c {
        let arg = -(mx.pow(c) * my.pow(-b)).times_q(c * binom2(b + 1) - a * binom2(c + 1) - t * d);
        terms.push(Term::new(
            mx.pow(t).times_q(a * binom2(t)),
            vec![theta_factor(th(y.times_q(b * t), qi(c))), appell_factor(arg, *z1, qi(c * d))?],
        ));
    }
    sum_of_products(&terms, order)
}

fn frac_half(n: i64) -> QExp {
    qr(n.rem_euclid(2), 2)
}

/// `θ_{a,b,c}(x, y; q)`: the triple sum over `d*, e*, f ∈ {0, …, b-1}` with
/// `d = d* + {c/2}` and `e = e* + {a/2}`.
pub fn theta_abc(a: i64, b: i64, c: i64, x: &WeightedMonomial, y: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    let dd = discriminant(a, b, c)?;
    let (mx, my) = (-*x, -*y);
    let (qa, qb, qc, qd) = (qi(a), qi(b), qi(c), qi(dd));
    let mut terms = Vec::new();
    for ds in 0..b {
        for es in 0..b {
            let d = qi(ds) + frac_half(c);
            let e = qi(es) + frac_half(a);
            // both are integers by construction
            let dx = d - qc / 2;
            let ey = e + qa / 2;
            let (dxi, eyi) = (dx.floor(), ey.floor());
            debug_assert!(dx.is_integer() && ey.is_integer());
            let lead = qi(a * binom2(dxi) + b * dxi * eyi + c * binom2(eyi));
            for f in 0..b {
                let lin = qa * (qb * d + qi(b * b) + qc * e) - qi(a * c * (b + 1)) / 2;
                let pref = (mx.pow(dxi) * my.pow(eyi) * my.pow(a * f)).times_q(lead + qi(a * b * b * binom2(f)) + lin * f);
                let t1 = th(-mx.pow(c).times_q(qc * (qa * d + qb * e + qi(a * (b - 1)) / 2 + qi(a * b * f))), qi(c * b * b));
                let t2 = th(
                    -(mx.pow(-a * c) * my.pow(a * b)).times_q(qa * ((d + qi(b * (b + 1)) / 2 + qi(b * f)) * qd + qi(c * (a - b)) / 2)),
                    qi(a * b * b * dd),
                );
                let num = th((mx.pow(b - c) * my.pow(b - a)).times_q(qd * (d + e) + qi(a * c) - qi(b * (a + c)) / 2), qi(b * dd));
                let den1 = th((mx.pow(b) * my.pow(-a)).times_q(qd * e + qi(a * (c - b)) / 2), qi(b * dd));
                let den2 = th((my.pow(b) * mx.pow(-c)).times_q(qd * d + qi(c * (a - b)) / 2), qi(b * dd));
                terms.push(Term::new(
                    pref,
                    vec![
                        theta_factor(t1),
                        theta_factor(t2),
                        eta_factor(qi(b * dd), 3),
                        theta_factor(num),
                        theta_inverse_factor(den1),
                        theta_inverse_factor(den2),
                    ],
                ));
            }
        }
    }
    sum_of_products(&terms, order)
}

/// The same theta part written over `u, v mod b` before the regrouping by
/// `d` and `e`. Agrees with [`theta_abc`].
pub fn theta_abc_uv(a: i64, b: i64, c: i64, x: &WeightedMonomial, y: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    let dd = discriminant(a, b, c)?;
    let (mx, my) = (-*x, -*y);
    let (qa, qc, qd) = (qi(a), qi(c), qi(dd));
    let mut terms = Vec::new();
    for u in 0..b {
        for v in 0..b {
            let lead = qi(a * binom2(u) + b * u * v + c * binom2(v));
            for f in 0..b {
                let e_f = qi(a * b * b * binom2(f)) + qi(a * f) * (qi(b * u + c * v) + qi(c * (a - 1)) / 2);
                let pref = (mx.pow(u) * my.pow(v) * my.pow(a * f)).times_q(lead + e_f);
                let t1 = th(-mx.pow(c).times_q(qc * (qi(a * (c - 1)) / 2 + qi(a * b * f + a * u + b * v))), qi(b * b * c));
                let t2 = th(
                    -(mx.pow(-a * c) * my.pow(a * b)).times_q(qa * (qd * (qi(binom2(b) + u + b * f) + qc / 2) + qi(c * (a - b)) / 2)),
                    qi(a * b * b * dd),
                );
                let num = th(
                    (mx.pow(b - c) * my.pow(b - a)).times_q(qd * (qi(u + v) + qa / 2 + qc / 2) + qi(a * c) - qi(b * (a + c)) / 2),
                    qi(b * dd),
                );
                let den1 = th((mx.pow(-c) * my.pow(b)).times_q(qd * (qi(u) + qc / 2) + qi(c * (a - b)) / 2), qi(b * dd));
                let den2 = th((mx.pow(b) * my.pow(-a)).times_q(qd * (qi(v) + qa / 2) + qi(a * (c - b)) / 2), qi(b * dd));
                terms.push(Term::new(
                    pref,
                    vec![
                        theta_factor(t1),
                        theta_factor(t2),
                        eta_factor(qi(b * dd), 3),
                        theta_factor(num),
                        theta_inverse_factor(den1),
                        theta_inverse_factor(den2),
                    ],
                ));
            }
        }
    }
    sum_of_products(&terms, order)
}

/// `g_{a,b,c}(x, y, -1, -1) + θ_{a,b,c}(x, y) / (Θ(-1; q^{aD}) Θ(-1; q^{cD}))`.
pub fn rhs_general_fabc(a: i64, b: i64, c: i64, x: &WeightedMonomial, y: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    let dd = discriminant(a, b, c)?;
    let m1 = WeightedMonomial::minus_one();
    let (x, y) = (*x, *y);
    let g = g_abc(a, b, c, &x, &y, &m1, &m1, order)?;
    let terms = vec![Term::new(
        WeightedMonomial::one(),
        vec![
            Box::new(move |o| theta_abc(a, b, c, &x, &y, o)) as Factor,
            theta_inverse_factor(th(m1, qi(a * dd))),
            theta_inverse_factor(th(m1, qi(c * dd))),
        ],
    )];
    Ok(g.add(&sum_of_products(&terms, order)?))
}

/// `Σ_{r,s} q^{A r² + B r s + C s²} x^r y^s` for a positive definite form.
pub fn binary_theta(qa: QExp, qb: QExp, qc: QExp, x: &WeightedMonomial, y: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    binary_theta_with_slack(qa, qb, qc, x, y, order, 0)
}

pub fn binary_theta_with_slack(qa: QExp, qb: QExp, qc: QExp, x: &WeightedMonomial, y: &WeightedMonomial, order: QExp, slack: i64) -> Result<QSeries> {
    let form = Quad { a: qa.rational(), b: qb.rational(), c: qc.rational(), lr: x.qexp.rational(), ls: y.qexp.rational(), k: 0.into() };
    let mut out = QSeries::zero(order);
    for (r, s) in window::points(&form, Region::Plane, order.rational(), slack)? {
        let mut m = x.pow(r) * y.pow(s);
        m.qexp = QExp::from(form.eval(r, s));
        out.add_term(&m, 1);
    }
    Ok(out)
}

fn check_strip(what: &str, m: &WeightedMonomial, d: i64) -> Result<()> {
    let w = m.qexp;
    if !w.is_positive() || w >= qi(d) {
        return Err(Error::WeightOutOfStrip(format!("{what} = {m} has weight {w}, outside (0, {d})")));
    }
    Ok(())
}

/// The three-part right side for `Σ sg(r,s) q^{a r²/2 + b r s + c s²/2} x1^r y1^s`
/// in terms of theta functions, Appell functions and binary theta series.
pub fn rhs_general_hecke(
    a: i64,
    b: i64,
    c: i64,
    x1: &WeightedMonomial,
    y1: &WeightedMonomial,
    x2: &WeightedMonomial,
    y2: &WeightedMonomial,
    order: QExp,
) -> Result<QSeries> {
    let dd = discriminant(a, b, c)?;
    let (x1, y1, x2, y2) = (*x1, *y1, *x2, *y2);
    let zx = x1.pow(c) * y1.pow(-b) * x2;
    let zy = x1.pow(-b) * y1.pow(a) * y2;
    check_strip("x1^c y1^-b x2", &zx, dd)?;
    check_strip("x1^-b y1^a y2", &zy, dd)?;
    let (qa, qb, qc, qd) = (qi(a), qi(b), qi(c), qi(dd));
    let mut terms = Vec::new();
    for t in 0..c {
        terms.push(Term::new(
            x1.pow(t).times_q(qa * (t * t) / 2),
            vec![
                theta_factor(th(-y1.times_q(qb * t + qc / 2), qc)),
                appell_factor(-(x1.pow(c) * y1.pow(-b)).times_q(qd * (qc / 2 - qi(t))), -x2.times_q(qc * qd / 2), qc * qd)?,
            ],
        ));
    }
    for t in 0..a {
        terms.push(Term::new(
            y1.pow(t).times_q(qc * (t * t) / 2),
            vec![
                theta_factor(th(-x1.times_q(qb * t + qa / 2), qa)),
                appell_factor(-(y1.pow(a) * x1.pow(-b)).times_q(qd * (qa / 2 - qi(t))), -y2.times_q(qa * qd / 2), qa * qd)?,
            ],
        ));
    }
    let xs = x1.pow(c) * x2;
    let ys = y1.pow(a) * y2;
    for u in 0..b {
        for v in 0..b {
            let pref = -(x1.pow(u) * y1.pow(v)).times_q(qa * (u * u) / 2 + qi(b * u * v) + qc * (v * v) / 2);
            let xs_uv = xs.times_q(qi(c * (a * u + b * v)));
            let ys_uv = ys.times_q(qi(a * (b * u + c * v)));
            let s2: Factor = Box::new(move |o| binary_theta(qi(b * b * c) / 2, qi(a * b * c), qi(a * b * b) / 2, &xs_uv, &ys_uv, o));
            terms.push(Term::new(
                pref,
                vec![
                    s2,
                    theta_inverse_factor(th(-x2.times_q(qc * qd / 2), qc * qd)),
                    theta_inverse_factor(th(-y2.times_q(qa * qd / 2), qa * qd)),
                    eta_factor(qb * qd, 3),
                    theta_factor(th((x1.pow(c - b) * y1.pow(a - b) * x2 * y2).times_q(-(qd * (u + v))), qb * qd)),
                    theta_inverse_factor(th(zx.times_q(-(qd * u)), qb * qd)),
                    theta_inverse_factor(th(zy.times_q(-(qd * v)), qb * qd)),
                ],
            ));
        }
    }
    sum_of_products(&terms, order)
}

/// The theta-less right side: a `t`-sum of unary Lerch sums plus a
/// `(u mod b², v mod b)` sum of unary theta series times Lerch sums, both
/// divided by `Σ q^{cD r²/2} x2^r`.
pub fn rhs_thetaless(a: i64, b: i64, c: i64, x1: &WeightedMonomial, y1: &WeightedMonomial, x2: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    let dd = discriminant(a, b, c)?;
    let (x1, y1, x2) = (*x1, *y1, *x2);
    let zx = x1.pow(c) * y1.pow(-b) * x2;
    check_strip("x1^c y1^-b x2", &zx, dd)?;
    let (qa, qb, qc, qd) = (qi(a), qi(b), qi(c), qi(dd));
    let theta2 = th(-x2.times_q(qc * qd / 2), qc * qd);
    let mut terms = Vec::new();
    for t in 0..c {
        let lerch = LerchSum { quad: qc * qd / 2, base: x2, u0: zx.times_q(-(qd * t)), ustep: qm(qc * qd) };
        lerch.check_poles()?;
        terms.push(Term::new(
            x1.pow(t).times_q(qa * (t * t) / 2),
            vec![
                theta_factor(th(-y1.times_q(qb * t + qc / 2), qc)),
                theta_inverse_factor(theta2),
                Box::new(move |o| lerch.expand(o)),
            ],
        ));
    }
    let zk = x1.pow(dd) * x2.pow(-a);
    let w = x1.pow(-c) * y1.pow(b) * x2.inv();
    for u in 0..b * b {
        for v in 0..b {
            let pref = (x1.pow(u) * y1.pow(v)).times_q(qa * (u * u) / 2 + qi(b * u * v) + qc * (v * v) / 2);
            let unary = th(-(x1.pow(c) * x2).times_q(qi(c * (a * u + b * v)) + qi(b * b * c) / 2), qi(b * b * c));
            let lerch = LerchSum {
                quad: qi(a * b * b) * qd / 2,
                base: zk.times_q(qi((a * u + b * v) * dd)),
                u0: w.times_q(qd * u),
                ustep: qm(qd * (b * b)),
            };
            lerch.check_poles()?;
            terms.push(Term::new(pref, vec![theta_factor(unary), theta_inverse_factor(theta2), Box::new(move |o| lerch.expand(o))]));
        }
    }
    sum_of_products(&terms, order)
}

/// Left side of the unary kernel `Σ_k (-1)^k q^{k²/2 + (n+1/2)k} / (1 - x q^k)`.
pub fn lerch_kernel(n: i64, x: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    LerchSum { quad: qr(1, 2), base: -qm(qi(n) + qr(1, 2)), u0: *x, ustep: qm(qi(1)) }.expand(order)
}

/// Right side `(q)_∞³ / (x^n Θ(x; q))` of the unary kernel.
pub fn lerch_kernel_rhs(n: i64, x: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    let terms = vec![Term::new(x.pow(-n), vec![eta_factor(qi(1), 3), theta_inverse_factor(th(*x, qi(1)))])];
    sum_of_products(&terms, order)
}

/// `Σ_{k,l} sg(k+γ1, l+γ2) q^{kl} z2^k z1^l`.
pub fn double_geometric(z1: &WeightedMonomial, z2: &WeightedMonomial, g1: i64, g2: i64, order: QExp) -> Result<QSeries> {
    double_geometric_with_slack(z1, z2, g1, g2, order, 0)
}

pub fn double_geometric_with_slack(z1: &WeightedMonomial, z2: &WeightedMonomial, g1: i64, g2: i64, order: QExp, slack: i64) -> Result<QSeries> {
    let zero = Rational64::from_integer(0);
    let form = Quad { a: zero, b: 1.into(), c: zero, lr: z2.qexp.rational(), ls: z1.qexp.rational(), k: zero };
    let sub = form.substitute(1, -g1, 1, -g2);
    let mut out = QSeries::zero(order);
    for (region, sg) in [(Region::Pos, 1), (Region::Neg, -1)] {
        for (i, j) in window::points(&sub, region, order.rational(), slack)? {
            let (k, l) = (i - g1, j - g2);
            let m = (z2.pow(k) * z1.pow(l)).times_q(k * l);
            out.add_term(&m, sg);
        }
    }
    Ok(out)
}

/// `(q)_∞³ Θ(z1 z2; q) / (Θ(z1; q) Θ(z2; q))`.
pub fn double_geometric_rhs(z1: &WeightedMonomial, z2: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    let terms = vec![Term::new(
        WeightedMonomial::one(),
        vec![
            eta_factor(qi(1), 3),
            theta_factor(th(*z1 * *z2, qi(1))),
            theta_inverse_factor(th(*z1, qi(1))),
            theta_inverse_factor(th(*z2, qi(1))),
        ],
    )];
    sum_of_products(&terms, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::{fabc, quad_sum_half};
    use crate::qring::FormalVar;
    use proptest::prelude::*;

    fn gx(n: i64, d: i64) -> WeightedMonomial {
        WeightedMonomial::generic(FormalVar::X1, qr(n, d))
    }

    fn gy(n: i64, d: i64) -> WeightedMonomial {
        WeightedMonomial::generic(FormalVar::Y1, qr(n, d))
    }

    /// Direct definition with a fixed generous window, independent of the
    /// convex scan.
    fn appell_oracle(x: &WeightedMonomial, z: &WeightedMonomial, rho: i64, order: QExp) -> QSeries {
        let big = order + qi(40);
        let mut s = QSeries::zero(big);
        for r in -60..=60 {
            let pref = z.pow(r).times_q(qi(rho * binom2(r)));
            let pref = if r % 2 == 0 { pref } else { -pref };
            let u = (*x * *z).times_q(qi(rho * (r - 1)));
            add_geometric(&mut s, &pref, &Int::one(), &u).unwrap();
        }
        let inv = theta_inverse(&th(*z, qi(rho)), big).unwrap();
        s.mul(&inv).truncated(order)
    }

    #[test]
    fn appell_matches_oracle() {
        let n = qi(10);
        let spec = AppellSpec::new(qm(qi(1)), WeightedMonomial::minus_one(), qi(3)).unwrap();
        assert_eq!(appell_m(&spec, n).unwrap(), appell_oracle(&spec.x, &spec.z, 3, n));
        let x = gx(1, 7);
        let spec = AppellSpec::new(x.pow(2), x.inv(), qi(1)).unwrap();
        assert_eq!(appell_m(&spec, n).unwrap(), appell_oracle(&spec.x, &spec.z, 1, n));
    }

    #[test]
    fn appell_errors() {
        let r = AppellSpec::new(qm(qi(1)), qm(qi(3)), qi(3)).map(|s| appell_m(&s, qi(5)));
        assert!(matches!(r, Ok(Err(Error::DegenerateTheta(_)))));
        let x = WeightedMonomial::var(FormalVar::X1);
        assert!(matches!(AppellSpec::new(x.pow(2), x.inv(), qi(1)), Err(Error::PoleHit(_))));
    }

    #[test]
    fn g3_functional_equations() {
        for x in [gx(1, 7), gx(1, 11)] {
            let n = qi(15);
            let gqx = g3(&x.times_q(1), n).unwrap();
            let gx_ = g3(&x, n + qi(1)).unwrap();
            let mut rhs = gx_.mul_monomial(&-x.pow(3));
            rhs.add_term(&-x, 1);
            rhs.add_term(&-x.pow(2), 1);
            assert!(gqx.agrees_with(&rhs));
            assert!(g3(&x.inv(), n).unwrap().agrees_with(&gqx));
        }
    }

    #[test]
    fn f121_display() {
        let (x, y) = (gx(1, 7), gy(1, 11));
        let n = qi(12);
        let lhs = fabc(1, 2, 1, &x, &y, n).unwrap();
        let m1 = WeightedMonomial::minus_one();
        let terms = vec![
            Term::new(WeightedMonomial::one(), vec![theta_factor(th(y, qi(1))), appell_factor((x * y.pow(-2)).times_q(2), m1, qi(3)).unwrap()]),
            Term::new(WeightedMonomial::one(), vec![theta_factor(th(x, qi(1))), appell_factor((y * x.pow(-2)).times_q(2), m1, qi(3)).unwrap()]),
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
        let rhs = sum_of_products(&terms, n).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(rhs_general_fabc(1, 2, 1, &x, &y, n).unwrap(), lhs);
    }

    #[test]
    fn theta_abc_forms() {
        let (x, y) = (gx(1, 7), gy(1, 11));
        let n = qi(10);
        for (a, b, c) in [(1, 2, 1), (1, 2, 3), (2, 3, 2)] {
            let t = theta_abc(a, b, c, &x, &y, n).unwrap();
            let uv = theta_abc_uv(a, b, c, &x, &y, n).unwrap();
            assert_eq!(t, uv, "({a},{b},{c})");
        }
    }

    #[test]
    fn general_fabc_cases() {
        let (x, y) = (gx(1, 7), gy(1, 11));
        for (a, b, c, n) in [(2, 3, 2, 10), (1, 4, 1, 8), (1, 2, 3, 8)] {
            let n = qi(n);
            assert_eq!(rhs_general_fabc(a, b, c, &x, &y, n).unwrap(), fabc(a, b, c, &x, &y, n).unwrap(), "({a},{b},{c})");
        }
    }

    fn hecke_args(a: i64, b: i64, c: i64) -> (WeightedMonomial, WeightedMonomial, WeightedMonomial, WeightedMonomial) {
        let x1 = gx(2, 7);
        let y1 = gy(3, 7);
        let d = b * b - a * c;
        // pure q-powers placing both combinations at weight D/2 + small offsets
        let wx2 = qr(d, 2) + qr(1, 5) - (x1.qexp * c - y1.qexp * b);
        let wy2 = qr(d, 2) + qr(1, 13) - (y1.qexp * a - x1.qexp * b);
        (x1, y1, qm(wx2), qm(wy2))
    }

    #[test]
    fn general_hecke_rhs() {
        for (a, b, c, n) in [(1, 2, 1, 12), (1, 2, 3, 10)] {
            let (x1, y1, x2, y2) = hecke_args(a, b, c);
            let n = qi(n);
            assert_eq!(rhs_general_hecke(a, b, c, &x1, &y1, &x2, &y2, n).unwrap(), quad_sum_half(a, b, c, &x1, &y1, n).unwrap());
        }
    }

    #[test]
    fn general_hecke_strip() {
        let x1 = gx(2, 7);
        let y1 = gy(3, 7);
        let r = rhs_general_hecke(1, 2, 1, &x1, &y1, &qm(qr(1, 5)), &qm(qr(1, 5)), qi(5));
        assert!(matches!(r, Err(Error::WeightOutOfStrip(_))));
    }

    #[test]
    fn thetaless_rhs() {
        for (a, b, c, n) in [(1, 2, 1, 12), (1, 2, 3, 10)] {
            let (x1, y1, x2, _) = hecke_args(a, b, c);
            let n = qi(n);
            assert_eq!(rhs_thetaless(a, b, c, &x1, &y1, &x2, n).unwrap(), quad_sum_half(a, b, c, &x1, &y1, n).unwrap());
        }
    }

    #[test]
    fn lerch_kernel_identity() {
        for x in [gx(1, 7), gx(-3, 11)] {
            for n in -2..=2 {
                let o = qi(20);
                assert_eq!(lerch_kernel(n, &x, o).unwrap(), lerch_kernel_rhs(n, &x, o).unwrap());
            }
        }
    }

    #[test]
    fn double_geometric_identity() {
        for g1 in -1..=1 {
            for g2 in -1..=1 {
                let z1 = gx(1, 7).times_q(g1);
                let z2 = gy(5, 11).times_q(g2);
                let o = qi(12);
                assert_eq!(double_geometric(&z1, &z2, g1, g2, o).unwrap(), double_geometric_rhs(&z1, &z2, o).unwrap());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn appell_window_soundness(nx in -20i64..20, nz in -20i64..20, rho in 1i64..4) {
            let x = gx(nx, 7);
            let z = gy(nz, 11);
            prop_assume!(!(z.qexp / qi(rho)).is_integer());
            if let Ok(spec) = AppellSpec::new(x, z, qi(rho)) {
                let n = qi(8);
                prop_assert_eq!(appell_m(&spec, n).unwrap(), appell_m_with_slack(&spec, n, 5).unwrap());
            }
        }
    }
}
