//! Hecke-type double sums over indefinite quadratic forms, and the theta
//! functions θ_{p,m}, θ*_{p,m} built from them.
//!
//! All sums enumerate exactly the lattice points whose exponent lies below the
//! requested order; see [`crate::window`] for the stopping rules.

use num_rational::Rational64;

use crate::error::Result;
use crate::qring::{QExp, QSeries, WeightedMonomial};
use crate::window::{self, Quad, Region};

/// `sg(r, s) = (sg(r) + sg(s)) / 2` with `sg(0) = 1`.
pub fn sg_pair(r: i64, s: i64) -> i64 {
    match (r >= 0, s >= 0) {
        (true, true) => 1,
        (false, false) => -1,
        _ => 0,
    }
}

/// Exponent convention of a [`QuadFormSum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `a C(r,2) + b r s + c C(s,2)` with the sign `(-1)^{r+s}`.
    Binomial,
    /// `a r^2/2 + b r s + c s^2/2`, no extra sign.
    Half,
}

/// `Σ sg(r,s) [sign] x^r y^s q^{Q(r,s)}` over `Z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadFormSum {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub convention: Convention,
    pub x: WeightedMonomial,
    pub y: WeightedMonomial,
    /// Restrict to `r + s` odd.
    pub odd_only: bool,
}

fn rat(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

impl QuadFormSum {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - self.a * self.c
    }

    /// Exponent of the `(r, s)` term including the weights of `x` and `y`.
    fn form(&self) -> Quad {
        let (a, b, c) = (rat(self.a), rat(self.b), rat(self.c));
        let half = Rational64::new(1, 2);
        let (lr, ls) = match self.convention {
            Convention::Binomial => (self.x.qexp.rational() - a * half, self.y.qexp.rational() - c * half),
            Convention::Half => (self.x.qexp.rational(), self.y.qexp.rational()),
        };
        Quad { a: a * half, b, c: c * half, lr, ls, k: rat(0) }
    }

    pub fn expand(&self, order: QExp) -> Result<QSeries> {
        self.expand_with_slack(order, 0)
    }

    /// As [`QuadFormSum::expand`], scanning `slack` extra indices past every
    /// stopping point.
    pub fn expand_with_slack(&self, order: QExp, slack: i64) -> Result<QSeries> {
        let form = self.form();
        let classes: &[(i64, i64)] = if self.odd_only { &[(0, 1), (1, 0)] } else { &[(0, 0)] };
        let step = if self.odd_only { 2 } else { 1 };
        let mut out = QSeries::zero(order);
        for &(rr, rs) in classes {
            let sub = form.substitute(step, rr, step, rs);
            for (region, sg) in [(Region::Pos, 1), (Region::Neg, -1)] {
                for (i, j) in window::points(&sub, region, order.rational(), slack)? {
                    let (r, s) = (step * i + rr, step * j + rs);
                    let mut m = self.x.pow(r) * self.y.pow(s);
                    m.qexp = QExp::from(form.eval(r, s));
                    let mut coeff = sg;
                    if self.convention == Convention::Binomial && (r + s).rem_euclid(2) == 1 {
                        coeff = -coeff;
                    }
                    out.add_term(&m, coeff);
                }
            }
        }
        Ok(out)
    }
}

/// `f_{a,b,c}(x, y; q) = Σ sg(r,s) (-1)^{r+s} x^r y^s q^{a C(r,2) + b r s + c C(s,2)}`.
pub fn fabc(a: i64, b: i64, c: i64, x: &WeightedMonomial, y: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    QuadFormSum { a, b, c, convention: Convention::Binomial, x: *x, y: *y, odd_only: false }.expand(order)
}

/// `Σ sg(r,s) q^{a r^2/2 + b r s + c s^2/2} x1^r y1^s`.
pub fn quad_sum_half(a: i64, b: i64, c: i64, x1: &WeightedMonomial, y1: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    QuadFormSum { a, b, c, convention: Convention::Half, x: *x1, y: *y1, odd_only: false }.expand(order)
}

/// `θ_{p,m}` for the family parameter `t`:
/// `Σ_{r ≢ s (2)} sg(r,s) (-1)^{(r-s-1)/2} q^{r²/8 + (4t-1) r s/4 + s²/8 + (p+m) r/2 + (p-m) s/2}`.
pub fn theta_pm(t: i64, p: i64, m: i64, order: QExp) -> Result<QSeries> {
    theta_pm_with_slack(t, p, m, order, 0)
}

pub fn theta_pm_with_slack(t: i64, p: i64, m: i64, order: QExp, slack: i64) -> Result<QSeries> {
    let form = Quad {
        a: Rational64::new(1, 8),
        b: Rational64::new(4 * t - 1, 4),
        c: Rational64::new(1, 8),
        lr: Rational64::new(p + m, 2),
        ls: Rational64::new(p - m, 2),
        k: rat(0),
    };
    let mut out = QSeries::zero(order);
    for (rr, rs) in [(0, 1), (1, 0)] {
        let sub = form.substitute(2, rr, 2, rs);
        for (region, sg) in [(Region::Pos, 1), (Region::Neg, -1)] {
            for (i, j) in window::points(&sub, region, order.rational(), slack)? {
                let (r, s) = (2 * i + rr, 2 * j + rs);
                let sign = if ((r - s - 1) / 2).rem_euclid(2) == 0 { sg } else { -sg };
                out.add_term(&WeightedMonomial::q(QExp::from(form.eval(r, s))), sign);
            }
        }
    }
    Ok(out)
}

/// Exponent of the normalizing power in `θ*_{p,m} = q^{-m²/(2(2t-1)) + p²/(4t)} θ_{p,m}`.
pub fn theta_star_shift(t: i64, p: i64, m: i64) -> QExp {
    QExp::new(-m * m, 2 * (2 * t - 1)) + QExp::new(p * p, 4 * t)
}

pub fn theta_pm_star(t: i64, p: i64, m: i64, order: QExp) -> Result<QSeries> {
    let shift = theta_star_shift(t, p, m);
    Ok(theta_pm(t, p, m, order - shift)?.mul_monomial(&WeightedMonomial::q(shift)))
}
