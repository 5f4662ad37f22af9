//! Lattice windows for truncated sums.
//!
//! Every bilateral or double sum in the crate enumerates exactly the lattice
//! points whose leading exponent lies below the requested order. The scans
//! here stop only once convexity guarantees that no further point can fall
//! below the bound; `slack` extends every scan by that many extra indices so
//! tests can confirm that nothing was missed.

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

type Q = Rational64;

const MAX_STEPS: i64 = 5_000_000;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// `a i^2 + b i j + c j^2 + lr i + ls j + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Quad {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub lr: Q,
    pub ls: Q,
    pub k: Q,
}

impl Quad {
    pub fn eval(&self, i: i64, j: i64) -> Q {
        let (i, j) = (q(i), q(j));
        self.a * i * i + self.b * i * j + self.c * j * j + self.lr * i + self.ls * j + self.k
    }

    /// The form in the variables `(M i + ri, N j + rj)`.
    pub fn substitute(&self, mi: i64, ri: i64, mj: i64, rj: i64) -> Quad {
        let (mi, ri, mj, rj) = (q(mi), q(ri), q(mj), q(rj));
        Quad {
            a: self.a * mi * mi,
            b: self.b * mi * mj,
            c: self.c * mj * mj,
            lr: mi * (q(2) * self.a * ri + self.b * rj + self.lr),
            ls: mj * (q(2) * self.c * rj + self.b * ri + self.ls),
            k: self.eval_q(ri, rj),
        }
    }

    fn eval_q(&self, i: Q, j: Q) -> Q {
        self.a * i * i + self.b * i * j + self.c * j * j + self.lr * i + self.ls * j + self.k
    }

    /// The form in `(-1-i, -1-j)`, mapping the negative quadrant onto the
    /// positive one.
    fn reflect(&self) -> Quad {
        self.substitute(-1, -1, -1, -1)
    }
}

/// The summation region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Region {
    /// `i >= 0` and `j >= 0`.
    Pos,
    /// `i < 0` and `j < 0`.
    Neg,
    /// All of `Z^2`.
    Plane,
}

fn divergent(what: &str, form: &Quad) -> Error {
    Error::DivergentWindow(format!("{what} for form {form:?}"))
}

/// All points of `region` with `form < bound`.
pub(crate) fn points(form: &Quad, region: Region, bound: Q, slack: i64) -> Result<Vec<(i64, i64)>> {
    match region {
        Region::Pos => orthant(form, bound, slack),
        Region::Neg => {
            let pts = orthant(&form.reflect(), bound, slack)?;
            Ok(pts.into_iter().map(|(i, j)| (-1 - i, -1 - j)).collect())
        }
        Region::Plane => plane(form, bound, slack),
    }
}

/// Points with `j >= 0` on the row `h(j) = c j^2 + s j + g`.
fn row(c: Q, s: Q, g: Q, bound: Q, slack: i64, out: &mut Vec<i64>) -> Result<()> {
    let h = |j: i64| c * q(j) * q(j) + s * q(j) + g;
    if c.is_zero() {
        if s.is_negative() || (s.is_zero() && g < bound) {
            return Err(Error::DivergentWindow(format!("row with linear slope {s} never closes")));
        }
        if s.is_zero() {
            return Ok(());
        }
        let mut j = 0;
        let mut extra = 0;
        loop {
            if h(j) < bound {
                out.push(j);
            } else {
                extra += 1;
                if extra > slack {
                    break;
                }
            }
            j += 1;
            if j > MAX_STEPS {
                return Err(Error::DivergentWindow("row scan exceeded step limit".into()));
            }
        }
        return Ok(());
    }
    let vertex = -s / (q(2) * c);
    let start = if vertex.is_negative() { 0 } else { vertex.floor().to_integer() };
    scan_convex(&h, start, Some(0), vertex, bound, slack, out)
}

/// Collects every integer `j` (at least `floor` when given) with `f(j) < bound`
/// for a convex `f` with minimum at `vertex`, starting the walk at `start`.
fn scan_convex<F: Fn(i64) -> Q>(
    f: &F,
    start: i64,
    floor: Option<i64>,
    vertex: Q,
    bound: Q,
    slack: i64,
    out: &mut Vec<i64>,
) -> Result<()> {
    let mut j = start;
    let mut extra = 0;
    let mut steps = 0;
    loop {
        if f(j) < bound {
            out.push(j);
        } else if q(j) > vertex {
            extra += 1;
            if extra > slack {
                break;
            }
        }
        j += 1;
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::DivergentWindow("convex scan exceeded step limit".into()));
        }
    }
    let mut j = start - 1;
    let mut extra = 0;
    loop {
        if let Some(fl) = floor {
            if j < fl {
                break;
            }
        }
        if f(j) < bound {
            out.push(j);
        } else if q(j) < vertex {
            extra += 1;
            if extra > slack {
                break;
            }
        }
        j -= 1;
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::DivergentWindow("convex scan exceeded step limit".into()));
        }
    }
    Ok(())
}

fn orthant(form: &Quad, bound: Q, slack: i64) -> Result<Vec<(i64, i64)>> {
    let Quad { a, b, c, lr, ls, k } = *form;
    if a.is_negative() || b.is_negative() || c.is_negative() {
        return Err(divergent("form is not nonnegative on the quadrant", form));
    }
    if a.is_zero() && !lr.is_positive() {
        return Err(divergent("exponent does not grow along the first axis", form));
    }
    if c.is_zero() && !ls.is_positive() && b.is_zero() {
        return Err(divergent("exponent does not grow along the second axis", form));
    }
    let g = |i: i64| a * q(i) * q(i) + lr * q(i) + k;
    let min_row = |i: i64| {
        let s = b * q(i) + ls;
        if c.is_positive() && s.is_negative() {
            g(i) - s * s / (q(4) * c)
        } else {
            g(i)
        }
    };
    let mut out = Vec::new();
    let mut i = 0;
    let mut extra = 0;
    loop {
        let s = b * q(i) + ls;
        let settled = (!s.is_negative() || b.is_zero()) && g(i + 1) >= g(i);
        if settled && min_row(i) >= bound {
            extra += 1;
            if extra > slack {
                break;
            }
        } else {
            let mut js = Vec::new();
            row(c, s, g(i), bound, slack, &mut js)?;
            out.extend(js.into_iter().map(|j| (i, j)));
        }
        i += 1;
        if i > MAX_STEPS {
            return Err(divergent("quadrant scan exceeded step limit", form));
        }
    }
    Ok(out)
}

fn plane(form: &Quad, bound: Q, slack: i64) -> Result<Vec<(i64, i64)>> {
    let Quad { a, b, c, lr, ls, k } = *form;
    if !a.is_positive() || !c.is_positive() || q(4) * a * c - b * b <= Q::zero() {
        return Err(divergent("form is not positive definite", form));
    }
    // Row minimum m(i) = min_j form(i, j), itself a convex quadratic in i.
    let ma = a - b * b / (q(4) * c);
    let ml = lr - b * ls / (q(2) * c);
    let mk = k - ls * ls / (q(4) * c);
    let m = |i: i64| ma * q(i) * q(i) + ml * q(i) + mk;
    let vertex = -ml / (q(2) * ma);
    let mut rows = Vec::new();
    scan_convex(&m, vertex.floor().to_integer(), None, vertex, bound, slack, &mut rows)?;
    let mut out = Vec::new();
    for i in rows {
        let s = b * q(i) + ls;
        let g = a * q(i) * q(i) + lr * q(i) + k;
        let h = |j: i64| c * q(j) * q(j) + s * q(j) + g;
        let v = -s / (q(2) * c);
        let mut js = Vec::new();
        scan_convex(&h, v.floor().to_integer(), None, v, bound, slack, &mut js)?;
        out.extend(js.into_iter().map(|j| (i, j)));
    }
    Ok(out)
}

/// Every integer `r` with `f(r) < bound` for a convex `f` tending to infinity
/// in both directions. `hint` should be near the minimum.
pub(crate) fn line(f: impl Fn(i64) -> Q, hint: i64, bound: Q, slack: i64) -> Result<Vec<i64>> {
    // Walk downhill to the minimum first.
    let mut r = hint;
    let mut steps = 0;
    while f(r - 1) < f(r) {
        r -= 1;
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::DivergentWindow("line scan has no minimum".into()));
        }
    }
    while f(r + 1) < f(r) {
        r += 1;
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::DivergentWindow("line scan has no minimum".into()));
        }
    }
    let mut out = Vec::new();
    scan_convex(&f, r, None, q(r), bound, slack, &mut out)?;
    Ok(out)
}

/// `line` for the quadratic `a r^2 + l r + k` with `a > 0`.
pub(crate) fn quadratic_line(a: Q, l: Q, k: Q, bound: Q, slack: i64) -> Result<Vec<i64>> {
    if !a.is_positive() {
        return Err(Error::DivergentWindow(format!("unary quadratic with leading coefficient {a}")));
    }
    let vertex = (-l / (q(2) * a)).floor().to_integer();
    line(|r| a * q(r) * q(r) + l * q(r) + k, vertex, bound, slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qq(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn brute(form: &Quad, region: Region, bound: Q, box_size: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for i in -box_size..=box_size {
            for j in -box_size..=box_size {
                let inside = match region {
                    Region::Pos => i >= 0 && j >= 0,
                    Region::Neg => i < 0 && j < 0,
                    Region::Plane => true,
                };
                if inside && form.eval(i, j) < bound {
                    out.push((i, j));
                }
            }
        }
        out.sort();
        out
    }

    fn sorted(mut v: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
        v.sort();
        v
    }

    #[test]
    fn f121_quadrants_match_brute_force() {
        // C(r,2) + 2rs + C(s,2) + r/7 + s/5
        let form = Quad { a: qq(1, 2), b: q(2), c: qq(1, 2), lr: qq(-1, 2) + qq(1, 7), ls: qq(-1, 2) + qq(1, 5), k: q(0) };
        for region in [Region::Pos, Region::Neg] {
            let got = sorted(points(&form, region, q(12), 0).unwrap());
            assert_eq!(got, brute(&form, region, q(12), 40));
        }
    }

    #[test]
    fn plane_matches_brute_force() {
        let form = Quad { a: q(2), b: q(1), c: q(3), lr: qq(1, 3), ls: qq(-5, 2), k: q(-1) };
        let got = sorted(points(&form, Region::Plane, q(20), 0).unwrap());
        assert_eq!(got, brute(&form, Region::Plane, q(20), 40));
    }

    #[test]
    fn divergent_forms_are_rejected() {
        let flat = Quad { a: q(0), b: q(1), c: q(0), lr: q(-1), ls: q(1), k: q(0) };
        assert!(matches!(points(&flat, Region::Pos, q(5), 0), Err(Error::DivergentWindow(_))));
        let indefinite = Quad { a: q(1), b: q(3), c: q(1), lr: q(0), ls: q(0), k: q(0) };
        assert!(matches!(points(&indefinite, Region::Plane, q(5), 0), Err(Error::DivergentWindow(_))));
    }

    #[test]
    fn substitution_is_exact() {
        let form = Quad { a: qq(1, 8), b: qq(7, 4), c: qq(1, 8), lr: qq(3, 2), ls: qq(1, 2), k: q(0) };
        let sub = form.substitute(2, 1, 2, 0);
        for i in -3..4 {
            for j in -3..4 {
                assert_eq!(sub.eval(i, j), form.eval(2 * i + 1, 2 * j));
            }
        }
    }

    #[test]
    fn kernel_form_closes_in_both_quadrants() {
        // k l + k w2 + l w1 with 0 < w < 1
        let form = Quad { a: q(0), b: q(1), c: q(0), lr: qq(2, 7), ls: qq(3, 7), k: q(0) };
        for region in [Region::Pos, Region::Neg] {
            let got = sorted(points(&form, region, q(6), 0).unwrap());
            assert_eq!(got, brute(&form, region, q(6), 60));
        }
    }

    proptest! {
        #[test]
        fn quadrant_scan_is_complete(a in 0i64..4, b in 1i64..5, c in 0i64..4, lr in 1i64..9, ls in 1i64..9, n in 1i64..15) {
            let form = Quad { a: qq(a, 2), b: q(b), c: qq(c, 2), lr: qq(lr, 7), ls: qq(ls, 5), k: q(0) };
            let got = sorted(points(&form, Region::Pos, q(n), 0).unwrap());
            prop_assert_eq!(got, brute(&form, Region::Pos, q(n), 120));
        }

        #[test]
        fn slack_adds_nothing_below_bound(a in 1i64..4, l in -20i64..20, n in 0i64..30) {
            let mut base = quadratic_line(q(a), q(l), q(0), q(n), 0).unwrap();
            let mut wide = quadratic_line(q(a), q(l), q(0), q(n), 5).unwrap();
            base.sort();
            wide.sort();
            prop_assert_eq!(base, wide);
        }
    }
}
