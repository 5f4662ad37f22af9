//! q-Pochhammer symbols, Gaussian binomials and the theta function
//! `Θ(x; q^ρ) = (x)_∞ (q^ρ/x)_∞ (q^ρ)_∞ = Σ (-1)^n q^{ρ C(n,2)} x^n`.
//!
//! Theta arguments are first moved into the strip `0 <= w(x) < ρ` with the
//! elliptic shift `Θ(q^{nρ} x) = (-1)^n q^{-ρ C(n,2)} x^{-n} Θ(x)`, after which
//! every product factor has nonnegative weight.

use crate::error::{Error, Result};
use crate::int::Int;
use crate::qring::{QExp, QSeries, WeightedMonomial};
use crate::window;

/// `Θ(argument; q^modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaSpec {
    pub argument: WeightedMonomial,
    pub modulus: QExp,
}

/// A theta argument moved into the fundamental strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normalized {
    /// The shift `n` with `argument = q^{nρ} * reduced`.
    pub shift: i64,
    /// Monomial `(-1)^n q^{-ρ C(n,2)} reduced^{-n}`.
    pub prefactor: WeightedMonomial,
    /// Argument with weight in `[0, ρ)`.
    pub reduced: WeightedMonomial,
}

impl ThetaSpec {
    pub fn new(argument: WeightedMonomial, modulus: QExp) -> Result<ThetaSpec> {
        if !modulus.is_positive() {
            return Err(Error::NonPositiveWeight(modulus));
        }
        Ok(ThetaSpec { argument, modulus })
    }

    /// `Θ(x; q)`.
    pub fn unit(argument: WeightedMonomial) -> ThetaSpec {
        ThetaSpec { argument, modulus: QExp::int(1) }
    }

    pub fn normalize(&self) -> Normalized {
        let rho = self.modulus;
        let n = (self.argument.qexp / rho).floor();
        let reduced = self.argument.times_q(-(rho * n));
        let mut prefactor = reduced.pow(-n).times_q(-(rho * (n * (n - 1) / 2)));
        if n.rem_euclid(2) == 1 {
            prefactor = -prefactor;
        }
        Normalized { shift: n, prefactor, reduced }
    }

    /// True when the argument is `q^{nρ}` exactly, so the theta value is zero.
    pub fn is_degenerate(&self) -> bool {
        let r = self.normalize().reduced;
        r.is_one()
    }
}

/// `(u; q)_n`.
pub fn poch_finite(u: &WeightedMonomial, n: u32, order: QExp) -> QSeries {
    poch_finite_in(u, QExp::int(1), n, order)
}

/// `(u; q^ρ)_n`, exact below `order` for any sign of the weights.
pub fn poch_finite_in(u: &WeightedMonomial, rho: QExp, n: u32, order: QExp) -> QSeries {
    let factors: Vec<WeightedMonomial> = (0..n as i64).map(|i| u.times_q(rho * i)).collect();
    let shift = factors.iter().fold(QExp::zero(), |acc, f| if f.qexp.is_negative() { acc + f.qexp } else { acc });
    let mut s = QSeries::one(order - shift);
    for f in &factors {
        if f.qexp.is_positive() {
            s.mul_one_minus(f);
        } else {
            let mut lin = QSeries::one(s.order() - s.low_bound() + QExp::int(1));
            lin.add_term(f, -1);
            s = s.mul(&lin);
        }
    }
    s.truncated(order)
}

/// `(u; q)_∞`.
pub fn poch_inf(u: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    poch_inf_in(u, QExp::int(1), order)
}

/// `(u; q^ρ)_∞`, multiplying only the factors of weight below `order`.
pub fn poch_inf_in(u: &WeightedMonomial, rho: QExp, order: QExp) -> Result<QSeries> {
    if !u.qexp.is_positive() {
        return Err(Error::NonPositiveWeight(u.qexp));
    }
    let mut s = QSeries::one(order);
    let mut f = *u;
    while f.qexp < order {
        s.mul_one_minus(&f);
        f = f.times_q(rho);
    }
    Ok(s)
}

/// `1 / (u; q^ρ)_∞`.
pub fn poch_inf_inverse(u: &WeightedMonomial, rho: QExp, order: QExp) -> Result<QSeries> {
    if !u.qexp.is_positive() {
        return Err(Error::NonPositiveWeight(u.qexp));
    }
    let mut s = QSeries::one(order);
    let mut f = *u;
    while f.qexp < order {
        s.div_one_minus(&f);
        f = f.times_q(rho);
    }
    Ok(s)
}

/// `(q^ρ; q^ρ)_∞^k` for any integer `k`.
pub fn eta_power(rho: QExp, k: i32, order: QExp) -> QSeries {
    let mut s = QSeries::one(order);
    let mut f = WeightedMonomial::q(rho);
    while f.qexp < order {
        for _ in 0..k.unsigned_abs() {
            if k > 0 {
                s.mul_one_minus(&f);
            } else {
                s.div_one_minus(&f);
            }
        }
        f = f.times_q(rho);
    }
    s
}

/// Coefficients of the Gaussian binomial `[n, k]` as a polynomial in `q`, up to
/// and including degree `max_deg` (all of it when `None`). Empty when
/// `k < 0` or `k > n`.
pub fn qbinom_coeffs(n: i64, k: i64, max_deg: Option<usize>) -> Vec<Int> {
    if k < 0 || n < 0 || k > n {
        return Vec::new();
    }
    let k = k.min(n - k) as usize;
    let full = k * (n as usize - k) + 1;
    let len = max_deg.map_or(full, |d| full.min(d + 1));
    // dp[j] holds [m, j] for the current row m.
    let mut dp: Vec<Vec<Int>> = vec![Vec::new(); k + 1];
    dp[0] = vec![Int::one()];
    for m in 1..=n as usize {
        for j in (1..=k.min(m)).rev() {
            // [m, j] = [m-1, j-1] + q^j [m-1, j]
            let mut next = dp[j - 1].clone();
            if !dp[j].is_empty() {
                let shifted_len = (dp[j].len() + j).min(len);
                if next.len() < shifted_len {
                    next.resize(shifted_len, Int::zero());
                }
                for (d, c) in dp[j].iter().enumerate() {
                    if d + j >= len {
                        break;
                    }
                    next[d + j].add_assign(c);
                }
            }
            next.truncate(len);
            dp[j] = next;
        }
    }
    std::mem::take(&mut dp[k])
}

/// The Gaussian binomial `[n, k]` as a series; zero outside `0 <= k <= n`.
pub fn qbinom(n: i64, k: i64, order: QExp) -> QSeries {
    let max_deg = if order.is_positive() { Some(order.ceil() as usize) } else { Some(0) };
    let coeffs = qbinom_coeffs(n, k, max_deg);
    let mut s = QSeries::zero(order);
    for (d, c) in coeffs.iter().enumerate() {
        s.add_monomial(&WeightedMonomial::q(d as i64), c);
    }
    s
}

/// `Θ(x; q^ρ)` from the triple product. A degenerate argument yields the zero
/// series (see [`ThetaSpec::is_degenerate`]).
pub fn theta_prod(spec: &ThetaSpec, order: QExp) -> QSeries {
    let nz = spec.normalize();
    if spec.is_degenerate() {
        return QSeries::zero(order);
    }
    let rho = spec.modulus;
    let inner_order = order - nz.prefactor.qexp;
    let x = nz.reduced;
    let mut s = QSeries::one(inner_order);
    if x.qexp.is_zero() {
        let mut lin = QSeries::one(inner_order + QExp::int(1));
        lin.add_term(&x, -1);
        s = s.mul(&lin);
    } else {
        s.mul_one_minus(&x);
    }
    let xi = x.inv();
    let mut i = 1;
    loop {
        let step = rho * i;
        if step - x.qexp >= inner_order {
            break;
        }
        for f in [x.times_q(step), xi.times_q(step), WeightedMonomial::q(step)] {
            if f.qexp < inner_order {
                s.mul_one_minus(&f);
            }
        }
        i += 1;
    }
    s.mul_monomial(&nz.prefactor)
}

/// `Θ(x; q^ρ)` from the bilateral sum, with the same normalization.
pub fn theta_sum(spec: &ThetaSpec, order: QExp) -> Result<QSeries> {
    theta_sum_with_slack(spec, order, 0)
}

pub fn theta_sum_with_slack(spec: &ThetaSpec, order: QExp, slack: i64) -> Result<QSeries> {
    let nz = spec.normalize();
    let rho = spec.modulus;
    let inner_order = order - nz.prefactor.qexp;
    let x = nz.reduced;
    let half = rho.rational() / 2;
    let ns = window::quadratic_line(half, x.qexp.rational() - half, 0.into(), inner_order.rational(), slack)?;
    let mut s = QSeries::zero(inner_order);
    for n in ns {
        let m = x.pow(n).times_q(rho * (n * (n - 1) / 2));
        s.add_term(&m, if n.rem_euclid(2) == 0 { 1 } else { -1 });
    }
    Ok(s.mul_monomial(&nz.prefactor))
}

/// `1 / Θ(x; q^ρ)`.
///
/// The reduced argument must have positive weight, or be exactly `-1`, in
/// which case the value `1/Θ(-1) = 1 / (2 (-q^ρ)_∞^2 (q^ρ)_∞)` carries the
/// divisor two.
pub fn theta_inverse(spec: &ThetaSpec, order: QExp) -> Result<QSeries> {
    let nz = spec.normalize();
    let x = nz.reduced;
    if x.is_one() {
        return Err(Error::DegenerateTheta(format!("Θ({}; q^{}) = 0", spec.argument, spec.modulus)));
    }
    let rho = spec.modulus;
    let inv_pref = nz.prefactor.inv();
    let inner_order = order - inv_pref.qexp;
    let mut s = QSeries::one(inner_order);
    let halve = if x.qexp.is_zero() {
        if x.has_vars() {
            return Err(Error::PoleHit(format!(
                "Θ({}; q^{}) has a zero-weight factor and cannot be expanded",
                spec.argument, spec.modulus
            )));
        }
        true
    } else {
        s.div_one_minus(&x);
        false
    };
    let xi = x.inv();
    let mut i = 1;
    loop {
        let step = rho * i;
        if step - x.qexp >= inner_order {
            break;
        }
        for f in [x.times_q(step), xi.times_q(step), WeightedMonomial::q(step)] {
            if f.qexp < inner_order {
                s.div_one_minus(&f);
            }
        }
        i += 1;
    }
    if halve {
        s = s.div_scalar(2);
    }
    Ok(s.mul_monomial(&inv_pref))
}

/// A factor of a product, computable to any requested order.
pub type Factor<'a> = Box<dyn Fn(QExp) -> Result<QSeries> + 'a>;

/// The product of all factors, exact below `order`.
///
/// Each factor is first evaluated at `order`; any factor whose validity falls
/// short of `order` minus the lowest exponents of the others is recomputed at
/// the required order before multiplying.
pub fn product(factors: &[Factor<'_>], order: QExp) -> Result<QSeries> {
    let mut vals: Vec<QSeries> = factors.iter().map(|f| f(order)).collect::<Result<_>>()?;
    loop {
        let lows: Vec<QExp> = vals.iter().map(|v| v.low_bound()).collect();
        let total = lows.iter().fold(QExp::zero(), |a, &b| a + b);
        let mut changed = false;
        for (i, f) in factors.iter().enumerate() {
            let need = order - (total - lows[i]);
            if vals[i].order() < need {
                vals[i] = f(need)?;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let lows: Vec<QExp> = vals.iter().map(|v| v.low_bound()).collect();
    let mut rest = lows.iter().fold(QExp::zero(), |a, &b| a + b);
    let mut iter = vals.into_iter().zip(lows);
    let (first, l0) = match iter.next() {
        Some(v) => v,
        None => return Ok(QSeries::one(order)),
    };
    rest = rest - l0;
    let mut acc = first;
    for (v, l) in iter {
        rest = rest - l;
        acc = acc.mul_trunc(&v, Some(order - rest));
    }
    acc.truncate(order);
    Ok(acc)
}

/// `coeff * prefactor * Π factors`, one summand of a [`sum_of_products`].
pub struct Term<'a> {
    pub coeff: i64,
    pub prefactor: WeightedMonomial,
    pub factors: Vec<Factor<'a>>,
}

impl<'a> Term<'a> {
    pub fn new(prefactor: WeightedMonomial, factors: Vec<Factor<'a>>) -> Term<'a> {
        Term { coeff: 1, prefactor, factors }
    }
}

/// Adds up the terms, each exact below `order`.
pub fn sum_of_products(terms: &[Term<'_>], order: QExp) -> Result<QSeries> {
    let mut acc = QSeries::zero(order);
    for t in terms {
        let p = product(&t.factors, order - t.prefactor.qexp)?.mul_monomial(&t.prefactor);
        if t.coeff == 1 {
            acc.add_assign(&p);
        } else {
            acc.add_assign(&p.scale(t.coeff));
        }
    }
    Ok(acc)
}

pub fn theta_factor<'a>(spec: ThetaSpec) -> Factor<'a> {
    Box::new(move |o| Ok(theta_prod(&spec, o)))
}

pub fn theta_inverse_factor<'a>(spec: ThetaSpec) -> Factor<'a> {
    Box::new(move |o| theta_inverse(&spec, o))
}

/// `(q^ρ; q^ρ)_∞^k` as a factor.
pub fn eta_factor<'a>(rho: QExp, k: i32) -> Factor<'a> {
    Box::new(move |o| Ok(eta_power(rho, k, o)))
}

/// Shorthand for `ThetaSpec { argument, modulus }` with a positive modulus.
pub fn th(argument: WeightedMonomial, modulus: QExp) -> ThetaSpec {
    assert!(modulus.is_positive(), "theta modulus must be positive");
    ThetaSpec { argument, modulus }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qring::FormalVar;
    use proptest::prelude::*;

    fn x() -> WeightedMonomial {
        WeightedMonomial::var(FormalVar::X1)
    }

    fn poly(terms: &[(i64, i64)], order: i64) -> QSeries {
        QSeries::from_q_poly(terms.iter().map(|&(e, c)| (QExp::int(e), c)), QExp::int(order))
    }

    /// Euler's pentagonal numbers, computed independently of any product.
    fn pentagonal(order: i64, scale: i64) -> QSeries {
        let mut s = QSeries::zero(QExp::int(order));
        for k in -20i64..=20 {
            let e = scale * k * (3 * k - 1) / 2;
            s.add_term(&WeightedMonomial::q(e), if k % 2 == 0 { 1 } else { -1 });
        }
        s
    }

    #[test]
    fn poch_finite_small_cases() {
        let u = x().times_q(1);
        assert_eq!(poch_finite(&u, 0, QExp::int(10)), QSeries::one(QExp::int(10)));
        let mut expect = QSeries::one(QExp::int(10));
        expect.add_term(&u, -1);
        expect.add_term(&u.times_q(1), -1);
        expect.add_term(&u.pow(2).times_q(1), 1);
        assert_eq!(poch_finite(&u, 2, QExp::int(10)), expect);
    }

    #[test]
    fn poch_finite_is_a_quotient_of_infinite_products() {
        let n10 = QExp::int(10);
        let full = poch_inf(&WeightedMonomial::q(1), n10).unwrap();
        let tail = poch_inf(&WeightedMonomial::q(4), n10).unwrap().invert_unit().unwrap();
        assert_eq!(poch_finite(&WeightedMonomial::q(1), 3, n10), full.mul(&tail));
    }

    #[test]
    fn poch_finite_negative_weights() {
        let u = x().times_q(-2);
        let s = poch_finite(&u, 3, QExp::int(4));
        assert_eq!(s.order(), QExp::int(4));
        let mut expect = QSeries::one(QExp::int(30));
        for i in 0..3 {
            let mut f = QSeries::one(QExp::int(30));
            f.add_term(&u.times_q(i), -1);
            expect = expect.mul(&f);
        }
        assert_eq!(s, expect.truncated(QExp::int(4)));
    }

    #[test]
    fn euler_pentagonal() {
        assert_eq!(poch_inf(&WeightedMonomial::q(1), QExp::int(60)).unwrap(), pentagonal(60, 1));
        let e2 = poch_inf_in(&WeightedMonomial::q(2), QExp::int(2), QExp::int(60)).unwrap();
        assert_eq!(e2, pentagonal(60, 2));
        assert!(matches!(poch_inf(&x(), QExp::int(5)), Err(Error::NonPositiveWeight(_))));
    }

    #[test]
    fn eta_power_inverse() {
        let n = QExp::int(25);
        let e3 = eta_power(QExp::int(1), 3, n);
        let i3 = eta_power(QExp::int(1), -3, n);
        assert_eq!(e3.mul(&i3), QSeries::one(n));
        // partition numbers
        let p = eta_power(QExp::int(1), -1, n);
        let expected = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (k, c) in expected.iter().enumerate() {
            assert_eq!(p.coeff_at(QExp::int(k as i64)).unwrap(), crate::LaurentCoeff::constant(*c));
        }
    }

    #[test]
    fn qbinom_values() {
        assert_eq!(qbinom(5, 0, QExp::int(20)), QSeries::one(QExp::int(20)));
        assert_eq!(qbinom(4, 2, QExp::int(20)), poly(&[(0, 1), (1, 1), (2, 2), (3, 1), (4, 1)], 20));
        assert!(qbinom(3, 5, QExp::int(20)).is_zero());
        assert!(qbinom(3, -1, QExp::int(20)).is_zero());
    }

    #[test]
    fn qbinom_matches_pochhammer_quotient() {
        let n = QExp::int(40);
        let one = WeightedMonomial::q(1);
        for (a, b) in [(4, 2), (7, 3), (9, 4)] {
            let num = poch_finite(&one, a, n);
            let den = poch_finite(&one, b, n).mul(&poch_finite(&one, a - b, n)).invert_unit().unwrap();
            assert_eq!(qbinom(a as i64, b as i64, n), num.mul(&den));
        }
    }

    #[test]
    fn theta_degenerate_and_minus_one() {
        let s = ThetaSpec::unit(WeightedMonomial::q(1));
        assert!(s.is_degenerate());
        assert!(theta_prod(&s, QExp::int(10)).is_zero());
        let m = ThetaSpec::unit(WeightedMonomial::minus_one());
        let expect = poly(&[(0, 2), (1, 2), (3, 2), (6, 2), (10, 2)], 15);
        assert_eq!(theta_prod(&m, QExp::int(15)), expect);
        assert_eq!(theta_sum(&m, QExp::int(15)).unwrap(), expect);
        let inv = theta_inverse(&m, QExp::int(15)).unwrap();
        assert_eq!(inv.divisor(), &Int::from(2));
        assert_eq!(inv.mul(&expect), QSeries::one(QExp::int(15)));
        assert!(matches!(theta_inverse(&s, QExp::int(5)), Err(Error::DegenerateTheta(_))));
    }

    #[test]
    fn theta_elliptic_example() {
        let spec = ThetaSpec::unit(x().times_q(2));
        let base = theta_sum(&ThetaSpec::unit(x()), QExp::int(16)).unwrap();
        let expect = base.mul_monomial(&x().pow(-2).times_q(-1));
        assert_eq!(theta_sum(&spec, QExp::int(15)).unwrap(), expect.truncated(QExp::int(15)));
    }

    #[test]
    fn theta_forms_agree_at_third() {
        let spec = ThetaSpec::unit(x().times_q(QExp::new(1, 3)));
        assert_eq!(theta_prod(&spec, QExp::int(15)), theta_sum(&spec, QExp::int(15)).unwrap());
    }

    #[test]
    fn theta_inverse_round_trip() {
        for (w, rho) in [(QExp::new(2, 7), QExp::int(1)), (QExp::new(-9, 5), QExp::int(3)), (QExp::new(7, 2), QExp::new(3, 2))] {
            let spec = ThetaSpec::new(-x().times_q(w), rho).unwrap();
            let n = QExp::int(12);
            let t = theta_prod(&spec, n + QExp::int(20));
            let inv = theta_inverse(&spec, n + QExp::int(20)).unwrap();
            let p = t.mul(&inv);
            assert!(p.order() >= n);
            assert!(p.agrees_with(&QSeries::one(n)));
        }
    }

    #[test]
    fn product_meets_requested_order() {
        let n = QExp::int(10);
        let f1: Factor = Box::new(|o| Ok(QSeries::monomial(&WeightedMonomial::q(-3), o).add(&QSeries::one(o))));
        let f2: Factor = Box::new(|o| poch_inf(&WeightedMonomial::q(1), o));
        let p = product(&[f1, f2], n).unwrap();
        assert_eq!(p.order(), n);
        let direct = poch_inf(&WeightedMonomial::q(1), QExp::int(20)).unwrap().mul(&poly(&[(-3, 1), (0, 1)], 40));
        assert_eq!(p, direct.truncated(n));
    }

    fn arb_spec() -> impl Strategy<Value = ThetaSpec> {
        (any::<bool>(), -30i64..30, 1i64..8, -2i32..3, 1i64..4, 1i64..3).prop_filter_map("degenerate", |(neg, n, d, v, rn, rd)| {
            let m = WeightedMonomial { negative: neg, qexp: QExp::new(n, d), vexp: [v, 0, 0, 0] };
            let spec = ThetaSpec::new(m, QExp::new(rn, rd)).ok()?;
            if spec.is_degenerate() {
                None
            } else {
                Some(spec)
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn jacobi_triple_product(spec in arb_spec()) {
            let n = QExp::int(20);
            prop_assert_eq!(theta_prod(&spec, n), theta_sum(&spec, n).unwrap());
        }

        #[test]
        fn elliptic_shift(spec in arb_spec(), k in -3i64..=3) {
            let n = QExp::int(20);
            let rho = spec.modulus;
            let shifted = ThetaSpec { argument: spec.argument.times_q(rho * k), modulus: rho };
            let mut pref = spec.argument.pow(-k).times_q(-(rho * (k * (k - 1) / 2)));
            if k.rem_euclid(2) == 1 {
                pref = -pref;
            }
            let lhs = theta_sum(&shifted, n).unwrap();
            let rhs = theta_sum(&spec, n - pref.qexp).unwrap().mul_monomial(&pref);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn theta_inversion_symmetry(spec in arb_spec()) {
            // Θ(q^ρ / x) = Θ(x)
            let n = QExp::int(20);
            let flipped = ThetaSpec { argument: spec.argument.inv().times_q(spec.modulus), modulus: spec.modulus };
            prop_assert_eq!(theta_sum(&flipped, n).unwrap(), theta_sum(&spec, n).unwrap());
        }

        #[test]
        fn qbinom_symmetric(n in 0i64..14, k in 0i64..14) {
            let o = QExp::int(60);
            prop_assert_eq!(qbinom(n, k, o), qbinom(n, n - k, o));
        }

        #[test]
        fn theta_sum_window_is_sound(spec in arb_spec()) {
            let n = QExp::int(20);
            prop_assert_eq!(theta_sum_with_slack(&spec, n, 0).unwrap(), theta_sum_with_slack(&spec, n, 5).unwrap());
        }
    }
}
