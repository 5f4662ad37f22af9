//! Exact coefficient ring: truncated Laurent series in fractional powers of `q`
//! whose coefficients are integer Laurent polynomials in up to four formal
//! variables.
//!
//! A [`QSeries`] always carries a validity order `N`: every coefficient of
//! `q^e` with `e < N` is exact, nothing is known about `e >= N`. Ring
//! operations propagate the order so that a product of two truncated series
//! never claims more than it knows.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::int::Int;

/// Number of formal variables a coefficient polynomial can carry.
pub const NVARS: usize = 4;

/// Exponent vector over the formal variables, indexed by [`FormalVar::index`].
pub type VarExp = [i32; NVARS];

pub const ZERO_VEXP: VarExp = [0; NVARS];

/// The formal variables standing in for "generic" arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FormalVar {
    X1,
    Y1,
    X2,
    Y2,
}

impl FormalVar {
    pub const ALL: [FormalVar; NVARS] = [FormalVar::X1, FormalVar::Y1, FormalVar::X2, FormalVar::Y2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            FormalVar::X1 => "x",
            FormalVar::Y1 => "y",
            FormalVar::X2 => "x2",
            FormalVar::Y2 => "y2",
        }
    }

    pub fn from_symbol(s: &str) -> Option<FormalVar> {
        FormalVar::ALL.into_iter().find(|v| v.symbol() == s)
    }
}

fn vexp_add(a: &VarExp, b: &VarExp) -> VarExp {
    let mut out = *a;
    for i in 0..NVARS {
        out[i] += b[i];
    }
    out
}


// ---------------------------------------------------------------------------
// QExp
// ---------------------------------------------------------------------------

/// An exact rational exponent of `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QExp(Rational64);

impl QExp {
    pub fn new(numer: i64, denom: i64) -> QExp {
        assert!(denom != 0, "zero denominator in q-exponent");
        QExp(Rational64::new(numer, denom))
    }

    pub fn int(n: i64) -> QExp {
        QExp(Rational64::from_integer(n))
    }

    pub fn zero() -> QExp {
        QExp::int(0)
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> QExp {
        QExp(self.0 - self.0.floor())
    }

    pub fn abs(&self) -> QExp {
        QExp(self.0.abs())
    }

    pub fn rational(&self) -> Rational64 {
        self.0
    }

    /// Numerator of this exponent over a denominator `den` that it divides.
    pub(crate) fn scaled(&self, den: i64) -> i64 {
        debug_assert_eq!(den % self.denom(), 0);
        self.numer() * (den / self.denom())
    }
}

impl From<i64> for QExp {
    fn from(n: i64) -> QExp {
        QExp::int(n)
    }
}

impl From<Rational64> for QExp {
    fn from(r: Rational64) -> QExp {
        QExp(r)
    }
}

impl Add for QExp {
    type Output = QExp;
    fn add(self, o: QExp) -> QExp {
        QExp(self.0 + o.0)
    }
}

impl Sub for QExp {
    type Output = QExp;
    fn sub(self, o: QExp) -> QExp {
        QExp(self.0 - o.0)
    }
}

impl Neg for QExp {
    type Output = QExp;
    fn neg(self) -> QExp {
        QExp(-self.0)
    }
}

impl Mul for QExp {
    type Output = QExp;
    fn mul(self, o: QExp) -> QExp {
        QExp(self.0 * o.0)
    }
}

impl Mul<i64> for QExp {
    type Output = QExp;
    fn mul(self, o: i64) -> QExp {
        QExp(self.0 * o)
    }
}

impl std::ops::Div<i64> for QExp {
    type Output = QExp;
    fn div(self, o: i64) -> QExp {
        QExp(self.0 / o)
    }
}

impl std::ops::Div for QExp {
    type Output = QExp;
    fn div(self, o: QExp) -> QExp {
        QExp(self.0 / o.0)
    }
}

impl fmt::Display for QExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for QExp {
    type Err = Error;
    fn from_str(s: &str) -> Result<QExp> {
        let bad = || Error::Parse(format!("invalid rational `{s}`"));
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d <= 0 {
                    return Err(bad());
                }
                Ok(QExp::new(n, d))
            }
            None => Ok(QExp::int(s.parse().map_err(|_| bad())?)),
        }
    }
}

// ---------------------------------------------------------------------------
// LaurentCoeff
// ---------------------------------------------------------------------------

/// Finite integer Laurent polynomial in the formal variables.
///
/// Stored as a list of `(exponent vector, coefficient)` pairs sorted by
/// exponent vector, with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct LaurentCoeff {
    terms: Vec<(VarExp, Int)>,
}

impl LaurentCoeff {
    pub fn zero() -> LaurentCoeff {
        LaurentCoeff::default()
    }

    pub fn constant<T: Into<Int>>(c: T) -> LaurentCoeff {
        LaurentCoeff::monomial(ZERO_VEXP, c)
    }

    pub fn monomial<T: Into<Int>>(v: VarExp, c: T) -> LaurentCoeff {
        let c = c.into();
        if c.is_zero() {
            LaurentCoeff::zero()
        } else {
            LaurentCoeff { terms: vec![(v, c)] }
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (VarExp, Int)>>(it: I) -> LaurentCoeff {
        let mut out = LaurentCoeff::zero();
        for (v, c) in it {
            out.add_monomial(v, &c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, v: &VarExp) -> Int {
        match self.terms.binary_search_by(|(k, _)| k.cmp(v)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Int::zero(),
        }
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&VarExp, &Int)> {
        self.terms.iter().map(|(v, c)| (v, c))
    }

    pub fn add_monomial(&mut self, v: VarExp, c: &Int) {
        if c.is_zero() {
            return;
        }
        match self.terms.binary_search_by(|(k, _)| k.cmp(&v)) {
            Ok(i) => {
                self.terms[i].1.add_assign(c);
                if self.terms[i].1.is_zero() {
                    self.terms.remove(i);
                }
            }
            Err(i) => self.terms.insert(i, (v, c.clone())),
        }
    }

    fn add_mul_monomial(&mut self, v: VarExp, a: &Int, b: &Int) {
        match self.terms.binary_search_by(|(k, _)| k.cmp(&v)) {
            Ok(i) => {
                self.terms[i].1.add_mul(a, b);
                if self.terms[i].1.is_zero() {
                    self.terms.remove(i);
                }
            }
            Err(i) => {
                let p = a.mul(b);
                if !p.is_zero() {
                    self.terms.insert(i, (v, p));
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &LaurentCoeff) {
        if self.terms.is_empty() {
            self.terms = other.terms.clone();
            return;
        }
        for (v, c) in &other.terms {
            self.add_monomial(*v, c);
        }
    }

    /// `self += factor * other` for a scalar `factor`.
    pub fn add_scaled(&mut self, other: &LaurentCoeff, factor: &Int) {
        for (v, c) in &other.terms {
            self.add_mul_monomial(*v, c, factor);
        }
    }

    /// `self += ±x^shift * other`.
    pub fn add_shifted(&mut self, other: &LaurentCoeff, shift: &VarExp, negate: bool) {
        for (v, c) in &other.terms {
            let key = vexp_add(v, shift);
            if negate {
                self.add_monomial(key, &c.neg());
            } else {
                self.add_monomial(key, c);
            }
        }
    }

    /// `self += a * b`.
    pub fn add_product(&mut self, a: &LaurentCoeff, b: &LaurentCoeff) {
        if a.terms.len() == 1 && a.terms[0].0 == ZERO_VEXP {
            return self.add_scaled(b, &a.terms[0].1);
        }
        if b.terms.len() == 1 && b.terms[0].0 == ZERO_VEXP {
            return self.add_scaled(a, &b.terms[0].1);
        }
        for (va, ca) in &a.terms {
            for (vb, cb) in &b.terms {
                self.add_mul_monomial(vexp_add(va, vb), ca, cb);
            }
        }
    }

    pub fn mul(&self, other: &LaurentCoeff) -> LaurentCoeff {
        let mut out = LaurentCoeff::zero();
        out.add_product(self, other);
        out
    }

    pub fn scale(&self, factor: &Int) -> LaurentCoeff {
        if factor.is_zero() {
            return LaurentCoeff::zero();
        }
        LaurentCoeff { terms: self.terms.iter().map(|(v, c)| (*v, c.mul(factor))).collect() }
    }

    pub fn neg(&self) -> LaurentCoeff {
        LaurentCoeff { terms: self.terms.iter().map(|(v, c)| (*v, c.neg())).collect() }
    }

    /// `±x^shift * self`.
    pub fn shifted(&self, shift: &VarExp, negate: bool) -> LaurentCoeff {
        LaurentCoeff {
            terms: self
                .terms
                .iter()
                .map(|(v, c)| (vexp_add(v, shift), if negate { c.neg() } else { c.clone() }))
                .collect(),
        }
    }

    /// `Some((negative, v))` when this polynomial is the single monomial `±x^v`.
    pub fn as_unit_monomial(&self) -> Option<(bool, VarExp)> {
        match self.terms.as_slice() {
            [(v, c)] if c.is_one() => Some((false, *v)),
            [(v, c)] if c.is_minus_one() => Some((true, *v)),
            _ => None,
        }
    }

    /// Gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> Int {
        let mut g = Int::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn div_exact(&mut self, d: &Int) {
        for (_, c) in self.terms.iter_mut() {
            *c = c.div_exact(d);
        }
    }

    /// Value at `x = 1` for every formal variable.
    pub fn sum_coefficients(&self) -> Int {
        let mut s = Int::zero();
        for (_, c) in &self.terms {
            s.add_assign(c);
        }
        s
    }

    /// Applies `v -> v'` to every exponent vector (must be injective).
    pub fn map_vars<F: Fn(&VarExp) -> VarExp>(&self, f: F) -> LaurentCoeff {
        LaurentCoeff::from_terms(self.terms.iter().map(|(v, c)| (f(v), c.clone())))
    }
}

impl fmt::Display for LaurentCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::render_poly(self))
    }
}

// ---------------------------------------------------------------------------
// WeightedMonomial
// ---------------------------------------------------------------------------

/// `sign * q^qexp * x^vexp`: the argument type of every series constructor.
///
/// A "generic" variable is represented as `q^alpha` times a formal variable,
/// so that every geometric denominator built from it has a nonzero q-weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightedMonomial {
    pub negative: bool,
    pub qexp: QExp,
    pub vexp: VarExp,
}

impl WeightedMonomial {
    pub fn one() -> WeightedMonomial {
        WeightedMonomial { negative: false, qexp: QExp::zero(), vexp: ZERO_VEXP }
    }

    pub fn minus_one() -> WeightedMonomial {
        -WeightedMonomial::one()
    }

    /// `q^e`.
    pub fn q<E: Into<QExp>>(e: E) -> WeightedMonomial {
        WeightedMonomial { negative: false, qexp: e.into(), vexp: ZERO_VEXP }
    }

    /// The bare formal variable `v`.
    pub fn var(v: FormalVar) -> WeightedMonomial {
        let mut vexp = ZERO_VEXP;
        vexp[v.index()] = 1;
        WeightedMonomial { negative: false, qexp: QExp::zero(), vexp }
    }

    /// `q^alpha * v`, the standard specialization of a generic variable.
    pub fn generic(v: FormalVar, alpha: QExp) -> WeightedMonomial {
        WeightedMonomial::var(v).times_q(alpha)
    }

    pub fn sign(&self) -> i64 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    /// The q-weight of the monomial.
    pub fn weight(&self) -> QExp {
        self.qexp
    }

    pub fn has_vars(&self) -> bool {
        self.vexp != ZERO_VEXP
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.qexp.is_zero() && !self.has_vars()
    }

    pub fn times_q<E: Into<QExp>>(self, e: E) -> WeightedMonomial {
        WeightedMonomial { qexp: self.qexp + e.into(), ..self }
    }

    pub fn pow(self, n: i64) -> WeightedMonomial {
        let mut vexp = self.vexp;
        for v in vexp.iter_mut() {
            *v = (*v as i64 * n) as i32;
        }
        WeightedMonomial { negative: self.negative && n.rem_euclid(2) == 1, qexp: self.qexp * n, vexp }
    }

    pub fn inv(self) -> WeightedMonomial {
        self.pow(-1)
    }
}

impl Mul for WeightedMonomial {
    type Output = WeightedMonomial;
    fn mul(self, o: WeightedMonomial) -> WeightedMonomial {
        WeightedMonomial {
            negative: self.negative != o.negative,
            qexp: self.qexp + o.qexp,
            vexp: vexp_add(&self.vexp, &o.vexp),
        }
    }
}

impl Neg for WeightedMonomial {
    type Output = WeightedMonomial;
    fn neg(self) -> WeightedMonomial {
        WeightedMonomial { negative: !self.negative, ..self }
    }
}

impl fmt::Display for WeightedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::render_monomial(self))
    }
}

// ---------------------------------------------------------------------------
// QSeries
// ---------------------------------------------------------------------------

/// Truncated Laurent series in `q^(1/base_den)` over [`LaurentCoeff`].
///
/// The represented value is `terms / divisor` with a positive integer divisor
/// coprime to the content of `terms`. The divisor is one for everything except
/// series built from an inverse of the non-primitive theta value `Θ(-1)`.
#[derive(Debug, Clone)]
pub struct QSeries {
    base_den: i64,
    order: i64,
    divisor: Int,
    terms: BTreeMap<i64, LaurentCoeff>,
}

/// First disagreement between two series.
#[derive(Debug, Clone, PartialEq)]
pub struct Difference {
    pub exponent: QExp,
    /// Left coefficient as a numerator polynomial and a positive divisor.
    pub left: (LaurentCoeff, Int),
    pub right: (LaurentCoeff, Int),
}

fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

const DENSE_LIMIT: i64 = 1 << 22;

impl QSeries {
    /// The zero series, exact below `order`.
    pub fn zero(order: QExp) -> QSeries {
        QSeries { base_den: order.denom(), order: order.numer(), divisor: Int::one(), terms: BTreeMap::new() }
    }

    pub fn one(order: QExp) -> QSeries {
        QSeries::monomial(&WeightedMonomial::one(), order)
    }

    /// A single weighted monomial, truncated at `order`.
    pub fn monomial(m: &WeightedMonomial, order: QExp) -> QSeries {
        let mut s = QSeries::zero(order);
        s.add_term(m, 1);
        s
    }

    /// Laurent polynomial in `q` from `(exponent, coefficient)` pairs.
    pub fn from_q_poly<I: IntoIterator<Item = (QExp, i64)>>(it: I, order: QExp) -> QSeries {
        let mut s = QSeries::zero(order);
        for (e, c) in it {
            s.add_term(&WeightedMonomial::q(e), c);
        }
        s
    }

    /// Series `terms / divisor` from exact exponents and numerator polynomials.
    pub fn from_terms<I: IntoIterator<Item = (QExp, LaurentCoeff)>>(it: I, divisor: Int, order: QExp) -> QSeries {
        assert!(!divisor.is_negative() && !divisor.is_zero(), "divisor must be positive");
        let mut s = QSeries::zero(order);
        for (e, c) in it {
            if e >= s.order() || c.is_zero() {
                continue;
            }
            s.ensure_den(e.denom());
            let key = e.scaled(s.base_den);
            let entry = s.terms.entry(key).or_default();
            entry.add_assign(&c);
            if entry.is_zero() {
                s.terms.remove(&key);
            }
        }
        s.divisor = divisor;
        s.normalize();
        s
    }

    pub fn base_den(&self) -> i64 {
        self.base_den
    }

    pub fn order(&self) -> QExp {
        QExp::new(self.order, self.base_den)
    }

    pub fn divisor(&self) -> &Int {
        &self.divisor
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero `q`-exponents.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total number of stored monomials.
    pub fn monomial_count(&self) -> usize {
        self.terms.values().map(|c| c.len()).sum()
    }

    /// Exponent of the lowest nonzero term, if any.
    pub fn low(&self) -> Option<QExp> {
        self.terms.keys().next().map(|&k| QExp::new(k, self.base_den))
    }

    /// Lowest exponent, or the order when nothing is known to be nonzero.
    /// Always a lower bound for the true lowest exponent.
    pub fn low_bound(&self) -> QExp {
        self.low().unwrap_or_else(|| self.order())
    }

    /// Exponents with their numerator polynomials, ascending.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (QExp, &LaurentCoeff)> + '_ {
        self.terms.iter().map(move |(&k, c)| (QExp::new(k, self.base_den), c))
    }

    /// Numerator polynomial of `q^e`; the true coefficient is this divided by
    /// [`QSeries::divisor`].
    pub fn coeff_at(&self, e: QExp) -> Result<LaurentCoeff> {
        if e >= self.order() {
            return Err(Error::BeyondOrder { exponent: e, order: self.order() });
        }
        if self.base_den % e.denom() != 0 {
            return Ok(LaurentCoeff::zero());
        }
        Ok(self.terms.get(&e.scaled(self.base_den)).cloned().unwrap_or_default())
    }

    fn ensure_den(&mut self, den: i64) {
        if self.base_den % den == 0 {
            return;
        }
        let new_den = lcm(self.base_den, den);
        let f = new_den / self.base_den;
        let old = std::mem::take(&mut self.terms);
        self.terms = old.into_iter().map(|(k, c)| (k * f, c)).collect();
        self.order *= f;
        self.base_den = new_den;
    }

    fn rebased(&self, den: i64) -> Cow<'_, QSeries> {
        if self.base_den == den {
            Cow::Borrowed(self)
        } else {
            let mut s = self.clone();
            s.ensure_den(den);
            Cow::Owned(s)
        }
    }

    fn compact_den(&mut self) {
        let mut g = self.base_den.gcd(&self.order);
        for k in self.terms.keys() {
            if g == 1 {
                return;
            }
            g = g.gcd(k);
        }
        if g > 1 {
            let old = std::mem::take(&mut self.terms);
            self.terms = old.into_iter().map(|(k, c)| (k / g, c)).collect();
            self.order /= g;
            self.base_den /= g;
        }
    }

    fn reduce_divisor(&mut self) {
        if self.divisor.is_one() {
            return;
        }
        if self.terms.is_empty() {
            self.divisor = Int::one();
            return;
        }
        let mut g = self.divisor.clone();
        for c in self.terms.values() {
            g = g.gcd(&c.content());
            if g.is_one() {
                return;
            }
        }
        for c in self.terms.values_mut() {
            c.div_exact(&g);
        }
        self.divisor = self.divisor.div_exact(&g);
    }

    fn normalize(&mut self) {
        self.compact_den();
        self.reduce_divisor();
    }

    /// Adds `c * m`; a no-op when the monomial lies at or above the order.
    pub fn add_monomial(&mut self, m: &WeightedMonomial, c: &Int) {
        if m.qexp >= self.order() || c.is_zero() {
            return;
        }
        self.ensure_den(m.qexp.denom());
        let key = m.qexp.scaled(self.base_den);
        let mut c = if m.negative { c.neg() } else { c.clone() };
        if !self.divisor.is_one() {
            c = c.mul(&self.divisor);
        }
        let entry = self.terms.entry(key).or_default();
        entry.add_monomial(m.vexp, &c);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_term(&mut self, m: &WeightedMonomial, c: i64) {
        self.add_monomial(m, &Int::from(c));
    }

    /// Discards every term at or above `order` and lowers the validity bound.
    pub fn truncate(&mut self, order: QExp) {
        if order >= self.order() {
            return;
        }
        self.ensure_den(order.denom());
        let cut = order.scaled(self.base_den);
        let _ = self.terms.split_off(&cut);
        self.order = cut;
        self.normalize();
    }

    pub fn truncated(&self, order: QExp) -> QSeries {
        let mut s = self.clone();
        s.truncate(order);
        s
    }

    fn add_into(&mut self, other: &QSeries, negate: bool) {
        let den = lcm(self.base_den, other.base_den);
        self.ensure_den(den);
        let other = other.rebased(den);
        self.order = self.order.min(other.order);
        let cut = self.order;
        let _ = self.terms.split_off(&cut);
        let g = self.divisor.gcd(&other.divisor);
        let self_mul = other.divisor.div_exact(&g);
        let mut other_mul = self.divisor.div_exact(&g);
        if !self_mul.is_one() {
            for c in self.terms.values_mut() {
                *c = c.scale(&self_mul);
            }
            self.divisor = self.divisor.mul(&self_mul);
        }
        if negate {
            other_mul = other_mul.neg();
        }
        for (&key, c) in other.terms.range(..cut) {
            match self.terms.entry(key) {
                Entry::Vacant(e) => {
                    e.insert(c.scale(&other_mul));
                }
                Entry::Occupied(mut e) => {
                    e.get_mut().add_scaled(c, &other_mul);
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
        self.normalize();
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let mut s = self.clone();
        s.add_into(other, false);
        s
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        let mut s = self.clone();
        s.add_into(other, true);
        s
    }

    pub fn add_assign(&mut self, other: &QSeries) {
        self.add_into(other, false);
    }

    pub fn sub_assign(&mut self, other: &QSeries) {
        self.add_into(other, true);
    }

    pub fn neg(&self) -> QSeries {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = c.neg();
        }
        s
    }

    /// Multiplication by an integer scalar.
    pub fn scale(&self, factor: i64) -> QSeries {
        if factor == 0 {
            return QSeries::zero(self.order());
        }
        let f = Int::from(factor);
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = c.scale(&f);
        }
        s.reduce_divisor();
        s
    }

    /// Exact division by a nonzero integer scalar.
    pub fn div_scalar(&self, d: i64) -> QSeries {
        assert!(d != 0, "division of a series by zero");
        let mut s = if d < 0 { self.neg() } else { self.clone() };
        s.divisor = s.divisor.mul(&Int::from(d).abs());
        s.reduce_divisor();
        s
    }

    /// Exact multiplication by a weighted monomial; the order shifts with it.
    pub fn mul_monomial(&self, m: &WeightedMonomial) -> QSeries {
        let mut s = self.clone();
        s.ensure_den(m.qexp.denom());
        let shift = m.qexp.scaled(s.base_den);
        let old = std::mem::take(&mut s.terms);
        s.terms = old.into_iter().map(|(k, c)| (k + shift, c.shifted(&m.vexp, m.negative))).collect();
        s.order += shift;
        s.compact_den();
        s
    }

    /// Cauchy product with order `min(a.order + low(b), b.order + low(a))`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        self.mul_trunc(other, None)
    }

    /// Cauchy product, additionally truncated at `cap` when given.
    pub fn mul_trunc(&self, other: &QSeries, cap: Option<QExp>) -> QSeries {
        let mut den = lcm(self.base_den, other.base_den);
        if let Some(cap) = cap {
            den = lcm(den, cap.denom());
        }
        let a = self.rebased(den);
        let b = other.rebased(den);
        let la = a.terms.keys().next().copied().unwrap_or(a.order);
        let lb = b.terms.keys().next().copied().unwrap_or(b.order);
        let mut order = (a.order + lb).min(b.order + la);
        if let Some(cap) = cap {
            order = order.min(cap.scaled(den));
        }
        let divisor = a.divisor.mul(&b.divisor);
        let mut out = QSeries { base_den: den, order, divisor, terms: BTreeMap::new() };
        if a.terms.is_empty() || b.terms.is_empty() || la + lb >= order {
            out.normalize();
            return out;
        }
        let lo = la + lb;
        let span = order - lo;
        if span <= DENSE_LIMIT {
            let mut acc: Vec<LaurentCoeff> = vec![LaurentCoeff::zero(); span as usize];
            for (&ea, ca) in &a.terms {
                if ea + lb >= order {
                    break;
                }
                for (&eb, cb) in &b.terms {
                    let e = ea + eb;
                    if e >= order {
                        break;
                    }
                    acc[(e - lo) as usize].add_product(ca, cb);
                }
            }
            out.terms = acc.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (lo + i as i64, c)).collect();
        } else {
            for (&ea, ca) in &a.terms {
                if ea + lb >= order {
                    break;
                }
                for (&eb, cb) in &b.terms {
                    let e = ea + eb;
                    if e >= order {
                        break;
                    }
                    out.terms.entry(e).or_default().add_product(ca, cb);
                }
            }
            out.terms.retain(|_, c| !c.is_zero());
        }
        out.normalize();
        out
    }

    /// `self^n` for `n >= 1`; `pow(0)` is one at the same order.
    pub fn pow(&self, n: u32) -> QSeries {
        if n == 0 {
            return QSeries::one(self.order() - self.low_bound());
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// In place `self *= (1 - u)` for `u` of positive weight.
    pub fn mul_one_minus(&mut self, u: &WeightedMonomial) {
        assert!(u.qexp.is_positive(), "mul_one_minus needs a positive weight");
        self.ensure_den(u.qexp.denom());
        let w = u.qexp.scaled(self.base_den);
        let keys: Vec<i64> = self.terms.range(..self.order - w).map(|(&k, _)| k).rev().collect();
        for k in keys {
            let src = self.terms[&k].shifted(&u.vexp, !u.negative);
            let target = k + w;
            let entry = self.terms.entry(target).or_default();
            entry.add_assign(&src);
            if entry.is_zero() {
                self.terms.remove(&target);
            }
        }
    }

    /// In place `self /= (1 - u)` for `u` of positive weight.
    pub fn div_one_minus(&mut self, u: &WeightedMonomial) {
        assert!(u.qexp.is_positive(), "div_one_minus needs a positive weight");
        self.ensure_den(u.qexp.denom());
        let w = u.qexp.scaled(self.base_den);
        let limit = self.order - w;
        let mut cursor = match self.terms.keys().next() {
            Some(&k) => k,
            None => return,
        };
        while cursor < limit {
            if let Some(src) = self.terms.get(&cursor) {
                let src = src.shifted(&u.vexp, u.negative);
                let target = cursor + w;
                let entry = self.terms.entry(target).or_default();
                entry.add_assign(&src);
                if entry.is_zero() {
                    self.terms.remove(&target);
                }
            }
            match self.terms.range(cursor + 1..).next() {
                Some((&k, _)) => cursor = k,
                None => break,
            }
        }
    }

    /// Multiplicative inverse of a series whose lowest numerator term is a
    /// single monomial with coefficient `±1`.
    pub fn invert_unit(&self) -> Result<QSeries> {
        let (&e0, c0) = self.terms.iter().next().ok_or(Error::NotAUnit)?;
        let (neg0, v0) = c0.as_unit_monomial().ok_or(Error::NotAUnit)?;
        let lead = WeightedMonomial { negative: neg0, qexp: QExp::new(e0, self.base_den), vexp: v0 };
        let lead_inv = lead.inv();
        let mut norm = self.mul_monomial(&lead_inv);
        let d = std::mem::replace(&mut norm.divisor, Int::one());
        let ord = norm.order;
        let rest: Vec<(i64, &LaurentCoeff)> = norm.terms.range(1..).map(|(&k, c)| (k, c)).collect();
        let mut inv: Vec<LaurentCoeff> = vec![LaurentCoeff::zero(); ord.max(0) as usize];
        if ord > 0 {
            inv[0] = LaurentCoeff::constant(1);
        }
        for k in 1..ord {
            let mut acc = LaurentCoeff::zero();
            for &(e, c) in &rest {
                if e > k {
                    break;
                }
                let prev = &inv[(k - e) as usize];
                if !prev.is_zero() {
                    acc.add_product(c, prev);
                }
            }
            inv[k as usize] = acc.neg();
        }
        let terms = inv.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as i64, c)).collect();
        let mut out = QSeries { base_den: norm.base_den, order: ord, divisor: Int::one(), terms };
        if !d.is_one() {
            for c in out.terms.values_mut() {
                *c = c.scale(&d);
            }
        }
        out.normalize();
        Ok(out.mul_monomial(&lead_inv))
    }

    /// Exact comparison below the smaller of the two orders.
    pub fn first_difference(&self, other: &QSeries) -> Option<Difference> {
        let den = lcm(self.base_den, other.base_den);
        let a = self.rebased(den);
        let b = other.rebased(den);
        let cut = a.order.min(b.order);
        let mut ia = a.terms.range(..cut).peekable();
        let mut ib = b.terms.range(..cut).peekable();
        let empty = LaurentCoeff::zero();
        loop {
            let (key, ca, cb) = match (ia.peek(), ib.peek()) {
                (None, None) => return None,
                (Some(&(&ka, ca)), None) => {
                    ia.next();
                    (ka, ca, &empty)
                }
                (None, Some(&(&kb, cb))) => {
                    ib.next();
                    (kb, &empty, cb)
                }
                (Some(&(&ka, ca)), Some(&(&kb, cb))) => match ka.cmp(&kb) {
                    Ordering::Less => {
                        ia.next();
                        (ka, ca, &empty)
                    }
                    Ordering::Greater => {
                        ib.next();
                        (kb, &empty, cb)
                    }
                    Ordering::Equal => {
                        ia.next();
                        ib.next();
                        (ka, ca, cb)
                    }
                },
            };
            let same = if a.divisor == b.divisor { ca == cb } else { ca.scale(&b.divisor) == cb.scale(&a.divisor) };
            if !same {
                return Some(Difference {
                    exponent: QExp::new(key, den),
                    left: (ca.clone(), a.divisor.clone()),
                    right: (cb.clone(), b.divisor.clone()),
                });
            }
        }
    }

    /// True when both series agree below the smaller order.
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        self.first_difference(other).is_none()
    }

    /// Applies an exponent-vector map to every coefficient.
    pub fn map_vars<F: Fn(&VarExp) -> VarExp>(&self, f: F) -> QSeries {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = c.map_vars(&f);
        }
        s.terms.retain(|_, c| !c.is_zero());
        s
    }
}

impl PartialEq for QSeries {
    /// Equality of values together with equal validity orders.
    fn eq(&self, other: &QSeries) -> bool {
        self.order() == other.order() && self.len() == other.len() && self.first_difference(other).is_none()
    }
}

impl Eq for QSeries {}

/// `1/(1-u)` expanded as a series in increasing powers of `q`.
///
/// For positive weight this is `sum u^k`; for negative weight the exact
/// rewrite `-u^{-1}/(1-u^{-1})` is expanded instead.
pub fn geometric(u: &WeightedMonomial, order: QExp) -> Result<QSeries> {
    let mut s = QSeries::zero(order);
    add_geometric(&mut s, &WeightedMonomial::one(), &Int::one(), u)?;
    Ok(s)
}

/// Adds `c * pref / (1-u)` into `acc`, up to the order of `acc`.
pub fn add_geometric(acc: &mut QSeries, pref: &WeightedMonomial, c: &Int, u: &WeightedMonomial) -> Result<()> {
    if u.qexp.is_zero() {
        return Err(Error::ZeroWeight);
    }
    let (mut m, step) = if u.qexp.is_positive() { (*pref, *u) } else { (-(*pref * u.inv()), u.inv()) };
    let ord = acc.order();
    while m.qexp < ord {
        acc.add_monomial(&m, c);
        m = m * step;
    }
    Ok(())
}

/// Lowest q-exponent of `pref / (1-u)` once expanded by [`geometric`].
pub fn geometric_low(pref: &WeightedMonomial, u: &WeightedMonomial) -> QExp {
    if u.qexp.is_negative() {
        pref.qexp - u.qexp
    } else {
        pref.qexp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> WeightedMonomial {
        WeightedMonomial::var(FormalVar::X1)
    }

    fn poly(terms: &[(i64, i64)], order: i64) -> QSeries {
        QSeries::from_q_poly(terms.iter().map(|&(e, c)| (QExp::int(e), c)), QExp::int(order))
    }

    #[test]
    fn add_cancels_and_takes_min_order() {
        let a = poly(&[(0, 1), (1, 1)], 10);
        let b = poly(&[(0, -1), (2, 1)], 6);
        let s = a.add(&b);
        assert_eq!(s, poly(&[(1, 1), (2, 1)], 6));
    }

    #[test]
    fn add_zero_is_identity() {
        let a = poly(&[(0, 3), (4, -2)], 8);
        assert_eq!(a.add(&QSeries::zero(QExp::int(8))), a);
    }

    #[test]
    fn add_rebases_denominators() {
        let a = QSeries::monomial(&WeightedMonomial::q(QExp::new(1, 2)), QExp::int(2));
        let b = QSeries::monomial(&WeightedMonomial::q(QExp::new(1, 3)), QExp::int(2));
        let s = a.add(&b);
        assert_eq!(s.base_den(), 6);
        assert_eq!(s.coeff_at(QExp::new(2, 6)).unwrap(), LaurentCoeff::constant(1));
        assert_eq!(s.coeff_at(QExp::new(3, 6)).unwrap(), LaurentCoeff::constant(1));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn mul_difference_of_squares() {
        let order = QExp::int(10);
        let xq = x().times_q(1);
        let mut a = QSeries::one(order);
        a.add_term(&xq, -1);
        let mut b = QSeries::one(order);
        b.add_term(&xq, 1);
        let mut expect = QSeries::one(order);
        expect.add_term(&xq.pow(2), -1);
        assert_eq!(a.mul(&b), expect);
    }

    #[test]
    fn mul_unit_and_telescoping() {
        let g = geometric(&WeightedMonomial::q(1), QExp::int(12)).unwrap();
        assert_eq!(g.mul(&QSeries::one(QExp::int(40))), g);
        assert_eq!(g.mul(&poly(&[(0, 1), (1, -1)], 100)), QSeries::one(QExp::int(12)));
    }

    #[test]
    fn mul_order_rule() {
        let a = poly(&[(2, 1)], 5);
        let b = poly(&[(-1, 1)], 7);
        assert_eq!(a.mul(&b).order(), QExp::int(4));
    }

    #[test]
    fn one_minus_in_place_matches_products() {
        let u = -x().times_q(QExp::new(1, 3));
        let base = poly(&[(0, 1), (1, 2), (3, -1)], 6);
        let mut s = base.clone();
        s.mul_one_minus(&u);
        let mut f = QSeries::one(QExp::int(50));
        f.add_monomial(&u, &Int::from(-1));
        assert_eq!(s, base.mul(&f));
        s.div_one_minus(&u);
        assert_eq!(s, base);
    }

    #[test]
    fn invert_geometric() {
        let inv = poly(&[(0, 1), (1, -1)], 8).invert_unit().unwrap();
        assert_eq!(inv, poly(&(0..8).map(|k| (k, 1)).collect::<Vec<_>>(), 8));
    }

    #[test]
    fn invert_factors_lowest_monomial() {
        let m = -x().times_q(QExp::new(1, 2));
        let a = poly(&[(0, 1), (1, 1)], 6).mul_monomial(&m);
        let inv = a.invert_unit().unwrap();
        let alt: Vec<(i64, i64)> = (0..6).map(|k| (k, if k % 2 == 0 { 1 } else { -1 })).collect();
        let expect = poly(&alt, 6).mul_monomial(&m.inv());
        assert_eq!(inv, expect);
        assert_eq!(inv.low(), Some(QExp::new(-1, 2)));
    }

    #[test]
    fn invert_rejects_non_unit() {
        assert!(matches!(poly(&[(0, 2), (1, 1)], 5).invert_unit(), Err(Error::NotAUnit)));
        assert!(matches!(QSeries::zero(QExp::int(3)).invert_unit(), Err(Error::NotAUnit)));
    }

    #[test]
    fn invert_with_divisor() {
        let half = poly(&[(0, 1), (1, 1)], 6).div_scalar(2);
        let inv = half.invert_unit().unwrap();
        assert_eq!(inv.mul(&half), QSeries::one(QExp::int(6)));
        assert_eq!(inv.divisor(), &Int::one());
    }

    #[test]
    fn geometric_directions() {
        let g = geometric(&WeightedMonomial::q(1), QExp::int(5)).unwrap();
        assert_eq!(g, poly(&[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)], 5));
        let u = x().times_q(-1);
        let g = geometric(&u, QExp::int(4)).unwrap();
        let mut expect = QSeries::zero(QExp::int(4));
        for k in 1..4 {
            expect.add_term(&u.inv().pow(k), -1);
        }
        assert_eq!(g, expect);
        assert!(matches!(geometric(&x(), QExp::int(4)), Err(Error::ZeroWeight)));
    }

    #[test]
    fn coeff_at_cases() {
        let s = poly(&[(0, 1), (1, 2)], 5);
        assert_eq!(s.coeff_at(QExp::int(1)).unwrap(), LaurentCoeff::constant(2));
        assert_eq!(s.coeff_at(QExp::new(1, 2)).unwrap(), LaurentCoeff::zero());
        assert!(matches!(s.coeff_at(QExp::int(7)), Err(Error::BeyondOrder { .. })));
    }

    #[test]
    fn divisor_is_reduced() {
        let s = poly(&[(0, 2), (3, 4)], 5).div_scalar(2);
        assert_eq!(s, poly(&[(0, 1), (3, 2)], 5));
        let h = poly(&[(0, 1)], 5).div_scalar(2);
        assert_eq!(h.divisor(), &Int::from(2));
        assert_eq!(h.add(&h), poly(&[(0, 1)], 5));
        assert_ne!(h, poly(&[(0, 1)], 5));
    }

    #[test]
    fn truncate_lowers_order() {
        let s = poly(&[(0, 1), (1, 2), (4, 1)], 6).truncated(QExp::new(5, 2));
        assert_eq!(s, poly(&[(0, 1), (1, 2)], 3).truncated(QExp::new(5, 2)));
        assert_eq!(s.order(), QExp::new(5, 2));
    }

    #[test]
    fn qexp_parse_and_display() {
        assert_eq!("3/6".parse::<QExp>().unwrap(), QExp::new(1, 2));
        assert_eq!(QExp::new(-1, 3).to_string(), "-1/3");
        assert!("1/0".parse::<QExp>().is_err());
        assert!("x".parse::<QExp>().is_err());
    }
}
