//! Exact arithmetic in `Z[ζ_N] = Z[q]/Φ_N(q)` and the root-of-unity
//! dualities `F_t^{(m)}(ζ_N^{-1}) = U_t^{(m)}(-1; ζ_N)`.

use std::collections::HashMap;
use std::fmt;

use crate::blocks::qbinom_coeffs;
use crate::error::{Error, Result};
use crate::int::Int;
use crate::qring::QExp;
use crate::report::{IdentityReport, Stopwatch};

/// The `N`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_poly(n: u64) -> Vec<Int> {
    assert!(n >= 1, "cyclotomic index must be positive");
    // q^n - 1 divided by every Φ_d with d | n, d < n
    let mut p = vec![Int::zero(); n as usize + 1];
    p[0] = Int::from(-1);
    p[n as usize] = Int::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = div_exact_monic(&p, &cyclotomic_poly(d));
        }
    }
    p
}

fn div_exact_monic(num: &[Int], den: &[Int]) -> Vec<Int> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![Int::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, b) in den.iter().enumerate() {
            rem[i + j].sub_assign(&c.mul(b));
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Int::is_zero));
    quot
}

/// A residue modulo `Φ_N`, stored with degree below `deg Φ_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycElement {
    n: u64,
    coeffs: Vec<Int>,
}

impl CycElement {
    pub fn zero(n: u64) -> CycElement {
        CycElement { n, coeffs: vec![Int::zero(); phi_degree(n)] }
    }

    pub fn one(n: u64) -> CycElement {
        CycElement::from_laurent(n, &[(0, Int::one())])
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Int::is_zero)
    }

    /// Reduces `Σ c_e q^e` modulo `Φ_N`; negative exponents use `ζ^{-1} = ζ^{N-1}`.
    pub fn from_laurent(n: u64, terms: &[(i64, Int)]) -> CycElement {
        let mut dense = vec![Int::zero(); n as usize];
        for (e, c) in terms {
            dense[e.rem_euclid(n as i64) as usize].add_assign(c);
        }
        CycElement::reduce(n, dense)
    }

    /// Reduces a dense polynomial in `q` (constant term first).
    pub fn from_poly(n: u64, poly: &[Int]) -> CycElement {
        let mut dense = vec![Int::zero(); n as usize];
        for (e, c) in poly.iter().enumerate() {
            dense[e % n as usize].add_assign(c);
        }
        CycElement::reduce(n, dense)
    }

    /// Same as [`from_poly`](Self::from_poly) after `q -> q^{-1}`.
    pub fn from_poly_inverted(n: u64, poly: &[Int]) -> CycElement {
        let mut dense = vec![Int::zero(); n as usize];
        for (e, c) in poly.iter().enumerate() {
            dense[(-(e as i64)).rem_euclid(n as i64) as usize].add_assign(c);
        }
        CycElement::reduce(n, dense)
    }

    fn reduce(n: u64, mut p: Vec<Int>) -> CycElement {
        let phi = cyclotomic_poly(n);
        let d = phi.len() - 1;
        for i in (d..p.len()).rev() {
            let c = std::mem::take(&mut p[i]);
            if c.is_zero() {
                continue;
            }
            for (j, b) in phi.iter().enumerate().take(d) {
                p[i - d + j].sub_assign(&c.mul(b));
            }
        }
        p.resize(d, Int::zero());
        CycElement { n, coeffs: p }
    }

    pub fn add(&self, o: &CycElement) -> CycElement {
        assert_eq!(self.n, o.n, "mixed cyclotomic fields");
        let mut c = self.coeffs.clone();
        for (a, b) in c.iter_mut().zip(&o.coeffs) {
            a.add_assign(b);
        }
        CycElement { n: self.n, coeffs: c }
    }

    pub fn mul(&self, o: &CycElement) -> CycElement {
        assert_eq!(self.n, o.n, "mixed cyclotomic fields");
        let d = self.coeffs.len();
        let mut p = vec![Int::zero(); (2 * d).max(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                p[i + j].add_mul(a, b);
            }
        }
        CycElement::reduce(self.n, p)
    }
}

fn phi_degree(n: u64) -> usize {
    cyclotomic_poly(n).len() - 1
}

impl fmt::Display for CycElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match e {
                0 => c.to_string(),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{e}"),
            });
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `Σ c_e q^e` at `q = ζ_N`.
pub fn cyc_eval(terms: &[(i64, Int)], n: u64) -> CycElement {
    CycElement::from_laurent(n, terms)
}

fn check_range(t: i64, m: i64) -> Result<()> {
    if t < 1 || m < 1 || m > t {
        return Err(Error::ParamOutOfRange(format!("need 1 <= m <= t, got t = {t}, m = {m}")));
    }
    Ok(())
}

struct Ring {
    n: u64,
    inverted: bool,
    binoms: HashMap<(i64, i64), CycElement>,
}

impl Ring {
    fn binom(&mut self, top: i64, bottom: i64) -> CycElement {
        let (n, inv) = (self.n, self.inverted);
        self.binoms
            .entry((top, bottom))
            .or_insert_with(|| {
                let p = qbinom_coeffs(top, bottom, None);
                if inv {
                    CycElement::from_poly_inverted(n, &p)
                } else {
                    CycElement::from_poly(n, &p)
                }
            })
            .clone()
    }

    fn qpow(&self, e: i64) -> CycElement {
        let e = if self.inverted { -e } else { e };
        CycElement::from_laurent(self.n, &[(e, Int::one())])
    }

    /// `(q)_k` for `k = 0..len`.
    fn pochhammers(&self, len: i64) -> Vec<CycElement> {
        let mut out = vec![CycElement::one(self.n)];
        for k in 1..len {
            let mut lin = CycElement::one(self.n).coeffs;
            let step = self.qpow(k);
            for (a, b) in lin.iter_mut().zip(&step.coeffs) {
                a.sub_assign(b);
            }
            let lin = CycElement { n: self.n, coeffs: lin };
            let next = out[(k - 1) as usize].mul(&lin);
            out.push(next);
        }
        out
    }
}

/// `F_t^{(m)}(ζ_N^{-1})`. Chains with `k_t >= N` vanish through `(q)_{k_t}`,
/// and `k_i <= k_{i+1} + δ_{i,m-1}` keeps the sum finite.
pub fn f_root(t: i64, m: i64, n: u64) -> Result<CycElement> {
    check_range(t, m)?;
    let mut ring = Ring { n, inverted: true, binoms: HashMap::new() };
    let poch = ring.pochhammers(n as i64);
    let mut total = CycElement::zero(n);
    for kt in 0..n as i64 {
        let mut ks = vec![0; t as usize];
        ks[(t - 1) as usize] = kt;
        f_descend(&mut ring, t, m, &mut ks, t - 1, &poch[kt as usize], &mut total);
    }
    Ok(total.mul(&ring.qpow(t)))
}

fn f_descend(ring: &mut Ring, t: i64, m: i64, ks: &mut Vec<i64>, filled: i64, acc: &CycElement, total: &mut CycElement) {
    // ks[filled..] is fixed; pick k_{filled} (1-based index `filled`) next
    if filled == 0 {
        let mut e = 0;
        for i in 1..t {
            let k = ks[(i - 1) as usize];
            e += k * k + if i >= m { k } else { 0 };
        }
        *total = total.add(&acc.mul(&ring.qpow(e)));
        return;
    }
    let i = filled;
    let upper = ks[i as usize] + if i == m - 1 { 1 } else { 0 };
    for k in 0..=upper {
        ks[(i - 1) as usize] = k;
        let b = ring.binom(ks[i as usize] + if i == m - 1 { 1 } else { 0 }, k);
        if b.is_zero() {
            continue;
        }
        let next = acc.mul(&b);
        f_descend(ring, t, m, ks, filled - 1, &next, total);
    }
}

/// `U_t^{(m)}(-1; ζ_N)`. The factor `(q)_{k_t-1}²` kills every chain with `k_t > N`.
pub fn u_root(t: i64, m: i64, n: u64) -> Result<CycElement> {
    check_range(t, m)?;
    let mut ring = Ring { n, inverted: false, binoms: HashMap::new() };
    let poch = ring.pochhammers(n as i64 + 1);
    let mut total = CycElement::zero(n);
    let mut ks = Vec::new();
    u_descend(&mut ring, t, m, n as i64, &poch, &mut ks, &CycElement::one(n), &mut total);
    Ok(total.mul(&ring.qpow(-t)))
}

#[allow(clippy::too_many_arguments)]
fn u_descend(
    ring: &mut Ring,
    t: i64,
    m: i64,
    n: i64,
    poch: &[CycElement],
    ks: &mut Vec<i64>,
    acc: &CycElement,
    total: &mut CycElement,
) {
    let j = ks.len() as i64;
    if j == t {
        let kt = ks[(t - 1) as usize];
        let sq: i64 = ks[..(t - 1) as usize].iter().map(|k| k * k).sum();
        let p = &poch[(kt - 1) as usize];
        *total = total.add(&acc.mul(&p.mul(p)).mul(&ring.qpow(kt + sq)));
        return;
    }
    let lo = ks.last().copied().unwrap_or(0);
    let hi = n;
    for k in lo..=hi {
        if (j + 1 == m || j + 1 == t) && k == 0 {
            continue;
        }
        let next = if j >= 1 {
            let i = j;
            let mut top = k - ks[(i - 1) as usize] - i;
            for jj in 1..=i {
                top += 2 * ks[(jj - 1) as usize] + if m > jj { 1 } else { 0 };
            }
            let b = ring.binom(top, k - ks[(i - 1) as usize]);
            if b.is_zero() {
                continue;
            }
            acc.mul(&b)
        } else {
            acc.clone()
        };
        ks.push(k);
        u_descend(ring, t, m, n, poch, ks, &next, total);
        ks.pop();
    }
}

/// Compares `F_t^{(m)}(ζ_N^{-1})` with `U_t^{(m)}(-1; ζ_N)`.
pub fn duality_check(t: i64, m: i64, n: u64) -> Result<IdentityReport> {
    let start = Stopwatch::start();
    let f = f_root(t, m, n)?;
    let u = u_root(t, m, n)?;
    let params = [("t", t.to_string()), ("m", m.to_string()), ("N", n.to_string())];
    let mut rep = IdentityReport::new("duality", params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(), QExp::zero());
    rep.compare_values("F(1/z) vs U(-1;z)", f.to_string(), u.to_string());
    rep.runtime_ms = start.millis();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&c| Int::from(c)).collect()
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_poly(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_poly(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12), ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn eval_examples() {
        for n in 1..12u64 {
            assert_eq!(cyc_eval(&[(n as i64, Int::one())], n), CycElement::one(n));
        }
        for n in [2u64, 3, 5, 7] {
            let all: Vec<(i64, Int)> = (0..n as i64).map(|e| (e, Int::one())).collect();
            assert!(cyc_eval(&all, n).is_zero());
        }
        assert_eq!(cyc_eval(&[(-1, Int::one())], 3), cyc_eval(&[(2, Int::one())], 3));
    }

    #[test]
    fn at_one() {
        assert_eq!(f_root(2, 1, 1).unwrap(), CycElement::one(1));
        assert_eq!(u_root(2, 1, 1).unwrap(), CycElement::one(1));
    }

    #[test]
    fn dualities() {
        for t in 1..=3 {
            for m in 1..=t {
                for n in 1..=10u64 {
                    let r = duality_check(t, m, n).unwrap();
                    assert!(r.is_equal(), "{r}");
                }
            }
        }
    }

    #[test]
    fn range() {
        assert!(matches!(f_root(2, 3, 5), Err(Error::ParamOutOfRange(_))));
    }

    proptest! {
        #[test]
        fn eval_is_multiplicative(n in 1u64..16, a in prop::collection::vec((-20i64..20, -5i64..5), 0..6),
                                  b in prop::collection::vec((-20i64..20, -5i64..5), 0..6)) {
            let pa: Vec<(i64, Int)> = a.iter().map(|&(e, c)| (e, Int::from(c))).collect();
            let pb: Vec<(i64, Int)> = b.iter().map(|&(e, c)| (e, Int::from(c))).collect();
            let mut prod = Vec::new();
            for (e1, c1) in &pa {
                for (e2, c2) in &pb {
                    prod.push((e1 + e2, c1.mul(c2)));
                }
            }
            prop_assert_eq!(cyc_eval(&prod, n), cyc_eval(&pa, n).mul(&cyc_eval(&pb, n)));
        }
    }
}
