//! Text and JSON rendering of series, and the monomial mini-language.
//!
//! Monomials are written as `*`-separated factors with an optional leading
//! minus sign: `-q^1/7*x`, `q^2*x^-1`, `x2*y2^3`, `1`. The `q` factor takes a
//! rational exponent, variable factors take integer exponents.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::int::Int;
use crate::qring::{FormalVar, LaurentCoeff, QExp, QSeries, VarExp, WeightedMonomial};

fn render_vars(v: &VarExp) -> String {
    let mut parts = Vec::new();
    for var in FormalVar::ALL {
        let e = v[var.index()];
        match e {
            0 => {}
            1 => parts.push(var.symbol().to_string()),
            _ => parts.push(format!("{}^{}", var.symbol(), e)),
        }
    }
    parts.join("*")
}

/// Renders a Laurent polynomial, highest exponent vector first.
pub fn render_poly(p: &LaurentCoeff) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (v, c)) in p.iter().rev().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let vars = render_vars(v);
        if vars.is_empty() {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&vars);
        } else {
            out.push_str(&format!("{mag}*{vars}"));
        }
    }
    out
}

/// Renders `p / d`.
pub fn render_coeff(p: &LaurentCoeff, d: &Int) -> String {
    if d.is_one() {
        render_poly(p)
    } else if p.len() == 1 {
        format!("{}/{}", render_poly(p), d)
    } else {
        format!("({})/{}", render_poly(p), d)
    }
}

pub fn render_monomial(m: &WeightedMonomial) -> String {
    let mut parts = Vec::new();
    if !m.qexp.is_zero() {
        parts.push(format!("q^{}", m.qexp));
    }
    let vars = render_vars(&m.vexp);
    if !vars.is_empty() {
        parts.push(vars);
    }
    let body = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
    if m.negative {
        format!("-{body}")
    } else {
        body
    }
}

pub fn parse_monomial(s: &str) -> Result<WeightedMonomial> {
    let bad = |why: &str| Error::Parse(format!("monomial `{s}`: {why}"));
    let mut rest = s.trim();
    let mut m = WeightedMonomial::one();
    if let Some(r) = rest.strip_prefix('-') {
        m.negative = true;
        rest = r.trim_start();
    }
    if rest.is_empty() {
        return Err(bad("empty"));
    }
    for factor in rest.split('*') {
        let factor = factor.trim();
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b.trim(), Some(e.trim())),
            None => (factor, None),
        };
        match base {
            "1" if exp.is_none() => {}
            "q" => {
                let e: QExp = match exp {
                    Some(e) => e.parse().map_err(|_| bad("bad q exponent"))?,
                    None => QExp::int(1),
                };
                m.qexp = m.qexp + e;
            }
            _ => {
                let var = FormalVar::from_symbol(base).ok_or_else(|| bad("unknown factor"))?;
                let e: i32 = match exp {
                    Some(e) => e.parse().map_err(|_| bad("variable exponents must be integers"))?,
                    None => 1,
                };
                m.vexp[var.index()] += e;
            }
        }
    }
    Ok(m)
}

/// One line per nonzero exponent, `q^e: coefficient`, then the order.
pub fn series_text(s: &QSeries) -> String {
    let mut out = String::new();
    for (e, c) in s.iter() {
        out.push_str(&format!("q^{}: {}\n", e, render_coeff(c, s.divisor())));
    }
    out.push_str(&format!("O(q^{})\n", s.order()));
    out
}

fn exp_over(e: QExp, den: i64) -> String {
    format!("{}/{}", e.numer() * (den / e.denom()), den)
}

fn coeff_string(c: &Int, d: &Int) -> String {
    if d.is_one() {
        c.to_string()
    } else {
        let g = c.gcd(d);
        let (n, m) = (c.div_exact(&g), d.div_exact(&g));
        if m.is_one() {
            n.to_string()
        } else {
            format!("{n}/{m}")
        }
    }
}

/// JSON form with fixed key order, ascending exponents and decimal-string
/// coefficients (rational when the series carries a divisor).
pub fn series_json(s: &QSeries) -> Value {
    let den = s.base_den();
    let mut terms = Vec::new();
    for (e, c) in s.iter() {
        let mut coeff = Vec::new();
        for (v, k) in c.iter() {
            let mut vars = Map::new();
            for var in FormalVar::ALL {
                if v[var.index()] != 0 {
                    vars.insert(var.symbol().to_string(), json!(v[var.index()]));
                }
            }
            coeff.push(json!({"vars": Value::Object(vars), "c": coeff_string(k, s.divisor())}));
        }
        terms.push(json!({"q": exp_over(e, den), "coeff": coeff}));
    }
    json!({"base_den": den, "order": exp_over(s.order(), den), "terms": terms})
}

/// Scalar series with the single formal variable `x` as a compact list of
/// `(exponent, x-degree, coefficient)` triples; used by plots.
pub fn series_triples(s: &QSeries) -> Vec<(QExp, VarExp, String)> {
    let mut out = Vec::new();
    for (e, c) in s.iter() {
        for (v, k) in c.iter() {
            out.push((e, *v, coeff_string(k, s.divisor())));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(terms: &[([i32; 4], i64)]) -> LaurentCoeff {
        LaurentCoeff::from_terms(terms.iter().map(|(v, c)| (*v, Int::from(*c))))
    }

    #[test]
    fn renders_symmetric_coefficient() {
        let p = poly(&[([1, 0, 0, 0], 2), ([0, 0, 0, 0], 4), ([-1, 0, 0, 0], 2)]);
        assert_eq!(render_poly(&p), "2*x + 4 + 2*x^-1");
        let p = poly(&[([1, 0, 0, 0], 1), ([0, 0, 0, 0], 2), ([-1, 0, 0, 0], 1)]);
        assert_eq!(render_poly(&p), "x + 2 + x^-1");
        assert_eq!(render_poly(&poly(&[([0, 1, 0, 0], -1)])), "-y");
    }

    #[test]
    fn parses_grammar() {
        let m = parse_monomial("q^2*x^-1").unwrap();
        assert_eq!(m.qexp, QExp::int(2));
        assert_eq!(m.vexp, [-1, 0, 0, 0]);
        let m = parse_monomial("-q^1/7*x*y2^3").unwrap();
        assert!(m.negative);
        assert_eq!(m.qexp, QExp::new(1, 7));
        assert_eq!(m.vexp, [1, 0, 0, 3]);
        assert_eq!(parse_monomial("1").unwrap(), WeightedMonomial::one());
        assert!(parse_monomial("z").is_err());
        assert!(parse_monomial("x^1/2").is_err());
        assert!(parse_monomial("").is_err());
    }

    #[test]
    fn json_shape() {
        let mut s = QSeries::zero(QExp::int(2));
        s.add_term(&WeightedMonomial::q(QExp::new(1, 2)), 3);
        let v = series_json(&s);
        assert_eq!(v.to_string(), r#"{"base_den":2,"order":"4/2","terms":[{"coeff":[{"c":"3","vars":{}}],"q":"1/2"}]}"#);
    }

    proptest! {
        #[test]
        fn monomial_round_trip(neg in any::<bool>(), n in -40i64..40, d in 1i64..12, v in prop::array::uniform4(-4i32..5)) {
            let m = WeightedMonomial { negative: neg, qexp: QExp::new(n, d), vexp: v };
            prop_assert_eq!(parse_monomial(&render_monomial(&m)).unwrap(), m);
        }
    }
}
