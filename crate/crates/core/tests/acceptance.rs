//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use qhecke::appell::{appell_m, appell_m_with_slack, binary_theta, binary_theta_with_slack, double_geometric, double_geometric_with_slack, AppellSpec};
use qhecke::blocks::{theta_sum, theta_sum_with_slack, th};
use qhecke::cyclo::duality_check;
use qhecke::family::{g_tm, g_tm_with_slack, restricted_double_sum, restricted_double_sum_with_slack, FamilyParams};
use qhecke::hecke::{theta_pm, theta_pm_with_slack, Convention, QuadFormSum};
use qhecke::qring::{geometric, FormalVar};
use qhecke::verify::{params, run_identity, run_identity_with, Weights};
use qhecke::{QExp, QSeries, WeightedMonomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<usize, String>;

fn qi(n: i64) -> QExp {
    QExp::int(n)
}

fn qr(n: i64, d: i64) -> QExp {
    QExp::new(n, d)
}

/// Identity name, parameters, order.
type Instance = (&'static str, Vec<(&'static str, i64)>, i64);
type Criterion = fn() -> Outcome;

/// Runs every listed identity instance; returns the number of instances.
fn run_all(list: &[Instance]) -> Outcome {
    for (name, ps, order) in list {
        let rep = run_identity(name, &params(ps), qi(*order)).map_err(|e| format!("{name} {ps:?}: {e}"))?;
        if !rep.is_equal() {
            return Err(rep.to_string());
        }
    }
    Ok(list.len())
}

fn golden_tables() -> Outcome {
    run_all(&[("u-table-2", vec![], 5), ("u-table-3", vec![], 5)])
}

fn main_theorem() -> Outcome {
    let mut list = Vec::new();
    for t in 2..=4 {
        for m in 1..t {
            list.push(("theo-main", vec![("t", t), ("m", m)], 25));
        }
    }
    run_all(&list)
}

fn corollary() -> Outcome {
    let list: Vec<_> = [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)].iter().map(|&(t, m)| ("cor-main", vec![("t", t), ("m", m)], 12)).collect();
    run_all(&list)
}

fn abc_list(name: &'static str, cases: &[(i64, i64, i64)], order: i64) -> Vec<Instance> {
    cases.iter().map(|&(a, b, c)| (name, vec![("a", a), ("b", b), ("c", c)], order)).collect()
}

fn general_hecke() -> Outcome {
    run_all(&abc_list("theo-general-hecke", &[(1, 2, 1), (1, 2, 3), (2, 3, 2), (1, 3, 2)], 12))
}

fn general_fabc() -> Outcome {
    let mut list = abc_list("theo-general-fabc", &[(1, 2, 1), (2, 3, 2)], 12);
    list.push(("f121-display", vec![], 12));
    run_all(&list)
}

fn thetaless() -> Outcome {
    run_all(&abc_list("thetaless", &[(1, 2, 1), (1, 2, 3)], 12))
}

fn lemmas() -> Outcome {
    let mut list = Vec::new();
    for t in 2..=3 {
        for p in -3..=3 {
            for m in 1..=t {
                for name in ["lem-theta-a", "lem-theta-b", "lem-theta-c"] {
                    list.push((name, vec![("t", t), ("p", p), ("m", m)], 30));
                }
            }
        }
        for m in 1..t {
            list.push(("lem-lem2-g", vec![("t", t), ("m", m)], 25));
            list.push(("lem-lem2-f", vec![("t", t), ("m", m)], 25));
            let r = 2 * t - 1;
            let mut ells: Vec<i64> = (0..=2 * t - 2).collect();
            ells.extend([m + r, -m, -m - r, m - 2 * r]);
            for l in ells {
                list.push(("theo-twee", vec![("t", t), ("m", m), ("l", l)], 30));
            }
        }
    }
    run_all(&list)
}

fn chain() -> Outcome {
    let mut list: Vec<Instance> =
        ["f123-example", "f123-final", "f123-mxzq", "love-equiv", "g3-func", "g3-inv"].iter().map(|n| (*n, vec![], 20)).collect();
    for t in 2..=3 {
        for p in -3..=3 {
            for m in 1..=t {
                list.push(("lem-thetaToHecke", vec![("t", t), ("p", p), ("m", m)], 20));
            }
        }
    }
    run_all(&list)
}

fn duality() -> Outcome {
    let mut count = 0;
    for t in 1..=3 {
        for m in 1..=t {
            for n in 1..=10u64 {
                let rep = duality_check(t, m, n).map_err(|e| e.to_string())?;
                if !rep.is_equal() {
                    return Err(rep.to_string());
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

fn random_series(rng: &mut ChaCha8Rng, order: QExp, unit_lead: bool) -> QSeries {
    let x = WeightedMonomial::var(FormalVar::X1);
    let mut s = QSeries::zero(order);
    let lead = qr(rng.gen_range(-6..6), 6);
    if unit_lead {
        let m = x.pow(rng.gen_range(-2..3)).times_q(lead);
        s.add_term(&if rng.gen_bool(0.5) { -m } else { m }, 1);
    }
    for _ in 0..rng.gen_range(1..8) {
        let e = lead + qr(rng.gen_range(1..40), 6);
        s.add_term(&x.pow(rng.gen_range(-3..4)).times_q(e), rng.gen_range(-4..5));
    }
    s
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20261014);
    let mut count = 0;
    let n = qi(20);
    let fail = |what: &str, detail: String| Err(format!("{what}: {detail}"));

    // triple product on 20 random specs
    for _ in 0..20 {
        let w = Weights::new(qr(rng.gen_range(1..13), 13), qr(1, 11));
        let ps = params(&[("rho", rng.gen_range(1..4)), ("k", rng.gen_range(-3..4))]);
        let rep = run_identity_with("triple-product", &ps, n, Some(&[w])).map_err(|e| e.to_string())?;
        if !rep.is_equal() {
            return fail("triple product", rep.to_string());
        }
        count += 1;
    }
    for k in -3..=3 {
        let rep = run_identity("elliptic-shift", &params(&[("n", k)]), n).map_err(|e| e.to_string())?;
        if !rep.is_equal() {
            return fail("elliptic shift", rep.to_string());
        }
        count += 1;
    }

    // ring laws, inverses and geometric series
    let o = qi(6);
    for _ in 0..40 {
        let a = random_series(&mut rng, o, false);
        let b = random_series(&mut rng, o, false);
        let c = random_series(&mut rng, o, false);
        if !a.mul(&b).mul(&c).agrees_with(&a.mul(&b.mul(&c))) || !a.mul(&b).agrees_with(&b.mul(&a)) {
            return fail("ring laws", "product not associative or not commutative".into());
        }
        if !a.mul(&b.add(&c)).agrees_with(&a.mul(&b).add(&a.mul(&c))) {
            return fail("ring laws", "product does not distribute".into());
        }
        let u = random_series(&mut rng, o, true);
        let inv = u.invert_unit().map_err(|e| e.to_string())?;
        let p = u.mul(&inv);
        if p.order() < qi(3) || !p.agrees_with(&QSeries::one(p.order())) {
            return fail("unit inverse", format!("{u:?}"));
        }
        let g = WeightedMonomial::generic(FormalVar::X1, qr(rng.gen_range(1..30), 7) * if rng.gen_bool(0.5) { 1 } else { -1 });
        let geo = geometric(&g, o).map_err(|e| e.to_string())?;
        let mut lin = QSeries::one(o + qi(10));
        lin.add_term(&g, -1);
        let prod = geo.mul(&lin);
        if !prod.agrees_with(&QSeries::one(prod.order())) {
            return fail("geometric inverse", g.to_string());
        }
        count += 1;
    }

    // window soundness: every double sum, rerun with 5 extra shells
    let o = qi(12);
    let same = |l: QSeries, r: QSeries, what: String| if l == r { Ok(()) } else { Err(format!("window soundness: {what}")) };
    for (a, b, c) in [(1, 2, 1), (1, 2, 3), (2, 3, 2), (1, 3, 2), (1, 4, 1), (1, 11, 1), (1, 6, 30)] {
        for conv in [Convention::Binomial, Convention::Half] {
            let s = QuadFormSum {
                a,
                b,
                c,
                convention: conv,
                x: WeightedMonomial::generic(FormalVar::X1, qr(1, 7)),
                y: WeightedMonomial::generic(FormalVar::Y1, qr(-2, 13)),
                odd_only: false,
            };
            same(s.expand(o).map_err(|e| e.to_string())?, s.expand_with_slack(o, 5).map_err(|e| e.to_string())?, format!("f_({a},{b},{c})"))?;
            count += 1;
        }
    }
    for t in 1..=4 {
        for p in -3..=3 {
            for m in 1..=t {
                same(theta_pm(t, p, m, o).unwrap(), theta_pm_with_slack(t, p, m, o, 5).unwrap(), format!("θ_({t};{p},{m})"))?;
                count += 1;
            }
        }
        let x = WeightedMonomial::generic(FormalVar::X1, qr(1, 7));
        for m in 1..t.max(2) {
            let fam = FamilyParams::new(t, m, x, o);
            same(g_tm(&fam).unwrap(), g_tm_with_slack(&fam, 5).unwrap(), format!("g_({t},{m})"))?;
            count += 1;
        }
        for k in 0..2 * t {
            same(restricted_double_sum(t, k, &x, o).unwrap(), restricted_double_sum_with_slack(t, k, &x, o, 5).unwrap(), format!("restricted sum t={t} k={k}"))?;
            count += 1;
        }
    }
    for g1 in -1..=1 {
        for g2 in -1..=1 {
            let z1 = WeightedMonomial::generic(FormalVar::X1, qr(1, 7)).times_q(g1);
            let z2 = WeightedMonomial::generic(FormalVar::Y1, qr(5, 11)).times_q(g2);
            same(double_geometric(&z1, &z2, g1, g2, o).unwrap(), double_geometric_with_slack(&z1, &z2, g1, g2, o, 5).unwrap(), format!("double geometric ({g1},{g2})"))?;
            count += 1;
        }
    }
    let (bx, by) = (WeightedMonomial::generic(FormalVar::X1, qr(2, 7)), WeightedMonomial::generic(FormalVar::Y1, qr(3, 11)));
    for (qa, qb, qc) in [(qi(2), qi(2), qi(2)), (qr(3, 2), qi(3), qr(9, 2)), (qi(6), qi(6), qi(2))] {
        same(binary_theta(qa, qb, qc, &bx, &by, o).unwrap(), binary_theta_with_slack(qa, qb, qc, &bx, &by, o, 5).unwrap(), format!("binary theta ({qa},{qb},{qc})"))?;
        count += 1;
    }
    for rho in 1..=3 {
        let spec = AppellSpec::new(WeightedMonomial::generic(FormalVar::X1, qr(1, 7)), WeightedMonomial::generic(FormalVar::Y1, qr(-5, 11)), qi(rho)).unwrap();
        same(appell_m(&spec, o).unwrap(), appell_m_with_slack(&spec, o, 5).unwrap(), format!("appell rho={rho}"))?;
        let ts = th(WeightedMonomial::generic(FormalVar::X1, qr(3, 7)), qi(rho));
        same(theta_sum(&ts, o).unwrap(), theta_sum_with_slack(&ts, o, 5).unwrap(), format!("theta sum rho={rho}"))?;
        count += 2;
    }

    // kernels
    for k in -2..=2 {
        let rep = run_identity("kernel-lem2", &params(&[("n", k)]), n).map_err(|e| e.to_string())?;
        if !rep.is_equal() {
            return fail("unary kernel", rep.to_string());
        }
        count += 1;
    }
    for g1 in -1..=1 {
        for g2 in -1..=1 {
            let rep = run_identity("double-geom-kernel", &params(&[("g1", g1), ("g2", g2)]), n).map_err(|e| e.to_string())?;
            if !rep.is_equal() {
                return fail("double geometric kernel", rep.to_string());
            }
            count += 1;
        }
    }
    Ok(count)
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Criterion)> = vec![
        ("golden U tables", golden_tables),
        ("theta expansion of f_tm", main_theorem),
        ("double-sum expansion of (1-x)U", corollary),
        ("general Hecke-type sums", general_hecke),
        ("general f_abc", general_fabc),
        ("theta-less expansion", thetaless),
        ("theta lemmas, functional equations, restricted unary sums", lemmas),
        ("f_{2,1}, Love, g3 and theta-to-Hecke chain", chain),
        ("cyclotomic duality", duality),
        ("property suites", properties),
    ];
    let start = Instant::now();
    let results: Vec<(Outcome, u128)> = thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                let f = *f;
                s.spawn(move || {
                    let t = Instant::now();
                    let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
                    (r, t.elapsed().as_millis())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (res, ms))) in criteria.iter().zip(results).enumerate() {
        match res {
            Ok(k) => println!("criterion {:>2} PASS  {name} ({k} checks, {ms} ms)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({ms} ms)\n    {}", i + 1, e.replace('\n', "\n    "));
            }
        }
    }
    println!("acceptance: {} of {} criteria pass in {} ms", criteria.len() - failed, criteria.len(), start.elapsed().as_millis());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
