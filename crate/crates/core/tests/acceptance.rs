//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use attackset::attack::{alpha_bound, alpha_bound_inf, exact_alpha, ExactAlpha};
use attackset::reachability::{ErosionIndex, GeneralSystem};
use attackset::setops::{intersect, linear_image, minkowski_sum, pontryagin_diff, Matrix};
use attackset::spectral::eigen;
use attackset::{Polytope, Vector};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn rho_s3() -> f64 {
    // larger root of λ² - 3.4λ + 2.3
    (3.4 + (3.4f64 * 3.4 - 4.0 * 2.3).sqrt()) / 2.0
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let h1 = 1.2 / 0.7;
    let hand = [(1.0 + h1 * 0.3) / 2.0, 0.5, 1.0 / (1.0 + rho_s3())];
    let quoted = [0.7571, 0.5, 0.2883];
    let mut got = Vec::new();
    for (k, name) in SYSTEMS.iter().enumerate() {
        let sc = system(name);
        let r = alpha_bound_inf(&sc.spectral().unwrap(), sc.tolerances());
        let a = r.alpha_bar.ok_or("bound inconclusive")?;
        ensure((a - hand[k]).abs() < 1e-4, || format!("{name}: {a} vs hand {}", hand[k]))?;
        ensure((a - quoted[k]).abs() < 1e-4, || format!("{name}: {a} vs {}", quoted[k]))?;
        got.push(format!("{name}={a:.6}"));
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(got.join(" "))
}

/// Critical fractions from an independent polygon-clipping implementation
/// bisected to 1e-4; `None` marks a horizon that stays defendable.
const REFERENCE_EXACT: [[Option<f64>; 10]; 3] = [
    [None, Some(0.66666), Some(0.56996), Some(0.55800), Some(0.55764), Some(0.55654), Some(0.55435), Some(0.55264), Some(0.55209), Some(0.55172)],
    [None, Some(0.60002), Some(0.46154), Some(0.44002), Some(0.43904), Some(0.43508), Some(0.42502), Some(0.41728), Some(0.41154), Some(0.40801)],
    [None, Some(0.49179), Some(0.32508), Some(0.29454), Some(0.28813), Some(0.28533), Some(0.27173), Some(0.26009), Some(0.25228), Some(0.24673)],
];

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let bis = 1e-3;
    let mut checked = 0;
    for (k, name) in SYSTEMS.iter().enumerate() {
        let sc = system(name);
        let info = sc.spectral().unwrap();
        for istar in 2..=10 {
            let bound = alpha_bound(istar, &info, sc.tolerances()).unwrap();
            let exact = exact_alpha(&sc, istar, bis).map_err(|e| format!("{name} i*={istar}: {e}"))?;
            let reference = REFERENCE_EXACT[k][istar - 1];
            match (exact, reference) {
                (ExactAlpha::Critical(a), Some(r)) => {
                    ensure((a - r).abs() <= 2e-3, || format!("{name} i*={istar}: exact {a} vs reference {r}"))?
                }
                (ExactAlpha::Defendable, None) => {}
                (e, r) => return Err(format!("{name} i*={istar}: {e:?} vs reference {r:?}")),
            }
            if bound.conclusive {
                let a = exact.value().ok_or_else(|| format!("{name} i*={istar}: defendable under conclusive bound"))?;
                let bar = bound.alpha_bar.unwrap();
                ensure(a <= bar + bis, || format!("{name} i*={istar}: exact {a} > bound {bar}"))?;
                checked += 1;
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{checked} conclusive rows sound, exact values match reference within 2e-3"))
}

fn criterion_3(alpha: f64) -> Outcome {
    let start = Instant::now();
    let sys = system("s3").with_alpha(alpha).unwrap().specialize().unwrap();
    let t = sys.tolerances();
    let c3 = sys.c_sequence(3).unwrap().set(3).unwrap();
    let outer = sys.outer_bound(3).unwrap();
    let contains = outer.contains_set(&c3, t).unwrap();
    let equal = outer.set_equal(&c3, t).unwrap();
    within(start.elapsed(), Duration::from_secs(10))?;
    let detail = format!(
        "alpha={alpha}: outer bound contains C_3 = {contains}, equal = {equal} ({} vs {} vertices)",
        outer.vertices(t).unwrap().len(),
        c3.vertices(t).unwrap().len()
    );
    if contains && !equal {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_4() -> Outcome {
    let mut checks = 0;
    let mut fixpoints = 0;
    for name in SYSTEMS {
        for alpha in [0.0, 0.05, 0.1, 0.2] {
            let sys = system(name).with_alpha(alpha).unwrap().specialize().unwrap();
            let t = sys.tolerances();
            let seq = sys.c_sequence(20).map_err(|e| format!("{name} alpha={alpha}: {e}"))?;
            let c0 = seq.sets[0].vertices(t).unwrap();
            let x = sys.x().vertices(t).unwrap();
            ensure(c0 == x, || format!("{name} alpha={alpha}: C_0 differs from X"))?;
            checks += 1;
            for i in 0..20 {
                let (a, b) = (seq.set(i).unwrap(), seq.set(i + 1).unwrap());
                ensure(a.contains_set(&b, t).unwrap(), || format!("{name} alpha={alpha}: C_{} not in C_{i}", i + 1))?;
                checks += 1;
            }
            if let Some(k) = seq.fixpoint_at {
                ensure(sys.is_rci(&seq.sets[k]).unwrap(), || format!("{name} alpha={alpha}: fixpoint C_{k} not RCI"))?;
                checks += 1;
                fixpoints += 1;
            }
        }
    }
    Ok(format!("{checks} checks, {fixpoints} fixpoints verified RCI"))
}

fn chain(name: &str, alpha: f64, n: usize) -> Result<String, String> {
    let sys = system(name).with_alpha(alpha).unwrap().specialize().unwrap();
    let t = sys.tolerances();
    let s = sys.s_sequence(n).unwrap();
    let tt = sys.t_sequence(n).unwrap();
    let c = sys.c_sequence(n).unwrap();
    let empty = |p: Polytope| p.is_empty(t).unwrap();
    let first = |f: &dyn Fn(usize) -> bool| (0..=n).find(|&i| f(i));
    let i_s = first(&|i| empty(s.set(i).unwrap())).ok_or_else(|| format!("{name}: no empty S_i up to {n}"))?;
    let i_t = first(&|i| empty(tt.set(i).unwrap())).ok_or_else(|| format!("{name}: no empty T_i up to {n}"))?;
    let i_c = first(&|i| empty(c.set(i).unwrap())).ok_or_else(|| format!("{name}: no empty C_i up to {n}"))?;
    let mut violations = 0;
    for i in 0..=n {
        if empty(s.set(i).unwrap()) && !empty(tt.set(i).unwrap()) {
            violations += 1;
        }
        if empty(tt.set(i).unwrap()) {
            violations += (i..=n).filter(|&j| !empty(c.set(j).unwrap())).count();
        }
    }
    ensure(violations == 0, || format!("{name}: {violations} violated implications"))?;
    Ok(format!("{name} alpha={alpha}: i_S={i_s} i_T={i_t} i_C={i_c}"))
}

fn criterion_5() -> Outcome {
    Ok(format!("{}; {}", chain("s2", 0.9, 12)?, chain("s3", 0.5, 12)?))
}

fn criterion_6() -> Outcome {
    let t = tol();
    let sys = GeneralSystem::new(
        mat(2, 2, &[0.5, 1.0, 0.0, 0.7]),
        mat(2, 1, &[0.5, 1.0]),
        mat(2, 1, &[0.5, 1.0]),
        Polytope::unit_box(2, 1.0),
        Polytope::origin(1),
        Polytope::unit_box(1, 0.1),
        t.clone(),
    )
    .unwrap();
    let c = sys.c_sequence(6).unwrap();
    let mut literal_unequal = Vec::new();
    for i in 1..=6 {
        let ci = c.set(i).unwrap();
        let closed = sys.autonomous_admissible_set(i, ErosionIndex::PerTerm).unwrap();
        ensure(ci.set_equal(&closed, &t).unwrap(), || format!("C_{i} differs from the closed form"))?;
        let literal = sys.autonomous_admissible_set(i, ErosionIndex::Fixed).unwrap();
        if !ci.set_equal(&literal, &t).unwrap() {
            literal_unequal.push(i.to_string());
        }
    }
    Ok(format!(
        "C_i equals the closed form with R_j per term for i=1..6 (single-index R_i form unequal at i={})",
        literal_unequal.join(",")
    ))
}

fn random_cset(rng: &mut ChaCha8Rng) -> Polytope {
    let k = rng.gen_range(3..=8);
    let pts: Vec<Vector> = (0..k)
        .map(|j| {
            let step = std::f64::consts::TAU / k as f64;
            let theta = step * j as f64 + rng.gen_range(-0.3..0.3) * step;
            let r = rng.gen_range(0.2..1.5);
            v(&[r * theta.cos(), r * theta.sin()])
        })
        .collect();
    Polytope::from_vertices(2, &pts, &tol()).unwrap()
}

fn criterion_7() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..200 {
        let (p, q, r) = (random_cset(&mut rng), random_cset(&mut rng), random_cset(&mut rng));
        let pq = intersect(&p, &q, &t).unwrap();
        let lhs = pontryagin_diff(&pq, &r, &t).unwrap();
        let rhs = intersect(&pontryagin_diff(&p, &r, &t).unwrap(), &pontryagin_diff(&q, &r, &t).unwrap(), &t).unwrap();
        ensure(lhs.set_equal(&rhs, &t).unwrap(), || format!("trial {trial}: erosion does not distribute over intersection"))?;

        let lhs = minkowski_sum(&pq, &r, &t).unwrap();
        let rhs = intersect(&minkowski_sum(&p, &r, &t).unwrap(), &minkowski_sum(&q, &r, &t).unwrap(), &t).unwrap();
        ensure(rhs.contains_set(&lhs, &t).unwrap(), || format!("trial {trial}: sum over intersection not contained"))?;

        let lhs = minkowski_sum(&pontryagin_diff(&p, &q, &t).unwrap(), &r, &t).unwrap();
        let rhs = pontryagin_diff(&minkowski_sum(&p, &r, &t).unwrap(), &q, &t).unwrap();
        ensure(rhs.contains_set(&lhs, &t).unwrap(), || format!("trial {trial}: (P - Q) + R not in (P + R) - Q"))?;

        // H-representation only, so its support comes from the LP
        let y = Polytope::from_halfspaces(2, p.halfspaces().iter().map(|h| (h.normal.clone(), h.offset))).unwrap();
        let m = Matrix::from_fn(2, 2, |_, _| rng.gen_range(-2.0..2.0));
        let my = linear_image(&m, &p, &t).unwrap();
        for _ in 0..5 {
            let z = v(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            let a = my.support(&z, &t).unwrap();
            let b = y.support(&(m.transpose() * &z), &t).unwrap();
            ensure((a - b).abs() <= 1e-9 * b.abs().max(1.0), || format!("trial {trial}: support {a} vs {b}"))?;
        }
    }
    // strict witness: crossing rectangles and a 32-gon disk
    let p = hull(&[[-2.0, -0.5], [2.0, -0.5], [2.0, 0.5], [-2.0, 0.5]]);
    let q = hull(&[[-0.5, -2.0], [0.5, -2.0], [0.5, 2.0], [-0.5, 2.0]]);
    let disk: Vec<[f64; 2]> = (0..32)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / 32.0;
            [th.cos(), th.sin()]
        })
        .collect();
    let r = hull(&disk);
    let lhs = minkowski_sum(&intersect(&p, &q, &t).unwrap(), &r, &t).unwrap();
    let rhs = intersect(&minkowski_sum(&p, &r, &t).unwrap(), &minkowski_sum(&q, &r, &t).unwrap(), &t).unwrap();
    let w = v(&[1.35, 1.35]);
    ensure(rhs.contains_set(&lhs, &t).unwrap(), || "witness: inclusion fails".into())?;
    ensure(rhs.contains_point(&w, 0.0) && !lhs.contains_point(&w, 0.0), || "witness point not separating".into())?;
    ensure(!lhs.contains_set(&rhs, &t).unwrap(), || "witness inclusion not strict".into())?;
    Ok("200 random triples: 4 identities hold; strict witness found at (1.35, 1.35)".into())
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let alpha = 0.1;
    let sys = system("s3").with_alpha(alpha).unwrap().specialize().unwrap();
    let t = sys.tolerances();
    let q = sys.q_operator(sys.x()).unwrap();
    let a = [[1.9, 1.1], [0.5, 1.5]];
    let b = [0.5, 1.0];
    let oracle = |x: [f64; 2]| {
        let (mut lo, mut hi) = (-(1.0 - alpha), 1.0 - alpha);
        for k in 0..2 {
            let ax = a[k][0] * x[0] + a[k][1] * x[1];
            for w in [-alpha, alpha] {
                lo = f64::max(lo, (-1.0 - ax - b[k] * w) / b[k]);
                hi = f64::min(hi, (1.0 - ax - b[k] * w) / b[k]);
            }
        }
        lo <= hi
    };
    let n = 200;
    let (mut disagree, mut off_boundary) = (0, 0);
    for i in 0..n {
        for j in 0..n {
            let x = [-1.0 + 2.0 * i as f64 / (n - 1) as f64, -1.0 + 2.0 * j as f64 / (n - 1) as f64];
            let xv = v(&x);
            if q.contains_point(&xv, 0.0) != oracle(x) {
                disagree += 1;
                let dist = q.halfspaces().iter().map(|h| h.slack(&xv).abs()).fold(f64::INFINITY, f64::min);
                if dist > t.incl {
                    off_boundary += 1;
                }
            }
        }
    }
    let frac = disagree as f64 / (n * n) as f64;
    ensure(off_boundary == 0, || format!("{off_boundary} disagreements away from the boundary"))?;
    ensure(frac < 1e-3, || format!("disagreement fraction {frac}"))?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("{disagree} of {} grid points disagree, all within eps_incl of the boundary", n * n))
}

fn criterion_9() -> Outcome {
    let t = tol();
    let cases: [(&str, [f64; 4]); 3] = [
        ("s1", [0.5, 1.0, 0.0, 0.7]),
        ("s2", [1.0, 1.0, 0.0, 1.0]),
        ("s3", [1.9, 1.1, 0.5, 1.5]),
    ];
    let mut out = Vec::new();
    for (name, a) in cases {
        let tr = a[0] + a[3];
        let det = a[0] * a[3] - a[1] * a[2];
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        let roots = [(tr + disc) / 2.0, (tr - disc) / 2.0];
        let eig = eigen(&mat(2, 2, &a), &t).unwrap();
        let got: Vec<f64> = eig.iter().flat_map(|e| std::iter::repeat(e.value.re).take(e.multiplicity)).collect();
        ensure(eig.iter().all(|e| e.value.im == 0.0) && got.len() == 2, || format!("{name}: {eig:?}"))?;
        for (g, r) in got.iter().zip(roots) {
            ensure((g - r).abs() < 1e-10, || format!("{name}: eigenvalue {g} vs root {r}"))?;
        }
        // hand evaluation along the dominant eigenvector (1, r): box support 1 + |r|,
        // segment support |0.5 + r|
        let lam = roots[0];
        let r = (lam - a[0]) / a[1];
        let hand = (1.0 + r.abs()) / (0.5 + r).abs();
        let sc = system(name);
        let h = sc.spectral().unwrap().h_ratio.ok_or("no ratio")?;
        ensure((h - hand).abs() < 1e-4, || format!("{name}: H_XU {h} vs hand {hand}"))?;
        out.push(format!("{name}: H_XU={h:.4}"));
    }
    let quoted = [1.7143, 2.0, 1.4918];
    for (k, name) in SYSTEMS.iter().enumerate() {
        let h = system(name).spectral().unwrap().h_ratio.unwrap();
        ensure((h - quoted[k]).abs() < 1e-4, || format!("{name}: H_XU {h} vs {}", quoted[k]))?;
    }
    Ok(out.join(" "))
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 bound formulas (infinite horizon)", Box::new(criterion_1)),
        ("2 exact vs closed-form sweep", Box::new(criterion_2)),
        ("3 outer-bound strict inclusion, alpha=0.1", Box::new(|| criterion_3(0.1))),
        ("3 outer-bound strict inclusion, alpha=0.25", Box::new(|| criterion_3(0.25))),
        ("4 nestedness and fixpoint invariance", Box::new(criterion_4)),
        ("5 emptiness implication chain", Box::new(criterion_5)),
        ("6 autonomous closed form", Box::new(criterion_6)),
        ("7 Minkowski identities", Box::new(criterion_7)),
        ("8 grid oracle for Q", Box::new(criterion_8)),
        ("9 eigenvalues and support ratio", Box::new(criterion_9)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run())).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} [{secs:.2}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} [{secs:.2}s]: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion check(s) failed");
        std::process::exit(1);
    }
}
