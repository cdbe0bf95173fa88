//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! The process fails when a criterion fails that is not listed in
//! `KNOWN_FAILURES`; a known failure that starts passing is reported too.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nalgebra::DMatrix;
use specdim_core::eccentricity::{eccentric_verdict, sample_geometric};
use specdim_core::heat::{
    asdim, asdim_sup_form, counting_duality, lattice_return_probability, ns_numbers_trace, one_inf_norm,
};
use specdim_core::oracle::{random_atoms, rearrangement_mismatches};
use specdim_core::orders::{order_at_infinity, order_via_distribution, End, GridSpec, LogProfile};
use specdim_core::specdim::{
    box_dimension, box_grid, dimension_report, partial_sum_doubling, regularity_tests, EigenvalueModel,
    HausdorffConfig,
};
use specdim_core::stepfn::{rearrange, MassSample};
use specdim_core::{Kernel, StepFn};

/// Criteria whose stated expectation this implementation does not meet,
/// with the reason printed next to the FAIL line.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    1,
    "d_B of the plateau sequence is lambda (liminf of ln mu_n / ln(1/n) is 1/lambda), not 1",
)];

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    /// Sub-checks other than the known deviation all passed.
    rest_pass: bool,
}

fn main() {
    let all = [
        c1_plateau_sequence(),
        c2_lattice_walks(),
        c3_torus_weyl(),
        c4_rearrangement_duality(),
        c5_distribution_side_orders(),
        c6_eccentricity_suite(),
        c7_psd_norm_identity(),
        c8_counting_duality(),
        c9_regularity(),
        c10_power_scaling(),
    ];
    let mut unexpected = 0;
    for o in &all {
        let known = KNOWN_FAILURES.iter().find(|k| k.0 == o.id);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}  {}: {}", o.id, o.title, o.detail);
        match (o.pass, known) {
            (false, Some((_, why))) => {
                println!("              known deviation: {why}");
                if !o.rest_pass {
                    unexpected += 1;
                }
            }
            (false, None) => unexpected += 1,
            (true, Some(_)) => println!("              listed as a known failure but passed"),
            (true, None) => {}
        }
    }
    let passed = all.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass, {unexpected} unexpected failure(s)", all.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn c1_plateau_sequence() -> Outcome {
    let mut detail = Vec::new();
    let (mut d_b_ok, mut rest) = (true, true);
    for lambda in [1.5f64, 2.0, 3.0] {
        let model: EigenvalueModel = format!("besicovitch:{lambda}").parse().unwrap();
        let (r, dt) = timed(|| dimension_report(&model, 1e6, &HausdorffConfig::default()).unwrap());
        let target = lambda.powf(1.0 / (1.0 - lambda)) / (lambda - 1.0);
        let late: Vec<_> = r.dixmier.points.iter().filter(|p| p.k >= 20).collect();
        let dix_ok = !late.is_empty() && late.iter().all(|p| rel(p.value, target) <= 0.1);
        let dh_ok = r.d_h.contains(lambda) && r.d_h.width() <= 0.3;
        let b_ok = (0.9..=1.1).contains(&r.d_b);
        let time_ok = dt <= Duration::from_secs(60);
        d_b_ok &= b_ok;
        rest &= dix_ok && dh_ok && time_ok;
        detail.push(format!(
            "lambda={lambda}: d_B={:.4}{} d_H=[{:.5},{:.5}]{} Dixmier(k={})={:.5} vs {:.5}{} {:.2}s",
            r.d_b,
            mark(b_ok),
            r.d_h.d_lo,
            r.d_h.d_hi,
            mark(dh_ok),
            late.last().map_or(0, |p| p.k),
            late.last().map_or(f64::NAN, |p| p.value),
            target,
            mark(dix_ok),
            dt.as_secs_f64()
        ));
    }
    Outcome { id: 1, title: "plateau sequence end-to-end", pass: d_b_ok && rest, detail: detail.join("; "), rest_pass: rest }
}

fn mark(ok: bool) -> &'static str {
    if ok { "" } else { "(x)" }
}

fn c2_lattice_walks() -> Outcome {
    let ((ok, detail), dt) = timed(|| {
        let mut ok = true;
        let mut detail = Vec::new();
        for d in 1..=3u32 {
            let tr = lattice_return_probability(d, 1 << 14, 0.5).unwrap().heat_trace().unwrap();
            let a = asdim(&tr).unwrap().value;
            let s = asdim_sup_form(&tr).unwrap().value;
            let ns = ns_numbers_trace(&tr).unwrap().alpha_lower.unwrap_or(f64::NAN);
            let good = (a - d as f64).abs() <= 0.1 && (s - a).abs() <= 0.05 && (ns - d as f64).abs() <= 0.15;
            ok &= good;
            detail.push(format!("d={d}: asdim={a:.4} sup={s:.4} alpha_lower={ns:.4}{}", mark(good)));
        }
        (ok, detail.join("; "))
    });
    let time_ok = dt <= Duration::from_secs(30);
    Outcome {
        id: 2,
        title: "lattice walk dimension",
        pass: ok && time_ok,
        detail: format!("{detail}; {:.2}s total", dt.as_secs_f64()),
        rest_pass: ok && time_ok,
    }
}

fn c3_torus_weyl() -> Outcome {
    let ((ok, detail), dt) = timed(|| {
        let mut ok = true;
        let mut detail = Vec::new();
        for (d, cutoff) in [(1u32, 50_000u64), (2, 179), (3, 29)] {
            let model: EigenvalueModel = format!("torus:{d},{cutoff}").parse().unwrap();
            let runs = model.runs(1e7).unwrap();
            let count: f64 = runs.runs.iter().map(|r| r.len).sum();
            let (d_b, _) = box_dimension(&model, 1e7, None).unwrap();
            let good = count >= 1e5 && (2.0 * d_b - d as f64).abs() <= 0.15;
            ok &= good;
            detail.push(format!("d={d}: {count} eigenvalues, 2/ord={:.4}{}", 2.0 * d_b, mark(good)));
        }
        (ok, detail.join("; "))
    });
    let time_ok = dt <= Duration::from_secs(20);
    Outcome {
        id: 3,
        title: "flat torus Weyl law",
        pass: ok && time_ok,
        detail: format!("{detail}; {:.2}s", dt.as_secs_f64()),
        rest_pass: ok && time_ok,
    }
}

fn random_step(rng: &mut ChaCha8Rng) -> StepFn {
    let n = rng.gen_range(0..15);
    let mut t = 0.0;
    let mut v: f64 = rng.gen_range(1.0..100.0);
    let mut bp = Vec::new();
    let mut vs = vec![if rng.gen_bool(0.2) { f64::INFINITY } else { v * 1.5 }];
    for _ in 0..n {
        t += rng.gen_range(0.01..3.0);
        bp.push(t);
        vs.push(v);
        v *= rng.gen_range(0.1..0.99);
    }
    let end = rng.gen_bool(0.5).then(|| t + rng.gen_range(0.01..3.0));
    if bp.is_empty() && end.is_none() && vs[0].is_infinite() {
        return StepFn::new(vec![1.0], vec![f64::INFINITY, 1.0], None).unwrap();
    }
    StepFn::new(bp, vs, end).unwrap()
}

fn c4_rearrangement_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad_round_trip = 0;
    for _ in 0..1000 {
        let f = random_step(&mut rng);
        let g = f.round_trip().unwrap();
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y || (x - y).abs() <= 4.0 * f64::EPSILON * y.abs())
        };
        if !close(f.breakpoints(), g.breakpoints()) || !close(f.values(), g.values()) || f.support_end() != g.support_end() {
            bad_round_trip += 1;
        }
    }
    let mut bad_mass = 0;
    for _ in 0..1000 {
        let atoms = random_atoms(&mut rng);
        let f = rearrange(&MassSample::new(atoms.clone())).unwrap();
        let mass: f64 = atoms.iter().filter(|a| a.0 > 0.0).map(|a| a.1).sum();
        let total: f64 = atoms.iter().map(|a| a.0 * a.1).sum();
        let integral = f.integrate(0.0, f64::INFINITY).unwrap();
        if f.support_end() != Some(mass) || rel(integral, total) > 1e-14 {
            bad_mass += 1;
        }
    }
    let scan = rearrangement_mismatches(1000, 4).unwrap();
    let pass = bad_round_trip == 0 && bad_mass == 0 && scan == 0;
    Outcome {
        id: 4,
        title: "rearrangement/distribution duality",
        pass,
        detail: format!(
            "round-trip mismatches {bad_round_trip}/1000, mass mismatches {bad_mass}/1000, level-scan mismatches {scan}"
        ),
        rest_pass: pass,
    }
}

fn c5_distribution_side_orders() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (m, tol) in [("powerlaw:0.3", 0.02), ("powerlaw:0.7", 0.02), ("powerlaw:1", 0.02), ("powerlaw:2", 0.02), ("besicovitch:2", 0.05)] {
        let model: EigenvalueModel = m.parse().unwrap();
        let direct = order_at_infinity(model.profile(1e6).unwrap().as_ref(), &box_grid()).unwrap().value;
        let lambda = model.runs(1e6).unwrap().log_step().unwrap().distribution();
        let dual = order_via_distribution(&lambda, End::Infinity, &GridSpec::default()).unwrap().value;
        let good = (direct - dual).abs() <= tol;
        ok &= good;
        detail.push(format!("{m}: {direct:.5} vs {dual:.5}{}", mark(good)));
    }
    Outcome { id: 5, title: "direct vs distribution-side order", pass: ok, detail: detail.join("; "), rest_pass: ok }
}

fn c6_eccentricity_suite() -> Outcome {
    let cases: [(&str, End, StepFn); 4] = [
        ("1/t at 0", End::Zero, sample_geometric(-900, 0, 16, f64::INFINITY, |t| 1.0 / t).unwrap()),
        (
            "1/(t(3+ln(1/t))^2) at 0",
            End::Zero,
            sample_geometric(-900, 0, 16, f64::INFINITY, |t| 1.0 / (t * (3.0 - t.ln()).powi(2))).unwrap(),
        ),
        ("1/t at inf", End::Infinity, sample_geometric(0, 900, 16, 1.0, |t| 1.0 / t).unwrap()),
        ("1/(t(1+ln t)^2) at inf", End::Infinity, sample_geometric(0, 900, 16, 1.0, |t| 1.0 / (t * (1.0 + t.ln()).powi(2))).unwrap()),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, end, mu) in cases {
        let (ecc, p) = eccentric_verdict(&mu, end, None).unwrap();
        let w = p.witnesses_in_last(10);
        let good = ecc && w >= 10;
        ok &= good;
        let branch = if p.integrable { "summable" } else { "non-summable" };
        detail.push(format!("{name} ({branch}): witnesses {w}/10{}", mark(good)));
    }
    Outcome { id: 6, title: "eccentricity implication suite", pass: ok, detail: detail.join("; "), rest_pass: ok }
}

fn c7_psd_norm_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=64);
        let r = rng.gen_range(1..=n);
        let a = DMatrix::from_fn(n, r, |_, _| rng.gen_range(-1.0..1.0));
        let k = Kernel::from_matrix(&a * a.transpose(), 1).unwrap().flagged_positive(true);
        match one_inf_norm(&k) {
            Ok(rep) => worst = worst.max(rel(rep.sup_entry, rep.sup_diagonal)),
            Err(_) => failures += 1,
        }
    }
    let a = DMatrix::from_fn(8, 8, |_, _| rng.gen_range(-1.0..1.0));
    let mut planted = &a * a.transpose();
    planted[(3, 3)] = -0.5;
    let caught = one_inf_norm(&Kernel::from_matrix(planted, 1).unwrap().flagged_positive(true)).is_err();
    let pass = failures == 0 && worst <= 1e-12 && caught;
    Outcome {
        id: 7,
        title: "PSD norm identity",
        pass,
        detail: format!("500 Gram kernels, max rel gap {worst:e}, {failures} errors; planted non-PSD caught: {caught}"),
        rest_pass: pass,
    }
}

fn c8_counting_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut checked, mut failures, mut boundary) = (0, 0, 0);
    for _ in 0..50 {
        let n = rng.gen_range(5..60);
        let eigs: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.01..50.0) }).collect();
        for _ in 0..100 {
            let t = 10f64.powf(rng.gen_range(-2.5..2.5));
            match counting_duality(&eigs, t) {
                Ok(c) if c.boundary => boundary += 1,
                Ok(c) if c.lhs == c.rhs => checked += 1,
                _ => failures += 1,
            }
        }
    }
    let pass = failures == 0 && boundary == 0 && checked == 5000;
    Outcome {
        id: 8,
        title: "counting duality",
        pass,
        detail: format!("{checked}/5000 equal, {failures} failures, {boundary} boundary hits"),
        rest_pass: pass,
    }
}

fn c9_regularity() -> Outcome {
    let model: EigenvalueModel = "powerlaw:0.5".parse().unwrap();
    let reg = regularity_tests(&model, 1e6).unwrap();
    let seq = model.series(1e6).unwrap();
    let d1 = partial_sum_doubling(&model, seq.as_ref(), 1e6, 1.0).unwrap();
    let d2 = partial_sum_doubling(&model, seq.as_ref(), 1e6, 2.0).unwrap();
    let r_ok = (reg.ratio_2n - 0.5f64.sqrt()).abs() <= 1e-3;
    let d1_ok = (d1.limit - 2f64.sqrt()).abs() <= 0.01;
    let d2_ok = (d2.limit - 1.0).abs() <= 0.01;
    let pass = r_ok && d1_ok && d2_ok;
    Outcome {
        id: 9,
        title: "regularity formula",
        pass,
        detail: format!(
            "ratio_2n={:.6}{} doubling(d=1)={:.6}{} doubling(d=d_B=2)={:.6}{}",
            reg.ratio_2n,
            mark(r_ok),
            d1.limit,
            mark(d1_ok),
            d2.limit,
            mark(d2_ok)
        ),
        rest_pass: pass,
    }
}

fn c10_power_scaling() -> Outcome {
    let order = |p: &dyn LogProfile| order_at_infinity(p, &box_grid()).unwrap().value;
    let (mut exact_worst, mut sampled_worst): (f64, f64) = (0.0, 0.0);
    for alpha in [0.5, 2.0, 3.0] {
        for m in ["powerlaw:0.5", "powerlaw:1", "powerlog:1,1"] {
            let base: EigenvalueModel = m.parse().unwrap();
            let a = order(base.profile(1e6).unwrap().as_ref());
            let b = order(base.clone().powered(alpha).unwrap().profile(1e6).unwrap().as_ref());
            exact_worst = exact_worst.max((b - alpha * a).abs());
        }
        for lambda in [1.5, 2.0, 3.0] {
            let base: EigenvalueModel = format!("besicovitch:{lambda}").parse().unwrap();
            let a = order(&base.runs(1e6).unwrap().log_step().unwrap());
            let b = order(&base.clone().powered(alpha).unwrap().runs(1e6).unwrap().log_step().unwrap());
            sampled_worst = sampled_worst.max((b - alpha * a).abs());
        }
    }
    let pass = exact_worst <= 1e-9 && sampled_worst <= 0.02;
    Outcome {
        id: 10,
        title: "power scaling of orders",
        pass,
        detail: format!("max |ord(mu^a) - a ord(mu)|: closed forms {exact_worst:e}, plateau streams {sampled_worst:e}"),
        rest_pass: pass,
    }
}
