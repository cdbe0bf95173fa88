use nalgebra::DMatrix;
use num_rational::Ratio;
use proptest::prelude::*;

use specdim_core::heat::{
    asdim_sup_form, asdim_sup_form_from, counting_duality, generic_times, lattice_walk, one_inf_norm, HeatTrace,
};
use specdim_core::orders::{order_at_infinity, order_at_zero, GridSpec};
use specdim_core::specdim::{Classifier, EigenvalueModel, Growth, HausdorffConfig};
use specdim_core::stepfn::{rearrange, MassSample, StepFunction};
use specdim_core::{Kernel, StepFn, StepFn32};

/// Non-increasing step functions on dyadic breakpoints and values, possibly
/// with an infinite head and a support end.
fn step_fn() -> impl Strategy<Value = StepFn> {
    (
        prop::collection::vec((1u32..64, 1u32..64), 0..12),
        1u32..64,
        any::<bool>(),
        prop::option::of(1u32..64),
    )
        .prop_map(|(steps, first, inf_head, end)| {
            let mut t = 0.0;
            let mut v = (steps.iter().map(|s| s.1).sum::<u32>() + first) as f64 / 8.0;
            let mut bp = Vec::new();
            let mut vs = vec![if inf_head { f64::INFINITY } else { v + 1.0 }];
            for &(dt, dv) in &steps {
                t += dt as f64 / 16.0;
                bp.push(t);
                vs.push(v);
                v -= dv as f64 / 8.0;
            }
            let end = end.map(|e| t + e as f64 / 16.0);
            if inf_head && bp.is_empty() && end.is_none() {
                return StepFn::new(vec![1.0], vec![f64::INFINITY, 1.0], None).unwrap();
            }
            StepFn::new(bp, vs, end).unwrap()
        })
}

proptest! {
    #[test]
    fn rearrangement_round_trip(f in step_fn()) {
        prop_assert_eq!(f.round_trip().unwrap(), f.clone());
        let g: StepFn32 = f.cast().unwrap();
        prop_assert_eq!(g.round_trip().unwrap(), g);
    }

    #[test]
    fn distribution_is_an_involution_on_levels(f in step_fn()) {
        let l = f.distribution().unwrap();
        // λ(s) = |{f > s}| checked directly between breakpoints.
        for &s in l.breakpoints() {
            let probe = s * 0.999;
            let measure: f64 = f.pieces().filter(|p| p.2 > probe).map(|p| p.1 - p.0).sum();
            prop_assert_eq!(l.eval(probe), measure);
        }
    }

    #[test]
    fn mass_is_conserved(atoms in prop::collection::vec((0u32..640, 1u32..192), 1..20)) {
        let atoms: Vec<(f64, f64)> = atoms.into_iter().map(|(v, m)| (v as f64 / 64.0, m as f64 / 64.0)).collect();
        let s = MassSample::new(atoms.clone());
        let f = rearrange(&s).unwrap();
        let total: f64 = atoms.iter().map(|a| a.0 * a.1).sum();
        prop_assert_eq!(f.integrate(0.0, f64::INFINITY).unwrap(), total);
        prop_assert_eq!(s.total(), total);
    }

    #[test]
    fn counting_duality_at_generic_times(
        eigs in prop::collection::vec(prop_oneof![Just(0.0), (1u32..1000).prop_map(|k| k as f64 / 37.0)], 1..40)
    ) {
        for t in generic_times(&eigs) {
            let c = counting_duality(&eigs, t).unwrap();
            prop_assert!(!c.boundary);
            prop_assert_eq!(c.lhs, c.rhs);
        }
    }

    #[test]
    fn psd_norm_sits_on_the_diagonal(n in 1usize..24, r in 1usize..8, seed in any::<u64>()) {
        let k = gram(n, r, seed);
        let rep = one_inf_norm(&Kernel::from_matrix(k.clone(), 1).unwrap().flagged_positive(true)).unwrap();
        prop_assert!((rep.sup_entry - rep.sup_diagonal).abs() <= 1e-12 * rep.sup_diagonal);
        // Positivity chain: PSD ⇒ |k(x,y)|² ≤ k(x,x)·k(y,y).
        for i in 0..n {
            prop_assert!(k[(i, i)] >= 0.0);
            for j in 0..n {
                prop_assert!(k[(i, j)].powi(2) <= k[(i, i)] * k[(j, j)] * (1.0 + 1e-12) + 1e-300);
            }
        }
    }

    #[test]
    fn planted_negative_direction_is_caught(n in 2usize..24, seed in any::<u64>()) {
        let mut k = gram(n, n, seed);
        // Make e_0 − e_1 negative: k00 + k11 − 2k01 < 0.
        let big = k[(0, 0)] + k[(1, 1)];
        k[(0, 1)] = big;
        k[(1, 0)] = big;
        let r = one_inf_norm(&Kernel::from_matrix(k, 1).unwrap().flagged_positive(true));
        prop_assert!(r.is_err());
    }

    #[test]
    fn power_scaling_bridge(p in 0.1f64..3.0, alpha in 0.2f64..4.0) {
        let bp: Vec<f64> = (0..=40).map(|j| 2f64.powi(j)).collect();
        let mu = StepFunction::sample_left(bp, 1.0, |t| t.powf(-p)).unwrap();
        let g = GridSpec::default();
        let a = order_at_infinity(&mu, &g).unwrap().value;
        let b = order_at_infinity(&mu.power_scale(alpha).unwrap(), &g).unwrap().value;
        prop_assert!((b - alpha * a).abs() <= 1e-9 * alpha.max(1.0), "{} vs {}", b, alpha * a);
    }

    #[test]
    fn power_scaling_at_zero(p in 0.1f64..3.0, alpha in 0.2f64..4.0) {
        let mu = specdim_core::eccentricity::sample_geometric(-40, 0, 4, f64::INFINITY, |t| t.powf(-p)).unwrap();
        let g = GridSpec { count: 36, ..GridSpec::default() };
        let a = order_at_zero(&mu, &g).unwrap().value;
        let b = order_at_zero(&mu.power_scale(alpha).unwrap(), &g).unwrap().value;
        prop_assert!((b - alpha * a).abs() <= 1e-9 * alpha.max(1.0), "{} vs {}", b, alpha * a);
        prop_assert!((a - p).abs() < 0.05, "{} vs {}", a, p);
    }

    #[test]
    fn bounded_functions_have_order_zero_at_zero(f in step_fn(), alpha in 0.2f64..4.0) {
        prop_assume!(f.values()[0].is_finite());
        let g = GridSpec { count: 8, ..GridSpec::default() };
        prop_assert_eq!(order_at_zero(&f, &g).unwrap().value, 0.0);
        prop_assert_eq!(order_at_zero(&f.power_scale(alpha).unwrap(), &g).unwrap().value, 0.0);
    }
}

fn gram(n: usize, r: usize, seed: u64) -> DMatrix<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, r, |_, _| rng.gen_range(-1.0..1.0));
    &a * a.transpose()
}

#[test]
fn walk_is_a_product_of_coordinate_walks() {
    // Direct convolution on Z² with the product step law, exact.
    let half = Ratio::new(1i64, 2);
    let quarter = Ratio::new(1i64, 4);
    let one_step = [quarter, half, quarter];
    let t_max = 8usize;
    let size = 2 * t_max + 1;
    let mut p = vec![vec![Ratio::from_integer(0i64); size]; size];
    p[t_max][t_max] = Ratio::from_integer(1);
    let walk = lattice_walk(2, t_max as u64, half, |_, _| Ok(())).unwrap();
    let mut next_check = 1;
    for t in 1..=t_max {
        let mut q = vec![vec![Ratio::from_integer(0i64); size]; size];
        for x in 1..size - 1 {
            for y in 1..size - 1 {
                let mut acc = Ratio::from_integer(0);
                for (i, wx) in one_step.iter().enumerate() {
                    for (j, wy) in one_step.iter().enumerate() {
                        acc += *wx * *wy * p[x + i - 1][y + j - 1];
                    }
                }
                q[x][y] = acc;
            }
        }
        p = q;
        if t == next_check {
            let k = walk.times.iter().position(|&s| s == t as u64).unwrap();
            assert_eq!(walk.values[k], p[t_max][t_max], "t = {t}");
            assert_eq!(walk.values[k], walk.one_dim[k] * walk.one_dim[k]);
            next_check *= 2;
        }
    }
}

#[test]
fn sup_form_threshold_invariance() {
    let tr = HeatTrace::dyadic(1.0, 60, 0.0, |t| t.powf(-1.5) * (1.0 + 0.3 * (t.ln()).sin())).unwrap();
    let full = asdim_sup_form(&tr).unwrap();
    for k in [0, 5, 9, 15, 25] {
        let s = asdim_sup_form_from(&tr, 2f64.powi(k)).unwrap();
        assert!((s.value - full.value).abs() <= s.spread + full.spread, "t0 = 2^{k}: {s:?} vs {full:?}");
    }
}

#[test]
fn classifier_is_monotone_in_d() {
    let cfg = HausdorffConfig::default();
    for m in ["powerlaw:0.5", "powerlaw:1.3", "powerlog:1,1", "besicovitch:2", "besicovitch:3", "torus:2,179"] {
        let model: EigenvalueModel = m.parse().unwrap();
        let seq = model.series(1e6).unwrap();
        let c = Classifier::new(seq.as_ref(), cfg).unwrap();
        let rank = |g: Growth| match g {
            Growth::Infinite => 0,
            Growth::PositiveFinite => 1,
            Growth::Zero => 2,
        };
        let verdicts: Vec<u8> = (1..200).map(|i| rank(c.classify(i as f64 * 0.05))).collect();
        assert!(verdicts.windows(2).all(|w| w[0] <= w[1]), "{m}: {verdicts:?}");
    }
}
