//! Brute-force reference computations.
//!
//! Each oracle recomputes a quantity by the most literal method available
//! (quadratic scans, path enumeration, lattice boxes, plain summation) so
//! that it shares no code path with the fast implementation it checks.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::heat::lattice_walk;
use crate::specdim::{dixmier_trajectory, torus_shell_counts, EigenvalueModel, ModelKind, Subsequence};
use crate::stepfn::{rearrange, MassSample};

/// `μ(t) = inf{s ≥ 0 : λ(s) ≤ t}` with `λ(s) = Σ_{v > s} mass`, by scanning
/// every candidate level.
pub fn rearrangement_at(atoms: &[(f64, f64)], t: f64) -> f64 {
    let lambda = |s: f64| atoms.iter().filter(|a| a.0 > s).map(|a| a.1).sum::<f64>();
    let mut best = f64::INFINITY;
    for s in atoms.iter().map(|a| a.0).chain(std::iter::once(0.0)) {
        if s >= 0.0 && lambda(s) <= t && s < best {
            best = s;
        }
    }
    best
}

/// `H_n = Σ_{k≤n} 1/k`, summed from the small end.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

/// `p_t(0,0)` of the lazy walk on `ℤ` by enumerating all `3^t` step words.
pub fn walk_return_paths(t: u32, laziness: Ratio<i64>) -> Ratio<i64> {
    let step = (Ratio::from_integer(1) - laziness) / 2;
    let mut total = Ratio::from_integer(0);
    for word in 0..3u64.pow(t) {
        let (mut w, mut pos, mut p) = (word, 0i64, Ratio::from_integer(1));
        for _ in 0..t {
            match w % 3 {
                0 => p *= laziness,
                1 => {
                    pos += 1;
                    p *= step;
                }
                _ => {
                    pos -= 1;
                    p *= step;
                }
            }
            w /= 3;
        }
        if pos == 0 {
            total += p;
        }
    }
    total
}

/// `#{k ∈ ℤ^d : |k|² = m}` by scanning the box `[−⌊√m⌋, ⌊√m⌋]^d`.
pub fn lattice_points(d: u32, m: u64) -> u64 {
    let r = (m as f64).sqrt().floor() as i64;
    let side = (2 * r + 1) as u64;
    let mut count = 0;
    for code in 0..side.pow(d) {
        let (mut c, mut s) = (code, 0i64);
        for _ in 0..d {
            let x = (c % side) as i64 - r;
            s += x * x;
            c /= side;
        }
        if s == m as i64 {
            count += 1;
        }
    }
    count
}

/// `Σ_{k≤n} μ_k^d` over the expanded sequence.
pub fn partial_sum(terms: &[f64], n: usize, d: f64) -> f64 {
    terms[..n].iter().map(|&m| m.powf(d)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub computed: f64,
    pub oracle: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
}

impl OracleCheck {
    pub fn new(name: impl Into<String>, computed: f64, oracle: f64, tol: f64) -> Self {
        let rel_err = if computed == oracle {
            0.0
        } else {
            (computed - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE)
        };
        Self { name: name.into(), computed, oracle, rel_err, tol, pass: rel_err <= tol }
    }
}

/// Random atoms: values in `(0, 10)` with ties, masses in `(0, 3)` on a
/// dyadic lattice so that every partial sum is exact in any order.
pub fn random_atoms(rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let n = rng.gen_range(1..12);
    (0..n)
        .map(|_| {
            let v = if rng.gen_bool(0.3) { rng.gen_range(1..4) as f64 } else { rng.gen_range(0.0..10.0) };
            (v, rng.gen_range(1..192) as f64 / 64.0)
        })
        .collect()
}

/// Rearrangement against the level scan on `samples` random measures:
/// returns the number of mismatching evaluations.
pub fn rearrangement_mismatches(samples: usize, seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..samples {
        let atoms = random_atoms(&mut rng);
        let f = rearrange(&MassSample::new(atoms.clone()))?;
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mut ts: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..total * 1.2)).collect();
        ts.extend(f.breakpoints().iter().copied());
        for t in ts {
            let (a, b) = (f.eval(t), rearrangement_at(&atoms, t));
            if (a - b).abs() > 1e-12 * b.abs().max(1.0) {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

/// Every registered oracle comparison.
pub fn run_all(seed: u64) -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();

    let bad = rearrangement_mismatches(1000, seed)?;
    out.push(OracleCheck::new("rearrangement mismatches (1000 samples)", bad as f64, 0.0, 0.0));

    let half = Ratio::new(1i64, 2);
    let w = lattice_walk(1, 8, half, |_, _| Ok(()))?;
    for (i, &t) in w.times.iter().enumerate().skip(1) {
        let exact = walk_return_paths(t as u32, half);
        out.push(OracleCheck::new(
            format!("walk p_{t}(0,0) on Z (exact {exact})"),
            ratio_f64(w.one_dim[i]),
            ratio_f64(exact),
            0.0,
        ));
    }

    for d in 1..=3u32 {
        let shells = torus_shell_counts(d, 4)?;
        for m in [1u64, 2, 5, 9, 14] {
            if d == 1 && m > 9 {
                continue;
            }
            out.push(OracleCheck::new(
                format!("lattice points |k|^2 = {m} in Z^{d}"),
                shells[m as usize] as f64,
                lattice_points(d, m) as f64,
                0.0,
            ));
        }
    }

    let h: EigenvalueModel = "powerlaw:1".parse()?;
    let seq = h.series(1e6)?;
    let tr = dixmier_trajectory(&h, seq.as_ref(), 1.0, &Subsequence::Explicit(vec![1e6]))?;
    let n = 1_000_000u64;
    out.push(OracleCheck::new("harmonic sigma_n / ln n at n = 1e6", tr.points[0].value, harmonic(n) / (n as f64).ln(), 1e-12));

    let root: EigenvalueModel = "powerlaw:0.5".parse()?;
    let terms = root.generate(100_000)?;
    let seq = root.series(1e5)?;
    let sums = seq.ln_partial_sums(1.5, &[(100_000f64).ln()]);
    out.push(OracleCheck::new("partial sum of n^-0.75 to 1e5", sums[0].exp(), partial_sum(&terms, 100_000, 1.5), 1e-12));

    // Plateau sequence: expanded terms up to the fourth plateau start.
    let b = EigenvalueModel::new(ModelKind::Besicovitch { lambda: 2.0 })?;
    let seq = b.series(1e6)?;
    let tr = dixmier_trajectory(&b, seq.as_ref(), 2.0, &Subsequence::Auto)?;
    let p4 = tr.points.iter().find(|p| p.k == 4).expect("fourth plateau");
    let terms = b.generate(p4.n as usize)?;
    out.push(OracleCheck::new(
        "plateau sigma_n(2)/ln n at the fourth plateau start",
        p4.value,
        partial_sum(&terms, p4.n as usize, 2.0) / p4.n.ln(),
        1e-10,
    ));
    let p20 = tr.points.iter().find(|p| p.k == 20).expect("plateau 20");
    out.push(OracleCheck::new("plateau Dixmier value at k = 20 (lambda = 2)", p20.value, 0.5, 0.1));

    Ok(out)
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
