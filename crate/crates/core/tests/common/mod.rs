#![allow(dead_code)]

use dhdist::{RealMatrix, RealVector, StructuredTuple, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> RealMatrix {
    RealMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> RealVector {
    let v = RealVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    v.normalize()
}

pub fn skew(rng: &mut ChaCha8Rng, n: usize) -> RealMatrix {
    let b = gaussian(rng, n, n);
    (&b - b.transpose()) * 0.5
}

/// `FᵀF` with `F` of size `rank x n`.
pub fn psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> RealMatrix {
    let f = gaussian(rng, rank, n);
    f.transpose() * f
}

pub fn orthogonal(rng: &mut ChaCha8Rng, n: usize) -> RealMatrix {
    gaussian(rng, n, n).qr().q()
}

/// `U diag(B, 0) Uᵀ` for each block, so the last `r` columns of `U` are a
/// common kernel.
pub fn embed(u: &RealMatrix, block: &RealMatrix, n: usize) -> RealMatrix {
    let mut full = RealMatrix::zeros(n, n);
    let m = block.nrows();
    full.view_mut((0, 0), (m, m)).copy_from(block);
    u * full * u.transpose()
}

/// Random tuple of size `n` with `len` PSD members and a common kernel of
/// dimension exactly `r` (generically).
pub fn tuple_with_kernel(rng: &mut ChaCha8Rng, n: usize, len: usize, r: usize) -> StructuredTuple {
    let u = orthogonal(rng, n);
    let m = n - r;
    let j = embed(&u, &skew(rng, m), n);
    let xs = (0..len)
        .map(|_| {
            let rank = rng.random_range(0..=m);
            embed(&u, &psd(rng, m, rank), n)
        })
        .collect::<Vec<_>>();
    // make sure the reduced stack has trivial kernel
    let mut xs = xs;
    if m > 0 {
        xs[0] = embed(&u, &(psd(rng, m, m) + RealMatrix::identity(m, m) * 0.1), n);
    }
    StructuredTuple::new(j, xs, &Tolerance::default()).unwrap()
}

pub fn random_tuple(rng: &mut ChaCha8Rng, n: usize, len: usize) -> StructuredTuple {
    let j = skew(rng, n);
    let xs = (0..len)
        .map(|_| {
            let rank = rng.random_range(0..=n);
            psd(rng, n, rank)
        })
        .collect();
    StructuredTuple::new(j, xs, &Tolerance::default()).unwrap()
}

/// Definitional objective, written out independently of the library.
pub fn f_direct(j: &RealMatrix, xs: &[RealMatrix], u: &RealVector) -> f64 {
    let n = u.len();
    let p = RealMatrix::identity(n, n) - u * u.transpose();
    let mut f = 2.0 * (j * u).norm_squared();
    for x in xs {
        let c = (u.transpose() * x * u)[(0, 0)];
        f += 2.0 * (&p * x * u).norm_squared() + c * c;
    }
    f
}

fn sphere_point(n: usize, th: f64, ph: f64) -> RealVector {
    match n {
        2 => RealVector::from_vec(vec![th.cos(), th.sin()]),
        _ => RealVector::from_vec(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]),
    }
}

/// Brute-force minimum of `f` over a dense sphere grid (`n = 2` or `3`),
/// followed by a few zoomed grids around the best coarse point.
pub fn grid_distance(j: &RealMatrix, xs: &[RealMatrix], points: usize) -> f64 {
    use std::f64::consts::PI;
    let n = j.nrows();
    assert!(n == 2 || n == 3, "grid oracle only for n = 2, 3");
    let eval = |th: f64, ph: f64| f_direct(j, xs, &sphere_point(n, th, ph));
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let keep = |v: f64, th: f64, ph: f64, best: &mut (f64, f64, f64)| {
        if v < best.0 {
            *best = (v, th, ph);
        }
    };
    let (mut dth, mut dph);
    if n == 2 {
        dth = PI / points as f64;
        dph = 0.0;
        for i in 0..points {
            let th = dth * i as f64;
            keep(eval(th, 0.0), th, 0.0, &mut best);
        }
    } else {
        // half sphere suffices since f(u) = f(-u)
        let rings = (points as f64).sqrt() as usize;
        dth = PI / 2.0 / rings as f64;
        dph = 2.0 * PI / rings as f64;
        for a in 0..=rings {
            let th = dth * a as f64;
            let count = ((2.0 * rings as f64 * th.sin()).ceil() as usize).max(1) * 2;
            for b in 0..count {
                let ph = 2.0 * PI * b as f64 / count as f64;
                keep(eval(th, ph), th, ph, &mut best);
            }
        }
    }
    for _ in 0..6 {
        let (_, th0, ph0) = best;
        let steps: i32 = 20;
        for a in -steps..=steps {
            let th = th0 + dth * a as f64 / steps as f64;
            if n == 2 {
                keep(eval(th, 0.0), th, 0.0, &mut best);
                continue;
            }
            for b in -steps..=steps {
                let ph = ph0 + dph * b as f64 / steps as f64;
                keep(eval(th, ph), th, ph, &mut best);
            }
        }
        dth /= 10.0;
        dph /= 10.0;
    }
    best.0.sqrt()
}

pub fn lambda_min(s: &RealMatrix) -> f64 {
    s.clone().symmetric_eigen().eigenvalues.min()
}

pub fn rank(m: &RealMatrix, rel: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    sv.iter().filter(|&&s| s > rel * top.max(1e-300)).count()
}
