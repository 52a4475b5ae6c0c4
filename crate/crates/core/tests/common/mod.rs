#![allow(dead_code)]

use entcopy::cloner::ClonerParams;
use entcopy::linalg::ComplexMatrix;
use entcopy::C64;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;

/// `n` equally spaced points of `[0, 1/sqrt 2]`, endpoints included.
pub fn grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| FRAC_1_SQRT_2 * i as f64 / (n - 1) as f64)
        .collect()
}

/// Random parameters obeying the reality and trace constraints. The nine
/// real ones are real, the rest complex; `A16` absorbs the trace.
pub fn random_params<R: Rng>(rng: &mut R, spread: f64) -> ClonerParams {
    let mut p = ClonerParams::zeros();
    for i in 1..=17 {
        let re = rng.random_range(-spread..spread);
        if entcopy::cloner::REAL_PARAMS.contains(&i) {
            p.set_re(i, re);
        } else {
            p.set(i, C64::new(re, rng.random_range(-spread..spread)));
        }
    }
    let a6 = rng.random_range(0.0..1.5);
    let a8 = rng.random_range(0.0..1.0);
    let a14 = rng.random_range(0.0..1.0);
    p.set_re(6, a6).set_re(8, a8).set_re(14, a14);
    p.set_re(16, 16.0 - 9.0 * a6 - 3.0 * a8 - 3.0 * a14);
    p
}

/// Random two-qubit density operator `X^dagger X / Tr`.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let x = ComplexMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = x.adjoint().matmul(&x);
    let t = m.trace().re;
    m.scale_real(1.0 / t).hermitian_part()
}

/// Random pure state projector on `dim` levels.
pub fn random_pure<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<C64> = v.iter().map(|z| z / n).collect();
    ComplexMatrix::projector(&v)
}
