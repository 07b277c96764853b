#![allow(dead_code)]

use istbench_core::quantum::PurePathState;
use istbench_core::C64;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
        .collect()
}

pub fn random_pure<R: Rng>(rng: &mut R, modes: usize, with_vacuum: bool) -> PurePathState {
    let mut v = gaussian_vec(rng, modes + 1);
    if !with_vacuum {
        v[modes] = C64::new(0.0, 0.0);
    }
    PurePathState::normalized(v).unwrap()
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let g = DMatrix::from_vec(n, n, gaussian_vec(rng, n * n));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_diagonal(&r.diagonal().map(|z| if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) }));
    q * phases
}

/// Dense unitary `D1 · W · D2 · P · W · D3` (random phases `D`, Walsh `W`,
/// random permutation `P`); cheap to construct at large `n`.
pub fn layered_unitary<R: Rng>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let s = 1.0 / (n as f64).sqrt();
    let walsh = DMatrix::from_fn(n, n, |i, j| if (i & j).count_ones() % 2 == 0 { s } else { -s });
    let mut phases = || -> Vec<C64> {
        (0..n).map(|_| C64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)).collect()
    };
    let (d1, d2, d3) = (phases(), phases(), phases());
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let pw = DMatrix::from_fn(n, n, |i, j| walsh[(perm[i], j)]);
    let w_re = DMatrix::from_fn(n, n, |i, k| walsh[(i, k)] * d2[k].re);
    let w_im = DMatrix::from_fn(n, n, |i, k| walsh[(i, k)] * d2[k].im);
    let (re, im) = (&w_re * &pw, &w_im * &pw);
    DMatrix::from_fn(n, n, |i, j| d1[i] * C64::new(re[(i, j)], im[(i, j)]) * d3[j])
}

/// Random mixed state over `modes + 1` levels with `rank` components.
pub fn random_density_matrix<R: Rng>(rng: &mut R, modes: usize, rank: usize) -> DMatrix<C64> {
    let n = modes + 1;
    let g = DMatrix::from_vec(n, rank, gaussian_vec(rng, n * rank));
    let m = &g * g.adjoint();
    let tr: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    m / C64::new(tr, 0.0)
}

pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}
