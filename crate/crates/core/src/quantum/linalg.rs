use nalgebra::DMatrix;

use crate::C64;

/// Complex product through four real GEMMs.
///
/// nalgebra only dispatches to the blocked kernel for real scalars, which
/// makes this several times faster than the generic complex product for
/// matrices beyond a few hundred rows.
pub(crate) fn cmatmul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    assert_eq!(a.ncols(), b.nrows());
    if a.nrows() * a.ncols() * b.ncols() < 64 * 64 * 64 {
        return a * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    DMatrix::from_fn(a.nrows(), b.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

fn split(m: &DMatrix<C64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

/// Replaces `m` by `(m + m†) / 2`.
pub(crate) fn hermitize(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Largest entrywise deviation of `m` from the identity.
pub(crate) fn identity_deviation(m: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for ((i, j), z) in m.iter().enumerate().map(|(k, z)| ((k % m.nrows(), k / m.nrows()), z)) {
        let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        worst = worst.max((z - target).norm());
    }
    worst
}

pub(crate) fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
