//! Small dense eigenvalue routines for the 4x4 matrices this crate handles.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::math::sqrt;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending. Only the upper triangle is read.
pub fn symmetric_eigenvalues<const N: usize>(m: &[[f64; N]; N]) -> [f64; N] {
    let mut a = *m;
    for i in 0..N {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..N {
            diag += a[i][i] * a[i][i];
            for j in (i + 1)..N {
                off += a[i][j] * a[i][j];
            }
        }
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev = [0.0; N];
    for (i, e) in ev.iter_mut().enumerate() {
        *e = a[i][i];
    }
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a 4x4 Hermitian matrix, sorted ascending.
///
/// Works on the real 8x8 embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is
/// the Hermitian spectrum with every eigenvalue doubled.
pub fn hermitian_eigenvalues(m: &[[Complex64; 4]; 4]) -> [f64; 4] {
    let mut big = [[0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            let z = m[i][j];
            big[i][j] = z.re;
            big[i + 4][j + 4] = z.re;
            big[i][j + 4] = -z.im;
            big[i + 4][j] = z.im;
        }
    }
    let ev = symmetric_eigenvalues(&big);
    [ev[0], ev[2], ev[4], ev[6]]
}
