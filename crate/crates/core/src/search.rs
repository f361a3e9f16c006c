//! One-dimensional grid scans and golden-section refinement.

use alloc::vec::Vec;

use crate::math::{exp, ln, sqrt};

/// `n` points evenly spaced on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
            v[n - 1] = hi;
            v
        }
    }
}

/// `n` points evenly spaced in `ln x` on `[lo, hi]`; needs `0 < lo`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = linspace(ln(lo), ln(hi), n).into_iter().map(exp).collect();
    if n >= 2 {
        v[0] = lo;
        v[n - 1] = hi;
    }
    v
}

/// Result of a bracketed one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of `f` on `[lo, hi]` until the bracket is
/// narrower than `abs_tol`. Also compares against the end points so that a
/// monotone function returns its edge value.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
) -> Minimum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut evals = 0;
    let mut eval = |x: f64, evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut evals);
    let mut fd = eval(d, &mut evals);
    let tol = abs_tol.max(f64::EPSILON * (a.abs() + b.abs()));
    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut evals);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut evals);
        }
    }
    let (mut x, mut value) = if fc <= fd { (c, fc) } else { (d, fd) };
    for edge in [lo, hi] {
        if (edge - x).abs() <= 2.0 * tol {
            let fe = eval(edge, &mut evals);
            if fe < value {
                x = edge;
                value = fe;
            }
        }
    }
    Minimum {
        x,
        value,
        evaluations: evals,
    }
}

/// Golden-section maximization in `ln x` on `[lo, hi]` to relative tolerance
/// `rel_tol` in `x`.
pub fn golden_section_max_log<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Minimum {
    let (ulo, uhi) = (ln(lo), ln(hi));
    // map the log end points back to the exact edges
    let back = |u: f64| {
        if u == ulo {
            lo
        } else if u == uhi {
            hi
        } else {
            exp(u)
        }
    };
    let m = golden_section_min(|u| -f(back(u)), ulo, uhi, ln(1.0 + rel_tol));
    Minimum {
        x: back(m.x),
        value: -m.value,
        evaluations: m.evaluations,
    }
}

/// Indices of strict-or-plateau local minima of `values` (end points count
/// when they are lower than their single neighbour).
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut out = Vec::new();
    if n == 1 {
        out.push(0);
        return out;
    }
    for i in 0..n {
        let left = if i == 0 { f64::INFINITY } else { values[i - 1] };
        let right = if i + 1 == n {
            f64::INFINITY
        } else {
            values[i + 1]
        };
        // plateaus report their first point only
        if values[i] < left && values[i] <= right {
            out.push(i);
        }
    }
    out
}

/// Index of the smallest value; ties keep the first.
pub fn argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some(j) if values[j] <= *v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Root mean square of `x`.
pub fn rms(x: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in x {
        sum += v * v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sqrt(sum / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_hit_endpoints() {
        let v = linspace(0.0, 1.0, 5);
        assert_eq!(v, [0.0, 0.25, 0.5, 0.75, 1.0]);
        let v = logspace(0.01, 1.0, 3);
        assert_eq!(v[0], 0.01);
        assert!((v[1] - 0.1).abs() < 1e-15);
        assert_eq!(v[2], 1.0);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let m = golden_section_min(|x| (x - 0.3) * (x - 0.3), -1.0, 2.0, 1e-9);
        assert!((m.x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn golden_returns_edge_for_monotone() {
        let m = golden_section_min(|x| -x, 0.0, 2.0, 1e-6);
        assert_eq!(m.x, 2.0);
        let m = golden_section_min(|x| x, 0.0, 2.0, 1e-6);
        assert_eq!(m.x, 0.0);
    }

    #[test]
    fn golden_log_max() {
        let m = golden_section_max_log(|x| -(ln(x) - ln(0.2)).powi(2), 0.01, 1.0, 1e-6);
        assert!((m.x / 0.2 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn minima_and_argmin() {
        assert_eq!(local_minima(&[3.0, 1.0, 2.0, 0.5, 4.0]), [1, 3]);
        assert_eq!(local_minima(&[1.0, 2.0, 3.0]), [0]);
        assert_eq!(local_minima(&[3.0, 1.0, 1.0, 2.0]), [1]);
        assert_eq!(argmin(&[2.0, f64::NAN, 1.0, 1.0]), Some(2));
        assert!((rms([3.0, 4.0]) - sqrt(12.5)).abs() < 1e-15);
    }
}
