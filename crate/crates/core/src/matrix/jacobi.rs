//! One-sided (Hestenes) Jacobi SVD.

use super::{DenseMatrix, SvdTriple};

const SWEEPS: usize = 60;

pub(super) fn svd(a: &DenseMatrix) -> SvdTriple {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose());
        return SvdTriple { u: t.v, s: t.s, v: t.u };
    }
    let (n, p) = a.shape();
    // column-major working copies: w holds A V, v accumulates rotations
    let mut w: Vec<Vec<f64>> = (0..p).map(|j| (0..n).map(|i| a.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..p).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..SWEEPS {
        let mut rotated = false;
        for j in 0..p {
            for k in j + 1..p {
                let (alpha, beta, gamma) = dots(&w[j], &w[k]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, j, k, c, s);
                rotate(&mut v, j, k, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = w.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let floor = s.first().copied().unwrap_or(0.0) * f64::EPSILON * n as f64;
    let mut u_cols: Vec<Option<Vec<f64>>> = order
        .iter()
        .map(|&j| (norms[j] > floor).then(|| w[j].iter().map(|x| x / norms[j]).collect()))
        .collect();
    let mut v_cols: Vec<Vec<f64>> = order.iter().map(|&j| v[j].clone()).collect();
    complete_orthonormal(&mut u_cols, n);
    let u_cols: Vec<Vec<f64>> = u_cols.into_iter().map(|c| c.expect("completed")).collect();
    reorthonormalize(&mut v_cols);

    SvdTriple {
        u: DenseMatrix::from_fn(n, p, |i, j| u_cols[j][i]),
        s,
        v: DenseMatrix::from_fn(p, p, |i, j| v_cols[j][i]),
    }
}

fn dots(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let mut aa = 0.0;
    let mut bb = 0.0;
    let mut ab = 0.0;
    for (x, y) in a.iter().zip(b) {
        aa += x * x;
        bb += y * y;
        ab += x * y;
    }
    (aa, bb, ab)
}

fn rotate(cols: &mut [Vec<f64>], j: usize, k: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(k);
    for (x, y) in left[j].iter_mut().zip(right[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

fn project_out(target: &mut [f64], basis: &[f64]) {
    let dot: f64 = target.iter().zip(basis).map(|(a, b)| a * b).sum();
    for (t, b) in target.iter_mut().zip(basis) {
        *t -= dot * b;
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Two-pass modified Gram-Schmidt over the present columns, then fills the
/// missing ones with orthonormalized coordinate vectors.
fn complete_orthonormal(cols: &mut [Option<Vec<f64>>], n: usize) {
    let mut done: Vec<Vec<f64>> = Vec::with_capacity(cols.len());
    let mut candidate = 0;
    for slot in cols.iter_mut() {
        let mut col = match slot.take() {
            Some(c) => c,
            None => loop {
                let mut e = vec![0.0; n];
                e[candidate % n] = 1.0;
                candidate += 1;
                for _ in 0..2 {
                    for b in &done {
                        project_out(&mut e, b);
                    }
                }
                if normalize(&mut e) > 0.5 {
                    break e;
                }
            },
        };
        for _ in 0..2 {
            for b in &done {
                project_out(&mut col, b);
            }
        }
        normalize(&mut col);
        done.push(col.clone());
        *slot = Some(col);
    }
}

fn reorthonormalize(cols: &mut [Vec<f64>]) {
    for j in 0..cols.len() {
        let (prev, rest) = cols.split_at_mut(j);
        for _ in 0..2 {
            for b in prev.iter() {
                project_out(&mut rest[0], b);
            }
        }
        normalize(&mut rest[0]);
    }
}
