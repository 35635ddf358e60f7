//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

/// `a` dominates `b`: no worse anywhere, strictly better somewhere.
pub fn naive_dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

/// Indices of vectors dominated by no other vector, by pairwise comparison.
pub fn brute_front(set: &[Vec<f64>]) -> Vec<usize> {
    (0..set.len())
        .filter(|&i| !(0..set.len()).any(|j| naive_dominates(&set[j], &set[i])))
        .collect()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

pub fn se_kernel(a: [f64; 2], b: [f64; 2], signal_var: f64, length_scale: f64) -> f64 {
    let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    signal_var * (-d2 / (2.0 * length_scale * length_scale)).exp()
}

/// Posterior mean and variance from explicit dense solves.
pub fn naive_posterior(
    xs: &[[f64; 2]],
    ys: &[f64],
    q: [f64; 2],
    signal_var: f64,
    length_scale: f64,
    noise_var: f64,
) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, signal_var);
    }
    let k: Vec<Vec<f64>> = xs
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            xs.iter()
                .enumerate()
                .map(|(j, &b)| se_kernel(a, b, signal_var, length_scale) + if i == j { noise_var } else { 0.0 })
                .collect()
        })
        .collect();
    let ks: Vec<f64> = xs.iter().map(|&a| se_kernel(a, q, signal_var, length_scale)).collect();
    let alpha = dense_solve(&k, ys);
    let v = dense_solve(&k, &ks);
    let mean = ks.iter().zip(&alpha).map(|(a, b)| a * b).sum();
    let var = signal_var - ks.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
    (mean, var)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
