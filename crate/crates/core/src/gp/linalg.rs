//! Dense Cholesky factorization and triangular solves on row-major storage.

/// Lower-triangular Cholesky factor `L` with `L L^T = A`, stored row-major
/// as a full `n x n` matrix (the upper triangle is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn empty() -> Self {
        Self { n: 0, l: Vec::new() }
    }

    /// Factors the symmetric matrix `a` (row-major, `n x n`). Returns `None`
    /// if a pivot is not strictly positive.
    pub fn factor(a: &[f64], n: usize) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                let dot: f64 = ri.iter().zip(rj).map(|(x, y)| x * y).sum();
                let s = a[i * n + j] - dot;
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Some(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    /// Appends one row/column to the factored matrix. `cross` holds the new
    /// column's off-diagonal entries and `diag` its diagonal entry. Returns
    /// `false` (leaving `self` untouched) if the extension is not positive
    /// definite.
    pub fn extend(&mut self, cross: &[f64], diag: f64) -> bool {
        debug_assert_eq!(cross.len(), self.n);
        let w = self.solve_lower(cross);
        let s = diag - dot(&w, &w);
        if s <= 0.0 || !s.is_finite() {
            return false;
        }
        let n = self.n;
        let mut l = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            l[i * (n + 1)..i * (n + 1) + i + 1].copy_from_slice(&self.l[i * n..i * n + i + 1]);
        }
        l[n * (n + 1)..n * (n + 1) + n].copy_from_slice(&w);
        l[n * (n + 1) + n] = s.sqrt();
        self.n = n + 1;
        self.l = l;
        true
    }

    /// Forward substitution: solves `L x = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s = x[i] - dot(row, &x[..i]);
            x[i] = s / self.l[i * n + i];
        }
        x
    }

    /// Back substitution: solves `L^T x = b`.
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            x[i] /= self.l[i * n + i];
            let xi = x[i];
            for (k, xk) in x[..i].iter_mut().enumerate() {
                *xk -= self.l[i * n + k] * xi;
            }
        }
        x
    }

    /// Solves `A x = b` using both triangular factors.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// Forward substitution on `m` right-hand sides stored back to back,
    /// each of length `n`.
    pub fn solve_lower_many(&self, b: &mut [f64], m: usize) {
        let n = self.n;
        debug_assert_eq!(b.len(), n * m);
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let d = self.l[i * n + i];
            for rhs in b.chunks_exact_mut(n) {
                let (done, rest) = rhs.split_at_mut(i);
                rest[0] = (rest[0] - dot(row, done)) / d;
            }
        }
    }
}

/// Dot product with four independent accumulators.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> Vec<f64> {
        // A = B B^T + n I with a fixed B.
        let b: Vec<f64> = (0..n * n).map(|k| ((k * 7 + 3) % 11) as f64 / 5.0 - 1.0).collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>();
            }
            a[i * n + i] += n as f64;
        }
        a
    }

    #[test]
    fn factor_and_solve_roundtrip() {
        let n = 6;
        let a = spd(n);
        let c = Cholesky::factor(&a, n).unwrap();
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 2.5).collect();
        let x = c.solve(&b);
        for i in 0..n {
            let ax: f64 = (0..n).map(|j| a[i * n + j] * x[j]).sum();
            assert!((ax - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn extend_matches_full_factorization() {
        let n = 5;
        let a = spd(n);
        let sub: Vec<f64> = (0..n - 1)
            .flat_map(|i| a[i * n..i * n + n - 1].to_vec())
            .collect();
        let mut c = Cholesky::factor(&sub, n - 1).unwrap();
        let cross: Vec<f64> = (0..n - 1).map(|i| a[i * n + n - 1]).collect();
        assert!(c.extend(&cross, a[n * n - 1]));
        let full = Cholesky::factor(&a, n).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!((c.at(i, j) - full.at(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn batched_forward_substitution() {
        let n = 7;
        let c = Cholesky::factor(&spd(n), n).unwrap();
        let m = 3;
        let mut b: Vec<f64> = (0..n * m).map(|k| (k as f64).sin()).collect();
        let cols: Vec<Vec<f64>> = b.chunks(n).map(<[f64]>::to_vec).collect();
        c.solve_lower_many(&mut b, m);
        for (j, col) in cols.iter().enumerate() {
            let x = c.solve_lower(col);
            for i in 0..n {
                assert!((x[i] - b[j * n + i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_indefinite() {
        assert!(Cholesky::factor(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
        let mut c = Cholesky::factor(&[1.0], 1).unwrap();
        assert!(!c.extend(&[1.0], 1.0));
        assert_eq!(c.dim(), 1);
    }
}
