//! Compact-storage complex banded LU with partial pivoting.
//!
//! Row `i` of the compact array holds the band entries `A[i, i-m1 .. i+m2]`;
//! factorization pivots within the band, widening the upper band from `m2`
//! to `m1 + m2` as usual.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    m1: usize,
    m2: usize,
    /// Row-major `n x (m1 + m2 + 1)`; entry `(i, j)` of the full matrix lives
    /// at column `j - i + m1`.
    a: Vec<Complex64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, m1: usize, m2: usize) -> Self {
        Self {
            n,
            m1,
            m2,
            a: vec![Complex64::ZERO; n * (m1 + m2 + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.m1, self.m2)
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let w = self.m1 + self.m2 + 1;
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(j + self.m1 >= i && j <= i + self.m2, "({i}, {j}) outside band");
        i * w + (j + self.m1 - i)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if j + self.m1 < i || j > i + self.m2 {
            return Complex64::ZERO;
        }
        self.a[self.slot(i, j)]
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let s = self.slot(i, j);
        self.a[s] += v;
    }

    /// LU factorization with partial pivoting. Fails on an exactly singular
    /// pivot (a discrete resonance for the Helmholtz systems built here).
    pub fn factor(mut self) -> Result<BandedLu> {
        let (n, m1, m2) = (self.n, self.m1, self.m2);
        let mm = m1 + m2 + 1;
        // Left-shift the first m1 rows so column 0 is the leftmost band entry.
        for i in 0..m1.min(n) {
            let shift = m1 - i;
            for j in shift..mm {
                self.a[i * mm + j - shift] = self.a[i * mm + j];
            }
            for j in (mm - shift)..mm {
                self.a[i * mm + j] = Complex64::ZERO;
            }
        }
        let mut al = vec![Complex64::ZERO; n * m1];
        let mut indx = vec![0usize; n];
        let mut l = m1;
        for k in 0..n {
            if l < n {
                l += 1;
            }
            let mut pivot = self.a[k * mm].norm();
            let mut ip = k;
            for i in (k + 1)..l {
                let mag = self.a[i * mm].norm();
                if mag > pivot {
                    pivot = mag;
                    ip = i;
                }
            }
            indx[k] = ip;
            if pivot == 0.0 {
                return Err(Error::SolveFailure(format!(
                    "singular pivot at row {k} of {n}"
                )));
            }
            if ip != k {
                for j in 0..mm {
                    self.a.swap(k * mm + j, ip * mm + j);
                }
            }
            for i in (k + 1)..l {
                let dum = self.a[i * mm] / self.a[k * mm];
                al[k * m1 + (i - k - 1)] = dum;
                for j in 1..mm {
                    self.a[i * mm + j - 1] = self.a[i * mm + j] - dum * self.a[k * mm + j];
                }
                self.a[i * mm + mm - 1] = Complex64::ZERO;
            }
        }
        Ok(BandedLu {
            n,
            m1,
            m2,
            au: self.a,
            al,
            indx,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    m1: usize,
    m2: usize,
    au: Vec<Complex64>,
    al: Vec<Complex64>,
    indx: Vec<usize>,
}

impl BandedLu {
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, m1) = (self.n, self.m1);
        let mm = self.m1 + self.m2 + 1;
        assert_eq!(b.len(), n);
        let mut l = m1;
        for k in 0..n {
            let ip = self.indx[k];
            if ip != k {
                b.swap(k, ip);
            }
            if l < n {
                l += 1;
            }
            for i in (k + 1)..l {
                let factor = self.al[k * m1 + (i - k - 1)];
                let bk = b[k];
                b[i] -= factor * bk;
            }
        }
        let mut l = 1;
        for i in (0..n).rev() {
            let mut dum = b[i];
            for k in 1..l {
                dum -= self.au[i * mm + k] * b[i + k];
            }
            b[i] = dum / self.au[i * mm];
            if l < mm {
                l += 1;
            }
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mul_banded(a: &BandedMatrix, x: &[Complex64]) -> Vec<Complex64> {
        let n = a.size();
        (0..n)
            .map(|i| (0..n).map(|j| a.get(i, j) * x[j]).sum())
            .collect()
    }

    #[test]
    fn tridiagonal_known_solution() {
        // [2 1 0; 1 2 1; 0 1 2] x = [4, 7, 6] has x = [1, 2, 2].
        let mut a = BandedMatrix::zeros(3, 1, 1);
        for i in 0..3 {
            a.add(i, i, c(2.0, 0.0));
            if i > 0 {
                a.add(i, i - 1, c(1.0, 0.0));
            }
            if i < 2 {
                a.add(i, i + 1, c(1.0, 0.0));
            }
        }
        let lu = a.factor().unwrap();
        let x = lu.solve(&[c(4.0, 0.0), c(7.0, 0.0), c(6.0, 0.0)]);
        for (got, want) in x.iter().zip([1.0, 2.0, 2.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn random_complex_band_roundtrip() {
        let mut state = 0xdeadbeefcafef00du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for &(n, m1, m2) in &[(12usize, 2usize, 3usize), (40, 5, 5), (7, 6, 6), (30, 1, 0)] {
            let mut a = BandedMatrix::zeros(n, m1, m2);
            for i in 0..n {
                for j in i.saturating_sub(m1)..(i + m2 + 1).min(n) {
                    a.add(i, j, c(next(), next()));
                }
                // Keep it comfortably nonsingular.
                a.add(i, i, c(6.0, 2.0));
            }
            let x_true: Vec<Complex64> = (0..n).map(|_| c(next(), next())).collect();
            let b = mul_banded(&a, &x_true);
            let x = a.clone().factor().unwrap().solve(&b);
            for (got, want) in x.iter().zip(&x_true) {
                assert!((got - want).norm() < 1e-10, "n={n} m1={m1} m2={m2}");
            }
        }
    }

    #[test]
    fn pivoting_handles_weak_diagonal() {
        // Leading diagonal entry much smaller than its neighbor forces a swap.
        let mut a = BandedMatrix::zeros(4, 1, 1);
        a.add(0, 0, c(1e-14, 0.0));
        a.add(0, 1, c(1.0, 0.0));
        a.add(1, 0, c(1.0, 0.0));
        a.add(1, 1, c(1.0, 0.0));
        a.add(1, 2, c(0.5, 0.0));
        a.add(2, 1, c(0.3, 0.0));
        a.add(2, 2, c(2.0, 0.0));
        a.add(2, 3, c(0.1, 0.0));
        a.add(3, 2, c(0.4, 0.0));
        a.add(3, 3, c(1.5, 0.0));
        let x_true = vec![c(1.0, -1.0), c(2.0, 0.5), c(-0.3, 0.2), c(0.0, 1.0)];
        let b = mul_banded(&a, &x_true);
        let x = a.clone().factor().unwrap().solve(&b);
        for (got, want) in x.iter().zip(&x_true) {
            assert!((got - want).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_matrix_reports_failure() {
        let mut a = BandedMatrix::zeros(3, 1, 1);
        // Row of zeros.
        a.add(0, 0, c(1.0, 0.0));
        a.add(2, 2, c(1.0, 0.0));
        assert!(matches!(a.factor(), Err(Error::SolveFailure(_))));
    }
}
