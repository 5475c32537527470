//! Dense exact rational matrices: Gaussian elimination, kernels, and a
//! fraction-free symmetric decomposition for PSD testing.

use crate::poly::Rat;
use num::{One, Signed, Zero};

/// Dense m×n matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Vec<Rat>>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            a: vec![vec![Rat::zero(); cols]; rows],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        debug_assert!(rows.iter().all(|x| x.len() == c));
        Mat { rows: r, cols: c, a: rows }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.a[i][i] = Rat::one();
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        self.a
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Reduce to reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.a[i][c].is_zero()) else {
                continue;
            };
            self.a.swap(r, p);
            let inv = self.a[r][c].clone();
            for x in self.a[r].iter_mut() {
                *x = x.clone() / &inv;
            }
            for i in 0..self.rows {
                if i != r && !self.a[i][c].is_zero() {
                    let f = self.a[i][c].clone();
                    for j in 0..self.cols {
                        let d = &self.a[r][j] * &f;
                        self.a[i][j] -= d;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel {x : Ax = 0}.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut basis = Vec::new();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.a[ri][free].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One exact solution of Ax = b (all variables free), or None if the
    /// system is inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        debug_assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zero(self.rows, self.cols + 1);
        for (i, bi) in b.iter().enumerate() {
            aug.a[i][..self.cols].clone_from_slice(&self.a[i]);
            aug.a[i][self.cols] = bi.clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the augmented column
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.a[ri][self.cols].clone();
        }
        Some(x)
    }
}

/// Does `v` lie in the span of `basis`?
pub fn in_span(basis: &[Vec<Rat>], v: &[Rat]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let n = v.len();
    // columns = basis vectors; consistent iff v in span
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|i| basis.iter().map(|b| b[i].clone()).collect())
        .collect();
    Mat::from_rows(rows).solve(v).is_some()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Result of the exact PSD test on a symmetric matrix.
#[derive(Debug, Clone)]
pub enum PsdResult {
    /// PSD, with an exact basis of the kernel.
    Psd { kernel: Vec<Vec<Rat>> },
    /// Not PSD, with a vector v such that vᵗHv < 0.
    NotPsd { witness: Vec<Rat> },
}

/// Exact PSD test by symmetric Gaussian elimination with diagonal
/// pivoting. A negative diagonal pivot, or a zero diagonal with a nonzero
/// off-diagonal entry in its row, yields an explicit negative-value
/// witness.
pub fn psd_check(h: &Mat) -> PsdResult {
    let n = h.rows;
    debug_assert_eq!(h.rows, h.cols);
    // work on a copy, accumulating the congruence transform E with
    // H_current = E · H · Eᵗ; a witness w for H_current maps back as Eᵗw.
    let mut m = h.clone();
    let mut e = Mat::identity(n);
    let mut active: Vec<usize> = (0..n).collect();

    let back_map = |e: &Mat, w: &[Rat]| -> Vec<Rat> {
        // v = Eᵗ w
        (0..n)
            .map(|j| (0..n).map(|i| &e.a[i][j] * &w[i]).sum())
            .collect()
    };

    while let Some(pos) = {
        // prefer a strictly positive diagonal pivot
        active.iter().position(|&i| m.a[i][i].is_positive())
    } {
        let k = active.remove(pos);
        let piv = m.a[k][k].clone();
        let others: Vec<usize> = active.clone();
        for &i in &others {
            if m.a[i][k].is_zero() {
                continue;
            }
            let f = &m.a[i][k] / &piv;
            for j in 0..n {
                let d = &m.a[k][j] * &f;
                m.a[i][j] -= d;
            }
            for j in 0..n {
                let d = &m.a[j][k] * &f;
                m.a[j][i] -= d;
            }
            for j in 0..n {
                let d = &e.a[k][j] * &f;
                e.a[i][j] -= d;
            }
        }
    }

    // remaining active block: diagonal entries are all ≤ 0.
    for &i in &active {
        if m.a[i][i].is_negative() {
            let mut w = vec![Rat::zero(); n];
            w[i] = Rat::one();
            return PsdResult::NotPsd { witness: back_map(&e, &w) };
        }
    }
    // zero diagonal: any nonzero off-diagonal entry within the active block
    // (or against an eliminated row, which elimination already zeroed)
    // breaks PSD-ness: for d_ii = d_jj = 0 and h_ij ≠ 0, take w = e_i − s·e_j.
    for (ai, &i) in active.iter().enumerate() {
        for &j in active.iter().skip(ai + 1) {
            if !m.a[i][j].is_zero() {
                // d_ii = d_jj = 0 and h_ij ≠ 0: w = e_i − sign(h_ij)·e_j
                // gives wᵗ H_cur w = −2|h_ij| < 0.
                let mut w = vec![Rat::zero(); n];
                w[i] = Rat::one();
                w[j] = crate::poly::int(if m.a[i][j].is_positive() { -1 } else { 1 });
                let v = back_map(&e, &w);
                debug_assert!(dot(&v, &h.mul_vec(&v)).is_negative());
                return PsdResult::NotPsd { witness: v };
            }
        }
    }
    // PSD: kernel of H = kernel of the congruent diagonal form pulled back.
    // Solve H x = 0 directly for an exact kernel basis.
    PsdResult::Psd { kernel: h.kernel_basis() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn m(rows: Vec<Vec<i64>>) -> Mat {
        Mat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(int).collect())
                .collect(),
        )
    }

    #[test]
    fn kernel_and_rank() {
        let a = m(vec![vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![int(0), int(0), int(1)]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(vec![vec![2, 1], vec![0, 1]]);
        let x = a.solve(&[int(5), int(1)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![int(5), int(1)]);
        let b = m(vec![vec![1, 1], vec![2, 2]]);
        assert!(b.solve(&[int(1), int(3)]).is_none());
    }

    #[test]
    fn psd_diag() {
        let h = m(vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 0]]);
        match psd_check(&h) {
            PsdResult::Psd { kernel } => {
                assert_eq!(kernel.len(), 1);
                assert_eq!(kernel[0], vec![int(0), int(0), int(1)]);
            }
            _ => panic!("expected PSD"),
        }
    }

    #[test]
    fn not_psd_indefinite() {
        let h = m(vec![vec![1, 2], vec![2, 1]]);
        match psd_check(&h) {
            PsdResult::NotPsd { witness } => {
                let val = dot(&witness, &h.mul_vec(&witness));
                assert!(val < int(0));
            }
            _ => panic!("expected not PSD"),
        }
    }

    #[test]
    fn not_psd_zero_diag_offdiag() {
        let h = m(vec![vec![0, 1], vec![1, 0]]);
        match psd_check(&h) {
            PsdResult::NotPsd { witness } => {
                let val = dot(&witness, &h.mul_vec(&witness));
                assert!(val < int(0));
            }
            _ => panic!("expected not PSD"),
        }
    }

    #[test]
    fn psd_with_offdiag() {
        // 2·[[2,1],[1,1]] is positive definite
        let h = m(vec![vec![4, 2], vec![2, 2]]);
        match psd_check(&h) {
            PsdResult::Psd { kernel } => assert!(kernel.is_empty()),
            _ => panic!("expected PSD"),
        }
    }

    #[test]
    fn in_span_checks() {
        let basis = vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]];
        assert!(in_span(&basis, &[rat(1, 2), int(3), int(0)]));
        assert!(!in_span(&basis, &[int(0), int(0), int(1)]));
    }
}
