//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::{CMatrix, C64};

/// Largest entry of `|m - m^dagger|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m^dagger) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Only the Hermitian part of the input is used.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        let eig = hermitian_part(m).symmetric_eigen();
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        HermitianEigen { values, vectors }
    }

    /// Rebuild `V g(D) V^dagger` for a scalar function of the eigenvalues.
    pub fn apply<F: Fn(f64) -> C64>(&self, g: F) -> CMatrix {
        let n = self.values.len();
        let d = DVector::from_iterator(n, self.values.iter().map(|&x| g(x)));
        &self.vectors * CMatrix::from_diagonal(&d) * self.vectors.adjoint()
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `exp(-i t H)` for Hermitian `H`, by spectral decomposition.
pub fn unitary_exp(h: &CMatrix, t: f64) -> CMatrix {
    HermitianEigen::new(h).apply(|x| C64::from_polar(1.0, -t * x))
}

/// Principal square root of a positive semidefinite matrix; negative noise is
/// clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    HermitianEigen::new(m).apply(|x| C64::new(x.max(0.0).sqrt(), 0.0))
}

/// Complex symmetric (Takagi) factorization `C = V diag(d) V^T`.
#[derive(Clone, Debug)]
pub struct Takagi {
    /// Nonnegative values, descending.
    pub values: Vec<f64>,
    /// Unitary; column `k` pairs with `values[k]`.
    pub vectors: CMatrix,
}

/// Takagi factorization of a complex symmetric matrix.
///
/// Uses the real symmetric embedding `[[A, B], [B, -A]]` of `C = A + iB`:
/// an eigenvector `(x; y)` with eigenvalue `d > 0` yields the Takagi vector
/// `x + i y`, and distinct eigenvectors of the embedding give orthonormal
/// Takagi vectors even inside degenerate blocks. Columns for `d` below
/// `zero_tol` are completed to an orthonormal basis.
pub fn takagi(c: &CMatrix, zero_tol: f64) -> Takagi {
    let r = c.nrows();
    let sym = (c + c.transpose()).scale(0.5);
    let emb = DMatrix::<f64>::from_fn(2 * r, 2 * r, |i, j| {
        let (bi, ii) = (i / r, i % r);
        let (bj, jj) = (j / r, j % r);
        let z = sym[(ii, jj)];
        match (bi, bj) {
            (0, 0) => z.re,
            (1, 1) => -z.re,
            _ => z.im,
        }
    });
    let eig = emb.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * r).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut values = Vec::with_capacity(r);
    let mut cols: Vec<DVector<C64>> = Vec::with_capacity(r);
    for &k in order.iter().take(r) {
        let d = eig.eigenvalues[k];
        if d <= zero_tol {
            break;
        }
        let v = DVector::from_fn(r, |i, _| C64::new(eig.eigenvectors[(i, k)], eig.eigenvectors[(r + i, k)]));
        values.push(d);
        cols.push(v.unscale(v.norm()));
    }
    complete_orthonormal(&mut cols, r);
    values.resize(r, 0.0);
    let vectors = CMatrix::from_columns(&cols);
    Takagi { values, vectors }
}

/// Extend an orthonormal list of vectors to an orthonormal basis of `C^dim`.
pub fn complete_orthonormal(cols: &mut Vec<DVector<C64>>, dim: usize) {
    let mut e = 0;
    while cols.len() < dim && e < dim {
        let mut v = DVector::<C64>::zeros(dim);
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for u in cols.iter() {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let nv = v.norm();
        if nv > 1e-6 {
            cols.push(v.unscale(nv));
        }
        e += 1;
    }
}

/// Multiset comparison of two real lists after sorting.
pub fn max_sorted_difference(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{complex_gaussian, seeded};

    #[test]
    fn takagi_reconstructs_random_symmetric() {
        let mut rng = seeded(7, 0);
        for r in 1..=6 {
            let g = complex_gaussian(r, r, &mut rng);
            let c = &g + g.transpose();
            let t = takagi(&c, 1e-13);
            let d = CMatrix::from_diagonal(&DVector::from_iterator(r, t.values.iter().map(|&x| C64::new(x, 0.0))));
            let rec = &t.vectors * d * t.vectors.transpose();
            assert!(frobenius(&(rec - &c)) < 1e-10);
            let id = t.vectors.adjoint() * &t.vectors;
            assert!(frobenius(&(id - CMatrix::identity(r, r))) < 1e-10);
            assert!(t.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn takagi_handles_degenerate_and_rank_deficient() {
        // Rank-2 matrix with a doubly degenerate value.
        let mut rng = seeded(8, 0);
        let q = crate::random::haar_unitary(5, &mut rng);
        let mut d = DVector::<C64>::zeros(5);
        d[0] = C64::new(0.3, 0.0);
        d[1] = C64::new(0.3, 0.0);
        let c = &q * CMatrix::from_diagonal(&d) * q.transpose();
        let t = takagi(&c, 1e-12);
        assert!((t.values[0] - 0.3).abs() < 1e-12);
        assert!((t.values[1] - 0.3).abs() < 1e-12);
        assert!(t.values[2..].iter().all(|&x| x == 0.0));
        let dd = CMatrix::from_diagonal(&DVector::from_iterator(5, t.values.iter().map(|&x| C64::new(x, 0.0))));
        let rec = &t.vectors * dd * t.vectors.transpose();
        assert!(frobenius(&(rec - &c)) < 1e-10);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = seeded(9, 0);
        let g = complex_gaussian(4, 4, &mut rng);
        let m = &g * g.adjoint();
        let s = psd_sqrt(&m);
        assert!(frobenius(&(&s * &s - &m)) < 1e-10);
    }
}
