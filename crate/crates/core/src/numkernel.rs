//! Dense and sparse numeric primitives shared by the operator and coarsening
//! modules: coordinate-triplet sparse matrices, symmetric eigendecomposition,
//! pseudo-inverse square roots, L-norms, principal angles and 1-D quadratic
//! minimization on the unit interval.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative eigenvalue threshold below which an eigenvalue is treated as zero
/// wherever a pseudo-inverse appears. Shared by every caller.
pub const REL_EIG_TOL: f64 = 1e-10;

/// Size guard for the dense eigensolver.
pub const DENSE_EIG_LIMIT: usize = 4000;

/// Sparse matrix in coordinate-triplet form.
///
/// Triplets are kept sorted by `(row, col)` with at most one entry per
/// position once [`CooMatrix::canonicalize`] has run; all constructors here
/// canonicalize before returning.
#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl CooMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CooMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CooMatrix { rows: n, cols: n, entries: (0..n).map(|i| (i, i, 1.0)).collect() }
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        entries: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        for &(r, c, _) in &entries {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "triplet ({r},{c}) outside {rows}x{cols}"
                )));
            }
        }
        let mut m = CooMatrix { rows, cols, entries };
        m.canonicalize();
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn triplets(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Sorts triplets by `(row, col)`, merges duplicates by summation and
    /// drops entries that cancelled to exactly zero.
    pub fn canonicalize(&mut self) {
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(self.entries.len());
        for &(r, c, v) in &self.entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != 0.0);
        self.entries = merged;
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<f64>, drop_below: f64) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].abs() > drop_below {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        CooMatrix { rows: m.nrows(), cols: m.ncols(), entries }
    }

    pub fn transpose(&self) -> Self {
        let mut t = CooMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        };
        t.canonicalize();
        t
    }

    /// Sparse-sparse product `self * other`.
    pub fn multiply(&self, other: &CooMatrix) -> Result<CooMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        // Row-major view of `other` for the accumulation pass.
        let mut other_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); other.rows];
        for &(r, c, v) in &other.entries {
            other_rows[r].push((c, v));
        }
        let mut acc: Vec<std::collections::BTreeMap<usize, f64>> =
            vec![std::collections::BTreeMap::new(); self.rows];
        for &(r, k, v) in &self.entries {
            for &(c, w) in &other_rows[k] {
                *acc[r].entry(c).or_insert(0.0) += v * w;
            }
        }
        let mut entries = Vec::new();
        for (r, row) in acc.into_iter().enumerate() {
            for (c, v) in row {
                if v != 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
        Ok(CooMatrix { rows: self.rows, cols: other.cols, entries })
    }

    /// Sparse-dense product `self * rhs`.
    pub fn mul_dense(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if self.cols != rhs.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows,
                self.cols,
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        let mut out = DMatrix::zeros(self.rows, rhs.ncols());
        for &(r, c, v) in &self.entries {
            for j in 0..rhs.ncols() {
                out[(r, j)] += v * rhs[(c, j)];
            }
        }
        Ok(out)
    }

    /// Multiplies row `r` by `diag[r]`.
    pub fn scale_rows(mut self, diag: &[f64]) -> Self {
        for e in &mut self.entries {
            e.2 *= diag[e.0];
        }
        self.canonicalize();
        self
    }

    /// Multiplies column `c` by `diag[c]`.
    pub fn scale_cols(mut self, diag: &[f64]) -> Self {
        for e in &mut self.entries {
            e.2 *= diag[e.1];
        }
        self.canonicalize();
        self
    }

    pub fn add(&self, other: &CooMatrix) -> Result<CooMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        let mut m = CooMatrix { rows: self.rows, cols: self.cols, entries };
        m.canonicalize();
        Ok(m)
    }

    /// Euclidean norm of every row.
    pub fn row_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.rows];
        for &(r, _, v) in &self.entries {
            sq[r] += v * v;
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Number of structural nonzeros per row.
    pub fn row_counts(&self) -> Vec<usize> {
        let mut n = vec![0usize; self.rows];
        for &(r, _, _) in &self.entries {
            n[r] += 1;
        }
        n
    }
}

/// Eigendecomposition of a symmetric operator, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Matching orthonormal eigenvectors, one column per eigenvalue.
    pub eigenvectors: DMatrix<f64>,
    /// Dimension of the Laplacian this spectrum belongs to.
    pub laplacian_dim: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Columns `lo..hi` of the decomposition.
    pub fn band(&self, lo: usize, hi: usize) -> (Vec<f64>, DMatrix<f64>) {
        let vals = self.eigenvalues[lo..hi].to_vec();
        let vecs = self.eigenvectors.columns(lo, hi - lo).into_owned();
        (vals, vecs)
    }
}

/// Full eigendecomposition of a symmetric matrix, eigenvalues sorted ascending.
///
/// Fails if the input is asymmetric beyond `1e-8` (relative to the largest
/// entry) or larger than [`DENSE_EIG_LIMIT`].
pub fn eigh(m: &DMatrix<f64>) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!("eigh on {}x{}", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    if n > DENSE_EIG_LIMIT {
        return Err(Error::TooLargeForDense(n, DENSE_EIG_LIMIT));
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
            laplacian_dim: 0,
        });
    }
    let scale = m.amax().max(1.0);
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > 1e-8 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    // Work on the symmetrized copy so roundoff asymmetry cannot leak through.
    let sym = (m + m.transpose()) * 0.5;
    let decomp = nalgebra::linalg::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomp.eigenvalues[a].total_cmp(&decomp.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| decomp.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &decomp.eigenvectors.column(src));
    }
    Ok(Spectrum { eigenvalues, eigenvectors, laplacian_dim: 0 })
}

/// Pseudo-inverse square root `V f(D) V^T` of a symmetric PSD matrix, with
/// `f(x) = x^{-1/2}` above `rel_tol * lambda_max` and `0` below.
pub fn pinv_sqrt(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let spec = eigh(m)?;
    let n = spec.len();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let lambda_max = spec.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let lambda_min = spec.eigenvalues[0];
    if lambda_min < -1e-8 * lambda_max.max(lambda_min.abs()) {
        return Err(Error::Indefinite(lambda_min));
    }
    let cut = rel_tol * lambda_max;
    let scales: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|&l| if l > cut { l.powf(-0.5) } else { 0.0 })
        .collect();
    let v = &spec.eigenvectors;
    let mut scaled = v.clone();
    for (j, &s) in scales.iter().enumerate() {
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    Ok(&scaled * v.transpose())
}

/// `sqrt(trace(X^T L X))`, the column-wise L-energy of `X`; traces within
/// roundoff of zero clamp to zero.
pub fn lnorm(x: &DMatrix<f64>, l: &CooMatrix) -> Result<f64> {
    if l.nrows() != l.ncols() || l.nrows() != x.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "lnorm of {}x{} against {}x{}",
            x.nrows(),
            x.ncols(),
            l.nrows(),
            l.ncols()
        )));
    }
    let mut trace = 0.0;
    for &(r, c, v) in l.triplets() {
        let mut dot = 0.0;
        for j in 0..x.ncols() {
            dot += x[(r, j)] * x[(c, j)];
        }
        trace += v * dot;
    }
    Ok(if trace <= 0.0 { 0.0 } else { trace.sqrt() })
}

fn orthonormal_columns(m: &DMatrix<f64>, label: &str) -> Result<DMatrix<f64>> {
    if m.ncols() == 0 {
        return Err(Error::RankDeficient(format!("{label} has no columns")));
    }
    if m.nrows() < m.ncols() {
        return Err(Error::RankDeficient(format!(
            "{label} has more columns ({}) than rows ({})",
            m.ncols(),
            m.nrows()
        )));
    }
    let qr = m.clone().col_piv_qr();
    let r = qr.r();
    let r0 = r[(0, 0)].abs();
    let tol = r0 * 1e-12 * (m.nrows().max(m.ncols()) as f64);
    for i in 0..m.ncols() {
        if r[(i, i)].abs() <= tol {
            return Err(Error::RankDeficient(format!("{label} column rank < {}", m.ncols())));
        }
    }
    Ok(qr.q())
}

/// Squared Frobenius norm of `sin Theta(U, V)`: orthonormalize both column
/// spaces, take the cross-Gram singular values as cosines and return
/// `sum(1 - sigma_i^2)` over the smaller dimension.
pub fn principal_angles_sin_sq(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    if u.nrows() != v.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "principal angles between {}-row and {}-row bases",
            u.nrows(),
            v.nrows()
        )));
    }
    let qu = orthonormal_columns(u, "U")?;
    let qv = orthonormal_columns(v, "V")?;
    let g = qu.transpose() * &qv;
    // sigma_i^2 are the eigenvalues of G^T G; take the top min-dim of them.
    let gram = g.transpose() * &g;
    let spec = eigh(&gram)?;
    let k = qu.ncols().min(qv.ncols());
    let top = &spec.eigenvalues[spec.len() - k..];
    Ok(top.iter().map(|&s2| 1.0 - s2.clamp(0.0, 1.0)).sum())
}

/// Fits the unique quadratic through `(0, c0)`, `(0.5, ch)`, `(1, c1)` and
/// minimizes it on `[0, 1]`.
///
/// A strictly convex fit returns its clamped vertex; otherwise the sampled
/// minimum wins, ties broken toward `0.5` then `0`.
pub fn quadratic_min_unit(c0: f64, ch: f64, c1: f64) -> (f64, f64) {
    let a = 2.0 * c0 - 4.0 * ch + 2.0 * c1;
    let b = -3.0 * c0 + 4.0 * ch - c1;
    let eval = |t: f64| a * t * t + b * t + c0;
    if a > 0.0 {
        let alpha = (-b / (2.0 * a)).clamp(0.0, 1.0);
        (alpha, eval(alpha))
    } else {
        [(0.5, ch), (0.0, c0), (1.0, c1)]
            .into_iter()
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn path_laplacian() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0])
    }

    #[test]
    fn eigh_path_graph() {
        let spec = eigh(&path_laplacian()).unwrap();
        assert_relative_eq!(spec.eigenvalues[0], 0.0, epsilon = 1e-10);
        assert_relative_eq!(spec.eigenvalues[1], 1.0, epsilon = 1e-10);
        assert_relative_eq!(spec.eigenvalues[2], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn eigh_identity() {
        let spec = eigh(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(spec.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn eigh_reconstructs_large_random() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 200;
        let raw = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let m = (&raw + raw.transpose()) * 0.5;
        let spec = eigh(&m).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(spec.eigenvalues.clone()));
        let rec = &spec.eigenvectors * d * spec.eigenvectors.transpose();
        assert!((rec - &m).norm() <= 1e-6 * m.norm());
    }

    #[test]
    fn eigh_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(eigh(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn eigh_reconstructs() {
        let m = path_laplacian();
        let spec = eigh(&m).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(spec.eigenvalues.clone()));
        let rec = &spec.eigenvectors * d * spec.eigenvectors.transpose();
        assert_relative_eq!(rec, m, epsilon = 1e-10);
    }

    #[test]
    fn pinv_sqrt_diag() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 4.0]);
        let p = pinv_sqrt(&m, REL_EIG_TOL).unwrap();
        assert_relative_eq!(p[(0, 0)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(p[(1, 1)], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn pinv_sqrt_identity() {
        let p = pinv_sqrt(&DMatrix::identity(3, 3), REL_EIG_TOL).unwrap();
        assert_relative_eq!(p, DMatrix::identity(3, 3), epsilon = 1e-12);
    }

    #[test]
    fn pinv_sqrt_rank_one() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let p = pinv_sqrt(&m, REL_EIG_TOL).unwrap();
        let expect = 0.5 / 2.0f64.sqrt();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(p[(i, j)], expect, epsilon = 1e-12);
            }
        }
        assert_relative_eq!(p[(0, 0)], 0.35355339059327373, epsilon = 1e-12);
    }

    #[test]
    fn pinv_sqrt_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(pinv_sqrt(&m, REL_EIG_TOL), Err(Error::Indefinite(_))));
    }

    #[test]
    fn lnorm_euclidean() {
        let x = DMatrix::from_column_slice(2, 1, &[3.0, 4.0]);
        let l = CooMatrix::identity(2);
        assert_relative_eq!(lnorm(&x, &l).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn lnorm_kernel_is_zero() {
        let x = DMatrix::from_column_slice(3, 1, &[1.0, 1.0, 1.0]);
        let l = CooMatrix::from_dense(&path_laplacian(), 0.0);
        assert_relative_eq!(lnorm(&x, &l).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lnorm_path_vector() {
        let x = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, -1.0]);
        let l = CooMatrix::from_dense(&path_laplacian(), 0.0);
        assert_relative_eq!(lnorm(&x, &l).unwrap(), 2.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn lnorm_additive_over_columns() {
        let l = CooMatrix::from_dense(&path_laplacian(), 0.0);
        let x1 = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, -1.0]);
        let x2 = DMatrix::from_column_slice(3, 1, &[0.5, -2.0, 1.0]);
        let both = DMatrix::from_columns(&[x1.column(0), x2.column(0)]);
        let a = lnorm(&x1, &l).unwrap();
        let b = lnorm(&x2, &l).unwrap();
        let c = lnorm(&both, &l).unwrap();
        assert_relative_eq!(c * c, a * a + b * b, epsilon = 1e-10);
    }

    #[test]
    fn principal_angles_cases() {
        let e1 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let e2 = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        let diag = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        assert_relative_eq!(principal_angles_sin_sq(&e1, &e1).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(principal_angles_sin_sq(&e1, &e2).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(principal_angles_sin_sq(&e1, &diag).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn principal_angles_rejects_rank_deficient() {
        let bad = DMatrix::from_column_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let e1 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        assert!(principal_angles_sin_sq(&bad, &e1).is_err());
    }

    #[test]
    fn quadratic_fit_cases() {
        let (a, c) = quadratic_min_unit(1.0, 0.25, 1.0);
        assert_relative_eq!(a, 0.5, epsilon = 1e-14);
        assert_relative_eq!(c, 0.25, epsilon = 1e-14);

        let (a, _) = quadratic_min_unit(1.0, 1.0, 1.0);
        assert_eq!(a, 0.5);

        let (a, c) = quadratic_min_unit(0.0, 1.0, 0.0);
        assert_eq!(a, 0.0);
        assert_eq!(c, 0.0);
    }

    #[test]
    fn quadratic_convex_clamps_to_endpoint() {
        // Vertex outside [0,1]: 2t^2 + t + 1 has vertex at -0.25.
        let (a, c) = quadratic_min_unit(1.0, 2.0, 4.0);
        assert_eq!(a, 0.0);
        assert_relative_eq!(c, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn coo_canonicalize_merges_and_drops() {
        let m = CooMatrix::from_triplets(
            2,
            2,
            vec![(0, 0, 1.0), (0, 0, 2.0), (1, 1, 1.0), (1, 1, -1.0)],
        )
        .unwrap();
        assert_eq!(m.triplets(), &[(0, 0, 3.0)]);
    }

    #[test]
    fn coo_multiply_matches_dense() {
        let a = CooMatrix::from_triplets(2, 3, vec![(0, 0, 1.0), (0, 2, 2.0), (1, 1, -1.0)])
            .unwrap();
        let b = CooMatrix::from_triplets(3, 2, vec![(0, 1, 3.0), (1, 0, 1.0), (2, 1, 0.5)])
            .unwrap();
        let prod = a.multiply(&b).unwrap();
        assert_relative_eq!(prod.to_dense(), a.to_dense() * b.to_dense(), epsilon = 1e-12);
    }
}
