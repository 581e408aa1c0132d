//! Generalized functional maps, the spectral-approximation metric suite,
//! homology error, and spectral distances with coarse-to-fine lifting.

use nalgebra::DMatrix;

use crate::coarsen::lift_matrix;
use crate::error::{Error, Result};
use crate::numkernel::{eigh, principal_angles_sin_sq, CooMatrix, Spectrum, REL_EIG_TOL};
use crate::simplicial::{betti_numbers_gf2, SimplicialComplex};

/// The six spectral-approximation metrics plus homology error for one target.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct MetricsReport {
    /// Laplacian dimension the report refers to.
    pub k: usize,
    /// Band actually compared (after truncation).
    pub band: (usize, usize),
    /// Fraction of simplices removed.
    pub reduction: f64,
    /// Commutativity residual `||S_c C - C S||_F^2 / ||C||_F^2`.
    pub l_comm: f64,
    /// Orthogonality residual `||C^T C - I||_F^2`.
    pub pi_orth: f64,
    /// Identity residual `||C - I||_F^2`.
    pub c_orth: f64,
    /// Subspace norm deviation `| ||S^{1/2} U^T Pi U S^{-1/2}||_2 - 1 |`.
    pub subsp: f64,
    /// Principal-angle energy `||sin Theta(U, P^+ U_c)||_F^2`.
    pub theta: f64,
    /// Worst relative eigenvalue drift.
    pub lambda_err: f64,
    /// `|beta_1(coarse) - beta_1(fine)|`.
    pub e_beta: usize,
    pub warnings: Vec<String>,
}

/// `C = U_c^T P U`; the caller selects bands on both sides.
pub fn functional_map(
    u_coarse: &DMatrix<f64>,
    p: &CooMatrix,
    u_fine: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    if u_coarse.nrows() != p.nrows() || p.ncols() != u_fine.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "functional map dims {}x{} | {}x{} | {}x{}",
            u_coarse.nrows(),
            u_coarse.ncols(),
            p.nrows(),
            p.ncols(),
            u_fine.nrows(),
            u_fine.ncols()
        )));
    }
    let pu = p.mul_dense(u_fine)?;
    Ok(u_coarse.transpose() * pu)
}

/// Flips rows of `C` so its diagonal is non-negative, fixing the eigenvector
/// sign gauge of the coarse basis. Sign-invariant metrics are unaffected.
pub fn align_map_signs(c: &mut DMatrix<f64>) {
    let n = c.nrows().min(c.ncols());
    for i in 0..n {
        if c[(i, i)] < 0.0 {
            for j in 0..c.ncols() {
                c[(i, j)] = -c[(i, j)];
            }
        }
    }
}

fn frob_sq(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum()
}

fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let gram = m.transpose() * m;
    let spec = eigh(&gram)?;
    Ok(spec.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Inputs for one metric evaluation: fine and coarse complexes, their full
/// spectra for the same Laplacian dimension, and the accumulated map.
#[derive(Clone, Copy)]
pub struct MetricsInput<'a> {
    pub fine: &'a SimplicialComplex,
    pub coarse: &'a SimplicialComplex,
    pub fine_spectrum: &'a Spectrum,
    pub coarse_spectrum: &'a Spectrum,
    /// Accumulated `P_k`, coarse-by-fine.
    pub map: &'a CooMatrix,
    pub k: usize,
    pub band: (usize, usize),
}

/// Evaluates the six spectral-approximation metrics plus homology error.
///
/// The band is truncated to what the coarse spectrum offers; eigenvalue-based
/// metrics switch to the shifted values `1 + s` whenever the band contains a
/// numerical zero, since the drift and subspace formulas divide by `S`.
pub fn evaluate_metrics(input: &MetricsInput<'_>) -> Result<MetricsReport> {
    let (lo, hi) = input.band;
    let mut warnings = Vec::new();
    let reduction =
        1.0 - input.coarse.total_simplices() as f64 / input.fine.total_simplices() as f64;

    let beta_fine = betti_numbers_gf2(input.fine);
    let beta_coarse = betti_numbers_gf2(input.coarse);
    let b1_fine = beta_fine.get(1).copied().unwrap_or(0);
    let b1_coarse = beta_coarse.get(1).copied().unwrap_or(0);
    let e_beta = b1_fine.abs_diff(b1_coarse);

    let mut report = MetricsReport {
        k: input.k,
        band: (lo, lo),
        reduction,
        l_comm: 0.0,
        pi_orth: 0.0,
        c_orth: 0.0,
        subsp: 0.0,
        theta: 0.0,
        lambda_err: 0.0,
        e_beta,
        warnings: Vec::new(),
    };

    if hi <= lo || lo >= input.fine_spectrum.len() {
        report.warnings.push(format!("band {lo}..{hi} empty on the fine spectrum"));
        return Ok(report);
    }
    let hi_fine = hi.min(input.fine_spectrum.len());
    let hi_coarse = hi.min(input.coarse_spectrum.len());
    if lo >= hi_coarse {
        report.warnings.push(format!(
            "band {lo}..{hi} empty on the coarse spectrum of size {}",
            input.coarse_spectrum.len()
        ));
        return Ok(report);
    }
    let width = (hi_fine - lo).min(hi_coarse - lo);
    if width < hi - lo {
        warnings.push(format!("band {lo}..{hi} truncated to {lo}..{}", lo + width));
    }

    let (s_fine, u_fine) = input.fine_spectrum.band(lo, lo + width);
    let (s_coarse, u_coarse) = input.coarse_spectrum.band(lo, lo + width);

    let mut c = functional_map(&u_coarse, input.map, &u_fine)?;
    align_map_signs(&mut c);

    let ident = DMatrix::identity(width, width);
    report.c_orth = frob_sq(&(&c - &ident));
    report.pi_orth = frob_sq(&(c.transpose() * &c - &ident));

    let c_norm_sq = frob_sq(&c);
    if c_norm_sq > 0.0 {
        let sc = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s_coarse.clone()));
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s_fine.clone()));
        report.l_comm = frob_sq(&(&sc * &c - &c * &s)) / c_norm_sq;
    } else {
        warnings.push("functional map vanished; commutativity set to 0".into());
    }

    // Eigenvalue drift and subspace metrics divide by S; shift when the band
    // holds a numerical kernel.
    let s_max = s_fine.iter().cloned().fold(0.0f64, f64::max);
    let shift = s_fine.iter().chain(&s_coarse).any(|&x| x <= REL_EIG_TOL * s_max.max(1.0));
    let adj = |x: f64| if shift { 1.0 + x } else { x };
    report.lambda_err = s_fine
        .iter()
        .zip(&s_coarse)
        .map(|(&sf, &sc)| (adj(sf) - adj(sc)).abs() / adj(sf))
        .fold(0.0, f64::max);

    let lift = lift_matrix(input.map)?;
    let pi = lift.multiply(input.map)?;
    let pi_u = pi.mul_dense(&u_fine)?;
    let mut x = u_fine.transpose() * pi_u;
    for i in 0..width {
        let row_scale = adj(s_fine[i]).max(REL_EIG_TOL).sqrt();
        for j in 0..width {
            let col_scale = adj(s_fine[j]).max(REL_EIG_TOL).sqrt();
            x[(i, j)] *= row_scale / col_scale;
        }
    }
    report.subsp = (spectral_norm(&x)? - 1.0).abs();

    let lifted_basis = lift.mul_dense(&u_coarse)?;
    report.theta = match principal_angles_sin_sq(&u_fine, &lifted_basis) {
        Ok(v) => v,
        Err(Error::RankDeficient(msg)) => {
            warnings.push(format!("theta skipped: {msg}"));
            0.0
        }
        Err(e) => return Err(e),
    };

    report.band = (lo, lo + width);
    report.warnings = warnings;
    Ok(report)
}

/// Greedy injective matching of block columns to coarse rows by descending
/// `|C|` magnitude. Coarse spectra are full of near-degenerate eigenvalues, so
/// a fixed index pairing is ill-posed; the matching fixes the permutation
/// gauge the same way sign alignment fixes the sign gauge.
fn match_rows(c_full: &DMatrix<f64>, width: usize) -> Vec<usize> {
    let mut entries: Vec<(f64, usize, usize)> = Vec::with_capacity(c_full.nrows() * width);
    for i in 0..c_full.nrows() {
        for j in 0..width {
            entries.push((c_full[(i, j)].abs(), i, j));
        }
    }
    entries.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| (a.1, a.2).cmp(&(b.1, b.2))));
    let mut row_of = vec![usize::MAX; width];
    let mut row_used = vec![false; c_full.nrows()];
    let mut col_used = vec![false; width];
    let mut assigned = 0;
    for (_, i, j) in entries {
        if !row_used[i] && !col_used[j] {
            row_of[j] = i;
            row_used[i] = true;
            col_used[j] = true;
            assigned += 1;
            if assigned == width {
                break;
            }
        }
    }
    row_of
}

/// Functional-map block of one fine band against its best-matching coarse
/// eigenvectors, permutation and sign gauges fixed.
pub fn matched_functional_map_block(
    fine: &Spectrum,
    coarse: &Spectrum,
    map: &CooMatrix,
    band: (usize, usize),
) -> Result<DMatrix<f64>> {
    let (lo, hi) = band;
    if lo >= hi || hi > fine.len() {
        return Err(Error::InvalidConfig(format!(
            "band {lo}..{hi} invalid for spectrum of size {}",
            fine.len()
        )));
    }
    let width = (hi - lo).min(coarse.len());
    if width == 0 {
        return Err(Error::InvalidConfig("empty coarse spectrum for block evaluation".into()));
    }
    let (_, u_fine) = fine.band(lo, lo + width);
    let c_full = functional_map(&coarse.eigenvectors, map, &u_fine)?;
    let rows = match_rows(&c_full, width);
    let mut block = DMatrix::zeros(width, width);
    for (j, &i) in rows.iter().enumerate() {
        for jj in 0..width {
            block[(j, jj)] = c_full[(i, jj)];
        }
    }
    align_map_signs(&mut block);
    Ok(block)
}

/// `||C - I||_F^2` of the matched functional-map block of a fine band; the
/// band-pass figure of merit.
pub fn band_block_deviation(
    fine: &Spectrum,
    coarse: &Spectrum,
    map: &CooMatrix,
    band: (usize, usize),
) -> Result<f64> {
    let block = matched_functional_map_block(fine, coarse, map, band)?;
    let ident = DMatrix::<f64>::identity(block.nrows(), block.ncols());
    Ok(frob_sq(&(block - ident)))
}

/// Spectral distance family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    Diffusion,
    Biharmonic,
    Commute,
    Wks,
    Hks,
}

/// Parameters of the spectral distances.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DistanceParams {
    pub kind: DistanceKind,
    /// Diffusion / heat-kernel time.
    pub time: f64,
    /// WKS Gaussian variance (sigma squared).
    pub wks_variance: f64,
    /// WKS log-energy integration range.
    pub wks_energy_range: (f64, f64),
    pub wks_samples: usize,
}

impl Default for DistanceParams {
    fn default() -> Self {
        DistanceParams {
            kind: DistanceKind::Diffusion,
            time: 0.1,
            wks_variance: 1.0,
            wks_energy_range: (-4.0, 4.0),
            wks_samples: 64,
        }
    }
}

impl DistanceParams {
    pub fn validate(&self) -> Result<()> {
        if self.time <= 0.0 {
            return Err(Error::InvalidConfig(format!("time {} must be positive", self.time)));
        }
        if self.wks_variance <= 0.0 {
            return Err(Error::InvalidConfig("wks variance must be positive".into()));
        }
        if self.wks_energy_range.0 >= self.wks_energy_range.1 {
            return Err(Error::InvalidConfig("wks energy range must be increasing".into()));
        }
        if self.wks_samples < 2 {
            return Err(Error::InvalidConfig("wks needs at least 2 samples".into()));
        }
        Ok(())
    }
}

fn wks_signature(spectrum: &Spectrum, v: usize, t: f64, variance: f64, cut: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &s) in spectrum.eigenvalues.iter().enumerate() {
        if s <= cut {
            continue;
        }
        let g = (-(t - s.ln()).powi(2) / (2.0 * variance)).exp();
        num += spectrum.eigenvectors[(v, i)].powi(2) * g;
        den += g;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Spectral distance (or, for the heat kernel, similarity) between two
/// vertices given the eigenpairs of the vertex Laplacian.
pub fn spectral_distance(
    spectrum: &Spectrum,
    params: &DistanceParams,
    w: usize,
    v: usize,
) -> Result<f64> {
    params.validate()?;
    let n = spectrum.eigenvectors.nrows();
    if w >= n || v >= n {
        return Err(Error::DimensionMismatch(format!("vertices {w},{v} beyond {n}")));
    }
    let s_max = spectrum.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let cut = REL_EIG_TOL * s_max.max(1.0);
    let diff = |i: usize| spectrum.eigenvectors[(v, i)] - spectrum.eigenvectors[(w, i)];

    match params.kind {
        DistanceKind::Diffusion => Ok(spectrum
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &s)| diff(i).powi(2) * (-2.0 * s * params.time).exp())
            .sum()),
        DistanceKind::Biharmonic | DistanceKind::Commute => {
            let positive: Vec<(usize, f64)> = spectrum
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|&(_, &s)| s > cut)
                .map(|(i, &s)| (i, s))
                .collect();
            if positive.is_empty() {
                return Err(Error::RankDeficient(
                    "no positive eigenvalues for commute/biharmonic distance".into(),
                ));
            }
            Ok(positive
                .into_iter()
                .map(|(i, s)| {
                    let denom = if params.kind == DistanceKind::Biharmonic { s * s } else { s };
                    diff(i).powi(2) / denom
                })
                .sum())
        }
        DistanceKind::Wks => {
            let (t0, t1) = params.wks_energy_range;
            let steps = params.wks_samples;
            let dt = (t1 - t0) / (steps - 1) as f64;
            let integrand = |t: f64| {
                let a = wks_signature(spectrum, w, t, params.wks_variance, cut);
                let b = wks_signature(spectrum, v, t, params.wks_variance, cut);
                let den = a + b;
                if den > 1e-300 {
                    (a - b).abs() / den
                } else {
                    0.0
                }
            };
            let mut integral = 0.0;
            let mut prev = integrand(t0);
            for i in 1..steps {
                let t = t0 + dt * i as f64;
                let cur = integrand(t);
                integral += 0.5 * (prev + cur) * dt;
                prev = cur;
            }
            Ok(integral)
        }
        DistanceKind::Hks => Ok(spectrum
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                spectrum.eigenvectors[(w, i)]
                    * spectrum.eigenvectors[(v, i)]
                    * (-s * params.time).exp()
            })
            .sum()),
    }
}

/// Fine vertex row -> coarse vertex row, read off the column structure of the
/// accumulated `P_0`.
pub fn vertex_correspondence(p0: &CooMatrix) -> Result<Vec<usize>> {
    let mut owner: Vec<Option<usize>> = vec![None; p0.ncols()];
    for &(r, c, _) in p0.triplets() {
        if owner[c].is_none() {
            owner[c] = Some(r);
        }
    }
    owner.into_iter().enumerate().map(|(c, o)| o.ok_or(Error::ZeroColumn(c))).collect()
}

/// Transports per-coarse-vertex values back to fine vertices; merged vertices
/// share their coarse value.
pub fn lift_distances(coarse_values: &[f64], p0: &CooMatrix) -> Result<Vec<f64>> {
    if coarse_values.len() != p0.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} values for {} coarse vertices",
            coarse_values.len(),
            p0.nrows()
        )));
    }
    let corr = vertex_correspondence(p0)?;
    Ok(corr.into_iter().map(|r| coarse_values[r]).collect())
}

/// Mean absolute error between a reference signal and its lifted counterpart.
pub fn distance_error(reference: &[f64], lifted: &[f64]) -> Result<f64> {
    if reference.len() != lifted.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} reference values vs {} lifted",
            reference.len(),
            lifted.len()
        )));
    }
    if reference.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = reference.iter().zip(lifted).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / reference.len() as f64)
}

/// Deterministic distance source: the fine vertex of maximal edge degree,
/// ties to the smallest row.
pub fn max_degree_vertex(complex: &SimplicialComplex) -> usize {
    let mut degree = vec![0usize; complex.num_vertices()];
    for s in complex.simplices(1) {
        for &v in s.vertices() {
            degree[complex.vertex_row(v).expect("edge vertex")] += 1;
        }
    }
    degree
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{hodge_laplacian, unit_weights, LaplacianVariant};
    use crate::simplicial::build_complex;
    use approx::assert_relative_eq;

    fn path_spectrum() -> Spectrum {
        let k = build_complex(&[vec![0, 1], vec![1, 2]]).unwrap();
        let w = unit_weights(&k);
        let l = hodge_laplacian(&k, &w, 0, LaplacianVariant::Unweighted).unwrap();
        eigh(&l.to_dense()).unwrap()
    }

    #[test]
    fn functional_map_identity() {
        let spec = path_spectrum();
        let p = CooMatrix::identity(3);
        let mut c = functional_map(&spec.eigenvectors, &p, &spec.eigenvectors).unwrap();
        align_map_signs(&mut c);
        assert_relative_eq!(c, DMatrix::identity(3, 3), epsilon = 1e-10);
    }

    #[test]
    fn functional_map_cross_band_vanishes() {
        let spec = path_spectrum();
        let (_, low) = spec.band(0, 1);
        let (_, high) = spec.band(1, 3);
        let p = CooMatrix::identity(3);
        let c = functional_map(&high, &p, &low).unwrap();
        for v in c.iter() {
            assert_relative_eq!(*v, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn functional_map_path_collapse_constant() {
        // Collapsing {1,2} on the path: the constant eigenvectors map through
        // P = [[1,0,0],[0,1/2,1/2]] with |C| = sqrt(2/3).
        let fine = DMatrix::from_column_slice(3, 1, &[1.0, 1.0, 1.0]) / 3.0f64.sqrt();
        let coarse = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]) / 2.0f64.sqrt();
        let p =
            CooMatrix::from_triplets(2, 3, vec![(0, 0, 1.0), (1, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let c = functional_map(&coarse, &p, &fine).unwrap();
        assert_relative_eq!(c[(0, 0)].abs(), (2.0f64 / 3.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn identity_coarsening_all_metrics_zero() {
        let k = build_complex(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let w = unit_weights(&k);
        let l = hodge_laplacian(&k, &w, 1, LaplacianVariant::Unweighted).unwrap();
        let spec = eigh(&l.to_dense()).unwrap();
        let p = CooMatrix::identity(k.num_simplices(1));
        let input = MetricsInput {
            fine: &k,
            coarse: &k,
            fine_spectrum: &spec,
            coarse_spectrum: &spec,
            map: &p,
            k: 1,
            band: (0, 4),
        };
        let report = evaluate_metrics(&input).unwrap();
        assert_relative_eq!(report.l_comm, 0.0, epsilon = 1e-10);
        assert_relative_eq!(report.pi_orth, 0.0, epsilon = 1e-10);
        assert_relative_eq!(report.c_orth, 0.0, epsilon = 1e-10);
        assert_relative_eq!(report.subsp, 0.0, epsilon = 1e-8);
        assert_relative_eq!(report.theta, 0.0, epsilon = 1e-10);
        assert_relative_eq!(report.lambda_err, 0.0, epsilon = 1e-10);
        assert_eq!(report.e_beta, 0);
    }

    #[test]
    fn metrics_invariant_to_matched_sign_flips() {
        let k = build_complex(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let w = unit_weights(&k);
        let l = hodge_laplacian(&k, &w, 1, LaplacianVariant::Unweighted).unwrap();
        let spec = eigh(&l.to_dense()).unwrap();
        let mut flipped = spec.clone();
        for j in [0usize, 2] {
            for i in 0..flipped.eigenvectors.nrows() {
                flipped.eigenvectors[(i, j)] = -flipped.eigenvectors[(i, j)];
            }
        }
        let p = CooMatrix::identity(k.num_simplices(1));
        let base = MetricsInput {
            fine: &k,
            coarse: &k,
            fine_spectrum: &spec,
            coarse_spectrum: &spec,
            map: &p,
            k: 1,
            band: (0, 4),
        };
        let alt = MetricsInput { fine_spectrum: &flipped, coarse_spectrum: &flipped, ..base };
        let a = evaluate_metrics(&base).unwrap();
        let b = evaluate_metrics(&alt).unwrap();
        assert_relative_eq!(a.l_comm, b.l_comm, epsilon = 1e-10);
        assert_relative_eq!(a.pi_orth, b.pi_orth, epsilon = 1e-10);
        assert_relative_eq!(a.c_orth, b.c_orth, epsilon = 1e-10);
        assert_relative_eq!(a.theta, b.theta, epsilon = 1e-10);
        assert_relative_eq!(a.subsp, b.subsp, epsilon = 1e-10);
    }

    #[test]
    fn commute_distance_on_path() {
        let spec = path_spectrum();
        let params = DistanceParams { kind: DistanceKind::Commute, ..Default::default() };
        let d = spectral_distance(&spec, &params, 0, 2).unwrap();
        assert_relative_eq!(d, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn distances_vanish_at_identical_vertices() {
        let spec = path_spectrum();
        for kind in [DistanceKind::Diffusion, DistanceKind::Biharmonic, DistanceKind::Commute] {
            let params = DistanceParams { kind, ..Default::default() };
            assert_relative_eq!(
                spectral_distance(&spec, &params, 1, 1).unwrap(),
                0.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn distances_symmetric() {
        let spec = path_spectrum();
        for kind in [
            DistanceKind::Diffusion,
            DistanceKind::Biharmonic,
            DistanceKind::Commute,
            DistanceKind::Wks,
        ] {
            let params = DistanceParams { kind, ..Default::default() };
            let a = spectral_distance(&spec, &params, 0, 2).unwrap();
            let b = spectral_distance(&spec, &params, 2, 0).unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn hks_long_time_limit() {
        let spec = path_spectrum();
        let params = DistanceParams { kind: DistanceKind::Hks, time: 1e4, ..Default::default() };
        let d = spectral_distance(&spec, &params, 0, 2).unwrap();
        assert_relative_eq!(d, 1.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn lift_and_error_roundtrip() {
        let p0 =
            CooMatrix::from_triplets(2, 3, vec![(0, 0, 1.0), (1, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let lifted = lift_distances(&[7.0, 3.0], &p0).unwrap();
        assert_eq!(lifted, vec![7.0, 3.0, 3.0]);
        assert_relative_eq!(distance_error(&lifted, &lifted).unwrap(), 0.0);
        let offset: Vec<f64> = lifted.iter().map(|x| x + 0.25).collect();
        assert_relative_eq!(distance_error(&lifted, &offset).unwrap(), 0.25);

        let broken = CooMatrix::from_triplets(1, 2, vec![(0, 0, 1.0)]).unwrap();
        assert!(matches!(lift_distances(&[1.0], &broken), Err(Error::ZeroColumn(1))));
    }

    #[test]
    fn max_degree_vertex_path() {
        let k = build_complex(&[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(max_degree_vertex(&k), 1);
    }

    #[test]
    fn theta_vanishes_iff_spans_match() {
        use crate::numkernel::principal_angles_sin_sq;
        // Same span in a rotated basis: angle energy zero.
        let u = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let c = 0.5f64.sqrt();
        let rotated = DMatrix::from_column_slice(3, 2, &[c, c, 0.0, -c, c, 0.0]);
        assert_relative_eq!(principal_angles_sin_sq(&u, &rotated).unwrap(), 0.0, epsilon = 1e-12);
        // A span leaning out of the plane has positive angle energy.
        let tilted = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, c, c]);
        assert!(principal_angles_sin_sq(&u, &tilted).unwrap() > 0.1);
    }
}
