//! The coarsening engine: candidate families, contraction matrices, the
//! projection-based quality function, greedy contraction with optional
//! interpolation-parameter search, and stochastic cost refresh.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numkernel::{eigh, pinv_sqrt, quadratic_min_unit, CooMatrix, REL_EIG_TOL};
use crate::operators::{
    cotan_symmetric, cotan_weights, hodge_laplacian, unit_weights, LaplacianVariant,
};
use crate::simplicial::{contract, sort_parity_sign, SimplicialComplex};

/// Where the simplex weights of a target Laplacian come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    Unit,
    Cotan,
}

/// Names one Laplacian: its simplex dimension, variant and weight source.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LaplacianSpec {
    pub k: usize,
    pub variant: LaplacianVariant,
    pub weights: WeightSource,
}

/// A spectral band of one Laplacian to preserve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TargetSpec {
    pub laplacian: LaplacianSpec,
    /// Half-open index interval `[lo, hi)` into the ascending eigenvalues.
    pub band: (usize, usize),
    /// Shift eigenvalues (and the norm operator) by the identity so harmonic
    /// eigenvectors survive the pseudo-inverse scaling.
    pub harmonic_shift: bool,
}

/// A resolved target: the spec plus the selected eigenpairs of the original
/// complex.
#[derive(Debug, Clone)]
pub struct SpectrumTarget {
    pub spec: TargetSpec,
    /// Selected eigenvalues, ascending, unshifted.
    pub eigenvalues: Vec<f64>,
    /// Matching orthonormal eigenvector columns.
    pub basis: DMatrix<f64>,
}

impl SpectrumTarget {
    pub fn k(&self) -> usize {
        self.spec.laplacian.k
    }
}

/// Kinds of vertex families offered for contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Edges,
    Faces,
    ClosedStar,
}

/// What the reduction ratio counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioBasis {
    Vertices,
    Simplices,
}

/// One candidate contraction with its cached cost.
#[derive(Debug, Clone)]
pub struct CandidateFamily {
    /// Sorted current vertex ids.
    pub vertices: Vec<usize>,
    pub kind: FamilyKind,
    pub cost: f64,
    /// Interpolation parameter; 1 when the family was not alpha-optimized.
    pub alpha: f64,
    pub dirty: bool,
}

/// Coarsening run parameters.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CoarsenConfig {
    /// Fraction of entities to remove, in `[0, 1]`.
    pub ratio: f64,
    pub basis: RatioBasis,
    pub family_kind: FamilyKind,
    /// Per-target combination weights; `None` uses `1 / (1 + k_q)`.
    pub combination_weights: Option<Vec<f64>>,
    /// Fraction of candidates re-scored per level.
    pub refresh_fraction: f64,
    /// Search the edge-collapse interpolation parameter on meshes.
    pub optimize_alpha: bool,
    pub seed: u64,
}

impl Default for CoarsenConfig {
    fn default() -> Self {
        CoarsenConfig {
            ratio: 0.5,
            basis: RatioBasis::Simplices,
            family_kind: FamilyKind::Edges,
            combination_weights: None,
            refresh_fraction: 0.1,
            optimize_alpha: false,
            seed: 0,
        }
    }
}

impl CoarsenConfig {
    pub fn validate(&self, n_targets: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.ratio) {
            return Err(Error::InvalidConfig(format!("ratio {} outside [0, 1]", self.ratio)));
        }
        if !(self.refresh_fraction > 0.0 && self.refresh_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "refresh fraction {} outside (0, 1]",
                self.refresh_fraction
            )));
        }
        if let Some(w) = &self.combination_weights {
            if w.len() != n_targets {
                return Err(Error::InvalidConfig(format!(
                    "{} combination weights for {} targets",
                    w.len(),
                    n_targets
                )));
            }
        }
        Ok(())
    }
}

/// One entry of the level log.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    /// Original vertex labels of the contracted family.
    pub family: Vec<usize>,
    pub cost: f64,
    pub alpha: f64,
    /// Counts after the contraction.
    pub vertices: usize,
    pub simplices: usize,
    /// Candidates re-scored while preparing the next selection.
    pub refreshed: usize,
}

/// Wall-clock samples per level, kept out of the deterministic outputs.
#[derive(Debug, Clone, Default)]
pub struct LevelTiming {
    pub level: usize,
    pub cost_eval_nanos: u128,
    pub contract_nanos: u128,
    pub refreshed: usize,
}

/// Everything a coarsening run produces.
#[derive(Debug, Clone)]
pub struct CoarsenResult {
    pub complex: SimplicialComplex,
    /// Accumulated coarsening matrices, one per dimension of the original
    /// complex, each `|K_c,k| x |K_0,k|`.
    pub maps: Vec<CooMatrix>,
    pub levels: Vec<LevelRecord>,
    pub timings: Vec<LevelTiming>,
    /// False when the candidate set ran out before the ratio was reached.
    pub ratio_reached: bool,
}

/// Builds the Laplacian a target preserves, in its symmetric realization.
///
/// Random-walk targets share the symmetric variant's matrix: the two are
/// similar, and the quality function needs a symmetric PSD operator with an
/// orthonormal eigenbasis.
pub fn target_laplacian(complex: &SimplicialComplex, spec: &LaplacianSpec) -> Result<CooMatrix> {
    match spec.weights {
        WeightSource::Unit => {
            let w = unit_weights(complex);
            let variant = match spec.variant {
                LaplacianVariant::Unweighted => LaplacianVariant::Unweighted,
                _ => LaplacianVariant::Symmetric,
            };
            hodge_laplacian(complex, &w, spec.k, variant)
        }
        WeightSource::Cotan => {
            if spec.k == 0 {
                cotan_symmetric(complex)
            } else {
                let w = cotan_weights(complex)?;
                hodge_laplacian(complex, &w, spec.k, LaplacianVariant::Symmetric)
            }
        }
    }
}

/// Resolves target specs on the original complex: assembles each Laplacian,
/// decomposes it and selects the band (truncating overlong bands with a
/// warning).
pub fn resolve_targets(
    complex: &SimplicialComplex,
    specs: &[TargetSpec],
) -> Result<Vec<SpectrumTarget>> {
    if specs.is_empty() {
        return Err(Error::InvalidConfig("no spectrum targets given".into()));
    }
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let lap = target_laplacian(complex, &spec.laplacian)?;
        let spectrum = eigh(&lap.to_dense())?;
        let (lo, mut hi) = spec.band;
        if lo >= spectrum.len() {
            return Err(Error::InvalidConfig(format!(
                "band start {lo} beyond spectrum of size {}",
                spectrum.len()
            )));
        }
        if hi <= lo {
            return Err(Error::InvalidConfig(format!("empty band {lo}..{hi}")));
        }
        if hi > spectrum.len() {
            log::warn!(
                "band {lo}..{hi} truncated to {lo}..{} for L_{}",
                spectrum.len(),
                spec.laplacian.k
            );
            hi = spectrum.len();
        }
        let (vals, vecs) = spectrum.band(lo, hi);
        let mut resolved = *spec;
        resolved.band = (lo, hi);
        out.push(SpectrumTarget { spec: resolved, eigenvalues: vals, basis: vecs });
    }
    Ok(out)
}

/// Initializes the candidate family set for a complex.
pub fn init_candidates(
    complex: &SimplicialComplex,
    kind: FamilyKind,
) -> Result<Vec<CandidateFamily>> {
    let make = |vertices: Vec<usize>| CandidateFamily {
        vertices,
        kind,
        cost: f64::INFINITY,
        alpha: 1.0,
        dirty: true,
    };
    let families: Vec<CandidateFamily> = match kind {
        FamilyKind::Edges => {
            complex.simplices(1).iter().map(|s| make(s.vertices().to_vec())).collect()
        }
        FamilyKind::Faces => {
            if complex.dim() < 2 {
                return Err(Error::InvalidConfig(
                    "face families need a complex of dimension >= 2".into(),
                ));
            }
            complex.simplices(2).iter().map(|s| make(s.vertices().to_vec())).collect()
        }
        FamilyKind::ClosedStar => complex
            .simplices(0)
            .iter()
            .filter_map(|s| {
                let v = s.vertices()[0];
                let star = crate::simplicial::closed_star_vertices(complex, v).ok()?;
                (star.len() >= 2).then(|| make(star))
            })
            .collect(),
    };
    if families.is_empty() {
        return Err(Error::NoCandidates);
    }
    Ok(families)
}

/// Assembles the per-dimension contraction matrices of one contraction.
///
/// Every column carries the sign of its simplex's image (zero for degenerate
/// simplices) and rows are rescaled to `1/m` over their `m` entries. With
/// `alpha = Some(a)` and a two-vertex family, the merged vertex row instead
/// gets `a` at the target column and `1 - a` at the other endpoint.
pub fn assemble_contraction_matrices(
    complex: &SimplicialComplex,
    family: &[usize],
    target: usize,
    alpha: Option<f64>,
) -> Result<Vec<CooMatrix>> {
    let (coarse, cmap) = contract(complex, family, target)?;
    let mut out = Vec::with_capacity(complex.dim() + 1);
    for k in 0..=complex.dim() {
        let rows = coarse.num_simplices(k);
        let cols = complex.num_simplices(k);
        let mut per_row: Vec<usize> = vec![0; rows];
        for m in cmap.simplex_maps[k].iter().flatten() {
            per_row[m.0] += 1;
        }
        let mut entries = Vec::new();
        for (j, m) in cmap.simplex_maps[k].iter().enumerate() {
            if let Some((r, sign)) = m {
                entries.push((*r, j, f64::from(*sign) / per_row[*r] as f64));
            }
        }
        if k == 0 && family.len() == 2 {
            if let Some(a) = alpha {
                let t_col = complex.vertex_row(target).expect("target in complex");
                let merged_row = cmap.vertex_map[t_col];
                for e in &mut entries {
                    if e.0 == merged_row {
                        e.2 = if e.1 == t_col { a } else { 1.0 - a };
                    }
                }
            }
        }
        out.push(CooMatrix::from_triplets(rows, cols, entries)?);
    }
    Ok(out)
}

/// Pseudo-inverse `P^+ = P^T D^{-2}` of a coarsening matrix, `D` holding the
/// row norms.
pub fn lift_matrix(p: &CooMatrix) -> Result<CooMatrix> {
    let norms = p.row_norms();
    if let Some(r) = norms.iter().position(|&n| n == 0.0) {
        return Err(Error::ZeroRow(r));
    }
    let inv_sq: Vec<f64> = norms.iter().map(|&n| 1.0 / (n * n)).collect();
    Ok(p.transpose().scale_cols(&inv_sq))
}

/// Advances one target's propagated basis across a level: `B <- P B` and
/// `A = B (B^T L B)^{+1/2}`, with `L + I` in the Gram when the harmonic shift
/// is on.
pub fn level_setup_step(
    basis: &DMatrix<f64>,
    single_level_p: &CooMatrix,
    laplacian: &DMatrix<f64>,
    shift: bool,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let b = single_level_p.mul_dense(basis)?;
    if b.nrows() == 0 {
        return Ok((b.clone(), b));
    }
    let lb = laplacian * &b;
    let mut gram = b.transpose() * lb;
    if shift {
        gram += b.transpose() * &b;
    }
    let correction = pinv_sqrt(&gram, REL_EIG_TOL)?;
    let a = &b * correction;
    Ok((b, a))
}

/// Scaled level-0 subspace `U diag(s~^{-1/2})`, where `s~ = 1 + s` under the
/// harmonic shift and pseudo-inverse thresholding applies.
fn initial_subspace(target: &SpectrumTarget) -> DMatrix<f64> {
    let shifted: Vec<f64> = target
        .eigenvalues
        .iter()
        .map(|&s| if target.spec.harmonic_shift { 1.0 + s } else { s })
        .collect();
    let smax = shifted.iter().cloned().fold(0.0f64, f64::max);
    let cut = REL_EIG_TOL * smax;
    let mut b = target.basis.clone();
    for (j, &s) in shifted.iter().enumerate() {
        let scale = if s > cut { s.powf(-0.5) } else { 0.0 };
        for i in 0..b.nrows() {
            b[(i, j)] *= scale;
        }
    }
    b
}

/// Live state of a coarsening run.
pub struct CoarseningState {
    level: usize,
    complex: SimplicialComplex,
    /// Current vertex row -> smallest original vertex id merged into it.
    labels: Vec<usize>,
    /// Accumulated P_k, original complex to current level.
    accumulated: Vec<CooMatrix>,
    targets: Vec<SpectrumTarget>,
    combination_weights: Vec<f64>,
    /// B^l per target.
    bases: Vec<DMatrix<f64>>,
    /// A^l per target.
    subspaces: Vec<DMatrix<f64>>,
    /// A^{l-1} per target, for refresh scores.
    prev_subspaces: Vec<DMatrix<f64>>,
    /// Single-level maps of the last contraction, per dimension.
    last_level_maps: Vec<CooMatrix>,
    /// Coarse row of the last contraction target.
    last_target: Option<usize>,
    /// Dense symmetric L^l per target (unshifted).
    laplacians: Vec<DMatrix<f64>>,
    /// incidence[k][vertex row] = rows of k-simplices containing the vertex.
    incidence: Vec<Vec<Vec<usize>>>,
    candidates: Vec<CandidateFamily>,
    config: CoarsenConfig,
    rng: ChaCha8Rng,
}

fn build_incidence(complex: &SimplicialComplex) -> Vec<Vec<Vec<usize>>> {
    let mut incidence = Vec::with_capacity(complex.dim() + 1);
    for k in 0..=complex.dim() {
        let mut per_vertex = vec![Vec::new(); complex.num_vertices()];
        for (row, s) in complex.simplices(k).iter().enumerate() {
            for &v in s.vertices() {
                let vr = complex.vertex_row(v).expect("vertex of stored simplex");
                per_vertex[vr].push(row);
            }
        }
        incidence.push(per_vertex);
    }
    incidence
}

impl CoarseningState {
    pub fn new(
        complex: SimplicialComplex,
        targets: Vec<SpectrumTarget>,
        config: CoarsenConfig,
    ) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidConfig("no spectrum targets given".into()));
        }
        config.validate(targets.len())?;
        let combination_weights = config
            .combination_weights
            .clone()
            .unwrap_or_else(|| targets.iter().map(|t| 1.0 / (1.0 + t.k() as f64)).collect());
        let candidates = init_candidates(&complex, config.family_kind)?;
        let labels: Vec<usize> = complex.simplices(0).iter().map(|s| s.vertices()[0]).collect();
        let accumulated: Vec<CooMatrix> =
            (0..=complex.dim()).map(|k| CooMatrix::identity(complex.num_simplices(k))).collect();
        let laplacians = targets
            .iter()
            .map(|t| Ok(target_laplacian(&complex, &t.spec.laplacian)?.to_dense()))
            .collect::<Result<Vec<_>>>()?;
        let subspaces: Vec<DMatrix<f64>> = targets.iter().map(initial_subspace).collect();
        let incidence = build_incidence(&complex);
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(CoarseningState {
            level: 0,
            labels,
            accumulated,
            targets,
            combination_weights,
            bases: subspaces.clone(),
            prev_subspaces: Vec::new(),
            subspaces,
            last_level_maps: Vec::new(),
            last_target: None,
            laplacians,
            incidence,
            candidates,
            complex,
            config,
            rng,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn candidates(&self) -> &[CandidateFamily] {
        &self.candidates
    }

    pub fn accumulated_maps(&self) -> &[CooMatrix] {
        &self.accumulated
    }

    pub fn subspace(&self, q: usize) -> &DMatrix<f64> {
        &self.subspaces[q]
    }

    pub fn combination_weights(&self) -> &[f64] {
        &self.combination_weights
    }

    pub fn targets(&self) -> &[SpectrumTarget] {
        &self.targets
    }

    /// The vertex a family would contract to: the member carrying the
    /// smallest original label.
    pub fn contraction_target(&self, family: &[usize]) -> Result<usize> {
        for &v in family {
            if self.complex.vertex_row(v).is_none() {
                return Err(Error::UnknownVertex(v));
            }
        }
        if family.is_empty() {
            return Err(Error::InvalidConfig("empty family".into()));
        }
        Ok(self.target_of(family))
    }

    /// Family member whose original label is smallest.
    fn target_of(&self, family: &[usize]) -> usize {
        family
            .iter()
            .copied()
            .min_by_key(|&v| self.labels[self.complex.vertex_row(v).expect("family vertex")])
            .expect("nonempty family")
    }

    fn alpha_mode(&self, family: &[usize]) -> bool {
        self.config.optimize_alpha
            && family.len() == 2
            && self.complex.positions().is_some()
            && self.targets.iter().any(|t| t.spec.laplacian.weights == WeightSource::Cotan)
    }

    /// Quality cost of contracting `family`, combining one projection-residual
    /// energy per target. `alpha` only reshapes the merged vertex row.
    pub fn family_cost(&self, family: &[usize], alpha: Option<f64>) -> Result<f64> {
        let target = self.target_of(family);
        let mut total = 0.0;
        for (q, t) in self.targets.iter().enumerate() {
            let c = self.target_cost(family, target, alpha, q, t)?;
            total += self.combination_weights[q] * c;
        }
        Ok(total)
    }

    /// Residual energy of one target: `||(I - P^+P) A||_L` for the tentative
    /// single-contraction projector of dimension `k`, evaluated only on the
    /// simplices the family touches.
    fn target_cost(
        &self,
        family: &[usize],
        target: usize,
        alpha: Option<f64>,
        q: usize,
        t: &SpectrumTarget,
    ) -> Result<f64> {
        let k = t.k();
        if k > self.complex.dim() || self.complex.num_simplices(k) == 0 {
            log::warn!("target dimension {k} absent at level {}; cost contribution 0", self.level);
            return Ok(0.0);
        }
        let a = &self.subspaces[q];
        let lap = &self.laplacians[q];
        let fam_rows: Vec<usize> = family
            .iter()
            .map(|&v| self.complex.vertex_row(v).ok_or(Error::UnknownVertex(v)))
            .collect::<Result<Vec<_>>>()?;

        // Fine k-simplices meeting the family; everything else projects to
        // itself and contributes nothing.
        let mut touched: BTreeSet<usize> = BTreeSet::new();
        for &vr in &fam_rows {
            touched.extend(self.incidence[k][vr].iter().copied());
        }
        if touched.is_empty() {
            return Ok(0.0);
        }
        let touched: Vec<usize> = touched.into_iter().collect();

        let fam_set: BTreeSet<usize> = family.iter().copied().collect();
        let band = a.ncols();
        let use_alpha = k == 0 && family.len() == 2 && alpha.is_some();
        let alpha_val = alpha.unwrap_or(1.0);
        let target_row = self.complex.vertex_row(target).expect("target alive");

        // Group touched simplices by their contraction image.
        let mut groups: BTreeMap<Vec<usize>, Vec<(usize, f64)>> = BTreeMap::new();
        let mut degenerate: Vec<usize> = Vec::new();
        for (local, &row) in touched.iter().enumerate() {
            let vs = self.complex.simplices(k)[row].vertices();
            let substituted: Vec<usize> =
                vs.iter().map(|&v| if fam_set.contains(&v) { target } else { v }).collect();
            let distinct: BTreeSet<usize> = substituted.iter().copied().collect();
            if distinct.len() < substituted.len() {
                degenerate.push(local);
                continue;
            }
            let sign = f64::from(sort_parity_sign(&substituted));
            groups.entry(distinct.into_iter().collect()).or_default().push((local, sign));
        }

        // Residual rows X = (I - P^+P) A on the touched set.
        let mut x = DMatrix::zeros(touched.len(), band);
        for members in groups.values() {
            let m = members.len() as f64;
            let weight = |local: usize| -> f64 {
                if use_alpha {
                    if touched[local] == target_row {
                        alpha_val
                    } else {
                        1.0 - alpha_val
                    }
                } else {
                    1.0 / m
                }
            };
            let denom: f64 = members.iter().map(|&(l, _)| weight(l) * weight(l)).sum();
            let mut y = vec![0.0; band];
            for &(local, sign) in members {
                let row = touched[local];
                let w = sign * weight(local);
                for c in 0..band {
                    y[c] += w * a[(row, c)];
                }
            }
            for &(local, sign) in members {
                let row = touched[local];
                let factor = if denom > 0.0 { sign * weight(local) / denom } else { 0.0 };
                for c in 0..band {
                    x[(local, c)] = a[(row, c)] - factor * y[c];
                }
            }
        }
        for &local in &degenerate {
            let row = touched[local];
            for c in 0..band {
                x[(local, c)] = a[(row, c)];
            }
        }

        // x^T L x restricted to the touched block, plus the identity shift.
        let mut energy = 0.0;
        for (i, &ri) in touched.iter().enumerate() {
            for (j, &rj) in touched.iter().enumerate() {
                let lv = lap[(ri, rj)];
                if lv != 0.0 {
                    let mut dot = 0.0;
                    for c in 0..band {
                        dot += x[(i, c)] * x[(j, c)];
                    }
                    energy += lv * dot;
                }
            }
        }
        if t.spec.harmonic_shift {
            for i in 0..touched.len() {
                for c in 0..band {
                    energy += x[(i, c)] * x[(i, c)];
                }
            }
        }
        Ok(if energy <= 0.0 { 0.0 } else { energy.sqrt() })
    }

    /// Samples the quality function at `alpha in {0, 0.5, 1}` and minimizes
    /// the interpolated quadratic. Only meaningful in mesh mode on edges.
    pub fn optimize_alpha(&self, family: &[usize]) -> Result<(f64, f64)> {
        let c0 = self.family_cost(family, Some(0.0))?;
        let ch = self.family_cost(family, Some(0.5))?;
        let c1 = self.family_cost(family, Some(1.0))?;
        Ok(quadratic_min_unit(c0, ch, c1))
    }

    /// Recomputes the cost of every dirty candidate; returns how many.
    pub fn recompute_dirty_costs(&mut self) -> Result<usize> {
        let mut refreshed = 0;
        for i in 0..self.candidates.len() {
            if !self.candidates[i].dirty {
                continue;
            }
            let vertices = self.candidates[i].vertices.clone();
            let (alpha, cost) = if self.alpha_mode(&vertices) {
                self.optimize_alpha(&vertices)?
            } else {
                (1.0, self.family_cost(&vertices, None)?)
            };
            let cand = &mut self.candidates[i];
            cand.cost = cost;
            cand.alpha = alpha;
            cand.dirty = false;
            refreshed += 1;
        }
        Ok(refreshed)
    }

    /// Drops a candidate, e.g. one whose contraction the operators reject.
    pub fn remove_candidate(&mut self, index: usize) {
        self.candidates.remove(index);
    }

    /// Index of the cheapest candidate, ties to the lexicographically
    /// smallest vertex set.
    pub fn best_candidate(&self) -> Option<usize> {
        (0..self.candidates.len()).min_by(|&a, &b| {
            let ca = &self.candidates[a];
            let cb = &self.candidates[b];
            ca.cost.total_cmp(&cb.cost).then_with(|| ca.vertices.cmp(&cb.vertices))
        })
    }

    /// Contracts the chosen family: rebuilds the complex, composes the
    /// coarsening matrices, updates positions, Laplacians, candidates and the
    /// propagated subspaces.
    pub fn contract_step(&mut self, candidate_index: usize) -> Result<LevelRecord> {
        let chosen = self.candidates[candidate_index].clone();
        let family = chosen.vertices.clone();
        let target = self.target_of(&family);
        let alpha = self.alpha_mode(&family).then_some(chosen.alpha);

        let family_labels: Vec<usize> = {
            let mut l: Vec<usize> = family
                .iter()
                .map(|&v| self.labels[self.complex.vertex_row(v).expect("family vertex")])
                .collect();
            l.sort_unstable();
            l
        };

        let (coarse, cmap) = contract(&self.complex, &family, target)?;
        let p_levels = assemble_contraction_matrices(&self.complex, &family, target, alpha)?;

        let mut coarse = coarse;
        if let Some(pos) = self.complex.positions() {
            let fine = DMatrix::from_fn(pos.len(), 3, |r, c| pos[r][c]);
            let mapped = p_levels[0].mul_dense(&fine)?;
            let new_pos: Vec<[f64; 3]> = (0..mapped.nrows())
                .map(|r| [mapped[(r, 0)], mapped[(r, 1)], mapped[(r, 2)]])
                .collect();
            coarse.set_positions(new_pos)?;
        }

        // Assemble the next level's operators before touching any state, so a
        // failure (a mesh collapsing into non-manifold geometry, say) leaves
        // the run resumable at the current level.
        let laplacians = self
            .targets
            .iter()
            .map(|t| Ok(target_laplacian(&coarse, &t.spec.laplacian)?.to_dense()))
            .collect::<Result<Vec<_>>>()?;

        // Compose accumulated maps; dimensions above the coarse dim shrink to
        // zero-row matrices.
        for (k, acc) in self.accumulated.iter_mut().enumerate() {
            if k < p_levels.len() && p_levels[k].ncols() == acc.nrows() {
                *acc = p_levels[k].multiply(acc)?;
            } else {
                *acc = CooMatrix::zeros(0, acc.ncols());
            }
        }

        let mut labels = vec![usize::MAX; coarse.num_vertices()];
        for (fine_row, &coarse_row) in cmap.vertex_map.iter().enumerate() {
            labels[coarse_row] = labels[coarse_row].min(self.labels[fine_row]);
        }
        let target_coarse = cmap.vertex_map[self.complex.vertex_row(target).expect("target")];

        // Remap candidate families through the vertex map, merging duplicates
        // and dropping singletons plus the contracted family itself.
        let mut remapped: BTreeMap<Vec<usize>, CandidateFamily> = BTreeMap::new();
        for (i, cand) in self.candidates.iter().enumerate() {
            if i == candidate_index {
                continue;
            }
            let mapped: BTreeSet<usize> = cand
                .vertices
                .iter()
                .map(|&v| {
                    coarse.vertex_at_row(
                        cmap.vertex_map[self.complex.vertex_row(v).expect("candidate vertex")],
                    )
                })
                .collect();
            if mapped.len() < 2 {
                continue;
            }
            let key: Vec<usize> = mapped.into_iter().collect();
            remapped.entry(key.clone()).or_insert_with(|| CandidateFamily {
                vertices: key,
                kind: cand.kind,
                cost: cand.cost,
                alpha: cand.alpha,
                dirty: cand.dirty,
            });
        }
        self.candidates = remapped.into_values().collect();

        self.laplacians = laplacians;
        self.incidence = build_incidence(&coarse);
        self.prev_subspaces = std::mem::take(&mut self.subspaces);
        self.last_target = Some(target_coarse);
        self.labels = labels;
        self.complex = coarse;
        self.level += 1;

        let mut bases = Vec::with_capacity(self.targets.len());
        let mut subspaces = Vec::with_capacity(self.targets.len());
        for (q, t) in self.targets.iter().enumerate() {
            let k = t.k();
            let p = if k < p_levels.len() {
                p_levels[k].clone()
            } else {
                CooMatrix::zeros(0, self.bases[q].nrows())
            };
            let (b, a) =
                level_setup_step(&self.bases[q], &p, &self.laplacians[q], t.spec.harmonic_shift)?;
            bases.push(b);
            subspaces.push(a);
        }
        self.bases = bases;
        self.subspaces = subspaces;
        self.last_level_maps = p_levels;

        Ok(LevelRecord {
            level: self.level,
            family: family_labels,
            cost: chosen.cost,
            alpha: chosen.alpha,
            vertices: self.complex.num_vertices(),
            simplices: self.complex.total_simplices(),
            refreshed: 0,
        })
    }

    /// Refresh scores: per-row absolute change of the propagated subspace
    /// against the push-forward of the previous level's.
    fn refresh_scores(&self) -> Vec<f64> {
        let mut row_changes: Vec<Option<Vec<f64>>> = Vec::with_capacity(self.targets.len());
        for (q, t) in self.targets.iter().enumerate() {
            let k = t.k();
            let change = (|| {
                let p = self.last_level_maps.get(k)?;
                let prev = self.prev_subspaces.get(q)?;
                if p.ncols() != prev.nrows() {
                    return None;
                }
                let pushed = p.mul_dense(prev).ok()?;
                let cur = &self.subspaces[q];
                if pushed.shape() != cur.shape() {
                    return None;
                }
                let mut rows = vec![0.0; cur.nrows()];
                for r in 0..cur.nrows() {
                    for c in 0..cur.ncols() {
                        rows[r] += (cur[(r, c)] - pushed[(r, c)]).abs();
                    }
                }
                Some(rows)
            })();
            row_changes.push(change);
        }

        self.candidates
            .iter()
            .map(|cand| {
                let mut score = 0.0;
                for (q, t) in self.targets.iter().enumerate() {
                    let Some(rows) = &row_changes[q] else { continue };
                    let k = t.k();
                    if k == 0 {
                        // Vertex rows propagate to the family as a max.
                        score += cand
                            .vertices
                            .iter()
                            .filter_map(|&v| self.complex.vertex_row(v))
                            .map(|r| rows[r])
                            .fold(0.0f64, f64::max);
                    } else if cand.vertices.len() == k + 1
                        && self.complex.index_of(&cand.vertices).is_some()
                    {
                        let r = self.complex.index_of(&cand.vertices).expect("just checked");
                        score += rows[r];
                    } else if k < self.incidence.len() {
                        score += cand
                            .vertices
                            .iter()
                            .filter_map(|&v| self.complex.vertex_row(v))
                            .flat_map(|vr| self.incidence[k][vr].iter().copied())
                            .map(|r| rows[r])
                            .fold(0.0f64, f64::max);
                    }
                }
                score
            })
            .collect()
    }

    /// Stochastic cost refresh: sample `ceil(eta |Phi|)` candidates without
    /// replacement, weighted by subspace change, always include families
    /// touching the last contraction target, and re-score only those.
    pub fn refresh_costs(&mut self) -> Result<usize> {
        if self.candidates.is_empty() {
            return Ok(0);
        }
        let scores = self.refresh_scores();
        let all_zero = scores.iter().all(|&s| s == 0.0);
        let budget =
            ((self.config.refresh_fraction * self.candidates.len() as f64).ceil() as usize).max(1);

        // Weighted sampling without replacement via exponential keys.
        let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(self.candidates.len());
        for (i, &s) in scores.iter().enumerate() {
            let w = if all_zero { 1.0 } else { s };
            if w > 0.0 {
                let u: f64 = self.rng.random();
                keyed.push((u.powf(1.0 / w), i));
            }
        }
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        for &(_, i) in keyed.iter().take(budget) {
            self.candidates[i].dirty = true;
        }
        if let Some(t) = self.last_target {
            let t_id = self.complex.vertex_at_row(t);
            for cand in &mut self.candidates {
                if cand.vertices.contains(&t_id) {
                    cand.dirty = true;
                }
            }
        }
        self.recompute_dirty_costs()
    }
}

fn count_for(complex: &SimplicialComplex, basis: RatioBasis) -> usize {
    match basis {
        RatioBasis::Vertices => complex.num_vertices(),
        RatioBasis::Simplices => complex.total_simplices(),
    }
}

/// Runs the greedy coarsening loop until the reduction ratio is reached or
/// candidates run out (reported via `ratio_reached`).
pub fn coarsen(
    complex: &SimplicialComplex,
    targets: Vec<SpectrumTarget>,
    config: CoarsenConfig,
) -> Result<CoarsenResult> {
    let basis = config.basis;
    let ratio = config.ratio;
    let mut state = CoarseningState::new(complex.clone(), targets, config)?;
    let original = count_for(&state.complex, basis) as f64;
    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut timings: Vec<LevelTiming> = Vec::new();

    let t0 = Instant::now();
    let refreshed = state.recompute_dirty_costs()?;
    timings.push(LevelTiming {
        level: 0,
        cost_eval_nanos: t0.elapsed().as_nanos(),
        contract_nanos: 0,
        refreshed,
    });

    let mut ratio_reached = true;
    loop {
        let reduction = 1.0 - count_for(&state.complex, basis) as f64 / original;
        if reduction >= ratio {
            break;
        }
        let Some(best) = state.best_candidate() else {
            ratio_reached = false;
            break;
        };
        let tc = Instant::now();
        // A contraction can push a mesh past the operators' validity domain
        // (non-manifold edges, degenerate faces). The step leaves the state
        // untouched in that case; drop the offending family and move on.
        let mut record = match state.contract_step(best) {
            Ok(record) => record,
            Err(e @ (Error::InvalidComplex(_) | Error::DegenerateFace { .. })) => {
                log::warn!(
                    "skipping family {:?} at level {}: {e}",
                    state.candidates()[best].vertices,
                    state.level()
                );
                state.remove_candidate(best);
                continue;
            }
            Err(e) => return Err(e),
        };
        let contract_nanos = tc.elapsed().as_nanos();

        let tr = Instant::now();
        let refreshed = if state.candidates.is_empty() { 0 } else { state.refresh_costs()? };
        record.refreshed = refreshed;
        timings.push(LevelTiming {
            level: record.level,
            cost_eval_nanos: tr.elapsed().as_nanos(),
            contract_nanos,
            refreshed,
        });
        levels.push(record);
    }

    Ok(CoarsenResult {
        complex: state.complex,
        maps: state.accumulated,
        levels,
        timings,
        ratio_reached,
    })
}

/// When the random baseline stops.
#[derive(Debug, Clone, Copy)]
pub enum StopRule {
    Ratio(f64, RatioBasis),
    TotalSimplices(usize),
    Vertices(usize),
}

/// Baseline: contract uniformly random edge families until the stop rule
/// fires. Shares the contraction and matrix machinery with the greedy run.
pub fn random_collapse(
    complex: &SimplicialComplex,
    stop: StopRule,
    seed: u64,
) -> Result<CoarsenResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = complex.clone();
    let mut labels: Vec<usize> = current.simplices(0).iter().map(|s| s.vertices()[0]).collect();
    let mut accumulated: Vec<CooMatrix> =
        (0..=current.dim()).map(|k| CooMatrix::identity(current.num_simplices(k))).collect();
    let mut levels = Vec::new();
    let mut level = 0usize;

    let done = |c: &SimplicialComplex| match stop {
        StopRule::Ratio(rho, basis) => {
            1.0 - count_for(c, basis) as f64 / count_for(complex, basis) as f64 >= rho
        }
        StopRule::TotalSimplices(n) => c.total_simplices() <= n,
        StopRule::Vertices(n) => c.num_vertices() <= n,
    };

    let mut ratio_reached = true;
    while !done(&current) {
        let edges = current.simplices(1);
        if edges.is_empty() {
            ratio_reached = false;
            break;
        }
        let pick = rng.random_range(0..edges.len());
        let family = edges[pick].vertices().to_vec();
        let target = family
            .iter()
            .copied()
            .min_by_key(|&v| labels[current.vertex_row(v).expect("edge vertex")])
            .expect("edge has vertices");
        let family_labels: Vec<usize> = {
            let mut l: Vec<usize> = family
                .iter()
                .map(|&v| labels[current.vertex_row(v).expect("edge vertex")])
                .collect();
            l.sort_unstable();
            l
        };
        let (coarse, cmap) = contract(&current, &family, target)?;
        let p_levels = assemble_contraction_matrices(&current, &family, target, None)?;
        for (k, acc) in accumulated.iter_mut().enumerate() {
            if k < p_levels.len() && p_levels[k].ncols() == acc.nrows() {
                *acc = p_levels[k].multiply(acc)?;
            } else {
                *acc = CooMatrix::zeros(0, acc.ncols());
            }
        }
        let mut coarse = coarse;
        if let Some(pos) = current.positions() {
            let fine = DMatrix::from_fn(pos.len(), 3, |r, c| pos[r][c]);
            let mapped = p_levels[0].mul_dense(&fine)?;
            let new_pos: Vec<[f64; 3]> = (0..mapped.nrows())
                .map(|r| [mapped[(r, 0)], mapped[(r, 1)], mapped[(r, 2)]])
                .collect();
            coarse.set_positions(new_pos)?;
        }
        let mut new_labels = vec![usize::MAX; coarse.num_vertices()];
        for (fine_row, &coarse_row) in cmap.vertex_map.iter().enumerate() {
            new_labels[coarse_row] = new_labels[coarse_row].min(labels[fine_row]);
        }
        labels = new_labels;
        current = coarse;
        level += 1;
        levels.push(LevelRecord {
            level,
            family: family_labels,
            cost: 0.0,
            alpha: 1.0,
            vertices: current.num_vertices(),
            simplices: current.total_simplices(),
            refreshed: 0,
        });
    }

    Ok(CoarsenResult {
        complex: current,
        maps: accumulated,
        levels,
        timings: Vec::new(),
        ratio_reached,
    })
}
