//! Weighted Hodge Laplacian assembly for every dimension of a complex,
//! including the cotan Laplacian as the weighted 0-Hodge special case.

use crate::error::{Error, Result};
use crate::numkernel::CooMatrix;
use crate::simplicial::{boundary_matrix, SimplicialComplex};

/// Floor applied to weights wherever an inverse or square root is taken.
pub const WEIGHT_CLAMP: f64 = 1e-10;

const DEGENERATE_AREA: f64 = 1e-12;

/// Per-dimension positive diagonal simplex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    per_dim: Vec<Vec<f64>>,
}

impl WeightSet {
    pub fn weights(&self, k: usize) -> &[f64] {
        self.per_dim.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn validate(&self, complex: &SimplicialComplex) -> Result<()> {
        for (k, w) in self.per_dim.iter().enumerate() {
            if w.len() != complex.num_simplices(k) {
                return Err(Error::DimensionMismatch(format!(
                    "{} weights for {} simplices of dimension {k}",
                    w.len(),
                    complex.num_simplices(k)
                )));
            }
            if w.iter().any(|&x| x <= 0.0) {
                return Err(Error::InvalidConfig(format!("non-positive weight in W_{k}")));
            }
        }
        Ok(())
    }
}

/// Which flavor of the k-Hodge Laplacian to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianVariant {
    RandomWalk,
    Symmetric,
    Unweighted,
}

/// Unit weight on every simplex.
pub fn unit_weights(complex: &SimplicialComplex) -> WeightSet {
    WeightSet {
        per_dim: (0..=complex.dim())
            .map(|k| vec![1.0; complex.num_simplices(k)])
            .collect(),
    }
}

/// Raw cotan weights of a 2-dimensional mesh: vertex weights are one third of
/// the adjacent face areas, edge weights the half-sum of the cotangents of the
/// opposite angles (one term on boundary edges), face weights the areas.
///
/// Edge entries can be zero or negative on right/obtuse triangles.
pub fn cotan_weights_raw(complex: &SimplicialComplex) -> Result<WeightSet> {
    if complex.dim() != 2 {
        return Err(Error::InvalidComplex(format!(
            "cotan weights need a 2-dimensional complex, got dimension {}",
            complex.dim()
        )));
    }
    let positions = complex
        .positions()
        .ok_or_else(|| Error::InvalidComplex("cotan weights need vertex positions".into()))?;

    let mut w0 = vec![0.0; complex.num_simplices(0)];
    let mut w1 = vec![0.0; complex.num_simplices(1)];
    let mut w2 = vec![0.0; complex.num_simplices(2)];
    let mut faces_per_edge = vec![0usize; complex.num_simplices(1)];

    for (f, s) in complex.simplices(2).iter().enumerate() {
        let vs = s.vertices();
        let rows = [
            complex.vertex_row(vs[0]).expect("face vertex"),
            complex.vertex_row(vs[1]).expect("face vertex"),
            complex.vertex_row(vs[2]).expect("face vertex"),
        ];
        let p = [positions[rows[0]], positions[rows[1]], positions[rows[2]]];
        let area = triangle_area(&p);
        if area < DEGENERATE_AREA {
            return Err(Error::DegenerateFace { face: vs.to_vec(), area });
        }
        w2[f] = area;
        for &r in &rows {
            w0[r] += area / 3.0;
        }
        // Corner i is opposite the edge joining the other two vertices.
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let mut edge = [vs[j], vs[k]];
            edge.sort_unstable();
            let e = complex.index_of(&edge).expect("face-closed complex");
            w1[e] += 0.5 * cotangent(p[i], p[j], p[k]);
            faces_per_edge[e] += 1;
        }
    }
    if let Some(e) = faces_per_edge.iter().position(|&n| n > 2) {
        return Err(Error::InvalidComplex(format!(
            "edge {:?} bounded by more than two faces",
            complex.simplices(1)[e].vertices()
        )));
    }

    Ok(WeightSet { per_dim: vec![w0, w1, w2] })
}

/// Cotan weights with every entry clamped to at least [`WEIGHT_CLAMP`], so the
/// set is usable wherever `W^{-1}` or `W^{1/2}` is required.
pub fn cotan_weights(complex: &SimplicialComplex) -> Result<WeightSet> {
    let mut w = cotan_weights_raw(complex)?;
    for dim in &mut w.per_dim {
        for x in dim.iter_mut() {
            *x = x.max(WEIGHT_CLAMP);
        }
    }
    Ok(w)
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn triangle_area(p: &[[f64; 3]; 3]) -> f64 {
    0.5 * norm(cross(sub(p[1], p[0]), sub(p[2], p[0])))
}

/// Cotangent of the angle at `apex` between rays toward `b` and `c`.
fn cotangent(apex: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let u = sub(b, apex);
    let v = sub(c, apex);
    dot(u, v) / norm(cross(u, v))
}

fn clamped_inv(w: &[f64]) -> Vec<f64> {
    w.iter().map(|&x| 1.0 / x.max(WEIGHT_CLAMP)).collect()
}

/// Assembles the k-Hodge Laplacian of `complex` in the requested variant.
///
/// The random-walk form is
/// `d_k^T W_{k-1}^{-1} d_k W_k + W_k^{-1} d_{k+1} W_{k+1} d_{k+1}^T`,
/// with the down term absent at `k = 0` and the up term absent at the top
/// dimension. The symmetric variant conjugates by `W_k^{1/2}` on the left and
/// `W_k^{-1/2}` on the right, which preserves the random-walk spectrum.
pub fn hodge_laplacian(
    complex: &SimplicialComplex,
    weights: &WeightSet,
    k: usize,
    variant: LaplacianVariant,
) -> Result<CooMatrix> {
    if k > complex.dim() {
        return Err(Error::DimensionOutOfRange { k, dim: complex.dim() });
    }
    if variant != LaplacianVariant::Unweighted {
        weights.validate(complex)?;
    }
    let n = complex.num_simplices(k);
    let mut lap = CooMatrix::zeros(n, n);

    if k >= 1 {
        let d = boundary_matrix(complex, k)?;
        let dt = d.transpose();
        let down = match variant {
            LaplacianVariant::Unweighted => dt.multiply(&d)?,
            _ => dt
                .scale_cols(&clamped_inv(weights.weights(k - 1)))
                .multiply(&d)?
                .scale_cols(weights.weights(k)),
        };
        lap = lap.add(&down)?;
    }
    if k < complex.dim() && complex.num_simplices(k + 1) > 0 {
        let d = boundary_matrix(complex, k + 1)?;
        let dt = d.transpose();
        let up = match variant {
            LaplacianVariant::Unweighted => d.multiply(&dt)?,
            _ => d
                .scale_cols(weights.weights(k + 1))
                .multiply(&dt)?
                .scale_rows(&clamped_inv(weights.weights(k))),
        };
        lap = lap.add(&up)?;
    }

    if variant == LaplacianVariant::Symmetric {
        let sqrt_w: Vec<f64> = weights.weights(k).iter().map(|&x| x.max(WEIGHT_CLAMP).sqrt()).collect();
        let inv_sqrt: Vec<f64> = sqrt_w.iter().map(|&x| 1.0 / x).collect();
        lap = lap.scale_rows(&sqrt_w).scale_cols(&inv_sqrt);
    }
    Ok(lap)
}

/// Cotan stiffness matrix `d_1 W_1 d_1^T` (raw cotan edge weights, zero row
/// sums) together with the diagonal area mass `W_0`.
pub fn cotan_laplacian(complex: &SimplicialComplex) -> Result<(CooMatrix, Vec<f64>)> {
    let raw = cotan_weights_raw(complex)?;
    let d1 = boundary_matrix(complex, 1)?;
    let stiffness = d1.clone().scale_cols(raw.weights(1)).multiply(&d1.transpose())?;
    Ok((stiffness, raw.weights(0).to_vec()))
}

/// Mass-normalized cotan system `M^{-1/2} S M^{-1/2}`: symmetric, PSD, and
/// the operator whose orthonormal eigenvectors drive cotan targets.
pub fn cotan_symmetric(complex: &SimplicialComplex) -> Result<CooMatrix> {
    let (stiffness, mass) = cotan_laplacian(complex)?;
    let inv_sqrt: Vec<f64> = mass.iter().map(|&m| 1.0 / m.max(WEIGHT_CLAMP).sqrt()).collect();
    Ok(stiffness.scale_rows(&inv_sqrt).scale_cols(&inv_sqrt))
}
