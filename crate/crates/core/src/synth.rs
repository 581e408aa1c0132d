//! Deterministic generators for the synthetic evaluation data: point clouds
//! on multi-holed planar domains, their Rips/flag complexes, and a small
//! parametric torus mesh.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::simplicial::{betti_numbers_gf2, build_complex, flag_complex, SimplicialComplex};

/// Knobs of the synthetic dataset generator.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthSpec {
    pub n_points: usize,
    pub n_holes: usize,
    /// Rectangle width and height.
    pub domain: (f64, f64),
    /// Hole radii are drawn uniformly from this range.
    pub hole_radius: (f64, f64),
    pub rips_radius: f64,
    pub max_dim: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        // Tuned so complexes land in the 200-800 simplex range with
        // non-trivial first homology most of the time.
        SynthSpec {
            n_points: 70,
            n_holes: 2,
            domain: (1.0, 1.0),
            hole_radius: (0.16, 0.22),
            rips_radius: 0.18,
            max_dim: 2,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(Error::InvalidConfig("need at least one point".into()));
        }
        if self.rips_radius <= 0.0 {
            return Err(Error::InvalidConfig("rips radius must be positive".into()));
        }
        if self.hole_radius.0 > self.hole_radius.1 || self.hole_radius.0 < 0.0 {
            return Err(Error::InvalidConfig("bad hole radius range".into()));
        }
        if self.domain.0 <= 0.0 || self.domain.1 <= 0.0 {
            return Err(Error::InvalidConfig("domain must have positive extent".into()));
        }
        if self.max_dim < 1 {
            return Err(Error::InvalidConfig("max_dim must be at least 1".into()));
        }
        Ok(())
    }
}

/// Circular holes punched out of the rectangle.
#[derive(Debug, Clone, Copy)]
pub struct Hole {
    pub center: [f64; 2],
    pub radius: f64,
}

fn place_holes(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<Hole> {
    let (w, h) = spec.domain;
    let mut holes: Vec<Hole> = Vec::with_capacity(spec.n_holes);
    for _ in 0..spec.n_holes {
        let radius = rng.random_range(spec.hole_radius.0..=spec.hole_radius.1);
        let mut best = None;
        // Prefer holes that stay inside the domain and apart from each other;
        // fall back to the last draw if the domain is too crowded.
        for _ in 0..1000 {
            let cx =
                if 2.0 * radius >= w { w / 2.0 } else { rng.random_range(radius..(w - radius)) };
            let cy =
                if 2.0 * radius >= h { h / 2.0 } else { rng.random_range(radius..(h - radius)) };
            let candidate = Hole { center: [cx, cy], radius };
            let separated = holes.iter().all(|other| {
                let dx = other.center[0] - cx;
                let dy = other.center[1] - cy;
                (dx * dx + dy * dy).sqrt() > other.radius + radius + spec.rips_radius
            });
            best = Some(candidate);
            if separated {
                break;
            }
        }
        holes.push(best.expect("at least one draw"));
    }
    holes
}

/// Rejection-samples `n_points` uniform points in the rectangle minus the
/// holes. Deterministic given the spec's seed.
pub fn sample_points(spec: &SynthSpec) -> Result<Vec<[f64; 2]>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let holes = place_holes(spec, &mut rng);
    let (w, h) = spec.domain;
    let mut points = Vec::with_capacity(spec.n_points);
    let max_attempts = 1000 * spec.n_points.max(10);
    let mut attempts = 0usize;
    while points.len() < spec.n_points {
        if attempts >= max_attempts {
            return Err(Error::SamplingExhausted);
        }
        attempts += 1;
        let p = [rng.random_range(0.0..w), rng.random_range(0.0..h)];
        let inside_hole = holes.iter().any(|hole| {
            let dx = p[0] - hole.center[0];
            let dy = p[1] - hole.center[1];
            (dx * dx + dy * dy).sqrt() < hole.radius
        });
        if !inside_hole {
            points.push(p);
        }
    }
    Ok(points)
}

/// Vietoris-Rips complex of a planar point cloud: edges join points within
/// `radius`, higher simplices are the cliques up to `max_dim`. Every point
/// appears as a vertex, connected or not. Positions are embedded with z = 0.
pub fn rips_complex(
    points: &[[f64; 2]],
    radius: f64,
    max_dim: usize,
) -> Result<SimplicialComplex> {
    if radius <= 0.0 {
        return Err(Error::InvalidConfig("rips radius must be positive".into()));
    }
    let mut edges = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let dx = points[i][0] - points[j][0];
            let dy = points[i][1] - points[j][1];
            if (dx * dx + dy * dy).sqrt() <= radius {
                edges.push((i, j));
            }
        }
    }
    let mut maximal: Vec<Vec<usize>> = if edges.is_empty() {
        Vec::new()
    } else {
        flag_complex(&edges, max_dim)?.maximal_simplices()
    };
    let mut in_edge = vec![false; points.len()];
    for &(a, b) in &edges {
        in_edge[a] = true;
        in_edge[b] = true;
    }
    for (i, covered) in in_edge.iter().enumerate() {
        if !covered {
            maximal.push(vec![i]);
        }
    }
    let mut complex = build_complex(&maximal)?;
    complex.set_positions(points.iter().map(|p| [p[0], p[1], 0.0]).collect())?;
    Ok(complex)
}

/// One generated complex with its recorded homology.
#[derive(Debug, Clone)]
pub struct DatasetEntry {
    pub spec: SynthSpec,
    pub complex: SimplicialComplex,
    pub betti: Vec<usize>,
}

/// Generates `n_complexes` seeded variations of the template spec.
pub fn generate_dataset(
    n_complexes: usize,
    template: &SynthSpec,
    seed: u64,
) -> Result<Vec<DatasetEntry>> {
    let mut out = Vec::with_capacity(n_complexes);
    for i in 0..n_complexes {
        let mut spec = template.clone();
        spec.seed = seed.wrapping_add(i as u64);
        let points = sample_points(&spec)?;
        let complex = rips_complex(&points, spec.rips_radius, spec.max_dim)?;
        complex.validate()?;
        let betti = betti_numbers_gf2(&complex);
        out.push(DatasetEntry { spec, complex, betti });
    }
    Ok(out)
}

/// Triangulated torus with `nu * nv` vertices, major radius `major` and tube
/// radius `minor`.
pub fn torus_mesh(nu: usize, nv: usize, major: f64, minor: f64) -> Result<SimplicialComplex> {
    if nu < 3 || nv < 3 {
        return Err(Error::InvalidConfig("torus grid needs at least 3x3 vertices".into()));
    }
    let idx = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            faces.push(vec![idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
            faces.push(vec![idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    let mut complex = build_complex(&faces)?;
    let tau = std::f64::consts::TAU;
    let mut positions = vec![[0.0; 3]; nu * nv];
    for i in 0..nu {
        for j in 0..nv {
            let theta = tau * i as f64 / nu as f64;
            let phi = tau * j as f64 / nv as f64;
            positions[idx(i, j)] = [
                (major + minor * phi.cos()) * theta.cos(),
                (major + minor * phi.cos()) * theta.sin(),
                minor * phi.sin(),
            ];
        }
    }
    complex.set_positions(positions)?;
    Ok(complex)
}
