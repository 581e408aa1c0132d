//! Simplicial complexes: face-closed simplex sets with canonical vertex
//! ordering, signed boundary operators, flag-complex construction,
//! combinatorial contraction and an exact GF(2) homology oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::numkernel::CooMatrix;

/// A single simplex, stored as a strictly increasing list of vertex ids.
///
/// The global vertex order fixes the orientation of every simplex, so the
/// sorted list is the canonical representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    /// Canonicalizes (sorts) the vertex list; repeated vertices are rejected.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidSimplex("empty vertex list".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSimplex(format!("repeated vertex in {vertices:?}")));
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// The `(dim-1)`-faces obtained by deleting one vertex at a time.
    pub fn faces(&self) -> Vec<Simplex> {
        if self.dim() == 0 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|i| {
                let mut vs = self.vertices.clone();
                vs.remove(i);
                Simplex { vertices: vs }
            })
            .collect()
    }
}

/// Face-closed simplicial complex with per-dimension sorted simplex arrays,
/// index maps and optional 3-D vertex positions aligned with `K_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    dims: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    positions: Option<Vec<[f64; 3]>>,
}

impl SimplicialComplex {
    fn from_simplex_set(set: BTreeSet<Simplex>) -> Self {
        let max_dim = set.iter().map(Simplex::dim).max().unwrap_or(0);
        let mut dims: Vec<Vec<Simplex>> = vec![Vec::new(); max_dim + 1];
        for s in set {
            dims[s.dim()].push(s);
        }
        for d in &mut dims {
            d.sort();
        }
        let index = dims
            .iter()
            .map(|d| {
                d.iter()
                    .enumerate()
                    .map(|(i, s)| (s.vertices().to_vec(), i))
                    .collect::<HashMap<_, _>>()
            })
            .collect();
        SimplicialComplex { dims, index, positions: None }
    }

    /// Maximal dimension of the stored simplices.
    pub fn dim(&self) -> usize {
        self.dims.len() - 1
    }

    /// The sorted `k`-simplex array; empty above `dim`.
    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.dims.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn num_simplices(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_simplices(0)
    }

    pub fn total_simplices(&self) -> usize {
        self.dims.iter().map(Vec::len).sum()
    }

    /// Row index of a simplex inside its dimension's array.
    pub fn index_of(&self, vertices: &[usize]) -> Option<usize> {
        let k = vertices.len() - 1;
        self.index.get(k).and_then(|m| m.get(vertices)).copied()
    }

    /// Vertex id sitting at row `row` of `K_0`.
    pub fn vertex_at_row(&self, row: usize) -> usize {
        self.dims[0][row].vertices()[0]
    }

    /// Row of vertex id `v` in `K_0`.
    pub fn vertex_row(&self, v: usize) -> Option<usize> {
        self.index_of(&[v])
    }

    pub fn positions(&self) -> Option<&[[f64; 3]]> {
        self.positions.as_deref()
    }

    pub fn set_positions(&mut self, positions: Vec<[f64; 3]>) -> Result<()> {
        if positions.len() != self.num_vertices() {
            return Err(Error::DimensionMismatch(format!(
                "{} positions for {} vertices",
                positions.len(),
                self.num_vertices()
            )));
        }
        self.positions = Some(positions);
        Ok(())
    }

    /// Simplices not contained in any other stored simplex.
    pub fn maximal_simplices(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for k in 0..=self.dim() {
            for s in self.simplices(k) {
                let covered = self.simplices(k + 1).iter().any(|t| {
                    s.vertices().iter().all(|v| t.contains(*v))
                });
                if !covered {
                    out.push(s.vertices().to_vec());
                }
            }
        }
        out.sort();
        out
    }

    /// Checks face closure, sortedness and index consistency.
    pub fn validate(&self) -> Result<()> {
        for (k, arr) in self.dims.iter().enumerate() {
            if !arr.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidComplex(format!("dimension {k} not sorted/unique")));
            }
            for (i, s) in arr.iter().enumerate() {
                if self.index_of(s.vertices()) != Some(i) {
                    return Err(Error::InvalidComplex(format!("index map broken at {s:?}")));
                }
                for f in s.faces() {
                    if self.index_of(f.vertices()).is_none() {
                        return Err(Error::InvalidComplex(format!(
                            "missing face {:?} of {:?}",
                            f.vertices(),
                            s.vertices()
                        )));
                    }
                }
            }
        }
        if let Some(p) = &self.positions {
            if p.len() != self.num_vertices() {
                return Err(Error::InvalidComplex("positions length mismatch".into()));
            }
        }
        Ok(())
    }
}

/// Builds the face closure of a set of maximal simplices.
pub fn build_complex(maximal_simplices: &[Vec<usize>]) -> Result<SimplicialComplex> {
    if maximal_simplices.is_empty() {
        return Err(Error::InvalidComplex("no maximal simplices given".into()));
    }
    let mut set = BTreeSet::new();
    for vs in maximal_simplices {
        let s = Simplex::new(vs.clone())?;
        let verts = s.vertices().to_vec();
        let n = verts.len();
        // All non-empty subsets; maximal simplices stay small at desk scale.
        for mask in 1u64..(1u64 << n) {
            let sub: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
            set.insert(Simplex { vertices: sub });
        }
    }
    Ok(SimplicialComplex::from_simplex_set(set))
}

/// Builds the flag (clique) complex of a graph up to `max_dim`.
pub fn flag_complex(edges: &[(usize, usize)], max_dim: usize) -> Result<SimplicialComplex> {
    if max_dim < 1 {
        return Err(Error::InvalidConfig("flag complex needs max_dim >= 1".into()));
    }
    let mut adjacency: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        if a == b {
            return Err(Error::InvalidComplex(format!("self-loop edge ({a},{a})")));
        }
        adjacency.entry(a).or_default().insert(b);
        adjacency.entry(b).or_default().insert(a);
    }
    if adjacency.is_empty() {
        return Err(Error::InvalidComplex("no edges given".into()));
    }
    let mut set: BTreeSet<Simplex> = BTreeSet::new();
    // Grow cliques one vertex at a time, always extending past the largest member.
    let mut current: Vec<Vec<usize>> = adjacency.keys().map(|&v| vec![v]).collect();
    for clique in &current {
        set.insert(Simplex { vertices: clique.clone() });
    }
    for _size in 2..=(max_dim + 1) {
        let mut next = Vec::new();
        for clique in &current {
            let last = *clique.last().expect("cliques are nonempty");
            for &v in adjacency[&last].range((last + 1)..) {
                if clique.iter().all(|&u| adjacency[&u].contains(&v)) {
                    let mut bigger = clique.clone();
                    bigger.push(v);
                    set.insert(Simplex { vertices: bigger.clone() });
                    next.push(bigger);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        current = next;
    }
    Ok(SimplicialComplex::from_simplex_set(set))
}

/// Signed boundary matrix from `k`-simplices to `(k-1)`-simplices: the column
/// of a simplex holds `(-1)^i` at the row of the face missing its `i`-th
/// vertex.
pub fn boundary_matrix(complex: &SimplicialComplex, k: usize) -> Result<CooMatrix> {
    if k < 1 || k > complex.dim() {
        return Err(Error::DimensionOutOfRange { k, dim: complex.dim() });
    }
    let mut entries = Vec::new();
    for (col, s) in complex.simplices(k).iter().enumerate() {
        for (i, _) in s.vertices().iter().enumerate() {
            let mut face = s.vertices().to_vec();
            face.remove(i);
            let row = complex
                .index_of(&face)
                .ok_or_else(|| Error::InvalidComplex(format!("missing face {face:?}")))?;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            entries.push((row, col, sign));
        }
    }
    CooMatrix::from_triplets(complex.num_simplices(k - 1), complex.num_simplices(k), entries)
}

/// GF(2) rank of a boundary matrix by column elimination on bitsets.
fn rank_gf2(complex: &SimplicialComplex, k: usize) -> usize {
    if k < 1 || k > complex.dim() {
        return 0;
    }
    let rows = complex.num_simplices(k - 1);
    let words = rows.div_ceil(64);
    // pivots[row] = reduced column with its highest set bit at `row`.
    let mut pivots: Vec<Option<Vec<u64>>> = vec![None; rows];
    let mut rank = 0;
    for s in complex.simplices(k) {
        let mut col = vec![0u64; words];
        for (i, _) in s.vertices().iter().enumerate() {
            let mut face = s.vertices().to_vec();
            face.remove(i);
            let row = complex.index_of(&face).expect("face-closed complex");
            col[row / 64] ^= 1u64 << (row % 64);
        }
        while let Some(high) = highest_bit(&col) {
            match &pivots[high] {
                Some(p) => {
                    for (w, pw) in col.iter_mut().zip(p) {
                        *w ^= pw;
                    }
                }
                None => {
                    pivots[high] = Some(col);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn highest_bit(words: &[u64]) -> Option<usize> {
    for (i, &w) in words.iter().enumerate().rev() {
        if w != 0 {
            return Some(i * 64 + 63 - w.leading_zeros() as usize);
        }
    }
    None
}

/// Betti numbers over GF(2): `beta_k = |K_k| - rank(d_k) - rank(d_{k+1})`.
pub fn betti_numbers_gf2(complex: &SimplicialComplex) -> Vec<usize> {
    (0..=complex.dim())
        .map(|k| complex.num_simplices(k) - rank_gf2(complex, k) - rank_gf2(complex, k + 1))
        .collect()
}

/// How each fine simplex fares under a contraction: its coarse row and
/// orientation sign, or nothing when the image is degenerate.
#[derive(Debug, Clone)]
pub struct ContractionMap {
    /// Fine vertex row -> coarse vertex row. Vertices never degenerate.
    pub vertex_map: Vec<usize>,
    /// Per fine dimension `k`: fine row -> `Some((coarse row, sign))` or
    /// `None` when the image drops dimension.
    pub simplex_maps: Vec<Vec<Option<(usize, i8)>>>,
}

/// Parity sign of the permutation that sorts `list` (distinct entries).
pub(crate) fn sort_parity_sign(list: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..list.len() {
        for j in (i + 1)..list.len() {
            if list[i] > list[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Contracts the vertex family `family` to the member `target`, producing the
/// coarse complex (vertices re-indexed densely) and the simplex mapping.
pub fn contract(
    complex: &SimplicialComplex,
    family: &[usize],
    target: usize,
) -> Result<(SimplicialComplex, ContractionMap)> {
    let fam: BTreeSet<usize> = family.iter().copied().collect();
    if fam.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "contraction family needs >= 2 distinct vertices, got {fam:?}"
        )));
    }
    if !fam.contains(&target) {
        return Err(Error::InvalidConfig(format!("target {target} not in family {fam:?}")));
    }
    for &v in &fam {
        if complex.vertex_row(v).is_none() {
            return Err(Error::UnknownVertex(v));
        }
    }

    let map_id = |v: usize| if fam.contains(&v) { target } else { v };

    // Dense re-indexing of surviving vertex ids.
    let surviving: Vec<usize> = complex
        .simplices(0)
        .iter()
        .map(|s| s.vertices()[0])
        .filter(|v| !fam.contains(v) || *v == target)
        .collect();
    let dense: HashMap<usize, usize> = surviving.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Images per dimension, in old ids plus their signs.
    type DimImages = Vec<Option<(Vec<usize>, i8)>>;
    let mut images: Vec<DimImages> = Vec::with_capacity(complex.dim() + 1);
    let mut coarse_set: BTreeSet<Simplex> = BTreeSet::new();
    for k in 0..=complex.dim() {
        let mut dim_images = Vec::with_capacity(complex.num_simplices(k));
        for s in complex.simplices(k) {
            let substituted: Vec<usize> = s.vertices().iter().map(|&v| map_id(v)).collect();
            let distinct: BTreeSet<usize> = substituted.iter().copied().collect();
            if distinct.len() < substituted.len() {
                dim_images.push(None);
                continue;
            }
            let sign = sort_parity_sign(&substituted);
            let image: Vec<usize> = distinct.iter().map(|&v| dense[&v]).collect();
            coarse_set.insert(Simplex { vertices: image.clone() });
            dim_images.push(Some((image, sign)));
        }
        images.push(dim_images);
    }

    let coarse = SimplicialComplex::from_simplex_set(coarse_set);
    debug_assert!(coarse.validate().is_ok());

    let mut simplex_maps = Vec::with_capacity(images.len());
    for dim_images in &images {
        let rows: Vec<Option<(usize, i8)>> = dim_images
            .iter()
            .map(|img| {
                img.as_ref().map(|(vs, sign)| {
                    (coarse.index_of(vs).expect("image present in coarse complex"), *sign)
                })
            })
            .collect();
        simplex_maps.push(rows);
    }
    let vertex_map: Vec<usize> = simplex_maps[0]
        .iter()
        .map(|m| m.expect("vertices never degenerate").0)
        .collect();

    Ok((coarse, ContractionMap { vertex_map, simplex_maps }))
}

/// The closed star of a vertex: every simplex containing it plus all faces.
pub fn closed_star(complex: &SimplicialComplex, v: usize) -> Result<Vec<Simplex>> {
    if complex.vertex_row(v).is_none() {
        return Err(Error::UnknownVertex(v));
    }
    let mut set = BTreeSet::new();
    for k in 0..=complex.dim() {
        for s in complex.simplices(k) {
            if s.contains(v) {
                let verts = s.vertices().to_vec();
                let n = verts.len();
                for mask in 1u64..(1u64 << n) {
                    let sub: Vec<usize> =
                        (0..n).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
                    set.insert(Simplex { vertices: sub });
                }
            }
        }
    }
    let mut out: Vec<Simplex> = set.into_iter().collect();
    out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Vertex ids of the closed star of `v` (the vertex plus its graph neighbors).
pub fn closed_star_vertices(complex: &SimplicialComplex, v: usize) -> Result<Vec<usize>> {
    let star = closed_star(complex, v)?;
    let mut ids = BTreeSet::new();
    for s in &star {
        ids.extend(s.vertices().iter().copied());
    }
    Ok(ids.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_filled_triangle() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(k.num_simplices(0), 3);
        assert_eq!(k.num_simplices(1), 3);
        assert_eq!(k.num_simplices(2), 1);
        k.validate().unwrap();
    }

    #[test]
    fn build_hollow_triangle() {
        let k = build_complex(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(k.num_simplices(0), 3);
        assert_eq!(k.num_simplices(1), 3);
        assert_eq!(k.dim(), 1);
    }

    #[test]
    fn build_canonicalizes_vertex_order() {
        let a = build_complex(&[vec![2, 1, 0]]).unwrap();
        let b = build_complex(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(build_complex(&[]).is_err());
        assert!(build_complex(&[vec![0, 0, 1]]).is_err());
    }

    #[test]
    fn canonicalization_idempotent() {
        let k = build_complex(&[vec![0, 1, 2], vec![2, 3], vec![5]]).unwrap();
        let again = build_complex(&k.maximal_simplices()).unwrap();
        assert_eq!(k, again);
    }

    #[test]
    fn boundary_filled_triangle() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        let d2 = boundary_matrix(&k, 2).unwrap();
        // Edge rows sort as e01, e02, e12; deleting vertex i of [0,1,2] gives
        // e12 (+), e02 (-), e01 (+).
        let dense = d2.to_dense();
        assert_eq!(dense[(0, 0)], 1.0);
        assert_eq!(dense[(1, 0)], -1.0);
        assert_eq!(dense[(2, 0)], 1.0);
        assert_eq!(d2.nnz(), 3);
    }

    #[test]
    fn boundary_path_graph() {
        let k = build_complex(&[vec![0, 1], vec![1, 2]]).unwrap();
        let d1 = boundary_matrix(&k, 1).unwrap().to_dense();
        // Columns e01, e12 over vertex rows 0,1,2.
        assert_eq!(d1.column(0).as_slice(), &[-1.0, 1.0, 0.0]);
        assert_eq!(d1.column(1).as_slice(), &[0.0, -1.0, 1.0]);
    }

    #[test]
    fn boundary_composition_vanishes() {
        let k = build_complex(&[vec![0, 1, 2, 3], vec![2, 3, 4]]).unwrap();
        for kk in 1..k.dim() {
            let a = boundary_matrix(&k, kk).unwrap();
            let b = boundary_matrix(&k, kk + 1).unwrap();
            let prod = a.multiply(&b).unwrap();
            assert_eq!(prod.nnz(), 0, "d_{kk} d_{} != 0", kk + 1);
        }
    }

    #[test]
    fn flag_complex_cases() {
        let filled = flag_complex(&[(0, 1), (1, 2), (0, 2)], 2).unwrap();
        assert_eq!(filled.num_simplices(2), 1);

        let path = flag_complex(&[(0, 1), (1, 2)], 2).unwrap();
        assert_eq!(path.dim(), 1);

        let k4_edges: Vec<(usize, usize)> =
            (0..4).flat_map(|a| ((a + 1)..4).map(move |b| (a, b))).collect();
        let k4 = flag_complex(&k4_edges, 2).unwrap();
        assert_eq!(k4.num_simplices(2), 4);
        assert_eq!(k4.dim(), 2);

        assert!(flag_complex(&[(1, 1)], 2).is_err());
    }

    #[test]
    fn betti_cases() {
        let hollow = build_complex(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(betti_numbers_gf2(&hollow), vec![1, 1]);

        let filled = build_complex(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(betti_numbers_gf2(&filled), vec![1, 0, 0]);

        let two = build_complex(&[
            vec![0, 1],
            vec![1, 2],
            vec![0, 2],
            vec![3, 4],
            vec![4, 5],
            vec![3, 5],
        ])
        .unwrap();
        assert_eq!(betti_numbers_gf2(&two), vec![2, 2]);

        // Boundary of a tetrahedron is a 2-sphere.
        let sphere =
            build_complex(&[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]).unwrap();
        assert_eq!(betti_numbers_gf2(&sphere), vec![1, 0, 1]);
    }

    #[test]
    fn contract_path_tail() {
        let k = build_complex(&[vec![0, 1], vec![1, 2]]).unwrap();
        let (coarse, map) = contract(&k, &[1, 2], 1).unwrap();
        assert_eq!(coarse.num_vertices(), 2);
        assert_eq!(coarse.num_simplices(1), 1);
        // e01 -> coarse edge with sign +1, e12 degenerate.
        assert_eq!(map.simplex_maps[1][0], Some((0, 1)));
        assert_eq!(map.simplex_maps[1][1], None);
    }

    #[test]
    fn contract_hollow_triangle_kills_loop() {
        let k = build_complex(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(betti_numbers_gf2(&k)[1], 1);
        let (coarse, map) = contract(&k, &[1, 2], 1).unwrap();
        assert_eq!(coarse.num_simplices(1), 1);
        assert_eq!(map.simplex_maps[1][0], Some((0, 1))); // e01 -> (0,1)
        assert_eq!(map.simplex_maps[1][1], Some((0, 1))); // e02 -> (0,1)
        assert_eq!(map.simplex_maps[1][2], None); // e12 degenerate
        assert_eq!(betti_numbers_gf2(&coarse), vec![1, 0]);
    }

    #[test]
    fn contract_far_from_family_is_identity() {
        let k = build_complex(&[vec![0, 1], vec![2, 3, 4]]).unwrap();
        let (coarse, map) = contract(&k, &[0, 1], 0).unwrap();
        let tri = coarse.index_of(&[1, 2, 3]).unwrap(); // ids shift down by one
        assert_eq!(map.simplex_maps[2][0], Some((tri, 1)));
        for (row, m) in map.simplex_maps[1].iter().enumerate() {
            let s = k.simplices(1)[row].vertices().to_vec();
            if s == vec![0, 1] {
                assert_eq!(*m, None);
            } else {
                assert_eq!(m.unwrap().1, 1);
            }
        }
    }

    #[test]
    fn contract_sign_is_sort_parity() {
        // Edge [1,3] with 3 -> 0 substitutes to [1,0]: one inversion, sign -1.
        let k = build_complex(&[vec![1, 3], vec![0]]).unwrap();
        let (_, map) = contract(&k, &[0, 3], 0).unwrap();
        let row = k.index_of(&[1, 3]).unwrap();
        assert_eq!(map.simplex_maps[1][row].unwrap().1, -1);
    }

    #[test]
    fn contract_rejects_target_outside_family() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        assert!(contract(&k, &[1, 2], 0).is_err());
    }

    #[test]
    fn chain_map_commutes_with_boundary() {
        // The signed, unnormalized mapping matrices M_k (degenerate -> 0)
        // must satisfy M_{k-1} d_k = d^c_k M_k.
        let k = build_complex(&[vec![0, 1, 2, 3], vec![1, 2, 4], vec![3, 4]]).unwrap();
        let (coarse, map) = contract(&k, &[1, 3], 1).unwrap();
        for kk in 1..=k.dim() {
            let m_prev = mapping_matrix(&coarse, &map, kk - 1);
            let m_k = mapping_matrix(&coarse, &map, kk);
            let d_fine = boundary_matrix(&k, kk).unwrap();
            let lhs = m_prev.multiply(&d_fine).unwrap().to_dense();
            let rhs = if kk <= coarse.dim() && coarse.num_simplices(kk) > 0 {
                boundary_matrix(&coarse, kk).unwrap().multiply(&m_k).unwrap().to_dense()
            } else {
                nalgebra::DMatrix::zeros(lhs.nrows(), lhs.ncols())
            };
            assert_eq!(lhs, rhs, "chain map fails at k={kk}");
        }
    }

    fn mapping_matrix(
        coarse: &SimplicialComplex,
        map: &ContractionMap,
        k: usize,
    ) -> CooMatrix {
        let fine_count = map.simplex_maps.get(k).map(Vec::len).unwrap_or(0);
        let coarse_count = coarse.num_simplices(k);
        let entries = map.simplex_maps[k]
            .iter()
            .enumerate()
            .filter_map(|(j, m)| m.map(|(r, s)| (r, j, s as f64)))
            .collect();
        CooMatrix::from_triplets(coarse_count, fine_count, entries).unwrap()
    }

    #[test]
    fn closed_star_cases() {
        let filled = build_complex(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(closed_star(&filled, 0).unwrap().len(), filled.total_simplices());

        let path = build_complex(&[vec![0, 1], vec![1, 2]]).unwrap();
        let star0 = closed_star(&path, 0).unwrap();
        let verts: Vec<Vec<usize>> = star0.iter().map(|s| s.vertices().to_vec()).collect();
        assert_eq!(verts, vec![vec![0], vec![1], vec![0, 1]]);

        let lonely = build_complex(&[vec![7]]).unwrap();
        assert_eq!(closed_star(&lonely, 7).unwrap().len(), 1);
        assert!(closed_star(&lonely, 3).is_err());
    }
}
