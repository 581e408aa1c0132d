//! Property tests for the structural invariants: chain-complex identities,
//! canonicalization, projector algebra, numeric kernel contracts and greedy
//! determinism.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use proptest::prelude::*;

use hodge_coarsen::coarsen::{
    assemble_contraction_matrices, coarsen, lift_matrix, resolve_targets, CoarsenConfig,
    FamilyKind, LaplacianSpec, RatioBasis, TargetSpec, WeightSource,
};
use hodge_coarsen::numkernel::{eigh, lnorm, pinv_sqrt, quadratic_min_unit, CooMatrix, REL_EIG_TOL};
use hodge_coarsen::operators::LaplacianVariant;
use hodge_coarsen::simplicial::{boundary_matrix, build_complex, flag_complex, SimplicialComplex};

fn arb_graph() -> impl Strategy<Value = Vec<(usize, usize)>> {
    proptest::collection::btree_set((0usize..12, 0usize..12), 1..30).prop_map(|set| {
        set.into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    })
}

fn arb_flag_complex() -> impl Strategy<Value = SimplicialComplex> {
    arb_graph().prop_filter_map("graph has no edges", |edges| {
        if edges.is_empty() {
            None
        } else {
            flag_complex(&edges, 3).ok()
        }
    })
}

fn arb_maximal_simplices() -> impl Strategy<Value = Vec<Vec<usize>>> {
    proptest::collection::vec(
        proptest::collection::btree_set(0usize..10, 1..4)
            .prop_map(|s| s.into_iter().collect::<Vec<_>>()),
        1..8,
    )
}

fn arb_symmetric(max_n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(-5.0f64..5.0, n * n).prop_map(move |vals| {
            let m = DMatrix::from_vec(n, n, vals);
            (&m + m.transpose()) * 0.5
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_composition_vanishes(complex in arb_flag_complex()) {
        for k in 1..complex.dim() {
            let a = boundary_matrix(&complex, k).unwrap();
            let b = boundary_matrix(&complex, k + 1).unwrap();
            prop_assert_eq!(a.multiply(&b).unwrap().nnz(), 0);
        }
    }

    #[test]
    fn canonicalization_idempotent(maximal in arb_maximal_simplices()) {
        let complex = build_complex(&maximal).unwrap();
        let again = build_complex(&complex.maximal_simplices()).unwrap();
        prop_assert_eq!(complex, again);
    }

    #[test]
    fn contraction_projector_idempotent_and_onto(
        complex in arb_flag_complex(),
        pick in any::<proptest::sample::Index>(),
    ) {
        prop_assume!(complex.dim() >= 1);
        let edges = complex.simplices(1);
        let family = edges[pick.index(edges.len())].vertices().to_vec();
        let maps = assemble_contraction_matrices(&complex, &family, family[0], None).unwrap();
        for p in &maps {
            if p.nrows() == 0 {
                continue;
            }
            // Every coarse simplex keeps at least one fine preimage, and the
            // uniform rule gives each row m entries of magnitude 1/m.
            let counts = p.row_counts();
            prop_assert!(counts.iter().all(|&m| m >= 1));
            for &(r, _, v) in p.triplets() {
                prop_assert!((v.abs() * counts[r] as f64 - 1.0).abs() <= 1e-15);
            }
            let pi = lift_matrix(p).unwrap().multiply(p).unwrap().to_dense();
            prop_assert!(((&pi * &pi) - &pi).norm() <= 1e-10);
        }
        // The vertex map is surjective by row construction; column structure
        // shows each fine vertex lands somewhere.
        let mut hit = vec![false; maps[0].nrows()];
        for &(r, _, _) in maps[0].triplets() {
            hit[r] = true;
        }
        prop_assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn eigh_reconstructs(m in arb_symmetric(24)) {
        let spec = eigh(&m).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(spec.eigenvalues.clone()));
        let rec = &spec.eigenvectors * d * spec.eigenvectors.transpose();
        let scale = m.norm().max(1.0);
        prop_assert!((rec - &m).norm() <= 1e-6 * scale);
    }

    #[test]
    fn pinv_sqrt_squares_to_range_projector(m in arb_symmetric(12)) {
        // Work with the PSD Gram of the sample.
        let psd = &m * m.transpose();
        let root = pinv_sqrt(&psd, REL_EIG_TOL).unwrap();
        let candidate = &psd * &root * &root;
        // The true range projector from an independent decomposition.
        let spec = eigh(&psd).unwrap();
        let lmax = spec.eigenvalues.last().copied().unwrap_or(0.0);
        let mut projector = DMatrix::zeros(psd.nrows(), psd.ncols());
        for (i, &l) in spec.eigenvalues.iter().enumerate() {
            if l > REL_EIG_TOL * lmax {
                let v = spec.eigenvectors.column(i);
                projector += v * v.transpose();
            }
        }
        prop_assert!((candidate - projector).norm() <= 1e-6 * lmax.max(1.0));
    }

    #[test]
    fn lnorm_additive_over_columns(vals in proptest::collection::vec(-3.0f64..3.0, 8)) {
        let path = build_complex(&[vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let lap = hodge_coarsen::operators::hodge_laplacian(
            &path,
            &hodge_coarsen::operators::unit_weights(&path),
            0,
            LaplacianVariant::Unweighted,
        )
        .unwrap();
        let x1 = DMatrix::from_column_slice(4, 1, &vals[0..4]);
        let x2 = DMatrix::from_column_slice(4, 1, &vals[4..8]);
        let both = DMatrix::from_columns(&[x1.column(0), x2.column(0)]);
        let a = lnorm(&x1, &lap).unwrap();
        let b = lnorm(&x2, &lap).unwrap();
        let c = lnorm(&both, &lap).unwrap();
        prop_assert!((c * c - (a * a + b * b)).abs() <= 1e-9);
    }

    #[test]
    fn quadratic_nonconvex_returns_sampled_min(
        c0 in -2.0f64..2.0,
        ch in -2.0f64..2.0,
        c1 in -2.0f64..2.0,
    ) {
        let a = 2.0 * c0 - 4.0 * ch + 2.0 * c1;
        prop_assume!(a <= 0.0);
        let (alpha, cost) = quadratic_min_unit(c0, ch, c1);
        let min = c0.min(ch).min(c1);
        prop_assert_eq!(cost, min);
        prop_assert!([0.0, 0.5, 1.0].contains(&alpha));
    }

    #[test]
    fn greedy_full_refresh_deterministic(seed in 0u64..32) {
        let complex = {
            let mut rng_edges = Vec::new();
            for i in 0..8usize {
                rng_edges.push((i, (i + 1) % 8));
                if i % 2 == 0 {
                    rng_edges.push((i, (i + 3) % 8));
                }
            }
            flag_complex(&rng_edges, 2).unwrap()
        };
        let mk = || {
            resolve_targets(
                &complex,
                &[TargetSpec {
                    laplacian: LaplacianSpec {
                        k: 1,
                        variant: LaplacianVariant::Unweighted,
                        weights: WeightSource::Unit,
                    },
                    band: (0, 4),
                    harmonic_shift: true,
                }],
            )
            .unwrap()
        };
        // With full refresh the trace must not depend on the seed at all.
        let config = |s| CoarsenConfig {
            ratio: 0.5,
            basis: RatioBasis::Simplices,
            family_kind: FamilyKind::Edges,
            combination_weights: None,
            refresh_fraction: 1.0,
            optimize_alpha: false,
            seed: s,
        };
        let a = coarsen(&complex, mk(), config(seed)).unwrap();
        let b = coarsen(&complex, mk(), config(seed.wrapping_add(1))).unwrap();
        let fam_a: Vec<_> = a.levels.iter().map(|r| r.family.clone()).collect();
        let fam_b: Vec<_> = b.levels.iter().map(|r| r.family.clone()).collect();
        prop_assert_eq!(fam_a, fam_b);
    }

    #[test]
    fn accumulated_maps_track_complex(complex in arb_flag_complex(), seed in 0u64..16) {
        prop_assume!(complex.dim() >= 1);
        let targets = resolve_targets(
            &complex,
            &[TargetSpec {
                laplacian: LaplacianSpec {
                    k: 0,
                    variant: LaplacianVariant::Unweighted,
                    weights: WeightSource::Unit,
                },
                band: (0, complex.num_vertices().min(4)),
                harmonic_shift: true,
            }],
        )
        .unwrap();
        let config = CoarsenConfig {
            ratio: 0.5,
            basis: RatioBasis::Vertices,
            refresh_fraction: 0.5,
            seed,
            ..Default::default()
        };
        let result = coarsen(&complex, targets, config).unwrap();
        for (k, map) in result.maps.iter().enumerate() {
            prop_assert_eq!(map.nrows(), result.complex.num_simplices(k));
            prop_assert_eq!(map.ncols(), complex.num_simplices(k));
        }
        // Accumulated P_0 keeps exactly one nonzero per column, and the
        // accumulated projector stays idempotent in every dimension.
        let mut per_col = vec![0usize; result.maps[0].ncols()];
        for &(_, c, _) in result.maps[0].triplets() {
            per_col[c] += 1;
        }
        prop_assert!(per_col.iter().all(|&n| n == 1));
        for map in &result.maps {
            if map.nrows() == 0 || map.nnz() == 0 {
                continue;
            }
            let pi = lift_matrix(map).unwrap().multiply(map).unwrap().to_dense();
            prop_assert!(((&pi * &pi) - &pi).norm() <= 1e-10);
        }
    }

    #[test]
    fn complex_json_roundtrips(maximal in arb_maximal_simplices()) {
        let complex = build_complex(&maximal).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        hodge_coarsen::io::write_complex_json(&path, &complex).unwrap();
        let back = hodge_coarsen::io::read_complex_json(&path).unwrap();
        // Vertex ids densify on write; compare canonical shapes.
        prop_assert_eq!(complex.total_simplices(), back.total_simplices());
        prop_assert_eq!(complex.dim(), back.dim());
        for k in 0..=complex.dim() {
            prop_assert_eq!(complex.num_simplices(k), back.num_simplices(k));
        }
    }

    #[test]
    fn triplet_matrix_roundtrips(
        entries in proptest::collection::vec((0usize..6, 0usize..6, -4.0f64..4.0), 0..12)
    ) {
        let m = CooMatrix::from_triplets(6, 6, entries).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        hodge_coarsen::io::write_matrix_triplets(&path, &m).unwrap();
        let back = hodge_coarsen::io::read_matrix_triplets(&path, 6, 6).unwrap();
        prop_assert_eq!(m, back);
    }
}
