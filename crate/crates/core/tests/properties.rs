use nalgebra::DMatrix;
use proptest::prelude::*;

use itc_core::cluster::{clusters_at, hierarchical_clusters};
use itc_core::control::{
    controlled_transfer_probability, optimize_switching, piecewise_evolution, ControlField, ControlSequence,
    OptimizerConfig, SwitchedSystem,
};
use itc_core::geometry::{
    embed, equivalence_classes, gram_matrix, gromov_delta, inertia, quotient_metric, GromovConfig,
    DEFAULT_RANK_TOL, DEFAULT_ZERO_TOL,
};
use itc_core::itc::{itc_distance, max_transfer_probability, verify_bound_by_scan};
use itc_core::{eigendecompose, itc_matrix, CouplingKind, SpinNetwork};

fn kind() -> impl Strategy<Value = CouplingKind> {
    prop_oneof![Just(CouplingKind::Xx), Just(CouplingKind::Heisenberg)]
}

fn random_couplings(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(0.05f64..2.0, n * (n - 1) / 2).prop_map(move |v| {
        let mut m = DMatrix::zeros(n, n);
        let mut it = v.into_iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let x = it.next().unwrap();
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        m
    })
}

/// Ten points in the unit square, kept at least 0.05 apart.
fn planar_points() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 10)
        .prop_map(|v| v.into_iter().map(|(x, y)| [x, y]).collect::<Vec<_>>())
        .prop_filter("points too close", |p| {
            (0..p.len()).all(|i| ((i + 1)..p.len()).all(|j| (p[i][0] - p[j][0]).hypot(p[i][1] - p[j][1]) > 0.05))
        })
}

fn euclidean_dist(points: &[Vec<f64>]) -> DMatrix<f64> {
    let m = points.len();
    DMatrix::from_fn(m, m, |i, j| {
        points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bound_dominates_time_scan(k in kind(), c in (2usize..7).prop_flat_map(random_couplings)) {
        let n = c.nrows();
        let net = SpinNetwork::from_couplings(k, c).unwrap();
        let s = eigendecompose(&net.hamiltonian(), None).unwrap();
        for (i, j) in [(0, n - 1), (0, 1)] {
            let slack = verify_bound_by_scan(&s, i, j, 40.0, 0.01).unwrap();
            prop_assert!(slack >= -1e-9, "scan exceeded bound by {}", -slack);
        }
    }

    #[test]
    fn shift_and_scale_do_not_change_bound(n in 2usize..8, k in kind(), scale in 0.1f64..10.0, shift in -5.0f64..5.0) {
        let h = SpinNetwork::chain(n, k, 1.0).unwrap().hamiltonian();
        let a = itc_matrix(&SpinNetwork::chain(n, k, 1.0).unwrap()).unwrap();
        let s = eigendecompose(&h.affine(scale, shift), None).unwrap();
        for i in 0..n {
            for j in 0..n {
                let p = max_transfer_probability(&s, i, j).unwrap();
                prop_assert!((p - a.p_max()[(i, j)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bound_ignores_basis_choice_within_degenerate_groups(n in 3usize..9, theta in 0.0f64..std::f64::consts::TAU) {
        // A complete graph has an (n-1)-fold degenerate eigenvalue; rotating the
        // eigenbasis inside it must not change p_max.
        let c = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 });
        let net = SpinNetwork::from_couplings(CouplingKind::Xx, c).unwrap();
        let s = eigendecompose(&net.hamiltonian(), None).unwrap();
        let g = s.groups().iter().find(|g| g.len() > 1).unwrap().clone();
        let v = s.eigenvectors();
        let (a, b) = (g.start, g.start + 1);
        let (ct, st) = (theta.cos(), theta.sin());
        let mut rotated = v.clone();
        for r in 0..n {
            rotated[(r, a)] = ct * v[(r, a)] - st * v[(r, b)];
            rotated[(r, b)] = st * v[(r, a)] + ct * v[(r, b)];
        }
        for i in 0..n {
            for j in 0..n {
                let mut total = 0.0;
                for grp in s.groups() {
                    let e: f64 = grp.clone().map(|k| rotated[(i, k)] * rotated[(j, k)]).sum();
                    total += e.abs();
                }
                let p = max_transfer_probability(&s, i, j).unwrap();
                prop_assert!((total * total - p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn distance_decreases_with_probability(p in 1e-12f64..1.0, q in 1e-12f64..1.0) {
        let (dp, dq) = (itc_distance(p).unwrap(), itc_distance(q).unwrap());
        prop_assert!(dp >= 0.0 && dq >= 0.0);
        if p < q {
            prop_assert!(dp >= dq);
        }
    }

    #[test]
    fn antipodal_nodes_share_distances(n in 2usize..40, k in kind()) {
        let itc = itc_matrix(&SpinNetwork::chain(n, k, 1.0).unwrap()).unwrap();
        let d = itc.dist();
        for i in 0..n {
            prop_assert!(d[(i, n - 1 - i)] < 1e-9);
            for j in 0..n {
                prop_assert!((d[(i, j)] - d[(n - 1 - i, n - 1 - j)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gram_psd_for_any_anchor(n in 4usize..24, k in kind(), anchor_frac in 0.0f64..1.0) {
        let itc = itc_matrix(&SpinNetwork::chain(n, k, 1.0).unwrap()).unwrap();
        let classes = equivalence_classes(&itc, DEFAULT_ZERO_TOL);
        let q = quotient_metric(&itc, &classes, DEFAULT_ZERO_TOL);
        let anchor = ((q.len() as f64 * anchor_frac) as usize).min(q.len() - 1);
        let g = gram_matrix(&q.dist, anchor).unwrap();
        let eig = g.clone().symmetric_eigen().eigenvalues;
        let lmax = eig.max();
        prop_assert!(eig.min() >= -1e-8 * lmax);
        let e = embed(&q.dist, anchor, DEFAULT_RANK_TOL).unwrap();
        prop_assert_eq!(e.dim, (n - 2).div_ceil(2));
    }

    #[test]
    fn embedding_reproduces_euclidean_points(pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 5..9)) {
        let d = euclidean_dist(&pts);
        let e = embed(&d, 0, DEFAULT_RANK_TOL).unwrap();
        prop_assert!(e.dim <= 3);
        let rows: Vec<Vec<f64>> = (0..e.coordinates.nrows())
            .map(|r| e.coordinates.row(r).iter().copied().collect())
            .collect();
        let back = euclidean_dist(&rows);
        prop_assert!((back - &d).amax() < 1e-6);
    }

    #[test]
    fn gromov_records_are_ordered(pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 4..10)) {
        let d = euclidean_dist(&pts);
        let r = gromov_delta(&d, &GromovConfig::default()).unwrap();
        prop_assert!(!r.sampled);
        prop_assert!(r.delta_max >= 0.0);
        for q in &r.records {
            prop_assert!(q.large >= q.medium && q.medium >= q.small);
            prop_assert!(q.delta <= r.delta_max && q.scaled_delta <= r.scaled_delta_max);
            prop_assert!((q.delta - (q.large - q.medium) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn inertia_is_mirror_symmetric(n in 2usize..40, k in kind(), alpha in 1.0f64..4.0) {
        let itc = itc_matrix(&SpinNetwork::chain(n, k, 1.0).unwrap()).unwrap();
        let r = inertia(itc.dist(), alpha).unwrap();
        for i in 0..n {
            let (a, b) = (r.inertia[i], r.inertia[n - 1 - i]);
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn geometric_network_invariants(pts in planar_points(), k in kind()) {
        let net = SpinNetwork::geometric(&pts, k, 3.0).unwrap();
        let c = net.couplings();
        for i in 0..10 {
            prop_assert_eq!(c[(i, i)], 0.0);
            for j in (i + 1)..10 {
                let r = (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]);
                prop_assert_eq!(c[(i, j)], c[(j, i)]);
                prop_assert!((c[(i, j)] * r.powi(3) - 1.0).abs() < 1e-12);
            }
        }
        let itc = itc_matrix(&net).unwrap();
        for i in 0..10 {
            prop_assert!((itc.p_max()[(i, i)] - 1.0).abs() < 1e-9);
            for j in 0..10 {
                let p = itc.p_max()[(i, j)];
                prop_assert!((0.0..=1.0 + 1e-9).contains(&p));
                prop_assert_eq!(p, itc.p_max()[(j, i)]);
            }
        }
    }

    #[test]
    fn threshold_partitions_refine_and_nest(pts in planar_points(), k in kind()) {
        let itc = itc_matrix(&SpinNetwork::geometric(&pts, k, 3.0).unwrap()).unwrap();
        let d = itc.dist();
        let tree = hierarchical_clusters(d).unwrap();

        let mut levels = vec![0.0];
        levels.extend(tree.thresholds.iter().map(|t| t.next_up()));
        let mut prev: Option<Vec<Vec<usize>>> = None;
        for eps in levels {
            let parts = clusters_at(d, eps);
            let mut all: Vec<usize> = parts.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..10).collect::<Vec<_>>());
            if let Some(finer) = &prev {
                for f in finer {
                    prop_assert!(parts.iter().any(|c| f.iter().all(|m| c.contains(m))));
                }
            }
            prev = Some(parts);
        }

        for (id, c) in tree.clusters.iter().enumerate() {
            if let Some(p) = c.parent {
                let parent = &tree.clusters[p];
                prop_assert!(c.members.iter().all(|m| parent.members.contains(m)));
                prop_assert!(parent.level >= c.level);
                prop_assert!(parent.children.contains(&id));
            }
            if c.valid && c.level.is_finite() {
                prop_assert!(clusters_at(d, c.birth()).contains(&c.members));
            }
        }
    }

    #[test]
    fn evolution_is_unitary_and_splits(n in 2usize..7, site_frac in 0.0f64..1.0, taus in prop::collection::vec(0.0f64..3.0, 1..6), cut in 0.0f64..1.0) {
        let h0 = SpinNetwork::chain(n, CouplingKind::Xx, 1.0).unwrap().hamiltonian();
        let site = ((n as f64 * site_frac) as usize).min(n - 1);
        let h1 = ControlField::new(site, 2.0).hamiltonian(n).unwrap();
        let sys = SwitchedSystem::new(&h0, &h1).unwrap();
        let u = sys.evolution(&taus).unwrap();
        prop_assert!(u.deviation() < 1e-9);

        // Splitting the first segment in two leaves the product unchanged.
        let mut split = vec![taus[0] * cut, 0.0, taus[0] * (1.0 - cut)];
        split.extend_from_slice(&taus[1..]);
        let v = sys.evolution(&split).unwrap();
        prop_assert!((u.matrix() - v.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);

        let mut t = 0.0;
        let times: Vec<f64> = taus.iter().map(|d| { t += d.max(1e-3); t }).collect();
        let seq = ControlSequence::new(site, 2.0, times).unwrap();
        let w = piecewise_evolution(&h0, &h1, &seq).unwrap();
        let p = controlled_transfer_probability(&h0, &h1, &seq, 0, n - 1).unwrap();
        prop_assert!((w.matrix()[(n - 1, 0)].norm_sqr() - p).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn optimizer_never_overstates(n in 3usize..6, seed in 0u64..1000) {
        let h0 = SpinNetwork::chain(n, CouplingKind::Xx, 1.0).unwrap().hamiltonian();
        let field = ControlField::new(0, 2.0);
        let cfg = OptimizerConfig { restarts: 2, seed, max_evals: 300, max_rebuilds: 2, ..OptimizerConfig::default() };
        let seq = optimize_switching(&h0, field, 0, n - 1, 4, 10.0, &cfg).unwrap();
        let h1 = field.hamiltonian(n).unwrap();
        let p = controlled_transfer_probability(&h0, &h1, &seq, 0, n - 1).unwrap();
        prop_assert!((p - seq.achieved_p).abs() < 1e-12);
        prop_assert!(seq.final_time() <= 10.0 + 1e-9);
        prop_assert!(seq.achieved_p <= 1.0 + 1e-12);
    }
}
