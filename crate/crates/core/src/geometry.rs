//! Metric geometry of the ITC distance: equivalence classes, the quotient
//! metric, triangle audit, Gram/Schoenberg embeddability, four-point Gromov
//! curvature and inertia centres.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::itc::ItcMatrix;

pub const DEFAULT_ZERO_TOL: f64 = 1e-6;
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
pub const DEFAULT_GROMOV_BUDGET: u64 = 2_000_000;
pub const TRIANGLE_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-9;

fn check_square(d: &DMatrix<f64>) -> Result<usize> {
    if d.nrows() != d.ncols() {
        return Err(Error::DimensionMismatch {
            expected: d.nrows(),
            actual: d.ncols(),
        });
    }
    Ok(d.nrows())
}

/// Connected components of the relation `dist(i,j) <= zero_tol`, each
/// sorted, ordered by smallest member.
pub fn equivalence_classes(itc: &ItcMatrix, zero_tol: f64) -> Vec<Vec<usize>> {
    components(itc.dist(), |d| d <= zero_tol)
}

pub(crate) fn components(dist: &DMatrix<f64>, linked: impl Fn(f64) -> bool) -> Vec<Vec<usize>> {
    let n = dist.nrows();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if linked(dist[(i, j)]) {
                uf.union(i, j);
            }
        }
    }
    uf.groups()
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns the new root if `a` and `b` were in different sets.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        Some(ra)
    }

    pub(crate) fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = self.find(i);
            by_root[r].push(i);
        }
        let mut out: Vec<Vec<usize>> = by_root.into_iter().filter(|g| !g.is_empty()).collect();
        out.sort_by_key(|g| g[0]);
        out
    }
}

/// Distance between equivalence classes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientMetric {
    pub classes: Vec<Vec<usize>>,
    /// Block mean of node distances between each pair of classes.
    pub dist: DMatrix<f64>,
    pub zero_tol: f64,
    /// Largest max-minus-min of node distances inside any class-pair block.
    pub max_spread: f64,
}

impl QuotientMetric {
    /// The class metric is only approximately well defined when node
    /// distances inside a block differ by more than `10 * zero_tol`.
    pub fn is_well_defined(&self) -> bool {
        self.max_spread <= 10.0 * self.zero_tol
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

pub fn quotient_metric(itc: &ItcMatrix, classes: &[Vec<usize>], zero_tol: f64) -> QuotientMetric {
    let d = itc.dist();
    let m = classes.len();
    let mut dist = DMatrix::zeros(m, m);
    let mut max_spread: f64 = 0.0;
    for a in 0..m {
        for b in (a + 1)..m {
            let mut sum = 0.0;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in &classes[a] {
                for &j in &classes[b] {
                    let v = d[(i, j)];
                    sum += v;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            let mean = sum / (classes[a].len() * classes[b].len()) as f64;
            dist[(a, b)] = mean;
            dist[(b, a)] = mean;
            if hi.is_finite() {
                max_spread = max_spread.max(hi - lo);
            } else if lo.is_finite() {
                max_spread = f64::INFINITY;
            }
        }
    }
    QuotientMetric {
        classes: classes.to_vec(),
        dist,
        zero_tol,
        max_spread,
    }
}

/// `D_ijk = d(i,k) + d(j,k) - d(i,j)` over distinct triples.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleAudit {
    /// `+inf` when there are fewer than three points.
    pub min_excess: f64,
    /// `(i, j, k, D_ijk)` with `i < j` and `D_ijk < -1e-9`.
    pub violations: Vec<(usize, usize, usize, f64)>,
}

pub fn triangle_audit(dist: &DMatrix<f64>) -> Result<TriangleAudit> {
    let n = check_square(dist)?;
    let mut min_excess = f64::INFINITY;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let excess = dist[(i, k)] + dist[(j, k)] - dist[(i, j)];
                if excess.is_nan() {
                    continue;
                }
                min_excess = min_excess.min(excess);
                if excess < -TRIANGLE_TOL {
                    violations.push((i, j, k, excess));
                }
            }
        }
    }
    Ok(TriangleAudit {
        min_excess,
        violations,
    })
}

/// Gram matrix `G(i,j) = (d(i,a)² + d(j,a)² - d(i,j)²) / 2` over the
/// points other than the anchor `a`, in their original order.
pub fn gram_matrix(dist: &DMatrix<f64>, anchor: usize) -> Result<DMatrix<f64>> {
    let m = check_square(dist)?;
    if anchor >= m {
        return Err(Error::IndexOutOfRange { index: anchor, n: m });
    }
    let others: Vec<usize> = (0..m).filter(|&i| i != anchor).collect();
    let k = others.len();
    let mut g = DMatrix::zeros(k, k);
    for (r, &i) in others.iter().enumerate() {
        for (c, &j) in others.iter().enumerate().skip(r) {
            let v = 0.5 * (dist[(i, anchor)].powi(2) + dist[(j, anchor)].powi(2) - dist[(i, j)].powi(2));
            g[(r, c)] = v;
            g[(c, r)] = v;
        }
    }
    Ok(g)
}

/// Euclidean realisation of a metric from its Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub dim: usize,
    /// One row per Gram row, `dim` columns.
    pub coordinates: DMatrix<f64>,
    /// Gram eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
}

/// Gram eigenvalues, descending. Unlike [`embedding_dimension`] this does not
/// fail on negative eigenvalues.
pub fn gram_eigenvalues(gram: &DMatrix<f64>) -> Result<Vec<f64>> {
    if check_square(gram)? == 0 {
        return Ok(Vec::new());
    }
    if gram.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("Gram matrix has non-finite entries".into()));
    }
    let (mut values, _) = crate::eig::real_symmetric(gram)?;
    values.reverse();
    Ok(values)
}

/// Rank and coordinates of a Gram matrix. Eigenvalues below
/// `-rank_tol * λ_max` mean the metric is not Euclidean.
pub fn embedding_dimension(gram: &DMatrix<f64>, rank_tol: f64) -> Result<Embedding> {
    let k = check_square(gram)?;
    if k == 0 {
        return Ok(Embedding {
            dim: 0,
            coordinates: DMatrix::zeros(0, 0),
            eigenvalues: Vec::new(),
        });
    }
    if gram.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("Gram matrix has non-finite entries".into()));
    }
    let (values, vectors) = crate::eig::real_symmetric(gram)?;
    let order: Vec<usize> = (0..k).rev().collect();
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let lmax = eigenvalues[0].max(0.0);
    let cutoff = rank_tol * lmax;
    let lmin = *eigenvalues.last().unwrap();
    if lmin < -cutoff {
        return Err(Error::NonEuclidean { min_eigenvalue: lmin });
    }
    let kept: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| values[i] > cutoff)
        .collect();
    let dim = kept.len();
    let mut coordinates = DMatrix::zeros(k, dim);
    for (c, &idx) in kept.iter().enumerate() {
        let scale = values[idx].sqrt();
        for r in 0..k {
            coordinates[(r, c)] = vectors[(r, idx)] * scale;
        }
    }
    Ok(Embedding {
        dim,
        coordinates,
        eigenvalues,
    })
}

/// Coordinates for every point of `dist`, anchor at the origin.
pub fn embed(dist: &DMatrix<f64>, anchor: usize, rank_tol: f64) -> Result<Embedding> {
    let g = gram_matrix(dist, anchor)?;
    let e = embedding_dimension(&g, rank_tol)?;
    let m = dist.nrows();
    let mut full = DMatrix::zeros(m, e.dim);
    let mut r = 0;
    for i in 0..m {
        if i == anchor {
            continue;
        }
        full.set_row(i, &e.coordinates.row(r));
        r += 1;
    }
    Ok(Embedding {
        coordinates: full,
        ..e
    })
}

/// One quadruple: opposite-pair sums sorted `large >= medium >= small`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadruple {
    pub points: [usize; 4],
    pub large: f64,
    pub medium: f64,
    pub small: f64,
    pub delta: f64,
    pub scaled_delta: f64,
}

impl Quadruple {
    pub fn new(d: &DMatrix<f64>, [w, x, y, z]: [usize; 4]) -> Self {
        let mut s = [
            d[(w, x)] + d[(y, z)],
            d[(w, y)] + d[(x, z)],
            d[(w, z)] + d[(x, y)],
        ];
        s.sort_by(|a, b| b.total_cmp(a));
        let [large, medium, small] = s;
        let delta = 0.5 * (large - medium);
        let g = large + medium + small;
        let scaled_delta = if g > 0.0 { delta / g } else { 0.0 };
        Quadruple {
            points: [w, x, y, z],
            large,
            medium,
            small,
            delta,
            scaled_delta,
        }
    }

    fn is_finite(&self) -> bool {
        self.large.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GromovReport {
    pub delta_max: f64,
    pub scaled_delta_max: f64,
    pub records: Vec<Quadruple>,
    pub quadruple_count: u64,
    /// True when quadruples were sampled; `delta_max` is then a lower bound.
    pub sampled: bool,
    /// Quadruples skipped because a distance was infinite.
    pub skipped_infinite: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct GromovConfig {
    pub budget: u64,
    pub seed: u64,
    pub keep_records: bool,
}

impl Default for GromovConfig {
    fn default() -> Self {
        GromovConfig {
            budget: DEFAULT_GROMOV_BUDGET,
            seed: 0,
            keep_records: true,
        }
    }
}

fn choose4(m: usize) -> u64 {
    if m < 4 {
        return 0;
    }
    let m = m as u64;
    m * (m - 1) * (m - 2) * (m - 3) / 24
}

/// Four-point Gromov δ over all quadruples, or a seeded uniform sample of
/// `budget` quadruples when there are more than that.
pub fn gromov_delta(dist: &DMatrix<f64>, cfg: &GromovConfig) -> Result<GromovReport> {
    let m = check_square(dist)?;
    let total = choose4(m);
    let sampled = total > cfg.budget;

    let quads: Vec<Quadruple> = if total == 0 {
        Vec::new()
    } else if !sampled {
        (0..m)
            .into_par_iter()
            .flat_map_iter(|w| {
                ((w + 1)..m).flat_map(move |x| {
                    ((x + 1)..m).flat_map(move |y| ((y + 1)..m).map(move |z| [w, x, y, z]))
                })
            })
            .map(|q| Quadruple::new(dist, q))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..cfg.budget)
            .map(|_| {
                let mut idx: Vec<usize> = sample(&mut rng, m, 4).into_vec();
                idx.sort_unstable();
                Quadruple::new(dist, [idx[0], idx[1], idx[2], idx[3]])
            })
            .collect()
    };

    let mut delta_max: f64 = 0.0;
    let mut scaled_delta_max: f64 = 0.0;
    let mut skipped = 0;
    for q in &quads {
        if !q.is_finite() {
            skipped += 1;
            continue;
        }
        delta_max = delta_max.max(q.delta);
        scaled_delta_max = scaled_delta_max.max(q.scaled_delta);
    }
    let quadruple_count = quads.len() as u64;
    let records = if cfg.keep_records {
        quads.into_iter().filter(Quadruple::is_finite).collect()
    } else {
        Vec::new()
    };
    Ok(GromovReport {
        delta_max,
        scaled_delta_max,
        records,
        quadruple_count,
        sampled,
        skipped_infinite: skipped,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InertiaReport {
    pub alpha: f64,
    pub inertia: Vec<f64>,
    /// Nodes of minimum inertia.
    pub gravity_centers: Vec<usize>,
    /// Nodes of maximum inertia.
    pub anti_gravity_centers: Vec<usize>,
    /// Number of infinite distances left out of the sums.
    pub excluded_infinite: usize,
}

/// `I(i) = Σ_j d(i,j)^α` over nodes.
pub fn inertia(dist: &DMatrix<f64>, alpha: f64) -> Result<InertiaReport> {
    let n = check_square(dist)?;
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be >= 1, got {alpha}")));
    }
    let mut excluded = 0;
    let values: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| dist[(i, j)])
                .filter(|d| {
                    let keep = d.is_finite();
                    if !keep {
                        excluded += 1;
                    }
                    keep
                })
                .map(|d| d.powf(alpha))
                .sum()
        })
        .collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let tie = |target: f64| -> Vec<usize> {
        let slack = TIE_TOL * target.abs().max(1.0);
        (0..n).filter(|&i| (values[i] - target).abs() <= slack).collect()
    };
    Ok(InertiaReport {
        alpha,
        gravity_centers: tie(lo),
        anti_gravity_centers: tie(hi),
        inertia: values,
        excluded_infinite: excluded,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::itc::itc_matrix;
    use crate::model::{CouplingKind, SpinNetwork};

    fn chain_itc(n: usize, kind: CouplingKind) -> ItcMatrix {
        itc_matrix(&SpinNetwork::chain(n, kind, 1.0).unwrap()).unwrap()
    }

    fn quotient(n: usize, kind: CouplingKind) -> QuotientMetric {
        let itc = chain_itc(n, kind);
        let classes = equivalence_classes(&itc, DEFAULT_ZERO_TOL);
        quotient_metric(&itc, &classes, DEFAULT_ZERO_TOL)
    }

    #[test]
    fn classes_of_uniform_chains() {
        let itc = chain_itc(4, CouplingKind::Xx);
        assert_eq!(equivalence_classes(&itc, DEFAULT_ZERO_TOL), vec![vec![0, 3], vec![1, 2]]);
        let itc = chain_itc(7, CouplingKind::Heisenberg);
        assert_eq!(
            equivalence_classes(&itc, DEFAULT_ZERO_TOL),
            vec![vec![0, 6], vec![1, 5], vec![2, 4], vec![3]]
        );
    }

    #[test]
    fn distinct_points_stay_singletons() {
        let d = DMatrix::from_row_slice(3, 3, &[0., 1., 2., 1., 0., 1.5, 2., 1.5, 0.]);
        let itc = ItcMatrix::from_probabilities(d.map(|x: f64| (-x).exp())).unwrap();
        assert_eq!(equivalence_classes(&itc, DEFAULT_ZERO_TOL), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn quotient_examples() {
        let q = quotient(3, CouplingKind::Xx);
        assert_eq!(q.classes, vec![vec![0, 2], vec![1]]);
        assert_abs_diff_eq!(q.dist[(0, 1)], 2f64.ln(), epsilon = 1e-12);
        assert!(q.is_well_defined());

        let q = quotient(3, CouplingKind::Heisenberg);
        assert_abs_diff_eq!(q.dist[(0, 1)], 0.8109, epsilon = 5e-5);

        // classes a={1,6}, b={2,5}, c={3,4}
        let q = quotient(6, CouplingKind::Heisenberg);
        assert_abs_diff_eq!(q.dist[(0, 1)], q.dist[(2, 1)], epsilon = 1e-9);
        assert!(q.dist[(0, 1)] > q.dist[(0, 2)]);
    }

    #[test]
    fn triangle_examples() {
        let bad = DMatrix::from_row_slice(3, 3, &[0., 1., 1., 1., 0., 3., 1., 3., 0.]);
        let audit = triangle_audit(&bad).unwrap();
        assert_eq!(audit.min_excess, -1.0);
        assert_eq!(audit.violations, vec![(1, 2, 0, -1.0)]);

        let q = quotient(3, CouplingKind::Xx);
        let audit = triangle_audit(&q.dist).unwrap();
        assert!(audit.violations.is_empty());
        assert_eq!(audit.min_excess, f64::INFINITY);

        let q = quotient(50, CouplingKind::Heisenberg);
        assert!(triangle_audit(&q.dist).unwrap().violations.is_empty());
    }

    #[test]
    fn gram_examples() {
        let two = DMatrix::from_row_slice(2, 2, &[0., 0.7, 0.7, 0.]);
        let g = gram_matrix(&two, 1).unwrap();
        assert_abs_diff_eq!(g[(0, 0)], 0.49, epsilon = 1e-15);
        let e = embedding_dimension(&g, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(e.dim, 1);

        let tri = DMatrix::from_row_slice(3, 3, &[0., 1., 1., 1., 0., 1., 1., 1., 0.]);
        let g = gram_matrix(&tri, 2).unwrap();
        assert_eq!(g, DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]));
        assert!(gram_matrix(&tri, 3).is_err());
    }

    #[test]
    fn chain_embedding_dimensions() {
        let q = quotient(7, CouplingKind::Heisenberg);
        let g = gram_matrix(&q.dist, q.len() - 1).unwrap();
        assert_eq!(embedding_dimension(&g, DEFAULT_RANK_TOL).unwrap().dim, 3);

        let q = quotient(10, CouplingKind::Heisenberg);
        let g = gram_matrix(&q.dist, q.len() - 1).unwrap();
        let e = embedding_dimension(&g, DEFAULT_RANK_TOL).unwrap();
        assert!(*e.eigenvalues.last().unwrap() >= -1e-8 * e.eigenvalues[0]);

        let q = quotient(20, CouplingKind::Xx);
        let g = gram_matrix(&q.dist, q.len() - 1).unwrap();
        assert_eq!(embedding_dimension(&g, DEFAULT_RANK_TOL).unwrap().dim, 9);
    }

    #[test]
    fn non_euclidean_rejected() {
        let bad = DMatrix::from_row_slice(3, 3, &[0., 1., 1., 1., 0., 3., 1., 3., 0.]);
        let g = gram_matrix(&bad, 0).unwrap();
        assert!(matches!(
            embedding_dimension(&g, DEFAULT_RANK_TOL),
            Err(Error::NonEuclidean { .. })
        ));
    }

    #[test]
    fn embedding_roundtrip() {
        let q = quotient(12, CouplingKind::Xx);
        let e = embed(&q.dist, q.len() - 1, DEFAULT_RANK_TOL).unwrap();
        let m = q.len();
        for i in 0..m {
            for j in 0..m {
                let d = (e.coordinates.row(i) - e.coordinates.row(j)).norm();
                assert!((d - q.dist[(i, j)]).abs() <= 1e-6 * q.dist[(i, j)].max(1.0));
            }
        }
    }

    #[test]
    fn gromov_examples() {
        let ones = DMatrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 1.0 });
        let r = gromov_delta(&ones, &GromovConfig::default()).unwrap();
        assert_eq!(r.delta_max, 0.0);
        assert_eq!(r.quadruple_count, 1);
        assert!(!r.sampled);

        let line = DMatrix::from_fn(4, 4, |i, j| (i as f64 - j as f64).abs());
        let r = gromov_delta(&line, &GromovConfig::default()).unwrap();
        let q = r.records[0];
        assert_eq!((q.large, q.medium, q.small), (4.0, 4.0, 2.0));
        assert_eq!(r.delta_max, 0.0);

        let three = DMatrix::from_fn(3, 3, |i, j| (i as f64 - j as f64).abs());
        let r = gromov_delta(&three, &GromovConfig::default()).unwrap();
        assert_eq!((r.delta_max, r.quadruple_count), (0.0, 0));
    }

    #[test]
    fn gromov_square_cycle() {
        // 4-cycle with unit edges: sums {2, 2, 4} -> δ = 1, G = 8.
        let d = DMatrix::from_row_slice(4, 4, &[0., 1., 2., 1., 1., 0., 1., 2., 2., 1., 0., 1., 1., 2., 1., 0.]);
        let r = gromov_delta(&d, &GromovConfig::default()).unwrap();
        assert_eq!(r.delta_max, 1.0);
        assert_eq!(r.scaled_delta_max, 0.125);
    }

    #[test]
    fn gromov_sampling_is_flagged_and_seeded() {
        let q = quotient(30, CouplingKind::Xx);
        let cfg = GromovConfig {
            budget: 500,
            seed: 7,
            keep_records: false,
        };
        let a = gromov_delta(&q.dist, &cfg).unwrap();
        let b = gromov_delta(&q.dist, &cfg).unwrap();
        assert!(a.sampled);
        assert_eq!(a.quadruple_count, 500);
        assert_eq!(a.delta_max, b.delta_max);
        let full = gromov_delta(&q.dist, &GromovConfig::default()).unwrap();
        assert!(a.delta_max <= full.delta_max);
    }

    #[test]
    fn inertia_examples() {
        let itc = chain_itc(3, CouplingKind::Xx);
        let r = inertia(itc.dist(), 2.0).unwrap();
        let l2 = 2f64.ln().powi(2);
        assert_abs_diff_eq!(r.inertia[0], l2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.inertia[1], 2.0 * l2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.inertia[2], l2, epsilon = 1e-12);
        assert_eq!(r.anti_gravity_centers, vec![1]);
        assert_eq!(r.gravity_centers, vec![0, 2]);

        let zero = DMatrix::zeros(2, 2);
        let r = inertia(&zero, 2.0).unwrap();
        assert_eq!(r.inertia, vec![0.0, 0.0]);
        assert_eq!(r.gravity_centers, vec![0, 1]);
        assert_eq!(r.anti_gravity_centers, vec![0, 1]);

        assert!(inertia(&zero, 0.5).is_err());
    }

    #[test]
    fn inertia_skips_infinite() {
        let d = DMatrix::from_row_slice(3, 3, &[0., 1., f64::INFINITY, 1., 0., 1., f64::INFINITY, 1., 0.]);
        let r = inertia(&d, 1.0).unwrap();
        assert_eq!(r.inertia, vec![1.0, 2.0, 1.0]);
        assert_eq!(r.excluded_infinite, 2);
    }

    #[test]
    fn long_odd_chain_center() {
        let itc = chain_itc(101, CouplingKind::Heisenberg);
        let r = inertia(itc.dist(), 2.0).unwrap();
        assert_eq!(r.anti_gravity_centers, vec![50]);
    }
}
