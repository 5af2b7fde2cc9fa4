//! Threshold clustering of nodes under the ITC distance.
//!
//! Two nodes are related at level `ε` when their distance is below `ε`; the
//! clusters at that level are the connected components of the relation.
//! Sweeping `ε` upward yields a hierarchy. A cluster is *valid* when every
//! internal distance is smaller than every distance to a node outside it.
//! Distances need not satisfy the triangle inequality.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{components, UnionFind};

/// Components of the graph with edges `d(a,b) < epsilon`.
pub fn clusters_at(dist: &DMatrix<f64>, epsilon: f64) -> Vec<Vec<usize>> {
    components(dist, |d| d < epsilon)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub members: Vec<usize>,
    /// Largest edge needed to connect the members (0 for single nodes).
    pub level: f64,
    pub valid: bool,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl Cluster {
    /// Smallest `ε` for which [`clusters_at`] contains this cluster.
    pub fn birth(&self) -> f64 {
        if self.members.len() == 1 {
            0.0
        } else {
            self.level.next_up()
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.members.len() == 1
    }
}

/// Hierarchy of threshold clusters. The first `n` entries are the single
/// nodes, in order; merged clusters follow in order of formation and the
/// last entry is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTree {
    pub n: usize,
    pub clusters: Vec<Cluster>,
    /// Distinct off-diagonal distances, ascending.
    pub thresholds: Vec<f64>,
}

impl ClusterTree {
    pub fn root(&self) -> usize {
        self.clusters.len() - 1
    }

    /// Valid clusters with more than one member, in order of formation.
    pub fn valid_merged(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(|c| c.valid && !c.is_leaf())
    }
}

fn validate(dist: &DMatrix<f64>) -> Result<usize> {
    let n = dist.nrows();
    if dist.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: dist.ncols(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidSize { n, min: 1 });
    }
    for i in 0..n {
        if dist[(i, i)] != 0.0 {
            return Err(Error::InvalidArgument(format!("nonzero diagonal at {i}")));
        }
        for j in (i + 1)..n {
            let (a, b) = (dist[(i, j)], dist[(j, i)]);
            if a != b {
                return Err(Error::Asymmetric {
                    i,
                    j,
                    upper: a,
                    lower: b,
                });
            }
            if a.is_nan() || a < 0.0 {
                return Err(Error::InvalidArgument(format!("distance ({i}, {j}) = {a}")));
            }
        }
    }
    Ok(n)
}

/// `max intra < min inter`, with an empty side counting as −∞ / +∞.
fn separated(dist: &DMatrix<f64>, members: &[usize], inside: &[bool]) -> bool {
    let mut intra = f64::NEG_INFINITY;
    let mut inter = f64::INFINITY;
    for &a in members {
        for b in 0..dist.nrows() {
            if b == a {
                continue;
            }
            let d = dist[(a, b)];
            if inside[b] {
                intra = intra.max(d);
            } else {
                inter = inter.min(d);
            }
        }
    }
    intra < inter
}

/// Sweeps the distinct distances upward, recording every component that forms.
/// Equal distances merge simultaneously. Nodes that stay apart at every finite
/// distance are joined in a root at level `+inf`.
pub fn hierarchical_clusters(dist: &DMatrix<f64>) -> Result<ClusterTree> {
    let n = validate(dist)?;

    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            if dist[(i, j)].is_finite() {
                edges.push((dist[(i, j)], i, j));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut thresholds: Vec<f64> = edges.iter().map(|e| e.0).collect();
    thresholds.dedup();

    let mut clusters: Vec<Cluster> = (0..n)
        .map(|i| Cluster {
            members: vec![i],
            level: 0.0,
            valid: false,
            parent: None,
            children: Vec::new(),
        })
        .collect();
    let mut uf = UnionFind::new(n);
    // cluster currently represented by each union-find root
    let mut current: Vec<usize> = (0..n).collect();

    let mut start = 0;
    while start < edges.len() {
        let level = edges[start].0;
        let mut end = start;
        let mut touched = Vec::new();
        let mut absorbed: Vec<(usize, usize)> = Vec::new();
        while end < edges.len() && edges[end].0 == level {
            let (_, a, b) = edges[end];
            let (ra, rb) = (uf.find(a), uf.find(b));
            if ra != rb {
                absorbed.push((ra, current[ra]));
                absorbed.push((rb, current[rb]));
                let root = uf.union(ra, rb).expect("distinct roots");
                touched.push(root);
            }
            end += 1;
        }
        if !touched.is_empty() {
            // group the pre-merge clusters by their final root
            let mut new_roots: Vec<usize> = touched.iter().map(|&r| uf.find(r)).collect();
            new_roots.sort_unstable();
            new_roots.dedup();
            for root in new_roots {
                let mut children: Vec<usize> = absorbed
                    .iter()
                    .filter(|(r, _)| uf.find(*r) == root)
                    .map(|&(_, c)| c)
                    .collect();
                children.sort_unstable();
                children.dedup();
                let mut members: Vec<usize> = children
                    .iter()
                    .flat_map(|&c| clusters[c].members.iter().copied())
                    .collect();
                members.sort_unstable();
                let id = clusters.len();
                for &c in &children {
                    clusters[c].parent = Some(id);
                }
                clusters.push(Cluster {
                    members,
                    level,
                    valid: false,
                    parent: None,
                    children,
                });
                current[root] = id;
            }
        }
        start = end;
    }

    let mut roots: Vec<usize> = (0..n).map(|i| current[uf.find(i)]).collect();
    roots.sort_unstable();
    roots.dedup();
    if roots.len() > 1 {
        let id = clusters.len();
        for &c in &roots {
            clusters[c].parent = Some(id);
        }
        clusters.push(Cluster {
            members: (0..n).collect(),
            level: f64::INFINITY,
            valid: false,
            parent: None,
            children: roots,
        });
    }

    let mut inside = vec![false; n];
    for c in clusters.iter_mut() {
        for &m in &c.members {
            inside[m] = true;
        }
        c.valid = separated(dist, &c.members, &inside);
        for &m in &c.members {
            inside[m] = false;
        }
    }

    Ok(ClusterTree {
        n,
        clusters,
        thresholds,
    })
}
