//! Runs the selected analyses and assembles the report.

use anyhow::Result;
use serde_json::{json, Map, Value};

use itc_core::cluster::{hierarchical_clusters, ClusterTree};
use itc_core::control::{
    effective_hamiltonian, effective_itc, optimize_switching, piecewise_evolution, ControlField,
    OptimizerConfig, PHASE_GROUP_TOL, UNITARY_TOL,
};
use itc_core::geometry::{
    embed, equivalence_classes, gram_eigenvalues, gram_matrix, gromov_delta, inertia, quotient_metric,
    triangle_audit, GromovConfig, QuotientMetric, TRIANGLE_TOL,
};
use itc_core::itc::{
    attainment_time_estimate, default_dt, find_attainment_time, phase_tolerance, rational_independence_check,
    RelationSearch, DEFAULT_RELATION_BUDGET,
};
use itc_core::model::SYMMETRY_TOL;
use itc_core::{eigendecompose, Error, ItcMatrix, SpinNetwork, Spectrum};

use crate::args::Analysis;
use crate::output::{fmt_f64, matrix, matrix_rows, num, nums, one_based};
use crate::spec::Source;
use crate::Usage;

const DEFAULT_ATTAIN_TMAX: f64 = 1e4;

/// Rows destined for `PREFIX_<suffix>.csv`.
pub struct CsvTable {
    pub suffix: &'static str,
    pub header: Option<Vec<&'static str>>,
    pub rows: Vec<Vec<String>>,
}

pub struct Outcome {
    pub report: Value,
    pub tables: Vec<CsvTable>,
}

struct Run<'a> {
    net: &'a SpinNetwork,
    a: &'a Analysis,
    spectrum: Spectrum,
    itc: ItcMatrix,
    tables: Vec<CsvTable>,
}

/// Converts a 1-based node number from the command line.
fn node(value: Option<usize>, flag: &str, n: usize) -> Result<usize> {
    match value {
        Some(k) if (1..=n).contains(&k) => Ok(k - 1),
        Some(k) => Err(Usage(format!("--{flag} {k} is not a node of this {n}-node network")).into()),
        None => Err(Usage(format!("--{flag} is required")).into()),
    }
}

fn positive(value: f64, flag: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Usage(format!("--{flag} must be positive, got {value}")).into())
    }
}

pub fn run(net: &SpinNetwork, source: Source, a: &Analysis) -> Result<Outcome> {
    if let Some(tol) = a.degeneracy_tol {
        if !(tol >= 0.0) {
            return Err(Usage(format!("--degeneracy-tol must be nonnegative, got {tol}")).into());
        }
    }
    let spectrum = eigendecompose(&net.hamiltonian(), a.degeneracy_tol)?;
    let itc = ItcMatrix::from_spectrum(&spectrum)?;
    let mut run = Run {
        net,
        a,
        spectrum,
        itc,
        tables: Vec::new(),
    };

    let mut report = Map::new();
    report.insert("meta".into(), run.meta());
    report.insert("network".into(), run.network(source));

    let any = a.itc || a.geometry || a.cluster || a.control || a.attain || a.series;
    if a.itc || !any {
        report.insert("itc".into(), run.itc_section());
    }
    if a.geometry {
        report.insert("geometry".into(), run.geometry()?);
    }
    if a.cluster {
        report.insert("clusters".into(), run.clusters()?);
    }
    if a.control {
        report.insert("control".into(), run.control()?);
    }
    if a.attain {
        report.insert("attainability".into(), run.attainability()?);
    }
    if a.series {
        report.insert("series".into(), run.series()?);
    }
    Ok(Outcome {
        report: Value::Object(report),
        tables: run.tables,
    })
}

impl Run<'_> {
    fn n(&self) -> usize {
        self.net.n()
    }

    fn meta(&self) -> Value {
        let a = self.a;
        json!({
            "tool": "spin-itc",
            "version": env!("CARGO_PKG_VERSION"),
            "node_numbering": "1-based",
            "seed": a.seed,
            "tolerances": {
                "symmetry": num(SYMMETRY_TOL),
                "degeneracy": num(self.spectrum.tol_degenerate()),
                "zero": num(a.zero_tol),
                "rank": num(a.rank_tol),
                "triangle": num(TRIANGLE_TOL),
                "relation": num(a.relation_tol),
                "unitary": num(UNITARY_TOL),
                "phase_group": num(PHASE_GROUP_TOL),
            },
        })
    }

    fn network(&self, source: Source) -> Value {
        let mut v = json!({
            "kind": self.net.kind().name(),
            "n": self.n(),
            "source": source.name(),
            "couplings": matrix(self.net.couplings()),
            "eigenvalues": nums(self.spectrum.eigenvalues()),
        });
        if let Some(p) = self.net.positions() {
            v["positions"] = Value::Array(p.iter().map(|xy| nums(xy)).collect());
        }
        v
    }

    fn itc_section(&mut self) -> Value {
        self.tables.push(CsvTable {
            suffix: "dist",
            header: None,
            rows: matrix_rows(self.itc.dist()),
        });
        json!({
            "p_max": matrix(self.itc.p_max()),
            "dist": matrix(self.itc.dist()),
        })
    }

    fn geometry(&mut self) -> Result<Value> {
        let a = self.a;
        if !(a.zero_tol >= 0.0) {
            return Err(Usage(format!("--zero-tol must be nonnegative, got {}", a.zero_tol)).into());
        }
        if !(a.alpha >= 1.0) {
            return Err(Usage(format!("--alpha must be at least 1, got {}", a.alpha)).into());
        }
        let classes = equivalence_classes(&self.itc, a.zero_tol);
        let q = quotient_metric(&self.itc, &classes, a.zero_tol);
        let m = q.len();
        let anchor = match a.anchor {
            None => m - 1,
            Some(_) => {
                let k = node(a.anchor, "anchor", self.n())?;
                q.classes.iter().position(|c| c.contains(&k)).expect("every node has a class")
            }
        };

        let audit = triangle_audit(&q.dist)?;
        let gram = gram_matrix(&q.dist, anchor)?;
        let embedding = match embed(&q.dist, anchor, a.rank_tol) {
            Ok(e) => json!({
                "euclidean": true,
                "dim": e.dim,
                "coordinates": matrix(&e.coordinates),
            }),
            Err(Error::NonEuclidean { min_eigenvalue }) => json!({
                "euclidean": false,
                "min_eigenvalue": num(min_eigenvalue),
            }),
            Err(e) => return Err(e.into()),
        };

        let gcfg = GromovConfig {
            budget: a.gromov_budget,
            seed: a.seed,
            keep_records: true,
        };
        let g = gromov_delta(&q.dist, &gcfg)?;
        let argmax = g
            .records
            .iter()
            .find(|r| r.delta == g.delta_max)
            .map(|r| json!({ "classes": one_based(&r.points), "delta": num(r.delta), "scaled_delta": num(r.scaled_delta) }));
        self.tables.push(CsvTable {
            suffix: "gromov",
            header: Some(vec!["w", "x", "y", "z", "large", "medium", "small", "delta", "scaled_delta"]),
            rows: g
                .records
                .iter()
                .map(|r| {
                    let mut row: Vec<String> = r.points.iter().map(|p| (p + 1).to_string()).collect();
                    row.extend([r.large, r.medium, r.small, r.delta, r.scaled_delta].map(fmt_f64));
                    row
                })
                .collect(),
        });

        let inert = inertia(self.itc.dist(), a.alpha)?;
        self.tables.push(CsvTable {
            suffix: "inertia",
            header: Some(vec!["node", "inertia"]),
            rows: inert
                .inertia
                .iter()
                .enumerate()
                .map(|(i, &v)| vec![(i + 1).to_string(), fmt_f64(v)])
                .collect(),
        });

        Ok(json!({
            "classes": classes.iter().map(|c| one_based(c)).collect::<Vec<_>>(),
            "quotient": quotient_json(&q),
            "triangle_audit": {
                "min_excess": num(audit.min_excess),
                "violations": audit.violations.iter().map(|&(i, j, k, d)| json!([i + 1, j + 1, k + 1, num(d)])).collect::<Vec<_>>(),
            },
            "gram": {
                "anchor_class": anchor + 1,
                "eigenvalues": nums(&gram_eigenvalues(&gram)?),
            },
            "embedding": embedding,
            "gromov": {
                "delta_max": num(g.delta_max),
                "scaled_delta_max": num(g.scaled_delta_max),
                "argmax": argmax,
                "quadruples": g.quadruple_count,
                "sampled": g.sampled,
                "budget": a.gromov_budget,
                "skipped_infinite": g.skipped_infinite,
            },
            "inertia": {
                "alpha": num(inert.alpha),
                "values": nums(&inert.inertia),
                "gravity_centers": one_based(&inert.gravity_centers),
                "anti_gravity_centers": one_based(&inert.anti_gravity_centers),
                "excluded_infinite": inert.excluded_infinite,
            },
        }))
    }

    fn clusters(&mut self) -> Result<Value> {
        let tree = hierarchical_clusters(self.itc.dist())?;
        self.tables.push(CsvTable {
            suffix: "dendrogram",
            header: Some(vec!["id", "parent", "epsilon", "valid", "members"]),
            rows: tree
                .clusters
                .iter()
                .enumerate()
                .map(|(id, c)| {
                    vec![
                        (id + 1).to_string(),
                        c.parent.map_or(String::new(), |p| (p + 1).to_string()),
                        fmt_f64(c.birth()),
                        c.valid.to_string(),
                        one_based(&c.members).iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
                    ]
                })
                .collect(),
        });
        Ok(tree_json(&tree))
    }

    fn control(&mut self) -> Result<Value> {
        let a = self.a;
        let n = self.n();
        let (i, j) = (node(a.from, "from", n)?, node(a.to, "to", n)?);
        let site = node(Some(a.site), "site", n)?;
        positive(a.horizon, "horizon")?;
        if !a.strength.is_finite() {
            return Err(Usage(format!("--strength must be finite, got {}", a.strength)).into());
        }
        let h0 = self.net.hamiltonian();
        let field = ControlField::new(site, a.strength);
        let cfg = OptimizerConfig {
            restarts: a.restarts,
            seed: a.seed,
            ..OptimizerConfig::default()
        };
        let seq = optimize_switching(&h0, field, i, j, a.segments, a.horizon, &cfg)?;
        let h1 = field.hamiltonian(n)?;

        let effective = if seq.final_time() > 0.0 {
            let u = piecewise_evolution(&h0, &h1, &seq)?;
            let h = effective_hamiltonian(&u, seq.final_time())?;
            let p = effective_itc(&h)?;
            json!({
                "p_max": num(p.p_max()[(i, j)]),
                "eigenphases": nums(&h.eigenphases),
                "near_branch_cut": h.near_branch_cut,
                "hermiticity_error": num(h.hermiticity_error()),
            })
        } else {
            Value::Null
        };

        Ok(json!({
            "from": i + 1,
            "to": j + 1,
            "segments": a.segments,
            "horizon": num(a.horizon),
            "restarts": a.restarts,
            "sequence": {
                "site": site + 1,
                "strength": num(seq.strength),
                "switch_times": nums(&seq.switch_times),
                "final_time": num(seq.final_time()),
                "achieved_p": num(seq.achieved_p),
                "seed": a.seed,
            },
            "p_free": num(self.itc.p_max()[(i, j)]),
            "effective": effective,
        }))
    }

    fn attainability(&mut self) -> Result<Value> {
        let a = self.a;
        let n = self.n();
        let (i, j) = (node(a.from, "from", n)?, node(a.to, "to", n)?);
        let eps = positive(a.eps.unwrap_or(f64::NAN), "eps")?;
        let t_max = positive(a.tmax.unwrap_or(DEFAULT_ATTAIN_TMAX), "tmax")?;
        let dt = positive(a.dt.unwrap_or_else(|| default_dt(&self.spectrum)), "dt")?;

        let s = &self.spectrum;
        let hit = find_attainment_time(s, i, j, eps, t_max, dt)?.map(|h| {
            json!({
                "t": num(h.t),
                "p": num(h.p),
                "global_phase": num(h.global_phase),
                "phases": h.phases.iter().map(|r| json!({
                    "eigenvalue": num(r.eigenvalue),
                    "target": num(r.target),
                    "residual": num(r.residual),
                })).collect::<Vec<_>>(),
            })
        });

        let distinct = s.group_eigenvalues();
        let relations = relations_json(&distinct, a)?;
        let estimate = attainment_time_estimate(eps, distinct.len())?;

        Ok(json!({
            "from": i + 1,
            "to": j + 1,
            "eps": num(eps),
            "t_max": num(t_max),
            "dt": num(dt),
            "p_max": num(self.itc.p_max()[(i, j)]),
            "phase_tolerance": phase_tolerance(eps, n).map(num).unwrap_or(Value::Null),
            "hit": hit,
            "relations": relations,
            "estimate": {
                "dimension": distinct.len(),
                "translation_steps": num(estimate.steps),
                "overflowed": estimate.overflowed,
            },
        }))
    }

    fn series(&mut self) -> Result<Value> {
        let a = self.a;
        let n = self.n();
        let (i, j) = (node(a.from, "from", n)?, node(a.to, "to", n)?);
        let t_max = positive(a.tmax.unwrap_or(f64::NAN), "tmax")?;
        let dt = positive(a.dt.unwrap_or(f64::NAN), "dt")?;
        if dt > t_max {
            return Err(Usage(format!("--dt {dt} exceeds --tmax {t_max}")).into());
        }
        let pts = self.spectrum.probability_time_series(i, j, t_max, dt)?;
        let max_p = pts.iter().map(|p| p.1).fold(0.0, f64::max);
        self.tables.push(CsvTable {
            suffix: "series",
            header: Some(vec!["t", "p"]),
            rows: pts.iter().map(|&(t, p)| vec![fmt_f64(t), fmt_f64(p)]).collect(),
        });
        let (ts, ps): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        Ok(json!({
            "from": i + 1,
            "to": j + 1,
            "t_max": num(t_max),
            "dt": num(dt),
            "points": ts.len(),
            "max_p": num(max_p),
            "p_max": num(self.itc.p_max()[(i, j)]),
            "t": nums(&ts),
            "p": nums(&ps),
        }))
    }
}

fn quotient_json(q: &QuotientMetric) -> Value {
    json!({
        "dist": matrix(&q.dist),
        "max_spread": num(q.max_spread),
        "well_defined": q.is_well_defined(),
    })
}

fn tree_json(tree: &ClusterTree) -> Value {
    let clusters: Vec<Value> = tree
        .clusters
        .iter()
        .enumerate()
        .map(|(id, c)| {
            json!({
                "id": id + 1,
                "members": one_based(&c.members),
                "level": num(c.level),
                "birth": num(c.birth()),
                "valid": c.valid,
                "parent": c.parent.map(|p| p + 1),
                "children": one_based(&c.children),
            })
        })
        .collect();
    json!({
        "root": tree.root() + 1,
        "thresholds": nums(&tree.thresholds),
        "clusters": clusters,
    })
}

/// Relations among `λ_k/π` and 1. The coefficient bound is lowered until the
/// search fits the budget.
fn relations_json(eigenvalues: &[f64], a: &Analysis) -> Result<Value> {
    let mut cfg = RelationSearch {
        include_unit: true,
        max_coeff: a.max_coeff,
        tol_relation: a.relation_tol,
        budget: DEFAULT_RELATION_BUDGET,
    };
    loop {
        match rational_independence_check(eigenvalues, &cfg) {
            Ok(found) => {
                return Ok(json!({
                    "include_unit": true,
                    "max_coeff": cfg.max_coeff,
                    "requested_max_coeff": a.max_coeff,
                    "found": found.iter().map(|r| json!({
                        "coefficients": r.coefficients,
                        "residual": num(r.residual),
                    })).collect::<Vec<_>>(),
                }))
            }
            Err(Error::BudgetExceeded { .. }) if cfg.max_coeff > 1 => cfg.max_coeff -= 1,
            Err(Error::BudgetExceeded { required, budget }) => {
                return Ok(json!({
                    "include_unit": true,
                    "skipped": format!("{required} candidates exceed the budget of {budget}"),
                }))
            }
            Err(e) => return Err(e.into()),
        }
    }
}
