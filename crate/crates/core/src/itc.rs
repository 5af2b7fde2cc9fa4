//! Maximum information transfer capacity (ITC) and its attainability.
//!
//! For a pair of nodes the transfer amplitude is `Σ_g <i|P_g|j> e^{-iλ_g t}`
//! over the eigenspace projectors `P_g`, so its modulus never exceeds
//! `Σ_g |<i|P_g|j>|`. The square of that sum is the maximum transfer
//! probability `p_max`, and `d = -ln p_max` is the ITC distance. When the
//! eigenvalues are rationally independent the bound is approached
//! arbitrarily closely as `t` grows.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::SpinNetwork;
use crate::spectral::{eigendecompose, PairScan, Spectrum, TimeGrid};

/// Default cap on the number of integer vectors visited by
/// [`rational_independence_check`].
pub const DEFAULT_RELATION_BUDGET: u128 = 50_000_000;

/// Maximum transfer probability between nodes `i` and `j`.
pub fn max_transfer_probability(s: &Spectrum, i: usize, j: usize) -> Result<f64> {
    let amp: f64 = s.projector_elements(i, j)?.iter().map(|x| x.abs()).sum();
    if i == j {
        // the projectors resolve the identity
        return Ok(1.0);
    }
    Ok((amp * amp).clamp(0.0, 1.0))
}

/// `-ln p`, with `+inf` for `p = 0`.
pub fn itc_distance(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    // max() folds -0.0 into +0.0
    Ok((-p.ln()).max(0.0))
}

/// Pairwise maximum transfer probabilities and ITC distances.
#[derive(Debug, Clone, PartialEq)]
pub struct ItcMatrix {
    p_max: DMatrix<f64>,
    dist: DMatrix<f64>,
}

impl ItcMatrix {
    pub fn from_spectrum(s: &Spectrum) -> Result<Self> {
        let n = s.dim();
        let mut p_max = DMatrix::identity(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let p = max_transfer_probability(s, i, j)?;
                p_max[(i, j)] = p;
                p_max[(j, i)] = p;
            }
        }
        Self::from_probabilities(p_max)
    }

    /// Builds the distance matrix from a symmetric probability matrix with unit diagonal.
    pub fn from_probabilities(p_max: DMatrix<f64>) -> Result<Self> {
        let n = p_max.nrows();
        if p_max.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: p_max.ncols(),
            });
        }
        let mut dist = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                dist[(i, j)] = itc_distance(p_max[(i, j)])?;
            }
        }
        Ok(ItcMatrix { p_max, dist })
    }

    pub fn n(&self) -> usize {
        self.p_max.nrows()
    }

    pub fn p_max(&self) -> &DMatrix<f64> {
        &self.p_max
    }

    pub fn dist(&self) -> &DMatrix<f64> {
        &self.dist
    }
}

pub fn itc_matrix(net: &SpinNetwork) -> Result<ItcMatrix> {
    let s = eigendecompose(&net.hamiltonian(), None)?;
    ItcMatrix::from_spectrum(&s)
}

/// Default scan step `0.01 / ‖H‖`, far below the period of the fastest phase.
pub fn default_dt(s: &Spectrum) -> f64 {
    if s.norm() > 0.0 {
        0.01 / s.norm()
    } else {
        0.01
    }
}

/// `p_max - max_t p(t)` over a uniform grid on `[0, t_max]`.
pub fn verify_bound_by_scan(s: &Spectrum, i: usize, j: usize, t_max: f64, dt: f64) -> Result<f64> {
    let bound = max_transfer_probability(s, i, j)?;
    let scan = PairScan::new(s, i, j)?;
    let best = TimeGrid::new(t_max, dt)?
        .iter()
        .map(|t| scan.probability(t))
        .fold(0.0, f64::max);
    Ok(bound - best)
}

/// An integer vector `m` with `|Σ m_k x_k| < tol`, where `x_k = λ_k/π`
/// (plus a trailing `1` when the translation case is requested).
#[derive(Debug, Clone, PartialEq)]
pub struct RationalRelation {
    pub coefficients: Vec<i64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RelationSearch {
    pub include_unit: bool,
    pub max_coeff: u32,
    pub tol_relation: f64,
    pub budget: u128,
}

impl Default for RelationSearch {
    fn default() -> Self {
        RelationSearch {
            include_unit: false,
            max_coeff: 5,
            tol_relation: 1e-9,
            budget: DEFAULT_RELATION_BUDGET,
        }
    }
}

/// Exhaustive search for small integer relations among `λ_k/π`.
///
/// Relations are reported once per line: primitive (gcd 1) with the first
/// nonzero coefficient positive. An empty result means no relation of
/// height `<= max_coeff` exists, which is evidence (not proof) of rational
/// independence.
pub fn rational_independence_check(
    eigenvalues: &[f64],
    cfg: &RelationSearch,
) -> Result<Vec<RationalRelation>> {
    if cfg.max_coeff < 1 {
        return Err(Error::InvalidArgument("max_coeff must be at least 1".into()));
    }
    let mut x: Vec<f64> = eigenvalues.iter().map(|l| l / PI).collect();
    if cfg.include_unit {
        x.push(1.0);
    }
    let dims = x.len();
    if dims == 0 {
        return Ok(Vec::new());
    }
    let width = 2 * cfg.max_coeff as u128 + 1;
    let required = width
        .checked_pow(dims as u32)
        .map(|c| c - 1)
        .unwrap_or(u128::MAX);
    if required > cfg.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: cfg.budget,
        });
    }

    let c = cfg.max_coeff as i64;
    let mut m = vec![-c; dims];
    let mut relations = Vec::new();
    loop {
        if let Some(lead) = m.iter().find(|&&v| v != 0) {
            if *lead > 0 && gcd_all(&m) == 1 {
                let residual = m
                    .iter()
                    .zip(&x)
                    .map(|(&mk, &xk)| mk as f64 * xk)
                    .sum::<f64>()
                    .abs();
                if residual < cfg.tol_relation {
                    relations.push(RationalRelation {
                        coefficients: m.clone(),
                        residual,
                    });
                }
            }
        }
        // odometer increment
        let mut pos = dims;
        loop {
            if pos == 0 {
                return Ok(relations);
            }
            pos -= 1;
            if m[pos] < c {
                m[pos] += 1;
                break;
            }
            m[pos] = -c;
        }
    }
}

fn gcd_all(m: &[i64]) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    m.iter().fold(0, |acc, &v| gcd(acc, v))
}

/// Per-coordinate phase tolerance `arcsin(ε / 2n)` that guarantees
/// `p_max - p < ε` once every phase is within it of its target.
pub fn phase_tolerance(epsilon: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let ratio = epsilon / (2.0 * n as f64);
    if ratio > 1.0 {
        return Err(Error::Domain(format!(
            "epsilon / 2n = {ratio} exceeds 1; arcsin undefined"
        )));
    }
    Ok(ratio.asin())
}

/// Distance of one eigen-phase from the value that maximises the amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResidual {
    pub eigenvalue: f64,
    /// `π` when `<i|P_g|j>` is negative, else `0`.
    pub target: f64,
    /// Circular distance between `target` and `-λ t` once the amplitude's
    /// own phase is removed; only relative phases matter.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attainment {
    pub t: f64,
    pub p: f64,
    pub p_max: f64,
    /// Argument of `<j|e^{-iHt}|i>` at `t`.
    pub global_phase: f64,
    pub phases: Vec<PhaseResidual>,
}

/// First grid time at which `p_max - p(t) < epsilon`, if any.
pub fn find_attainment_time(
    s: &Spectrum,
    i: usize,
    j: usize,
    epsilon: f64,
    t_max: f64,
    dt: f64,
) -> Result<Option<Attainment>> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let p_max = max_transfer_probability(s, i, j)?;
    let scan = PairScan::new(s, i, j)?;
    let grid = TimeGrid::new(t_max, dt)?;
    let hit = grid
        .iter()
        .map(|t| (t, scan.probability(t)))
        .find(|&(_, p)| p_max - p < epsilon);
    let Some((t, p)) = hit else {
        return Ok(None);
    };
    let weights = s.projector_elements(i, j)?;
    let lambdas = s.group_eigenvalues();
    let (re, im) = lambdas
        .iter()
        .zip(&weights)
        .fold((0.0, 0.0), |(re, im), (l, w)| (re + w * (l * t).cos(), im - w * (l * t).sin()));
    let global_phase = im.atan2(re);
    let phases = lambdas
        .into_iter()
        .zip(weights)
        .map(|(l, w)| {
            let target = if w < 0.0 { PI } else { 0.0 };
            let phase = (-l * t - global_phase).rem_euclid(TAU);
            let diff = (phase - target).abs();
            PhaseResidual {
                eigenvalue: l,
                target,
                residual: diff.min(TAU - diff),
            }
        })
        .collect();
    Ok(Some(Attainment {
        t,
        p,
        p_max,
        global_phase,
        phases,
    }))
}

/// Best constant `c̄_n` in simultaneous Diophantine approximation (lower
/// bounds for `n >= 3`).
pub fn nowak_constant(n: usize) -> Result<f64> {
    match n {
        0 => Err(Error::Domain("n must be at least 1".into())),
        1 => Ok(5f64.sqrt()),
        2 => Ok(23f64.sqrt() / 2.0),
        3 => Ok(1.7739),
        _ => Ok(nowak_lower_bound(n)),
    }
}

/// `(n+1)^((n+1)/2) n^(-n/2) (π/2)^((n+1)/2) / Γ((n+5)/2)`, evaluated in logs.
pub(crate) fn nowak_lower_bound(n: usize) -> f64 {
    let nf = n as f64;
    let log = 0.5 * (nf + 1.0) * (nf + 1.0).ln() - 0.5 * nf * nf.ln()
        + 0.5 * (nf + 1.0) * (PI / 2.0).ln()
        - libm::lgamma(0.5 * (nf + 5.0));
    log.exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeEstimate {
    /// Number of discrete translation steps; `+inf` on overflow.
    pub steps: f64,
    pub overflowed: bool,
}

/// `π^n / (c̄_n ε^n)`: steps of the torus translation needed to come within
/// an ℓ¹ radius `ε` of a target point.
pub fn attainment_time_estimate(epsilon: f64, n: usize) -> Result<TimeEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let c = nowak_constant(n)?;
    let nf = n as f64;
    let log = nf * PI.ln() - c.ln() - nf * epsilon.ln();
    if log >= f64::MAX.ln() {
        return Ok(TimeEstimate {
            steps: f64::INFINITY,
            overflowed: true,
        });
    }
    Ok(TimeEstimate {
        steps: PI.powi(n as i32) / (c * epsilon.powi(n as i32)),
        overflowed: false,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::model::{CouplingKind, SymmetricMatrix};

    fn spectrum(n: usize, kind: CouplingKind) -> Spectrum {
        eigendecompose(&SpinNetwork::chain(n, kind, 1.0).unwrap().hamiltonian(), None).unwrap()
    }

    #[test]
    fn pmax_examples() {
        let s = spectrum(3, CouplingKind::Xx);
        assert_eq!(max_transfer_probability(&s, 1, 1).unwrap(), 1.0);
        assert_abs_diff_eq!(max_transfer_probability(&s, 0, 2).unwrap(), 1.0, epsilon = 1e-12);

        // v_k(n) ∝ sin(n k π / 8): independent closed form for the N = 7 chain.
        let closed: f64 = (1..=7)
            .map(|k| {
                let kf = k as f64 * PI / 8.0;
                (kf.sin() * (4.0 * kf).sin()).abs() / 4.0
            })
            .sum();
        let s = spectrum(7, CouplingKind::Xx);
        let p = max_transfer_probability(&s, 0, 3).unwrap();
        assert_abs_diff_eq!(p, closed * closed, epsilon = 1e-12);
        assert_abs_diff_eq!(p, 0.4268, epsilon = 5e-5);

        let s = spectrum(3, CouplingKind::Heisenberg);
        assert_abs_diff_eq!(max_transfer_probability(&s, 0, 1).unwrap(), 4.0 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn distance_values() {
        assert_eq!(itc_distance(1.0).unwrap(), 0.0);
        assert!(itc_distance(1.0).unwrap().is_sign_positive());
        assert_eq!(itc_distance(0.0).unwrap(), f64::INFINITY);
        assert_abs_diff_eq!(itc_distance(4.0 / 9.0).unwrap(), 0.8109, epsilon = 5e-5);
        assert_abs_diff_eq!(itc_distance(0.5).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert!(itc_distance(1.0 + 1e-9).is_err());
        assert!(itc_distance(-0.1).is_err());
        assert!(itc_distance(f64::NAN).is_err());
    }

    #[test]
    fn matrix_examples() {
        let m = itc_matrix(&SpinNetwork::chain(2, CouplingKind::Xx, 1.0).unwrap()).unwrap();
        assert!(m.p_max().iter().all(|&p| (p - 1.0).abs() < 1e-12));
        assert!(m.dist().iter().all(|&d| d < 1e-12));

        let m = itc_matrix(&SpinNetwork::chain(3, CouplingKind::Xx, 1.0).unwrap()).unwrap();
        let ln2 = 2f64.ln();
        assert_abs_diff_eq!(m.dist()[(0, 1)], ln2, epsilon = 1e-12);
        assert_abs_diff_eq!(m.dist()[(1, 2)], ln2, epsilon = 1e-12);
        assert_abs_diff_eq!(m.dist()[(0, 2)], 0.0, epsilon = 1e-12);
        for i in 0..3 {
            assert_eq!(m.p_max()[(i, i)], 1.0);
            assert_eq!(m.dist()[(i, i)], 0.0);
        }
        assert_eq!(m.p_max(), &m.p_max().transpose());
    }

    #[test]
    fn scan_gap() {
        let s = spectrum(3, CouplingKind::Xx);
        assert_eq!(verify_bound_by_scan(&s, 2, 2, 1.0, 0.1).unwrap(), 0.0);
        let s = spectrum(2, CouplingKind::Xx);
        let gap = verify_bound_by_scan(&s, 0, 1, TAU, FRAC_PI_2 / 1000.0).unwrap();
        assert!(gap.abs() <= 1e-9, "gap {gap}");
    }

    #[test]
    fn relations() {
        let r = rational_independence_check(&[PI, 2.0 * PI], &RelationSearch::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].coefficients, vec![2, -1]);
        assert_eq!(r[0].residual, 0.0);

        let r = rational_independence_check(&[-SQRT_2, 0.0, SQRT_2], &RelationSearch::default()).unwrap();
        let coeffs: Vec<_> = r.iter().map(|x| x.coefficients.clone()).collect();
        assert!(coeffs.contains(&vec![1, 0, 1]));
        assert!(coeffs.contains(&vec![0, 1, 0]));

        let r = rational_independence_check(&[SQRT_2 * PI, 3f64.sqrt() * PI], &RelationSearch::default())
            .unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn relation_with_unit_slot() {
        // λ/π = 1/2 satisfies 2·(1/2) - 1 = 0 only once the constant is included.
        let cfg = RelationSearch {
            include_unit: true,
            ..Default::default()
        };
        let r = rational_independence_check(&[FRAC_PI_2], &cfg).unwrap();
        assert_eq!(r[0].coefficients, vec![2, -1]);
        assert!(rational_independence_check(&[FRAC_PI_2], &RelationSearch::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn relation_budget() {
        let cfg = RelationSearch {
            budget: 1000,
            ..Default::default()
        };
        let err = rational_independence_check(&[1.0; 4], &cfg).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                required: 11u128.pow(4) - 1,
                budget: 1000
            }
        );
    }

    #[test]
    fn phase_tolerances() {
        assert_abs_diff_eq!(phase_tolerance(0.2, 10).unwrap(), 0.01f64.asin(), epsilon = 1e-15);
        assert_abs_diff_eq!(phase_tolerance(0.2, 10).unwrap(), 0.010000, epsilon = 1e-6);
        assert_abs_diff_eq!(phase_tolerance(14.0, 7).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(phase_tolerance(0.01, 7).unwrap(), 7.1429e-4, epsilon = 5e-8);
        assert!(phase_tolerance(14.1, 7).is_err());
        assert!(phase_tolerance(0.0, 7).is_err());
    }

    #[test]
    fn attainment() {
        let s = spectrum(4, CouplingKind::Xx);
        let a = find_attainment_time(&s, 2, 2, 0.1, 10.0, 0.01).unwrap().unwrap();
        assert_eq!((a.t, a.p), (0.0, 1.0));

        let s = spectrum(2, CouplingKind::Xx);
        let a = find_attainment_time(&s, 0, 1, 0.01, 10.0, 0.001).unwrap().unwrap();
        // sin²t > 0.99 first when t > asin(√0.99)
        let first = 0.99f64.sqrt().asin();
        assert!(a.t >= first && a.t < first + 0.001 + 1e-12, "t = {}", a.t);
        assert_abs_diff_eq!(a.t, FRAC_PI_2, epsilon = 0.1);

        let s = spectrum(3, CouplingKind::Xx);
        let a = find_attainment_time(&s, 0, 2, 0.01, 10.0, 0.001).unwrap().unwrap();
        assert_abs_diff_eq!(a.t, PI / SQRT_2, epsilon = 0.15);
        assert!(a.p_max - a.p < 0.01);
        assert_eq!(a.phases.len(), 3);

        // nothing qualifies on a window that stops short of the first peak
        let s = spectrum(2, CouplingKind::Xx);
        assert!(find_attainment_time(&s, 0, 1, 0.01, 1.0, 0.001).unwrap().is_none());
    }

    #[test]
    fn phase_residuals_vanish_at_exact_attainment() {
        let s = spectrum(2, CouplingKind::Xx);
        let a = find_attainment_time(&s, 0, 1, 1e-9, 2.0, FRAC_PI_2).unwrap().unwrap();
        assert_abs_diff_eq!(a.t, FRAC_PI_2, epsilon = 1e-15);
        // <2|e^{-iHπ/2}|1> = -i
        assert_abs_diff_eq!(a.global_phase, -FRAC_PI_2, epsilon = 1e-12);
        for r in &a.phases {
            assert!(r.residual < 1e-12, "{r:?}");
        }

        // near a peak the residuals shrink with the gap to p_max
        let s = spectrum(3, CouplingKind::Xx);
        let a = find_attainment_time(&s, 0, 2, 1e-6, 10.0, 1e-4).unwrap().unwrap();
        assert!(a.phases.iter().all(|r| r.residual < 5e-3), "{:?}", a.phases);
    }

    /// Γ(x) for integer or half-integer x, by the recurrence from Γ(1) = 1, Γ(1/2) = √π.
    fn gamma_half_integer(x: f64) -> f64 {
        let (mut g, mut a) = if x.fract() == 0.0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
        while a < x - 1e-12 {
            g *= a;
            a += 1.0;
        }
        g
    }

    #[test]
    fn nowak_constants() {
        assert_eq!(nowak_constant(1).unwrap(), 5f64.sqrt());
        assert_eq!(nowak_constant(2).unwrap(), 23f64.sqrt() / 2.0);
        assert_eq!(nowak_constant(3).unwrap(), 1.7739);
        assert!(nowak_constant(0).is_err());
        for n in 4..=12usize {
            let nf = n as f64;
            let direct = (nf + 1.0).powf((nf + 1.0) / 2.0) * nf.powf(-nf / 2.0) * (PI / 2.0).powf((nf + 1.0) / 2.0)
                / gamma_half_integer((nf + 5.0) / 2.0);
            let got = nowak_constant(n).unwrap();
            assert!((got - direct).abs() <= 1e-12 * direct, "n={n}: {got} vs {direct}");
        }
    }

    #[test]
    fn time_estimates() {
        assert_abs_diff_eq!(attainment_time_estimate(PI, 1).unwrap().steps, 1.0 / 5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(attainment_time_estimate(0.1, 1).unwrap().steps, 14.050, epsilon = 5e-4);
        let direct = PI * PI / (23f64.sqrt() / 2.0 * 0.01);
        assert_abs_diff_eq!(attainment_time_estimate(0.1, 2).unwrap().steps, direct, epsilon = 1e-9);
        assert_abs_diff_eq!(direct, 411.59, epsilon = 5e-3);
        let huge = attainment_time_estimate(1e-30, 20).unwrap();
        assert!(huge.overflowed && huge.steps.is_infinite());
        assert!(attainment_time_estimate(0.0, 2).is_err());
    }

    #[test]
    fn gauge_invariance_simple() {
        let h = SpinNetwork::chain(6, CouplingKind::Heisenberg, 1.0).unwrap().hamiltonian();
        let a = ItcMatrix::from_spectrum(&eigendecompose(&h, None).unwrap()).unwrap();
        let shifted: SymmetricMatrix = h.affine(2.5, -7.0);
        let b = ItcMatrix::from_spectrum(&eigendecompose(&shifted, None).unwrap()).unwrap();
        let diff = (a.p_max() - b.p_max()).abs().max();
        assert!(diff < 1e-12, "{diff}");
    }
}
