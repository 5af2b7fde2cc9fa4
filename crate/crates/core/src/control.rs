//! Bang-bang control of excitation transfer.
//!
//! The control field is switched between off (`H0`) and on (`H0 + H1`). The
//! first segment `(0, t1]` is free, the second driven, and so on. Switching
//! times are chosen to maximise the transfer probability between two nodes.
//! The resulting propagator defines an effective Hamiltonian whose maximum
//! transfer probabilities can be compared with the free network's.

mod simplex;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::itc::{default_dt, ItcMatrix};
use crate::model::SymmetricMatrix;
use crate::spectral::{eigendecompose, group_sorted, CMatrix, PairScan, Spectrum, TimeGrid, UnitaryMatrix, C64};

pub use simplex::{minimize, SimplexOptions, SimplexResult};

pub const DEFAULT_STRENGTH: f64 = 2.0;
pub const DEFAULT_SEGMENTS: usize = 16;
pub const DEFAULT_HORIZON: f64 = 30.0;
pub const DEFAULT_RESTARTS: usize = 20;
/// Tolerance on `max |U†U - I|` for every propagator handed out.
pub const UNITARY_TOL: f64 = 1e-9;
/// Segments shorter than this are folded into their neighbours.
const MIN_DURATION: f64 = 1e-12;
pub const PHASE_GROUP_TOL: f64 = 1e-9;
const BRANCH_CUT_MARGIN: f64 = 1e-6;

/// `strength · e_site e_siteᵀ`: a σ_z field on one spin, restricted to the
/// one-excitation subspace, with the identity part dropped.
pub fn control_hamiltonian(n: usize, site: usize, strength: f64) -> Result<SymmetricMatrix> {
    if site >= n {
        return Err(Error::IndexOutOfRange { index: site, n });
    }
    if !strength.is_finite() {
        return Err(Error::InvalidArgument(format!("control strength {strength}")));
    }
    let mut m = DMatrix::zeros(n, n);
    m[(site, site)] = strength;
    SymmetricMatrix::new(m, 0.0)
}

/// Uniform field of the given strength on one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlField {
    pub site: usize,
    pub strength: f64,
}

impl ControlField {
    pub fn new(site: usize, strength: f64) -> Self {
        ControlField { site, strength }
    }

    pub fn hamiltonian(&self, n: usize) -> Result<SymmetricMatrix> {
        control_hamiltonian(n, self.site, self.strength)
    }
}

/// Switching times `t1 < t2 < ... < tM`; segment `k` runs under `H0` for
/// even `k` and `H0 + H1` for odd `k` (zero-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSequence {
    pub site: usize,
    pub strength: f64,
    pub switch_times: Vec<f64>,
    pub achieved_p: f64,
}

impl ControlSequence {
    /// Sequence from switch times; `achieved_p` is left at zero.
    pub fn new(site: usize, strength: f64, switch_times: Vec<f64>) -> Result<Self> {
        check_times(&switch_times)?;
        Ok(ControlSequence {
            site,
            strength,
            switch_times,
            achieved_p: 0.0,
        })
    }

    /// Free evolution up to `t`.
    pub fn free(site: usize, strength: f64, t: f64) -> Result<Self> {
        let times = if t > 0.0 { vec![t] } else { Vec::new() };
        Self::new(site, strength, times)
    }

    pub fn final_time(&self) -> f64 {
        self.switch_times.last().copied().unwrap_or(0.0)
    }

    pub fn segments(&self) -> usize {
        self.switch_times.len()
    }

    pub fn durations(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.switch_times
            .iter()
            .map(|&t| {
                let d = t - prev;
                prev = t;
                d
            })
            .collect()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for (index, &t) in times.iter().enumerate() {
        if !(t > prev && t.is_finite()) {
            return Err(Error::NonIncreasingTimes { index });
        }
        prev = t;
    }
    Ok(())
}

/// Spectra of the free and driven Hamiltonians, shared by every evaluation.
#[derive(Debug, Clone)]
pub struct SwitchedSystem {
    free: Spectrum,
    driven: Spectrum,
}

impl SwitchedSystem {
    pub fn new(h0: &SymmetricMatrix, h1: &SymmetricMatrix) -> Result<Self> {
        let driven = h0.add(h1)?;
        Ok(SwitchedSystem {
            free: eigendecompose(h0, None)?,
            driven: eigendecompose(&driven, None)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.free.dim()
    }

    pub fn free(&self) -> &Spectrum {
        &self.free
    }

    pub fn driven(&self) -> &Spectrum {
        &self.driven
    }

    fn segment(&self, k: usize) -> &Spectrum {
        if k.is_multiple_of(2) {
            &self.free
        } else {
            &self.driven
        }
    }

    /// Product of segment propagators for the given durations.
    pub fn evolution(&self, durations: &[f64]) -> Result<UnitaryMatrix> {
        let mut u = UnitaryMatrix::identity(self.dim());
        for (k, &tau) in durations.iter().enumerate() {
            u = self.segment(k).propagator(tau)?.compose(&u);
        }
        let deviation = u.deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    /// `|<j|U|i>|²`, propagating only the initial basis state.
    pub fn transfer_probability(&self, durations: &[f64], i: usize, j: usize) -> Result<f64> {
        self.free.check_index(i)?;
        self.free.check_index(j)?;
        let mut re = DVector::zeros(self.dim());
        let mut im = DVector::zeros(self.dim());
        re[i] = 1.0;
        for (k, &tau) in durations.iter().enumerate() {
            apply_segment(self.segment(k), tau, &mut re, &mut im);
        }
        Ok(re[j] * re[j] + im[j] * im[j])
    }
}

/// `ψ ← V e^{-iΛτ} Vᵀ ψ` with ψ split into real and imaginary parts.
fn apply_segment(s: &Spectrum, tau: f64, re: &mut DVector<f64>, im: &mut DVector<f64>) {
    if tau == 0.0 {
        return;
    }
    let v = s.eigenvectors();
    let mut a = v.tr_mul(re);
    let mut b = v.tr_mul(im);
    for (k, &l) in s.eigenvalues().iter().enumerate() {
        let (sin, cos) = (-l * tau).sin_cos();
        let (x, y) = (a[k], b[k]);
        a[k] = x * cos - y * sin;
        b[k] = x * sin + y * cos;
    }
    *re = v * a;
    *im = v * b;
}

pub fn piecewise_evolution(
    h0: &SymmetricMatrix,
    h1: &SymmetricMatrix,
    seq: &ControlSequence,
) -> Result<UnitaryMatrix> {
    check_times(&seq.switch_times)?;
    SwitchedSystem::new(h0, h1)?.evolution(&seq.durations())
}

pub fn controlled_transfer_probability(
    h0: &SymmetricMatrix,
    h1: &SymmetricMatrix,
    seq: &ControlSequence,
    i: usize,
    j: usize,
) -> Result<f64> {
    check_times(&seq.switch_times)?;
    SwitchedSystem::new(h0, h1)?.transfer_probability(&seq.durations(), i, j)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Objective evaluations allowed per simplex run.
    pub max_evals: usize,
    /// Simplex runs from the incumbent before a restart gives up.
    pub max_rebuilds: usize,
    /// Grid step for the free-evolution baseline; `None` uses the default scan step.
    pub free_dt: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            max_evals: 4000,
            max_rebuilds: 30,
            free_dt: None,
        }
    }
}

/// Maps unconstrained parameters to nonnegative durations with total at most `horizon`.
fn durations_from(x: &[f64], horizon: f64) -> Vec<f64> {
    let mut d: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let total: f64 = d.iter().sum();
    if total > horizon {
        let scale = horizon / total;
        d.iter_mut().for_each(|v| *v *= scale);
    }
    d
}

/// Drops negligible segments, merging the neighbours they separated. A
/// negligible leading free segment is kept at `MIN_DURATION` so the driven
/// segment still comes second.
fn canonical_times(durations: &[f64]) -> Vec<f64> {
    let mut segs: Vec<f64> = Vec::with_capacity(durations.len());
    for (k, &d) in durations.iter().enumerate() {
        if k == 0 {
            segs.push(d.max(MIN_DURATION));
            continue;
        }
        if d < MIN_DURATION {
            segs.push(0.0);
        } else {
            segs.push(d);
        }
    }
    // merge around zero-length interior segments, preserving parity
    let mut merged: Vec<f64> = Vec::with_capacity(segs.len());
    let mut k = 0;
    while k < segs.len() {
        if segs[k] == 0.0 {
            if k + 1 < segs.len() {
                if let Some(last) = merged.last_mut() {
                    *last += segs[k + 1];
                }
                k += 2;
            } else {
                k += 1;
            }
            continue;
        }
        merged.push(segs[k]);
        k += 1;
    }
    let mut t = 0.0;
    merged
        .into_iter()
        .map(|d| {
            t += d;
            t
        })
        .collect()
}

/// Best free-evolution time on a grid over `[0, horizon]`.
fn free_baseline(sys: &SwitchedSystem, i: usize, j: usize, horizon: f64, dt: f64) -> Result<(f64, f64)> {
    let scan = PairScan::new(sys.free(), i, j)?;
    let mut best = (0.0, scan.probability(0.0));
    for t in TimeGrid::new(horizon, dt)?.iter() {
        let p = scan.probability(t);
        if p > best.1 {
            best = (t, p);
        }
    }
    Ok(best)
}

/// Maximises the `i → j` transfer probability over `segments` switching
/// times within `(0, horizon]`.
///
/// Each restart draws random durations and runs Nelder–Mead, rebuilding the
/// simplex around the incumbent until it stops improving. The best of the
/// restarts and of free evolution on a grid is returned; `segments = 0`
/// returns the free-evolution result alone. Restarts are seeded from
/// `cfg.seed` and the restart index, so results do not depend on thread count.
pub fn optimize_switching(
    h0: &SymmetricMatrix,
    field: ControlField,
    i: usize,
    j: usize,
    segments: usize,
    horizon: f64,
    cfg: &OptimizerConfig,
) -> Result<ControlSequence> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    let ControlField { site, strength } = field;
    let h1 = field.hamiltonian(h0.dim())?;
    let sys = SwitchedSystem::new(h0, &h1)?;
    sys.free().check_index(i)?;
    sys.free().check_index(j)?;

    let dt = cfg.free_dt.unwrap_or_else(|| default_dt(sys.free()));
    let (t_free, _) = free_baseline(&sys, i, j, horizon, dt)?;
    let mut best_times = if t_free > 0.0 { vec![t_free] } else { Vec::new() };
    let mut best_p = sys.transfer_probability(&ControlSequence::free(site, strength, t_free)?.durations(), i, j)?;

    if segments > 0 {
        let objective = |x: &[f64]| -> f64 {
            let d = durations_from(x, horizon);
            -sys.transfer_probability(&d, i, j).unwrap_or(0.0)
        };
        let opts = SimplexOptions {
            max_evals: cfg.max_evals,
            ..SimplexOptions::default()
        };
        let runs: Vec<(usize, Vec<f64>, f64)> = (0..cfg.restarts)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(r as u64);
                let mean = horizon / segments as f64;
                let mut x: Vec<f64> = (0..segments).map(|_| rng.gen_range(0.0..2.0 * mean)).collect();
                let mut fx = objective(&x);
                for _ in 0..cfg.max_rebuilds {
                    let step = 0.1 * mean;
                    let res = minimize(objective, &x, step, &opts);
                    let improved = fx - res.value;
                    if res.value < fx {
                        x = res.point;
                        fx = res.value;
                    }
                    if improved < 1e-12 {
                        break;
                    }
                }
                let times = canonical_times(&durations_from(&x, horizon));
                let p = sys
                    .transfer_probability(&to_durations(&times), i, j)
                    .unwrap_or(0.0);
                (r, times, p)
            })
            .collect();
        for (_, times, p) in runs {
            if p > best_p {
                best_p = p;
                best_times = times;
            }
        }
    }

    let mut seq = ControlSequence::new(site, strength, best_times)?;
    seq.achieved_p = sys.transfer_probability(&seq.durations(), i, j)?;
    Ok(seq)
}

fn to_durations(times: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    times
        .iter()
        .map(|&t| {
            let d = t - prev;
            prev = t;
            d
        })
        .collect()
}

/// Hermitian generator `H_eff` with `exp(-i H_eff t) = U` on the principal branch.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub matrix: CMatrix,
    pub horizon: f64,
    /// Principal eigenphases of `U`, in `(-π, π]`.
    pub eigenphases: Vec<f64>,
    /// Some eigenphase lies within `1e-6` of `±π`, where the logarithm is not unique.
    pub near_branch_cut: bool,
}

impl EffectiveHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |H - H†|`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `exp(-i H_eff t)` from a fresh Hermitian eigendecomposition of `matrix`.
    pub fn propagator(&self, t: f64) -> Result<CMatrix> {
        let (values, w) = crate::eig::hermitian(&self.matrix)?;
        let phases = DVector::from_iterator(
            self.dim(),
            values.iter().map(|&l| C64::from_polar(1.0, -l * t)),
        );
        Ok(&w * CMatrix::from_diagonal(&phases) * w.adjoint())
    }
}

fn hermitian_part(u: &CMatrix) -> CMatrix {
    (u + u.adjoint()) * C64::new(0.5, 0.0)
}

fn antihermitian_part(u: &CMatrix) -> CMatrix {
    // (U - U†) / 2i
    (u - u.adjoint()) * C64::new(0.0, -0.5)
}

/// Eigenvectors of a unitary matrix by simultaneous diagonalisation of its
/// commuting Hermitian parts: first the cosine part, then the sine part
/// inside each degenerate cosine block.
fn unitary_eigenvectors(u: &CMatrix) -> Result<CMatrix> {
    let a = hermitian_part(u);
    let b = antihermitian_part(u);
    let (values, mut w) = crate::eig::hermitian(&a)?;
    for g in group_sorted(&values, 1e-8) {
        if g.len() < 2 {
            continue;
        }
        let block = w.columns(g.start, g.len()).clone_owned();
        let restricted = block.adjoint() * &b * &block;
        let (_, sub) = crate::eig::hermitian(&restricted)?;
        let rotated = block * sub;
        w.columns_mut(g.start, g.len()).copy_from(&rotated);
    }
    Ok(w)
}

/// Principal logarithm `H_eff = -W diag(θ) W† / horizon` of `U = W diag(e^{iθ}) W†`.
pub fn effective_hamiltonian(u: &UnitaryMatrix, horizon: f64) -> Result<EffectiveHamiltonian> {
    let deviation = u.deviation();
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    let um = u.matrix();
    let n = um.nrows();
    let w = unitary_eigenvectors(um)?;
    let mut thetas: Vec<f64> = (0..n)
        .map(|k| {
            let col = w.column(k);
            let z = (col.adjoint() * um * col)[(0, 0)];
            let th = z.arg();
            // principal branch (-π, π]
            if th <= -PI {
                th + 2.0 * PI
            } else {
                th
            }
        })
        .collect();

    // average phases that agree within tolerance so degenerate groups stay exactly degenerate
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| thetas[x].total_cmp(&thetas[y]));
    let sorted: Vec<f64> = order.iter().map(|&k| thetas[k]).collect();
    for g in group_sorted(&sorted, PHASE_GROUP_TOL) {
        let mean = sorted[g.clone()].iter().sum::<f64>() / g.len() as f64;
        for &k in &order[g] {
            thetas[k] = mean;
        }
    }

    let near_branch_cut = thetas.iter().any(|&t| PI - t.abs() < BRANCH_CUT_MARGIN);
    let diag = DVector::from_iterator(n, thetas.iter().map(|&t| C64::new(-t / horizon, 0.0)));
    let h = &w * CMatrix::from_diagonal(&diag) * w.adjoint();
    let matrix = hermitian_part(&h);
    Ok(EffectiveHamiltonian {
        matrix,
        horizon,
        eigenphases: thetas,
        near_branch_cut,
    })
}

/// Maximum transfer probabilities of a Hermitian generator, from the moduli
/// of its eigenspace projector elements.
pub fn effective_itc(h_eff: &EffectiveHamiltonian) -> Result<ItcMatrix> {
    if h_eff.hermiticity_error() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "effective Hamiltonian is not Hermitian (error {:e})",
            h_eff.hermiticity_error()
        )));
    }
    hermitian_itc(&h_eff.matrix)
}

pub(crate) fn hermitian_itc(h: &CMatrix) -> Result<ItcMatrix> {
    let n = h.nrows();
    let (values, w) = crate::eig::hermitian(h)?;
    let norm = values.iter().fold(0.0_f64, |a, l| a.max(l.abs()));
    let groups = group_sorted(&values, crate::spectral::DEFAULT_DEGENERACY_REL * norm);

    let mut p = DMatrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let amp: f64 = groups
                .iter()
                .map(|g| {
                    g.clone()
                        .map(|k| w[(i, k)] * w[(j, k)].conj())
                        .sum::<C64>()
                        .norm()
                })
                .sum();
            let v = (amp * amp).clamp(0.0, 1.0);
            p[(i, j)] = v;
            p[(j, i)] = v;
        }
    }
    ItcMatrix::from_probabilities(p)
}
