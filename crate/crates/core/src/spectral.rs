//! Symmetric eigendecomposition, propagators and transfer probabilities.

use std::ops::Range;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Relative residual accepted from the eigensolver.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Relative degeneracy tolerance used when none is given.
pub const DEFAULT_DEGENERACY_REL: f64 = 1e-9;

/// Eigenvalues (ascending), orthonormal eigenvectors (columns) and the
/// grouping of indices into distinct eigenvalues.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    groups: Vec<Range<usize>>,
    tol_degenerate: f64,
    norm: f64,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors as columns, in the order of [`Spectrum::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Index ranges of eigenvalues that are equal within the degeneracy tolerance.
    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    pub fn tol_degenerate(&self) -> f64 {
        self.tol_degenerate
    }

    /// Spectral norm of the decomposed matrix.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Mean eigenvalue of each group.
    pub fn group_eigenvalues(&self) -> Vec<f64> {
        self.groups
            .iter()
            .map(|g| self.eigenvalues[g.clone()].iter().sum::<f64>() / g.len() as f64)
            .collect()
    }

    /// `<i|P_g|j>` for every eigenvalue group `g`.
    pub fn projector_elements(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        self.check_index(i)?;
        self.check_index(j)?;
        let v = &self.eigenvectors;
        Ok(self
            .groups
            .iter()
            .map(|g| g.clone().map(|k| v[(i, k)] * v[(j, k)]).sum())
            .collect())
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.dim() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                n: self.dim(),
            })
        }
    }

    /// `e^{-iHt}` assembled from the spectral decomposition.
    pub fn propagator(&self, t: f64) -> Result<UnitaryMatrix> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
        }
        let n = self.dim();
        if t == 0.0 {
            return Ok(UnitaryMatrix::identity(n));
        }
        let v = &self.eigenvectors;
        let phases: Vec<C64> = self
            .eigenvalues
            .iter()
            .map(|&l| C64::from_polar(1.0, -l * t))
            .collect();
        let mut u = CMatrix::zeros(n, n);
        for r in 0..n {
            for c in r..n {
                let mut acc = C64::new(0.0, 0.0);
                for (k, ph) in phases.iter().enumerate() {
                    acc += ph * (v[(r, k)] * v[(c, k)]);
                }
                u[(r, c)] = acc;
                u[(c, r)] = acc;
            }
        }
        Ok(UnitaryMatrix(u))
    }

    /// `<j|e^{-iHt}|i>`. Exactly symmetric in `i` and `j`, exactly `δ_ij` at `t = 0`.
    pub fn transfer_amplitude(&self, i: usize, j: usize, t: f64) -> Result<C64> {
        self.check_index(i)?;
        self.check_index(j)?;
        if t == 0.0 {
            return Ok(C64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        }
        let v = &self.eigenvectors;
        Ok(self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &l)| C64::from_polar(v[(i, k)] * v[(j, k)], -l * t))
            .sum())
    }

    /// `|<j|e^{-iHt}|i>|^2`.
    pub fn transfer_probability(&self, i: usize, j: usize, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
        }
        Ok(self.transfer_amplitude(i, j, t)?.norm_sqr())
    }

    /// Transfer probability sampled on `{0, dt, 2dt, ...}` up to and including `t_max`.
    pub fn probability_time_series(
        &self,
        i: usize,
        j: usize,
        t_max: f64,
        dt: f64,
    ) -> Result<Vec<(f64, f64)>> {
        let samples = TimeGrid::new(t_max, dt)?;
        let scan = PairScan::new(self, i, j)?;
        Ok(samples.iter().map(|t| (t, scan.probability(t))).collect())
    }
}

/// Uniform grid `{0, dt, ..., k dt}` with `k dt <= t_max` (up to rounding).
#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be positive, got {dt}")));
        }
        if !(t_max >= 0.0 && t_max.is_finite()) {
            return Err(Error::Domain(format!("t_max must be nonnegative, got {t_max}")));
        }
        let steps = (t_max / dt * (1.0 + 1e-12)).floor() as usize;
        Ok(TimeGrid { dt, steps })
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |k| k as f64 * self.dt)
    }
}

/// Precomputed weights `v_k(i) v_k(j)` for fast repeated evaluation of one pair.
pub(crate) struct PairScan {
    weights: Vec<(f64, f64)>,
    same: bool,
}

impl PairScan {
    pub(crate) fn new(s: &Spectrum, i: usize, j: usize) -> Result<Self> {
        s.check_index(i)?;
        s.check_index(j)?;
        let v = s.eigenvectors();
        let weights = s
            .eigenvalues()
            .iter()
            .enumerate()
            .map(|(k, &l)| (l, v[(i, k)] * v[(j, k)]))
            .filter(|&(_, w)| w != 0.0)
            .collect();
        Ok(PairScan { weights, same: i == j })
    }

    pub(crate) fn probability(&self, t: f64) -> f64 {
        if t == 0.0 {
            return if self.same { 1.0 } else { 0.0 };
        }
        let (mut re, mut im) = (0.0, 0.0);
        for &(l, w) in &self.weights {
            let (s, c) = (-l * t).sin_cos();
            re += w * c;
            im += w * s;
        }
        re * re + im * im
    }
}

/// Complex unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(pub(crate) CMatrix);

impl UnitaryMatrix {
    /// Wraps `u` if `max |U†U - I| <= tol`.
    pub fn new(u: CMatrix, tol: f64) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::DimensionMismatch {
                expected: u.nrows(),
                actual: u.ncols(),
            });
        }
        let deviation = unitarity_deviation(&u);
        if deviation.le(&tol) {
            Ok(UnitaryMatrix(u))
        } else {
            Err(Error::NotUnitary { deviation })
        }
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix(CMatrix::identity(n, n))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn deviation(&self) -> f64 {
        unitarity_deviation(&self.0)
    }

    /// `self * rhs`.
    pub fn compose(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(&self.0 * &rhs.0)
    }
}

pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let g = u.adjoint() * u;
    let n = g.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((g[(r, c)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Eigendecomposition of a real symmetric matrix.
///
/// `tol_degenerate` defaults to `1e-9 * ||H||_2`. Eigenvalues closer than the
/// tolerance to their ascending neighbour share a group.
pub fn eigendecompose(h: &SymmetricMatrix, tol_degenerate: Option<f64>) -> Result<Spectrum> {
    let m = h.matrix();
    let n = m.nrows();
    if n == 0 {
        return Err(Error::InvalidSize { n, min: 1 });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("Hamiltonian has non-finite entries".into()));
    }
    let (eigenvalues, mut eigenvectors) = crate::eig::real_symmetric(m)?;
    for mut col in eigenvectors.column_iter_mut() {
        // Sign convention: largest-magnitude component positive.
        let pivot = col.iamax();
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
    }

    let norm = eigenvalues
        .iter()
        .fold(0.0_f64, |acc, l| acc.max(l.abs()));

    let residual = eigen_residual(m, &eigenvalues, &eigenvectors);
    let allowed = RESIDUAL_TOL * norm.max(f64::MIN_POSITIVE);
    if residual > allowed && residual > 1e-13 {
        return Err(Error::Convergence {
            residual,
            tolerance: allowed,
        });
    }

    let tol = tol_degenerate.unwrap_or(DEFAULT_DEGENERACY_REL * norm);
    if !(tol >= 0.0) {
        return Err(Error::Domain(format!("degeneracy tolerance must be nonnegative, got {tol}")));
    }
    let groups = group_sorted(&eigenvalues, tol);

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        groups,
        tol_degenerate: tol,
        norm,
    })
}

/// Splits ascending values wherever the gap to the previous value exceeds `tol`.
pub(crate) fn group_sorted(values: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..values.len() {
        if values[k] - values[k - 1] > tol {
            groups.push(start..k);
            start = k;
        }
    }
    if !values.is_empty() {
        groups.push(start..values.len());
    }
    groups
}

/// `max_k ||H v_k - λ_k v_k||_2`.
fn eigen_residual(h: &DMatrix<f64>, values: &[f64], vectors: &DMatrix<f64>) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let v: DVector<f64> = vectors.column(k).clone_owned();
            (h * &v - v * l).norm()
        })
        .fold(0.0, f64::max)
}
