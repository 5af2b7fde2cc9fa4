//! Spin networks and their single-excitation Hamiltonians.
//!
//! Nodes are indexed from zero. Couplings are dimensionless (ħ = 1), so time
//! is measured in units of the inverse coupling strength.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance used when accepting a user supplied coupling matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingKind {
    Xx,
    Heisenberg,
}

impl CouplingKind {
    pub fn name(self) -> &'static str {
        match self {
            CouplingKind::Xx => "xx",
            CouplingKind::Heisenberg => "heisenberg",
        }
    }
}

impl std::str::FromStr for CouplingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xx" => Ok(CouplingKind::Xx),
            "heisenberg" => Ok(CouplingKind::Heisenberg),
            other => Err(Error::InvalidArgument(format!("unknown coupling kind `{other}`"))),
        }
    }
}

/// Real symmetric matrix. Symmetry is enforced on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Wraps `m` after checking it is square and symmetric within `tol`.
    /// The stored matrix is exactly symmetric (upper triangle mirrored).
    pub fn new(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        let n = m.nrows();
        let mut m = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let (upper, lower) = (m[(i, j)], m[(j, i)]);
                if !(upper - lower).abs().le(&tol) {
                    return Err(Error::Asymmetric { i, j, upper, lower });
                }
                m[(j, i)] = upper;
            }
        }
        Ok(SymmetricMatrix(m))
    }

    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// `scale * self + shift * I`.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        let mut m = &self.0 * scale;
        for i in 0..m.nrows() {
            m[(i, i)] += shift;
        }
        SymmetricMatrix(m)
    }

    pub fn add(&self, other: &SymmetricMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(SymmetricMatrix(&self.0 + &other.0))
    }
}

/// A network of spins with pairwise couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinNetwork {
    kind: CouplingKind,
    couplings: DMatrix<f64>,
    positions: Option<Vec<[f64; 2]>>,
}

impl SpinNetwork {
    /// Uniform open chain with nearest-neighbour coupling `j`.
    pub fn chain(n: usize, kind: CouplingKind, j: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize { n, min: 2 });
        }
        if !(j > 0.0 && j.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coupling strength must be positive, got {j}"
            )));
        }
        let mut c = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            c[(i, i + 1)] = j;
            c[(i + 1, i)] = j;
        }
        Ok(SpinNetwork {
            kind,
            couplings: c,
            positions: None,
        })
    }

    /// Planar network with couplings `r^-exponent` from pairwise Euclidean distance.
    pub fn geometric(positions: &[[f64; 2]], kind: CouplingKind, exponent: f64) -> Result<Self> {
        let n = positions.len();
        if n < 2 {
            return Err(Error::InvalidSize { n, min: 2 });
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "distance-law exponent must be positive, got {exponent}"
            )));
        }
        if let Some((i, p)) = positions
            .iter()
            .enumerate()
            .find(|(_, p)| !(p[0].is_finite() && p[1].is_finite()))
        {
            return Err(Error::InvalidArgument(format!(
                "position {i} is not finite: {p:?}"
            )));
        }
        let mut c = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let r = (positions[i][0] - positions[j][0]).hypot(positions[i][1] - positions[j][1]);
                if r <= 0.0 {
                    return Err(Error::DegenerateGeometry { i, j });
                }
                let v = r.powf(-exponent);
                c[(i, j)] = v;
                c[(j, i)] = v;
            }
        }
        Ok(SpinNetwork {
            kind,
            couplings: c,
            positions: Some(positions.to_vec()),
        })
    }

    /// Network from an explicit coupling matrix. The matrix must be symmetric
    /// within [`SYMMETRY_TOL`], with zero diagonal and nonnegative entries.
    pub fn from_couplings(kind: CouplingKind, couplings: DMatrix<f64>) -> Result<Self> {
        let n = couplings.nrows();
        if n < 2 {
            return Err(Error::InvalidSize { n, min: 2 });
        }
        let sym = SymmetricMatrix::new(couplings, SYMMETRY_TOL)?;
        let c = sym.into_inner();
        for i in 0..n {
            if c[(i, i)] != 0.0 {
                return Err(Error::InvalidCoupling {
                    i,
                    j: i,
                    value: c[(i, i)],
                });
            }
            for j in (i + 1)..n {
                let v = c[(i, j)];
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidCoupling { i, j, value: v });
                }
            }
        }
        Ok(SpinNetwork {
            kind,
            couplings: c,
            positions: None,
        })
    }

    pub fn n(&self) -> usize {
        self.couplings.nrows()
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    /// Hamiltonian restricted to the one-excitation subspace.
    ///
    /// Off-diagonal entries are the couplings. For Heisenberg coupling the
    /// diagonal carries minus the row sum of the couplings; for XX it is zero.
    /// Transfer probabilities are unchanged by any shift `c·I` or positive
    /// rescaling, so this fixes the convention without loss of generality.
    pub fn hamiltonian(&self) -> SymmetricMatrix {
        let mut h = self.couplings.clone();
        if self.kind == CouplingKind::Heisenberg {
            for i in 0..self.n() {
                h[(i, i)] = -self.couplings.row(i).sum();
            }
        }
        SymmetricMatrix(h)
    }
}
