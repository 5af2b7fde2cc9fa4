//! Network spec files.
//!
//! ```json
//! {"kind": "xx", "n": 4, "uniform_j": 1.0}
//! {"kind": "heisenberg", "n": 2, "couplings": [0, 1, 1, 0]}
//! {"kind": "xx", "positions": [[0, 0], [1, 0], [0, 2]], "exponent": 3}
//! ```

use std::path::Path;

use anyhow::{Context, Result};
use nalgebra::DMatrix;
use serde::Deserialize;

use itc_core::{CouplingKind, SpinNetwork};

use crate::Usage;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub n: Option<usize>,
    pub kind: String,
    pub uniform_j: Option<f64>,
    pub couplings: Option<Vec<f64>>,
    pub positions: Option<Vec<[f64; 2]>>,
    pub exponent: Option<f64>,
}

/// Where the couplings came from, for the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Chain,
    Matrix,
    Positions,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Chain => "uniform_chain",
            Source::Matrix => "couplings",
            Source::Positions => "positions",
        }
    }
}

pub fn load(path: &Path) -> Result<(SpinNetwork, Source)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: NetworkSpec =
        serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    spec.build()
}

impl NetworkSpec {
    pub fn build(&self) -> Result<(SpinNetwork, Source)> {
        let kind: CouplingKind = self.kind.parse().map_err(|_| {
            Usage(format!("kind must be \"xx\" or \"heisenberg\", got {:?}", self.kind))
        })?;
        let sources = [self.uniform_j.is_some(), self.couplings.is_some(), self.positions.is_some()];
        if sources.iter().filter(|s| **s).count() != 1 {
            return Err(Usage("give exactly one of uniform_j, couplings, positions".into()).into());
        }
        if self.exponent.is_some() && self.positions.is_none() {
            return Err(Usage("exponent only applies to positions".into()).into());
        }

        if let Some(j) = self.uniform_j {
            let n = self.n.ok_or_else(|| Usage("uniform_j needs n".into()))?;
            return Ok((SpinNetwork::chain(n, kind, j)?, Source::Chain));
        }
        if let Some(values) = &self.couplings {
            let n = self.n.ok_or_else(|| Usage("couplings needs n".into()))?;
            if values.len() != n * n {
                return Err(Usage(format!(
                    "couplings has {} entries, expected n*n = {}",
                    values.len(),
                    n * n
                ))
                .into());
            }
            let m = DMatrix::from_row_slice(n, n, values);
            return Ok((SpinNetwork::from_couplings(kind, m)?, Source::Matrix));
        }
        let positions = self.positions.as_deref().unwrap_or_default();
        if let Some(n) = self.n {
            if n != positions.len() {
                return Err(Usage(format!("n = {n} but {} positions given", positions.len())).into());
            }
        }
        let exponent = self.exponent.unwrap_or(3.0);
        Ok((SpinNetwork::geometric(positions, kind, exponent)?, Source::Positions))
    }
}
