//! On-disk formats. Complex entries are `[re, im]` pairs, matrices are
//! row-major arrays of rows.

use std::collections::BTreeMap;
use std::fmt;

use dnorm_core::{CMatrix, ChoiMatrix, Complex64, NaturalRep, StinespringPair};
use serde::{Deserialize, Serialize};

/// A parse or validation failure, reported with exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError(msg.into()))
}

pub type PairRows = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_pairs(m: &CMatrix) -> PairRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn pairs_to_matrix(
    rows: &PairRows,
    nrows: usize,
    ncols: usize,
    name: &str,
) -> Result<CMatrix, FormatError> {
    if rows.len() != nrows {
        return bad(format!("{name} has {} rows, expected {nrows}", rows.len()));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return bad(format!(
                "{name} row {i} has {} entries, expected {ncols}",
                row.len()
            ));
        }
        if row.iter().flatten().any(|v| !v.is_finite()) {
            return bad(format!("{name} row {i} has a non-finite entry"));
        }
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

fn check_dim_v(dim_v: usize) -> Result<(), FormatError> {
    if dim_v < 2 || !dim_v.is_power_of_two() {
        return bad(format!(
            "dim_v = {dim_v} is not a power of 2 (at least 2); the Pauli-coordinate \
             chart of density matrices used by the solver only exists for qubit systems"
        ));
    }
    Ok(())
}

/// A super-operator `T(X) = Tr_A(B X C†)` with `B`, `C` of shape
/// `(dim_v·dim_a) × dim_v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim_v: usize,
    pub dim_a: usize,
    #[serde(rename = "B")]
    pub b: PairRows,
    #[serde(rename = "C")]
    pub c: PairRows,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl ChannelFile {
    pub fn from_pair(p: &StinespringPair) -> Self {
        Self {
            dim_v: p.dim_v(),
            dim_a: p.dim_a(),
            b: matrix_to_pairs(p.b()),
            c: matrix_to_pairs(p.c()),
            metadata: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError(format!("malformed channel file: {e}")))
    }

    pub fn to_pair(&self) -> Result<StinespringPair, FormatError> {
        check_dim_v(self.dim_v)?;
        if self.dim_a == 0 {
            return bad("dim_a must be positive");
        }
        let rows = self.dim_v * self.dim_a;
        let b = pairs_to_matrix(&self.b, rows, self.dim_v, "B")?;
        let c = pairs_to_matrix(&self.c, rows, self.dim_v, "C")?;
        StinespringPair::new(self.dim_v, self.dim_a, b, c).map_err(|e| FormatError(e.to_string()))
    }

    /// The unitaries stored under metadata keys `U` and `V`, each a JSON
    /// array of `[re, im]` rows.
    pub fn unitaries(&self) -> Result<(CMatrix, CMatrix), FormatError> {
        let get = |key: &str| -> Result<CMatrix, FormatError> {
            let raw = self.metadata.get(key).ok_or_else(|| {
                FormatError(format!("metadata has no \"{key}\" entry for the unitary formula"))
            })?;
            let rows: PairRows = serde_json::from_str(raw)
                .map_err(|e| FormatError(format!("metadata \"{key}\" is not a matrix: {e}")))?;
            pairs_to_matrix(&rows, self.dim_v, self.dim_v, key)
        };
        check_dim_v(self.dim_v)?;
        Ok((get("U")?, get("V")?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Natural,
    Choi,
}

/// A natural-representation or Choi matrix, `dim_v² × dim_v²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub representation: MatrixKind,
    pub dim_v: usize,
    pub matrix: PairRows,
}

impl MatrixFile {
    pub fn from_natural(n: &NaturalRep) -> Self {
        Self {
            representation: MatrixKind::Natural,
            dim_v: n.dim_v(),
            matrix: matrix_to_pairs(n.matrix()),
        }
    }

    pub fn from_choi(c: &ChoiMatrix) -> Self {
        Self {
            representation: MatrixKind::Choi,
            dim_v: c.dim_v(),
            matrix: matrix_to_pairs(c.matrix()),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError(format!("malformed matrix file: {e}")))
    }

    fn matrix(&self) -> Result<CMatrix, FormatError> {
        check_dim_v(self.dim_v)?;
        let d = self.dim_v * self.dim_v;
        pairs_to_matrix(&self.matrix, d, d, "matrix")
    }

    /// The natural representation, converting from Choi form if needed.
    pub fn to_natural(&self) -> Result<NaturalRep, FormatError> {
        let m = self.matrix()?;
        let wrap = |e: dnorm_core::Error| FormatError(e.to_string());
        Ok(match self.representation {
            MatrixKind::Natural => NaturalRep::new(self.dim_v, m).map_err(wrap)?,
            MatrixKind::Choi => ChoiMatrix::new(self.dim_v, m).map_err(wrap)?.to_natural(),
        })
    }
}
