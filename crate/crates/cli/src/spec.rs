//! Manifold spec files: `{"dimension", "structure_constants", "metric",
//! "product_structure", "name", "provenance"}`.

use std::io;
use std::path::Path;

use apm_core::{FrameManifold, Matrix, StructureConstants};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub dimension: usize,
    /// `[i, j, k, value]` meaning `C^k_ij = value`, with `i < j`.
    pub structure_constants: Vec<(usize, usize, usize, f64)>,
    pub metric: Vec<Vec<f64>>,
    pub product_structure: Vec<Vec<f64>>,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub provenance: Value,
}

fn to_matrix(rows: &[Vec<f64>], n: usize) -> Result<Matrix, apm_core::Error> {
    if rows.len() != n {
        return Err(apm_core::Error::DimensionMismatch {
            expected: n,
            found: rows.len(),
        });
    }
    for r in rows {
        if r.len() != n {
            return Err(apm_core::Error::WrongLength {
                expected: n,
                found: r.len(),
            });
        }
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn from_matrix(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl ManifoldSpec {
    pub fn from_manifold(m: &FrameManifold, name: &str, provenance: Value) -> Self {
        ManifoldSpec {
            dimension: m.dim(),
            structure_constants: m.brackets().entries(),
            metric: from_matrix(m.metric().g()),
            product_structure: from_matrix(m.p()),
            name: name.to_string(),
            provenance,
        }
    }

    pub fn to_manifold(&self) -> Result<FrameManifold, apm_core::Error> {
        let n = self.dimension;
        if n < 2 || !n.is_multiple_of(2) {
            return Err(apm_core::Error::InvalidDimension(n));
        }
        for &(i, j, k, _) in &self.structure_constants {
            if i.max(j).max(k) >= n {
                return Err(apm_core::Error::DimensionMismatch {
                    expected: n,
                    found: i.max(j).max(k) + 1,
                });
            }
        }
        let c = StructureConstants::from_entries(n, &self.structure_constants)?;
        FrameManifold::new(
            c,
            to_matrix(&self.metric, n)?,
            to_matrix(&self.product_structure, n)?,
        )
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    /// Pretty JSON with every float written in `{:.16e}` (17 significant digits).
    pub fn to_fixture_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FixtureFormatter::default());
        self.serialize(&mut ser).expect("in-memory write");
        out.push(b'\n');
        String::from_utf8(out).expect("utf-8")
    }
}

#[derive(Default)]
struct FixtureFormatter {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for FixtureFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}
