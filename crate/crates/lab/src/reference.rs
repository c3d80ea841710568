//! Reference curves of normalized ergotropy versus temperature.

use std::path::Path;

use dimerlab::oracle::oracle_sweep;
use dimerlab::DimerParams;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

/// The oracle curve on the default 31-point grid.
pub const SHIPPED_ORACLE_CSV: &str = include_str!("../data/reference_oracle.csv");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    #[serde(rename = "T_K")]
    pub t_k: f64,
    pub ergotropy_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceCurve {
    pub source: String,
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceCurve {
    pub fn new(source: impl Into<String>, rows: Vec<ReferenceRow>) -> LabResult<Self> {
        let curve = ReferenceCurve { source: source.into(), rows };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> LabResult<()> {
        if self.rows.is_empty() {
            return Err(LabError::Reference("no rows".into()));
        }
        if self.rows.windows(2).any(|w| !(w[0].t_k < w[1].t_k)) {
            return Err(LabError::Reference("T_K must be strictly ascending".into()));
        }
        if let Some(r) = self.rows.iter().find(|r| !(0.0..=1.05).contains(&r.ergotropy_norm)) {
            return Err(LabError::Reference(format!("ergotropy_norm {} at T = {} K is outside [0, 1.05]", r.ergotropy_norm, r.t_k)));
        }
        Ok(())
    }

    /// Exact curve from the thermal oracle.
    pub fn oracle(p: &DimerParams<f64>, grid: &[f64]) -> LabResult<Self> {
        let rows = oracle_sweep(p, grid)?
            .iter()
            .map(|pt| ReferenceRow { t_k: pt.temperature, ergotropy_norm: pt.ergotropy_normalized })
            .collect();
        Self::new("oracle", rows)
    }

    pub fn shipped() -> LabResult<Self> {
        Self::from_reader("reference_oracle.csv", SHIPPED_ORACLE_CSV.as_bytes())
            .map_err(|e| LabError::Reference(format!("shipped reference: {e}")))
    }

    fn from_reader<R: std::io::Read>(source: &str, reader: R) -> csv::Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let rows = r.deserialize().collect::<csv::Result<Vec<ReferenceRow>>>()?;
        Ok(ReferenceCurve { source: source.into(), rows })
    }

    /// Reads a `T_K,ergotropy_norm` file; the label defaults to the file name.
    pub fn read(path: &Path, source: Option<&str>) -> LabResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| LabError::Read { path: path.to_path_buf(), source: e })?;
        let label = source.map(str::to_owned).unwrap_or_else(|| path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned()));
        let curve = Self::from_reader(&label, file).map_err(|e| LabError::Csv { path: path.to_path_buf(), source: e })?;
        curve.validate()?;
        Ok(curve)
    }

    pub fn write(&self, path: &Path) -> LabResult<()> {
        let csv_err = |source| LabError::Csv { path: path.to_path_buf(), source };
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(csv_err)?;
        for r in &self.rows {
            w.serialize(r).map_err(csv_err)?;
        }
        w.flush().map_err(|source| LabError::Write { path: path.to_path_buf(), source })
    }

    /// Value at the reference temperature nearest to `t`, if within `max_gap`.
    pub fn nearest(&self, t: f64, max_gap: f64) -> Option<f64> {
        let i = self.rows.partition_point(|r| r.t_k < t);
        let candidates = [i.checked_sub(1), Some(i)];
        candidates
            .into_iter()
            .flatten()
            .filter_map(|k| self.rows.get(k))
            .map(|r| ((r.t_k - t).abs(), r.ergotropy_norm))
            .filter(|&(gap, _)| gap <= max_gap)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, v)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dimerlab::oracle::linear_grid;

    #[test]
    fn shipped_curve_is_the_default_oracle_curve() {
        let shipped = ReferenceCurve::shipped().unwrap();
        let fresh = ReferenceCurve::oracle(&DimerParams::default(), &linear_grid(1.0, 300.0, 31)).unwrap();
        assert_eq!(shipped.rows, fresh.rows);
        assert!((shipped.rows[0].ergotropy_norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lab.csv");
        let curve = ReferenceCurve::oracle(&DimerParams::default(), &[2.5, 77.7, 301.25]).unwrap();
        curve.write(&path).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("T_K,ergotropy_norm\n"));
        let back = ReferenceCurve::read(&path, None).unwrap();
        assert_eq!(back.rows, curve.rows);
        assert_eq!(back.source, "lab.csv");
        assert_eq!(ReferenceCurve::read(&path, Some("magnetometry")).unwrap().source, "magnetometry");
    }

    #[test]
    fn invalid_curves_are_rejected() {
        let row = |t_k, v| ReferenceRow { t_k, ergotropy_norm: v };
        assert!(ReferenceCurve::new("x", vec![]).is_err());
        assert!(ReferenceCurve::new("x", vec![row(2.0, 0.5), row(1.0, 0.5)]).is_err());
        assert!(ReferenceCurve::new("x", vec![row(1.0, 1.2)]).is_err());
        assert!(ReferenceCurve::new("x", vec![row(1.0, 1.04)]).is_ok());
    }

    #[test]
    fn nearest_join_respects_gap() {
        let c = ReferenceCurve::new("x", vec![ReferenceRow { t_k: 10.0, ergotropy_norm: 0.9 }, ReferenceRow { t_k: 20.0, ergotropy_norm: 0.8 }]).unwrap();
        assert_eq!(c.nearest(10.4, 1.0), Some(0.9));
        assert_eq!(c.nearest(19.2, 1.0), Some(0.8));
        assert_eq!(c.nearest(15.0, 1.0), None);
        assert_eq!(c.nearest(25.0, 1.0), None);
    }
}
