//! CSV quality reports: one row per image plus an average row.

use crate::error::{Error, Result};
use crate::metrics::QualityReport;
use std::path::Path;

pub fn write_report(path: impl AsRef<Path>, rows: &[(String, QualityReport)]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    w.write_record(["name", "psnr_db", "rmse", "ssim", "peak"])
        .map_err(|e| Error::format(path, e.to_string()))?;
    let fmt = |v: f64| format!("{v}");
    for (name, r) in rows {
        w.write_record([
            name.as_str(),
            &fmt(r.psnr_db),
            &fmt(r.rmse),
            &fmt(r.ssim),
            &fmt(r.peak),
        ])
        .map_err(|e| Error::format(path, e.to_string()))?;
    }
    if !rows.is_empty() {
        let n = rows.len() as f64;
        let mean = |f: fn(&QualityReport) -> f64| rows.iter().map(|(_, r)| f(r)).sum::<f64>() / n;
        w.write_record([
            "average",
            &fmt(mean(|r| r.psnr_db)),
            &fmt(mean(|r| r.rmse)),
            &fmt(mean(|r| r.ssim)),
            &fmt(mean(|r| r.peak)),
        ])
        .map_err(|e| Error::format(path, e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn report(psnr: f64, rmse: f64, ssim: f64) -> QualityReport {
        QualityReport {
            psnr_db: psnr,
            rmse,
            ssim,
            peak: 1.0,
        }
    }

    #[test]
    fn zero_rows_header_only() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_report(&path, &[]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.trim(), "name,psnr_db,rmse,ssim,peak");
    }

    #[test]
    fn one_row_average_equals_row() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_report(&path, &[("a".into(), report(30.0, 0.03, 0.9))]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "a,30,0.03,0.9,1");
        assert_eq!(lines[2], "average,30,0.03,0.9,1");
    }

    #[test]
    fn two_rows_average_is_mean() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_report(
            &path,
            &[
                ("a".into(), report(20.0, 0.1, 0.8)),
                ("b".into(), report(30.0, 0.2, 0.6)),
            ],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let avg = text.lines().last().unwrap();
        // hand mean: (20+30)/2, (0.1+0.2)/2, (0.8+0.6)/2
        let fields: Vec<&str> = avg.split(',').collect();
        assert_eq!(fields[0], "average");
        assert!((fields[1].parse::<f64>().unwrap() - 25.0).abs() < 1e-12);
        assert!((fields[2].parse::<f64>().unwrap() - 0.15).abs() < 1e-12);
        assert!((fields[3].parse::<f64>().unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn infinite_psnr_serialized_as_inf() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_report(&path, &[("same".into(), report(f64::INFINITY, 0.0, 1.0))]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("same,inf,0,1,1"), "{text}");
    }
}
