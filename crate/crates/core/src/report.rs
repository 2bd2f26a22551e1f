//! Sweep-CSV merging and log-log exponent fits.
//!
//! Extracting an asymptotic exponent from finite-size data is sensitive to
//! the fit window, so fits carry their range explicitly and the report
//! records how many points survived the cut.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub x_column: String,
    pub y_column: String,
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    pub x_min: f64,
    pub x_max: f64,
}

/// Least-squares slope and intercept of `log2 y` against `log2 x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Data(format!(
            "log-log fit needs at least two paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|&v| v <= 0.0) {
        return Err(Error::Data("log-log fit needs positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.log2()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Data("log-log fit needs spread in x".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// A parsed CSV table: header names plus rows of numeric-or-text cells.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("column '{name}' not found")))
    }

    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name)?;
        self.rows
            .iter()
            .map(|r| {
                r[idx]
                    .parse::<f64>()
                    .map_err(|e| Error::Data(format!("column '{name}': {e}")))
            })
            .collect()
    }
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text)
}

pub fn parse_csv(text: &str) -> Result<Table> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let headers: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Data("empty CSV".into()))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        let cells: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if cells.len() != headers.len() {
            return Err(Error::Data(format!(
                "row has {} cells, header has {}",
                cells.len(),
                headers.len()
            )));
        }
        rows.push(cells);
    }
    Ok(Table { headers, rows })
}

/// Merge tables with identical headers (rows concatenated in input order).
pub fn merge_tables(tables: Vec<Table>) -> Result<Table> {
    let mut iter = tables.into_iter();
    let mut merged = iter
        .next()
        .ok_or_else(|| Error::Data("no CSV inputs".into()))?;
    for t in iter {
        if t.headers != merged.headers {
            return Err(Error::Data("CSV headers do not match across inputs".into()));
        }
        merged.rows.extend(t.rows);
    }
    Ok(merged)
}

/// Fit `y_column` against `x_column` on rows with `x` inside
/// `[x_min, x_max]` (both optional).
pub fn fit_table(
    table: &Table,
    x_column: &str,
    y_column: &str,
    x_min: Option<f64>,
    x_max: Option<f64>,
) -> Result<FitResult> {
    let xs = table.numeric_column(x_column)?;
    let ys = table.numeric_column(y_column)?;
    let lo = x_min.unwrap_or(f64::NEG_INFINITY);
    let hi = x_max.unwrap_or(f64::INFINITY);
    let (fx, fy): (Vec<f64>, Vec<f64>) = xs
        .into_iter()
        .zip(ys)
        .filter(|(x, _)| *x >= lo && *x <= hi)
        .unzip();
    let (slope, intercept) = fit_loglog(&fx, &fy)?;
    Ok(FitResult {
        x_column: x_column.to_string(),
        y_column: y_column.to_string(),
        slope,
        intercept,
        points: fx.len(),
        x_min: fx.iter().cloned().fold(f64::INFINITY, f64::min),
        x_max: fx.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let xs: Vec<f64> = (1..=10).map(|i| (i * i) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(1.5)).collect();
        let (slope, intercept) = fit_loglog(&xs, &ys).unwrap();
        assert!((slope - 1.5).abs() < 1e-12);
        assert!((intercept - 3.0f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn csv_roundtrip_and_fit_window() {
        let csv = "x,y\n2,4\n4,16\n8,64\n1000,1\n";
        let table = parse_csv(csv).unwrap();
        let fit = fit_table(&table, "x", "y", None, Some(100.0)).unwrap();
        assert_eq!(fit.points, 3);
        assert!((fit.slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn merge_requires_matching_headers() {
        let a = parse_csv("x,y\n1,2\n").unwrap();
        let b = parse_csv("x,z\n1,2\n").unwrap();
        assert!(merge_tables(vec![a.clone(), a.clone()]).is_ok());
        assert!(merge_tables(vec![a, b]).is_err());
    }
}
