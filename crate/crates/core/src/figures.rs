//! Sweep data for `ef(M₂, φ_λ)` and the certified region in the `(λ, μ)` square.
//!
//! Grid points are exact rationals; floats appear only when a table is
//! serialized.

use std::fmt;
use std::io;
use std::path::Path;

use num_traits::Zero;
use rayon::prelude::*;

use crate::classify::ef2_m2;
use crate::rational::{int, q, to_f64, Rational};

pub const GRID_LO: (i64, i64) = (1, 2);
pub const GRID_HI: (i64, i64) = (99, 100);
/// Width below which the boundary bisection stops.
pub const BISECTION_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum CsvCell {
    Float(f64),
    Rational(Rational),
    Int(i64),
    Empty,
}

impl fmt::Display for CsvCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsvCell::Float(x) => f.write_str(&format_significant(*x, 12)),
            CsvCell::Rational(r) => write!(f, "{r}"),
            CsvCell::Int(i) => write!(f, "{i}"),
            CsvCell::Empty => Ok(()),
        }
    }
}

/// Rectangular table serialized as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSeries {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<CsvCell>>,
}

impl CsvSeries {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<CsvCell>) {
        assert_eq!(
            row.len(),
            self.headers.len(),
            "row width must match headers"
        );
        self.rows.push(row);
    }

    pub fn write<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn write_file(&self, path: &Path) -> io::Result<()> {
        self.write(std::fs::File::create(path)?)
    }
}

/// `x` with `digits` significant digits, in fixed notation when the exponent
/// is moderate and scientific otherwise; trailing zeros are trimmed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `n ≥ 2` evenly spaced rationals from `1/2` to `99/100` inclusive.
pub fn lambda_grid(n: usize) -> Vec<Rational> {
    assert!(n >= 2, "grid needs at least two points");
    let lo = q(GRID_LO.0, GRID_LO.1);
    let step = (q(GRID_HI.0, GRID_HI.1) - &lo) / int(n as i64 - 1);
    (0..n).map(|k| &lo + &step * int(k as i64)).collect()
}

fn ef2_column(grid: &[Rational]) -> Vec<Rational> {
    grid.par_iter()
        .map(|l| ef2_m2(l).expect("grid lies in [1/2, 1)"))
        .collect()
}

/// Columns `lambda, ef` with `ef = ef(M₂, φ_λ)` on [`lambda_grid`].
pub fn figure1(samples: usize) -> CsvSeries {
    let grid = lambda_grid(samples);
    let ef2 = ef2_column(&grid);
    let mut out = CsvSeries::new(&["lambda", "ef"]);
    for (l, e) in grid.iter().zip(&ef2) {
        out.push(vec![
            CsvCell::Rational(l.clone()),
            CsvCell::Float(to_f64(e).sqrt()),
        ]);
    }
    out
}

/// Region indicator on the `n×n` grid and the per-row boundary.
#[derive(Debug, Clone)]
pub struct Figure2 {
    pub region: CsvSeries,
    pub boundary: CsvSeries,
    /// `indicator[i][j]` for `(λᵢ, μⱼ)`.
    pub indicator: Vec<Vec<bool>>,
}

/// Columns `lambda, mu, in_region` and a second table `lambda, boundary_mu`
/// giving the `μ` where `ef(λ)·ef(μ) = 1`, empty when the row never crosses.
pub fn figure2(grid_size: usize) -> Figure2 {
    let grid = lambda_grid(grid_size);
    let ef2 = ef2_column(&grid);
    let indicator: Vec<Vec<bool>> = ef2
        .par_iter()
        .map(|a| ef2.iter().map(|b| a * b >= int(1)).collect())
        .collect();
    let mut region = CsvSeries::new(&["lambda", "mu", "in_region"]);
    for (i, l) in grid.iter().enumerate() {
        for (j, m) in grid.iter().enumerate() {
            region.push(vec![
                CsvCell::Rational(l.clone()),
                CsvCell::Rational(m.clone()),
                CsvCell::Int(indicator[i][j] as i64),
            ]);
        }
    }
    let crossings: Vec<Option<(Rational, Rational)>> = ef2
        .par_iter()
        .map(|a| {
            let a = a.clone();
            bisect(move |m| &a * ef2_m2(m).expect("in range") - int(1))
        })
        .collect();
    let mut boundary = CsvSeries::new(&["lambda", "boundary_mu"]);
    for (l, c) in grid.iter().zip(&crossings) {
        let cell = match c {
            Some((lo, hi)) => CsvCell::Float(to_f64(&((lo + hi) / int(2)))),
            None => CsvCell::Empty,
        };
        boundary.push(vec![CsvCell::Rational(l.clone()), cell]);
    }
    Figure2 {
        region,
        boundary,
        indicator,
    }
}

/// Bracket of a sign change of `f` on `[1/2, 99/100]`, narrowed by exact
/// bisection to width below [`BISECTION_WIDTH`]. `None` when `f` has the same
/// strict sign at both ends.
pub fn bisect<F: Fn(&Rational) -> Rational>(f: F) -> Option<(Rational, Rational)> {
    let mut lo = q(GRID_LO.0, GRID_LO.1);
    let mut hi = q(GRID_HI.0, GRID_HI.1);
    let (flo, fhi) = (f(&lo), f(&hi));
    if flo.is_zero() {
        return Some((lo.clone(), lo));
    }
    if fhi.is_zero() {
        return Some((hi.clone(), hi));
    }
    let lo_positive = flo > Rational::zero();
    if lo_positive == (fhi > Rational::zero()) {
        return None;
    }
    let width = q(1, 1_000_000);
    while &hi - &lo >= width {
        let mid = (&lo + &hi) / int(2);
        let fm = f(&mid);
        if fm.is_zero() {
            return Some((mid.clone(), mid));
        }
        if (fm > Rational::zero()) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

/// Bracket of the `λ` where `ef(M₂, φ_λ) = 1`, the diagonal boundary point.
pub fn diagonal_crossing() -> Option<(Rational, Rational)> {
    bisect(|l| ef2_m2(l).expect("in range") - int(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(3f64.sqrt(), 12), "1.73205080757");
        assert_eq!(format_significant(0.5, 12), "0.5");
        assert_eq!(format_significant(1234.5, 12), "1234.5");
        assert_eq!(format_significant(1.5e-9, 12), "1.5e-9");
        assert_eq!(format_significant(0.0, 12), "0");
    }

    #[test]
    fn grid_endpoints() {
        let g = lambda_grid(50);
        assert_eq!(g[0], q(1, 2));
        assert_eq!(g[49], q(99, 100));
        assert_eq!(lambda_grid(2), vec![q(1, 2), q(99, 100)]);
    }

    #[test]
    fn figure1_values() {
        let f = figure1(5);
        assert_eq!(f.rows.len(), 5);
        match &f.rows[0][1] {
            CsvCell::Float(x) => assert!((x - 3f64.sqrt()).abs() < 1e-12),
            c => panic!("{c:?}"),
        }
        let text = f.to_csv_string();
        assert!(text.starts_with("lambda,ef\n1/2,1.73205080757\n"));
    }

    #[test]
    fn crossing_near_inverse_sqrt_two() {
        let (lo, hi) = diagonal_crossing().unwrap();
        assert!(lo <= hi);
        assert!(to_f64(&hi) - to_f64(&lo) < BISECTION_WIDTH);
        let target = 0.5f64.sqrt();
        assert!(to_f64(&lo) <= target + 1e-6 && to_f64(&hi) >= target - 1e-6);
    }

    #[test]
    fn figure2_small() {
        let f = figure2(5);
        assert_eq!(f.region.rows.len(), 25);
        assert!(f.indicator[0][0]);
        assert!(!f.indicator[4][4]);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(f.indicator[i][j], f.indicator[j][i]);
            }
        }
        assert_eq!(f.boundary.rows.len(), 5);
        assert!(f
            .boundary
            .to_csv_string()
            .starts_with("lambda,boundary_mu\n"));
    }
}
