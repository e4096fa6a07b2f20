//! The `fields` command: pointwise criterion fields on a grid, as CSV.
//!
//! The disk grid covers the square `[-1, 1]^2` in the complex plane; in
//! dimension 2 the grid is the real slice `(x, y) -> (x + 0i, y + 0i)`.
//! Points outside the domain are skipped; singular points keep their
//! coordinates and leave the field columns empty.

use std::io::Write;

use bloch_wco::wco::pointwise_fields;
use bloch_wco::{DomainKind, PointwiseFields, SymbolPair};
use num_complex::Complex;

use crate::report::fmt_num;
use crate::CliError;

pub fn header(pair: &SymbolPair) -> Vec<String> {
    let n = pair.domain.dim();
    let mut h = Vec::new();
    for k in 1..=n {
        h.push(format!("re_z{k}"));
        h.push(format!("im_z{k}"));
    }
    h.extend(["abs_psi", "q_psi", "b_phi", "sigma", "tau_upper"].map(String::from));
    match pair.domain.kind() {
        DomainKind::Disk => h.push("s_disk".into()),
        DomainKind::Ball => h.push("zc_log".into()),
        DomainKind::Polydisk => {
            h.push("zc_log".into());
            h.push("zc_jac".into());
        }
    }
    h
}

fn values(pair: &SymbolPair, f: &PointwiseFields) -> Vec<f64> {
    let mut v = vec![f.abs_psi, f.q_psi, f.b_phi, f.sigma, f.tau_upper];
    match pair.domain.kind() {
        DomainKind::Disk => v.push(f.s_disk.unwrap_or(f.zc_log)),
        DomainKind::Ball => v.push(f.zc_log),
        DomainKind::Polydisk => {
            v.push(f.zc_log);
            v.push(f.zc_jac.unwrap_or(f64::NAN));
        }
    }
    v
}

/// Writes the CSV for a `grid x grid` lattice, row-major (first grid
/// coordinate outermost). Returns the number of data rows.
pub fn run_fields<W: Write>(pair: &SymbolPair, grid: usize, out: W) -> Result<usize, CliError> {
    if grid < 2 {
        return Err(CliError::Config(format!("grid must be at least 2, got {grid}")));
    }
    let n = pair.domain.dim();
    if n > 2 {
        return Err(CliError::Config(format!(
            "grid export supports dimension 1 or 2, not {n}; use analyze with the fields check for sampled output"
        )));
    }
    let cols = header(pair);
    let width = cols.len() - 2 * n;
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Engine(format!("cannot write CSV: {e}"));
    w.write_record(&cols).map_err(io)?;
    let step = 2.0 / (grid - 1) as f64;
    let mut rows = 0;
    for i in 0..grid {
        for j in 0..grid {
            let a = -1.0 + step * i as f64;
            let b = -1.0 + step * j as f64;
            let z = if n == 1 {
                vec![Complex::new(a, b)]
            } else {
                vec![Complex::new(a, 0.0), Complex::new(b, 0.0)]
            };
            if !pair.domain.contains(&z) {
                continue;
            }
            let mut rec: Vec<String> = z.iter().flat_map(|c| [fmt_num(c.re), fmt_num(c.im)]).collect();
            match pointwise_fields(pair, &z) {
                Ok(f) => rec.extend(values(pair, &f).into_iter().map(|x| if x.is_finite() { fmt_num(x) } else { String::new() })),
                Err(_) => rec.extend(std::iter::repeat_n(String::new(), width)),
            }
            w.write_record(&rec).map_err(io)?;
            rows += 1;
        }
    }
    w.flush().map_err(|e| CliError::Engine(format!("cannot write CSV: {e}")))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bloch_wco::DomainSpec;

    fn csv_rows(pair: &SymbolPair, grid: usize) -> Vec<Vec<String>> {
        let mut buf = Vec::new();
        run_fields(pair, grid, &mut buf).unwrap();
        let mut r = csv::Reader::from_reader(buf.as_slice());
        r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
    }

    #[test]
    fn disk_identity_grid() {
        let pair = SymbolPair::identity(DomainSpec::disk());
        let rows = csv_rows(&pair, 21);
        let inside = (0..21)
            .flat_map(|i| (0..21).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let (a, b) = (-1.0 + 0.1 * i as f64, -1.0 + 0.1 * j as f64);
                a * a + b * b < 1.0 - 1e-9
            })
            .count();
        assert_eq!(rows.len(), inside);
        let h = header(&pair);
        let tau = h.iter().position(|c| c == "tau_upper").unwrap();
        let sigma = h.iter().position(|c| c == "sigma").unwrap();
        for r in &rows {
            assert_eq!(r[tau], "1");
            assert_eq!(r[sigma], "0");
        }
    }

    #[test]
    fn rejects_small_grid_and_high_dim() {
        let pair = SymbolPair::identity(DomainSpec::disk());
        assert_eq!(run_fields(&pair, 1, Vec::new()).unwrap_err().exit_code(), 2);
        let pair = SymbolPair::identity(DomainSpec::ball(3));
        assert_eq!(run_fields(&pair, 5, Vec::new()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn polydisk_slice_has_jacobian_column() {
        let pair = SymbolPair::parse(DomainSpec::polydisk(2), "1 - z1", &["(1 + z1)/2", "0"]).unwrap();
        let rows = csv_rows(&pair, 5);
        // interior of a 5x5 lattice on [-1, 1]^2 is 3x3
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[0].len(), header(&pair).len());
    }
}
