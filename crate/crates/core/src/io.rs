use num_complex::Complex64;
use serde::Serialize;
use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};
use crate::skein_trace::TermCloud;

/// 17 significant digits, exponent form, no locale.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_cloud_csv<W: Write>(cloud: &TermCloud, mut w: W, comment_header: bool) -> io::Result<()> {
    if comment_header {
        writeln!(w, "# kind={} n={} terms={}", cloud.metadata.kind, cloud.n, cloud.len())?;
        if let (Some(u), Some(v)) = (cloud.metadata.big_u, cloud.metadata.big_v) {
            writeln!(w, "# U={},{} V={},{}", fmt_f64(u.re), fmt_f64(u.im), fmt_f64(v.re), fmt_f64(v.im))?;
        }
        if let Some(k) = cloud.metadata.k_hat {
            writeln!(w, "# k_hat={k}")?;
        }
        if let Some(word) = &cloud.metadata.word {
            writeln!(w, "# word={word}")?;
        }
        if let Some([l, m, n]) = cloud.metadata.windings {
            writeln!(w, "# windings={l},{m},{n}")?;
        }
    }
    let names = ["index1", "index2", "index3"];
    writeln!(w, "{},re,im", names[..cloud.arity].join(","))?;
    let mut line = String::with_capacity(96);
    for (idx, z) in cloud.indices.iter().zip(&cloud.values) {
        line.clear();
        for i in &idx[..cloud.arity] {
            line.push_str(&i.to_string());
            line.push(',');
        }
        line.push_str(&fmt_f64(z.re));
        line.push(',');
        line.push_str(&fmt_f64(z.im));
        writeln!(w, "{line}")?;
    }
    w.flush()
}

/// Rows `(indices, value)` of a cloud CSV, skipping `#` comments and the header.
pub fn read_cloud_csv<R: BufRead>(r: R) -> Result<Vec<(Vec<u64>, Complex64)>> {
    let mut out = Vec::new();
    let mut seen_header = false;
    for line in r.lines() {
        let line = line.map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(Error::InvalidParameter(format!("short CSV row {line:?}")));
        }
        let bad = |s: &str| Error::InvalidParameter(format!("bad CSV field {s:?}"));
        let k = fields.len() - 2;
        let idx = fields[..k]
            .iter()
            .map(|s| s.parse::<u64>().map_err(|_| bad(s)))
            .collect::<Result<Vec<_>>>()?;
        let re: f64 = fields[k].parse().map_err(|_| bad(fields[k]))?;
        let im: f64 = fields[k + 1].parse().map_err(|_| bad(fields[k + 1]))?;
        out.push((idx, Complex64::new(re, im)));
    }
    Ok(out)
}

/// Writes a serializable row set as CSV with the given columns.
pub fn write_rows_csv<W: Write>(header: &[&str], rows: &[Vec<String>], mut w: W) -> io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        writeln!(w, "{}", r.join(","))?;
    }
    w.flush()
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::InvalidParameter(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skein_trace::{term_cloud, CloudSource, QdlParams};

    #[test]
    fn csv_round_trip_is_exact() {
        let p = QdlParams::from_u(Complex64::new(-2.58581, 6.05389), 65).unwrap();
        let cloud = term_cloud(&CloudSource::Sigma { params: p, k_hat: 5 }).unwrap();
        let mut buf = Vec::new();
        write_cloud_csv(&cloud, &mut buf, true).unwrap();
        let rows = read_cloud_csv(&buf[..]).unwrap();
        assert_eq!(rows.len(), 65);
        for ((idx, z), (want_idx, want)) in rows.iter().zip(cloud.indices.iter().zip(&cloud.values)) {
            assert_eq!(idx[0], want_idx[0]);
            assert_eq!(z, want);
        }
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
    }
}
