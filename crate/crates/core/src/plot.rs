//! CSV and SVG renderings of transition functions.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::numeric::Rational;
use crate::pwl::PLFunction;

const DECIMALS: usize = 12;

/// Abscissae for one series: `0`, every vertex, `samples` grid points and
/// the right end `2 x_last` (or `1` without vertices).
pub fn sample_points(f: &PLFunction, samples: usize) -> Vec<Rational> {
    let x_max = f
        .vertices()
        .last()
        .map_or_else(Rational::one, |(x, _)| x * Rational::from(2i64));
    let mut xs: Vec<Rational> = vec![Rational::zero(), x_max.clone()];
    xs.extend(f.vertices().iter().map(|(x, _)| x.clone()));
    xs.extend((1..samples).map(|k| &x_max * Rational::new(k as u64, samples as u64)));
    xs.sort();
    xs.dedup();
    xs
}

pub fn csv(series: &[(String, &PLFunction)], samples: usize) -> String {
    let mut out = String::from("series,x,y,x_exact,y_exact\n");
    for (name, f) in series {
        for x in sample_points(f, samples) {
            let y = f.eval(&x).expect("sample points are nonnegative");
            let _ = writeln!(out, "{name},{},{},{x},{y}", x.to_decimal(DECIMALS), y.to_decimal(DECIMALS));
        }
    }
    out
}

pub fn svg(f: &PLFunction, samples: usize) -> String {
    let (width, height, margin) = (640.0, 480.0, 40.0);
    let points: Vec<(f64, f64)> = sample_points(f, samples)
        .iter()
        .map(|x| (x.to_f64(), f.eval(x).expect("nonnegative").to_f64()))
        .collect();
    let x_max = points.last().map_or(1.0, |p| p.0).max(f64::MIN_POSITIVE);
    let y_max = points.iter().map(|p| p.1).fold(f64::MIN_POSITIVE, f64::max);
    let sx = |x: f64| margin + x / x_max * (width - 2.0 * margin);
    let sy = |y: f64| height - margin - y / y_max * (height - 2.0 * margin);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="gray"/><line x1="{m}" y1="{b}" x2="{m}" y2="{m}" stroke="gray"/>"#,
        m = margin,
        b = height - margin,
        r = width - margin
    );
    let polyline: Vec<String> = points.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#,
        polyline.join(" ")
    );
    for (x, y) in f.vertices() {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="red"><title>({x}, {y})</title></circle>"#,
            sx(x.to_f64()),
            sy(y.to_f64())
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut file| {
            file.write_all(contents.as_bytes())?;
            file.sync_all()
        })
        .and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    #[test]
    fn identity_has_endpoints_only() {
        let text = csv(&[("Phi".into(), &PLFunction::identity())], 0);
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1], "Phi,0.000000000000,0.000000000000,0/1,0/1");
        assert_eq!(rows[2], "Phi,1.000000000000,1.000000000000,1/1,1/1");
    }

    #[test]
    fn vertices_and_grid_rows() {
        let f = PLFunction::from_breakpoints(q(0, 1), vec![q(2, 1), q(4, 1)], vec![q(1, 1), q(1, 2), q(1, 4)]).unwrap();
        let text = csv(&[("Phi".into(), &f)], 3);
        assert!(text.contains("Phi,2.000000000000,2.000000000000,2/1,2/1\n"));
        assert!(text.contains("Phi,4.000000000000,3.000000000000,4/1,3/1\n"));
        assert!(text.contains(",8/3,7/3\n"));
        assert_eq!(text.lines().count(), 1 + 6);
    }

    #[test]
    fn svg_marks_vertices() {
        let f = PLFunction::from_breakpoints(q(0, 1), vec![q(3, 1)], vec![q(1, 1), q(1, 2)]).unwrap();
        let s = svg(&f, 4);
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<circle").count(), 1);
        assert!(s.contains("(3/1, 3/1)"));
    }

    #[test]
    fn atomic_write_replaces_and_fails_cleanly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "a").unwrap();
        write_atomic(&path, "b").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "b");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(write_atomic(&dir.path().join("missing/out.csv"), "a").is_err());
    }
}
