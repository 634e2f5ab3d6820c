//! Image-line text files and the binary matrix dump.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use paraxial_inverse::{Complex64, ComplexLine, ImageLine, KernelMatrix, UniformGrid, XGrid};

use crate::error::{CliError, Result};

pub const IMAGE_HEADER: &str = "x [length],re_u [arb],im_u [arb]";

/// Relative tolerance, in units of the step, for accepting a row as on-grid.
const UNIFORM_TOL: f64 = 1e-6;

/// Reads rows of `x, re, im` into an image line.
///
/// Blank lines and lines starting with `#` are skipped, and a single leading
/// header line is allowed. The grid is inferred from the first and last
/// abscissa and the row count; every row must sit on it.
pub fn load_image_data(path: &Path) -> Result<ImageLine> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parse_err = |line: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut rows: Vec<(usize, f64, Complex64)> = Vec::new();
    let mut seen_data = false;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
        let values = match parsed {
            Some(v) => v,
            None if !seen_data && rows.is_empty() && line.chars().any(|c| c.is_ascii_alphabetic()) => {
                seen_data = true;
                continue;
            }
            None => return Err(parse_err(lineno, format!("cannot parse `{line}` as numbers"))),
        };
        seen_data = true;
        if values.len() != 3 {
            return Err(parse_err(lineno, format!("expected 3 columns (x, re, im), found {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(lineno, "non-finite value".into()));
        }
        if let Some(&(prev_line, prev_x, _)) = rows.last() {
            if values[0] <= prev_x {
                return Err(parse_err(
                    lineno,
                    format!("x = {} does not increase past {prev_x} (line {prev_line})", values[0]),
                ));
            }
        }
        rows.push((lineno, values[0], Complex64::new(values[1], values[2])));
    }
    if rows.len() < 3 {
        return Err(parse_err(text.lines().count().max(1), format!("need at least 3 rows, found {}", rows.len())));
    }

    let (x_min, x_max) = (rows[0].1, rows[rows.len() - 1].1);
    let grid = XGrid::new(x_min, x_max, rows.len() - 1).map_err(|e| parse_err(rows[0].0, e.to_string()))?;
    for (i, &(lineno, x, _)) in rows.iter().enumerate() {
        if (x - grid.node(i)).abs() > UNIFORM_TOL * grid.h() {
            return Err(parse_err(
                lineno,
                format!("x = {x} is off the uniform grid (expected {}, step {})", grid.node(i), grid.h()),
            ));
        }
    }
    let samples = rows.into_iter().map(|(_, _, u)| u).collect();
    ComplexLine::new(grid, samples).map_err(|e| CliError::Invalid(e.to_string()))
}

/// Text form read back by [`load_image_data`]; the last row carries `x_max` exactly.
pub fn format_image_data(image: &ImageLine) -> String {
    let grid = image.grid();
    let mut out = String::with_capacity(64 * image.len());
    out.push_str(IMAGE_HEADER);
    out.push('\n');
    let last = image.len() - 1;
    for (i, u) in image.samples().iter().enumerate() {
        let x = if i == last { grid.x_max() } else { grid.node(i) };
        let _ = writeln!(out, "{x:e},{:e},{:e}", u.re, u.im);
    }
    out
}

pub fn write_image_data(path: &Path, image: &ImageLine) -> Result<()> {
    fs::write(path, format_image_data(image)).map_err(|e| CliError::io(path, e))
}

/// Writes `stem.bin` (row-major little-endian `(re, im)` pairs) and `stem.txt`.
pub fn dump_matrix(m: &KernelMatrix, dir: &Path, stem: &str) -> Result<[std::path::PathBuf; 2]> {
    let bin = dir.join(format!("{stem}.bin"));
    let txt = dir.join(format!("{stem}.txt"));
    let file = fs::File::create(&bin).map_err(|e| CliError::io(&bin, e))?;
    m.write_binary(BufWriter::new(file)).map_err(|e| CliError::io(&bin, e))?;
    fs::write(&txt, m.sidecar()).map_err(|e| CliError::io(&txt, e))?;
    Ok([bin, txt])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, body: &str) -> std::path::PathBuf {
        let p = dir.join("img.csv");
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let grid = XGrid::new(2.8284, 28.284, 17).unwrap();
        let image = ComplexLine::from_fn(grid, |x| Complex64::new(x.sin(), (0.3 * x).cos() / 7.0)).unwrap();
        let p = dir.path().join("image.csv");
        write_image_data(&p, &image).unwrap();
        assert_eq!(load_image_data(&p).unwrap(), image);
    }

    #[test]
    fn rejects_non_monotone_x() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "0,1,0\n1,1,0\n0.5,1,0\n2,1,0\n");
        match load_image_data(&p) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_non_uniform_x() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "# comment\nx,re,im\n0,1,0\n1,1,0\n2.5,1,0\n3,1,0\n");
        match load_image_data(&p) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_line_of_bad_number() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "x,re,im\n0,1,0\n1,abc,0\n2,1,0\n");
        match load_image_data(&p) {
            Err(e @ CliError::Parse { line: 3, .. }) => assert_eq!(e.exit_code(), 2),
            other => panic!("{other:?}"),
        }
        let p = write(dir.path(), "0,1\n1,1,0\n2,1,0\n");
        assert!(matches!(load_image_data(&p), Err(CliError::Parse { line: 1, .. })));
    }

    #[test]
    fn missing_file_is_io() {
        let err = load_image_data(Path::new("/nonexistent/image.csv")).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn matrix_dump_layout() {
        let dir = tempfile::tempdir().unwrap();
        let grid = paraxial_inverse::ZGrid::new(90.0, 100.0, 5).unwrap();
        let m = paraxial_inverse::assemble_m(&grid, Default::default(), paraxial_inverse::DEFAULT_CLAMP).unwrap();
        let [bin, txt] = dump_matrix(&m, dir.path(), "M").unwrap();
        let bytes = fs::read(bin).unwrap();
        assert_eq!(bytes.len(), 6 * 6 * 16);
        let re = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
        assert_eq!(re, m.entries()[(0, 1)].re);
        assert!(fs::read_to_string(txt).unwrap().contains("rows = 6"));
    }
}
