//! Point files: a `dim=<d>` header line, then one whitespace-separated
//! point per line. `#` comments and blank lines are allowed.

use std::fs;
use std::path::Path;

use halving_lab::geom::PointCloud;

use crate::CliError;

pub fn read_points(path: &Path) -> Result<PointCloud, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'));

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| CliError::config(format!("{}: empty point file", path.display())))?;
    let dim: usize = header
        .strip_prefix("dim=")
        .and_then(|raw| raw.trim().parse().ok())
        .filter(|d| *d >= 1)
        .ok_or_else(|| {
            CliError::config(format!(
                "{}:{}: expected header dim=<d>, got {header:?}",
                path.display(),
                header_no
            ))
        })?;

    let mut coords = Vec::new();
    let mut count = 0usize;
    for (line_no, line) in lines {
        let values = line
            .split_whitespace()
            .map(|item| {
                item.parse::<f64>().map_err(|e| {
                    CliError::config(format!(
                        "{}:{}: bad coordinate {item:?}: {e}",
                        path.display(),
                        line_no
                    ))
                })
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        if values.len() != dim {
            return Err(CliError::config(format!(
                "{}:{}: expected {dim} coordinates, got {}",
                path.display(),
                line_no,
                values.len()
            )));
        }
        coords.extend(values);
        count += 1;
    }
    if count == 0 {
        return Err(CliError::config(format!(
            "{}: no points after the header",
            path.display()
        )));
    }
    PointCloud::from_flat(dim, coords).map_err(CliError::from)
}

/// Like [`read_points`] but tolerates an empty body: the caller decides
/// what zero queries mean.
pub fn read_queries(path: &Path) -> Result<(usize, Vec<Vec<f64>>), CliError> {
    match read_points(path) {
        Ok(cloud) => {
            let dim = cloud.dim();
            Ok((dim, cloud.points().map(<[f64]>::to_vec).collect()))
        }
        Err(CliError::Config(msg)) if msg.contains("no points after the header") => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let header = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'))
                .unwrap_or_default();
            let dim = header
                .strip_prefix("dim=")
                .and_then(|raw| raw.trim().parse().ok())
                .unwrap_or(0);
            Ok((dim, Vec::new()))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(text: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(text.as_bytes()).unwrap();
        file
    }

    #[test]
    fn reads_points_with_comments() {
        let file = write_file("# sample\ndim=2\n0 0\n2.0\t0.5\n");
        let cloud = read_points(file.path()).unwrap();
        assert_eq!(cloud.dim(), 2);
        assert_eq!(cloud.len(), 2);
        assert_eq!(cloud.point(1), &[2.0, 0.5]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let file = write_file("dim=2\n0 0\n1 x\n");
        let err = read_points(file.path()).unwrap_err();
        assert!(err.to_string().contains(":3:"), "{err}");

        let file = write_file("dim=2\n0 0 0\n");
        let err = read_points(file.path()).unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");

        let file = write_file("2\n0 0\n");
        let err = read_points(file.path()).unwrap_err();
        assert!(err.to_string().contains("dim=<d>"), "{err}");
    }

    #[test]
    fn empty_query_files_are_allowed() {
        let file = write_file("dim=3\n");
        let (dim, queries) = read_queries(file.path()).unwrap();
        assert_eq!(dim, 3);
        assert!(queries.is_empty());
    }
}
