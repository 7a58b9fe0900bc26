use std::io::Read;

use anyhow::{bail, Context, Result};

use crate::settings::UsageError;

/// Reads `x,f` rows. A first row that does not parse as numbers is taken as a
/// header; `#` lines are comments.
pub fn read_xy(reader: impl Read, origin: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.with_context(|| format!("{origin}: malformed CSV"))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed = (record.len() == 2)
            .then(|| Some((record[0].parse::<f64>().ok()?, record[1].parse::<f64>().ok()?)))
            .flatten();
        match parsed {
            Some((x, f)) => {
                if !x.is_finite() || !f.is_finite() {
                    bail!("{origin}:{line}: non-finite value");
                }
                xs.push(x);
                fs.push(f);
            }
            None if i == 0 && record.len() == 2 => continue,
            None => bail!(
                "{origin}:{line}: expected two numeric fields `x,f`, got `{}`",
                record.iter().collect::<Vec<_>>().join(",")
            ),
        }
    }
    Ok((xs, fs))
}

/// `nodes`, `midpoints`, or `a:b:n` (n equally spaced points, ends included).
pub fn evaluation_points(spec: Option<&str>, nodes: &[f64]) -> Result<Vec<f64>, UsageError> {
    let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
    let spec = spec.unwrap_or("1001");
    match spec {
        "nodes" => Ok(nodes.to_vec()),
        "midpoints" => Ok(nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()),
        _ => {
            let parts: Vec<&str> = spec.split(':').collect();
            let bad = || UsageError(format!("--eval {spec}: expected nodes, midpoints, N or a:b:N"));
            let (a, b, n) = match parts.as_slice() {
                [n] => (first, last, n.parse::<usize>().map_err(|_| bad())?),
                [a, b, n] => (
                    a.parse::<f64>().map_err(|_| bad())?,
                    b.parse::<f64>().map_err(|_| bad())?,
                    n.parse::<usize>().map_err(|_| bad())?,
                ),
                _ => return Err(bad()),
            };
            if n == 0 || !a.is_finite() || !b.is_finite() || a > b {
                return Err(bad());
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_comments_are_skipped() {
        let text = "x,f\n# note\n0,1\n1, 2.5\n\n2,4\n";
        let (xs, fs) = read_xy(text.as_bytes(), "data").unwrap();
        assert_eq!(xs, vec![0.0, 1.0, 2.0]);
        assert_eq!(fs, vec![1.0, 2.5, 4.0]);
    }

    #[test]
    fn bad_row_reports_its_line() {
        let text = "0,1\n1,2\n2,oops\n";
        let err = read_xy(text.as_bytes(), "data").unwrap_err().to_string();
        assert!(err.starts_with("data:3:"), "{err}");
        let err = read_xy("0,1\n1,2,3\n".as_bytes(), "data").unwrap_err().to_string();
        assert!(err.starts_with("data:2:"), "{err}");
    }

    #[test]
    fn evaluation_specs() {
        let nodes = [0.0, 1.0, 3.0];
        assert_eq!(evaluation_points(Some("nodes"), &nodes).unwrap(), nodes.to_vec());
        assert_eq!(evaluation_points(Some("midpoints"), &nodes).unwrap(), vec![0.5, 2.0]);
        assert_eq!(evaluation_points(Some("0:1:3"), &nodes).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(evaluation_points(Some("4"), &nodes).unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(evaluation_points(None, &nodes).unwrap().len(), 1001);
        assert!(evaluation_points(Some("1:0:3"), &nodes).is_err());
        assert!(evaluation_points(Some("x"), &nodes).is_err());
    }
}
