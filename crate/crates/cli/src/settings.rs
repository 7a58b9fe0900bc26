//! Flag and config-file merging. Every option is a string until a command asks
//! for it, so values from either source go through the same parser.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use adaptive_mls::experiments::{default_gamma, GridKind, Method, TestFunction};
use adaptive_mls::partition::{DEFAULT_EPS_WENO, DEFAULT_T};
use adaptive_mls::{KernelKind, WeightKernel};

pub const KEYS: &[&str] = &[
    "kernel",
    "degree",
    "gamma",
    "t",
    "eps",
    "trunc",
    "levels",
    "level",
    "grid",
    "seed",
    "func",
    "in",
    "out",
    "method",
    "eval",
    "curve-points",
    "threads",
];

/// Bad flags, bad config entries or missing inputs. Exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str, origin: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return usage(format!("{}:{}: expected `key=value`", origin.display(), i + 1));
        };
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return usage(format!("{}:{}: unknown key `{key}`", origin.display(), i + 1));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Config file values first, then flags on top.
    pub fn merge(
        config: Option<&Path>,
        flags: &[(&'static str, Option<&String>)],
    ) -> Result<Self, UsageError> {
        let mut values = match config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    UsageError(format!("cannot read config {}: {e}", path.display()))
                })?;
                parse_config(&text, path)?
            }
            None => BTreeMap::new(),
        };
        for (key, value) in flags {
            if let Some(v) = value {
                values.insert(key.to_string(), v.to_string());
            }
        }
        Ok(Settings { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, UsageError>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| UsageError(format!("--{key} {v}: {e}"))),
        }
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, UsageError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    /// Comma-separated list, or `default` when unset.
    pub fn list<T: FromStr + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>, UsageError>
    where
        T::Err: fmt::Display,
    {
        let Some(raw) = self.raw(key) else {
            return Ok(default.to_vec());
        };
        let items: Vec<&str> = raw.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        if items.is_empty() {
            return usage(format!("--{key}: empty list"));
        }
        items
            .into_iter()
            .map(|s| s.parse().map_err(|e| UsageError(format!("--{key} {s}: {e}"))))
            .collect()
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }

    pub fn kernels(&self, default: KernelKind) -> Result<Vec<WeightKernel>, UsageError> {
        let trunc: f64 = self.parse_or("trunc", adaptive_mls::kernels::DEFAULT_TRUNCATION)?;
        self.list("kernel", &[default])?
            .into_iter()
            .map(|kind| {
                WeightKernel::with_truncation(kind, trunc).map_err(|e| UsageError(e.to_string()))
            })
            .collect()
    }

    pub fn gamma_for(&self, kernel: &WeightKernel) -> Result<f64, UsageError> {
        let gamma = self.parse_or("gamma", default_gamma(kernel.kind()))?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return usage(format!("--gamma must be positive, got {gamma}"));
        }
        Ok(gamma)
    }

    pub fn t(&self) -> Result<f64, UsageError> {
        self.parse_or("t", DEFAULT_T)
    }

    pub fn eps(&self) -> Result<f64, UsageError> {
        self.parse_or("eps", DEFAULT_EPS_WENO)
    }

    pub fn methods(&self) -> Result<Vec<Method>, UsageError> {
        self.list("method", &[Method::Linear, Method::Nonlinear])
    }

    pub fn func(&self, default: TestFunction) -> Result<TestFunction, UsageError> {
        self.parse_or("func", default)
    }

    pub fn grid(&self) -> Result<GridKind, UsageError> {
        let seed: u64 = self.parse_or("seed", 0)?;
        match self.raw("grid").unwrap_or("uniform").to_ascii_lowercase().as_str() {
            "uniform" => Ok(GridKind::Uniform),
            "random" => Ok(GridKind::Random { seed }),
            other => usage(format!("--grid must be `uniform` or `random`, got `{other}`")),
        }
    }

    /// `A-B`, `A,B,C` or a single level.
    pub fn levels(&self, default: &str) -> Result<Vec<u32>, UsageError> {
        parse_levels(self.raw("levels").unwrap_or(default))
    }

    pub fn threads(&self) -> Result<Option<usize>, UsageError> {
        match self.parse::<usize>("threads")? {
            Some(n) => Ok(Some(n)),
            None => match std::env::var("ADAPTIVE_MLS_THREADS") {
                Ok(v) if !v.trim().is_empty() => v.trim().parse().map(Some).map_err(|e| {
                    UsageError(format!("ADAPTIVE_MLS_THREADS={v}: {e}"))
                }),
                _ => Ok(None),
            },
        }
    }
}

pub fn parse_levels(raw: &str) -> Result<Vec<u32>, UsageError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return usage("--levels: empty level list");
    }
    let parse = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|e| UsageError(format!("--levels {raw}: {e}")))
    };
    let levels: Vec<u32> = match raw.split_once('-') {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b)?);
            (a..=b).collect()
        }
        None => raw.split(',').map(parse).collect::<Result<_, _>>()?,
    };
    if levels.is_empty() {
        return usage(format!("--levels {raw}: empty level list"));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return usage(format!("--levels {raw}: levels must be strictly increasing"));
    }
    if let Some(l) = levels.iter().find(|&&l| !(1..=24).contains(&l)) {
        return usage(format!("--levels {raw}: level {l} outside 1..=24"));
    }
    Ok(levels)
}

/// Where to put the output of a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
    Directory(PathBuf),
}

impl Destination {
    /// A path ending in `.csv` is a file; anything else is a directory.
    pub fn from_setting(path: Option<PathBuf>) -> Self {
        match path {
            None => Destination::Stdout,
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => {
                Destination::File(p)
            }
            Some(p) => Destination::Directory(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_ranges_and_lists() {
        assert_eq!(parse_levels("7-10").unwrap(), vec![7, 8, 9, 10]);
        assert_eq!(parse_levels("9").unwrap(), vec![9]);
        assert_eq!(parse_levels("7, 9,12").unwrap(), vec![7, 9, 12]);
        assert!(parse_levels("").is_err());
        assert!(parse_levels("10-7").is_err());
        assert!(parse_levels("9,8").is_err());
        assert!(parse_levels("0-3").is_err());
    }

    #[test]
    fn config_comments_and_unknown_keys() {
        let cfg = parse_config("# header\nkernel = W4\n\ndegree=3 # trailing\n", Path::new("c")).unwrap();
        assert_eq!(cfg["kernel"], "W4");
        assert_eq!(cfg["degree"], "3");
        let err = parse_config("kernel=W2\nbogus=1\n", Path::new("c")).unwrap_err();
        assert!(err.0.contains("c:2"), "{}", err.0);
        assert!(parse_config("novalue\n", Path::new("c")).is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "kernel=W4\ndegree=3\n").unwrap();
        let degree = "2".to_string();
        let s = Settings::merge(Some(&path), &[("degree", Some(&degree)), ("kernel", None)]).unwrap();
        assert_eq!(s.raw("kernel"), Some("W4"));
        assert_eq!(s.parse::<usize>("degree").unwrap(), Some(2));
    }

    #[test]
    fn destinations() {
        assert_eq!(Destination::from_setting(None), Destination::Stdout);
        assert!(matches!(
            Destination::from_setting(Some("a/b.CSV".into())),
            Destination::File(_)
        ));
        assert!(matches!(
            Destination::from_setting(Some("out".into())),
            Destination::Directory(_)
        ));
    }
}
