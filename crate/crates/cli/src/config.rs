//! key=value config files, merged into argv before parsing.

use std::path::Path;

use crate::Failure;

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, Failure> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("config line {}: expected key=value, got {raw:?}", lineno + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(Failure::Usage(format!("config line {}: empty key", lineno + 1)));
        }
        pairs.push((key, v.trim().trim_matches('"').to_string()));
    }
    Ok(pairs)
}

fn config_path(argv: &[String]) -> Option<String> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    })
}

fn has_flag(argv: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
}

/// Appends `--key value` for every config entry whose flag is absent from `argv`.
///
/// `true` becomes a bare switch and `false` is dropped.
pub fn merge_config(argv: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(path) = config_path(&argv) else { return Ok(argv) };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| Failure::Usage(format!("cannot read config {path}: {e}")))?;
    let mut out = argv.clone();
    for (key, value) in parse_config(&text)? {
        if key == "config" || has_flag(&argv, &key) {
            continue;
        }
        match value.as_str() {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: &[&str]) -> Vec<String> {
        a.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let pairs = parse_config("# header\n\nseed = 7 # trailing\nmax_drift=0.1\n").unwrap();
        assert_eq!(pairs, [("seed".to_string(), "7".to_string()), ("max-drift".to_string(), "0.1".to_string())]);
    }

    #[test]
    fn line_without_equals_is_a_usage_error() {
        assert!(matches!(parse_config("seed 7"), Err(Failure::Usage(_))));
    }

    #[test]
    fn command_line_flags_win_over_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "seed=7\nsamples=5\nsingular=true\nverbose=false\n").unwrap();
        let argv = v(&["stablab", "suite", "--seed", "1", "--config", path.to_str().unwrap()]);
        let merged = merge_config(argv.clone()).unwrap();
        assert_eq!(merged[..argv.len()], argv[..]);
        assert_eq!(merged[argv.len()..], v(&["--samples", "5", "--singular"])[..]);
    }
}
