//! `key = value` config files, merged into the argument list.

use anyhow::{bail, Context, Result};
use std::path::Path;

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", i + 1);
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn flag_given(args: &[String], key: &str) -> bool {
    let long = format!("--{}", key);
    let prefix = format!("--{}=", key);
    args.iter().any(|a| *a == long || a.starts_with(&prefix))
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Appends config entries as flags, skipping any flag already on the command
/// line. `true`/`false` values become bare switches.
pub fn merge_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .with_context(|| format!("reading config {}", path))?;
    let mut out = args.clone();
    for (key, value) in parse_config(&text)? {
        if key == "config" || flag_given(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => out.push(format!("--{}", key)),
            "false" => {}
            _ => {
                out.push(format!("--{}", key));
                out.push(value);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_skips_comments() {
        let c = parse_config("# c\nseed = 4\ntrials_per_point=10\n\n").unwrap();
        assert_eq!(
            c,
            vec![
                ("seed".into(), "4".into()),
                ("trials-per-point".into(), "10".into())
            ]
        );
        assert!(parse_config("oops").is_err());
    }

    #[test]
    fn command_line_wins() {
        let args: Vec<String> = ["x", "--seed", "1"].iter().map(|s| s.to_string()).collect();
        assert!(flag_given(&args, "seed"));
        assert!(!flag_given(&args, "n"));
    }
}
