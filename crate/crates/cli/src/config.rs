//! Flat `key = value` experiment files merged under the command-line flags.
//!
//! Each key is spliced into the argument list as `--key=value` right after the
//! subcommand, ahead of the user's own flags. Every argument overrides itself,
//! so a flag given on the command line wins over the file.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use clap::{ArgAction, Command};

use crate::CliError;

/// Parsed `key = value` pairs, keys normalized to flag spelling.
pub fn parse_config(text: &str, origin: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("{}:{}: expected `key = value`, found {line:?}", origin.display(), i + 1)));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("{}:{}: empty key", origin.display(), i + 1)));
        }
        if out.iter().any(|(seen, _)| *seen == key) {
            return Err(CliError::Usage(format!("{}:{}: key `{key}` given twice", origin.display(), i + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Long flags that take no value anywhere in the command tree.
fn switch_flags(cmd: &Command, out: &mut BTreeSet<String>) {
    for a in cmd.get_arguments() {
        if matches!(a.get_action(), ArgAction::SetTrue | ArgAction::SetFalse | ArgAction::Help | ArgAction::Version | ArgAction::Count) {
            if let Some(l) = a.get_long() {
                out.insert(l.to_string());
            }
        }
    }
    for s in cmd.get_subcommands() {
        switch_flags(s, out);
    }
}

/// Value of `--config` in `args`, if present.
pub fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

/// Index just past the subcommand tokens in `args` (`args[0]` is the program).
fn subcommand_end(cmd: &Command, args: &[String], depth: usize) -> usize {
    let mut switches = BTreeSet::new();
    switch_flags(cmd, &mut switches);
    let mut seen = 0;
    let mut i = 1;
    while i < args.len() && seen < depth {
        let a = &args[i];
        if a == "--" {
            break;
        }
        if let Some(name) = a.strip_prefix("--") {
            if !name.contains('=') && !switches.contains(name) {
                i += 1;
            }
        } else if !a.starts_with('-') {
            seen += 1;
        }
        i += 1;
    }
    i
}

/// The leaf subcommand selected by `path`.
pub fn leaf<'a>(cmd: &'a Command, path: &[String]) -> &'a Command {
    let mut c = cmd;
    for p in path {
        c = c.find_subcommand(p).expect("subcommand from a successful parse");
    }
    c
}

/// Splices the configuration keys into `args` after the subcommand path.
/// Keys that are not flags of the selected subcommand are rejected.
pub fn merge(cmd: &Command, args: &[String], path: &[String], pairs: &[(String, String)]) -> Result<Vec<String>, CliError> {
    let target = leaf(cmd, path);
    let mut known: BTreeMap<String, bool> = BTreeMap::new();
    for c in [cmd, target] {
        for a in c.get_arguments() {
            if let Some(l) = a.get_long() {
                known.insert(l.to_string(), matches!(a.get_action(), ArgAction::SetTrue));
            }
        }
    }
    let mut spliced = Vec::new();
    for (k, v) in pairs {
        if matches!(k.as_str(), "config" | "help" | "version") {
            return Err(CliError::Usage(format!("config key `{k}` is not allowed in a config file")));
        }
        match known.get(k.as_str()) {
            None => {
                return Err(CliError::Usage(format!("unknown config key `{k}` for `{}`", path.join(" "))));
            }
            Some(true) => match v.as_str() {
                "true" => spliced.push(format!("--{k}")),
                "false" => {}
                _ => return Err(CliError::Usage(format!("config key `{k}` takes true or false, got {v:?}"))),
            },
            Some(false) => spliced.push(format!("--{k}={v}")),
        }
    }
    let end = subcommand_end(cmd, args, path.len());
    let mut out = args[..end].to_vec();
    out.extend(spliced);
    out.extend_from_slice(&args[end..]);
    Ok(out)
}

/// Effective values of every flag of the leaf subcommand, defaults included,
/// as `key -> value` with list values comma-joined.
pub fn effective(target: &Command, matches: &clap::ArgMatches) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for a in target.get_arguments() {
        let id = a.get_id().as_str();
        let Some(long) = a.get_long() else { continue };
        if a.is_global_set() || matches!(a.get_action(), ArgAction::Help | ArgAction::Version) {
            continue;
        }
        if let Ok(Some(vals)) = matches.try_get_raw(id) {
            let joined: Vec<String> = vals.map(|v| v.to_string_lossy().into_owned()).collect();
            out.insert(long.to_string(), joined.join(","));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_rejects_junk() {
        let p = parse_config("# exp\nn = 16\nsample_count=3\n\n", Path::new("x")).unwrap();
        assert_eq!(p, vec![("n".into(), "16".into()), ("sample-count".into(), "3".into())]);
        assert!(parse_config("n 16\n", Path::new("x")).is_err());
        assert!(parse_config("n=1\nn=2\n", Path::new("x")).is_err());
    }

    #[test]
    fn finds_config_flag() {
        let a: Vec<String> = ["p", "check", "--config", "f.conf"].iter().map(|s| s.to_string()).collect();
        assert_eq!(config_path(&a).as_deref(), Some("f.conf"));
        let b: Vec<String> = ["p", "--config=g"].iter().map(|s| s.to_string()).collect();
        assert_eq!(config_path(&b).as_deref(), Some("g"));
    }
}
