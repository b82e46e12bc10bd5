//! `key = value` experiment files, spliced in front of command-line flags so the latter win.

use std::path::Path;

use crate::CliError;

#[derive(Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub entries: Vec<(String, String)>,
}

pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
    let mut cfg = ConfigFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected 'key = value'", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() || k.contains(char::is_whitespace) {
            return Err(CliError::Usage(format!("config line {}: malformed entry", i + 1)));
        }
        let k = k.replace('_', "-");
        if k == "command" {
            cfg.command = Some(v.to_string());
        } else {
            cfg.entries.push((k, v.to_string()));
        }
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("config {}: {e}", path.display())))?;
    parse(&text)
}

/// Remove `--config PATH` from `args` and insert the file's flags right after the subcommand.
pub fn expand(mut args: Vec<String>, commands: &[&str]) -> Result<Vec<String>, CliError> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err(CliError::Usage("--config needs a path".into()));
            }
            path = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = args[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            args.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let cfg = load(Path::new(&path))?;
    // `true`/`false` toggle switches rather than passing a value
    let mut flags = Vec::new();
    for (k, v) in cfg.entries {
        match v.as_str() {
            "true" => flags.push(format!("--{k}")),
            "false" => {}
            _ => flags.extend([format!("--{k}"), v]),
        }
    }
    let pos = args.iter().position(|a| commands.contains(&a.as_str()));
    let out = match (pos, cfg.command) {
        (Some(p), _) => {
            let mut out = args[..=p].to_vec();
            out.extend(flags);
            out.extend_from_slice(&args[p + 1..]);
            out
        }
        (None, Some(cmd)) => {
            let mut out = vec![args[0].clone(), cmd];
            out.extend(flags);
            out.extend_from_slice(&args[1..]);
            out
        }
        (None, None) => return Err(CliError::Usage("no command on the command line or in the config file".into())),
    };
    Ok(out)
}
