//! `--config FILE` support: flat `key=value` lines become flags inserted
//! right after the subcommand, so explicit flags (which come later) win.
//!
//! Lines may carry a leading `#`, which lets any output file's echoed
//! configuration header be fed back in. Keys that are not flags of the
//! subcommand are ignored.

use std::ffi::OsString;

use clap::CommandFactory;

use crate::args::Cli;
use crate::{CliError, CliResult};

fn config_path(args: &[OsString]) -> CliResult<Option<(usize, usize, OsString)>> {
    for (pos, arg) in args.iter().enumerate() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            let value = args
                .get(pos + 1)
                .ok_or_else(|| CliError::usage("--config needs a value"))?;
            return Ok(Some((pos, 2, value.clone())));
        }
        if let Some(value) = text.strip_prefix("--config=") {
            return Ok(Some((pos, 1, value.into())));
        }
    }
    Ok(None)
}

pub fn parse_pairs(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map(|l| l.trim().trim_start_matches('#').trim())
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .filter(|(k, _)| !k.is_empty() && !k.contains(','))
        .collect()
}

pub fn expand(mut args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some((pos, width, path)) = config_path(&args)? else {
        return Ok(args);
    };
    args.drain(pos..pos + width);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError {
        code: 2,
        kind: "io",
        message: format!("cannot read config {}: {e}", path.to_string_lossy()),
    })?;

    let Some(sub_pos) = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
    else {
        return Ok(args);
    };
    let sub_pos = sub_pos + 1;
    let root = Cli::command();
    let Some(sub) = root.find_subcommand(args[sub_pos].to_string_lossy().as_ref()) else {
        return Ok(args);
    };

    // Flags named explicitly take precedence over every config entry for
    // the same flag, which matters for repeatable ones like `--scores`.
    let explicit: Vec<String> = args[sub_pos + 1..]
        .iter()
        .filter_map(|a| {
            let a = a.to_string_lossy();
            if let Some(long) = a.strip_prefix("--") {
                return Some(long.split('=').next().unwrap_or(long).to_string());
            }
            let short = a.strip_prefix('-')?.chars().next()?;
            sub.get_arguments()
                .find(|arg| arg.get_short() == Some(short))
                .and_then(|arg| arg.get_long().map(str::to_owned))
        })
        .collect();

    let mut inserted = Vec::new();
    for (key, value) in parse_pairs(&text) {
        if key == "config" || explicit.contains(&key) {
            continue;
        }
        let Some(arg) = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
        else {
            continue;
        };
        if arg.get_action().takes_values() {
            inserted.push(OsString::from(format!("--{key}")));
            inserted.push(OsString::from(value));
        } else if value == "true" {
            inserted.push(OsString::from(format!("--{key}")));
        }
    }
    args.splice(sub_pos + 1..sub_pos + 1, inserted);
    Ok(args)
}
