//! Run configuration: a flat `key = value` file with `[verify]` and
//! `[sweep]` sections, overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Verify,
    Sweep,
}

impl Section {
    fn keys(self) -> &'static [&'static str] {
        match self {
            Section::Verify => &[
                "suite",
                "format",
                "threads",
                "seed",
                "perturb",
                "perturb_kernel",
                "points",
                "levels",
                "routes",
                "gauss_q_max",
            ],
            Section::Sweep => &[
                "what", "format", "threads", "seed", "levels", "t", "y", "kind", "routes",
            ],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Section::Verify => "verify",
            Section::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Text,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            _ => bail!("unknown format {s:?} (json, csv or text)"),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "text",
        })
    }
}

/// Resolved settings for one `verify` or `sweep` run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Section,
    pub parameters: BTreeMap<String, String>,
    pub output_format: OutputFormat,
    pub thread_count: usize,
    pub seed: u64,
}

/// Parses the file, keeping only the section for `command`. Every section
/// and key is checked, so a typo anywhere is an error.
pub fn parse_config(text: &str, command: Section) -> Result<BTreeMap<String, String>> {
    let mut current: Option<Section> = None;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = Some(match name.trim() {
                "verify" => Section::Verify,
                "sweep" => Section::Sweep,
                other => bail!("line {line_no}: unknown section [{other}]"),
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {line_no}: expected `key = value`, got {line:?}"))?;
        let (key, value) = (key.trim(), value.trim());
        let section = current.ok_or_else(|| anyhow!("line {line_no}: key `{key}` outside a section"))?;
        if !section.keys().contains(&key) {
            bail!(
                "line {line_no}: unknown key `{key}` in [{}] (allowed: {})",
                section.name(),
                section.keys().join(", ")
            );
        }
        if section == command && out.insert(key.to_string(), value.to_string()).is_some() {
            bail!("line {line_no}: duplicate key `{key}`");
        }
    }
    Ok(out)
}

impl RunConfig {
    /// File values first, then `overrides` (flags given on the command line).
    pub fn resolve(
        command: Section,
        file: Option<&Path>,
        overrides: BTreeMap<String, String>,
        default_threads: usize,
    ) -> Result<Self> {
        let mut parameters = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                parse_config(&text, command).with_context(|| format!("in {}", p.display()))?
            }
            None => BTreeMap::new(),
        };
        for (k, v) in overrides {
            if !command.keys().contains(&k.as_str()) {
                bail!("unknown key `{k}` for {}", command.name());
            }
            parameters.insert(k, v);
        }
        let output_format = match parameters.remove("format") {
            Some(f) => f.parse()?,
            None => OutputFormat::default(),
        };
        let thread_count = match parameters.remove("threads") {
            Some(t) => t.parse().with_context(|| format!("threads = {t:?}"))?,
            None => default_threads,
        };
        let seed = match parameters.remove("seed") {
            Some(s) => s.parse().with_context(|| format!("seed = {s:?}"))?,
            None => 1,
        };
        Ok(RunConfig {
            command,
            parameters,
            output_format,
            thread_count,
            seed,
        })
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.parameters.get(key) {
            Some(v) => v.parse().map_err(|e| anyhow!("{key} = {v:?}: {e}")),
            None => Ok(default),
        }
    }

    pub fn list<T: FromStr>(&self, key: &str, default: &[T]) -> Result<Vec<T>>
    where
        T: Clone,
        T::Err: fmt::Display,
    {
        match self.parameters.get(key) {
            Some(v) => parse_list(v).map_err(|e| anyhow!("{key}: {e}")),
            None => Ok(default.to_vec()),
        }
    }
}

pub fn parse_list<T: FromStr>(v: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| anyhow!("{s:?}: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FILE: &str = "\
# defaults for the lab
[verify]
suite = core
seed = 9   # pinned
levels = 5,13

[sweep]
what = prediction
";

    #[test]
    fn sections_are_separated() {
        let v = parse_config(FILE, Section::Verify).unwrap();
        assert_eq!(v["seed"], "9");
        assert!(!v.contains_key("what"));
        let s = parse_config(FILE, Section::Sweep).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn unknown_keys_name_the_line() {
        let err = parse_config("[verify]\nsuite = core\nsede = 3\n", Section::Verify).unwrap_err();
        assert!(
            err.to_string().contains("line 3") && err.to_string().contains("sede"),
            "{err}"
        );
        // checked even in the section not being run
        assert!(parse_config("[sweep]\nbogus = 1\n", Section::Verify).is_err());
        assert!(parse_config("[plot]\n", Section::Verify).is_err());
        assert!(parse_config("seed = 1\n", Section::Verify).is_err());
        assert!(parse_config("[verify]\nseed\n", Section::Verify).is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("eisenlab-cfg-{}", std::process::id()));
        std::fs::write(&dir, FILE).unwrap();
        let over = BTreeMap::from([("seed".to_string(), "11".to_string())]);
        let c = RunConfig::resolve(Section::Verify, Some(&dir), over, 1).unwrap();
        std::fs::remove_file(&dir).ok();
        assert_eq!(c.seed, 11);
        assert_eq!(c.list::<u64>("levels", &[]).unwrap(), vec![5, 13]);
        assert_eq!(c.output_format, OutputFormat::Text);
        let bad = BTreeMap::from([("what".to_string(), "x".to_string())]);
        assert!(RunConfig::resolve(Section::Verify, None, bad, 1).is_err());
    }
}
