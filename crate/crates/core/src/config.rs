//! World configuration and the flat `key = value` file format.
//!
//! Keys follow the spelling of the experiment's constants table
//! (`stdev_soc-or-sd`, `avoid-edges`, ...). Hyphens and underscores are
//! interchangeable on read; [`WorldConfig::to_cfg_string`] always writes the
//! underscore form.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Every model parameter plus the two scenario switches and the RNG seed.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    /// Maximum number of ticks.
    pub steps: u32,
    pub n_stories: u32,
    pub n_developers: u32,
    /// Problem spin-off: `floor(pso)` stories appended per tick. 0 disables.
    pub pso: f64,
    pub mean_difficulty: f64,
    pub stdev_difficulty: f64,
    pub mean_competence: f64,
    pub stdev_competence: f64,
    pub mean_sosd: f64,
    pub stdev_sosd: f64,
    pub mean_enquiry: f64,
    pub stdev_enquiry: f64,
    pub increase_comp_rate: f64,
    pub decrease_comp_rate: f64,
    /// Proportional sosd drift after a solved story.
    pub attitude_increase_rate: f64,
    /// Proportional sosd drift after a failed attempt.
    pub attitude_decrease_rate: f64,
    /// Parsed and echoed, never read by the model.
    pub tolerance: f64,
    /// Interaction radius for claiming and joining stories.
    pub proximity: f64,
    pub sociable: bool,
    pub curious: bool,
    pub avoid_edges: bool,
    pub looking_for_stories: bool,
    pub world_half_extent: f64,
    /// Band threshold multiplier on the population standard deviation.
    pub band_k: f64,
    /// Keep a failed team attached to its story for the next tick instead of
    /// returning the story to the backlog.
    pub retain_failed_teams: bool,
    /// A non-linear lead combines with every developer within `proximity` of
    /// the story, not only its own team.
    pub curious_reach_beyond_team: bool,
    pub exponent_cap: f64,
    pub contribution_cap: f64,
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            steps: 10,
            n_stories: 100,
            n_developers: 50,
            pso: 0.0,
            mean_difficulty: 5.0,
            stdev_difficulty: 5.2,
            mean_competence: 5.0,
            stdev_competence: 9.7,
            mean_sosd: 0.2,
            stdev_sosd: 5.03,
            mean_enquiry: 0.0,
            stdev_enquiry: 5.1,
            increase_comp_rate: 0.13,
            decrease_comp_rate: 0.64,
            attitude_increase_rate: 0.13,
            attitude_decrease_rate: 0.05,
            tolerance: 5.5,
            proximity: 19.0,
            sociable: false,
            curious: false,
            avoid_edges: true,
            looking_for_stories: true,
            world_half_extent: 16.5,
            band_k: 0.75,
            retain_failed_teams: false,
            curious_reach_beyond_team: true,
            exponent_cap: 8.0,
            contribution_cap: 1e9,
            seed: 0,
        }
    }
}

/// Canonical key names in write order.
pub const CONFIG_KEYS: &[&str] = &[
    "steps",
    "n_stories",
    "n_developers",
    "pso",
    "mean_difficulty",
    "stdev_difficulty",
    "mean_competence",
    "stdev_competence",
    "mean_soc_or_sd",
    "stdev_soc_or_sd",
    "mean_enquiry",
    "stdev_enquiry",
    "increase_comp_rate",
    "decrease_comp_rate",
    "attitude_increase_rate",
    "attitude_decrease_rate",
    "tolerance",
    "proximity",
    "sociable",
    "curious",
    "avoid_edges",
    "looking_for_stories",
    "world_half_extent",
    "band_k",
    "retain_failed_teams",
    "curious_reach_beyond_team",
    "exponent_cap",
    "contribution_cap",
    "seed",
];

/// Maps a key as written in a file to its canonical form, or `None` if it is
/// not a config key.
pub fn canonical_key(key: &str) -> Option<&'static str> {
    let norm = key.trim().to_ascii_lowercase().replace('-', "_");
    let aliased = match norm.as_str() {
        "mean_sosd" => "mean_soc_or_sd",
        "stdev_sosd" => "stdev_soc_or_sd",
        "initial_stories" => "n_stories",
        "initial_developers" => "n_developers",
        other => other,
    };
    CONFIG_KEYS.iter().copied().find(|k| *k == aliased)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: format!("expected {}", std::any::type_name::<T>()),
    })
}

pub(crate) fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "t" | "1" | "yes" => Ok(true),
        "false" | "f" | "0" | "no" => Ok(false),
        _ => Err(Error::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: "expected a boolean".into(),
        }),
    }
}

impl WorldConfig {
    /// Sets one field from its textual value. `key` may use any accepted
    /// spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let canon = canonical_key(key).ok_or_else(|| Error::UnknownKey(key.to_string()))?;
        match canon {
            "steps" => self.steps = parse_num(canon, value)?,
            "n_stories" => self.n_stories = parse_num(canon, value)?,
            "n_developers" => self.n_developers = parse_num(canon, value)?,
            "pso" => self.pso = parse_num(canon, value)?,
            "mean_difficulty" => self.mean_difficulty = parse_num(canon, value)?,
            "stdev_difficulty" => self.stdev_difficulty = parse_num(canon, value)?,
            "mean_competence" => self.mean_competence = parse_num(canon, value)?,
            "stdev_competence" => self.stdev_competence = parse_num(canon, value)?,
            "mean_soc_or_sd" => self.mean_sosd = parse_num(canon, value)?,
            "stdev_soc_or_sd" => self.stdev_sosd = parse_num(canon, value)?,
            "mean_enquiry" => self.mean_enquiry = parse_num(canon, value)?,
            "stdev_enquiry" => self.stdev_enquiry = parse_num(canon, value)?,
            "increase_comp_rate" => self.increase_comp_rate = parse_num(canon, value)?,
            "decrease_comp_rate" => self.decrease_comp_rate = parse_num(canon, value)?,
            "attitude_increase_rate" => self.attitude_increase_rate = parse_num(canon, value)?,
            "attitude_decrease_rate" => self.attitude_decrease_rate = parse_num(canon, value)?,
            "tolerance" => self.tolerance = parse_num(canon, value)?,
            "proximity" => self.proximity = parse_num(canon, value)?,
            "sociable" => self.sociable = parse_bool(canon, value)?,
            "curious" => self.curious = parse_bool(canon, value)?,
            "avoid_edges" => self.avoid_edges = parse_bool(canon, value)?,
            "looking_for_stories" => self.looking_for_stories = parse_bool(canon, value)?,
            "world_half_extent" => self.world_half_extent = parse_num(canon, value)?,
            "band_k" => self.band_k = parse_num(canon, value)?,
            "retain_failed_teams" => self.retain_failed_teams = parse_bool(canon, value)?,
            "curious_reach_beyond_team" => {
                self.curious_reach_beyond_team = parse_bool(canon, value)?
            }
            "exponent_cap" => self.exponent_cap = parse_num(canon, value)?,
            "contribution_cap" => self.contribution_cap = parse_num(canon, value)?,
            "seed" => self.seed = parse_num(canon, value)?,
            _ => unreachable!("CONFIG_KEYS and set() out of sync: {canon}"),
        }
        Ok(())
    }

    /// `(canonical key, value)` pairs in [`CONFIG_KEYS`] order. Floats use the
    /// shortest representation that parses back to the same bits.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let f = |v: f64| v.to_string();
        vec![
            ("steps", self.steps.to_string()),
            ("n_stories", self.n_stories.to_string()),
            ("n_developers", self.n_developers.to_string()),
            ("pso", f(self.pso)),
            ("mean_difficulty", f(self.mean_difficulty)),
            ("stdev_difficulty", f(self.stdev_difficulty)),
            ("mean_competence", f(self.mean_competence)),
            ("stdev_competence", f(self.stdev_competence)),
            ("mean_soc_or_sd", f(self.mean_sosd)),
            ("stdev_soc_or_sd", f(self.stdev_sosd)),
            ("mean_enquiry", f(self.mean_enquiry)),
            ("stdev_enquiry", f(self.stdev_enquiry)),
            ("increase_comp_rate", f(self.increase_comp_rate)),
            ("decrease_comp_rate", f(self.decrease_comp_rate)),
            ("attitude_increase_rate", f(self.attitude_increase_rate)),
            ("attitude_decrease_rate", f(self.attitude_decrease_rate)),
            ("tolerance", f(self.tolerance)),
            ("proximity", f(self.proximity)),
            ("sociable", self.sociable.to_string()),
            ("curious", self.curious.to_string()),
            ("avoid_edges", self.avoid_edges.to_string()),
            ("looking_for_stories", self.looking_for_stories.to_string()),
            ("world_half_extent", f(self.world_half_extent)),
            ("band_k", f(self.band_k)),
            ("retain_failed_teams", self.retain_failed_teams.to_string()),
            (
                "curious_reach_beyond_team",
                self.curious_reach_beyond_team.to_string(),
            ),
            ("exponent_cap", f(self.exponent_cap)),
            ("contribution_cap", f(self.contribution_cap)),
            ("seed", self.seed.to_string()),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.steps < 1 {
            return fail("steps must be at least 1".into());
        }
        if self.n_developers < 1 {
            return fail("n_developers must be at least 1".into());
        }
        let finite = [
            ("pso", self.pso),
            ("mean_difficulty", self.mean_difficulty),
            ("stdev_difficulty", self.stdev_difficulty),
            ("mean_competence", self.mean_competence),
            ("stdev_competence", self.stdev_competence),
            ("mean_soc_or_sd", self.mean_sosd),
            ("stdev_soc_or_sd", self.stdev_sosd),
            ("mean_enquiry", self.mean_enquiry),
            ("stdev_enquiry", self.stdev_enquiry),
            ("increase_comp_rate", self.increase_comp_rate),
            ("decrease_comp_rate", self.decrease_comp_rate),
            ("attitude_increase_rate", self.attitude_increase_rate),
            ("attitude_decrease_rate", self.attitude_decrease_rate),
            ("tolerance", self.tolerance),
            ("proximity", self.proximity),
            ("world_half_extent", self.world_half_extent),
            ("band_k", self.band_k),
            ("exponent_cap", self.exponent_cap),
            ("contribution_cap", self.contribution_cap),
        ];
        if let Some((k, v)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return fail(format!("{k} must be finite, got {v}"));
        }
        for (k, v) in [
            ("stdev_difficulty", self.stdev_difficulty),
            ("stdev_competence", self.stdev_competence),
            ("stdev_soc_or_sd", self.stdev_sosd),
            ("stdev_enquiry", self.stdev_enquiry),
            ("proximity", self.proximity),
            ("pso", self.pso),
            ("band_k", self.band_k),
        ] {
            if v < 0.0 {
                return fail(format!("{k} must be >= 0, got {v}"));
            }
        }
        for (k, v) in [
            ("increase_comp_rate", self.increase_comp_rate),
            ("decrease_comp_rate", self.decrease_comp_rate),
            ("attitude_increase_rate", self.attitude_increase_rate),
            ("attitude_decrease_rate", self.attitude_decrease_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{k} must lie in [0, 1], got {v}"));
            }
        }
        for (k, v) in [
            ("world_half_extent", self.world_half_extent),
            ("exponent_cap", self.exponent_cap),
            ("contribution_cap", self.contribution_cap),
        ] {
            if v <= 0.0 {
                return fail(format!("{k} must be > 0, got {v}"));
            }
        }
        Ok(())
    }

    /// Parses a config file body. Keys not listed are left at their defaults.
    pub fn from_cfg_str(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg = WorldConfig::default();
        for entry in parse_kv(text, origin)? {
            cfg.set(&entry.key, &entry.value)
                .map_err(|e| Error::Parse {
                    path: origin.to_path_buf(),
                    line: entry.line,
                    msg: e.to_string(),
                })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_cfg_str(&text, path)
    }

    pub fn to_cfg_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for WorldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cfg_string())
    }
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct KvEntry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits a flat config body into entries. `#` and `;` start comments; blank
/// lines are skipped. A value may be a bracketed list, returned verbatim.
pub(crate) fn parse_kv(text: &str, origin: &Path) -> Result<Vec<KvEntry>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split(['#', ';']).next().unwrap_or_default().trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line,
                msg: format!("expected `key = value`, got `{body}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line,
                msg: "empty key or value".into(),
            });
        }
        out.push(KvEntry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(out)
}

/// Parses `[a, b, c]` into its trimmed items.
pub(crate) fn parse_list(value: &str) -> Option<Vec<String>> {
    let inner = value.trim().strip_prefix('[')?.strip_suffix(']')?;
    let items: Vec<String> = inner
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    Some(items)
}
