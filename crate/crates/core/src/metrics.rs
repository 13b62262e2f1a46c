//! Per-run metrics rows, the results CSV schema and median aggregation.

use std::io;

use crate::config::{WorldConfig, CONFIG_KEYS};
use crate::engine::{AttachmentMatrix, World};
use crate::error::{Error, Result};
use crate::model::{DeveloperState, Seniority};

/// Written for a class with no members (gain columns only).
pub const NA: &str = "NA";

/// One simulation run, one CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run_id: u64,
    pub seed: u64,
    pub sociable: bool,
    pub curious: bool,
    pub config: WorldConfig,
    pub solved: u32,
    pub ticks: u32,
    pub velocity: f64,
    /// Credited to the lead's class; indexed by [`Seniority::index`].
    pub solved_by_class: [u32; 3],
    /// Median of `c_final - c_initial` per class.
    pub gain_abs: [Option<f64>; 3],
    /// Median of `(c_final - c_initial) / c_initial` per class, over
    /// developers with `c_initial > 0`.
    pub gain_rel: [Option<f64>; 3],
    /// `[lead class][member class]`.
    pub attachments: AttachmentMatrix,
}

/// Stories per tick. `ticks_elapsed` must be at least 1.
pub fn velocity(solved: u32, ticks_elapsed: u32) -> f64 {
    assert!(ticks_elapsed >= 1, "velocity needs ticks_elapsed >= 1");
    f64::from(solved) / f64::from(ticks_elapsed)
}

/// Winning class of a per-class comparison. `class` is `None` only when
/// every class was unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Leader {
    pub class: Option<Seniority>,
    pub tied: bool,
}

impl Leader {
    /// Ties resolve Senior > Mid > Junior and set `tied`.
    pub fn of(values: &[Option<f64>; 3]) -> Self {
        let best = values
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<Seniority> = Seniority::ALL
            .into_iter()
            .filter(|c| values[c.index()] == Some(best))
            .collect();
        Leader {
            class: winners.first().copied(),
            tied: winners.len() > 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub solved_by_class: [u32; 3],
    pub gain_abs: [Option<f64>; 3],
    pub gain_rel: [Option<f64>; 3],
    pub most_solved: Leader,
    pub most_gain: Leader,
}

/// Per-class completions and competence gains from the developers' final
/// state. Initial competence comes from `c_initial`.
pub fn per_class_stats(developers: &[DeveloperState]) -> ClassStats {
    let mut solved_by_class = [0u32; 3];
    let mut abs: [Vec<f64>; 3] = Default::default();
    let mut rel: [Vec<f64>; 3] = Default::default();
    for dev in developers {
        let i = dev.seniority.index();
        solved_by_class[i] += dev.stories_completed;
        let gain = dev.c - dev.c_initial;
        abs[i].push(gain);
        if dev.c_initial > 0.0 {
            rel[i].push(gain / dev.c_initial);
        }
    }
    let gain_abs = abs.map(|v| median(&v).ok());
    let gain_rel = rel.map(|v| median(&v).ok());
    ClassStats {
        most_solved: Leader::of(&solved_by_class.map(|n| Some(f64::from(n)))),
        most_gain: Leader::of(&gain_abs),
        solved_by_class,
        gain_abs,
        gain_rel,
    }
}

/// Builds the metrics row for a finished world.
pub fn collect(world: &World, run_id: u64) -> RunResult {
    let stats = per_class_stats(&world.developers);
    let solved = world.done_count() as u32;
    let ticks = world.ticks_elapsed();
    RunResult {
        run_id,
        seed: world.config.seed,
        sociable: world.config.sociable,
        curious: world.config.curious,
        config: world.config.clone(),
        solved,
        ticks,
        velocity: velocity(solved, ticks),
        solved_by_class: stats.solved_by_class,
        gain_abs: stats.gain_abs,
        gain_rel: stats.gain_rel,
        attachments: world.attachments,
    }
}

/// Median; an even count averages the two central values.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyAggregation);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Ok(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    })
}

/// Median of `field` over `rows`, skipping rows where the field is
/// unavailable.
pub fn aggregate_median<F>(rows: &[RunResult], field: F) -> Result<f64>
where
    F: Fn(&RunResult) -> Option<f64>,
{
    let values: Vec<f64> = rows.iter().filter_map(field).collect();
    median(&values)
}

/// Every numeric column of a [`RunResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Solved,
    Ticks,
    Velocity,
    SolvedBy(Seniority),
    GainAbs(Seniority),
    GainRel(Seniority),
    Attach(Seniority, Seniority),
}

impl Metric {
    pub fn all() -> Vec<Metric> {
        let mut out = vec![Metric::Solved, Metric::Ticks, Metric::Velocity];
        out.extend(Seniority::ALL.map(Metric::SolvedBy));
        out.extend(Seniority::ALL.map(Metric::GainAbs));
        out.extend(Seniority::ALL.map(Metric::GainRel));
        for lead in Seniority::ALL {
            out.extend(Seniority::ALL.map(|m| Metric::Attach(lead, m)));
        }
        out
    }

    pub fn column(self) -> String {
        match self {
            Metric::Solved => "solved".into(),
            Metric::Ticks => "ticks".into(),
            Metric::Velocity => "velocity".into(),
            Metric::SolvedBy(c) => format!("solved_{c}"),
            Metric::GainAbs(c) => format!("gain_abs_{c}"),
            Metric::GainRel(c) => format!("gain_rel_{c}"),
            Metric::Attach(l, m) => format!("attach_{l}_{m}"),
        }
    }

    pub fn value(self, row: &RunResult) -> Option<f64> {
        match self {
            Metric::Solved => Some(f64::from(row.solved)),
            Metric::Ticks => Some(f64::from(row.ticks)),
            Metric::Velocity => Some(row.velocity),
            Metric::SolvedBy(c) => Some(f64::from(row.solved_by_class[c.index()])),
            Metric::GainAbs(c) => row.gain_abs[c.index()],
            Metric::GainRel(c) => row.gain_rel[c.index()],
            Metric::Attach(l, m) => Some(row.attachments[l.index()][m.index()] as f64),
        }
    }

    pub fn median(self, rows: &[RunResult]) -> Result<f64> {
        aggregate_median(rows, |r| self.value(r))
    }
}

const ID_COLUMNS: [&str; 4] = ["run_id", "seed", "sociable", "curious"];

/// Config keys echoed after the metric columns. Seed and the scenario flags
/// already have their own columns.
fn echo_keys() -> impl Iterator<Item = &'static str> {
    CONFIG_KEYS
        .iter()
        .copied()
        .filter(|k| !matches!(*k, "seed" | "sociable" | "curious"))
}

/// The fixed results header.
pub fn csv_header() -> Vec<String> {
    ID_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain(Metric::all().into_iter().map(Metric::column))
        .chain(echo_keys().map(String::from))
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), |x| x.to_string())
}

impl RunResult {
    pub fn to_record(&self) -> Vec<String> {
        let mut rec = vec![
            self.run_id.to_string(),
            self.seed.to_string(),
            self.sociable.to_string(),
            self.curious.to_string(),
            self.solved.to_string(),
            self.ticks.to_string(),
            self.velocity.to_string(),
        ];
        rec.extend(self.solved_by_class.iter().map(u32::to_string));
        rec.extend(self.gain_abs.iter().map(|v| fmt_opt(*v)));
        rec.extend(self.gain_rel.iter().map(|v| fmt_opt(*v)));
        rec.extend(self.attachments.iter().flatten().map(u64::to_string));
        let entries = self.config.entries();
        for key in echo_keys() {
            let (_, v) = entries.iter().find(|(k, _)| *k == key).expect("echo key");
            rec.push(v.clone());
        }
        rec
    }

    /// Parses one record laid out by [`csv_header`].
    pub fn from_record(record: &csv::StringRecord) -> Result<Self> {
        let header = csv_header();
        if record.len() != header.len() {
            return Err(Error::MalformedCsv(format!(
                "expected {} fields, found {}",
                header.len(),
                record.len()
            )));
        }
        let get = |col: &str| -> &str {
            let idx = header.iter().position(|h| h == col).expect("known column");
            &record[idx]
        };
        fn num<T: std::str::FromStr>(col: &str, v: &str) -> Result<T> {
            v.trim()
                .parse()
                .map_err(|_| Error::MalformedCsv(format!("column {col}: cannot parse `{v}`")))
        }
        let opt = |col: String| -> Result<Option<f64>> {
            let v = get(&col);
            if v == NA {
                Ok(None)
            } else {
                num(&col, v).map(Some)
            }
        };
        let flag = |col: &str| -> Result<bool> {
            crate::config::parse_bool(col, get(col)).map_err(|e| Error::MalformedCsv(e.to_string()))
        };

        let mut config = WorldConfig::default();
        for key in echo_keys() {
            config
                .set(key, get(key))
                .map_err(|e| Error::MalformedCsv(e.to_string()))?;
        }
        let seed: u64 = num("seed", get("seed"))?;
        let sociable = flag("sociable")?;
        let curious = flag("curious")?;
        config.seed = seed;
        config.sociable = sociable;
        config.curious = curious;

        let mut solved_by_class = [0u32; 3];
        let mut gain_abs = [None; 3];
        let mut gain_rel = [None; 3];
        let mut attachments = [[0u64; 3]; 3];
        for c in Seniority::ALL {
            let i = c.index();
            let col = Metric::SolvedBy(c).column();
            solved_by_class[i] = num(&col, get(&col))?;
            gain_abs[i] = opt(Metric::GainAbs(c).column())?;
            gain_rel[i] = opt(Metric::GainRel(c).column())?;
            for m in Seniority::ALL {
                let col = Metric::Attach(c, m).column();
                attachments[i][m.index()] = num(&col, get(&col))?;
            }
        }
        Ok(RunResult {
            run_id: num("run_id", get("run_id"))?,
            seed,
            sociable,
            curious,
            config,
            solved: num("solved", get("solved"))?,
            ticks: num("ticks", get("ticks"))?,
            velocity: num("velocity", get("velocity"))?,
            solved_by_class,
            gain_abs,
            gain_rel,
            attachments,
        })
    }
}

pub fn write_csv<W: io::Write>(rows: &[RunResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header())?;
    for row in rows {
        w.write_record(row.to_record())?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<RunResult>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = r.headers()?.clone();
    let expected = csv_header();
    if header.is_empty() {
        return Err(Error::NoRows);
    }
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::MalformedCsv(
            "header does not match the results schema".into(),
        ));
    }
    let rows = r
        .records()
        .map(|rec| RunResult::from_record(&rec?))
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::NoRows);
    }
    Ok(rows)
}
