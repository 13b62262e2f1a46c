//! Factorial experiment designs and their replicated, parallel execution.
//!
//! A design is a base config, an ordered list of varied fields, a repetition
//! count and a master seed. Cells are the cartesian product of the varied
//! values with the first field varying slowest. Run ids number the cells in
//! that order, repetitions innermost, and each run's seed is derived from the
//! master seed and its run id alone.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::config::{canonical_key, parse_kv, parse_list, WorldConfig};
use crate::engine::run_with_id;
use crate::error::{Error, Result};
use crate::metrics::RunResult;

pub const DEFAULT_REPETITIONS: u32 = 30;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run_id`: output number `run_id + 1` of a SplitMix64 stream
/// seeded with `master_seed`.
pub fn mix_seed(master_seed: u64, run_id: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(run_id.wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepDesign {
    pub base: WorldConfig,
    /// Field name and the values it takes, in the order they are listed.
    pub variations: Vec<(String, Vec<String>)>,
    pub repetitions: u32,
    pub master_seed: u64,
}

/// One cell's assignments, e.g. `[("curious", "false"), ("sociable", "true")]`.
pub type Cell = Vec<(String, String)>;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub run_id: u64,
    pub seed: u64,
    /// Index into [`SweepDesign::cells`].
    pub cell: usize,
    pub config: WorldConfig,
}

impl SweepDesign {
    pub fn new(base: WorldConfig) -> Self {
        SweepDesign {
            master_seed: base.seed,
            base,
            variations: Vec::new(),
            repetitions: DEFAULT_REPETITIONS,
        }
    }

    pub fn vary<S: ToString>(mut self, field: &str, values: impl IntoIterator<Item = S>) -> Self {
        self.variations.push((
            field.to_string(),
            values.into_iter().map(|v| v.to_string()).collect(),
        ));
        self
    }

    /// The four-scenario experiment over `base`: curious outer, sociable
    /// inner, so cells come out as (F,F), (T,F), (F,T), (T,T) in
    /// (sociable, curious) order.
    pub fn scenarios(base: WorldConfig, repetitions: u32, master_seed: u64) -> Self {
        let mut design = SweepDesign::new(base)
            .vary("curious", [false, true])
            .vary("sociable", [false, true]);
        design.repetitions = repetitions;
        design.master_seed = master_seed;
        design
    }

    /// Parses a design file: config keys set the base, plus `repetitions`,
    /// `master_seed` and `vary.<field> = [v1, v2, ...]`.
    pub fn from_cfg_str(text: &str, origin: &Path) -> Result<Self> {
        let mut design = SweepDesign::new(WorldConfig::default());
        let mut master_seed = None;
        let at = |line: usize, e: Error| Error::Parse {
            path: origin.to_path_buf(),
            line,
            msg: e.to_string(),
        };
        for entry in parse_kv(text, origin)? {
            let key = entry.key.to_ascii_lowercase();
            if let Some(field) = key.strip_prefix("vary.") {
                let values = parse_list(&entry.value).ok_or_else(|| {
                    at(
                        entry.line,
                        Error::Design(format!("`{key}` needs a list like [a, b]")),
                    )
                })?;
                design.variations.push((field.to_string(), values));
            } else if key == "repetitions" {
                design.repetitions = entry.value.parse().map_err(|_| {
                    at(
                        entry.line,
                        Error::Design(format!("bad repetitions `{}`", entry.value)),
                    )
                })?;
            } else if key == "master_seed" {
                master_seed = Some(entry.value.parse().map_err(|_| {
                    at(
                        entry.line,
                        Error::Design(format!("bad master_seed `{}`", entry.value)),
                    )
                })?);
            } else {
                design
                    .base
                    .set(&entry.key, &entry.value)
                    .map_err(|e| at(entry.line, e))?;
            }
        }
        design.master_seed = master_seed.unwrap_or(design.base.seed);
        design.check()?;
        Ok(design)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_cfg_str(&text, path)
    }

    fn check(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Design("repetitions must be at least 1".into()));
        }
        let mut seen = Vec::new();
        for (field, values) in &self.variations {
            let canon = canonical_key(field)
                .ok_or_else(|| Error::Design(format!("unknown field `{field}`")))?;
            if canon == "seed" {
                return Err(Error::Design(
                    "`seed` cannot be varied; per-run seeds derive from master_seed".into(),
                ));
            }
            if seen.contains(&canon) {
                return Err(Error::Design(format!("field `{field}` is varied twice")));
            }
            seen.push(canon);
            if values.is_empty() {
                return Err(Error::Design(format!("field `{field}` has no values")));
            }
            let mut probe = self.base.clone();
            for v in values {
                probe
                    .set(canon, v)
                    .map_err(|e| Error::Design(format!("field `{field}`: {e}")))?;
            }
        }
        Ok(())
    }

    /// All cells in run order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells: Vec<Cell> = vec![Vec::new()];
        for (field, values) in &self.variations {
            cells = cells
                .into_iter()
                .flat_map(|cell| {
                    values.iter().map(move |v| {
                        let mut next = cell.clone();
                        next.push((field.clone(), v.clone()));
                        next
                    })
                })
                .collect();
        }
        cells
    }

    /// `Π |values| × repetitions`.
    pub fn total_runs(&self) -> u64 {
        self.variations
            .iter()
            .map(|(_, v)| v.len() as u64)
            .product::<u64>()
            * u64::from(self.repetitions)
    }
}

/// Expands `design` into one spec per run, ordered by run id.
pub fn expand_design(design: &SweepDesign) -> Result<Vec<RunSpec>> {
    design.check()?;
    let mut specs = Vec::with_capacity(design.total_runs() as usize);
    for (cell_idx, cell) in design.cells().into_iter().enumerate() {
        let mut config = design.base.clone();
        for (field, value) in &cell {
            config.set(field, value)?;
        }
        for _ in 0..design.repetitions {
            let run_id = specs.len() as u64;
            let seed = mix_seed(design.master_seed, run_id);
            let mut config = config.clone();
            config.seed = seed;
            specs.push(RunSpec {
                run_id,
                seed,
                cell: cell_idx,
                config,
            });
        }
    }
    Ok(specs)
}

/// Runs every spec of `design` on `workers` threads. Rows come back ordered
/// by run id whatever the worker count. The first failing run, in run order,
/// aborts the sweep.
pub fn execute_sweep(design: &SweepDesign, workers: usize) -> Result<Vec<RunResult>> {
    if workers == 0 {
        return Err(Error::Design("worker count must be at least 1".into()));
    }
    let specs = expand_design(design)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?;
    let outcomes: Vec<Result<RunResult>> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| run_with_id(&spec.config, spec.run_id))
            .collect()
    });
    outcomes
        .into_iter()
        .zip(&specs)
        .map(|(out, spec)| {
            out.map_err(|e| Error::Run {
                run_id: spec.run_id,
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> WorldConfig {
        WorldConfig {
            n_stories: 10,
            n_developers: 8,
            steps: 3,
            ..WorldConfig::default()
        }
    }

    #[test]
    fn seed_mixer_golden_values() {
        // independent SplitMix64 in Python
        assert_eq!(mix_seed(0, 0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(mix_seed(0, 0), 16294208416658607535);
        assert_eq!(mix_seed(0, 1), 7960286522194355700);
        assert_eq!(mix_seed(0, 119), 9204616229329205535);
        assert_eq!(mix_seed(42, 0), 13679457532755275413);
        assert_eq!(mix_seed(42, 7), 14769051326987775908);
        assert_eq!(mix_seed(u64::MAX, 3), 7862637804313477842);
    }

    #[test]
    fn factorial_count() {
        let d = SweepDesign::new(small())
            .vary("pso", [1, 2])
            .vary("tolerance", ["1", "2", "3"]);
        let specs = expand_design(&d).unwrap();
        assert_eq!(specs.len(), 180);
        assert_eq!(d.total_runs(), 180);
        assert!(specs.iter().enumerate().all(|(i, s)| s.run_id == i as u64));
    }

    #[test]
    fn no_variations() {
        let mut d = SweepDesign::new(small());
        d.repetitions = 5;
        let specs = expand_design(&d).unwrap();
        assert_eq!(specs.len(), 5);
        for s in &specs {
            assert_eq!(
                WorldConfig {
                    seed: 0,
                    ..s.config.clone()
                },
                small()
            );
        }
    }

    #[test]
    fn scenario_cells_in_order() {
        let d = SweepDesign::scenarios(small(), 30, 9);
        let specs = expand_design(&d).unwrap();
        assert_eq!(specs.len(), 120);
        let flags: Vec<(bool, bool)> = specs
            .chunks(30)
            .map(|c| (c[0].config.sociable, c[0].config.curious))
            .collect();
        assert_eq!(
            flags,
            [(false, false), (true, false), (false, true), (true, true)]
        );
        assert_eq!(specs[31].seed, mix_seed(9, 31));
        assert_eq!(specs[31].config.seed, specs[31].seed);
    }

    #[test]
    fn lexicographic_order() {
        let d = SweepDesign::new(small())
            .vary("steps", [1, 2])
            .vary("pso", ["0", "1"]);
        let cells = d.cells();
        let cells: Vec<Vec<&str>> = cells
            .iter()
            .map(|c| c.iter().map(|(_, v)| v.as_str()).collect())
            .collect();
        assert_eq!(cells, [["1", "0"], ["1", "1"], ["2", "0"], ["2", "1"]]);
    }

    #[test]
    fn design_errors_name_the_field() {
        let d = SweepDesign::new(small()).vary("speed", [1]);
        let msg = expand_design(&d).unwrap_err().to_string();
        assert!(msg.contains("speed"), "{msg}");
        let d = SweepDesign::new(small()).vary("seed", [1, 2]);
        assert!(matches!(expand_design(&d), Err(Error::Design(_))));
        let d = SweepDesign::new(small()).vary("steps", ["x"]);
        assert!(expand_design(&d).unwrap_err().to_string().contains("steps"));
        let d = SweepDesign::new(small()).vary::<u32>("steps", []);
        assert!(expand_design(&d).is_err());
    }

    #[test]
    fn parses_design_file() {
        let text = "\
n_developers = 8
n_stories = 10
repetitions = 2
master_seed = 77
vary.sociable = [false, true]
vary.mean-competence = [4, 6]
";
        let d = SweepDesign::from_cfg_str(text, Path::new("d.cfg")).unwrap();
        assert_eq!(d.repetitions, 2);
        assert_eq!(d.master_seed, 77);
        assert_eq!(d.base.n_developers, 8);
        assert_eq!(d.variations.len(), 2);
        let specs = expand_design(&d).unwrap();
        assert_eq!(specs.len(), 8);
        assert_eq!(specs[2].config.mean_competence, 6.0);
        assert!(!specs[2].config.sociable);
        assert!(specs[4].config.sociable);
    }

    #[test]
    fn design_file_errors() {
        let bad = "vary.bogus = [1, 2]\n";
        let e = SweepDesign::from_cfg_str(bad, Path::new("d.cfg")).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let bad = "vary.steps = 3\n";
        assert!(SweepDesign::from_cfg_str(bad, Path::new("d.cfg")).is_err());
        let bad = "repetitions = many\n";
        assert!(SweepDesign::from_cfg_str(bad, Path::new("d.cfg")).is_err());
    }

    #[test]
    fn workers_do_not_change_results() {
        let d = SweepDesign::scenarios(small(), 3, 5);
        let one = execute_sweep(&d, 1).unwrap();
        let four = execute_sweep(&d, 4).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.len(), 12);
        assert!(one.iter().all(|r| r.ticks <= 3));
    }

    #[test]
    fn zero_workers_rejected() {
        let d = SweepDesign::new(small());
        assert!(execute_sweep(&d, 0).is_err());
    }

    #[test]
    fn failing_run_reports_its_id() {
        let mut d = SweepDesign::new(small())
            .vary("tolerance", ["1", "2"])
            .vary("n_developers", ["4", "0"]);
        d.repetitions = 2;
        match execute_sweep(&d, 3) {
            Err(Error::Run { run_id, .. }) => assert_eq!(run_id, 2),
            other => panic!("expected a run error, got {other:?}"),
        }
    }
}
