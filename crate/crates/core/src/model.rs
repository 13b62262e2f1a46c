//! Agents, population statistics and the seeded initial world.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

use crate::config::WorldConfig;
use crate::error::{Error, Result};

/// The simulator's only random source. ChaCha8 gives a stream that is stable
/// across platforms and crate releases.
pub type SimRng = rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Attempts before a truncated draw gives up and clamps to zero.
const MAX_RESAMPLE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Initial competence class of a developer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Seniority {
    Senior,
    Mid,
    Junior,
}

impl Seniority {
    /// Tie-break order: Senior first.
    pub const ALL: [Seniority; 3] = [Seniority::Senior, Seniority::Mid, Seniority::Junior];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn label(self) -> &'static str {
        match self {
            Seniority::Senior => "senior",
            Seniority::Mid => "mid",
            Seniority::Junior => "junior",
        }
    }
}

impl fmt::Display for Seniority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SosdBand {
    LowBand,
    MidBand,
    HighBand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeveloperState {
    pub id: usize,
    pub pos: Vec2,
    /// Degrees in `[0, 360)`.
    pub heading: f64,
    pub c: f64,
    pub c_initial: f64,
    pub sosd: f64,
    pub e: f64,
    /// Story this developer is attached to.
    pub team: Option<usize>,
    pub seniority: Seniority,
    pub stories_completed: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoryStatus {
    Open,
    Done,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoryState {
    pub id: usize,
    pub pos: Vec2,
    pub d: f64,
    pub status: StoryStatus,
    /// Developer ids, lead first.
    pub team: Vec<usize>,
    pub solved_at_tick: Option<u32>,
}

impl StoryState {
    pub fn is_open(&self) -> bool {
        self.status == StoryStatus::Open
    }

    pub fn lead(&self) -> Option<usize> {
        self.team.first().copied()
    }
}

/// Sample statistics of the developer population, taken once at setup.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PopulationStats {
    pub mean_c: f64,
    pub stdev_c: f64,
    pub mean_sosd: f64,
    pub stdev_sosd: f64,
    pub mean_e: f64,
    pub stdev_e: f64,
}

/// Mean and sample standard deviation (n - 1). A single value has stdev 0.
pub(crate) fn mean_stdev(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

impl PopulationStats {
    pub fn from_developers(devs: &[DeveloperState]) -> Self {
        let (mean_c, stdev_c) = mean_stdev(devs.iter().map(|d| d.c));
        let (mean_sosd, stdev_sosd) = mean_stdev(devs.iter().map(|d| d.sosd));
        let (mean_e, stdev_e) = mean_stdev(devs.iter().map(|d| d.e));
        Self {
            mean_c,
            stdev_c,
            mean_sosd,
            stdev_sosd,
            mean_e,
            stdev_e,
        }
    }
}

fn band(value: f64, mean: f64, stdev: f64, k: f64) -> SosdBand {
    if value > mean + k * stdev {
        SosdBand::HighBand
    } else if value < mean - k * stdev {
        SosdBand::LowBand
    } else {
        SosdBand::MidBand
    }
}

/// Strict inequalities on both tails; a value on a threshold is `MidBand`.
pub fn classify_sociability(sosd: f64, stats: &PopulationStats, band_k: f64) -> SosdBand {
    band(sosd, stats.mean_sosd, stats.stdev_sosd, band_k)
}

pub fn is_high_enquiry(e: f64, stats: &PopulationStats) -> bool {
    e > stats.mean_e
}

/// Seniority from competence, using the same banding rule as sociability.
pub fn classify_seniority(c: f64, stats: &PopulationStats, band_k: f64) -> Seniority {
    match band(c, stats.mean_c, stats.stdev_c, band_k) {
        SosdBand::HighBand => Seniority::Senior,
        SosdBand::MidBand => Seniority::Mid,
        SosdBand::LowBand => Seniority::Junior,
    }
}

fn normal(name: &str, mean: f64, stdev: f64) -> Result<Normal<f64>> {
    Normal::new(mean, stdev)
        .map_err(|e| Error::Config(format!("bad {name} distribution N({mean}, {stdev}): {e}")))
}

/// Draws from `dist` until the value is nonnegative, clamping to 0 after
/// [`MAX_RESAMPLE`] attempts.
pub(crate) fn draw_nonnegative(dist: &Normal<f64>, rng: &mut SimRng) -> f64 {
    for _ in 0..MAX_RESAMPLE {
        let v = dist.sample(rng);
        if v >= 0.0 {
            return v;
        }
    }
    0.0
}

pub(crate) fn draw_position(half_extent: f64, rng: &mut SimRng) -> Vec2 {
    let x = rng.random_range(-half_extent..=half_extent);
    let y = rng.random_range(-half_extent..=half_extent);
    Vec2::new(x, y)
}

pub(crate) fn difficulty_distribution(config: &WorldConfig) -> Result<Normal<f64>> {
    normal(
        "difficulty",
        config.mean_difficulty,
        config.stdev_difficulty,
    )
}

/// The sampled initial population.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub developers: Vec<DeveloperState>,
    pub stories: Vec<StoryState>,
    pub stats: PopulationStats,
}

/// Samples the initial world. Draw order is fixed: every developer
/// (position, heading, c, sosd, e), then every story (position, d).
pub fn sample_population(config: &WorldConfig, rng: &mut SimRng) -> Result<Population> {
    config.validate()?;
    let competence = normal(
        "competence",
        config.mean_competence,
        config.stdev_competence,
    )?;
    let sociability = normal("soc-or-sd", config.mean_sosd, config.stdev_sosd)?;
    let enquiry = normal("enquiry", config.mean_enquiry, config.stdev_enquiry)?;
    let difficulty = difficulty_distribution(config)?;
    let h = config.world_half_extent;

    let mut developers: Vec<DeveloperState> = (0..config.n_developers as usize)
        .map(|id| {
            let pos = draw_position(h, rng);
            let heading = rng.random_range(0.0..360.0);
            let c = draw_nonnegative(&competence, rng);
            let sosd = sociability.sample(rng);
            let e = enquiry.sample(rng);
            DeveloperState {
                id,
                pos,
                heading,
                c,
                c_initial: c,
                sosd,
                e,
                team: None,
                seniority: Seniority::Mid,
                stories_completed: 0,
            }
        })
        .collect();

    let stories = (0..config.n_stories as usize)
        .map(|id| StoryState {
            id,
            pos: draw_position(h, rng),
            d: draw_nonnegative(&difficulty, rng),
            status: StoryStatus::Open,
            team: Vec::new(),
            solved_at_tick: None,
        })
        .collect();

    let stats = PopulationStats::from_developers(&developers);
    for dev in &mut developers {
        dev.seniority = classify_seniority(dev.c, &stats, config.band_k);
    }
    Ok(Population {
        developers,
        stories,
        stats,
    })
}
