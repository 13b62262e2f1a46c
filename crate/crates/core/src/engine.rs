//! Discrete-time scheduler.
//!
//! A tick runs four phases in a fixed order: free developers move, free
//! developers claim and join stories, every claimed story is attempted, then
//! spin-off stories are appended. A run ends when no story is open or the
//! tick budget is spent.
//!
//! Teams hold still for the whole tick. A solved story releases its team; a
//! failed one does too unless `retain_failed_teams` is set, in which case the
//! team stays attached and retries next tick.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::WorldConfig;
use crate::error::{Error, Result};
use crate::kernels::{self, CombinationMode, Flags};
use crate::metrics::{self, RunResult};
use crate::model::{
    self, classify_sociability, is_high_enquiry, DeveloperState, PopulationStats, SimRng,
    StoryState, StoryStatus, Vec2,
};

/// Maximum heading change per tick, degrees.
const MAX_TURN: f64 = 45.0;
/// Distance a free developer covers per tick.
const STEP_LENGTH: f64 = 1.0;

/// Per-tick counters appended after every step.
#[derive(Debug, Clone, PartialEq)]
pub struct TickSnapshot {
    /// Tick that produced this snapshot (0-based).
    pub tick: u32,
    pub stories_open: usize,
    pub stories_done: usize,
    pub solved_this_tick: u32,
    pub attempts_this_tick: u32,
    /// Indexed by [`Seniority::index`](crate::model::Seniority::index) of the lead.
    pub solved_by_class: [u32; 3],
    /// `None` for an empty class.
    pub mean_c_by_class: [Option<f64>; 3],
}

/// Counts for `(lead class, member class)` pairs, one per recruited member.
pub type AttachmentMatrix = [[u64; 3]; 3];

#[derive(Debug, Clone)]
pub struct World {
    pub config: WorldConfig,
    pub tick: u32,
    pub developers: Vec<DeveloperState>,
    pub stories: Vec<StoryState>,
    pub stats: PopulationStats,
    pub event_log: Vec<TickSnapshot>,
    pub attachments: AttachmentMatrix,
    rng: SimRng,
    member_reads: u64,
    tally: Tally,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    attempts: u32,
    solved: u32,
    solved_by_class: [u32; 3],
}

impl World {
    /// Samples a fresh world at tick 0 from `config.seed`.
    pub fn setup(config: &WorldConfig) -> Result<Self> {
        let mut rng = model::rng_from_seed(config.seed);
        let pop = model::sample_population(config, &mut rng)?;
        Ok(Self {
            config: config.clone(),
            tick: 0,
            developers: pop.developers,
            stories: pop.stories,
            stats: pop.stats,
            event_log: Vec::new(),
            attachments: [[0; 3]; 3],
            rng,
            member_reads: 0,
            tally: Tally::default(),
        })
    }

    /// Builds a world from hand-placed agents. Seniority labels are kept as
    /// given; population statistics are recomputed from the developers.
    pub fn from_agents(
        config: &WorldConfig,
        developers: Vec<DeveloperState>,
        stories: Vec<StoryState>,
    ) -> Result<Self> {
        config.validate()?;
        let stats = PopulationStats::from_developers(&developers);
        Ok(Self {
            config: config.clone(),
            tick: 0,
            developers,
            stories,
            stats,
            event_log: Vec::new(),
            attachments: [[0; 3]; 3],
            rng: model::rng_from_seed(config.seed),
            member_reads: 0,
            tally: Tally::default(),
        })
    }

    pub fn flags(&self) -> Flags {
        Flags {
            sociable: self.config.sociable,
            curious: self.config.curious,
        }
    }

    pub fn open_count(&self) -> usize {
        self.stories.iter().filter(|s| s.is_open()).count()
    }

    pub fn done_count(&self) -> usize {
        self.stories.len() - self.open_count()
    }

    pub fn is_terminated(&self) -> bool {
        self.tick >= self.config.steps || self.open_count() == 0
    }

    /// Number of member `(sosd, c)` pairs read while combining competence.
    pub fn member_competence_reads(&self) -> u64 {
        self.member_reads
    }

    /// Turns every unattached developer by up to ±45° and advances it one
    /// unit. Edges reflect when `avoid_edges` is set and wrap otherwise.
    pub fn move_unattached(&mut self) {
        let h = self.config.world_half_extent;
        let avoid = self.config.avoid_edges;
        for dev in self.developers.iter_mut().filter(|d| d.team.is_none()) {
            let turn = self.rng.random_range(-MAX_TURN..=MAX_TURN);
            let heading = (dev.heading + turn).rem_euclid(360.0);
            let (pos, heading) = advance(dev.pos, heading, h, avoid);
            dev.pos = pos;
            dev.heading = heading;
        }
    }

    /// Free developers, in shuffled order, each claim the nearest open
    /// unclaimed story within `proximity`. Developers still free afterwards
    /// join the nearest claimed story within `proximity`.
    pub fn claim_and_recruit(&mut self) {
        if !self.config.looking_for_stories {
            return;
        }
        let mut free: Vec<usize> = self
            .developers
            .iter()
            .filter(|d| d.team.is_none())
            .map(|d| d.id)
            .collect();
        free.shuffle(&mut self.rng);

        let radius = self.config.proximity;
        let mut still_free = Vec::with_capacity(free.len());
        for &dev_id in &free {
            let pos = self.developers[dev_id].pos;
            match nearest_story(&self.stories, pos, radius, |s| s.team.is_empty()) {
                Some(story_id) => {
                    self.stories[story_id].team.push(dev_id);
                    self.developers[dev_id].team = Some(story_id);
                }
                None => still_free.push(dev_id),
            }
        }

        for dev_id in still_free {
            let pos = self.developers[dev_id].pos;
            if let Some(story_id) =
                nearest_story(&self.stories, pos, radius, |s| !s.team.is_empty())
            {
                let lead = self.stories[story_id].team[0];
                let lead_class = self.developers[lead].seniority;
                let member_class = self.developers[dev_id].seniority;
                self.attachments[lead_class.index()][member_class.index()] += 1;
                self.stories[story_id].team.push(dev_id);
                self.developers[dev_id].team = Some(story_id);
            }
        }
    }

    /// Attempts every claimed open story once, in shuffled order.
    pub fn attempt_all(&mut self) {
        let mut claimed: Vec<usize> = self
            .stories
            .iter()
            .filter(|s| s.is_open() && !s.team.is_empty())
            .map(|s| s.id)
            .collect();
        claimed.shuffle(&mut self.rng);
        for story_id in claimed {
            self.attempt_story(story_id);
        }
    }

    fn attempt_story(&mut self, story_id: usize) {
        let d = self.stories[story_id].d;
        let lead_id = self.stories[story_id].team[0];
        let DeveloperState {
            c: lead_c,
            sosd: lead_sosd,
            e: lead_e,
            seniority: lead_class,
            ..
        } = self.developers[lead_id];
        let (ri, rd) = (
            self.config.increase_comp_rate,
            self.config.decrease_comp_rate,
        );
        let (ai, ad) = (
            self.config.attitude_increase_rate,
            self.config.attitude_decrease_rate,
        );

        let mode = if kernels::attempt(lead_c, d) {
            CombinationMode::Solo
        } else {
            let band = classify_sociability(lead_sosd, &self.stats, self.config.band_k);
            kernels::select_mode(self.flags(), band, is_high_enquiry(lead_e, &self.stats))
        };
        let effective = match mode {
            CombinationMode::Solo => lead_c,
            CombinationMode::Linear | CombinationMode::NonLinear => {
                let beyond_team =
                    mode == CombinationMode::NonLinear && self.config.curious_reach_beyond_team;
                let members = self.member_traits(story_id, beyond_team);
                if mode == CombinationMode::Linear {
                    kernels::combine_linear(lead_c, &members)
                } else {
                    kernels::combine_nonlinear(
                        lead_c,
                        lead_sosd,
                        &members,
                        self.config.exponent_cap,
                        self.config.contribution_cap,
                    )
                }
            }
        };
        let solved = kernels::attempt(effective, d);
        self.tally.attempts += 1;

        let disband = solved || !self.config.retain_failed_teams;
        let team = if disband {
            std::mem::take(&mut self.stories[story_id].team)
        } else {
            self.stories[story_id].team.clone()
        };
        for &m in &team {
            let dev = &mut self.developers[m];
            dev.c = if solved {
                kernels::update_on_success(dev.c, ri)
            } else {
                kernels::update_on_failure(dev.c, rd)
            };
            dev.sosd = kernels::update_attitude(dev.sosd, solved, ai, ad);
            if disband {
                dev.team = None;
            }
        }
        if solved {
            self.developers[lead_id].stories_completed += 1;
            let story = &mut self.stories[story_id];
            story.status = StoryStatus::Done;
            story.solved_at_tick = Some(self.tick);
            self.tally.solved += 1;
            self.tally.solved_by_class[lead_class.index()] += 1;
        }
    }

    /// `(sosd, c)` of the developers a lead combines with: the non-lead team
    /// members, or with `beyond_team` every other developer within
    /// `proximity` of the story. The only place member competence is read.
    fn member_traits(&mut self, story_id: usize, beyond_team: bool) -> Vec<(f64, f64)> {
        let story = &self.stories[story_id];
        let members: Vec<(f64, f64)> = if beyond_team {
            let lead = story.team[0];
            self.developers
                .iter()
                .filter(|d| d.id != lead && d.pos.distance(story.pos) <= self.config.proximity)
                .map(|d| (d.sosd, d.c))
                .collect()
        } else {
            story.team[1..]
                .iter()
                .map(|&m| (self.developers[m].sosd, self.developers[m].c))
                .collect()
        };
        self.member_reads += members.len() as u64;
        members
    }

    /// Appends `floor(pso)` stories with fresh positions and difficulties.
    pub fn spawn_stories(&mut self) -> Result<()> {
        let count = self.config.pso.floor();
        if count < 1.0 {
            return Ok(());
        }
        let difficulty = model::difficulty_distribution(&self.config)?;
        let h = self.config.world_half_extent;
        for _ in 0..count as usize {
            let id = self.stories.len();
            let pos = model::draw_position(h, &mut self.rng);
            let d = model::draw_nonnegative(&difficulty, &mut self.rng);
            self.stories.push(StoryState {
                id,
                pos,
                d,
                status: StoryStatus::Open,
                team: Vec::new(),
                solved_at_tick: None,
            });
        }
        Ok(())
    }

    /// Runs one full tick. Fails if the world has already terminated.
    pub fn step(&mut self) -> Result<()> {
        if self.is_terminated() {
            return Err(Error::Terminated { tick: self.tick });
        }
        self.tally = Tally::default();
        self.move_unattached();
        self.claim_and_recruit();
        self.attempt_all();
        self.spawn_stories()?;
        let snapshot = self.snapshot();
        self.event_log.push(snapshot);
        self.tick += 1;
        Ok(())
    }

    fn snapshot(&self) -> TickSnapshot {
        let mut sums = [0.0; 3];
        let mut counts = [0usize; 3];
        for dev in &self.developers {
            sums[dev.seniority.index()] += dev.c;
            counts[dev.seniority.index()] += 1;
        }
        let mean_c_by_class =
            std::array::from_fn(|i| (counts[i] > 0).then(|| sums[i] / counts[i] as f64));
        let open = self.open_count();
        TickSnapshot {
            tick: self.tick,
            stories_open: open,
            stories_done: self.stories.len() - open,
            solved_this_tick: self.tally.solved,
            attempts_this_tick: self.tally.attempts,
            solved_by_class: self.tally.solved_by_class,
            mean_c_by_class,
        }
    }

    /// Steps until termination.
    pub fn run_to_end(&mut self) -> Result<()> {
        while !self.is_terminated() {
            self.step()?;
        }
        Ok(())
    }

    /// Ticks elapsed, floored at 1 so velocity is always defined.
    pub fn ticks_elapsed(&self) -> u32 {
        self.tick.max(1)
    }
}

/// Advances one unit along `heading` (0° = +y, clockwise).
fn advance(pos: Vec2, heading: f64, h: f64, avoid_edges: bool) -> (Vec2, f64) {
    let rad = heading.to_radians();
    let mut x = pos.x + STEP_LENGTH * rad.sin();
    let mut y = pos.y + STEP_LENGTH * rad.cos();
    let mut heading = heading;
    if avoid_edges {
        if x > h || x < -h {
            x = if x > h { 2.0 * h - x } else { -2.0 * h - x };
            heading = 360.0 - heading;
        }
        if y > h || y < -h {
            y = if y > h { 2.0 * h - y } else { -2.0 * h - y };
            heading = 180.0 - heading;
        }
        // a world narrower than one step can still overshoot after reflecting
        x = x.clamp(-h, h);
        y = y.clamp(-h, h);
    } else {
        x = (x + h).rem_euclid(2.0 * h) - h;
        y = (y + h).rem_euclid(2.0 * h) - h;
    }
    (Vec2::new(x, y), heading.rem_euclid(360.0))
}

/// Nearest open story within `radius` passing `pred`; lower id wins ties.
fn nearest_story(
    stories: &[StoryState],
    pos: Vec2,
    radius: f64,
    pred: impl Fn(&StoryState) -> bool,
) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for s in stories.iter().filter(|s| s.is_open() && pred(s)) {
        let dist = pos.distance(s.pos);
        if dist <= radius && best.is_none_or(|(bd, _)| dist < bd) {
            best = Some((dist, s.id));
        }
    }
    best.map(|(_, id)| id)
}

/// Sets up a world from `config`, runs it to the end and returns the metrics
/// row with `run_id` 0.
pub fn run(config: &WorldConfig) -> Result<RunResult> {
    run_with_id(config, 0)
}

pub fn run_with_id(config: &WorldConfig, run_id: u64) -> Result<RunResult> {
    let mut world = World::setup(config)?;
    world.run_to_end()?;
    Ok(metrics::collect(&world, run_id))
}
