//! Checks shared by the integration tests and the acceptance target. Each
//! returns `Err` with a description of the first violation.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scrumsim::kernels::{combine_linear, combine_nonlinear};
use scrumsim::metrics::collect;
use scrumsim::model::{DeveloperState, StoryStatus};
use scrumsim::{World, WorldConfig};

pub type Check = Result<(), String>;

/// Relative error with an absolute floor of 1 so results near zero are not
/// judged on cancellation noise.
pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

/// Direct evaluation of the linear rule, summing members back to front.
pub fn oracle_linear(c_lead: f64, members: &[(f64, f64)]) -> f64 {
    let mut acc = 0.0;
    for &(s, c) in members.iter().rev() {
        acc += s * c;
    }
    c_lead + acc
}

/// Direct evaluation of the non-linear rule, with powers taken as
/// `exp(p * ln b)`.
pub fn oracle_nonlinear(
    c_lead: f64,
    s_lead: f64,
    members: &[(f64, f64)],
    cap_p: f64,
    cap_t: f64,
) -> f64 {
    let raw = s_lead * c_lead;
    let p = if raw < 0.0 {
        0.0
    } else if raw > cap_p {
        cap_p
    } else {
        raw
    };
    let mut acc = 0.0;
    for &(s, c) in members.iter().rev() {
        let b = s * c;
        if b <= 0.0 {
            continue;
        }
        let t = if p == 0.0 { 1.0 } else { (p * b.ln()).exp() };
        acc += if t > cap_t { cap_t } else { t };
    }
    c_lead + acc
}

/// `cases` random kernel inputs against the oracles, then the guard cases.
pub fn kernel_oracle_check(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..cases {
        let c_lead = rng.random_range(0.0..30.0);
        let s_lead = rng.random_range(-3.0..3.0);
        let n = rng.random_range(0..8);
        let members: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(-3.0..3.0), rng.random_range(0.0..30.0)))
            .collect();
        let lin = combine_linear(c_lead, &members);
        let lin_o = oracle_linear(c_lead, &members);
        let non = combine_nonlinear(c_lead, s_lead, &members, 8.0, 1e9);
        let non_o = oracle_nonlinear(c_lead, s_lead, &members, 8.0, 1e9);
        for (got, want, what) in [(lin, lin_o, "linear"), (non, non_o, "nonlinear")] {
            let e = rel_err(got, want);
            if e > 1e-12 {
                return Err(format!(
                    "case {i} {what}: {got} vs oracle {want} (c={c_lead}, s={s_lead}, members={members:?})"
                ));
            }
        }
    }
    let guards: [(&str, f64, f64); 6] = [
        ("empty team, linear", combine_linear(3.5, &[]), 3.5),
        (
            "empty team, nonlinear",
            combine_nonlinear(3.5, 2.0, &[], 8.0, 1e9),
            3.5,
        ),
        (
            "negative base",
            combine_nonlinear(2.0, 1.0, &[(-0.5, 2.0)], 8.0, 1e9),
            2.0,
        ),
        (
            "zero base",
            combine_nonlinear(2.0, 1.0, &[(0.0, 9.0), (3.0, 0.0)], 8.0, 1e9),
            2.0,
        ),
        (
            "exponent clamped high",
            combine_nonlinear(10.0, 10.0, &[(1.0, 3.0)], 8.0, 1e9),
            10.0 + 6561.0,
        ),
        (
            "exponent clamped at zero",
            combine_nonlinear(2.0, -1.0, &[(1.0, 3.0), (2.0, 5.0)], 8.0, 1e9),
            4.0,
        ),
    ];
    for (what, got, want) in guards {
        if got != want {
            return Err(format!("guard `{what}`: {got} != {want}"));
        }
    }
    Ok(())
}

/// Random but valid configs, small enough to run quickly.
pub fn random_config(rng: &mut impl Rng) -> WorldConfig {
    WorldConfig {
        steps: rng.random_range(1..=12),
        n_stories: rng.random_range(0..=80),
        n_developers: rng.random_range(1..=40),
        pso: [0.0, 0.0, 1.0, 2.5][rng.random_range(0..4)],
        mean_difficulty: rng.random_range(0.0..8.0),
        stdev_difficulty: rng.random_range(0.0..6.0),
        mean_competence: rng.random_range(0.0..8.0),
        stdev_competence: rng.random_range(0.0..10.0),
        mean_sosd: rng.random_range(-1.0..1.0),
        stdev_sosd: rng.random_range(0.0..5.0),
        mean_enquiry: rng.random_range(-1.0..1.0),
        stdev_enquiry: rng.random_range(0.0..5.0),
        increase_comp_rate: rng.random_range(0.0..=1.0),
        decrease_comp_rate: rng.random_range(0.0..=1.0),
        attitude_increase_rate: rng.random_range(0.0..=1.0),
        attitude_decrease_rate: rng.random_range(0.0..=1.0),
        proximity: rng.random_range(0.0..25.0),
        sociable: rng.random(),
        curious: rng.random(),
        avoid_edges: rng.random(),
        looking_for_stories: rng.random_bool(0.85),
        world_half_extent: rng.random_range(3.0..20.0),
        retain_failed_teams: rng.random(),
        curious_reach_beyond_team: rng.random(),
        seed: 0,
        ..WorldConfig::default()
    }
}

fn membership(world: &World) -> Check {
    let mut seen = vec![None; world.developers.len()];
    for story in &world.stories {
        if story.status == StoryStatus::Done && !story.team.is_empty() {
            return Err(format!("done story {} still has a team", story.id));
        }
        for &d in &story.team {
            if let Some(other) = seen[d] {
                return Err(format!(
                    "developer {d} is on stories {other} and {}",
                    story.id
                ));
            }
            seen[d] = Some(story.id);
        }
    }
    for dev in &world.developers {
        if dev.team != seen[dev.id] {
            return Err(format!(
                "developer {} links to {:?} but rosters say {:?}",
                dev.id, dev.team, seen[dev.id]
            ));
        }
    }
    Ok(())
}

/// Steps a world from `config` to the end, checking every invariant after
/// each tick and on the final metrics row.
pub fn invariant_check(config: &WorldConfig) -> Check {
    let ctx = |msg: String| format!("seed {}: {msg}", config.seed);
    let mut world = World::setup(config).map_err(|e| ctx(e.to_string()))?;
    let spawn = config.pso.floor() as usize;
    membership(&world).map_err(ctx)?;
    while !world.is_terminated() {
        let before_devs: Vec<DeveloperState> = world.developers.clone();
        let before_status: Vec<(StoryStatus, Option<u32>)> = world
            .stories
            .iter()
            .map(|s| (s.status, s.solved_at_tick))
            .collect();
        let before_done = world.done_count();
        let tick = world.tick;
        world.step().map_err(|e| ctx(e.to_string()))?;

        let expected = config.n_stories as usize + (tick as usize + 1) * spawn;
        if world.stories.len() != expected || world.open_count() + world.done_count() != expected {
            return Err(ctx(format!(
                "tick {tick}: {} stories ({} open, {} done), expected {expected}",
                world.stories.len(),
                world.open_count(),
                world.done_count()
            )));
        }
        for (s, &(status, at)) in world.stories.iter().zip(&before_status) {
            if status == StoryStatus::Done
                && (s.status != StoryStatus::Done || s.solved_at_tick != at)
            {
                return Err(ctx(format!("tick {tick}: story {} left Done", s.id)));
            }
        }
        for (now, was) in world.developers.iter().zip(&before_devs) {
            if was.team.is_some() && now.pos != was.pos {
                return Err(ctx(format!(
                    "tick {tick}: attached developer {} moved from {:?} to {:?}",
                    was.id, was.pos, now.pos
                )));
            }
            if now.c < 0.0 || !now.c.is_finite() {
                return Err(ctx(format!(
                    "tick {tick}: developer {} has c = {}",
                    now.id, now.c
                )));
            }
        }
        membership(&world).map_err(|m| ctx(format!("tick {tick}: {m}")))?;
        if world.done_count() < before_done {
            return Err(ctx(format!("tick {tick}: solved count went down")));
        }
        let credited: u32 = world.developers.iter().map(|d| d.stories_completed).sum();
        if credited as usize != world.done_count() {
            return Err(ctx(format!(
                "tick {tick}: {credited} credited completions for {} done stories",
                world.done_count()
            )));
        }
    }
    let row = collect(&world, 0);
    let by_class: u32 = row.solved_by_class.iter().sum();
    if by_class != row.solved {
        return Err(ctx(format!(
            "per-class solved {by_class} != solved {}",
            row.solved
        )));
    }
    if row.velocity != f64::from(row.solved) / f64::from(row.ticks) {
        return Err(ctx(format!(
            "velocity {} != {}/{}",
            row.velocity, row.solved, row.ticks
        )));
    }
    if row.ticks < 1 || row.ticks > config.steps {
        return Err(ctx(format!(
            "ticks {} outside 1..={}",
            row.ticks, config.steps
        )));
    }
    Ok(())
}

/// Solo scenario run to the end must never read a member's competence.
pub fn solo_isolation_check(seed: u64) -> Check {
    let config = WorldConfig {
        sociable: false,
        curious: false,
        seed,
        ..WorldConfig::default()
    };
    let mut world = World::setup(&config).map_err(|e| e.to_string())?;
    world.run_to_end().map_err(|e| e.to_string())?;
    let attempts: u32 = world.event_log.iter().map(|s| s.attempts_this_tick).sum();
    if attempts == 0 {
        return Err(format!(
            "seed {seed}: no attempts were made, nothing was checked"
        ));
    }
    match world.member_competence_reads() {
        0 => Ok(()),
        n => Err(format!("seed {seed}: {n} member competence reads")),
    }
}
