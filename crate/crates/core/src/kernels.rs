//! Competence sharing, combination and adaptation rules.
//!
//! Every function here is pure. Members are passed as `(sosd, c)` pairs.

use crate::model::SosdBand;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombinationMode {
    Solo,
    Linear,
    NonLinear,
}

/// Global scenario switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Flags {
    pub sociable: bool,
    pub curious: bool,
}

/// Competence a developer is willing to share. Negative when `sosd < 0`.
pub fn shared_competence(sosd: f64, c: f64) -> f64 {
    sosd * c
}

/// `c_lead + sum(sosd_j * c_j)`.
pub fn combine_linear(c_lead: f64, members: &[(f64, f64)]) -> f64 {
    c_lead
        + members
            .iter()
            .map(|&(sosd, c)| shared_competence(sosd, c))
            .sum::<f64>()
}

/// One member's contribution under non-linear combination: `base^exponent`
/// for a positive base, 0 otherwise, capped at `contribution_cap`.
fn nonlinear_term(base: f64, exponent: f64, contribution_cap: f64) -> f64 {
    if base > 0.0 {
        base.powf(exponent).min(contribution_cap)
    } else {
        0.0
    }
}

/// `c_lead + sum((sosd_j * c_j) ^ p)` with `p = clamp(sosd_lead * c_lead, 0, exponent_cap)`.
pub fn combine_nonlinear(
    c_lead: f64,
    sosd_lead: f64,
    members: &[(f64, f64)],
    exponent_cap: f64,
    contribution_cap: f64,
) -> f64 {
    let exponent = shared_competence(sosd_lead, c_lead).clamp(0.0, exponent_cap);
    c_lead
        + members
            .iter()
            .map(|&(sosd, c)| {
                nonlinear_term(shared_competence(sosd, c), exponent, contribution_cap)
            })
            .sum::<f64>()
}

/// Non-linear needs the curious switch plus a high-sociability, high-enquiry
/// lead. Linear needs the sociable switch and a lead outside the low band.
pub fn select_mode(flags: Flags, lead_band: SosdBand, lead_high_e: bool) -> CombinationMode {
    if flags.curious && lead_high_e && lead_band == SosdBand::HighBand {
        CombinationMode::NonLinear
    } else if flags.sociable && lead_band != SosdBand::LowBand {
        CombinationMode::Linear
    } else {
        CombinationMode::Solo
    }
}

/// A story is solved only when effective competence strictly exceeds its
/// difficulty.
pub fn attempt(effective: f64, d: f64) -> bool {
    effective > d
}

pub fn update_on_success(c: f64, increase_rate: f64) -> f64 {
    c * (1.0 + increase_rate)
}

pub fn update_on_failure(c: f64, decrease_rate: f64) -> f64 {
    (c * (1.0 - decrease_rate)).max(0.0)
}

/// Proportional drift away from zero on success and toward zero on failure.
/// The sign of `sosd` never changes; 0 is a fixed point.
pub fn update_attitude(sosd: f64, solved: bool, increase_rate: f64, decrease_rate: f64) -> f64 {
    if solved {
        sosd * (1.0 + increase_rate)
    } else {
        sosd * (1.0 - decrease_rate)
    }
}
