//! Four-scenario summaries and plain-text rendering of sweep results.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::metrics::{Leader, Metric, RunResult, NA};
use crate::model::Seniority;
use crate::stats::mann_whitney;
use crate::sweep::SweepDesign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scenario {
    S1,
    S2,
    S3,
    S4,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4];

    /// `(sociable, curious)`.
    pub const fn flags(self) -> (bool, bool) {
        match self {
            Scenario::S1 => (false, false),
            Scenario::S2 => (true, false),
            Scenario::S3 => (false, true),
            Scenario::S4 => (true, true),
        }
    }

    pub fn of(sociable: bool, curious: bool) -> Self {
        match (sociable, curious) {
            (false, false) => Scenario::S1,
            (true, false) => Scenario::S2,
            (false, true) => Scenario::S3,
            (true, true) => Scenario::S4,
        }
    }

    const fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.index() + 1)
    }
}

/// Velocity pairs compared with a rank-sum test.
pub const COMPARISONS: [(Scenario, Scenario); 4] = [
    (Scenario::S4, Scenario::S2),
    (Scenario::S4, Scenario::S1),
    (Scenario::S3, Scenario::S1),
    (Scenario::S2, Scenario::S1),
];

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub label: String,
    pub runs: usize,
    /// One entry per [`Metric::all`]; `None` when no row had a value.
    pub medians: Vec<(Metric, Option<f64>)>,
    pub most_solved: Leader,
    pub most_gain: Leader,
}

impl CellSummary {
    pub fn from_rows(label: impl Into<String>, rows: &[RunResult]) -> Self {
        let medians: Vec<(Metric, Option<f64>)> = Metric::all()
            .into_iter()
            .map(|m| (m, m.median(rows).ok()))
            .collect();
        let per_class = |f: fn(Seniority) -> Metric| Seniority::ALL.map(|c| f(c).median(rows).ok());
        CellSummary {
            label: label.into(),
            runs: rows.len(),
            most_solved: Leader::of(&per_class(Metric::SolvedBy)),
            most_gain: Leader::of(&per_class(Metric::GainAbs)),
            medians,
        }
    }

    pub fn median(&self, metric: Metric) -> Option<f64> {
        self.medians
            .iter()
            .find(|(m, _)| *m == metric)
            .and_then(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub a: Scenario,
    pub b: Scenario,
    /// U statistic of `a`'s velocities.
    pub u: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    /// Indexed S1..S4.
    pub cells: Vec<CellSummary>,
    pub comparisons: Vec<Comparison>,
    /// Velocity medians from highest to lowest, e.g. `S4 > S3 > S1 = S2`.
    pub ordering: String,
}

impl ScenarioReport {
    pub fn cell(&self, s: Scenario) -> &CellSummary {
        &self.cells[s.index()]
    }

    pub fn velocity(&self, s: Scenario) -> f64 {
        // every cell has at least two rows, so velocity is always present
        self.cell(s).median(Metric::Velocity).unwrap_or(f64::NAN)
    }

    pub fn p_value(&self, a: Scenario, b: Scenario) -> Option<f64> {
        self.comparisons
            .iter()
            .find(|c| c.a == a && c.b == b)
            .map(|c| c.p_value)
    }
}

/// Orders labelled values from highest to lowest. Equal values are joined by
/// `=` and keep their input order.
pub fn ordering_line<L: fmt::Display>(values: &[(L, f64)]) -> String {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].1.total_cmp(&values[a].1));
    let mut out = String::new();
    for (pos, &i) in idx.iter().enumerate() {
        if pos > 0 {
            let prev = values[idx[pos - 1]].1;
            out.push_str(if prev == values[i].1 { " = " } else { " > " });
        }
        let _ = write!(out, "{}", values[i].0);
    }
    out
}

/// Splits rows into the four (sociable, curious) cells and summarizes them.
/// Each cell needs at least two rows.
pub fn scenario_report(rows: &[RunResult]) -> Result<ScenarioReport> {
    if rows.is_empty() {
        return Err(Error::NoRows);
    }
    let mut groups: [Vec<RunResult>; 4] = Default::default();
    for row in rows {
        groups[Scenario::of(row.sociable, row.curious).index()].push(row.clone());
    }
    for s in Scenario::ALL {
        let n = groups[s.index()].len();
        if n < 2 {
            let (soc, cur) = s.flags();
            return Err(Error::Report(format!(
                "scenario {s} (sociable={soc}, curious={cur}) has {n} run(s); need at least 2"
            )));
        }
    }
    let velocities: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| g.iter().map(|r| r.velocity).collect())
        .collect();
    let comparisons = COMPARISONS
        .iter()
        .map(|&(a, b)| {
            let r = mann_whitney(&velocities[a.index()], &velocities[b.index()])
                .expect("cells are nonempty");
            Comparison {
                a,
                b,
                u: r.u,
                p_value: r.p_value,
            }
        })
        .collect();
    let cells: Vec<CellSummary> = Scenario::ALL
        .iter()
        .map(|&s| CellSummary::from_rows(s.to_string(), &groups[s.index()]))
        .collect();
    let ordering = ordering_line(&Scenario::ALL.map(|s| {
        (
            s,
            cells[s.index()]
                .median(Metric::Velocity)
                .unwrap_or(f64::NAN),
        )
    }));
    Ok(ScenarioReport {
        cells,
        comparisons,
        ordering,
    })
}

/// Per-cell summaries of a sweep, in cell order. `rows` must be the output of
/// executing `design`.
pub fn sweep_summary(design: &SweepDesign, rows: &[RunResult]) -> Vec<CellSummary> {
    let reps = design.repetitions.max(1) as usize;
    design
        .cells()
        .iter()
        .zip(rows.chunks(reps))
        .map(|(cell, chunk)| {
            let label = if cell.is_empty() {
                "base".to_string()
            } else {
                cell.iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            CellSummary::from_rows(label, chunk)
        })
        .collect()
}

fn fmt_value(v: Option<f64>) -> String {
    match v {
        Some(x) => {
            let s = format!("{x:.4}");
            let s = s.trim_end_matches('0').trim_end_matches('.');
            if s == "-0" {
                "0".into()
            } else {
                s.to_string()
            }
        }
        None => NA.to_string(),
    }
}

fn fmt_leader(l: Leader) -> String {
    match (l.class, l.tied) {
        (None, _) => NA.to_string(),
        (Some(c), false) => c.label().to_string(),
        (Some(c), true) => format!("{}(tie)", c.label()),
    }
}

const NAME_W: usize = 22;
const COL_W: usize = 14;

/// Fixed-width table: one column per cell, one line per metric.
pub fn render_cells(cells: &[CellSummary]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<NAME_W$}", "metric (median)");
    for c in cells {
        let _ = write!(out, "{:>COL_W$}", c.label);
    }
    out.push('\n');
    let mut line = |name: &str, values: Vec<String>| {
        let _ = write!(out, "{name:<NAME_W$}");
        for v in values {
            let _ = write!(out, "{v:>COL_W$}");
        }
        out.push('\n');
    };
    line("runs", cells.iter().map(|c| c.runs.to_string()).collect());
    for metric in Metric::all() {
        line(
            &metric.column(),
            cells.iter().map(|c| fmt_value(c.median(metric))).collect(),
        );
    }
    line(
        "most_solved_by",
        cells.iter().map(|c| fmt_leader(c.most_solved)).collect(),
    );
    line(
        "most_gain_by",
        cells.iter().map(|c| fmt_leader(c.most_gain)).collect(),
    );
    out
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "scenarios: S1 (F,F)  S2 sociable (T,F)  S3 curious (F,T)  S4 (T,T)"
        )?;
        f.write_str(&render_cells(&self.cells))?;
        writeln!(f)?;
        writeln!(f, "velocity rank-sum tests (two-sided Mann-Whitney)")?;
        for c in &self.comparisons {
            writeln!(
                f,
                "  {} vs {}   U = {:>7.1}   p = {:.3e}",
                c.a, c.b, c.u, c.p_value
            )?;
        }
        writeln!(f)?;
        writeln!(f, "velocity ordering: {}", self.ordering)
    }
}
