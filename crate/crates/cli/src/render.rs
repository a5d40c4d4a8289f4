//! Plain-text tables for standard output.

use std::collections::BTreeMap;
use std::fmt::Write;

use certlab::bench::{median, BlowupRow, BoundReport, DoublingReport, EntropyReport, ExperimentRecord, Role};
use certlab::machine::{Configuration, MachineSpec, RunStatus, Symbol, Tape};
use certlab::problems::Problem;

fn tape_line(spec: &MachineSpec, tape: &Tape) -> String {
    let (first, cells) = tape.contents();
    let head = tape.head();
    let (lo, hi) = if cells.is_empty() {
        (head, head)
    } else {
        (first.min(head), (first + cells.len() as i64 - 1).max(head))
    };
    let mut out = String::new();
    for pos in lo..=hi {
        let sym = tape.get(pos);
        let name = if sym == Symbol::BLANK {
            "_"
        } else {
            spec.alphabet.name(sym)
        };
        if pos == head {
            let _ = write!(out, "[{name}]");
        } else {
            let sep = if spec.alphabet.is_single_char() { "" } else { " " };
            let _ = write!(out, "{sep}{name}{sep}");
        }
    }
    out
}

pub fn configuration(spec: &MachineSpec, c: &Configuration) -> String {
    let mut out = format!("{:>6} {:<16}", c.steps, spec.state_name(c.state));
    for (i, t) in c.tapes.iter().enumerate() {
        let _ = write!(out, "  {}: {}", spec.tapes[i].token(), tape_line(spec, t));
    }
    out
}

pub fn medians(records: &[ExperimentRecord]) -> String {
    let mut groups: BTreeMap<(Problem, Role, usize), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.problem, r.role, r.n)).or_default().push(r);
    }
    let mut out = format!(
        "{:<22} {:>7} {:>5} {:>14} {:>10} {:>10}\n",
        "role", "n", "bits", "median_steps", "accepted", "exhausted"
    );
    for ((_, role, n), rs) in groups {
        let steps: Vec<u64> = rs.iter().map(|r| r.steps).collect();
        let count = |s: RunStatus| rs.iter().filter(|r| r.verdict == s).count();
        let _ = writeln!(
            out,
            "{:<22} {:>7} {:>5} {:>14} {:>10} {:>10}",
            role.name(),
            n,
            rs[0].cert_bits,
            median(&steps),
            format!("{}/{}", count(RunStatus::Accepted), rs.len()),
            count(RunStatus::FuelExhausted)
        );
    }
    out
}

pub fn ratios(report: &DoublingReport) -> String {
    let mut out = format!(
        "{:<22} {:>7} {:>14} {:>14} {:>8}\n",
        "role", "n", "median(n)", "median(2n)", "ratio"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<22} {:>7} {:>14} {:>14} {:>8.3}",
            r.role.name(),
            r.n,
            r.median_steps,
            r.next_median_steps,
            r.ratio
        );
    }
    for (_, role, n) in &report.skipped {
        let _ = writeln!(out, "{:<22} {:>7} (no run at {})", role.name(), n, 2 * n);
    }
    out
}

pub fn bound(report: &BoundReport) -> String {
    let mut out = format!(
        "{:>7} {:>14} {:>14} {:>10} {:>6} {:>9} {:>6}\n",
        "n", "f_steps", "g_steps", "speedup", "delta", "required", "slack"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:>7} {:>14} {:>14} {:>10.2} {:>6} {:>9} {:>6}",
            r.n, r.f_steps, r.g_steps, r.speedup, r.delta_bits, r.required_bits, r.slack
        );
    }
    if !report.unmatched.is_empty() {
        let _ = writeln!(out, "unmatched n: {:?}", report.unmatched);
    }
    out
}

pub fn blowup(rows: &[BlowupRow]) -> String {
    let mut out = format!(
        "{:>7} {:>10} {:>14} {:>14} {:>8} {:>8}\n",
        "missing", "candidates", "machine_steps", "total_steps", "x_cand", "x_steps"
    );
    let ratio = |r: Option<f64>| r.map_or("-".to_string(), |v| format!("{v:.3}"));
    for r in rows {
        let _ = writeln!(
            out,
            "{:>7} {:>10} {:>14} {:>14} {:>8} {:>8}",
            r.missing,
            r.outcome.candidates,
            r.outcome.machine_steps,
            r.outcome.total_steps,
            ratio(r.candidate_ratio),
            ratio(r.step_ratio)
        );
    }
    out
}

pub fn entropy(report: &EntropyReport) -> String {
    let mut out = format!(
        "{:>4} {:>5} {:>8} {:>6} {:>12} {:>12} {:>9}\n",
        "n", "m", "samples", "sat", "mean_count", "analytic", "log2_mean"
    );
    for r in &report.records {
        let _ = writeln!(
            out,
            "{:>4} {:>5} {:>8} {:>6} {:>12.3} {:>12.3} {:>9}",
            r.n,
            r.m,
            r.samples,
            r.satisfiable,
            r.mean_count,
            r.analytic_mean,
            r.log2_mean().map_or("-".to_string(), |l| format!("{l:.3}"))
        );
    }
    match report.slope {
        Some(s) => {
            let _ = writeln!(out, "slope: {s:.4} (analytic {:.4})", report.analytic_slope);
        }
        None => {
            let _ = writeln!(out, "slope: undefined (fewer than two usable sizes)");
        }
    }
    out
}
