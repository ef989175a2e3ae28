//! Scheduler runs against a synthetic validity oracle instead of real attempts.

use super::scheduler::{Outcome, SchedulerState, TaskStatus};

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    pub rounds: usize,
    pub psi: usize,
    pub attempts: usize,
    pub speculative: usize,
    /// Slot-rounds with no assignment.
    pub idle_slots: usize,
    /// Executed attempts beyond their task's accepted one.
    pub wasted: usize,
    /// Accepted attempt index per task.
    pub accepted: Vec<u32>,
}

impl SimulationReport {
    pub fn slot_rounds(&self) -> usize {
        self.psi * self.rounds
    }

    /// Fraction of slot-rounds left empty.
    pub fn idle_fraction(&self) -> f64 {
        self.idle_slots as f64 / self.slot_rounds().max(1) as f64
    }

    /// Fraction of slot-rounds that were empty or spent on discarded attempts.
    pub fn unproductive_fraction(&self) -> f64 {
        (self.idle_slots + self.wasted) as f64 / self.slot_rounds().max(1) as f64
    }
}

/// Runs the scheduler to completion; `valid(task, attempt)` must be deterministic.
pub fn simulate<F>(tasks: usize, psi: usize, speculate: bool, mut valid: F) -> SimulationReport
where
    F: FnMut(usize, u32) -> bool,
{
    let mut state = SchedulerState::new(tasks, psi, speculate);
    let mut report = SimulationReport {
        rounds: 0,
        psi,
        attempts: 0,
        speculative: 0,
        idle_slots: 0,
        wasted: 0,
        accepted: Vec::new(),
    };
    let mut executed = Vec::new();
    while !state.is_complete() {
        let assignments = state.schedule_round();
        let outcomes: Vec<Option<Outcome>> = assignments
            .iter()
            .map(|a| {
                Some(if valid(a.task, a.attempt) {
                    Outcome::Valid
                } else {
                    Outcome::Invalid
                })
            })
            .collect();
        state.commit_round(&assignments, &outcomes);
        report.rounds += 1;
        report.attempts += assignments.len();
        report.speculative += assignments.iter().filter(|a| a.speculative).count();
        report.idle_slots += psi - assignments.len();
        executed.extend(assignments.iter().map(|a| (a.task, a.attempt)));
    }
    report.accepted = (0..tasks)
        .map(|t| match state.status(t) {
            TaskStatus::Done { attempt } => attempt,
            s => unreachable!("task {t} ended as {s:?}"),
        })
        .collect();
    report.wasted = executed
        .iter()
        .filter(|&&(t, a)| a > report.accepted[t])
        .count();
    report
}
