//! Round-based scheduling of signing attempts with nonce speculation.
//!
//! Attempts are identified by their index a within a task; the masking nonce
//! is κ = a·ℓ. Each round, [`SchedulerState::schedule_round`] fills up to Ψ
//! execution slots and [`SchedulerState::commit_round`] folds the outcomes
//! back in. A task is done at its smallest valid attempt once every smaller
//! attempt is known to be invalid, which makes the result independent of
//! how attempts were spread over rounds.

use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Valid,
    Invalid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskStatus {
    Pending,
    Running,
    Done { attempt: u32 },
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AttemptState {
    InFlight,
    Resolved(Outcome),
}

#[derive(Clone, Debug)]
struct TaskEntry {
    status: TaskStatus,
    /// One entry per assigned attempt; the next unassigned index is `len()`.
    attempts: Vec<AttemptState>,
    /// Smallest attempt seen valid so far.
    best_valid: Option<u32>,
}

impl TaskEntry {
    fn next_attempt(&self) -> u32 {
        self.attempts.len() as u32
    }

    fn is_finished(&self) -> bool {
        matches!(self.status, TaskStatus::Done { .. } | TaskStatus::Failed)
    }

    /// Needs more attempts: not finished and no valid candidate in hand.
    fn wants_attempts(&self) -> bool {
        !self.is_finished() && self.best_valid.is_none()
    }
}

/// One execution slot's work for a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub slot: usize,
    pub task: usize,
    pub attempt: u32,
    pub speculative: bool,
}

/// What a commit changed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommitSummary {
    /// (slot, task): valid results that became their task's best candidate.
    /// The caller copies these from staging into the task's output slot.
    pub improved: Vec<(usize, usize)>,
    /// (task, attempt) pairs that reached Done.
    pub finished: Vec<(usize, u32)>,
}

/// Scheduler bookkeeping: task table, execution table and outcome table.
#[derive(Clone, Debug)]
pub struct SchedulerState {
    psi: usize,
    speculate: bool,
    task_lut: Vec<TaskEntry>,
    exec_lut: Vec<Option<(usize, u32)>>,
    state_lut: Vec<Option<(Outcome, u32)>>,
    order_map: Vec<Option<usize>>,
    remaining: usize,
}

impl SchedulerState {
    /// `tasks` ≥ 0 tasks, `psi` ≥ 1 slots. With `speculate` off, surplus slots stay idle.
    pub fn new(tasks: usize, psi: usize, speculate: bool) -> Self {
        assert!(psi >= 1, "psi must be positive");
        Self {
            psi,
            speculate,
            task_lut: vec![
                TaskEntry {
                    status: TaskStatus::Pending,
                    attempts: Vec::new(),
                    best_valid: None
                };
                tasks
            ],
            exec_lut: vec![None; psi],
            state_lut: vec![None; psi],
            order_map: vec![None; psi],
            remaining: tasks,
        }
    }

    pub fn psi(&self) -> usize {
        self.psi
    }

    pub fn task_count(&self) -> usize {
        self.task_lut.len()
    }

    pub fn status(&self, task: usize) -> TaskStatus {
        self.task_lut[task].status
    }

    pub fn is_complete(&self) -> bool {
        self.remaining == 0
    }

    /// Unfinished tasks.
    pub fn remaining(&self) -> usize {
        self.remaining
    }

    /// Slot → (task, attempt) of the last committed round.
    pub fn exec_lut(&self) -> &[Option<(usize, u32)>] {
        &self.exec_lut
    }

    /// Slot → (outcome, attempt) of the last committed round.
    pub fn state_lut(&self) -> &[Option<(Outcome, u32)>] {
        &self.state_lut
    }

    /// Slot → task for results that became a task's best candidate last round.
    pub fn order_map(&self) -> &[Option<usize>] {
        &self.order_map
    }

    /// Removes a task from scheduling, e.g. when its inputs are unusable.
    pub fn mark_failed(&mut self, task: usize) {
        let entry = &mut self.task_lut[task];
        if !entry.is_finished() {
            entry.status = TaskStatus::Failed;
            self.remaining -= 1;
        }
    }

    /// Assignments for the next round. Does not modify the state.
    ///
    /// The first Ψ tasks (in task order) that still need attempts get their
    /// next attempt. Leftover slots, if speculation is on, get later attempts
    /// breadth-first: depth 1 for every such task in order, then depth 2, ...
    pub fn schedule_round(&self) -> Vec<Assignment> {
        let wanting: Vec<usize> = (0..self.task_lut.len())
            .filter(|&t| self.task_lut[t].wants_attempts())
            .collect();
        let mut out: Vec<Assignment> = wanting
            .iter()
            .take(self.psi)
            .enumerate()
            .map(|(slot, &task)| Assignment {
                slot,
                task,
                attempt: self.task_lut[task].next_attempt(),
                speculative: false,
            })
            .collect();
        if self.speculate && !wanting.is_empty() {
            let mut depth = 1;
            while out.len() < self.psi {
                for &task in &wanting {
                    if out.len() == self.psi {
                        break;
                    }
                    let attempt = self.task_lut[task].next_attempt() + depth;
                    out.push(Assignment {
                        slot: out.len(),
                        task,
                        attempt,
                        speculative: true,
                    });
                }
                depth += 1;
            }
        }
        out
    }

    /// Records the assignments of a round and their outcomes. An outcome of
    /// `None` leaves that attempt in flight; it can be resolved by a later
    /// commit carrying the same (task, attempt) with a result.
    pub fn commit_round(
        &mut self,
        assignments: &[Assignment],
        outcomes: &[Option<Outcome>],
    ) -> CommitSummary {
        assert_eq!(
            assignments.len(),
            outcomes.len(),
            "one outcome per assignment"
        );
        self.exec_lut.fill(None);
        self.state_lut.fill(None);
        self.order_map.fill(None);

        // Register new attempts in ascending order per task so indices stay dense.
        let mut order: Vec<usize> = (0..assignments.len()).collect();
        order.sort_by_key(|&i| (assignments[i].task, assignments[i].attempt));
        for &i in &order {
            let a = assignments[i];
            let entry = &mut self.task_lut[a.task];
            if a.attempt as usize == entry.attempts.len() {
                entry.attempts.push(AttemptState::InFlight);
                if entry.status == TaskStatus::Pending {
                    entry.status = TaskStatus::Running;
                }
            } else {
                assert!(
                    (a.attempt as usize) < entry.attempts.len(),
                    "attempt {} of task {} skips ahead",
                    a.attempt,
                    a.task
                );
                assert_eq!(
                    entry.attempts[a.attempt as usize],
                    AttemptState::InFlight,
                    "attempt resolved twice"
                );
            }
            if a.slot < self.psi {
                self.exec_lut[a.slot] = Some((a.task, a.attempt));
            }
        }

        let mut summary = CommitSummary::default();
        let mut touched = BTreeSet::new();
        for (a, outcome) in assignments.iter().zip(outcomes) {
            let Some(outcome) = *outcome else { continue };
            if a.slot < self.psi {
                self.state_lut[a.slot] = Some((outcome, a.attempt));
            }
            let entry = &mut self.task_lut[a.task];
            entry.attempts[a.attempt as usize] = AttemptState::Resolved(outcome);
            if entry.is_finished() {
                continue;
            }
            if outcome == Outcome::Valid && entry.best_valid.is_none_or(|b| a.attempt < b) {
                entry.best_valid = Some(a.attempt);
                summary.improved.retain(|&(_, t)| t != a.task);
                summary.improved.push((a.slot, a.task));
            }
            touched.insert(a.task);
        }
        for &(slot, task) in &summary.improved {
            if slot < self.psi {
                self.order_map[slot] = Some(task);
            }
        }
        for task in touched {
            let entry = &mut self.task_lut[task];
            if let Some(best) = entry.best_valid {
                let settled = entry.attempts[..best as usize]
                    .iter()
                    .all(|s| *s == AttemptState::Resolved(Outcome::Invalid));
                if settled {
                    entry.status = TaskStatus::Done { attempt: best };
                    self.remaining -= 1;
                    summary.finished.push((task, best));
                }
            }
        }
        summary
    }
}
