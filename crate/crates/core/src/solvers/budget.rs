use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

/// Limits on a search. Running out is reported, never turned into an answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Deepest level (counted operations, steps or pairs) the search may try.
    pub max_depth: usize,
    pub max_states: u64,
    pub max_time: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_depth: 3,
            max_states: 100_000_000,
            max_time: Duration::from_secs(300),
        }
    }
}

impl SearchBudget {
    pub fn with_depth(max_depth: usize) -> Self {
        Self {
            max_depth,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BudgetSpent {
    pub states: u64,
    pub elapsed: Duration,
    /// Deepest level that was searched to completion.
    pub depth: usize,
}

/// Shared state counter and clock for one solver run.
#[derive(Debug)]
pub struct Meter {
    budget: SearchBudget,
    start: Instant,
    states: AtomicU64,
    exhausted: AtomicBool,
}

impl Meter {
    pub fn new(budget: SearchBudget) -> Self {
        Self {
            budget,
            start: Instant::now(),
            states: AtomicU64::new(0),
            exhausted: AtomicBool::new(false),
        }
    }

    pub fn budget(&self) -> &SearchBudget {
        &self.budget
    }

    /// Counts one state; false once the budget is gone.
    pub fn tick(&self) -> bool {
        if self.exhausted.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.states.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.budget.max_states || (n.is_multiple_of(1024) && self.start.elapsed() > self.budget.max_time) {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed)
    }

    pub fn spent(&self, depth: usize) -> BudgetSpent {
        BudgetSpent {
            states: self.states.load(Ordering::Relaxed),
            elapsed: self.start.elapsed(),
            depth,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_cap_trips() {
        let m = Meter::new(SearchBudget {
            max_states: 3,
            ..SearchBudget::default()
        });
        assert!(m.tick() && m.tick() && m.tick());
        assert!(!m.tick());
        assert!(m.exhausted());
        assert!(!m.tick());
    }
}
