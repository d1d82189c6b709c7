//! Process-wide tally of post-synthesis consistency checks.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::program::Program;
use crate::task::{consistent, Example};

static CHECKS: AtomicU64 = AtomicU64::new(0);
static VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// Checks `p` against `examples` and records the outcome.
pub fn record(p: &Program, examples: &[Example]) -> bool {
    let ok = consistent(p, examples);
    CHECKS.fetch_add(1, Ordering::Relaxed);
    if !ok {
        VIOLATIONS.fetch_add(1, Ordering::Relaxed);
    }
    debug_assert!(ok, "synthesized program is inconsistent with its examples: {p:?}");
    ok
}

/// `(checks, violations)` since process start.
pub fn counters() -> (u64, u64) {
    (CHECKS.load(Ordering::Relaxed), VIOLATIONS.load(Ordering::Relaxed))
}
