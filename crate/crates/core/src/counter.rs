//! Arithmetic operation accounting.
//!
//! One complex multiplication counts as one unit and one complex addition as
//! one unit, tracked separately. Counts are also attributed to the stage tag
//! active on the handle that recorded them.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

#[derive(Debug, Default)]
struct Inner {
    mults: AtomicU64,
    adds: AtomicU64,
    tags: Mutex<BTreeMap<&'static str, OpCounts>>,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub mults: u64,
    pub adds: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.mults + self.adds
    }

    /// Real floating-point operations: 6 per complex multiplication, 2 per
    /// complex addition.
    pub fn real_flops(&self) -> u64 {
        6 * self.mults + 2 * self.adds
    }
}

impl std::ops::Add for OpCounts {
    type Output = OpCounts;
    fn add(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            mults: self.mults + rhs.mults,
            adds: self.adds + rhs.adds,
        }
    }
}

impl std::ops::Mul<u64> for OpCounts {
    type Output = OpCounts;
    fn mul(self, k: u64) -> OpCounts {
        OpCounts {
            mults: self.mults * k,
            adds: self.adds * k,
        }
    }
}

impl std::ops::Sub for OpCounts {
    type Output = OpCounts;
    fn sub(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            mults: self.mults - rhs.mults,
            adds: self.adds - rhs.adds,
        }
    }
}

/// Shared, thread-safe operation counter.
///
/// Cloning yields a handle onto the same totals. [`OpCounter::tagged`] returns
/// a handle that additionally attributes its counts to a stage tag.
#[derive(Debug, Clone)]
pub struct OpCounter {
    inner: Arc<Inner>,
    tag: &'static str,
}

impl Default for OpCounter {
    fn default() -> Self {
        Self::new()
    }
}

impl OpCounter {
    pub fn new() -> Self {
        OpCounter {
            inner: Arc::new(Inner::default()),
            tag: "untagged",
        }
    }

    pub fn tagged(&self, tag: &'static str) -> OpCounter {
        OpCounter {
            inner: Arc::clone(&self.inner),
            tag,
        }
    }

    pub fn tag(&self) -> &'static str {
        self.tag
    }

    pub fn record(&self, mults: u64, adds: u64) {
        if mults == 0 && adds == 0 {
            return;
        }
        self.inner.mults.fetch_add(mults, Ordering::Relaxed);
        self.inner.adds.fetch_add(adds, Ordering::Relaxed);
        let mut tags = self.inner.tags.lock().expect("op counter poisoned");
        let entry = tags.entry(self.tag).or_default();
        entry.mults += mults;
        entry.adds += adds;
    }

    pub fn mul(&self, n: u64) {
        self.record(n, 0);
    }

    pub fn add(&self, n: u64) {
        self.record(0, n);
    }

    pub fn mults(&self) -> u64 {
        self.inner.mults.load(Ordering::Relaxed)
    }

    pub fn adds(&self) -> u64 {
        self.inner.adds.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> OpCounts {
        OpCounts {
            mults: self.mults(),
            adds: self.adds(),
        }
    }

    pub fn by_tag(&self) -> BTreeMap<&'static str, OpCounts> {
        self.inner.tags.lock().expect("op counter poisoned").clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rayon::prelude::*;

    #[test]
    fn tags_partition_totals() {
        let c = OpCounter::new();
        c.tagged("a").record(3, 2);
        c.tagged("b").mul(5);
        c.add(1);
        assert_eq!(c.snapshot(), OpCounts { mults: 8, adds: 3 });
        let tags = c.by_tag();
        let sum: u64 = tags.values().map(|t| t.total()).sum();
        assert_eq!(sum, 11);
        assert_eq!(tags["a"], OpCounts { mults: 3, adds: 2 });
    }

    #[test]
    fn parallel_branches_sum() {
        let c = OpCounter::new();
        (0..1000u64).into_par_iter().for_each(|i| c.tagged("p").record(i, 1));
        assert_eq!(c.mults(), 999 * 1000 / 2);
        assert_eq!(c.adds(), 1000);
    }
}
