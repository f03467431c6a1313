use std::collections::HashMap;
use std::sync::RwLock;

use bhcp_core::diffusivity::{MuSource, MuValue};

/// Caches `μ` per `(lower, upper)` pair; safe to share across threads.
#[derive(Debug)]
pub struct MemoizedProfile<S> {
    inner: S,
    cache: RwLock<HashMap<(u64, u64), MuValue>>,
}

impl<S: MuSource> MemoizedProfile<S> {
    pub fn new(inner: S) -> Self {
        Self { inner, cache: RwLock::new(HashMap::new()) }
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.read().map(|c| c.len()).unwrap_or(0)
    }
}

impl<S: MuSource> MuSource for MemoizedProfile<S> {
    fn horizon(&self) -> f64 {
        self.inner.horizon()
    }

    fn mu(&self, lower: f64, upper: f64) -> bhcp_core::Result<MuValue> {
        let key = (lower.to_bits(), upper.to_bits());
        if let Some(v) = self.cache.read().ok().and_then(|c| c.get(&key).copied()) {
            return Ok(v);
        }
        let v = self.inner.mu(lower, upper)?;
        if let Ok(mut c) = self.cache.write() {
            c.insert(key, v);
        }
        Ok(v)
    }
}
