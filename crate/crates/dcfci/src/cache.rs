//! Exactly-once memoization of likelihood-ratio tests.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use dcfci_core::bayes::BffConfig;
use dcfci_core::citest::{lr_test, CiError, CiOutcome, CiResult, CiSource, Dataset};
use dcfci_core::vars::CiKey;

type Slot = Arc<OnceLock<Result<CiResult, CiError>>>;

/// Test results keyed by canonical query. Failures are stored too, so a
/// failing query fails the same way every time it is asked.
#[derive(Default)]
pub struct CiCache {
    slots: Mutex<HashMap<CiKey, Slot>>,
    computed: AtomicUsize,
}

impl CiCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// The stored result for `key`, running `compute` if this is the first
    /// request. Concurrent first requests wait for a single computation.
    pub fn get_or_compute(
        &self,
        key: &CiKey,
        compute: impl FnOnce() -> Result<CiResult, CiError>,
    ) -> Result<CiResult, CiError> {
        let slot = {
            let mut slots = self.slots.lock().unwrap_or_else(|e| e.into_inner());
            Arc::clone(slots.entry(*key).or_default())
        };
        slot.get_or_init(|| {
            self.computed.fetch_add(1, Ordering::Relaxed);
            compute()
        })
        .clone()
    }

    /// Number of computations performed so far.
    pub fn computed(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.slots.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Likelihood-ratio tests on a dataset, cached, with BFF posteriors.
pub struct CachedDataSource<'a> {
    data: &'a Dataset,
    bff: BffConfig,
    cache: CiCache,
}

impl<'a> CachedDataSource<'a> {
    pub fn new(data: &'a Dataset, bff: BffConfig) -> Self {
        CachedDataSource {
            data,
            bff,
            cache: CiCache::new(),
        }
    }

    pub fn result(&self, key: &CiKey) -> Result<CiResult, CiError> {
        self.cache.get_or_compute(key, || lr_test(self.data, key))
    }

    pub fn cache(&self) -> &CiCache {
        &self.cache
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }
}

impl CiSource for CachedDataSource<'_> {
    fn outcome(&self, key: &CiKey) -> Result<CiOutcome, CiError> {
        let r = self.result(key)?;
        Ok(CiOutcome::from_result(&r, self.data.n(), &self.bff))
    }
}
