//! Datasets, likelihood-ratio CI tests over nested regressions, and the
//! [`CiSource`] abstraction the scoring and search layers consume.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bayes::{posterior, BffConfig};
use crate::graph::{GraphError, MixedGraph};
use crate::msep::m_separated_mag;
use crate::regression::fit;
use crate::special::{chi_square_isf, chi_square_sf};
use crate::vars::{CiKey, VarSet};

/// Measurement type of a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Binary,
    /// Categorical with the given number of levels (at least 2).
    Multinomial(usize),
}

impl VarKind {
    /// Number of outcome levels; 1 for continuous.
    pub fn levels(self) -> usize {
        match self {
            VarKind::Continuous => 1,
            VarKind::Binary => 2,
            VarKind::Multinomial(k) => k,
        }
    }

    /// Design-matrix width contributed as a predictor.
    pub fn columns(self) -> usize {
        match self {
            VarKind::Continuous => 1,
            k => k.levels() - 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Continuous(Vec<f64>),
    /// Level codes `0..K`.
    Categorical(Vec<u32>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Continuous(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CiError {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("fit did not converge after {iterations} iterations{}", if *separation { " (separation)" } else { "" })]
    FitFailure { iterations: usize, separation: bool },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("no result available for {0:?}")]
    Unknown(CiKey),
    #[error("invalid dataset: {0}")]
    Dataset(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Complete-case typed data with a schema.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    n: usize,
    names: Vec<String>,
    kinds: Vec<VarKind>,
    columns: Vec<Column>,
}

impl Dataset {
    pub fn new(
        names: Vec<String>,
        kinds: Vec<VarKind>,
        columns: Vec<Column>,
    ) -> Result<Self, CiError> {
        use alloc::format;
        if names.len() != kinds.len() || names.len() != columns.len() {
            return Err(CiError::Dataset(
                "schema and columns differ in length".into(),
            ));
        }
        if names.len() > crate::vars::MAX_VARS {
            return Err(CiError::Dataset(format!(
                "{} variables, at most 64 are supported",
                names.len()
            )));
        }
        let n = columns.first().map_or(0, Column::len);
        if n == 0 {
            return Err(CiError::Dataset("no rows".into()));
        }
        for (i, ((name, kind), col)) in names.iter().zip(&kinds).zip(&columns).enumerate() {
            if names[..i].contains(name) {
                return Err(CiError::Dataset(format!("duplicate variable name {name}")));
            }
            if col.len() != n {
                return Err(CiError::Dataset(format!(
                    "column {name} has {} rows, expected {n}",
                    col.len()
                )));
            }
            match (kind, col) {
                (VarKind::Continuous, Column::Continuous(v)) => {
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(CiError::Dataset(format!(
                            "column {name} has a non-finite value"
                        )));
                    }
                }
                (VarKind::Multinomial(k), _) if *k < 2 => {
                    return Err(CiError::Dataset(format!(
                        "multinomial {name} needs at least 2 levels"
                    )));
                }
                (VarKind::Binary | VarKind::Multinomial(_), Column::Categorical(v)) => {
                    let k = kind.levels() as u32;
                    if let Some(bad) = v.iter().find(|&&c| c >= k) {
                        return Err(CiError::Dataset(format!(
                            "column {name}: level {bad} outside 0..{k}"
                        )));
                    }
                }
                _ => {
                    return Err(CiError::Dataset(format!(
                        "column {name} does not match its kind"
                    )))
                }
            }
        }
        Ok(Dataset {
            n,
            names,
            kinds,
            columns,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self, v: usize) -> VarKind {
        self.kinds[v]
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    pub fn column(&self, v: usize) -> &Column {
        &self.columns[v]
    }
}

/// Outcome of a symmetric likelihood-ratio test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CiResult {
    /// Chi-square value whose tail probability is `p_value`.
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Directional p-values (response `x`, response `y`).
    pub p1: f64,
    pub p2: f64,
}

/// `min(2 min(p1, p2), max(p1, p2))`, clamped to `[0, 1]`.
pub fn combine_p(p1: f64, p2: f64) -> f64 {
    (2.0 * p1.min(p2)).min(p1.max(p2)).clamp(0.0, 1.0)
}

struct Direction {
    stat: f64,
    df: usize,
}

fn directional(
    d: &Dataset,
    response: usize,
    other: usize,
    z: VarSet,
) -> Result<Direction, CiError> {
    let full = fit(d, response, z.with(other))?;
    let reduced = fit(d, response, z)?;
    let stat = 2.0 * (full.loglik - reduced.loglik);
    if stat < -1e-6 * full.loglik.abs().max(1.0) {
        return Err(CiError::FitFailure {
            iterations: 0,
            separation: false,
        });
    }
    Ok(Direction {
        stat: stat.max(0.0),
        df: full.params - reduced.params,
    })
}

/// Tests `x ⫫ y | z` by fitting `x ~ z + y` against `x ~ z` and `y ~ z + x`
/// against `y ~ z`, combining the two p-values symmetrically. If only one
/// direction can be fitted its p-value stands for both.
pub fn lr_test(d: &Dataset, key: &CiKey) -> Result<CiResult, CiError> {
    if key.max_var() >= d.p() {
        return Err(CiError::Precondition("variable out of range"));
    }
    let a = directional(d, key.x, key.y, key.z);
    let b = directional(d, key.y, key.x, key.z);
    let (a, b) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (Ok(a), Err(e)) | (Err(e), Ok(a)) => {
            log::debug!("{key:?}: one direction failed ({e}), using the other");
            let b = Direction {
                stat: a.stat,
                df: a.df,
            };
            (a, b)
        }
        (Err(e), Err(_)) => return Err(e),
    };
    let df = a.df.max(1);
    let p1 = chi_square_sf(a.stat, df as f64);
    let p2 = chi_square_sf(b.stat, b.df.max(1) as f64);
    let p_value = combine_p(p1, p2);
    let statistic = if p_value > 0.0 {
        chi_square_isf(p_value, df as f64)
    } else {
        a.stat.max(b.stat)
    };
    Ok(CiResult {
        statistic,
        df,
        p_value,
        p1,
        p2,
    })
}

/// What the search needs to know about one CI query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CiOutcome {
    pub p_value: f64,
    /// Posterior probability of independence.
    pub p_indep: f64,
}

impl CiOutcome {
    /// Outcome of a test on `n` rows under a Bayes factor configuration.
    pub fn from_result(r: &CiResult, n: usize, bff: &BffConfig) -> Self {
        let post = posterior(r.statistic, r.df, n, bff);
        CiOutcome {
            p_value: r.p_value,
            p_indep: post.p_h0,
        }
    }
}

/// Supplies p-values and independence posteriors for CI queries. Must be
/// deterministic per key and shareable across threads.
pub trait CiSource: Sync {
    fn outcome(&self, key: &CiKey) -> Result<CiOutcome, CiError>;
}

impl<T: CiSource + ?Sized> CiSource for &T {
    fn outcome(&self, key: &CiKey) -> Result<CiOutcome, CiError> {
        (**self).outcome(key)
    }
}

/// Fixed table of outcomes; unknown keys are errors.
#[derive(Clone, Debug, Default)]
pub struct TableSource(BTreeMap<CiKey, CiOutcome>);

impl TableSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: CiKey, outcome: CiOutcome) {
        self.0.insert(key, outcome);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CiKey, &CiOutcome)> + '_ {
        self.0.iter()
    }
}

impl CiSource for TableSource {
    fn outcome(&self, key: &CiKey) -> Result<CiOutcome, CiError> {
        self.0.get(key).copied().ok_or(CiError::Unknown(*key))
    }
}

/// Perfect source from a MAG: p-value and posterior are 1 when m-separated,
/// 0 otherwise.
pub struct MagSource<'a>(pub &'a MixedGraph);

impl CiSource for MagSource<'_> {
    fn outcome(&self, key: &CiKey) -> Result<CiOutcome, CiError> {
        let v = if m_separated_mag(self.0, key)? {
            1.0
        } else {
            0.0
        };
        Ok(CiOutcome {
            p_value: v,
            p_indep: v,
        })
    }
}

/// Source computing tests directly on a dataset, without caching.
pub struct DataSource<'a> {
    pub data: &'a Dataset,
    pub bff: BffConfig,
}

impl CiSource for DataSource<'_> {
    fn outcome(&self, key: &CiKey) -> Result<CiOutcome, CiError> {
        let r = lr_test(self.data, key)?;
        Ok(CiOutcome::from_result(&r, self.data.n(), &self.bff))
    }
}

/// Independence decisions at level `alpha` on p-values alone, the way
/// sample-based FCI consumes a source.
pub struct AlphaOracle<'a, S: ?Sized> {
    pub source: &'a S,
    pub alpha: f64,
}

impl<S: CiSource + ?Sized> crate::fci::IndependenceOracle for AlphaOracle<'_, S> {
    fn independent(&self, key: &CiKey) -> Result<bool, CiError> {
        Ok(self.source.outcome(key)?.p_value > self.alpha)
    }
}
