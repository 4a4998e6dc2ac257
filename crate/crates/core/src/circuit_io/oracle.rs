use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::field::{FpElem, PrimeField};
use crate::reconstruct::PowCircuitMulti;

/// `sum lambda_i f_i(point)^d`.
pub fn evaluate_circuit(c: &PowCircuitMulti, point: &[FpElem]) -> Result<FpElem> {
    if point.len() != c.n() {
        return Err(Error::DimensionMismatch { expected: c.n(), got: point.len() });
    }
    c.eval(point)
}

type EvalFn = dyn Fn(&[FpElem]) -> Result<FpElem> + Send + Sync;

/// Black-box access to a polynomial with a memo of answered points.
///
/// [`OracleHandle::calls`] counts distinct points sent to the underlying
/// function, which does not depend on the order of concurrent queries.
/// [`OracleHandle::queries`] counts every request.
pub struct OracleHandle {
    field: PrimeField,
    n: usize,
    eval: Arc<EvalFn>,
    cache: Mutex<HashMap<Vec<u64>, FpElem>>,
    queries: AtomicUsize,
}

impl OracleHandle {
    pub fn new<F>(field: PrimeField, n: usize, eval: F) -> Self
    where
        F: Fn(&[FpElem]) -> Result<FpElem> + Send + Sync + 'static,
    {
        OracleHandle {
            field,
            n,
            eval: Arc::new(eval),
            cache: Mutex::new(HashMap::new()),
            queries: AtomicUsize::new(0),
        }
    }

    /// Hides `c` behind the evaluation interface.
    pub fn from_circuit(c: PowCircuitMulti) -> Self {
        let (field, n) = (c.field(), c.n());
        Self::new(field, n, move |pt| evaluate_circuit(&c, pt))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, point: &[FpElem]) -> Result<FpElem> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        if point.iter().any(|x| x.field() != self.field) {
            return Err(Error::Oracle("query point over a different field".into()));
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        let key: Vec<u64> = point.iter().map(FpElem::value).collect();
        if let Some(&v) = self.lock().get(&key) {
            return Ok(v);
        }
        let v = (self.eval)(point)?;
        self.lock().entry(key).or_insert(v);
        Ok(v)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, HashMap<Vec<u64>, FpElem>> {
        self.cache.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Distinct points evaluated so far.
    pub fn calls(&self) -> usize {
        self.lock().len()
    }

    /// All requests so far, repeats included.
    pub fn queries(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }
}

impl std::fmt::Debug for OracleHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleHandle")
            .field("field", &self.field)
            .field("n", &self.n)
            .field("calls", &self.calls())
            .finish()
    }
}
