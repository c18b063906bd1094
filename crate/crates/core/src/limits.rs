use crate::error::{Error, Result};
use crate::set::MAX_POSITION;

pub const DEFAULT_CAP: usize = 12;

/// Upper bound on `n` for anything that walks permutations one by one.
///
/// Closed-form counting ignores it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    cap: usize,
}

impl Limits {
    pub fn new(cap: usize) -> Result<Self> {
        if cap > MAX_POSITION {
            return Err(Error::CapExceeded { n: cap, cap: MAX_POSITION });
        }
        Ok(Limits { cap })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if n > self.cap {
            Err(Error::CapExceeded { n, cap: self.cap })
        } else {
            Ok(())
        }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits { cap: DEFAULT_CAP }
    }
}
