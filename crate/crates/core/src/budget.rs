use crate::error::{Error, Result};

/// Resource limits for expensive polynomial arithmetic.
///
/// `max_terms` bounds the number of coefficient slots a single polynomial (or dense
/// buffer) may occupy; `max_work` bounds the number of coefficient multiply-adds
/// one operation may perform. Exceeding either is an explicit error, never a
/// silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_terms: u128,
    pub max_work: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_terms: 50_000_000,
            max_work: 200_000_000_000,
        }
    }
}

impl Budget {
    pub fn small() -> Self {
        Budget {
            max_terms: 20_000,
            max_work: 5_000_000,
        }
    }

    pub fn check_terms(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.max_terms {
            return Err(Error::Budget {
                what,
                needed,
                limit: self.max_terms,
            });
        }
        Ok(())
    }

    pub fn check_work(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.max_work {
            return Err(Error::Budget {
                what,
                needed,
                limit: self.max_work,
            });
        }
        Ok(())
    }
}
