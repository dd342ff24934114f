use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McmcSettings {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub chains: usize,
}

impl Default for McmcSettings {
    fn default() -> Self {
        McmcSettings {
            iterations: 30_000,
            burn_in: 1_000,
            thin: 1,
            seed: 20_140_101,
            chains: 1,
        }
    }
}

impl McmcSettings {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::InvalidSettings("thin must be at least 1".into()));
        }
        if self.chains == 0 {
            return Err(Error::InvalidSettings("chains must be at least 1".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidSettings(format!(
                "burn_in ({}) must be less than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.retained_per_chain() == 0 {
            return Err(Error::InvalidSettings("no draws retained after thinning".into()));
        }
        Ok(())
    }

    /// (iterations - burn_in) / thin, rounded down.
    pub fn retained_per_chain(&self) -> usize {
        (self.iterations - self.burn_in.min(self.iterations)) / self.thin.max(1)
    }

    pub fn retained_total(&self) -> usize {
        self.retained_per_chain() * self.chains
    }

    /// Whether zero-based iteration `i` is kept.
    pub fn keeps(&self, i: usize) -> bool {
        i >= self.burn_in && (i - self.burn_in + 1).is_multiple_of(self.thin)
    }
}
