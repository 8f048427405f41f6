//! Resource caps. Ball growth in the supported groups is exponential, so every
//! enumeration checks against these before allocating.

use crate::error::{Error, Result};

pub const ENV_MAX_VERTICES: &str = "RELHYP_MAX_VERTICES";
pub const ENV_MAX_SIMPLICES: &str = "RELHYP_MAX_SIMPLICES";

pub const DEFAULT_MAX_VERTICES: usize = 4_000_000;
pub const DEFAULT_MAX_SIMPLICES: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_simplices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: DEFAULT_MAX_VERTICES,
            max_simplices: DEFAULT_MAX_SIMPLICES,
        }
    }
}

impl Limits {
    /// Defaults overridden by `RELHYP_MAX_VERTICES` / `RELHYP_MAX_SIMPLICES`.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Some(v) = read_env(ENV_MAX_VERTICES)? {
            limits.max_vertices = v;
        }
        if let Some(v) = read_env(ENV_MAX_SIMPLICES)? {
            limits.max_simplices = v;
        }
        Ok(limits)
    }

    pub fn check_vertices(&self, what: &str, count: usize) -> Result<()> {
        if count > self.max_vertices {
            return Err(Error::BudgetExceeded {
                what: format!("{what} ({count} vertices)"),
                limit: self.max_vertices,
            });
        }
        Ok(())
    }

    pub fn check_simplices(&self, what: &str, count: usize) -> Result<()> {
        if count > self.max_simplices {
            return Err(Error::BudgetExceeded {
                what: format!("{what} ({count} simplices)"),
                limit: self.max_simplices,
            });
        }
        Ok(())
    }
}

fn read_env(name: &str) -> Result<Option<usize>> {
    match std::env::var(name) {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::config(name, format!("expected a positive integer, got `{raw}`"))),
        Err(_) => Ok(None),
    }
}
