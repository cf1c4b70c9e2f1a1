//! Resource budgets.
//!
//! Defaults can be raised through environment variables, which the CLI
//! documents: `VICSEK_MAX_VERTICES`, `VICSEK_MAX_DENSE`, `VICSEK_MAX_RECORDS`.

use std::sync::OnceLock;

use crate::error::{Result, VsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest graph approximation that may be built.
    pub max_vertices: u64,
    /// Largest matrix handed to the dense eigensolver oracle.
    pub max_dense: u64,
    /// Largest spectrum table or word enumeration.
    pub max_records: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: 4_000_000,
            max_dense: 2_000,
            max_records: 20_000_000,
        }
    }
}

fn env_u64(key: &str) -> Option<u64> {
    std::env::var(key).ok().and_then(|v| v.trim().parse().ok())
}

impl Limits {
    pub fn from_env() -> Self {
        let d = Limits::default();
        Limits {
            max_vertices: env_u64("VICSEK_MAX_VERTICES").unwrap_or(d.max_vertices),
            max_dense: env_u64("VICSEK_MAX_DENSE").unwrap_or(d.max_dense),
            max_records: env_u64("VICSEK_MAX_RECORDS").unwrap_or(d.max_records),
        }
    }
}

/// Process-wide limits, read from the environment once.
pub fn limits() -> &'static Limits {
    static L: OnceLock<Limits> = OnceLock::new();
    L.get_or_init(Limits::from_env)
}

pub(crate) fn check(what: &'static str, requested: u64, limit: u64) -> Result<()> {
    if requested > limit {
        Err(VsError::Budget {
            what,
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}

/// `base^exp` with saturation, for budget arithmetic.
pub(crate) fn sat_pow(base: u64, exp: usize) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}
