//! `search-w3`: manufactures strict-`W3` fixtures.

use std::fmt;
use std::str::FromStr;

use apm_core::sample::{search_w3_catalog, search_w3_nilpotent, seeded, SearchStats, W3Candidate};
use serde_json::json;

use crate::spec::ManifoldSpec;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Nilpotent2,
    Catalog,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Nilpotent2 => "nilpotent2",
            Family::Catalog => "catalog",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nilpotent2" | "two-step-nilpotent" => Ok(Family::Nilpotent2),
            "catalog" | "user-catalog" => Ok(Family::Catalog),
            other => Err(format!(
                "unknown family {other:?} (expected nilpotent2 or catalog)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub dim: usize,
    pub family: Family,
    pub seed: u64,
    pub max_candidates: usize,
    pub tolerance: f64,
    pub count: usize,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.dim < 4 || !self.dim.is_multiple_of(2) {
            return Err(CliError::Config(format!(
                "dimension must be even and at least 4, got {}",
                self.dim
            )));
        }
        if self.max_candidates < 1 || self.count < 1 {
            return Err(CliError::Config(
                "max-candidates and count must be at least 1".into(),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::Config(format!(
                "invalid tolerance {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoSolutionFound {
    pub stats: SearchStats,
}

impl fmt::Display for NoSolutionFound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "NoSolutionFound: {} attempts, null-space dimensions {:?}",
            self.stats.attempts, self.stats.null_dims
        )
    }
}

fn fixture_name(config: &SearchConfig, base: Option<&str>, index: usize) -> String {
    match (base, index) {
        (Some(b), 0) => b.to_string(),
        (Some(b), k) => format!("{b}_{k}"),
        (None, k) => format!("w3_{}_d{}_s{}_{k}", config.family, config.dim, config.seed),
    }
}

fn provenance(config: &SearchConfig, c: &W3Candidate) -> serde_json::Value {
    json!({
        "generator": "apm search-w3",
        "family": config.family.as_str(),
        "dimension": config.dim,
        "seed": config.seed,
        "attempt": c.attempt,
        "tolerance": config.tolerance,
        "adapted_p_signs": c.signs,
        "v_dim": c.v_dim,
        "null_space_dim": c.null_dim,
        "algebra": c.algebra,
        "norm_f": c.norm_f,
        "norm_cyclic_f": c.norm_cyclic_f,
    })
}

/// Runs the search; returns `(file name, spec)` pairs in discovery order.
pub fn search(
    config: &SearchConfig,
    name: Option<&str>,
) -> Result<Result<Vec<(String, ManifoldSpec)>, NoSolutionFound>, CliError> {
    config.validate()?;
    let mut rng = seeded(config.seed);
    let run = match config.family {
        Family::Nilpotent2 => search_w3_nilpotent,
        Family::Catalog => search_w3_catalog,
    };
    let (found, stats) = run(
        config.dim,
        &mut rng,
        config.max_candidates,
        config.count,
        config.tolerance,
    )
    .map_err(CliError::Validation)?;
    if found.is_empty() {
        return Ok(Err(NoSolutionFound { stats }));
    }
    Ok(Ok(found
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let n = fixture_name(config, name, k);
            let spec = ManifoldSpec::from_manifold(&c.manifold, &n, provenance(config, c));
            (format!("{n}.json"), spec)
        })
        .collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dim: usize) -> SearchConfig {
        SearchConfig {
            dim,
            family: Family::Nilpotent2,
            seed: 0,
            max_candidates: 50,
            tolerance: 1e-9,
            count: 1,
        }
    }

    #[test]
    fn rejects_small_and_odd_dimensions() {
        assert!(matches!(search(&config(2), None), Err(CliError::Config(_))));
        assert!(matches!(search(&config(5), None), Err(CliError::Config(_))));
    }

    #[test]
    fn found_fixtures_reload_as_strict_w3() {
        for family in [Family::Nilpotent2, Family::Catalog] {
            let cfg = SearchConfig {
                family,
                ..config(4)
            };
            let found = search(&cfg, None).unwrap().unwrap();
            let (_, spec) = &found[0];
            let text = spec.to_fixture_json();
            let back: ManifoldSpec = serde_json::from_str(&text).unwrap();
            let m = back.to_manifold().unwrap();
            assert_eq!(
                apm_core::classify(&m, 1e-9).class_label,
                apm_core::ClassLabel::W3Strict
            );
        }
    }
}
