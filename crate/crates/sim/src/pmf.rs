//! Distribution files for the `discrete` command.
//!
//! A TOML file whose `kind` selects the layout. Every table lists its
//! alphabet sizes and its probabilities flattened row-major, conditioning
//! variables first.
//!
//! ```toml
//! kind = "single-level"
//! p_x1 = [0.5, 0.5]
//! p_x2 = [0.5, 0.5]
//! p_xr = [1.0]
//!
//! [channel]            # p(y1, y2, yr | x1, x2, xr)
//! given = [2, 2, 1]
//! outcome = [2, 2, 2]
//! table = [ ... ]
//!
//! [p_yh]               # p(yh | yr, xr)
//! given = [2, 1]
//! outcome = [2]
//! table = [0.9, 0.1, 0.1, 0.9]
//! ```
//!
//! `kind = "bi-level"` takes `p_x1`, `p_x2`, `p_u1`, `p_u2` and the tables
//! `p_xr` (given `U1, U2`), `channel`, `p_yh1` (given `Yr, U1`) and `p_yh2`
//! (given `Yr, U2`). `kind = "joint"` takes `sizes` and `probabilities` of
//! one joint distribution plus any number of `[[query]]` tables with
//! variable groups `a`, `b` and optional `c`, each asking for `I(A; B | C)`.

use anyhow::{Context, Result};
use irc_core::discrete::{BiLevelFactorization, Conditional, JointPmf, SingleLevelFactorization};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub given: Vec<usize>,
    pub outcome: Vec<usize>,
    pub table: Vec<f64>,
}

impl TableSpec {
    fn conditional(&self, name: &str) -> Result<Conditional> {
        Conditional::new(self.given.clone(), self.outcome.clone(), self.table.clone())
            .with_context(|| format!("table {name}"))
    }

    fn from_conditional(c: &Conditional) -> Self {
        TableSpec {
            given: c.given_sizes().to_vec(),
            outcome: c.outcome_sizes().to_vec(),
            table: c.table().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Query {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    #[serde(default)]
    pub c: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PmfFile {
    BiLevel {
        p_x1: Vec<f64>,
        p_x2: Vec<f64>,
        p_u1: Vec<f64>,
        p_u2: Vec<f64>,
        p_xr: TableSpec,
        channel: TableSpec,
        p_yh1: TableSpec,
        p_yh2: TableSpec,
    },
    SingleLevel {
        p_x1: Vec<f64>,
        p_x2: Vec<f64>,
        p_xr: Vec<f64>,
        channel: TableSpec,
        p_yh: TableSpec,
    },
    Joint {
        sizes: Vec<usize>,
        probabilities: Vec<f64>,
        #[serde(default)]
        query: Vec<Query>,
    },
}

/// A parsed and validated distribution file.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    BiLevel(BiLevelFactorization),
    SingleLevel(SingleLevelFactorization),
    Joint(JointPmf, Vec<Query>),
}

impl PmfFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("malformed distribution file")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read distribution file {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn distribution(&self) -> Result<Distribution> {
        Ok(match self {
            PmfFile::BiLevel {
                p_x1,
                p_x2,
                p_u1,
                p_u2,
                p_xr,
                channel,
                p_yh1,
                p_yh2,
            } => Distribution::BiLevel(BiLevelFactorization::new(
                p_x1.clone(),
                p_x2.clone(),
                p_u1.clone(),
                p_u2.clone(),
                p_xr.conditional("p_xr")?,
                channel.conditional("channel")?,
                p_yh1.conditional("p_yh1")?,
                p_yh2.conditional("p_yh2")?,
            )?),
            PmfFile::SingleLevel {
                p_x1,
                p_x2,
                p_xr,
                channel,
                p_yh,
            } => Distribution::SingleLevel(SingleLevelFactorization::new(
                p_x1.clone(),
                p_x2.clone(),
                p_xr.clone(),
                channel.conditional("channel")?,
                p_yh.conditional("p_yh")?,
            )?),
            PmfFile::Joint {
                sizes,
                probabilities,
                query,
            } => Distribution::Joint(
                JointPmf::new(sizes.clone(), probabilities.clone()).context("joint distribution")?,
                query.clone(),
            ),
        })
    }

    pub fn from_bi_level(f: &BiLevelFactorization) -> Self {
        PmfFile::BiLevel {
            p_x1: f.p_x1.clone(),
            p_x2: f.p_x2.clone(),
            p_u1: f.p_u1.clone(),
            p_u2: f.p_u2.clone(),
            p_xr: TableSpec::from_conditional(&f.p_xr),
            channel: TableSpec::from_conditional(&f.channel),
            p_yh1: TableSpec::from_conditional(&f.p_yh1),
            p_yh2: TableSpec::from_conditional(&f.p_yh2),
        }
    }

    pub fn from_single_level(f: &SingleLevelFactorization) -> Self {
        PmfFile::SingleLevel {
            p_x1: f.p_x1.clone(),
            p_x2: f.p_x2.clone(),
            p_xr: f.p_xr.clone(),
            channel: TableSpec::from_conditional(&f.channel),
            p_yh: TableSpec::from_conditional(&f.p_yh),
        }
    }
}
