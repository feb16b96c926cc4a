//! Instance configuration: TOML document, validation, and conversion into
//! the geometric data of an instance.

use serde::{Deserialize, Serialize};

use crate::endo::ConnectionFormE;
use crate::error::{Error, Result};
use crate::fedosov::ChristoffelData;
use crate::poly::PolyX;
use crate::rational;

pub const SUITES: [&str; 5] = ["lemmas", "fedosov", "gamma", "hochschild", "tracemaps"];

/// One monomial `coef · x^exp` with exponents indexed from `x^1`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub exp: Vec<u32>,
    pub coef: String,
}

/// `Γ^k_ij(x)`, indices starting at 1. The `(j, i)` entry is implied.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ChristoffelEntry {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub poly: Vec<PolyTerm>,
}

/// The `r×r` matrix multiplying `dy^i` in the connection form, `i ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionEntry {
    pub i: usize,
    pub matrix: Vec<Vec<Vec<PolyTerm>>>,
}

/// A deliberate defect injected to show that the checks can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Negates the leading coefficient of the Fedosov correction `A`.
    CorruptA,
    /// Negates the leading coefficient of the correction part of `γ`.
    CorruptGamma,
    /// Flips the sign of the second term of the Gerstenhaber bracket.
    FlipBracketSign,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub d: usize,
    #[serde(default = "one")]
    pub r: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_rep", default)]
    pub n_rep: Option<usize>,
    #[serde(default = "two")]
    pub arity_cap: usize,
    #[serde(default = "three")]
    pub chain_degree: usize,
    #[serde(default = "six")]
    pub sample_terms: usize,
    #[serde(default = "forty")]
    pub filtered_terms: usize,
    #[serde(default = "four")]
    pub lemma_size: usize,
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub christoffel: Vec<ChristoffelEntry>,
    #[serde(default)]
    pub connection_form: Vec<ConnectionEntry>,
    #[serde(rename = "override", default)]
    pub override_limits: bool,
    #[serde(default)]
    pub mutation: Option<Mutation>,
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}
fn three() -> usize {
    3
}
fn four() -> usize {
    4
}
fn six() -> usize {
    6
}
fn forty() -> usize {
    40
}
fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3]
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl InstanceConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn n_rep(&self) -> usize {
        self.n_rep.unwrap_or(self.n.saturating_sub(2).max(1))
    }

    /// Largest allowed `N` and `arity_cap`.
    fn limits(&self) -> (usize, usize) {
        if self.override_limits {
            (10, 4)
        } else {
            (6, 2)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let (max_n, max_arity) = self.limits();
        if !(1..=3).contains(&self.d) {
            errs.push(format!("d = {} outside 1..=3", self.d));
        }
        if !(1..=3).contains(&self.r) {
            errs.push(format!("r = {} outside 1..=3", self.r));
        }
        if !(2..=max_n).contains(&self.n) {
            errs.push(format!("N = {} outside 2..={max_n}", self.n));
        }
        if let Some(nr) = self.n_rep {
            if nr < 1 || nr + 1 > self.n {
                errs.push(format!("N_rep = {nr} outside 1..=N-1"));
            }
        }
        if self.arity_cap > max_arity {
            errs.push(format!("arity_cap = {} exceeds {max_arity}", self.arity_cap));
        }
        if self.chain_degree > 3 {
            errs.push(format!("chain_degree = {} exceeds 3", self.chain_degree));
        }
        if !(1..=64).contains(&self.sample_terms) {
            errs.push(format!("sample_terms = {} outside 1..=64", self.sample_terms));
        }
        if !(1..=200).contains(&self.filtered_terms) {
            errs.push(format!("filtered_terms = {} outside 1..=200", self.filtered_terms));
        }
        if !(2..=4).contains(&self.lemma_size) {
            errs.push(format!("lemma_size = {} outside 2..=4", self.lemma_size));
        }
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                errs.push(format!("unknown suite {s:?}"));
            }
        }
        if self.seeds.is_empty() {
            errs.push("seeds must not be empty".into());
        }
        for e in &self.christoffel {
            for (name, v) in [("k", e.k), ("i", e.i), ("j", e.j)] {
                if v < 1 || v > self.d {
                    errs.push(format!("christoffel {name} = {v} outside 1..={}", self.d));
                }
            }
        }
        for e in &self.connection_form {
            if e.i < 1 || e.i > self.d {
                errs.push(format!("connection_form i = {} outside 1..={}", e.i, self.d));
            }
            if e.matrix.len() != self.r || e.matrix.iter().any(|row| row.len() != self.r) {
                errs.push(format!("connection_form matrix for i = {} must be {}x{}", e.i, self.r, self.r));
            }
        }
        if !errs.is_empty() {
            return Err(cfg_err(errs.join("; ")));
        }
        self.christoffel()?;
        self.connection()?;
        Ok(())
    }

    fn poly(&self, terms: &[PolyTerm]) -> Result<PolyX> {
        let mut p = PolyX::zero();
        for t in terms {
            if t.exp.len() != self.d {
                return Err(cfg_err(format!("exponent {:?} must have length {}", t.exp, self.d)));
            }
            let c = rational::parse(&t.coef).map_err(|_| cfg_err(format!("bad coefficient {:?}", t.coef)))?;
            p += &PolyX::monomial(t.exp.clone(), c);
        }
        Ok(p)
    }

    pub fn christoffel(&self) -> Result<ChristoffelData> {
        let entries = self
            .christoffel
            .iter()
            .map(|e| Ok((e.k - 1, e.i - 1, e.j - 1, self.poly(&e.poly)?)))
            .collect::<Result<Vec<_>>>()?;
        ChristoffelData::from_entries(self.d, entries)
    }

    pub fn connection(&self) -> Result<ConnectionFormE> {
        let mut conn = ConnectionFormE::zero(self.d, self.r);
        let mut seen = vec![false; self.d];
        for e in &self.connection_form {
            if std::mem::replace(&mut seen[e.i - 1], true) {
                return Err(cfg_err(format!("connection_form i = {} given twice", e.i)));
            }
            let mat = e.matrix.iter().map(|row| row.iter().map(|p| self.poly(p)).collect()).collect::<Result<_>>()?;
            conn = conn.with_matrix(e.i - 1, mat)?;
        }
        Ok(conn)
    }

    /// Requested suites in dependency order, duplicates removed.
    pub fn ordered_suites(&self) -> Vec<&'static str> {
        SUITES.iter().copied().filter(|s| self.suites.iter().any(|x| x == s)).collect()
    }
}
