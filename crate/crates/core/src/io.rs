//! Text formats for instances and solver reports, and a seeded instance generator.
//!
//! Instance files start with `mstint <n> <m> <B>` followed by exactly `m`
//! lines `e <u> <v> <weight> <cost>`; a cost of `*` marks an edge that cannot
//! be removed. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{mst_weight, Edge, EdgeId, Instance, InstanceError};
use crate::levels::round_weights;
use crate::pareto::Rational;
use crate::solver::{Branch, Case, SolveReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing header line")]
    MissingHeader,
    #[error("malformed header, expected `mstint <n> <m> <B>`")]
    MalformedHeader,
    #[error("malformed edge line, expected `e <u> <v> <weight> <cost>`")]
    MalformedEdge,
    #[error("negative weight")]
    NegativeWeight,
    #[error("cost must be a positive integer or `*`")]
    NonpositiveCost,
    #[error("vertex {vertex} outside 0..{n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("header declares {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error(transparent)]
    Instance(InstanceError),
}

/// A parse failure at a 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn int<T: FromStr>(token: &str) -> Option<T> {
    if token.starts_with('+') {
        return None;
    }
    token.parse().ok()
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = content_lines(text);
    let err = |line, kind| ParseError { line, kind };
    let (header_line, header) = lines
        .next()
        .ok_or(err(text.lines().count().max(1), ParseErrorKind::MissingHeader))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, m, budget) = match fields.as_slice() {
        ["mstint", n, m, b] => match (int::<usize>(n), int::<usize>(m), int::<u64>(b)) {
            (Some(n), Some(m), Some(b)) => (n, m, b),
            _ => return Err(err(header_line, ParseErrorKind::MalformedHeader)),
        },
        _ => return Err(err(header_line, ParseErrorKind::MalformedHeader)),
    };
    if n == 0 {
        return Err(err(header_line, ParseErrorKind::Instance(InstanceError::NoVertices)));
    }
    if budget == 0 {
        return Err(err(header_line, ParseErrorKind::Instance(InstanceError::ZeroBudget)));
    }

    let mut edges = Vec::with_capacity(m);
    let mut last_line = header_line;
    for (line, content) in lines {
        last_line = line;
        if edges.len() == m {
            return Err(err(
                line,
                ParseErrorKind::EdgeCount {
                    expected: m,
                    found: m + 1,
                },
            ));
        }
        edges.push(parse_edge(content, n).map_err(|kind| err(line, kind))?);
    }
    if edges.len() != m {
        return Err(err(
            last_line,
            ParseErrorKind::EdgeCount {
                expected: m,
                found: edges.len(),
            },
        ));
    }
    Instance::new(n, edges, budget).map_err(|e| err(header_line, ParseErrorKind::Instance(e)))
}

fn parse_edge(content: &str, n: usize) -> Result<Edge, ParseErrorKind> {
    let fields: Vec<&str> = content.split_whitespace().collect();
    let ["e", u, v, w, c] = fields.as_slice() else {
        return Err(ParseErrorKind::MalformedEdge);
    };
    let (Some(u), Some(v)) = (int::<usize>(u), int::<usize>(v)) else {
        return Err(ParseErrorKind::MalformedEdge);
    };
    for vertex in [u, v] {
        if vertex >= n {
            return Err(ParseErrorKind::VertexOutOfRange { vertex, n });
        }
    }
    if u == v {
        return Err(ParseErrorKind::Loop(u));
    }
    let weight = match int::<u64>(w) {
        Some(w) => w,
        None if int::<i128>(w).is_some() => return Err(ParseErrorKind::NegativeWeight),
        None => return Err(ParseErrorKind::MalformedEdge),
    };
    if *c == "*" {
        return Ok(Edge::fixed(u, v, weight));
    }
    match int::<u64>(c) {
        Some(0) => Err(ParseErrorKind::NonpositiveCost),
        Some(c) => Ok(Edge::new(u, v, weight, c)),
        None if int::<i128>(c).is_some() => Err(ParseErrorKind::NonpositiveCost),
        None => Err(ParseErrorKind::MalformedEdge),
    }
}

pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = format!(
        "mstint {} {} {}\n",
        instance.vertex_count(),
        instance.edge_count(),
        instance.budget()
    );
    for e in instance.edges() {
        match e.cost {
            Some(c) => writeln!(out, "e {} {} {} {}", e.u, e.v, e.weight, c),
            None => writeln!(out, "e {} {} {} *", e.u, e.v, e.weight),
        }
        .expect("writing to a string");
    }
    out
}

/// Parses edge ids separated by commas and/or whitespace.
pub fn parse_edge_ids(text: &str) -> Result<Vec<EdgeId>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| int::<EdgeId>(t).ok_or_else(|| format!("`{t}` is not an edge id")))
        .collect()
}

fn join_ids(ids: impl Iterator<Item = EdgeId>) -> String {
    ids.map(|id| id.to_string()).collect::<Vec<_>>().join(" ")
}

/// The machine-readable content of a solver report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportDocument {
    pub case: Case,
    pub removal: Vec<EdgeId>,
    pub cost: u64,
    pub rounded_value: u64,
    pub original_value: u64,
    pub nu_star: Option<Rational>,
    pub rounded_guarantee: u64,
    pub original_guarantee: u64,
}

impl From<&SolveReport> for ReportDocument {
    fn from(r: &SolveReport) -> Self {
        Self {
            case: r.case,
            removal: r.removal.to_vec(),
            cost: r.cost,
            rounded_value: r.rounded_value,
            original_value: r.original_value,
            nu_star: r.nu_star,
            rounded_guarantee: r.rounded_guarantee,
            original_guarantee: r.original_guarantee,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("line {0}: expected `key = value`")]
    Malformed(usize),
    #[error("line {line}: bad value for `{key}`")]
    BadValue { line: usize, key: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("edge {0} is not an edge of the instance")]
    UnknownEdge(EdgeId),
    #[error("the removal disconnects the instance")]
    Disconnects,
    #[error("reported {key} {reported} but recomputed {actual}")]
    Mismatch {
        key: &'static str,
        reported: u64,
        actual: u64,
    },
}

fn parse_case(s: &str) -> Option<Case> {
    Some(match s {
        "constant" => Case::Constant,
        "1" => Case::Exact,
        "2" => Case::Beyond,
        "3/cheaper" => Case::Bracketed(Branch::Cheaper),
        "3/greedy" => Case::Bracketed(Branch::Greedy),
        "3/split" => Case::Bracketed(Branch::Split),
        _ => return None,
    })
}

fn parse_fraction(s: &str) -> Option<Rational> {
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let den: i128 = int(den)?;
    let num: i128 = int(num)?;
    (den > 0).then(|| Rational::new(num, den))
}

impl ReportDocument {
    pub fn render(&self) -> String {
        let nu = match self.nu_star {
            Some(nu) => format!("{}/{}", nu.numer(), nu.denom()),
            None => "none".into(),
        };
        format!(
            "case = {}\nremoval = {}\ncost = {}\nrounded_value = {}\noriginal_value = {}\n\
             nu_star = {}\nrounded_guarantee = {}\noriginal_guarantee = {}\n",
            self.case,
            join_ids(self.removal.iter().copied()),
            self.cost,
            self.rounded_value,
            self.original_value,
            nu,
            self.rounded_guarantee,
            self.original_guarantee,
        )
    }

    pub fn parse(text: &str) -> Result<Self, ReportError> {
        let mut case = None;
        let mut removal = None;
        let mut nu_star = None;
        let mut numbers: [Option<u64>; 5] = [None; 5];
        const NUMBERS: [&str; 5] = [
            "cost",
            "rounded_value",
            "original_value",
            "rounded_guarantee",
            "original_guarantee",
        ];
        for (line, content) in content_lines(text) {
            let (key, value) = content.split_once('=').ok_or(ReportError::Malformed(line))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || ReportError::BadValue {
                line,
                key: key.to_string(),
            };
            match key {
                "case" => case = Some(parse_case(value).ok_or_else(bad)?),
                "removal" => removal = Some(parse_edge_ids(value).map_err(|_| bad())?),
                "nu_star" => {
                    nu_star = Some(match value {
                        "none" => None,
                        v => Some(parse_fraction(v).ok_or_else(bad)?),
                    })
                }
                _ => match NUMBERS.iter().position(|&k| k == key) {
                    Some(i) => numbers[i] = Some(int(value).ok_or_else(bad)?),
                    None => {
                        return Err(ReportError::UnknownKey {
                            line,
                            key: key.to_string(),
                        })
                    }
                },
            }
        }
        let number = |i: usize| numbers[i].ok_or(ReportError::Missing(NUMBERS[i]));
        Ok(Self {
            case: case.ok_or(ReportError::Missing("case"))?,
            removal: removal.ok_or(ReportError::Missing("removal"))?,
            nu_star: nu_star.ok_or(ReportError::Missing("nu_star"))?,
            cost: number(0)?,
            rounded_value: number(1)?,
            original_value: number(2)?,
            rounded_guarantee: number(3)?,
            original_guarantee: number(4)?,
        })
    }

    /// Recomputes cost and both MST values of the removal on `instance`.
    pub fn check(&self, instance: &Instance) -> Result<(), ReportError> {
        let m = instance.edge_count();
        if let Some(&id) = self.removal.iter().find(|&&id| id >= m) {
            return Err(ReportError::UnknownEdge(id));
        }
        let removal = crate::graph::EdgeSet::from_ids(m, self.removal.iter().copied());
        let kept = instance.all_edges().difference(&removal);
        let (rounded, _) = round_weights(instance);
        let actual = [
            ("cost", self.cost, instance.cost(&removal)),
            (
                "rounded_value",
                self.rounded_value,
                mst_weight(&rounded, &kept).map_err(|_| ReportError::Disconnects)?,
            ),
            (
                "original_value",
                self.original_value,
                mst_weight(instance, &kept).map_err(|_| ReportError::Disconnects)?,
            ),
        ];
        for (key, reported, actual) in actual {
            if reported != actual {
                return Err(ReportError::Mismatch { key, reported, actual });
            }
        }
        Ok(())
    }
}

/// How the generator sets the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetPolicy {
    Fixed(u64),
    /// `⌊num/den · total interdictable cost⌋`, at least 1.
    Fraction { num: u64, den: u64 },
}

/// How the generator places its first `n - 1` edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TreePolicy {
    /// Every edge has uniformly random endpoints.
    #[default]
    None,
    /// The first `n - 1` edges form a random spanning tree.
    Spanning,
    /// As `Spanning`, with the tree edges non-interdictable.
    FixedSpanning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorParams {
    pub n: usize,
    pub m: usize,
    pub max_weight: u64,
    pub max_cost: u64,
    pub budget: BudgetPolicy,
    pub tree: TreePolicy,
}

/// A seeded random multigraph. Identical inputs give identical instances.
pub fn generate(seed: u64, params: &GeneratorParams) -> Instance {
    let GeneratorParams {
        n,
        m,
        max_weight,
        max_cost,
        budget,
        tree,
    } = *params;
    assert!(n >= 2 && m + 1 >= n && max_cost >= 1, "need n ≥ 2, m ≥ n - 1 and max_cost ≥ 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree_edges = if tree == TreePolicy::None { 0 } else { n - 1 };
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let (u, v) = if i < tree_edges {
            (rng.gen_range(0..=i), i + 1)
        } else {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n - 1);
            (u, if v >= u { v + 1 } else { v })
        };
        let weight = rng.gen_range(0..=max_weight);
        let cost = rng.gen_range(1..=max_cost);
        edges.push(if i < tree_edges && tree == TreePolicy::FixedSpanning {
            Edge::fixed(u, v, weight)
        } else {
            Edge::new(u, v, weight, cost)
        });
    }
    let total: u64 = edges.iter().filter_map(|e| e.cost).sum();
    let budget = match budget {
        BudgetPolicy::Fixed(b) => b,
        BudgetPolicy::Fraction { num, den } => total * num / den,
    }
    .max(1);
    Instance::new(n, edges, budget).expect("generated edges are valid")
}
