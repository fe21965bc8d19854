//! The six Markov random field models: potentials, Hamiltonian evaluation and
//! random sign tuples for the two satisfiability models.
//!
//! Conventions:
//! - Alphabet is `{0..q-1}`; Ising uses `{0,1}` with field `+B` on value 1 and
//!   `-B` on value 0, and edge potential `+beta` on unequal endpoints.
//! - A K-SAT clause with sign tuple `a` is violated exactly when `x_e == a`.
//!   A NAE clause is violated when `x_e == a` or `x_e == complement(a)`.
//! - Undirected models evaluate their symmetric potential on the ordered tuple,
//!   so an edge `(i, i)` is evaluated literally on `(x_i, x_i)`.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{content_lines, parse_numbers, Hyperedge, Hypergraph};
use crate::rng::{rng_from_seed, Rng};

pub const INSTANCE_FORMAT: &str = "# sparse-interp instance v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    IndependentSet,
    MaxCut,
    Ising,
    Coloring,
    Ksat,
    NaeKsat,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::IndependentSet,
        ModelKind::MaxCut,
        ModelKind::Ising,
        ModelKind::Coloring,
        ModelKind::Ksat,
        ModelKind::NaeKsat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::IndependentSet => "independent_set",
            ModelKind::MaxCut => "max_cut",
            ModelKind::Ising => "ising",
            ModelKind::Coloring => "coloring",
            ModelKind::Ksat => "ksat",
            ModelKind::NaeKsat => "nae_ksat",
        }
    }

    /// Accepts the canonical names plus short command-line aliases.
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "independent_set" | "is" | "indset" => ModelKind::IndependentSet,
            "max_cut" | "maxcut" => ModelKind::MaxCut,
            "ising" => ModelKind::Ising,
            "coloring" | "colouring" | "col" => ModelKind::Coloring,
            "ksat" | "k_sat" | "sat" => ModelKind::Ksat,
            "nae_ksat" | "nae" | "naeksat" => ModelKind::NaeKsat,
            other => return Err(invalid(format!("unknown model `{other}`"))),
        })
    }

    /// Models whose edge potentials are 0/1 and whose satisfiability is `H = |E|`.
    pub fn is_csp(self) -> bool {
        matches!(self, ModelKind::Coloring | ModelKind::Ksat | ModelKind::NaeKsat)
    }

    pub fn has_signs(self) -> bool {
        matches!(self, ModelKind::Ksat | ModelKind::NaeKsat)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub q: usize,
    pub k: usize,
    pub beta: f64,
    pub field: f64,
}

impl ModelSpec {
    pub fn independent_set() -> Self {
        ModelSpec { kind: ModelKind::IndependentSet, q: 2, k: 2, beta: 0.0, field: 0.0 }
    }

    pub fn max_cut() -> Self {
        ModelSpec { kind: ModelKind::MaxCut, q: 2, k: 2, beta: 0.0, field: 0.0 }
    }

    pub fn ising(beta: f64, field: f64) -> Self {
        ModelSpec { kind: ModelKind::Ising, q: 2, k: 2, beta, field }
    }

    pub fn coloring(q: usize) -> Self {
        ModelSpec { kind: ModelKind::Coloring, q, k: 2, beta: 0.0, field: 0.0 }
    }

    pub fn ksat(k: usize) -> Self {
        ModelSpec { kind: ModelKind::Ksat, q: 2, k, beta: 0.0, field: 0.0 }
    }

    pub fn nae_ksat(k: usize) -> Self {
        ModelSpec { kind: ModelKind::NaeKsat, q: 2, k, beta: 0.0, field: 0.0 }
    }

    /// Spec with default parameters for `kind` (Ising: beta 1, B 0; coloring q = 3; SAT K = 3).
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::IndependentSet => Self::independent_set(),
            ModelKind::MaxCut => Self::max_cut(),
            ModelKind::Ising => Self::ising(1.0, 0.0),
            ModelKind::Coloring => Self::coloring(3),
            ModelKind::Ksat => Self::ksat(3),
            ModelKind::NaeKsat => Self::nae_ksat(3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ModelKind::Coloring => {
                if self.q < 2 {
                    return Err(invalid(format!("coloring needs q >= 2, got {}", self.q)));
                }
                if self.k != 2 {
                    return Err(invalid("coloring is defined for K = 2"));
                }
            }
            ModelKind::Ksat | ModelKind::NaeKsat => {
                if self.q != 2 {
                    return Err(invalid(format!("{} needs q = 2", self.kind)));
                }
                if self.k < 2 || self.k > 16 {
                    return Err(invalid(format!("{} needs 2 <= K <= 16, got {}", self.kind, self.k)));
                }
            }
            _ => {
                if self.q != 2 {
                    return Err(invalid(format!("{} needs q = 2", self.kind)));
                }
                if self.k != 2 {
                    return Err(invalid(format!("{} is defined for K = 2", self.kind)));
                }
            }
        }
        if self.kind == ModelKind::Ising && !(self.beta > 0.0 && self.beta.is_finite() && self.field.is_finite()) {
            return Err(invalid("Ising needs beta > 0 and finite B"));
        }
        Ok(())
    }

    /// Maximum change of the ground state under one edge edit.
    pub fn lipschitz(&self) -> f64 {
        if self.kind == ModelKind::Ising {
            self.beta
        } else {
            1.0
        }
    }

    pub fn node_value(&self, v: u8) -> f64 {
        match self.kind {
            ModelKind::IndependentSet => f64::from(v),
            ModelKind::Ising => {
                if v == 1 {
                    self.field
                } else {
                    -self.field
                }
            }
            _ => 0.0,
        }
    }

    pub fn node_value_max(&self) -> f64 {
        match self.kind {
            ModelKind::IndependentSet => 1.0,
            ModelKind::Ising => self.field.abs(),
            _ => 0.0,
        }
    }

    /// Edge potential on a tuple of values; `sign` is the packed sign tuple
    /// (bit `p` is `a_p`) and is ignored by the deterministic models.
    pub fn edge_value(&self, sign: u32, values: &[u8]) -> f64 {
        match self.kind {
            ModelKind::IndependentSet => {
                if values.iter().all(|&v| v == 1) {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            }
            ModelKind::MaxCut | ModelKind::Coloring => {
                if values.iter().all(|&v| v == values[0]) {
                    0.0
                } else {
                    1.0
                }
            }
            ModelKind::Ising => {
                if values.iter().all(|&v| v == values[0]) {
                    -self.beta
                } else {
                    self.beta
                }
            }
            ModelKind::Ksat | ModelKind::NaeKsat => {
                let pattern = pack_bits(values);
                if self.pattern_violates(sign, pattern) {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    /// For 0/1 SAT potentials: is the packed value pattern a violation of `sign`?
    pub(crate) fn pattern_violates(&self, sign: u32, pattern: u32) -> bool {
        let full = (1u32 << self.k) - 1;
        match self.kind {
            ModelKind::Ksat => pattern == sign,
            ModelKind::NaeKsat => pattern == sign || pattern == sign ^ full,
            _ => unreachable!("only for SAT models"),
        }
    }

    pub fn edge_value_max(&self) -> f64 {
        match self.kind {
            ModelKind::IndependentSet => 0.0,
            ModelKind::Ising => self.beta,
            _ => 1.0,
        }
    }

    pub fn edge_value_min(&self) -> f64 {
        match self.kind {
            ModelKind::IndependentSet => f64::NEG_INFINITY,
            ModelKind::Ising => -self.beta,
            _ => 0.0,
        }
    }

    /// Number of sign tuples a fresh edge draws from (1 for deterministic models).
    pub fn sign_count(&self) -> u32 {
        if self.kind.has_signs() {
            1 << self.k
        } else {
            1
        }
    }

    pub(crate) fn random_sign(&self, rng: &mut Rng) -> u32 {
        if self.kind.has_signs() {
            rng.gen_range(0..(1u32 << self.k))
        } else {
            0
        }
    }

    fn header_line(&self) -> String {
        format!("model {} {} {} {} {}", self.kind.name(), self.q, self.k, self.beta, self.field)
    }
}

pub(crate) fn pack_bits(values: &[u8]) -> u32 {
    values.iter().enumerate().fold(0u32, |acc, (p, &v)| acc | (u32::from(v & 1) << p))
}

/// Ground-state values and Hamiltonian values: a finite real or minus infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    NegInf,
    Finite(f64),
}

impl Value {
    pub fn from_f64(v: f64) -> Self {
        if v == f64::NEG_INFINITY {
            Value::NegInf
        } else {
            Value::Finite(v)
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Value::NegInf => f64::NEG_INFINITY,
            Value::Finite(v) => v,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Value::Finite(_))
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.as_f64().partial_cmp(&other.as_f64())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::NegInf => f.write_str("-inf"),
            Value::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::NegInf => s.serialize_str("-inf"),
            Value::Finite(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Value::Finite(v)),
            Raw::Str(s) if s == "-inf" => Ok(Value::NegInf),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad value `{s}`"))),
        }
    }
}

/// Per-edge random potential data, index-aligned with the edge list.
/// Empty for the four deterministic models.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PotentialAssignment {
    signs: Vec<u32>,
}

impl PotentialAssignment {
    pub fn none() -> Self {
        PotentialAssignment { signs: Vec::new() }
    }

    pub fn from_packed(signs: Vec<u32>) -> Self {
        PotentialAssignment { signs }
    }

    /// Sign tuples as explicit bit vectors.
    pub fn tuples(&self, k: usize) -> Vec<Vec<u8>> {
        self.signs.iter().map(|&s| (0..k).map(|p| ((s >> p) & 1) as u8).collect()).collect()
    }

    pub fn packed(&self) -> &[u32] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }
}

/// A hypergraph with a model and its edge potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    graph: Hypergraph,
    spec: ModelSpec,
    potentials: PotentialAssignment,
}

impl Instance {
    pub fn new(graph: Hypergraph, spec: ModelSpec, potentials: PotentialAssignment) -> Result<Self> {
        spec.validate()?;
        if graph.arity() != spec.k {
            return Err(Error::ArityMismatch { expected: spec.k, found: graph.arity() });
        }
        let expected = if spec.kind.has_signs() { graph.n_edges() } else { 0 };
        if potentials.len() != expected {
            return Err(invalid(format!(
                "{} potentials supplied for {} edges of a {} instance",
                potentials.len(),
                graph.n_edges(),
                spec.kind
            )));
        }
        if potentials.signs.iter().any(|&s| s >= 1 << spec.k) {
            return Err(invalid("sign tuple wider than K"));
        }
        Ok(Instance { graph, spec, potentials })
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn potentials(&self) -> &PotentialAssignment {
        &self.potentials
    }

    pub fn n_nodes(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn sign(&self, edge: usize) -> u32 {
        self.potentials.signs.get(edge).copied().unwrap_or(0)
    }

    /// Adds an edge with packed sign `sign` (ignored for deterministic models).
    pub fn with_edge(&self, e: Hyperedge, sign: u32) -> Result<Instance> {
        let graph = self.graph.with_edge(e)?;
        let mut potentials = self.potentials.clone();
        if self.spec.kind.has_signs() {
            potentials.signs.push(sign);
        }
        Instance::new(graph, self.spec, potentials)
    }

    /// First `m` edges with their potentials.
    pub fn truncated(&self, m: usize) -> Instance {
        let graph = self.graph.truncated(m);
        let mut potentials = self.potentials.clone();
        potentials.signs.truncate(graph.n_edges());
        Instance { graph, spec: self.spec, potentials }
    }

    /// Unchecked Hamiltonian on a value slice of length N with entries < q.
    pub(crate) fn eval_raw(&self, x: &[u8]) -> f64 {
        let mut h = 0.0;
        for &v in x {
            h += self.spec.node_value(v);
        }
        let mut buf = [0u8; 16];
        for (idx, e) in self.graph.edges().iter().enumerate() {
            let k = e.arity();
            for (p, &node) in e.nodes().iter().enumerate() {
                buf[p] = x[node as usize];
            }
            h += self.spec.edge_value(self.sign(idx), &buf[..k]);
            if h == f64::NEG_INFINITY {
                return h;
            }
        }
        h
    }

    /// Serializes to the instance text format: hypergraph body plus a model
    /// header and, for SAT models, one sign line per edge.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(INSTANCE_FORMAT);
        s.push('\n');
        s.push_str(&self.spec.header_line());
        s.push('\n');
        self.graph.write_body(&mut s);
        if self.spec.kind.has_signs() {
            s.push_str("signs\n");
            for t in self.potentials.tuples(self.spec.k) {
                let line: Vec<String> = t.iter().map(|b| b.to_string()).collect();
                let _ = writeln!(s, "{}", line.join(" "));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (ln, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty instance".into() })?;
        let spec = parse_model_line(header, ln)?;
        let graph = Hypergraph::read_body(&mut lines)?;
        let mut signs = Vec::new();
        if spec.kind.has_signs() {
            let (ln, tag) = lines.next().ok_or(Error::Parse { line: ln, msg: "missing `signs` section".into() })?;
            if tag != "signs" {
                return Err(Error::Parse { line: ln, msg: "expected `signs`".into() });
            }
            for _ in 0..graph.n_edges() {
                let (ln, line) = lines.next().ok_or(Error::Parse { line: ln, msg: "missing sign line".into() })?;
                let bits = parse_numbers(line, ln)?;
                if bits.len() != spec.k || bits.iter().any(|&b| b > 1) {
                    return Err(Error::Parse { line: ln, msg: format!("sign line must hold {} bits", spec.k) });
                }
                let bytes: Vec<u8> = bits.iter().map(|&b| b as u8).collect();
                signs.push(pack_bits(&bytes));
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::Parse { line: ln, msg: "trailing content".into() });
        }
        Instance::new(graph, spec, PotentialAssignment { signs })
    }
}

fn parse_model_line(line: &str, ln: usize) -> Result<ModelSpec> {
    let t: Vec<&str> = line.split_whitespace().collect();
    if t.len() != 6 || t[0] != "model" {
        return Err(Error::Parse { line: ln, msg: "expected `model <kind> <q> <K> <beta> <B>`".into() });
    }
    let bad = |what: &str| Error::Parse { line: ln, msg: format!("bad {what}") };
    let spec = ModelSpec {
        kind: ModelKind::parse(t[1]).map_err(|_| bad("model kind"))?,
        q: t[2].parse().map_err(|_| bad("q"))?,
        k: t[3].parse().map_err(|_| bad("K"))?,
        beta: t[4].parse().map_err(|_| bad("beta"))?,
        field: t[5].parse().map_err(|_| bad("B"))?,
    };
    spec.validate().map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?;
    Ok(spec)
}

/// Attaches the model to `graph`, drawing K-SAT/NAE sign tuples uniformly from `seed`.
pub fn build_instance(graph: Hypergraph, spec: ModelSpec, seed: u64) -> Result<Instance> {
    let mut rng = rng_from_seed(seed);
    build_instance_with(graph, spec, &mut rng)
}

pub(crate) fn build_instance_with(graph: Hypergraph, spec: ModelSpec, rng: &mut Rng) -> Result<Instance> {
    spec.validate()?;
    if graph.arity() != spec.k {
        return Err(Error::ArityMismatch { expected: spec.k, found: graph.arity() });
    }
    let signs = if spec.kind.has_signs() {
        (0..graph.n_edges()).map(|_| spec.random_sign(rng)).collect()
    } else {
        Vec::new()
    };
    Ok(Instance { graph, spec, potentials: PotentialAssignment { signs } })
}

/// An assignment of symbols to the N nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<u8>);

/// Hamiltonian `H(x)` of `x` on `instance`.
pub fn evaluate(instance: &Instance, x: &Assignment) -> Result<Value> {
    if x.0.len() != instance.n_nodes() {
        return Err(invalid(format!("assignment has length {}, instance has {} nodes", x.0.len(), instance.n_nodes())));
    }
    if let Some((node, &value)) = x.0.iter().enumerate().find(|(_, &v)| v as usize >= instance.spec.q) {
        return Err(Error::AlphabetViolation { node, value, q: instance.spec.q });
    }
    Ok(Value::from_f64(instance.eval_raw(&x.0)))
}

/// Multiset symmetric difference size between the (edge, potential) lists.
pub fn edge_symmetric_difference(a: &Instance, b: &Instance) -> usize {
    let mut counts: HashMap<(Hyperedge, u32), i64> = HashMap::new();
    for (i, e) in a.graph.edges().iter().enumerate() {
        *counts.entry((e.clone(), a.sign(i))).or_default() += 1;
    }
    for (i, e) in b.graph.edges().iter().enumerate() {
        *counts.entry((e.clone(), b.sign(i))).or_default() -= 1;
    }
    counts.values().map(|c| c.unsigned_abs() as usize).sum()
}
