//! Reveal traces (the sequence of revealed graphs) and component tracking.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::perm::{NodeId, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Cliques,
    Lines,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Cliques => "cliques",
            Model::Lines => "lines",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cliques" => Ok(Model::Cliques),
            "lines" => Ok(Model::Lines),
            other => Err(format!("unknown model {other:?} (expected cliques or lines)")),
        }
    }
}

/// One reveal: the components containing `u` and `v` merge. For lines this
/// is the new edge `u -- v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RevealEvent {
    pub u: NodeId,
    pub v: NodeId,
}

impl RevealEvent {
    pub fn new(u: NodeId, v: NodeId) -> Self {
        RevealEvent { u, v }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevealTrace {
    pub model: Model,
    pub n: usize,
    pub pi0: Permutation,
    pub events: Vec<RevealEvent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidationReason {
    #[error("pi0 has {actual} nodes but n = {n}")]
    NodeCountMismatch { n: usize, actual: usize },
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("event joins node {0} with itself")]
    DuplicateNode(NodeId),
    #[error("nodes {0} and {1} are already in the same component")]
    SameComponent(NodeId, NodeId),
    #[error("node {0} is not an endpoint of its path")]
    NotEndpoint(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidationError {
    /// First offending event; `None` for trace-level problems.
    pub index: Option<usize>,
    pub reason: ValidationReason,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "invalid event {i}: {}", self.reason),
            None => write!(f, "invalid trace: {}", self.reason),
        }
    }
}

impl RevealTrace {
    /// Builds a trace and validates it.
    pub fn new(model: Model, pi0: Permutation, events: Vec<RevealEvent>) -> Result<Self> {
        let t = RevealTrace {
            model,
            n: pi0.len(),
            pi0,
            events,
        };
        validate_trace(&t)?;
        Ok(t)
    }

    /// Number of events `k`.
    pub fn k(&self) -> usize {
        self.events.len()
    }

    /// Canonical text form.
    pub fn emit(&self) -> String {
        emit_trace(self)
    }
}

impl FromStr for RevealTrace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_trace(s)
    }
}

pub type CompId = usize;

/// Connected components of the revealed graph.
///
/// Component ids are the ids of surviving representatives; a merge keeps the
/// id of the larger side and relabels the smaller. For lines the member list
/// of a component is its path order, endpoint to endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPartition {
    model: Model,
    component_of: Vec<CompId>,
    members: Vec<Vec<NodeId>>,
    count: usize,
}

/// What a merge did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MergeOutcome {
    /// Component of `u` before the merge.
    pub x: CompId,
    /// Component of `v` before the merge.
    pub z: CompId,
    /// Id of the merged component.
    pub merged: CompId,
}

impl ComponentPartition {
    pub fn singletons(n: usize, model: Model) -> Self {
        ComponentPartition {
            model,
            component_of: (0..n).collect(),
            members: (0..n).map(|v| vec![v]).collect(),
            count: n,
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn n(&self) -> usize {
        self.component_of.len()
    }

    /// Number of components.
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn component_of(&self, v: NodeId) -> CompId {
        self.component_of[v]
    }

    /// Members of `c`; path order for lines.
    pub fn members(&self, c: CompId) -> &[NodeId] {
        &self.members[c]
    }

    /// Path order of `c` (lines only).
    pub fn path_order(&self, c: CompId) -> Option<&[NodeId]> {
        match self.model {
            Model::Lines => Some(&self.members[c]),
            Model::Cliques => None,
        }
    }

    pub fn size(&self, c: CompId) -> usize {
        self.members[c].len()
    }

    /// Live component ids in increasing order.
    pub fn components(&self) -> impl Iterator<Item = CompId> + '_ {
        (0..self.members.len()).filter(move |&c| !self.members[c].is_empty())
    }

    pub fn is_endpoint(&self, v: NodeId) -> bool {
        let m = &self.members[self.component_of[v]];
        m.first() == Some(&v) || m.last() == Some(&v)
    }

    /// Checks that `(u, v)` is a legal reveal without applying it.
    pub fn check(&self, u: NodeId, v: NodeId) -> std::result::Result<(), ValidationReason> {
        let n = self.n();
        for w in [u, v] {
            if w >= n {
                return Err(ValidationReason::NodeOutOfRange(w));
            }
        }
        if u == v {
            return Err(ValidationReason::DuplicateNode(u));
        }
        if self.component_of[u] == self.component_of[v] {
            return Err(ValidationReason::SameComponent(u, v));
        }
        if self.model == Model::Lines {
            for w in [u, v] {
                if !self.is_endpoint(w) {
                    return Err(ValidationReason::NotEndpoint(w));
                }
            }
        }
        Ok(())
    }

    /// Merges the components of `u` and `v`. For lines the merged path is
    /// `u`'s path ending at `u` followed by `v`'s path starting at `v`.
    pub fn merge(&mut self, u: NodeId, v: NodeId) -> std::result::Result<MergeOutcome, ValidationReason> {
        self.check(u, v)?;
        let x = self.component_of[u];
        let z = self.component_of[v];
        let (keep, gone) = if self.members[z].len() > self.members[x].len() {
            (z, x)
        } else {
            (x, z)
        };
        let absorbed = std::mem::take(&mut self.members[gone]);
        for &w in &absorbed {
            self.component_of[w] = keep;
        }
        match self.model {
            Model::Cliques => self.members[keep].extend(absorbed),
            Model::Lines => {
                let kept = std::mem::take(&mut self.members[keep]);
                let (mut left, mut right) = if keep == x {
                    (kept, absorbed)
                } else {
                    (absorbed, kept)
                };
                if left.last() != Some(&u) {
                    left.reverse();
                }
                if right.first() != Some(&v) {
                    right.reverse();
                }
                left.extend(right);
                self.members[keep] = left;
            }
        }
        self.count -= 1;
        Ok(MergeOutcome { x, z, merged: keep })
    }
}

/// Accepts iff every replayed prefix satisfies the model's invariants.
pub fn validate_trace(t: &RevealTrace) -> std::result::Result<(), ValidationError> {
    if t.pi0.len() != t.n {
        return Err(ValidationError {
            index: None,
            reason: ValidationReason::NodeCountMismatch {
                n: t.n,
                actual: t.pi0.len(),
            },
        });
    }
    let mut parts = ComponentPartition::singletons(t.n, t.model);
    for (index, e) in t.events.iter().enumerate() {
        parts
            .merge(e.u, e.v)
            .map_err(|reason| ValidationError {
                index: Some(index),
                reason,
            })?;
    }
    Ok(())
}

/// Components after the first `i` events.
pub fn replay_components(t: &RevealTrace, i: usize) -> Result<ComponentPartition> {
    if i > t.k() {
        return Err(Error::StepOutOfRange {
            index: i,
            events: t.k(),
        });
    }
    let mut parts = ComponentPartition::singletons(t.n, t.model);
    for (index, e) in t.events[..i].iter().enumerate() {
        parts
            .merge(e.u, e.v)
            .map_err(|reason| ValidationError {
                index: Some(index),
                reason,
            })?;
    }
    Ok(parts)
}

pub const TRACE_HEADER: &str = "minla-trace v1";

pub fn emit_trace(t: &RevealTrace) -> String {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    out.push('\n');
    out.push_str(&format!("model: {}\n", t.model));
    out.push_str(&format!("n: {}\n", t.n));
    out.push_str(&format!("pi0: {}\n", t.pi0));
    for e in &t.events {
        out.push_str(&format!("event: {} {}\n", e.u, e.v));
    }
    out
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_nodes(line: usize, s: &str) -> Result<Vec<NodeId>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<NodeId>()
                .map_err(|_| syntax(line, format!("bad node id {tok:?}")))
        })
        .collect()
}

/// Parses the line-based trace format and validates the result.
pub fn parse_trace(text: &str) -> Result<RevealTrace> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, raw.split('#').next().unwrap_or("").trim()))
        .filter(|(_, c)| !c.is_empty());
    let eof = text.lines().count() + 1;

    match lines.next() {
        Some((_, TRACE_HEADER)) => {}
        Some((no, other)) => {
            return Err(syntax(no, format!("expected `{TRACE_HEADER}`, found {other:?}")))
        }
        None => return Err(syntax(eof, "empty trace")),
    }

    let mut expect = |key: &str| -> Result<(usize, String)> {
        let (no, content) = lines
            .next()
            .ok_or_else(|| syntax(eof, format!("missing `{key}:` line")))?;
        let rest = content
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(':'))
            .ok_or_else(|| syntax(no, format!("expected `{key}:`, found {content:?}")))?;
        Ok((no, rest.trim().to_string()))
    };

    let (no, model) = expect("model")?;
    let model: Model = model.parse().map_err(|e: String| syntax(no, e))?;
    let (no, n) = expect("n")?;
    let n: usize = n
        .parse()
        .map_err(|_| syntax(no, format!("bad node count {n:?}")))?;
    let (no, pi0) = expect("pi0")?;
    let pi0 = Permutation::from_order(parse_nodes(no, &pi0)?)
        .map_err(|e| syntax(no, e.to_string()))?;

    let mut events = Vec::new();
    for (no, content) in lines {
        let rest = content
            .strip_prefix("event:")
            .ok_or_else(|| syntax(no, format!("expected `event:`, found {content:?}")))?;
        let nodes = parse_nodes(no, rest)?;
        if nodes.len() != 2 {
            return Err(syntax(
                no,
                format!("event needs two nodes, found {}", nodes.len()),
            ));
        }
        events.push(RevealEvent::new(nodes[0], nodes[1]));
    }

    let t = RevealTrace {
        model,
        n,
        pi0,
        events,
    };
    validate_trace(&t)?;
    Ok(t)
}
