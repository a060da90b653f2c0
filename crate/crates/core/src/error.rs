use std::fmt;

use crate::label::Label;

/// Which chirotope axiom a sign function failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// If `t` lies inside the triangle `xyz` on the positive side of all
    /// three edges, then `xyz` is positively oriented.
    Interiority,
    /// Counterclockwise order around `t`, seen from a ray `ts`, is transitive.
    Transitivity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Interiority => f.write_str("interiority"),
            Axiom::Transitivity => f.write_str("transitivity"),
        }
    }
}

/// Structural rule a chirotope tree broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeViolationKind {
    GroundTooSmall,
    OverlappingGrounds,
    UnknownNode,
    UnknownProxy,
    ProxyNotExtreme,
    ProxyReused,
    SelfLoop,
    Disconnected,
    Cycle,
}

impl fmt::Display for TreeViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TreeViolationKind::GroundTooSmall => "node ground set has fewer than 3 elements",
            TreeViolationKind::OverlappingGrounds => "node ground sets overlap",
            TreeViolationKind::UnknownNode => "edge refers to an unknown node",
            TreeViolationKind::UnknownProxy => "proxy is not in its node's ground set",
            TreeViolationKind::ProxyNotExtreme => "proxy is not extreme in its node",
            TreeViolationKind::ProxyReused => "proxy is used by more than one edge",
            TreeViolationKind::SelfLoop => "edge joins a node to itself",
            TreeViolationKind::Disconnected => "tree is disconnected",
            TreeViolationKind::Cycle => "tree contains a cycle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown label `{0}`")]
    UnknownLabel(Label),
    #[error("label `{0}` appears more than once")]
    RepeatedLabel(Label),
    #[error("invalid label `{0}`: {1}")]
    InvalidLabel(String, &'static str),
    #[error("expected at least {min} elements, got {got}")]
    TooSmall { min: usize, got: usize },
    #[error("{what} of size {size} exceeds the cap of {cap}")]
    SizeCapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("sign {sign} is not +1 or -1 for triple ({a}, {b}, {c})")]
    InvalidSign { a: Label, b: Label, c: Label, sign: i64 },
    #[error("missing sign for triple ({0}, {1}, {2})")]
    MissingSign(Label, Label, Label),
    #[error("{axiom} axiom fails on ({})", join(tuple))]
    AxiomViolation { axiom: Axiom, tuple: Vec<Label> },
    #[error("`{0}` is not an extreme element")]
    NotExtreme(Label),
    #[error("relabeling is not a bijection: {0}")]
    NotBijective(String),
    #[error("ground sets overlap on `{0}`")]
    GroundOverlap(Label),
    #[error("the given set is not a nontrivial module")]
    NotAModule,
    #[error("the given set is not a quasi-module")]
    NotQuasiModule,
    #[error("label `{0}` collides with an existing label")]
    LabelCollision(Label),
    #[error("invalid tree: {kind} ({location})")]
    TreeViolation { kind: TreeViolationKind, location: String },
    #[error("unknown node {0}")]
    UnknownNode(u32),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("rewriting did not terminate within {0} steps")]
    RewriteCeiling(usize),
    #[error("polynomial variables do not match: {0}")]
    VariableMismatch(String),
    #[error("exact division left a nonzero remainder: {0}")]
    DivisionRemainder(String),
    #[error("points {0}, {1}, {2} are collinear")]
    Collinear(Label, Label, Label),
    #[error("no realization found after {attempts} attempts{}", node.map(|n| format!(" at node {n}")).unwrap_or_default())]
    RealizationNotFound { attempts: usize, node: Option<u32> },
    #[error("point realization of node {0} does not match its chirotope")]
    RealizationMismatch(u32),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("{path}: {msg}")]
    Format { path: String, msg: String },
    #[error("record index {index} out of range (database holds {count} records)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("record {0} contains collinear points")]
    CollinearRecord(usize),
    #[error("random generation exhausted its budget of {0} attempts")]
    GenerationBudgetExceeded(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(labels: &[Label]) -> String {
    labels.iter().map(Label::as_str).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
