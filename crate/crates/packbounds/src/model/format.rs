//! Plain-text instance files.
//!
//! One directive per line, `#` starts a comment, blank lines are skipped:
//!
//! ```text
//! d 2
//! container 20 13
//! box 1' 8 7
//! box 4' 6 6 value 3/2
//! edges 1 1'-3' 4'-5'
//! ```
//!
//! `d` must come before anything else; `container` appears exactly once.
//! Rationals are written `p/q` or as plain integers. `edges <i>` lists
//! preset overlaps along the 1-based axis `i`; the directive may repeat and
//! the pairs accumulate. Box ids are free-form except for `-`, whitespace,
//! and `#`, which the syntax reserves.

use super::{Instance, ModelError};
use crate::rational::Rational;
use crate::scales::{EdgePresets, ScaleError};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: malformed rational `{text}`")]
    MalformedRational { line: usize, text: String },
    #[error("line {line}: expected {expected} entries, found {got}")]
    WrongArity {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: bad dimension `{text}`")]
    BadDimension { line: usize, text: String },
    #[error("line {line}: `d` must come before this directive")]
    DimensionFirst { line: usize },
    #[error("line {line}: duplicate `{directive}` directive")]
    DuplicateDirective { line: usize, directive: String },
    #[error("missing `d` directive")]
    MissingDimension,
    #[error("missing `container` directive")]
    MissingContainer,
    #[error("line {line}: box id `{id}` contains a reserved character")]
    BadBoxId { line: usize, id: String },
    #[error("line {line}: duplicate box id `{id}`")]
    DuplicateBoxId { line: usize, id: String },
    #[error("line {line}: trailing tokens after `{directive}`")]
    TrailingTokens { line: usize, directive: String },
    #[error("line {line}: malformed edge `{text}` (expected idA-idB)")]
    MalformedEdge { line: usize, text: String },
    #[error("line {line}: edge references unknown box `{id}`")]
    UnknownEdgeId { line: usize, id: String },
    #[error("line {line}: edge axis `{text}` out of range for dimension {dim}")]
    BadEdgeAxis {
        line: usize,
        text: String,
        dim: usize,
    },
    #[error("line {line}: {source}")]
    Model { line: usize, source: ModelError },
    #[error("line {line}: {source}")]
    Edge { line: usize, source: ScaleError },
}

/// A parsed instance file: the instance itself plus any preset edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub instance: Instance,
    pub edges: EdgePresets,
}

impl InstanceFile {
    /// Wraps an instance with empty presets.
    pub fn plain(instance: Instance) -> Self {
        let edges = EdgePresets::new(instance.dim());
        InstanceFile { instance, edges }
    }
}

struct RawBox {
    line: usize,
    id: String,
    sizes: Vec<Rational>,
    value: Option<Rational>,
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, ParseError> {
    let mut dim: Option<(usize, usize)> = None; // (d, line)
    let mut container: Option<(Vec<Rational>, usize)> = None;
    let mut raw_boxes: Vec<RawBox> = Vec::new();
    let mut raw_edges: Vec<(usize, usize, String, String)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let tokens: Vec<&str> = stripped.split_whitespace().collect();
        let Some(&directive) = tokens.first() else {
            continue;
        };
        match directive {
            "d" => {
                if dim.is_some() {
                    return Err(ParseError::DuplicateDirective {
                        line,
                        directive: "d".into(),
                    });
                }
                if tokens.len() != 2 {
                    return Err(ParseError::BadDimension {
                        line,
                        text: tokens[1..].join(" "),
                    });
                }
                let d = tokens[1].parse::<usize>().ok().filter(|&d| d >= 1).ok_or(
                    ParseError::BadDimension {
                        line,
                        text: tokens[1].to_string(),
                    },
                )?;
                dim = Some((d, line));
            }
            "container" => {
                let (d, _) = dim.ok_or(ParseError::DimensionFirst { line })?;
                if container.is_some() {
                    return Err(ParseError::DuplicateDirective {
                        line,
                        directive: "container".into(),
                    });
                }
                let sides = parse_rationals(&tokens[1..], d, line)?;
                container = Some((sides, line));
            }
            "box" => {
                let (d, _) = dim.ok_or(ParseError::DimensionFirst { line })?;
                let Some(&id) = tokens.get(1) else {
                    return Err(ParseError::WrongArity {
                        line,
                        expected: d,
                        got: 0,
                    });
                };
                if id.contains('-') {
                    return Err(ParseError::BadBoxId {
                        line,
                        id: id.to_string(),
                    });
                }
                if raw_boxes.iter().any(|b| b.id == id) {
                    return Err(ParseError::DuplicateBoxId {
                        line,
                        id: id.to_string(),
                    });
                }
                let rest = &tokens[2..];
                let value_pos = rest.iter().position(|&t| t == "value");
                let size_tokens = &rest[..value_pos.unwrap_or(rest.len())];
                let sizes = parse_rationals(size_tokens, d, line)?;
                let value = match value_pos {
                    None => None,
                    Some(pos) => {
                        let value_tokens = &rest[pos + 1..];
                        if value_tokens.len() != 1 {
                            return Err(ParseError::TrailingTokens {
                                line,
                                directive: "value".into(),
                            });
                        }
                        Some(parse_rational(value_tokens[0], line)?)
                    }
                };
                raw_boxes.push(RawBox {
                    line,
                    id: id.to_string(),
                    sizes,
                    value,
                });
            }
            "edges" => {
                let (d, _) = dim.ok_or(ParseError::DimensionFirst { line })?;
                let Some(&axis_token) = tokens.get(1) else {
                    return Err(ParseError::BadEdgeAxis {
                        line,
                        text: String::new(),
                        dim: d,
                    });
                };
                let axis = axis_token
                    .parse::<usize>()
                    .ok()
                    .filter(|&a| (1..=d).contains(&a))
                    .ok_or(ParseError::BadEdgeAxis {
                        line,
                        text: axis_token.to_string(),
                        dim: d,
                    })?;
                for &pair in &tokens[2..] {
                    let Some((a, b)) = pair.split_once('-') else {
                        return Err(ParseError::MalformedEdge {
                            line,
                            text: pair.to_string(),
                        });
                    };
                    if a.is_empty() || b.is_empty() {
                        return Err(ParseError::MalformedEdge {
                            line,
                            text: pair.to_string(),
                        });
                    }
                    raw_edges.push((line, axis - 1, a.to_string(), b.to_string()));
                }
            }
            other => {
                return Err(ParseError::UnknownDirective {
                    line,
                    directive: other.to_string(),
                });
            }
        }
    }

    let (d, dim_line) = dim.ok_or(ParseError::MissingDimension)?;
    let (container, container_line) = container.ok_or(ParseError::MissingContainer)?;

    let mut box_lines: BTreeMap<String, usize> = BTreeMap::new();
    let mut boxes = Vec::with_capacity(raw_boxes.len());
    for raw in raw_boxes {
        box_lines.insert(raw.id.clone(), raw.line);
        boxes.push(match raw.value {
            Some(v) => super::BoxItem::with_value(raw.id, raw.sizes, v),
            None => super::BoxItem::new(raw.id, raw.sizes),
        });
    }
    let instance = Instance::new(container, boxes).map_err(|source| {
        let line = match &source {
            ModelError::EmptyContainer | ModelError::NonPositiveContainer { .. } => container_line,
            ModelError::WrongArity { id, .. }
            | ModelError::NonPositiveSize { id, .. }
            | ModelError::NegativeValue { id }
            | ModelError::BoxTooLarge { id, .. }
            | ModelError::DuplicateId { id }
            | ModelError::OutsideUnitRange { id, .. } => {
                box_lines.get(id).copied().unwrap_or(dim_line)
            }
        };
        ParseError::Model { line, source }
    })?;

    let mut edges = EdgePresets::new(d);
    for (line, axis, a, b) in raw_edges {
        for id in [&a, &b] {
            if instance.box_by_id(id).is_none() {
                return Err(ParseError::UnknownEdgeId {
                    line,
                    id: id.clone(),
                });
            }
        }
        edges
            .add(axis, &a, &b)
            .map_err(|source| ParseError::Edge { line, source })?;
    }
    Ok(InstanceFile { instance, edges })
}

fn parse_rational(token: &str, line: usize) -> Result<Rational, ParseError> {
    Rational::from_str(token).map_err(|_| ParseError::MalformedRational {
        line,
        text: token.to_string(),
    })
}

fn parse_rationals(tokens: &[&str], expected: usize, line: usize) -> Result<Vec<Rational>, ParseError> {
    if tokens.len() != expected {
        return Err(ParseError::WrongArity {
            line,
            expected,
            got: tokens.len(),
        });
    }
    tokens.iter().map(|t| parse_rational(t, line)).collect()
}

pub fn serialize_instance(file: &InstanceFile) -> String {
    let inst = &file.instance;
    let mut out = String::new();
    let _ = writeln!(out, "d {}", inst.dim());
    let _ = write!(out, "container");
    for side in inst.container() {
        let _ = write!(out, " {side}");
    }
    out.push('\n');
    for b in inst.boxes() {
        let _ = write!(out, "box {}", b.id());
        for s in b.size() {
            let _ = write!(out, " {s}");
        }
        if let Some(v) = b.value() {
            let _ = write!(out, " value {v}");
        }
        out.push('\n');
    }
    for axis in 0..file.edges.dim() {
        let pairs = file.edges.edges(axis);
        if pairs.is_empty() {
            continue;
        }
        let _ = write!(out, "edges {}", axis + 1);
        for (a, b) in pairs {
            let _ = write!(out, " {a}-{b}");
        }
        out.push('\n');
    }
    out
}
