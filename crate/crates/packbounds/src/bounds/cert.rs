//! Self-contained, re-checkable bound certificates.
//!
//! A certificate bundles the claimed kind and value with the instance it
//! refers to and the scale pipeline that produces the value, so a verifier
//! needs nothing but the certificate text.  Scale steps are replayed in
//! order; stretch steps are re-derived from the embedded edge presets, and a
//! claimed stretch factor is accepted whenever it is at least the recomputed
//! one — overestimating the factor only weakens the resulting scale, so the
//! direction of the comparison preserves soundness.
//!
//! The text form is line-oriented like the instance format:
//!
//! ```text
//! certificate
//! kind OPP-infeasibility
//! value 71/65
//! instance
//! d 2
//! container 20 13
//! box 1' 8 7
//! ...
//! edges 1 1'-3' 4'-5'
//! end
//! stretch 1' 1 4/5
//! ```
//!
//! Anything before the `certificate` line is ignored, so a saved report that
//! ends in a certificate block verifies as-is.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::bounds::{
    clique_requirement, okp_relaxation_bound, BoundKind, BoundReport, BoundsError,
};
use crate::dff::{parse_tuple, DffError, DffSpec};
use crate::model::format::{parse_instance, serialize_instance, InstanceFile, ParseError};
use crate::model::{normalize, NormalizedInstance};
use crate::rational::Rational;
use crate::scales::{apply_scale, stretch, ConservativeScale, ScaleError, ScaleKind};

#[derive(Debug, thiserror::Error)]
pub enum CertError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("instance block starting at line {start}: {source}")]
    Instance { start: usize, source: ParseError },
    #[error("missing `{what}` line")]
    Missing { what: &'static str },
    #[error("claimed value {claimed} does not match recomputed value {actual}")]
    ValueMismatch { claimed: Rational, actual: Rational },
    #[error("transformed volume {volume} does not exceed 1; nothing is proven")]
    NotInfeasible { volume: Rational },
    #[error("claimed stretch factor {claimed} for box {id} is below the recomputed factor {actual}")]
    LambdaTooSmall {
        id: String,
        claimed: Rational,
        actual: Rational,
    },
    #[error("stretch factor {lambda} for box {id} lies outside (0, 1]")]
    LambdaOutOfRange { id: String, lambda: Rational },
    #[error("witness scale `{provenance}` has no direct text form; encode its steps explicitly")]
    UnsupportedWitness { provenance: String },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error(transparent)]
    Dff(#[from] DffError),
}

/// One stage of the scale pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleStep {
    /// Apply one dual feasible function per axis.
    Dffs(Vec<DffSpec>),
    /// Grow `box_id` along `axis` by `1 - lambda`.
    Stretch {
        box_id: String,
        axis: usize,
        lambda: Rational,
    },
}

/// A claimed bound together with everything needed to re-check it.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub kind: BoundKind,
    pub value: Rational,
    pub family: Option<String>,
    pub params: Vec<(String, Rational)>,
    pub instance: InstanceFile,
    pub steps: Vec<ScaleStep>,
}

impl Certificate {
    pub fn new(
        kind: BoundKind,
        value: Rational,
        instance: InstanceFile,
        steps: Vec<ScaleStep>,
    ) -> Self {
        Certificate {
            kind,
            value,
            family: None,
            params: Vec::new(),
            instance,
            steps,
        }
    }

    /// Wraps a bound report over `instance` into a certificate.  Only
    /// witnesses built from dual feasible functions serialize this way;
    /// stretch-based scales are encoded as explicit steps instead.
    pub fn from_report(instance: InstanceFile, report: &BoundReport) -> Result<Self, CertError> {
        let steps = match report.witness.scale.kind() {
            ScaleKind::Dffs(dffs) => vec![ScaleStep::Dffs(dffs.clone())],
            ScaleKind::Table(_) => {
                return Err(CertError::UnsupportedWitness {
                    provenance: report.witness.scale.provenance().to_string(),
                })
            }
        };
        Ok(Certificate {
            kind: report.kind.clone(),
            value: report.value.clone(),
            family: report.witness.family.map(|s| s.to_string()),
            params: report
                .witness
                .params
                .iter()
                .map(|(n, v)| (n.to_string(), v.clone()))
                .collect(),
            instance,
            steps,
        })
    }

    /// Replays the scale pipeline and checks the claimed value, returning the
    /// recomputed value on success.
    pub fn verify(&self) -> Result<Rational, CertError> {
        let mut cur = normalize(&self.instance.instance);
        for step in &self.steps {
            cur = apply_step(&cur, &self.instance, step)?;
        }
        let actual = match &self.kind {
            BoundKind::Spp => cur.total_volume(),
            BoundKind::OppInfeasibility => {
                let volume = cur.total_volume();
                if volume <= Rational::one() {
                    return Err(CertError::NotInfeasible { volume });
                }
                volume
            }
            BoundKind::Obpp => Rational::from_bigint(cur.total_volume().ceil()),
            BoundKind::Okp => {
                okp_relaxation_bound(&cur, &ConservativeScale::identity(cur.dim()))?
            }
            BoundKind::Clique { axis, ids } => {
                let ids: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
                let need = clique_requirement(
                    &cur,
                    &ids,
                    &ConservativeScale::identity(cur.dim()),
                    *axis,
                )?;
                Rational::from_int(need)
            }
        };
        if actual != self.value {
            return Err(CertError::ValueMismatch {
                claimed: self.value.clone(),
                actual,
            });
        }
        Ok(actual)
    }
}

fn apply_step(
    cur: &NormalizedInstance,
    file: &InstanceFile,
    step: &ScaleStep,
) -> Result<NormalizedInstance, CertError> {
    match step {
        ScaleStep::Dffs(dffs) => {
            let scale = ConservativeScale::from_dffs(dffs.clone());
            Ok(apply_scale(cur, &scale)?)
        }
        ScaleStep::Stretch {
            box_id,
            axis,
            lambda,
        } => {
            if !lambda.is_positive() || *lambda > Rational::one() {
                return Err(CertError::LambdaOutOfRange {
                    id: box_id.clone(),
                    lambda: lambda.clone(),
                });
            }
            let outcome = stretch(cur, &file.edges, box_id, *axis)?;
            // `outcome.lambda` is the recomputed factor (an upper bound for
            // the true maximum when not exact); any claimed factor at least
            // as large still yields a conservative scale.
            if *lambda < outcome.lambda {
                return Err(CertError::LambdaTooSmall {
                    id: box_id.clone(),
                    claimed: lambda.clone(),
                    actual: outcome.lambda,
                });
            }
            let slack = Rational::one() - lambda;
            let boxes = cur
                .boxes()
                .iter()
                .map(|b| {
                    if b.id() == box_id {
                        let mut size = b.size().to_vec();
                        size[*axis] = &size[*axis] + &slack;
                        b.resized(size)
                    } else {
                        b.clone()
                    }
                })
                .collect();
            Ok(NormalizedInstance::new(cur.dim(), boxes)
                .expect("stretched size stays within [0, 1] because lambda >= the box width"))
        }
    }
}

// ---------------------------------------------------------------------------
// Text form.
// ---------------------------------------------------------------------------

impl FromStr for BoundKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SPP" => Ok(BoundKind::Spp),
            "OBPP" => Ok(BoundKind::Obpp),
            "OKP" => Ok(BoundKind::Okp),
            "OPP-infeasibility" => Ok(BoundKind::OppInfeasibility),
            "clique" => Ok(BoundKind::Clique {
                axis: 0,
                ids: Vec::new(),
            }),
            other => Err(format!("unknown certificate kind `{other}`")),
        }
    }
}

/// Renders a certificate in the line-oriented text form.
pub fn serialize_certificate(cert: &Certificate) -> String {
    let mut out = String::from("certificate\n");
    let _ = writeln!(out, "kind {}", cert.kind);
    let _ = writeln!(out, "value {}", cert.value);
    if let Some(family) = &cert.family {
        let _ = writeln!(out, "family {family}");
    }
    for (name, value) in &cert.params {
        let _ = writeln!(out, "param {name} {value}");
    }
    out.push_str("instance\n");
    out.push_str(&serialize_instance(&cert.instance));
    out.push_str("end\n");
    for step in &cert.steps {
        match step {
            ScaleStep::Dffs(dffs) => {
                let text = dffs
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()
                    .join(", ");
                let _ = writeln!(out, "scale ({text})");
            }
            ScaleStep::Stretch {
                box_id,
                axis,
                lambda,
            } => {
                let _ = writeln!(out, "stretch {box_id} {} {lambda}", axis + 1);
            }
        }
    }
    if let BoundKind::Clique { axis, ids } = &cert.kind {
        let _ = writeln!(out, "clique {} {}", axis + 1, ids.join(" "));
    }
    out
}

fn bad(line: usize, reason: impl Into<String>) -> CertError {
    CertError::Malformed {
        line,
        reason: reason.into(),
    }
}

fn parse_rational(line: usize, text: &str) -> Result<Rational, CertError> {
    Rational::from_str(text).map_err(|e| bad(line, format!("bad rational `{text}`: {e}")))
}

fn parse_axis(line: usize, text: &str, dim: usize) -> Result<usize, CertError> {
    let shown: usize = text
        .parse()
        .map_err(|_| bad(line, format!("bad dimension index `{text}`")))?;
    if shown == 0 || shown > dim {
        return Err(bad(
            line,
            format!("dimension index {shown} out of range 1..={dim}"),
        ));
    }
    Ok(shown - 1)
}

/// Parses the text form.  Lines before the `certificate` header are ignored;
/// `#` starts a comment anywhere.
pub fn parse_certificate(text: &str) -> Result<Certificate, CertError> {
    let mut kind: Option<(usize, BoundKind)> = None;
    let mut value: Option<Rational> = None;
    let mut family: Option<String> = None;
    let mut params: Vec<(String, Rational)> = Vec::new();
    let mut instance: Option<InstanceFile> = None;
    let mut steps: Vec<ScaleStep> = Vec::new();
    let mut clique: Option<(usize, usize, Vec<String>)> = None;

    let mut lines = text.lines().enumerate().peekable();
    // Skip the preamble.
    let mut seen_header = false;
    for (_, raw) in lines.by_ref() {
        if strip_comment(raw).trim() == "certificate" {
            seen_header = true;
            break;
        }
    }
    if !seen_header {
        return Err(CertError::Missing {
            what: "certificate",
        });
    }

    while let Some((idx, raw)) = lines.next() {
        let line = idx + 1;
        let stripped = strip_comment(raw);
        let mut tokens = stripped.split_whitespace();
        let Some(head) = tokens.next() else { continue };
        match head {
            "kind" => {
                if kind.is_some() {
                    return Err(bad(line, "duplicate kind"));
                }
                let rest = tokens.collect::<Vec<_>>().join(" ");
                let parsed = BoundKind::from_str(&rest).map_err(|e| bad(line, e))?;
                kind = Some((line, parsed));
            }
            "value" => {
                if value.is_some() {
                    return Err(bad(line, "duplicate value"));
                }
                let text = tokens
                    .next()
                    .ok_or_else(|| bad(line, "value needs a rational"))?;
                if tokens.next().is_some() {
                    return Err(bad(line, "trailing tokens after value"));
                }
                value = Some(parse_rational(line, text)?);
            }
            "family" => {
                let name = tokens
                    .next()
                    .ok_or_else(|| bad(line, "family needs a name"))?;
                family = Some(name.to_string());
            }
            "param" => {
                let name = tokens
                    .next()
                    .ok_or_else(|| bad(line, "param needs a name"))?;
                let text = tokens
                    .next()
                    .ok_or_else(|| bad(line, "param needs a rational"))?;
                params.push((name.to_string(), parse_rational(line, text)?));
            }
            "instance" => {
                if instance.is_some() {
                    return Err(bad(line, "duplicate instance block"));
                }
                let start = line;
                let mut block = String::new();
                let mut closed = false;
                for (_, raw) in lines.by_ref() {
                    if strip_comment(raw).trim() == "end" {
                        closed = true;
                        break;
                    }
                    block.push_str(raw);
                    block.push('\n');
                }
                if !closed {
                    return Err(bad(start, "instance block is missing its `end` line"));
                }
                let parsed =
                    parse_instance(&block).map_err(|source| CertError::Instance { start, source })?;
                instance = Some(parsed);
            }
            "scale" => {
                let rest = stripped.trim_start();
                let rest = rest["scale".len()..].trim();
                let dffs = parse_tuple(rest)?;
                steps.push(ScaleStep::Dffs(dffs));
            }
            "stretch" => {
                let box_id = tokens
                    .next()
                    .ok_or_else(|| bad(line, "stretch needs a box id"))?;
                let axis_text = tokens
                    .next()
                    .ok_or_else(|| bad(line, "stretch needs a dimension index"))?;
                let lambda_text = tokens
                    .next()
                    .ok_or_else(|| bad(line, "stretch needs a factor"))?;
                if tokens.next().is_some() {
                    return Err(bad(line, "trailing tokens after stretch"));
                }
                let dim = instance
                    .as_ref()
                    .map(|f| f.instance.dim())
                    .ok_or_else(|| bad(line, "stretch must follow the instance block"))?;
                steps.push(ScaleStep::Stretch {
                    box_id: box_id.to_string(),
                    axis: parse_axis(line, axis_text, dim)?,
                    lambda: parse_rational(line, lambda_text)?,
                });
            }
            "clique" => {
                if clique.is_some() {
                    return Err(bad(line, "duplicate clique line"));
                }
                let axis_text = tokens
                    .next()
                    .ok_or_else(|| bad(line, "clique needs a dimension index"))?;
                let dim = instance
                    .as_ref()
                    .map(|f| f.instance.dim())
                    .ok_or_else(|| bad(line, "clique must follow the instance block"))?;
                let axis = parse_axis(line, axis_text, dim)?;
                let ids: Vec<String> = tokens.map(|s| s.to_string()).collect();
                if ids.is_empty() {
                    return Err(bad(line, "clique needs at least one box id"));
                }
                clique = Some((line, axis, ids));
            }
            other => return Err(bad(line, format!("unknown directive `{other}`"))),
        }
    }

    let (kind_line, mut kind) = kind.ok_or(CertError::Missing { what: "kind" })?;
    let value = value.ok_or(CertError::Missing { what: "value" })?;
    let instance = instance.ok_or(CertError::Missing { what: "instance" })?;
    match (&mut kind, clique) {
        (BoundKind::Clique { axis, ids }, Some((_, a, list))) => {
            *axis = a;
            *ids = list;
        }
        (BoundKind::Clique { .. }, None) => {
            return Err(bad(kind_line, "kind clique needs a `clique` line"));
        }
        (_, Some((line, _, _))) => {
            return Err(bad(line, "clique line without kind clique"));
        }
        (_, None) => {}
    }
    Ok(Certificate {
        kind,
        value,
        family,
        params,
        instance,
        steps,
    })
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}
