//! Dual feasible functions.
//!
//! A dual feasible function (DFF) is a map `u: [0,1] -> [0,1]` such that for
//! every finite multiset of sizes `x_i` with `sum x_i <= 1` the images also
//! satisfy `sum u(x_i) <= 1`. Applying a DFF per dimension turns one packing
//! instance into another whose feasible sets can only grow, which is what
//! makes volume arguments on the transformed instance sound (see
//! [`crate::scales`]).
//!
//! Three parametric families are built in, together with the two closure
//! operations (composition and convex combination):
//!
//! * [`DffSpec::UStep`], `u(k)`: keeps `x` whenever `x*(k+1)` is an integer
//!   and otherwise rounds `x*(k+1)` down, dividing by `k`.
//! * [`DffSpec::Threshold`], `U(eps)`: sends sizes above `1-eps` to one,
//!   sizes below `eps` to zero, and keeps the closed middle range as-is.
//! * [`DffSpec::PhiStep`], `phi(eps)`: a step function that is `1/floor(1/eps)`
//!   on `[eps, 1/2]` and climbs to one above `1/2` in steps of the same
//!   height.
//!
//! Every value here is an exact [`Rational`]; feasibility of each family (and
//! of arbitrary specs) can be re-derived from scratch with
//! [`crate::oracle::check_dff`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::model::NormalizedInstance;
use crate::rational::Rational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DffError {
    #[error("argument {x} lies outside [0, 1]")]
    Domain { x: Rational },
    #[error("u(k) requires k >= 1")]
    BadUStep,
    #[error("U(eps) requires eps in [0, 1/2], got {eps}")]
    BadThreshold { eps: Rational },
    #[error("phi(eps) requires eps in (0, 1/2], got {eps}")]
    BadPhiStep { eps: Rational },
    #[error("convex combination needs at least one term")]
    EmptyConvex,
    #[error("convex weights must be nonnegative and sum to 1")]
    BadConvexWeights,
    #[error("malformed dff `{text}`: {msg}")]
    Parse { text: String, msg: String },
}

/// A dual feasible function, closed under composition and convex
/// combination.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DffSpec {
    /// The identity on `[0,1]`.
    Identity,
    /// `u(k)`, `k >= 1`: `x` if `x*(k+1)` is integral, else
    /// `floor(x*(k+1)) / k`.
    UStep(u32),
    /// `U(eps)`, `0 <= eps <= 1/2`: `1` above `1-eps`, `x` on
    /// `[eps, 1-eps]`, `0` below `eps`.
    Threshold(Rational),
    /// `phi(eps)`, `0 < eps <= 1/2`: with `m = floor(1/eps)`, maps
    /// `x > 1/2` to `1 - floor((1-x)/eps)/m`, `x` in `[eps, 1/2]` to `1/m`,
    /// and `x < eps` to `0`.
    PhiStep(Rational),
    /// `compose(f, g)` evaluates `f(g(x))`.
    Compose(Box<DffSpec>, Box<DffSpec>),
    /// `sum w_i * f_i(x)` with nonnegative weights summing to one.
    Convex(Vec<(Rational, DffSpec)>),
}

impl DffSpec {
    pub fn u_step(k: u32) -> Result<Self, DffError> {
        if k == 0 {
            return Err(DffError::BadUStep);
        }
        Ok(DffSpec::UStep(k))
    }

    pub fn threshold(eps: Rational) -> Result<Self, DffError> {
        if eps.is_negative() || eps > Rational::one_half() {
            return Err(DffError::BadThreshold { eps });
        }
        Ok(DffSpec::Threshold(eps))
    }

    pub fn phi_step(eps: Rational) -> Result<Self, DffError> {
        if !eps.is_positive() || eps > Rational::one_half() {
            return Err(DffError::BadPhiStep { eps });
        }
        Ok(DffSpec::PhiStep(eps))
    }

    /// `outer` applied after `inner`.
    pub fn compose(outer: DffSpec, inner: DffSpec) -> Self {
        DffSpec::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn convex(terms: Vec<(Rational, DffSpec)>) -> Result<Self, DffError> {
        if terms.is_empty() {
            return Err(DffError::EmptyConvex);
        }
        if terms.iter().any(|(w, _)| w.is_negative())
            || !terms.iter().map(|(w, _)| w).sum::<Rational>().is_one()
        {
            return Err(DffError::BadConvexWeights);
        }
        Ok(DffSpec::Convex(terms))
    }

    /// Checks parameter domains throughout the spec tree.
    pub fn validate(&self) -> Result<(), DffError> {
        match self {
            DffSpec::Identity => Ok(()),
            DffSpec::UStep(k) => {
                if *k == 0 {
                    Err(DffError::BadUStep)
                } else {
                    Ok(())
                }
            }
            DffSpec::Threshold(eps) => {
                if eps.is_negative() || *eps > Rational::one_half() {
                    Err(DffError::BadThreshold { eps: eps.clone() })
                } else {
                    Ok(())
                }
            }
            DffSpec::PhiStep(eps) => {
                if !eps.is_positive() || *eps > Rational::one_half() {
                    Err(DffError::BadPhiStep { eps: eps.clone() })
                } else {
                    Ok(())
                }
            }
            DffSpec::Compose(outer, inner) => {
                outer.validate()?;
                inner.validate()
            }
            DffSpec::Convex(terms) => {
                if terms.is_empty() {
                    return Err(DffError::EmptyConvex);
                }
                if terms.iter().any(|(w, _)| w.is_negative())
                    || !terms.iter().map(|(w, _)| w).sum::<Rational>().is_one()
                {
                    return Err(DffError::BadConvexWeights);
                }
                for (_, f) in terms {
                    f.validate()?;
                }
                Ok(())
            }
        }
    }

    /// Evaluates the function at `x in [0,1]`, exactly.
    pub fn eval(&self, x: &Rational) -> Result<Rational, DffError> {
        if x.is_negative() || *x > Rational::one() {
            return Err(DffError::Domain { x: x.clone() });
        }
        match self {
            DffSpec::Identity => Ok(x.clone()),
            DffSpec::UStep(k) => {
                if *k == 0 {
                    return Err(DffError::BadUStep);
                }
                let scaled = x * &Rational::from_int(*k as i64 + 1);
                if scaled.is_integer() {
                    Ok(x.clone())
                } else {
                    Ok(Rational::from_bigint(scaled.floor()) / Rational::from_int(*k as i64))
                }
            }
            DffSpec::Threshold(eps) => {
                if eps.is_negative() || *eps > Rational::one_half() {
                    return Err(DffError::BadThreshold { eps: eps.clone() });
                }
                if *x > Rational::one() - eps {
                    Ok(Rational::one())
                } else if x >= eps {
                    Ok(x.clone())
                } else {
                    Ok(Rational::zero())
                }
            }
            DffSpec::PhiStep(eps) => {
                if !eps.is_positive() || *eps > Rational::one_half() {
                    return Err(DffError::BadPhiStep { eps: eps.clone() });
                }
                let m = eps.recip().floor(); // >= 2 because eps <= 1/2
                if *x > Rational::one_half() {
                    let steps = ((Rational::one() - x) / eps).floor();
                    Ok(Rational::one() - Rational::from_big(steps, m))
                } else if x >= eps {
                    Ok(Rational::from_big(1.into(), m))
                } else {
                    Ok(Rational::zero())
                }
            }
            DffSpec::Compose(outer, inner) => outer.eval(&inner.eval(x)?),
            DffSpec::Convex(terms) => {
                if terms.is_empty() {
                    return Err(DffError::EmptyConvex);
                }
                if terms.iter().any(|(w, _)| w.is_negative())
                    || !terms.iter().map(|(w, _)| w).sum::<Rational>().is_one()
                {
                    return Err(DffError::BadConvexWeights);
                }
                let mut acc = Rational::zero();
                for (w, f) in terms {
                    acc = acc + w * &f.eval(x)?;
                }
                Ok(acc)
            }
        }
    }
}

/// The finite parameter set that is sufficient for maximizing the parametric
/// bounds over a given instance and dimension: all sizes `<= 1/2` in that
/// dimension, the complements `1 - w` of sizes `> 1/2` that land in
/// `(0, 1/2]`, the reciprocals `1/t` for `2 <= t <= |V|`, and `1/2` itself.
/// Sorted ascending, deduplicated.
///
/// The step functions used by the bounds only change value at finitely many
/// parameters; this set covers those switch points for desk-scale instances,
/// and the dense-grid comparison in the test suite is the guard that it
/// stays sufficient.
pub fn candidate_params(inst: &NormalizedInstance, axis: usize) -> Vec<Rational> {
    let half = Rational::one_half();
    let mut set = BTreeSet::new();
    for b in inst.boxes() {
        let w = b.size_in(axis);
        if *w > half {
            let c = Rational::one() - w;
            if c.is_positive() {
                set.insert(c);
            }
        } else if w.is_positive() {
            set.insert(w.clone());
        }
    }
    for t in 2..=inst.len() {
        set.insert(Rational::new(1, t as i64));
    }
    set.insert(half);
    set.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Canonical text form: `id`, `u(2)`, `U(1/4)`, `phi(1/3)`,
// `compose(f, g)`, `convex(1/2*f + 1/2*g)`.
// ---------------------------------------------------------------------------

impl fmt::Display for DffSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DffSpec::Identity => write!(f, "id"),
            DffSpec::UStep(k) => write!(f, "u({k})"),
            DffSpec::Threshold(eps) => write!(f, "U({eps})"),
            DffSpec::PhiStep(eps) => write!(f, "phi({eps})"),
            DffSpec::Compose(outer, inner) => write!(f, "compose({outer}, {inner})"),
            DffSpec::Convex(terms) => {
                write!(f, "convex(")?;
                for (i, (w, g)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{w}*{g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for DffSpec {
    type Err = DffError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser::new(s);
        let spec = p.dff()?;
        p.skip_ws();
        if !p.at_end() {
            return Err(p.err("trailing input"));
        }
        Ok(spec)
    }
}

/// Parses a comma-separated tuple of specs wrapped in parentheses:
/// `(u(2), id, phi(1/3))`. A per-dimension scale in text form.
pub fn parse_tuple(s: &str) -> Result<Vec<DffSpec>, DffError> {
    let mut p = Parser::new(s);
    p.skip_ws();
    p.expect('(')?;
    let mut out = vec![p.dff()?];
    loop {
        p.skip_ws();
        if p.eat(',') {
            out.push(p.dff()?);
        } else {
            break;
        }
    }
    p.expect(')')?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    rest: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { text, rest: text }
    }

    fn err(&self, msg: &str) -> DffError {
        DffError::Parse {
            text: self.text.to_string(),
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn at_end(&self) -> bool {
        self.rest.is_empty()
    }

    fn eat(&mut self, c: char) -> bool {
        if let Some(r) = self.rest.strip_prefix(c) {
            self.rest = r;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), DffError> {
        self.skip_ws();
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let end = self
            .rest
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.rest.len());
        let (w, r) = self.rest.split_at(end);
        self.rest = r;
        w
    }

    fn rational(&mut self) -> Result<Rational, DffError> {
        self.skip_ws();
        let end = self
            .rest
            .find(|c: char| !c.is_ascii_digit() && c != '/')
            .unwrap_or(self.rest.len());
        let (tok, r) = self.rest.split_at(end);
        let val = tok
            .parse::<Rational>()
            .map_err(|e| self.err(&e.to_string()))?;
        self.rest = r;
        Ok(val)
    }

    fn integer(&mut self) -> Result<u32, DffError> {
        self.skip_ws();
        let end = self
            .rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest.len());
        let (tok, r) = self.rest.split_at(end);
        let val = tok.parse::<u32>().map_err(|_| self.err("expected integer"))?;
        self.rest = r;
        Ok(val)
    }

    fn dff(&mut self) -> Result<DffSpec, DffError> {
        match self.word() {
            "id" => Ok(DffSpec::Identity),
            "u" => {
                self.expect('(')?;
                let k = self.integer()?;
                self.expect(')')?;
                DffSpec::u_step(k)
            }
            "U" => {
                self.expect('(')?;
                let eps = self.rational()?;
                self.expect(')')?;
                DffSpec::threshold(eps)
            }
            "phi" => {
                self.expect('(')?;
                let eps = self.rational()?;
                self.expect(')')?;
                DffSpec::phi_step(eps)
            }
            "compose" => {
                self.expect('(')?;
                let outer = self.dff()?;
                self.expect(',')?;
                let inner = self.dff()?;
                self.expect(')')?;
                Ok(DffSpec::compose(outer, inner))
            }
            "convex" => {
                self.expect('(')?;
                let mut terms = Vec::new();
                loop {
                    let w = self.rational()?;
                    self.expect('*')?;
                    let f = self.dff()?;
                    terms.push((w, f));
                    self.skip_ws();
                    if !self.eat('+') {
                        break;
                    }
                }
                self.expect(')')?;
                DffSpec::convex(terms)
            }
            w => Err(self.err(&format!("unknown function `{w}`"))),
        }
    }
}
