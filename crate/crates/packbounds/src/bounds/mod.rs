//! Lower bounds for orthogonal packing problems built on conservative scales.
//!
//! The volume criterion turns any conservative scale into a feasibility test:
//! if the total transformed volume exceeds the container, no packing exists.
//! Taking maxima over a set of scales yields lower bounds for strip packing
//! (`bound_spp`), bin packing (`bound_obpp`), and an upper bound for the
//! knapsack variant (`okp_relaxation_bound`).
//!
//! The classic two- and three-dimensional partial bounds of Martello,
//! Pisinger, and Vigo are reproduced here (`mv_partial_2d`, `mv_partial_3d`)
//! together with their reformulation as plain volume bounds under suitable
//! scales.  The reformulation makes an improvement obvious: summing over all
//! boxes instead of a selected subset never weakens the bound
//! (`improved_2d`, `improved_3d`).  The composite bounds `bound_l2d` and
//! `bound_l3d` maximize over the full scale families with parameters drawn
//! from [`crate::dff::candidate_params`].

pub mod cert;

use std::collections::BTreeSet;

use crate::dff::{candidate_params, DffError, DffSpec};
use crate::model::NormalizedInstance;
use crate::oracle::knapsack;
use crate::rational::Rational;
use crate::scales::{apply_scale, ConservativeScale, ScaleError};

#[derive(Debug, thiserror::Error)]
pub enum BoundsError {
    #[error("expected a {expected}-dimensional instance, got {got} dimensions")]
    WrongDimension { expected: usize, got: usize },
    #[error("at least one conservative scale is required")]
    NoScales,
    #[error("parameter {name} = {value} lies outside (0, 1/2]")]
    BadParameter { name: &'static str, value: Rational },
    #[error("box {id} carries no value")]
    MissingValue { id: String },
    #[error("unknown box id {id}")]
    UnknownId { id: String },
    #[error("axis {axis} out of range for dimension {dim}")]
    BadAxis { axis: usize, dim: usize },
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error(transparent)]
    Dff(#[from] DffError),
}

/// Outcome of the volume criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Transformed volume fits; nothing is proven.
    Pass { volume: Rational },
    /// Transformed volume exceeds the container: no packing exists.
    Infeasible { volume: Rational },
}

impl Verdict {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Verdict::Infeasible { .. })
    }

    pub fn volume(&self) -> &Rational {
        match self {
            Verdict::Pass { volume } | Verdict::Infeasible { volume } => volume,
        }
    }
}

/// What a [`BoundReport`] value bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundKind {
    /// Lower bound on strip height.
    Spp,
    /// Lower bound on bin count.
    Obpp,
    /// Upper bound on packed value.
    Okp,
    /// Infeasibility proof: transformed volume > 1.
    OppInfeasibility,
    /// Minimum clique cardinality forced in the given axis graph.
    Clique { axis: usize, ids: Vec<String> },
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundKind::Spp => write!(f, "SPP"),
            BoundKind::Obpp => write!(f, "OBPP"),
            BoundKind::Okp => write!(f, "OKP"),
            BoundKind::OppInfeasibility => write!(f, "OPP-infeasibility"),
            BoundKind::Clique { .. } => write!(f, "clique"),
        }
    }
}

/// The scale (plus family name and parameters, when the value came out of a
/// parametrized family) that achieves a reported bound.
#[derive(Debug, Clone)]
pub struct Witness {
    pub scale: ConservativeScale,
    pub family: Option<&'static str>,
    pub params: Vec<(&'static str, Rational)>,
}

impl Witness {
    fn plain(scale: ConservativeScale) -> Self {
        Witness {
            scale,
            family: None,
            params: Vec::new(),
        }
    }
}

/// A bound value together with the witness that reproduces it.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: Rational,
    pub witness: Witness,
}

impl BoundReport {
    /// Re-evaluates the witness on `inst` and returns the reproduced value.
    /// A report is well-formed exactly when this equals `self.value`.
    pub fn reproduce(&self, inst: &NormalizedInstance) -> Result<Rational, BoundsError> {
        let scaled = apply_scale(inst, &self.witness.scale)?;
        match &self.kind {
            BoundKind::Spp | BoundKind::OppInfeasibility => Ok(scaled.total_volume()),
            BoundKind::Obpp => Ok(Rational::from_bigint(scaled.total_volume().ceil())),
            BoundKind::Okp => okp_relaxation_bound(inst, &self.witness.scale),
            BoundKind::Clique { axis, ids } => {
                let ids: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
                let c = clique_requirement(inst, &ids, &self.witness.scale, *axis)?;
                Ok(Rational::from_int(c))
            }
        }
    }
}

fn require_dim(inst: &NormalizedInstance, expected: usize) -> Result<(), BoundsError> {
    if inst.dim() != expected {
        return Err(BoundsError::WrongDimension {
            expected,
            got: inst.dim(),
        });
    }
    Ok(())
}

fn require_param(name: &'static str, value: &Rational) -> Result<(), BoundsError> {
    if !value.is_positive() || *value > Rational::one_half() {
        return Err(BoundsError::BadParameter {
            name,
            value: value.clone(),
        });
    }
    Ok(())
}

/// Total volume of `inst` after applying `scale`.
pub fn transformed_volume(
    inst: &NormalizedInstance,
    scale: &ConservativeScale,
) -> Result<Rational, BoundsError> {
    Ok(apply_scale(inst, scale)?.total_volume())
}

/// The volume criterion: transformed volume beyond 1 proves that no packing
/// (and, when the scale respects edge presets, no conforming packing class)
/// exists.
pub fn volume_criterion(
    inst: &NormalizedInstance,
    scale: &ConservativeScale,
) -> Result<Verdict, BoundsError> {
    let volume = transformed_volume(inst, scale)?;
    if volume > Rational::one() {
        Ok(Verdict::Infeasible { volume })
    } else {
        Ok(Verdict::Pass { volume })
    }
}

/// Lower bound on strip height: the maximum transformed volume over the given
/// scales.  The witness is the first scale attaining the maximum.
pub fn bound_spp(
    inst: &NormalizedInstance,
    scales: &[ConservativeScale],
) -> Result<BoundReport, BoundsError> {
    if scales.is_empty() {
        return Err(BoundsError::NoScales);
    }
    let mut best: Option<(Rational, &ConservativeScale)> = None;
    for scale in scales {
        let vol = transformed_volume(inst, scale)?;
        if best.as_ref().map_or(true, |(v, _)| vol > *v) {
            best = Some((vol, scale));
        }
    }
    let (value, scale) = best.expect("non-empty scale set");
    Ok(BoundReport {
        kind: BoundKind::Spp,
        value,
        witness: Witness::plain(scale.clone()),
    })
}

/// Lower bound on bin count: the maximum of `ceil(transformed volume)` over
/// the given scales.  The witness is the first scale attaining the maximum.
pub fn bound_obpp(
    inst: &NormalizedInstance,
    scales: &[ConservativeScale],
) -> Result<BoundReport, BoundsError> {
    if scales.is_empty() {
        return Err(BoundsError::NoScales);
    }
    let mut best: Option<(Rational, &ConservativeScale)> = None;
    for scale in scales {
        let bins = Rational::from_bigint(transformed_volume(inst, scale)?.ceil());
        if best.as_ref().map_or(true, |(v, _)| bins > *v) {
            best = Some((bins, scale));
        }
    }
    let (value, scale) = best.expect("non-empty scale set");
    Ok(BoundReport {
        kind: BoundKind::Obpp,
        value,
        witness: Witness::plain(scale.clone()),
    })
}

/// The index sets of the classic two-dimensional partial bound: boxes wide in
/// both axes beyond `1-p`/`1-q`, other boxes wide beyond one half, and boxes
/// between the parameter and one half in both axes.
pub fn mv_sets_2d(
    inst: &NormalizedInstance,
    p: &Rational,
    q: &Rational,
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>), BoundsError> {
    require_dim(inst, 2)?;
    require_param("p", p)?;
    require_param("q", q)?;
    let one = Rational::one();
    let half = Rational::one_half();
    let (mut i1, mut i2, mut i3) = (Vec::new(), Vec::new(), Vec::new());
    for (idx, b) in inst.boxes().iter().enumerate() {
        let (w1, w2) = (b.size_in(0), b.size_in(1));
        if *w1 > &one - p && *w2 > &one - q {
            i1.push(idx);
        } else if *w1 > half && *w2 > half {
            i2.push(idx);
        }
        if *w1 <= half && w1 >= p && *w2 <= half && w2 >= q {
            i3.push(idx);
        }
    }
    Ok((i1, i2, i3))
}

/// Number of `p`-wide strips next to a wide box, counted by the classic
/// geometric argument.
fn mv_count(b: &crate::model::BoxItem, p: &Rational, q: &Rational) -> Rational {
    let one = Rational::one();
    let fp = Rational::from_bigint(p.recip().floor());
    let fq = Rational::from_bigint(q.recip().floor());
    let c1 = Rational::from_bigint(((&one - b.size_in(0)) / p).floor());
    let c2 = Rational::from_bigint(((&one - b.size_in(1)) / q).floor());
    &fp * &c2 + &fq * &c1 - &c1 * &c2
}

/// The original two-dimensional partial bound with parameters
/// `p, q` in `(0, 1/2]`: count of wide boxes plus the rounded balance of
/// medium boxes against the space left over next to the wide ones.
pub fn mv_partial_2d(
    inst: &NormalizedInstance,
    p: &Rational,
    q: &Rational,
) -> Result<i64, BoundsError> {
    let (i1, i2, i3) = mv_sets_2d(inst, p, q)?;
    let fp = Rational::from_bigint(p.recip().floor());
    let fq = Rational::from_bigint(q.recip().floor());
    let spent: Rational = i2.iter().map(|&i| mv_count(&inst.boxes()[i], p, q)).sum();
    let balance = (Rational::from_int(i3.len() as i64) - spent) / (&fp * &fq);
    Ok((i1.len() + i2.len()) as i64 + balance.ceil_i64())
}

/// Improvement of [`mv_partial_2d`]: ceiling of the volume of *all* boxes
/// under the step scale, instead of only the three index sets.
pub fn improved_2d(
    inst: &NormalizedInstance,
    p: &Rational,
    q: &Rational,
) -> Result<i64, BoundsError> {
    require_dim(inst, 2)?;
    require_param("p", p)?;
    require_param("q", q)?;
    let scale = ConservativeScale::from_dffs(vec![
        DffSpec::phi_step(p.clone())?,
        DffSpec::phi_step(q.clone())?,
    ]);
    Ok(transformed_volume(inst, &scale)?.ceil_i64())
}

/// The index sets of the classic three-dimensional partial bound.
pub fn mv_sets_3d(
    inst: &NormalizedInstance,
    p: &Rational,
    q: &Rational,
) -> Result<(Vec<usize>, Vec<usize>), BoundsError> {
    require_dim(inst, 3)?;
    require_param("p", p)?;
    require_param("q", q)?;
    let one = Rational::one();
    let (mut j1, mut j2) = (Vec::new(), Vec::new());
    for (idx, b) in inst.boxes().iter().enumerate() {
        let (w1, w2) = (b.size_in(0), b.size_in(1));
        if *w1 > &one - p && *w2 > &one - q {
            j1.push(idx);
        } else if w1 > p && w2 > q {
            j2.push(idx);
        }
    }
    Ok((j1, j2))
}

/// The original three-dimensional partial bound: boxes wide in the first two
/// axes contribute their full height, boxes merely wider than the parameters
/// contribute their volume.
pub fn mv_partial_3d(
    inst: &NormalizedInstance,
    p: &Rational,
    q: &Rational,
) -> Result<i64, BoundsError> {
    let (j1, j2) = mv_sets_3d(inst, p, q)?;
    let tall: Rational = j1.iter().map(|&i| inst.boxes()[i].size_in(2).clone()).sum();
    let bulk: Rational = j2.iter().map(|&i| inst.boxes()[i].volume()).sum();
    Ok((tall + bulk).ceil_i64())
}

/// Improvement of [`mv_partial_3d`]: the coupling between the first two axes
/// is unnecessary — round each axis up independently via a threshold scale.
pub fn improved_3d(
    inst: &NormalizedInstance,
    p: &Rational,
    q: &Rational,
) -> Result<i64, BoundsError> {
    require_dim(inst, 3)?;
    require_param("p", p)?;
    require_param("q", q)?;
    let scale = ConservativeScale::from_dffs(vec![
        DffSpec::threshold(p.clone())?,
        DffSpec::threshold(q.clone())?,
        DffSpec::Identity,
    ]);
    Ok(transformed_volume(inst, &scale)?.ceil_i64())
}

/// One member of a parametrized scale family.
#[derive(Debug, Clone)]
pub struct FamilyScale {
    pub family: &'static str,
    pub params: Vec<(&'static str, Rational)>,
    pub scale: ConservativeScale,
}

fn family(
    name: &'static str,
    params: Vec<(&'static str, Rational)>,
    dffs: Vec<DffSpec>,
) -> FamilyScale {
    FamilyScale {
        family: name,
        params,
        scale: ConservativeScale::from_dffs(dffs),
    }
}

/// The seven two-dimensional scale families, instantiated at every candidate
/// parameter of the axis each parametrized component transforms.  The order
/// is deterministic: families first, then parameters ascending.
pub fn family_scales_2d(inst: &NormalizedInstance) -> Result<Vec<FamilyScale>, BoundsError> {
    require_dim(inst, 2)?;
    let u1 = DffSpec::u_step(1)?;
    let params0 = candidate_params(inst, 0);
    let params1 = candidate_params(inst, 1);
    let mut out = Vec::new();
    for p in &params1 {
        out.push(family(
            "w1",
            vec![("p", p.clone())],
            vec![u1.clone(), DffSpec::threshold(p.clone())?],
        ));
    }
    for p in &params0 {
        out.push(family(
            "w2",
            vec![("p", p.clone())],
            vec![DffSpec::threshold(p.clone())?, u1.clone()],
        ));
    }
    for p in &params1 {
        out.push(family(
            "w3",
            vec![("p", p.clone())],
            vec![u1.clone(), DffSpec::phi_step(p.clone())?],
        ));
    }
    for p in &params0 {
        out.push(family(
            "w4",
            vec![("p", p.clone())],
            vec![DffSpec::phi_step(p.clone())?, u1.clone()],
        ));
    }
    for p in &params1 {
        out.push(family(
            "w5",
            vec![("p", p.clone())],
            vec![DffSpec::Identity, DffSpec::threshold(p.clone())?],
        ));
    }
    for p in &params0 {
        out.push(family(
            "w6",
            vec![("p", p.clone())],
            vec![DffSpec::threshold(p.clone())?, DffSpec::Identity],
        ));
    }
    for p in &params0 {
        for q in &params1 {
            out.push(family(
                "w7",
                vec![("p", p.clone()), ("q", q.clone())],
                vec![DffSpec::phi_step(p.clone())?, DffSpec::phi_step(q.clone())?],
            ));
        }
    }
    Ok(out)
}

/// The nine three-dimensional scale families at candidate parameters.
pub fn family_scales_3d(inst: &NormalizedInstance) -> Result<Vec<FamilyScale>, BoundsError> {
    require_dim(inst, 3)?;
    let u1 = DffSpec::u_step(1)?;
    let params: Vec<Vec<Rational>> = (0..3).map(|axis| candidate_params(inst, axis)).collect();
    let mut out = Vec::new();
    // One-parameter families: the transformed axis cycles 3, 2, 1.
    for (name, axis, phi) in [
        ("w1", 2, false),
        ("w2", 1, false),
        ("w3", 0, false),
        ("w4", 2, true),
        ("w5", 1, true),
        ("w6", 0, true),
    ] {
        for p in &params[axis] {
            let stepped = if phi {
                DffSpec::phi_step(p.clone())?
            } else {
                DffSpec::threshold(p.clone())?
            };
            let mut dffs = vec![u1.clone(), u1.clone(), u1.clone()];
            dffs[axis] = stepped;
            out.push(family(name, vec![("p", p.clone())], dffs));
        }
    }
    // Two-parameter families: thresholds on two axes, identity on the third.
    for (name, a, b) in [("w7", 0, 1), ("w8", 0, 2), ("w9", 1, 2)] {
        for p in &params[a] {
            for q in &params[b] {
                let mut dffs = vec![DffSpec::Identity, DffSpec::Identity, DffSpec::Identity];
                dffs[a] = DffSpec::threshold(p.clone())?;
                dffs[b] = DffSpec::threshold(q.clone())?;
                out.push(family(
                    name,
                    vec![("p", p.clone()), ("q", q.clone())],
                    dffs,
                ));
            }
        }
    }
    Ok(out)
}

fn best_over_families(
    inst: &NormalizedInstance,
    families: Vec<FamilyScale>,
) -> Result<BoundReport, BoundsError> {
    let mut best: Option<(Rational, FamilyScale)> = None;
    for fam in families {
        let bins = Rational::from_bigint(transformed_volume(inst, &fam.scale)?.ceil());
        if best.as_ref().map_or(true, |(v, _)| bins > *v) {
            best = Some((bins, fam));
        }
    }
    let (value, fam) = best.expect("family enumeration is never empty");
    Ok(BoundReport {
        kind: BoundKind::Obpp,
        value,
        witness: Witness {
            scale: fam.scale,
            family: Some(fam.family),
            params: fam.params,
        },
    })
}

/// Composite two-dimensional bin-count bound: maximum ceiling volume over the
/// seven scale families at all candidate parameters.
pub fn bound_l2d(inst: &NormalizedInstance) -> Result<BoundReport, BoundsError> {
    best_over_families(inst, family_scales_2d(inst)?)
}

/// Composite three-dimensional bin-count bound over the nine scale families.
pub fn bound_l3d(inst: &NormalizedInstance) -> Result<BoundReport, BoundsError> {
    best_over_families(inst, family_scales_3d(inst)?)
}

/// Additional scales `(u(k), ..., u(k))` for the listed orders.  The step
/// functions have their win zone below one half, complementing the families
/// used by [`bound_l2d`] and [`bound_l3d`]; callers may append these to a
/// battery without affecting the pinned composite bounds.
pub fn ustep_scales(dim: usize, orders: &[u32]) -> Result<Vec<ConservativeScale>, BoundsError> {
    let mut out = Vec::new();
    for &k in orders {
        let f = DffSpec::u_step(k)?;
        out.push(ConservativeScale::from_dffs(vec![f; dim]));
    }
    Ok(out)
}

/// Upper bound for the knapsack variant: relax packing to the volume
/// constraint under `scale` and solve the resulting one-dimensional knapsack
/// exactly.  Transformed volumes are the weights, box values the profits.
pub fn okp_relaxation_bound(
    inst: &NormalizedInstance,
    scale: &ConservativeScale,
) -> Result<Rational, BoundsError> {
    let scaled = apply_scale(inst, scale)?;
    let mut items = Vec::with_capacity(scaled.len());
    for b in scaled.boxes() {
        let value = b.value().ok_or_else(|| BoundsError::MissingValue {
            id: b.id().to_string(),
        })?;
        items.push((b.volume(), value.clone()));
    }
    Ok(knapsack(&items, &Rational::one()))
}

/// Minimum clique cardinality that the axis-`axis` graph of any packing class
/// must contain on the subset `ids`: the ceiling of the subset's transformed
/// width.  Duplicate ids are ignored; the subset is treated as a set.
pub fn clique_requirement(
    inst: &NormalizedInstance,
    ids: &[&str],
    scale: &ConservativeScale,
    axis: usize,
) -> Result<i64, BoundsError> {
    if axis >= inst.dim() {
        return Err(BoundsError::BadAxis {
            axis,
            dim: inst.dim(),
        });
    }
    let mut indices = BTreeSet::new();
    for id in ids {
        let (idx, _) = inst
            .box_by_id(id)
            .ok_or_else(|| BoundsError::UnknownId { id: id.to_string() })?;
        indices.insert(idx);
    }
    let scaled = apply_scale(inst, scale)?;
    let width: Rational = indices
        .iter()
        .map(|&i| scaled.boxes()[i].size_in(axis).clone())
        .sum();
    Ok(width.ceil_i64())
}
