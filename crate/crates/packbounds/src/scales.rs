//! Conservative scales: size maps that can only make packing easier.
//!
//! A conservative scale replaces every box size so that any set of boxes
//! that packed before still packs afterwards. Two constructions are
//! supported: applying a tuple of dual feasible functions axis by axis, and
//! explicit size tables as produced by [`stretch`]. Since packability
//! survives the rescaling, a total volume above 1 after the rescaling
//! proves the original instance infeasible.
//!
//! Stretching additionally takes *edge presets* into account: pairs of
//! boxes already known to overlap along an axis. The slack 1 - lambda that
//! no conflict-free, weight-feasible set through a chosen box can use is
//! added to that box, preserving conservativeness for every packing that
//! honors the presets.

use crate::dff::{DffError, DffSpec};
use crate::model::NormalizedInstance;
use crate::oracle::{knapsack_max_weight, OracleError};
use crate::rational::Rational;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScaleError {
    #[error("scale covers {got} dimensions, instance has {expected}")]
    WrongArity { expected: usize, got: usize },
    #[error("axis {axis} out of range for dimension {dim}")]
    BadAxis { axis: usize, dim: usize },
    #[error("unknown box id `{id}`")]
    UnknownBox { id: String },
    #[error("table has no entry for box `{id}`")]
    MissingEntry { id: String },
    #[error("table entry for `{id}` leaves [0, 1] in axis {axis}")]
    OutsideUnitRange { id: String, axis: usize },
    #[error("edge endpoints must differ: `{id}`")]
    SelfEdge { id: String },
    #[error(transparent)]
    Dff(#[from] DffError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Per-axis sets of box pairs that are known to overlap along that axis in
/// every packing under consideration.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgePresets {
    dims: Vec<BTreeSet<(String, String)>>,
}

impl EdgePresets {
    pub fn new(dim: usize) -> Self {
        EdgePresets {
            dims: vec![BTreeSet::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.iter().all(BTreeSet::is_empty)
    }

    /// Records that `a` and `b` overlap along `axis` (unordered).
    pub fn add(&mut self, axis: usize, a: &str, b: &str) -> Result<(), ScaleError> {
        if axis >= self.dims.len() {
            return Err(ScaleError::BadAxis {
                axis,
                dim: self.dims.len(),
            });
        }
        if a == b {
            return Err(ScaleError::SelfEdge { id: a.to_string() });
        }
        let key = if a < b { (a, b) } else { (b, a) };
        self.dims[axis].insert((key.0.to_string(), key.1.to_string()));
        Ok(())
    }

    pub fn contains(&self, axis: usize, a: &str, b: &str) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.dims[axis]
            .contains(&(key.0.to_string(), key.1.to_string()))
    }

    pub fn edges(&self, axis: usize) -> &BTreeSet<(String, String)> {
        &self.dims[axis]
    }

    /// Checks that every referenced id names a box of the instance.
    pub fn validate_against(&self, inst: &NormalizedInstance) -> Result<(), ScaleError> {
        for edges in &self.dims {
            for (a, b) in edges {
                for id in [a, b] {
                    if inst.box_by_id(id).is_none() {
                        return Err(ScaleError::UnknownBox { id: id.clone() });
                    }
                }
            }
        }
        Ok(())
    }
}

/// How a scale transforms sizes: one DFF per axis, or an explicit table of
/// replacement size vectors keyed by box id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScaleKind {
    Dffs(Vec<DffSpec>),
    Table(BTreeMap<String, Vec<Rational>>),
}

/// A conservative scale together with a human-readable provenance string
/// that certificates echo verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConservativeScale {
    kind: ScaleKind,
    provenance: String,
}

impl ConservativeScale {
    /// The do-nothing scale (identity in every axis).
    pub fn identity(dim: usize) -> Self {
        ConservativeScale::from_dffs(vec![DffSpec::Identity; dim])
    }

    /// One DFF per axis. The provenance is the tuple text, e.g.
    /// `(u(2), u(2), u(2))`.
    pub fn from_dffs(dffs: Vec<DffSpec>) -> Self {
        let mut provenance = String::from("(");
        for (i, f) in dffs.iter().enumerate() {
            if i > 0 {
                provenance.push_str(", ");
            }
            provenance.push_str(&f.to_string());
        }
        provenance.push(')');
        ConservativeScale {
            kind: ScaleKind::Dffs(dffs),
            provenance,
        }
    }

    /// An explicit size table. Every entry must stay inside the unit cube.
    pub fn from_table(
        table: BTreeMap<String, Vec<Rational>>,
        provenance: impl Into<String>,
    ) -> Result<Self, ScaleError> {
        let one = Rational::one();
        for (id, sizes) in &table {
            for (axis, s) in sizes.iter().enumerate() {
                if s.is_negative() || s > &one {
                    return Err(ScaleError::OutsideUnitRange {
                        id: id.clone(),
                        axis,
                    });
                }
            }
        }
        Ok(ConservativeScale {
            kind: ScaleKind::Table(table),
            provenance: provenance.into(),
        })
    }

    pub fn kind(&self) -> &ScaleKind {
        &self.kind
    }

    /// The DFF tuple, when this is a DFF-based scale.
    pub fn dffs(&self) -> Option<&[DffSpec]> {
        match &self.kind {
            ScaleKind::Dffs(dffs) => Some(dffs),
            ScaleKind::Table(_) => None,
        }
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

impl fmt::Display for ConservativeScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.provenance)
    }
}

/// Rescales every box of the instance. Ids and values are preserved.
pub fn apply_scale(
    inst: &NormalizedInstance,
    scale: &ConservativeScale,
) -> Result<NormalizedInstance, ScaleError> {
    let dim = inst.dim();
    let boxes = match scale.kind() {
        ScaleKind::Dffs(dffs) => {
            if dffs.len() != dim {
                return Err(ScaleError::WrongArity {
                    expected: dim,
                    got: dffs.len(),
                });
            }
            let mut out = Vec::with_capacity(inst.len());
            for b in inst.boxes() {
                let size = dffs
                    .iter()
                    .zip(b.size())
                    .map(|(f, x)| f.eval(x))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(b.resized(size));
            }
            out
        }
        ScaleKind::Table(table) => {
            for id in table.keys() {
                if inst.box_by_id(id).is_none() {
                    return Err(ScaleError::UnknownBox { id: id.clone() });
                }
            }
            let mut out = Vec::with_capacity(inst.len());
            for b in inst.boxes() {
                let entry = table
                    .get(b.id())
                    .ok_or_else(|| ScaleError::MissingEntry {
                        id: b.id().to_string(),
                    })?;
                if entry.len() != dim {
                    return Err(ScaleError::WrongArity {
                        expected: dim,
                        got: entry.len(),
                    });
                }
                out.push(b.resized(entry.clone()));
            }
            out
        }
    };
    Ok(NormalizedInstance::new(dim, boxes).expect("scaled sizes stay in the unit interval"))
}

/// The boxes that could share a cross-section line with `box_id` along
/// `axis`: everything not preset-adjacent to it there. Returned in instance
/// order.
pub fn feasible_companions(
    inst: &NormalizedInstance,
    presets: &EdgePresets,
    box_id: &str,
    axis: usize,
) -> Result<Vec<String>, ScaleError> {
    if presets.dim() != inst.dim() {
        return Err(ScaleError::WrongArity {
            expected: inst.dim(),
            got: presets.dim(),
        });
    }
    if axis >= inst.dim() {
        return Err(ScaleError::BadAxis {
            axis,
            dim: inst.dim(),
        });
    }
    if inst.box_by_id(box_id).is_none() {
        return Err(ScaleError::UnknownBox {
            id: box_id.to_string(),
        });
    }
    presets.validate_against(inst)?;
    Ok(inst
        .boxes()
        .iter()
        .filter(|c| c.id() != box_id && !presets.contains(axis, box_id, c.id()))
        .map(|c| c.id().to_string())
        .collect())
}

/// Result of [`stretch`]. `lambda` is the widest conflict-free,
/// weight-feasible set through the box; `exact` is false when only an upper
/// bound on it was computed, which still yields a valid (weaker) scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StretchOutcome {
    pub scale: ConservativeScale,
    pub lambda: Rational,
    pub exact: bool,
}

/// Grows `box_id` along `axis` by the slack `1 - lambda`, where lambda is
/// the maximum total width of a set of boxes containing `box_id` that has
/// width at most 1 and contains no preset edge. The resulting table scale is
/// conservative for every packing whose overlap graphs contain the presets.
pub fn stretch(
    inst: &NormalizedInstance,
    presets: &EdgePresets,
    box_id: &str,
    axis: usize,
) -> Result<StretchOutcome, ScaleError> {
    let companions = feasible_companions(inst, presets, box_id, axis)?;
    let b = inst.box_by_id(box_id).expect("validated above").1;
    let free: Vec<(String, Rational)> = companions
        .iter()
        .map(|id| {
            let c = inst.box_by_id(id).expect("companion ids come from inst").1;
            (id.clone(), c.size_in(axis).clone())
        })
        .collect();
    let result = knapsack_max_weight(
        &free,
        presets.edges(axis),
        (box_id, b.size_in(axis)),
        &Rational::one(),
    )?;
    let lambda = result.value;

    let mut table = BTreeMap::new();
    for c in inst.boxes() {
        let mut size = c.size().to_vec();
        if c.id() == box_id {
            size[axis] = size[axis].clone() + &(Rational::one() - &lambda);
        }
        table.insert(c.id().to_string(), size);
    }
    let provenance = format!(
        "stretch(box={box_id}, dim={}, lambda={lambda})",
        axis + 1
    );
    let scale = ConservativeScale::from_table(table, provenance)
        .expect("stretched sizes stay in the unit interval");
    Ok(StretchOutcome {
        scale,
        lambda,
        exact: result.exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{nine_cubes, six_boxes};
    use crate::model::{normalize, BoxItem, NormalizedInstance};
    use crate::oracle::{find_packing, packing_class_exists_containing, PackingClass};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn six_presets() -> EdgePresets {
        let mut e = EdgePresets::new(2);
        e.add(0, "1'", "3'").unwrap();
        e.add(0, "4'", "5'").unwrap();
        e
    }

    #[test]
    fn companions_exclude_preset_neighbors() {
        let inst = normalize(&six_boxes());
        let got = feasible_companions(&inst, &six_presets(), "1'", 0).unwrap();
        assert_eq!(got, vec!["2'", "4'", "5'", "6'"]);
        let all = feasible_companions(&inst, &EdgePresets::new(2), "1'", 0).unwrap();
        assert_eq!(all.len(), 5);
    }

    #[test]
    fn dff_scale_turns_cubes_into_halves() {
        let scale = ConservativeScale::from_dffs(vec![DffSpec::u_step(2).unwrap(); 3]);
        assert_eq!(scale.provenance(), "(u(2), u(2), u(2))");
        let scaled = apply_scale(&nine_cubes(), &scale).unwrap();
        for b in scaled.boxes() {
            assert_eq!(b.size(), &[r(1, 2), r(1, 2), r(1, 2)]);
        }
        assert_eq!(scaled.total_volume(), r(9, 8));
    }

    #[test]
    fn identity_scale_changes_nothing() {
        let inst = nine_cubes();
        let scaled = apply_scale(&inst, &ConservativeScale::identity(3)).unwrap();
        assert_eq!(scaled.boxes(), inst.boxes());
    }

    #[test]
    fn stretch_reproduces_the_six_box_example() {
        let inst = normalize(&six_boxes());
        let out = stretch(&inst, &six_presets(), "1'", 0).unwrap();
        assert_eq!(out.lambda, r(4, 5));
        assert!(out.exact);
        assert_eq!(
            out.scale.provenance(),
            "stretch(box=1', dim=1, lambda=4/5)"
        );
        let scaled = apply_scale(&inst, &out.scale).unwrap();
        assert_eq!(scaled.box_by_id("1'").unwrap().1.size(), &[r(3, 5), r(7, 13)]);
        assert_eq!(scaled.box_by_id("2'").unwrap().1.size(), &[r(2, 5), r(7, 13)]);
        assert_eq!(scaled.total_volume(), r(71, 65));
        assert!(scaled.total_volume() > Rational::one());
    }

    #[test]
    fn stretch_without_presets_grows_a_cube() {
        let inst = nine_cubes();
        let out = stretch(&inst, &EdgePresets::new(3), "c1", 0).unwrap();
        assert_eq!(out.lambda, r(4, 5));
        assert!(out.exact);
        let scaled = apply_scale(&inst, &out.scale).unwrap();
        assert_eq!(scaled.box_by_id("c1").unwrap().1.size(), &[r(3, 5), r(2, 5), r(2, 5)]);
        assert_eq!(scaled.box_by_id("c2").unwrap().1.size(), &[r(2, 5), r(2, 5), r(2, 5)]);
    }

    #[test]
    fn scale_errors_are_reported() {
        let inst = nine_cubes();
        let wrong_arity = ConservativeScale::from_dffs(vec![DffSpec::Identity; 2]);
        assert_eq!(
            apply_scale(&inst, &wrong_arity),
            Err(ScaleError::WrongArity { expected: 3, got: 2 })
        );

        let mut table = BTreeMap::new();
        table.insert("c1".to_string(), vec![r(1, 2); 3]);
        let partial = ConservativeScale::from_table(table, "partial").unwrap();
        assert_eq!(
            apply_scale(&inst, &partial),
            Err(ScaleError::MissingEntry { id: "c2".to_string() })
        );

        let mut table = BTreeMap::new();
        for i in 1..=9 {
            table.insert(format!("c{i}"), vec![r(1, 2); 3]);
        }
        table.insert("ghost".to_string(), vec![r(1, 2); 3]);
        let ghost = ConservativeScale::from_table(table, "ghost").unwrap();
        assert_eq!(
            apply_scale(&inst, &ghost),
            Err(ScaleError::UnknownBox { id: "ghost".to_string() })
        );

        let mut table = BTreeMap::new();
        table.insert("c1".to_string(), vec![r(3, 2)]);
        assert_eq!(
            ConservativeScale::from_table(table, "oversize"),
            Err(ScaleError::OutsideUnitRange { id: "c1".to_string(), axis: 0 })
        );

        let mut bad = EdgePresets::new(2);
        assert_eq!(bad.add(2, "a", "b"), Err(ScaleError::BadAxis { axis: 2, dim: 2 }));
        assert_eq!(bad.add(0, "a", "a"), Err(ScaleError::SelfEdge { id: "a".to_string() }));
        bad.add(0, "c1", "nope").unwrap();
        assert_eq!(
            stretch(&normalize(&six_boxes()), &bad, "1'", 0),
            Err(ScaleError::UnknownBox { id: "c1".to_string() })
        );
    }

    fn xorshift(state: &mut u64) -> u64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        *state
    }

    fn random_instance(state: &mut u64, n: usize, dim: usize, max_den: u64) -> NormalizedInstance {
        let boxes = (0..n)
            .map(|i| {
                let size = (0..dim)
                    .map(|_| {
                        let den = (xorshift(state) % (max_den - 1) + 2) as i64;
                        let num = (xorshift(state) % den as u64 + 1) as i64;
                        r(num, den)
                    })
                    .collect();
                BoxItem::new(format!("s{i}"), size)
            })
            .collect();
        NormalizedInstance::new(dim, boxes).unwrap()
    }

    #[test]
    fn dff_scales_never_hide_a_packing() {
        // Scaled volume above 1 must imply geometric infeasibility.
        let battery = [
            ConservativeScale::from_dffs(vec![DffSpec::u_step(1).unwrap(); 2]),
            ConservativeScale::from_dffs(vec![DffSpec::u_step(2).unwrap(); 2]),
            ConservativeScale::from_dffs(vec![
                DffSpec::threshold(r(1, 4)).unwrap(),
                DffSpec::Identity,
            ]),
            ConservativeScale::from_dffs(vec![
                DffSpec::phi_step(r(1, 3)).unwrap(),
                DffSpec::phi_step(r(1, 2)).unwrap(),
            ]),
            ConservativeScale::from_dffs(vec![
                DffSpec::compose(DffSpec::u_step(1).unwrap(), DffSpec::threshold(r(1, 3)).unwrap()),
                DffSpec::Identity,
            ]),
        ];
        let mut state = 0x6a09e667f3bcc908u64;
        let mut infeasible_hits = 0usize;
        for _ in 0..40 {
            let n = (xorshift(&mut state) % 3 + 2) as usize;
            let inst = random_instance(&mut state, n, 2, 5);
            let packs = find_packing(&inst, 8).unwrap().is_some();
            for scale in &battery {
                let vol = apply_scale(&inst, scale).unwrap().total_volume();
                if vol > Rational::one() {
                    infeasible_hits += 1;
                    assert!(!packs, "scale {scale} rejected a packable instance");
                }
            }
        }
        assert!(infeasible_hits > 0, "sweep never exercised the criterion");
    }

    #[test]
    fn stretch_never_hides_a_preset_respecting_class() {
        let mut state = 0xbb67ae8584caa73bu64;
        let mut infeasible_hits = 0usize;
        for case in 0..60 {
            let n = (xorshift(&mut state) % 3 + 2) as usize;
            let inst = random_instance(&mut state, n, 2, 4);
            let mut presets = EdgePresets::new(2);
            let mut required = PackingClass::new(2);
            for i in 0..n {
                for j in i + 1..n {
                    for axis in 0..2 {
                        if xorshift(&mut state) % 3 == 0 {
                            let a = format!("s{i}");
                            let b = format!("s{j}");
                            presets.add(axis, &a, &b).unwrap();
                            required.add_edge(axis, &a, &b).unwrap();
                        }
                    }
                }
            }
            let target = format!("s{}", xorshift(&mut state) as usize % n);
            let axis = xorshift(&mut state) as usize % 2;
            let out = stretch(&inst, &presets, &target, axis).unwrap();
            assert!(out.exact);
            assert!(out.lambda <= Rational::one());
            assert!(&out.lambda >= inst.box_by_id(&target).unwrap().1.size_in(axis));

            let vol = apply_scale(&inst, &out.scale).unwrap().total_volume();
            if vol > Rational::one() {
                infeasible_hits += 1;
                assert!(
                    !packing_class_exists_containing(&inst, &required).unwrap(),
                    "case {case}: stretched volume {vol} rejected a live class"
                );
            }
        }
        assert!(infeasible_hits > 0, "sweep never exercised the criterion");
    }
}
