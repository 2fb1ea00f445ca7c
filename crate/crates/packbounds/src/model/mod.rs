//! Problem data: boxes, containers, instances, and exact volumes.
//!
//! An [`Instance`] is a d-dimensional container plus a finite set of boxes,
//! each with positive rational side lengths (and an optional value for
//! knapsack variants). Bounds are computed on the [`NormalizedInstance`]
//! obtained by dividing every box size by the matching container side, so
//! that the container becomes the unit cube.
//!
//! Validation happens at construction: a box that does not fit the container,
//! a wrong arity, or a duplicate id is rejected by [`Instance::new`], and
//! [`normalize`] is therefore total.

pub mod format;

use crate::rational::Rational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("container must have at least one dimension")]
    EmptyContainer,
    #[error("container side in dimension {axis} must be positive")]
    NonPositiveContainer { axis: usize },
    #[error("box `{id}` has {got} size entries, expected {expected}")]
    WrongArity {
        id: String,
        expected: usize,
        got: usize,
    },
    #[error("box `{id}` must have a positive size in dimension {axis}")]
    NonPositiveSize { id: String, axis: usize },
    #[error("box `{id}` has a negative value")]
    NegativeValue { id: String },
    #[error("box `{id}` exceeds the container in dimension {axis}")]
    BoxTooLarge { id: String, axis: usize },
    #[error("duplicate box id `{id}`")]
    DuplicateId { id: String },
    #[error("box `{id}` size in dimension {axis} must lie in [0, 1]")]
    OutsideUnitRange { id: String, axis: usize },
}

/// A box to pack: an id, one side length per dimension, and an optional
/// value used by knapsack-style bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxItem {
    id: String,
    size: Vec<Rational>,
    value: Option<Rational>,
}

impl BoxItem {
    pub fn new(id: impl Into<String>, size: Vec<Rational>) -> Self {
        BoxItem {
            id: id.into(),
            size,
            value: None,
        }
    }

    pub fn with_value(id: impl Into<String>, size: Vec<Rational>, value: Rational) -> Self {
        BoxItem {
            id: id.into(),
            size,
            value: Some(value),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn size(&self) -> &[Rational] {
        &self.size
    }

    /// Side length along `axis` (0-based).
    pub fn size_in(&self, axis: usize) -> &Rational {
        &self.size[axis]
    }

    pub fn value(&self) -> Option<&Rational> {
        self.value.as_ref()
    }

    /// Product of the side lengths.
    pub fn volume(&self) -> Rational {
        volume(&self.size)
    }

    /// Same box with the size vector replaced (id and value preserved).
    pub fn resized(&self, size: Vec<Rational>) -> Self {
        BoxItem {
            id: self.id.clone(),
            size,
            value: self.value.clone(),
        }
    }
}

/// A raw packing instance: container sides plus boxes, all validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    container: Vec<Rational>,
    boxes: Vec<BoxItem>,
}

impl Instance {
    /// Validates dimensions, positivity, fit, and id uniqueness.
    pub fn new(container: Vec<Rational>, boxes: Vec<BoxItem>) -> Result<Self, ModelError> {
        if container.is_empty() {
            return Err(ModelError::EmptyContainer);
        }
        for (axis, side) in container.iter().enumerate() {
            if !side.is_positive() {
                return Err(ModelError::NonPositiveContainer { axis });
            }
        }
        let dim = container.len();
        check_boxes(&boxes, dim, |b, axis| {
            if !b.size[axis].is_positive() {
                Err(ModelError::NonPositiveSize {
                    id: b.id.clone(),
                    axis,
                })
            } else if b.size[axis] > container[axis] {
                Err(ModelError::BoxTooLarge {
                    id: b.id.clone(),
                    axis,
                })
            } else {
                Ok(())
            }
        })?;
        Ok(Instance { container, boxes })
    }

    pub fn dim(&self) -> usize {
        self.container.len()
    }

    pub fn container(&self) -> &[Rational] {
        &self.container
    }

    pub fn boxes(&self) -> &[BoxItem] {
        &self.boxes
    }

    pub fn box_by_id(&self, id: &str) -> Option<(usize, &BoxItem)> {
        self.boxes.iter().enumerate().find(|(_, b)| b.id == id)
    }
}

/// An instance over the unit container. Sizes lie in `[0, 1]` per
/// coordinate: [`normalize`] always produces positive sizes, but applying a
/// conservative scale may shrink a coordinate to exactly zero, and such
/// instances remain valid inputs for every bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedInstance {
    dim: usize,
    boxes: Vec<BoxItem>,
}

impl NormalizedInstance {
    pub fn new(dim: usize, boxes: Vec<BoxItem>) -> Result<Self, ModelError> {
        if dim == 0 {
            return Err(ModelError::EmptyContainer);
        }
        let one = Rational::one();
        check_boxes(&boxes, dim, |b, axis| {
            if b.size[axis].is_negative() || b.size[axis] > one {
                Err(ModelError::OutsideUnitRange {
                    id: b.id.clone(),
                    axis,
                })
            } else {
                Ok(())
            }
        })?;
        Ok(NormalizedInstance { dim, boxes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[BoxItem] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn box_by_id(&self, id: &str) -> Option<(usize, &BoxItem)> {
        self.boxes.iter().enumerate().find(|(_, b)| b.id == id)
    }

    /// Sum of box volumes.
    pub fn total_volume(&self) -> Rational {
        total_volume(&self.boxes)
    }

    /// Sub-instance consisting of the boxes at `indices` (in that order).
    pub fn subset(&self, indices: &[usize]) -> NormalizedInstance {
        NormalizedInstance {
            dim: self.dim,
            boxes: indices.iter().map(|&i| self.boxes[i].clone()).collect(),
        }
    }
}

fn check_boxes(
    boxes: &[BoxItem],
    dim: usize,
    check_size: impl Fn(&BoxItem, usize) -> Result<(), ModelError>,
) -> Result<(), ModelError> {
    let mut seen = std::collections::BTreeSet::new();
    for b in boxes {
        if !seen.insert(b.id.clone()) {
            return Err(ModelError::DuplicateId { id: b.id.clone() });
        }
        if b.size.len() != dim {
            return Err(ModelError::WrongArity {
                id: b.id.clone(),
                expected: dim,
                got: b.size.len(),
            });
        }
        for axis in 0..dim {
            check_size(b, axis)?;
        }
        if let Some(v) = &b.value {
            if v.is_negative() {
                return Err(ModelError::NegativeValue { id: b.id.clone() });
            }
        }
    }
    Ok(())
}

/// Product of the entries of a size vector.
pub fn volume(size: &[Rational]) -> Rational {
    size.iter().fold(Rational::one(), |acc, s| acc * s)
}

/// Sum of box volumes; zero for the empty set, additive over disjoint unions.
pub fn total_volume<'a>(boxes: impl IntoIterator<Item = &'a BoxItem>) -> Rational {
    boxes.into_iter().map(|b| b.volume()).sum()
}

/// Rescales every box by the container sides, yielding an instance over the
/// unit cube. Fit is enforced when the [`Instance`] is built, so this is
/// total.
pub fn normalize(inst: &Instance) -> NormalizedInstance {
    let boxes = inst
        .boxes
        .iter()
        .map(|b| {
            let size = b
                .size
                .iter()
                .zip(&inst.container)
                .map(|(s, side)| s / side)
                .collect();
            b.resized(size)
        })
        .collect();
    NormalizedInstance {
        dim: inst.dim(),
        boxes,
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use fixtures::nine_cubes;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn cube(id: &str, side: Rational, dim: usize) -> BoxItem {
        BoxItem::new(id, vec![side; dim])
    }

    #[test]
    fn normalize_divides_by_container() {
        let inst = Instance::new(
            vec![r(20, 1), r(13, 1)],
            vec![BoxItem::new("1'", vec![r(8, 1), r(7, 1)])],
        )
        .unwrap();
        let norm = normalize(&inst);
        assert_eq!(norm.boxes()[0].size(), &[r(2, 5), r(7, 13)]);
    }

    #[test]
    fn normalize_unit_container_is_identity() {
        let boxes = vec![
            BoxItem::new("a", vec![r(1, 2), r(1, 3)]),
            BoxItem::new("b", vec![r(2, 3), r(1, 5)]),
        ];
        let inst = Instance::new(vec![r(1, 1), r(1, 1)], boxes.clone()).unwrap();
        assert_eq!(normalize(&inst).boxes(), &boxes[..]);
    }

    #[test]
    fn oversized_box_rejected() {
        let err = Instance::new(
            vec![r(10, 1), r(10, 1)],
            vec![BoxItem::new("big", vec![r(11, 1), r(1, 1)])],
        )
        .unwrap_err();
        assert_eq!(
            err,
            ModelError::BoxTooLarge {
                id: "big".into(),
                axis: 0
            }
        );
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = Instance::new(
            vec![r(1, 1)],
            vec![cube("a", r(1, 2), 1), cube("a", r(1, 3), 1)],
        )
        .unwrap_err();
        assert_eq!(err, ModelError::DuplicateId { id: "a".into() });
    }

    #[test]
    fn arity_mismatch_rejected() {
        let err = Instance::new(
            vec![r(1, 1), r(1, 1)],
            vec![BoxItem::new("a", vec![r(1, 2)])],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::WrongArity { expected: 2, got: 1, .. }));
    }

    #[test]
    fn normalized_rejects_out_of_range() {
        let err = NormalizedInstance::new(2, vec![BoxItem::new("a", vec![r(3, 2), r(1, 2)])])
            .unwrap_err();
        assert!(matches!(err, ModelError::OutsideUnitRange { axis: 0, .. }));
        // Zero sizes are allowed: scaled instances may contain them.
        assert!(NormalizedInstance::new(2, vec![BoxItem::new("a", vec![r(0, 1), r(1, 2)])]).is_ok());
    }

    #[test]
    fn volumes() {
        assert_eq!(nine_cubes().total_volume(), r(72, 125));
        assert!(total_volume([].iter()).is_zero());
        let unit = cube("u", r(1, 1), 4);
        assert!(unit.volume().is_one());
        assert_eq!(volume(&[r(2, 3), r(1, 2)]), r(1, 3));
    }

    #[test]
    fn total_volume_additive_over_disjoint_union() {
        let a = vec![cube("a", r(1, 2), 2), cube("b", r(1, 3), 2)];
        let b = vec![cube("c", r(2, 5), 2)];
        let joined: Vec<_> = a.iter().chain(&b).cloned().collect();
        assert_eq!(
            total_volume(&joined),
            total_volume(&a) + total_volume(&b)
        );
    }

    #[test]
    fn subset_keeps_order_and_dim() {
        let inst = nine_cubes();
        let sub = inst.subset(&[4, 1]);
        assert_eq!(sub.dim(), 3);
        assert_eq!(sub.boxes()[0].id(), "c5");
        assert_eq!(sub.boxes()[1].id(), "c2");
    }

    #[test]
    fn values_carried_and_validated() {
        let b = BoxItem::with_value("a", vec![r(1, 2)], r(5, 1));
        let inst = Instance::new(vec![r(1, 1)], vec![b]).unwrap();
        assert_eq!(inst.boxes()[0].value(), Some(&r(5, 1)));
        let bad = BoxItem::with_value("a", vec![r(1, 2)], r(-1, 1));
        assert!(matches!(
            Instance::new(vec![r(1, 1)], vec![bad]),
            Err(ModelError::NegativeValue { .. })
        ));
    }
}
