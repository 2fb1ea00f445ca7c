//! Packing classes: the combinatorial stand-in for geometric packings.
//!
//! A packing class assigns each axis an "overlap" graph on the boxes. The
//! three defining conditions are: every axis graph is an interval graph
//! (P1), every stable set of an axis graph fits along that axis (P2), and
//! no pair of boxes overlaps in all axes at once (P3). A d-tuple of graphs
//! with these properties exists exactly when the boxes pack, which is what
//! makes the validator here a useful oracle for the bound computations.

use super::OracleError;
use crate::model::NormalizedInstance;
use crate::rational::Rational;
use std::collections::{BTreeMap, BTreeSet};

/// Per-axis edge sets over box ids. An edge means the two boxes' projections
/// onto that axis overlap.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PackingClass {
    dims: Vec<BTreeSet<(String, String)>>,
}

impl PackingClass {
    pub fn new(dim: usize) -> Self {
        PackingClass {
            dims: vec![BTreeSet::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    /// Records an overlap between `a` and `b` along `axis` (unordered).
    pub fn add_edge(&mut self, axis: usize, a: &str, b: &str) -> Result<(), OracleError> {
        if a == b {
            return Err(OracleError::SelfEdge { id: a.to_string() });
        }
        let key = if a < b { (a, b) } else { (b, a) };
        self.dims[axis].insert((key.0.to_string(), key.1.to_string()));
        Ok(())
    }

    pub fn edges(&self, axis: usize) -> &BTreeSet<(String, String)> {
        &self.dims[axis]
    }

    pub fn has_edge(&self, axis: usize, a: &str, b: &str) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.dims[axis]
            .contains(&(key.0.to_string(), key.1.to_string()))
    }
}

/// First violated packing-class condition, or `Valid`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassVerdict {
    Valid,
    /// P1 fails: the axis graph is not an interval graph.
    NotIntervalGraph { axis: usize },
    /// P2 fails: a stable set of the axis graph is wider than the container.
    StableSetTooHeavy { axis: usize, ids: Vec<String> },
    /// P3 fails: a pair of boxes overlaps in every axis.
    SharedEdge { a: String, b: String },
}

const CLASS_LIMIT: usize = 8;

/// Checks the three packing-class conditions against the instance, reporting
/// the first violation in axis order (P1 per axis, then P2 per axis, then
/// P3). Exhaustive for up to 8 boxes.
pub fn validate_packing_class(
    class: &PackingClass,
    inst: &NormalizedInstance,
) -> Result<ClassVerdict, OracleError> {
    if class.dim() != inst.dim() {
        return Err(OracleError::DimMismatch {
            expected: inst.dim(),
            got: class.dim(),
        });
    }
    let n = inst.len();
    if n > CLASS_LIMIT {
        return Err(OracleError::TooLarge {
            what: "boxes for the packing-class oracle",
            got: n,
            limit: CLASS_LIMIT,
        });
    }
    let index: BTreeMap<&str, usize> = inst
        .boxes()
        .iter()
        .enumerate()
        .map(|(i, b)| (b.id(), i))
        .collect();
    let mut adj = vec![vec![0u16; n]; inst.dim()];
    for axis in 0..inst.dim() {
        for (a, b) in class.edges(axis) {
            let &ia = index
                .get(a.as_str())
                .ok_or_else(|| OracleError::UnknownId { id: a.clone() })?;
            let &ib = index
                .get(b.as_str())
                .ok_or_else(|| OracleError::UnknownId { id: b.clone() })?;
            adj[axis][ia] |= 1 << ib;
            adj[axis][ib] |= 1 << ia;
        }
    }

    for (axis, adj) in adj.iter().enumerate() {
        if !is_interval_graph(n, adj) {
            return Ok(ClassVerdict::NotIntervalGraph { axis });
        }
    }
    for (axis, adj) in adj.iter().enumerate() {
        for mask in 1u16..1 << n {
            let stable = (0..n)
                .all(|v| mask >> v & 1 == 0 || adj[v] & mask == 0);
            if !stable {
                continue;
            }
            let width: Rational = (0..n)
                .filter(|v| mask >> v & 1 == 1)
                .map(|v| inst.boxes()[v].size_in(axis).clone())
                .sum();
            if width > Rational::one() {
                let ids = (0..n)
                    .filter(|v| mask >> v & 1 == 1)
                    .map(|v| inst.boxes()[v].id().to_string())
                    .collect();
                return Ok(ClassVerdict::StableSetTooHeavy { axis, ids });
            }
        }
    }
    if inst.dim() > 0 {
        for (a, b) in class.edges(0) {
            if (1..inst.dim()).all(|axis| class.has_edge(axis, a, b)) {
                return Ok(ClassVerdict::SharedEdge {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
    }
    Ok(ClassVerdict::Valid)
}

/// The packing class induced by explicit box positions: an edge per axis
/// wherever the open projections intersect.
pub fn packing_class_from_placement(
    inst: &NormalizedInstance,
    positions: &[Vec<Rational>],
) -> Result<PackingClass, OracleError> {
    let n = inst.len();
    if positions.len() != n {
        return Err(OracleError::PlacementMismatch {
            expected: n,
            got: positions.len(),
        });
    }
    let mut class = PackingClass::new(inst.dim());
    for i in 0..n {
        for j in i + 1..n {
            for axis in 0..inst.dim() {
                let (pi, si) = (&positions[i][axis], inst.boxes()[i].size_in(axis));
                let (pj, sj) = (&positions[j][axis], inst.boxes()[j].size_in(axis));
                let lo = pi.clone().max(pj.clone());
                let hi = (pi.clone() + si).min(pj.clone() + sj);
                if lo < hi {
                    class.add_edge(axis, inst.boxes()[i].id(), inst.boxes()[j].id())?;
                }
            }
        }
    }
    Ok(class)
}

const EXISTS_LIMIT: usize = 4;

/// Whether any valid packing class exists for the instance. See
/// `packing_class_exists_containing`.
pub fn packing_class_exists(inst: &NormalizedInstance) -> Result<bool, OracleError> {
    packing_class_exists_containing(inst, &PackingClass::new(inst.dim()))
}

/// Whether a valid packing class whose axis graphs contain all `required`
/// edges exists, by scanning all graph tuples. Limited to 4 boxes (64 graphs
/// per axis); used to cross-check the geometric oracle and the stretched
/// volume criterion.
pub fn packing_class_exists_containing(
    inst: &NormalizedInstance,
    required: &PackingClass,
) -> Result<bool, OracleError> {
    let n = inst.len();
    if n > EXISTS_LIMIT {
        return Err(OracleError::TooLarge {
            what: "boxes for packing-class enumeration",
            got: n,
            limit: EXISTS_LIMIT,
        });
    }
    if required.dim() != inst.dim() {
        return Err(OracleError::DimMismatch {
            expected: inst.dim(),
            got: required.dim(),
        });
    }
    if n == 0 || inst.dim() == 0 {
        return Ok(true);
    }
    let index: BTreeMap<&str, usize> = inst
        .boxes()
        .iter()
        .enumerate()
        .map(|(i, b)| (b.id(), i))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let m = pairs.len();
    let mut required_masks = vec![0u16; inst.dim()];
    for axis in 0..inst.dim() {
        for (a, b) in required.edges(axis) {
            let &ia = index
                .get(a.as_str())
                .ok_or_else(|| OracleError::UnknownId { id: a.clone() })?;
            let &ib = index
                .get(b.as_str())
                .ok_or_else(|| OracleError::UnknownId { id: b.clone() })?;
            let p = pairs
                .iter()
                .position(|&(i, j)| (i, j) == (ia.min(ib), ia.max(ib)))
                .expect("pair list covers all index pairs");
            required_masks[axis] |= 1 << p;
        }
    }

    // Graphs are bitmasks over the pair list. Keep, per axis, those passing
    // P1 and P2 and containing the required edges; then look for a tuple
    // whose intersection is empty (P3).
    let mut valid: Vec<Vec<u16>> = Vec::with_capacity(inst.dim());
    for axis in 0..inst.dim() {
        let mut good = Vec::new();
        'graph: for gmask in 0u16..1 << m {
            if gmask & required_masks[axis] != required_masks[axis] {
                continue;
            }
            let mut adj = vec![0u16; n];
            for (p, &(i, j)) in pairs.iter().enumerate() {
                if gmask >> p & 1 == 1 {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
            if !is_interval_graph(n, &adj) {
                continue;
            }
            for mask in 1u16..1 << n {
                let stable = (0..n)
                    .all(|v| mask >> v & 1 == 0 || adj[v] & mask == 0);
                if !stable {
                    continue;
                }
                let width: Rational = (0..n)
                    .filter(|v| mask >> v & 1 == 1)
                    .map(|v| inst.boxes()[v].size_in(axis).clone())
                    .sum();
                if width > Rational::one() {
                    continue 'graph;
                }
            }
            good.push(gmask);
        }
        if good.is_empty() {
            return Ok(false);
        }
        valid.push(good);
    }

    fn tuple_search(valid: &[Vec<u16>], axis: usize, meet: u16) -> bool {
        if meet == 0 {
            // The intersection can only shrink, so any completion works.
            return true;
        }
        if axis == valid.len() {
            return false;
        }
        valid[axis]
            .iter()
            .any(|&g| tuple_search(valid, axis + 1, meet & g))
    }
    let full = if m == 0 { 0 } else { (1u16 << m) - 1 };
    if m == 0 {
        // A single box: the empty graph tuple is always valid.
        return Ok(true);
    }
    Ok(tuple_search(&valid, 0, full))
}

const CLIQUE_LIMIT: usize = 12;

/// Size of the largest clique in the graph on `0..n` with the given edges.
pub fn max_clique(n: usize, edges: &[(usize, usize)]) -> Result<usize, OracleError> {
    if n > CLIQUE_LIMIT {
        return Err(OracleError::TooLarge {
            what: "vertices for the clique oracle",
            got: n,
            limit: CLIQUE_LIMIT,
        });
    }
    let mut adj = vec![0u16; n];
    for &(a, b) in edges {
        if a >= n {
            return Err(OracleError::BadVertex { v: a });
        }
        if b >= n {
            return Err(OracleError::BadVertex { v: b });
        }
        if a == b {
            return Err(OracleError::SelfEdge { id: a.to_string() });
        }
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let mut best = 0usize;
    for mask in 0u32..1 << n {
        let is_clique = (0..n).all(|v| {
            mask >> v & 1 == 0 || (u32::from(adj[v]) | 1 << v) & mask == mask
        });
        if is_clique {
            best = best.max(mask.count_ones() as usize);
        }
    }
    Ok(best)
}

/// Interval-graph recognition by clique orderings: a graph is an interval
/// graph exactly when its maximal cliques can be linearly ordered so that
/// the cliques containing any fixed vertex are consecutive. Interval graphs
/// have at most n maximal cliques, which bounds the search.
fn is_interval_graph(n: usize, adj: &[u16]) -> bool {
    if n <= 1 {
        return true;
    }
    let full = (1u32 << n) - 1;
    let mut cliques: Vec<u32> = Vec::new();
    for mask in 1..=full {
        let is_clique = (0..n).all(|v| {
            mask >> v & 1 == 0 || (u32::from(adj[v]) | 1 << v) & mask == mask
        });
        if !is_clique {
            continue;
        }
        let maximal = (0..n).all(|u| {
            mask >> u & 1 == 1 || u32::from(adj[u]) & mask != mask
        });
        if maximal {
            cliques.push(mask);
            if cliques.len() > n {
                return false;
            }
        }
    }
    let k = cliques.len();
    if k <= 1 {
        return true;
    }

    // Which cliques contain each vertex, as a bitmask over clique indices.
    let mut member = vec![0u16; n];
    for (c, &clique) in cliques.iter().enumerate() {
        for v in 0..n {
            if clique >> v & 1 == 1 {
                member[v] |= 1 << c;
            }
        }
    }

    fn consecutive(perm: &[usize], member: &[u16]) -> bool {
        member.iter().all(|&m| {
            if m == 0 {
                return true;
            }
            let mut min = usize::MAX;
            let mut max = 0usize;
            let mut count = 0usize;
            for (pos, &c) in perm.iter().enumerate() {
                if m >> c & 1 == 1 {
                    min = min.min(pos);
                    max = max.max(pos);
                    count += 1;
                }
            }
            max - min + 1 == count
        })
    }

    fn permute(perm: &mut Vec<usize>, used: &mut Vec<bool>, k: usize, member: &[u16]) -> bool {
        if perm.len() == k {
            return consecutive(perm, member);
        }
        for c in 0..k {
            if used[c] {
                continue;
            }
            used[c] = true;
            perm.push(c);
            if permute(perm, used, k, member) {
                return true;
            }
            perm.pop();
            used[c] = false;
        }
        false
    }

    permute(&mut Vec::new(), &mut vec![false; k], k, &member)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoxItem, NormalizedInstance};
    use crate::oracle::find_packing;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn inst(dim: usize, boxes: Vec<(&str, Vec<Rational>)>) -> NormalizedInstance {
        let items = boxes
            .into_iter()
            .map(|(id, size)| BoxItem::new(id, size))
            .collect();
        NormalizedInstance::new(dim, items).unwrap()
    }

    fn adj_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<u16> {
        let mut adj = vec![0u16; n];
        for &(a, b) in edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    #[test]
    fn cycles_are_not_interval_graphs() {
        let c4 = adj_from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(!is_interval_graph(4, &c4));
        let c5 = adj_from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(!is_interval_graph(5, &c5));
        // Chordal completion of C4 is fine.
        let c4_chord = adj_from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        assert!(is_interval_graph(4, &c4_chord));
    }

    #[test]
    fn paths_and_cliques_are_interval_graphs() {
        let path = adj_from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert!(is_interval_graph(5, &path));
        let triangle = adj_from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(is_interval_graph(3, &triangle));
        let empty = adj_from_edges(4, &[]);
        assert!(is_interval_graph(4, &empty));
    }

    #[test]
    fn asteroidal_triple_star_is_not_interval() {
        // Subdivided star K_1,3: the three leaves form an asteroidal triple.
        let adj = adj_from_edges(
            7,
            &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)],
        );
        assert!(!is_interval_graph(7, &adj));
    }

    #[test]
    fn placement_class_of_three_rectangles_is_valid() {
        let two = inst(
            2,
            vec![
                ("a", vec![r(3, 5), r(2, 5)]),
                ("b", vec![r(2, 5), r(3, 5)]),
                ("c", vec![r(2, 5), r(2, 5)]),
            ],
        );
        let pos = find_packing(&two, 8).unwrap().expect("packable");
        let class = packing_class_from_placement(&two, &pos).unwrap();
        assert_eq!(validate_packing_class(&class, &two).unwrap(), ClassVerdict::Valid);
    }

    #[test]
    fn overloaded_stable_set_is_reported() {
        // No edges anywhere: in axis 0 the independent pair {a, b} is wider
        // than the container.
        let two = inst(
            2,
            vec![
                ("a", vec![r(3, 5), r(1, 5)]),
                ("b", vec![r(3, 5), r(1, 5)]),
            ],
        );
        let class = PackingClass::new(2);
        assert_eq!(
            validate_packing_class(&class, &two).unwrap(),
            ClassVerdict::StableSetTooHeavy {
                axis: 0,
                ids: vec!["a".to_string(), "b".to_string()],
            }
        );
    }

    #[test]
    fn shared_edge_is_reported() {
        let two = inst(
            2,
            vec![
                ("a", vec![r(1, 5), r(1, 5)]),
                ("b", vec![r(1, 5), r(1, 5)]),
            ],
        );
        let mut class = PackingClass::new(2);
        class.add_edge(0, "a", "b").unwrap();
        class.add_edge(1, "b", "a").unwrap();
        assert_eq!(
            validate_packing_class(&class, &two).unwrap(),
            ClassVerdict::SharedEdge {
                a: "a".to_string(),
                b: "b".to_string(),
            }
        );
    }

    #[test]
    fn non_interval_axis_is_reported_first() {
        let ids = ["a", "b", "c", "d"];
        let boxes = ids
            .iter()
            .map(|id| (*id, vec![r(1, 5), r(1, 5)]))
            .collect();
        let four = inst(2, boxes);
        let mut class = PackingClass::new(2);
        for (x, y) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            class.add_edge(0, ids[x], ids[y]).unwrap();
        }
        assert_eq!(
            validate_packing_class(&class, &four).unwrap(),
            ClassVerdict::NotIntervalGraph { axis: 0 }
        );
    }

    #[test]
    fn unknown_ids_and_self_edges_are_errors() {
        let one = inst(1, vec![("a", vec![r(1, 2)])]);
        let mut class = PackingClass::new(1);
        class.add_edge(0, "a", "zzz").unwrap();
        assert_eq!(
            validate_packing_class(&class, &one),
            Err(OracleError::UnknownId {
                id: "zzz".to_string()
            })
        );
        let mut class = PackingClass::new(1);
        assert_eq!(
            class.add_edge(0, "a", "a"),
            Err(OracleError::SelfEdge { id: "a".to_string() })
        );
    }

    #[test]
    fn class_existence_matches_geometry_on_small_instances() {
        // Deterministic sweep: packable instances must admit a class, and
        // class existence must never contradict the geometric search.
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for case in 0usize..40 {
            let dim = 2 + case % 2;
            let n = (next() % 3 + 2) as usize;
            let boxes: Vec<(String, Vec<Rational>)> = (0..n)
                .map(|i| {
                    let size = (0..dim)
                        .map(|_| {
                            let den = (next() % 3 + 2) as i64;
                            let num = (next() % den as u64 + 1) as i64;
                            r(num, den)
                        })
                        .collect();
                    (format!("g{i}"), size)
                })
                .collect();
            let items = boxes
                .iter()
                .map(|(id, size)| BoxItem::new(id.clone(), size.clone()))
                .collect();
            let gi = NormalizedInstance::new(dim, items).unwrap();
            let packs = find_packing(&gi, 8).unwrap().is_some();
            let class = packing_class_exists(&gi).unwrap();
            assert_eq!(packs, class, "case {case}: geometry and classes disagree");
        }
    }

    #[test]
    fn max_clique_basics() {
        assert_eq!(max_clique(0, &[]).unwrap(), 0);
        assert_eq!(max_clique(3, &[]).unwrap(), 1);
        assert_eq!(max_clique(3, &[(0, 1), (1, 2), (0, 2)]).unwrap(), 3);
        assert_eq!(
            max_clique(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]).unwrap(),
            3
        );
        assert_eq!(
            max_clique(2, &[(0, 5)]),
            Err(OracleError::BadVertex { v: 5 })
        );
        assert_eq!(
            max_clique(13, &[]),
            Err(OracleError::TooLarge {
                what: "vertices for the clique oracle",
                got: 13,
                limit: 12
            })
        );
    }
}
