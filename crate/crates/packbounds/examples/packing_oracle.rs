//! The ground-truth engines: exhaustive placement search, packing classes,
//! and the clique requirement that links them to conservative scales.

use packbounds::bounds::clique_requirement;
use packbounds::model::{BoxItem, NormalizedInstance};
use packbounds::oracle::{
    find_packing, max_clique, packing_class_exists, packing_class_from_placement,
    validate_packing_class, ClassVerdict,
};
use packbounds::rational::Rational;
use packbounds::scales::ConservativeScale;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn main() {
    let inst = NormalizedInstance::new(
        2,
        vec![
            BoxItem::new("a", vec![r(3, 5), r(1, 2)]),
            BoxItem::new("b", vec![r(2, 5), r(1, 2)]),
            BoxItem::new("c", vec![r(1, 1), r(1, 2)]),
        ],
    )
    .unwrap();

    // The search tries only canonical coordinates: each offset is a sum of
    // other boxes' sizes in that axis. That set is exhaustive for deciding
    // packability.
    let placement = find_packing(&inst, 8).unwrap().expect("this instance packs");
    println!("placement found:");
    for (b, pos) in inst.boxes().iter().zip(&placement) {
        println!("  {} at ({}, {})", b.id(), pos[0], pos[1]);
    }

    // Projecting the placement's overlaps yields a packing class: per axis,
    // an edge wherever two boxes' intervals overlap. The validator checks
    // the defining conditions directly.
    let class = packing_class_from_placement(&inst, &placement).unwrap();
    for axis in 0..2 {
        let edges: Vec<String> = class
            .edges(axis)
            .iter()
            .map(|(x, y)| format!("{x}{y}"))
            .collect();
        println!("axis {} overlap edges: {{{}}}", axis + 1, edges.join(", "));
    }
    assert_eq!(validate_packing_class(&class, &inst).unwrap(), ClassVerdict::Valid);
    println!("packing class is valid");

    // The existence of a packing class is equivalent to packability; the
    // two oracles cross-check each other.
    assert!(packing_class_exists(&inst).unwrap());

    // Any subset must contain a clique of size ceil(width) in each axis
    // graph -- here the full set needs a 2-clique in axis 2 (widths sum
    // to 3/2), and indeed every pair overlaps vertically.
    let need = clique_requirement(&inst, &["a", "b", "c"], &ConservativeScale::identity(2), 1)
        .unwrap();
    let edges: Vec<(usize, usize)> = class
        .edges(1)
        .iter()
        .map(|(x, y)| {
            (
                inst.box_by_id(x).unwrap().0,
                inst.box_by_id(y).unwrap().0,
            )
        })
        .collect();
    let omega = max_clique(3, &edges).unwrap();
    println!("axis 2: clique requirement {need}, maximum clique {omega}");
    assert!(omega as i64 >= need);
}
