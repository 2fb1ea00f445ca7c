//! Stretching: preset overlap edges let one box grow, and the grown
//! instance fails the volume balance even though the original passed it.

use std::path::Path;

use packbounds::bounds::cert::{Certificate, ScaleStep};
use packbounds::bounds::BoundKind;
use packbounds::model::format::parse_instance;
use packbounds::model::normalize;
use packbounds::scales::{apply_scale, feasible_companions, stretch};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/six_boxes.opp");
    let file = parse_instance(&std::fs::read_to_string(path).unwrap()).unwrap();
    let inst = normalize(&file.instance);

    println!("total volume before stretching: {}", inst.total_volume());

    // Boxes 3' overlaps 1' and 5' overlaps 4' along the first axis (the
    // presets), so any horizontal slab through 1' misses 3' -- the sets
    // that can share such a slab are 1' plus conflict-free companions.
    let companions = feasible_companions(&inst, &file.edges, "1'", 0).unwrap();
    println!("companions of 1' in the first axis: {}", companions.join(", "));

    // The widest conflict-free companion set containing 1' has total width
    // lambda; the slack 1 - lambda can be grafted onto 1'.
    let outcome = stretch(&inst, &file.edges, "1'", 0).unwrap();
    assert!(outcome.exact);
    println!("lambda = {} (exact)", outcome.lambda);

    let stretched = apply_scale(&inst, &outcome.scale).unwrap();
    let grown = stretched.box_by_id("1'").unwrap().1;
    println!(
        "box 1' grows to {} x {}",
        grown.size_in(0),
        grown.size_in(1)
    );
    let volume = stretched.total_volume();
    println!("total volume after stretching: {volume} > 1");

    // Package the argument as a certificate and re-check it from scratch.
    let cert = Certificate::new(
        BoundKind::OppInfeasibility,
        volume,
        file,
        vec![ScaleStep::Stretch {
            box_id: "1'".into(),
            axis: 0,
            lambda: outcome.lambda,
        }],
    );
    cert.verify().unwrap();
    println!("\nverified certificate:\n");
    print!(
        "{}",
        packbounds::bounds::cert::serialize_certificate(&cert)
    );
}
