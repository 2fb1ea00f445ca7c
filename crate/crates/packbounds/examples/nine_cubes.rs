//! Nine cubes of side 2/5 in the unit cube: plain volume looks harmless,
//! a step scale proves infeasibility, and the brute-force oracle agrees.

use std::path::Path;

use packbounds::bounds::{volume_criterion, Verdict};
use packbounds::dff::DffSpec;
use packbounds::model::format::parse_instance;
use packbounds::model::normalize;
use packbounds::oracle::find_packing;
use packbounds::scales::ConservativeScale;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/nine_cubes.opp");
    let file = parse_instance(&std::fs::read_to_string(path).unwrap()).unwrap();
    let inst = normalize(&file.instance);

    let identity = ConservativeScale::identity(3);
    match volume_criterion(&inst, &identity).unwrap() {
        Verdict::Pass { volume } => println!("identity scale: volume {volume} <= 1, no conclusion"),
        Verdict::Infeasible { .. } => unreachable!(),
    }

    // u(2) maps 2/5 to 1/2, so each cube grows to volume 1/8.
    let u2 = ConservativeScale::from_dffs(vec![DffSpec::u_step(2).unwrap(); 3]);
    match volume_criterion(&inst, &u2).unwrap() {
        Verdict::Infeasible { volume } => {
            println!("scale {}: volume {volume} > 1 -- no packing exists", u2.provenance());
        }
        Verdict::Pass { .. } => unreachable!(),
    }

    // The exhaustive placement search confirms the certificate...
    assert!(find_packing(&inst, 9).unwrap().is_none());
    println!("oracle: exhaustive search finds no packing of all nine cubes");

    // ...and shows the bound is tight: any eight of the cubes do fit.
    let eight = inst.subset(&(0..8).collect::<Vec<_>>());
    let placement = find_packing(&eight, 8).unwrap().expect("eight cubes fit");
    println!("oracle: eight cubes pack, e.g.");
    for (b, pos) in eight.boxes().iter().zip(&placement) {
        let coords: Vec<String> = pos.iter().map(|c| c.to_string()).collect();
        println!("  {} at ({})", b.id(), coords.join(", "));
    }
}
