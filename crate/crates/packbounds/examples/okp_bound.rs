//! The knapsack relaxation: transformed volumes become item weights, and
//! the exact one-dimensional optimum caps the packable value from above.

use std::path::Path;

use packbounds::bounds::okp_relaxation_bound;
use packbounds::dff::DffSpec;
use packbounds::model::format::parse_instance;
use packbounds::model::normalize;
use packbounds::oracle::exact_okp_value;
use packbounds::scales::ConservativeScale;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/valued.opp");
    let file = parse_instance(&std::fs::read_to_string(path).unwrap()).unwrap();
    let inst = normalize(&file.instance);

    let scales = [
        ConservativeScale::identity(2),
        ConservativeScale::from_dffs(vec![DffSpec::u_step(1).unwrap(); 2]),
        ConservativeScale::from_dffs(vec![DffSpec::u_step(2).unwrap(); 2]),
    ];
    let exact = exact_okp_value(&inst, 8).unwrap();

    for scale in &scales {
        let bound = okp_relaxation_bound(&inst, scale).unwrap();
        println!("relaxation under {}: value <= {bound}", scale.provenance());
        assert!(bound >= exact, "an upper bound may never undercut the optimum");
    }

    // The plain volume relaxation is weak -- both 3/5-squares "fit" by
    // volume. The step scale u(1) blows each of them up to a full container,
    // which forces the knapsack to choose.
    println!("exact optimum by subset enumeration: {exact}");
}
