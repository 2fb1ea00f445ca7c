//! Certificates survive a round trip through text, and tampering is caught.

use std::path::Path;

use packbounds::bounds::cert::{parse_certificate, serialize_certificate, CertError, Certificate};
use packbounds::bounds::{bound_obpp, ustep_scales};
use packbounds::model::format::parse_instance;
use packbounds::model::normalize;
use packbounds::rational::Rational;
use packbounds::scales::ConservativeScale;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/nine_cubes.opp");
    let file = parse_instance(&std::fs::read_to_string(path).unwrap()).unwrap();
    let inst = normalize(&file.instance);

    let mut scales = vec![ConservativeScale::identity(3)];
    scales.extend(ustep_scales(3, &[1, 2, 3]).unwrap());
    let report = bound_obpp(&inst, &scales).unwrap();
    let cert = Certificate::from_report(file, &report).unwrap();

    let text = serialize_certificate(&cert);
    println!("{text}");

    // A verifier needs nothing but the text: the instance is embedded and
    // the scale pipeline is replayed from scratch.
    let parsed = parse_certificate(&text).unwrap();
    let value = parsed.verify().unwrap();
    println!("round trip verified, value {value}");

    // Claiming a stronger bound than the scale delivers must fail.
    let mut forged = parsed;
    forged.value = Rational::from_int(3);
    match forged.verify() {
        Err(CertError::ValueMismatch { claimed, actual }) => {
            println!("forgery rejected: claimed {claimed}, recomputed {actual}");
        }
        other => panic!("forgery slipped through: {other:?}"),
    }
}
