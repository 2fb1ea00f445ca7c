//! The three scaling-function families, their win and loss zones, and the
//! closure operations. Every claim is re-checked by the exhaustive oracle.

use packbounds::dff::DffSpec;
use packbounds::oracle::{check_dff, DffVerdict};
use packbounds::rational::Rational;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn show(f: &DffSpec, points: &[Rational]) {
    let rendered: Vec<String> = points
        .iter()
        .map(|x| format!("{x} -> {}", f.eval(x).unwrap()))
        .collect();
    println!("{f}: {}", rendered.join(", "));
}

fn main() {
    let points = [r(1, 5), r(1, 3), r(2, 5), r(1, 2), r(3, 5), r(3, 4), r(1, 1)];

    // u(k) fixes sizes x with x*(k+1) integral and rounds everything else
    // to the next lower multiple of 1/k. Its win zone: large sizes between
    // the grid points get rounded up relative to nothing -- but small sizes
    // lose. With k = 2, the size 2/5 wins (2/5 -> 1/2).
    let u2 = DffSpec::u_step(2).unwrap();
    show(&u2, &points);

    // U(eps) keeps the middle of the interval and pushes everything above
    // 1 - eps to the full container width; sizes below eps vanish.
    let u_eps = DffSpec::threshold(r(1, 4)).unwrap();
    show(&u_eps, &points);

    // phi(eps) flattens [eps, 1/2] to a single step 1/m with m = floor(1/eps)
    // and mirrors the complementary steps above 1/2.
    let phi = DffSpec::phi_step(r(1, 3)).unwrap();
    show(&phi, &points);

    // Closure: compositions and convex combinations remain dual feasible.
    let composed = DffSpec::compose(u2.clone(), u_eps.clone());
    let mixed = DffSpec::convex(vec![(r(1, 2), u2.clone()), (r(1, 2), DffSpec::Identity)]).unwrap();
    show(&composed, &points);
    show(&mixed, &points);

    // The oracle enumerates every multiset of sizes with small denominators
    // summing to at most 1 and checks that the images still sum to at most 1.
    for f in [&u2, &u_eps, &phi, &composed, &mixed] {
        match check_dff(f, 10).unwrap() {
            DffVerdict::Holds => println!("verified: {f} is dual feasible up to denominator 10"),
            DffVerdict::Counterexample(xs) => panic!("{f} failed on {xs:?}"),
        }
    }
}
