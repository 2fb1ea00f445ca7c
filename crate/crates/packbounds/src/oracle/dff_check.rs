//! Exhaustive dual-feasibility checking.
//!
//! A function u on [0,1] is dual feasible when every finite multiset of
//! rationals with sum at most 1 keeps its image sum at most 1. Restricted to
//! arguments with denominator at most D the multiset space is finite, and an
//! unbounded knapsack over the common grid 1/lcm(1..D) searches it
//! exhaustively: `Holds` means no violating multiset of grid rationals
//! exists, and any returned counterexample is a genuine violation.

use super::OracleError;
use crate::dff::DffSpec;
use crate::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

const GRID_LIMIT: u64 = 10_000_000;

/// Outcome of a dual-feasibility check. The counterexample is a multiset of
/// arguments with sum at most 1 whose image sum exceeds 1, sorted descending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DffVerdict {
    Holds,
    Counterexample(Vec<Rational>),
}

/// Checks a DFF expression for dual feasibility over all rationals with
/// denominator at most `max_denominator`.
pub fn check_dff(f: &DffSpec, max_denominator: u32) -> Result<DffVerdict, OracleError> {
    f.validate()?;
    check_fn(|x| f.eval(x).expect("validated spec on in-range input"), max_denominator)
}

/// Checks an arbitrary function for dual feasibility over the same grid.
/// The closure is only called with arguments in [0, 1].
pub fn check_fn<F>(u: F, max_denominator: u32) -> Result<DffVerdict, OracleError>
where
    F: Fn(&Rational) -> Rational,
{
    if max_denominator < 2 {
        return Err(OracleError::BadMaxDenominator);
    }
    let mut lcm = BigInt::one();
    for q in 2..=max_denominator {
        lcm = lcm.lcm(&BigInt::from(q));
    }
    let grid = match lcm.to_u64() {
        Some(l) if l <= GRID_LIMIT => l,
        _ => {
            return Err(OracleError::TooLarge {
                what: "dff oracle grid (lcm of denominators)",
                got: lcm.to_usize().unwrap_or(usize::MAX),
                limit: GRID_LIMIT as usize,
            })
        }
    };

    // Zero can repeat without bound, so a positive image there is already a
    // violation on its own.
    let at_zero = u(&Rational::zero());
    if at_zero.is_positive() {
        let copies = (Rational::one() / &at_zero)
            .floor()
            .to_usize()
            .unwrap_or(usize::MAX - 1)
            + 1;
        return Ok(DffVerdict::Counterexample(vec![Rational::zero(); copies]));
    }

    let mut values: Vec<Rational> = Vec::new();
    for q in 1..=max_denominator as i64 {
        for p in 1..=q {
            values.push(Rational::new(p, q));
        }
    }
    values.sort();
    values.dedup();

    let mut weights = Vec::with_capacity(values.len());
    let mut images = Vec::with_capacity(values.len());
    for x in &values {
        let w = (x.clone() * &Rational::from_int(grid as i64))
            .numer()
            .to_u64()
            .expect("grid multiple of denominator");
        let y = u(x);
        if y > Rational::one() {
            return Ok(DffVerdict::Counterexample(vec![x.clone()]));
        }
        weights.push(w);
        images.push(y);
    }

    let mut profit_lcm = BigInt::one();
    for y in &images {
        profit_lcm = profit_lcm.lcm(y.denom());
    }
    let violation = if profit_lcm.bits() <= 60 {
        grid_search_int(grid, &weights, &images, &profit_lcm)
    } else {
        grid_search_big(grid, &weights, &images)
    };
    Ok(match violation {
        Some(chain) => {
            let mut multiset: Vec<Rational> =
                chain.into_iter().map(|i| values[i].clone()).collect();
            multiset.sort_by(|a, b| b.cmp(a));
            DffVerdict::Counterexample(multiset)
        }
        None => DffVerdict::Holds,
    })
}

/// Unbounded knapsack with integerized profits; returns the item chain of
/// the first (smallest total weight) multiset whose image sum exceeds 1.
fn grid_search_int(
    grid: u64,
    weights: &[u64],
    images: &[Rational],
    profit_lcm: &BigInt,
) -> Option<Vec<usize>> {
    let one_unit = profit_lcm.to_i128().expect("<= 60 bits");
    let profits: Vec<i128> = images
        .iter()
        .map(|y| {
            (y.clone() * &Rational::from_bigint(profit_lcm.clone()))
                .numer()
                .to_i128()
                .expect("profit fits after integerizing")
        })
        .collect();

    let cap = grid as usize;
    let mut best = vec![i128::MIN; cap + 1];
    let mut parent = vec![-1i32; cap + 1];
    best[0] = 0;
    for c in 1..=cap {
        for (i, (&w, &p)) in weights.iter().zip(&profits).enumerate() {
            if p < 0 {
                continue;
            }
            let w = w as usize;
            if w <= c && best[c - w] != i128::MIN {
                let cand = best[c - w] + p;
                if cand > best[c] {
                    best[c] = cand;
                    parent[c] = i as i32;
                }
            }
        }
        if best[c] > one_unit {
            return Some(rebuild(c, &parent, weights));
        }
    }
    None
}

/// Fallback for image denominators too large to integerize.
fn grid_search_big(grid: u64, weights: &[u64], images: &[Rational]) -> Option<Vec<usize>> {
    let cap = grid as usize;
    let mut best: Vec<Option<Rational>> = vec![None; cap + 1];
    let mut parent = vec![-1i32; cap + 1];
    best[0] = Some(Rational::zero());
    for c in 1..=cap {
        for (i, (&w, p)) in weights.iter().zip(images).enumerate() {
            if p.is_negative() {
                continue;
            }
            let w = w as usize;
            if w > c {
                continue;
            }
            let below = match &best[c - w] {
                Some(v) => v.clone() + p,
                None => continue,
            };
            if best[c].as_ref().map_or(true, |cur| &below > cur) {
                best[c] = Some(below);
                parent[c] = i as i32;
            }
        }
        if matches!(&best[c], Some(v) if v > &Rational::one()) {
            return Some(rebuild(c, &parent, weights));
        }
    }
    None
}

fn rebuild(mut c: usize, parent: &[i32], weights: &[u64]) -> Vec<usize> {
    let mut chain = Vec::new();
    while c > 0 {
        let i = parent[c] as usize;
        chain.push(i);
        c -= weights[i] as usize;
    }
    chain
}
