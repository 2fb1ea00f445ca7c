//! Exact packability of tiny instances.
//!
//! The search relies on the canonical-coordinate property of orthogonal
//! packings: if the boxes fit at all, they fit with every coordinate of
//! every box equal to a subset sum of the other boxes' sizes along that
//! axis. That makes the position space finite and the backtracking search
//! exhaustive, so a `None`/`false` answer is a proof of infeasibility, not
//! a heuristic failure.

use super::OracleError;
use crate::model::NormalizedInstance;
use crate::rational::Rational;
use std::collections::BTreeSet;

/// Default cap on the number of boxes the packing oracles accept.
pub const DEFAULT_PACK_LIMIT: usize = 8;

/// Hard cap for the mask-based oracles (`exact_bin_count`, `exact_okp_value`).
const MASK_LIMIT: usize = 12;

/// Whether all boxes fit into the unit container, for at most
/// `DEFAULT_PACK_LIMIT` boxes.
pub fn exact_packable(inst: &NormalizedInstance) -> Result<bool, OracleError> {
    exact_packable_with_limit(inst, DEFAULT_PACK_LIMIT)
}

/// As `exact_packable`, with a caller-chosen box cap.
pub fn exact_packable_with_limit(
    inst: &NormalizedInstance,
    limit: usize,
) -> Result<bool, OracleError> {
    Ok(find_packing(inst, limit)?.is_some())
}

/// Searches for an orthogonal packing of all boxes into the unit container.
/// Returns the origin corner of each box, indexed like `inst.boxes()`, or
/// `None` when no packing exists.
pub fn find_packing(
    inst: &NormalizedInstance,
    limit: usize,
) -> Result<Option<Vec<Vec<Rational>>>, OracleError> {
    let n = inst.len();
    if n > limit {
        return Err(OracleError::TooLarge {
            what: "boxes for the packing oracle",
            got: n,
            limit,
        });
    }
    if inst.total_volume() > Rational::one() {
        return Ok(None);
    }
    let dim = inst.dim();

    // Largest boxes first: they constrain the layout most.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let va = inst.boxes()[a].volume();
        let vb = inst.boxes()[b].volume();
        vb.cmp(&va).then(a.cmp(&b))
    });

    let mut cands: Vec<Vec<Vec<Rational>>> = Vec::with_capacity(n);
    for &b in &order {
        let mut per_axis = Vec::with_capacity(dim);
        for axis in 0..dim {
            let limit = Rational::one() - inst.boxes()[b].size_in(axis);
            let others: Vec<&Rational> = (0..n)
                .filter(|&k| k != b)
                .map(|k| inst.boxes()[k].size_in(axis))
                .collect();
            per_axis.push(axis_positions(&others, &limit));
        }
        cands.push(per_axis);
    }

    struct Dfs<'a> {
        inst: &'a NormalizedInstance,
        order: &'a [usize],
        cands: &'a [Vec<Vec<Rational>>],
        placed: Vec<Vec<Rational>>,
    }
    impl Dfs<'_> {
        fn rec(&mut self, step: usize) -> bool {
            if step == self.order.len() {
                return true;
            }
            let dim = self.inst.dim();
            let me = &self.inst.boxes()[self.order[step]];
            // Identical boxes are interchangeable; force their positions
            // into lexicographic order to kill the symmetry.
            let twin = step > 0
                && self.inst.boxes()[self.order[step - 1]].size() == me.size();

            let slots = &self.cands[step];
            let mut idx = vec![0usize; dim];
            loop {
                let pos: Vec<Rational> =
                    (0..dim).map(|a| slots[a][idx[a]].clone()).collect();
                let ordered_ok = !twin || pos >= self.placed[step - 1];
                if ordered_ok {
                    let clash = (0..step).any(|t| {
                        overlaps(
                            &pos,
                            me.size(),
                            &self.placed[t],
                            self.inst.boxes()[self.order[t]].size(),
                        )
                    });
                    if !clash {
                        self.placed.push(pos);
                        if self.rec(step + 1) {
                            return true;
                        }
                        self.placed.pop();
                    }
                }
                let mut a = 0;
                while a < dim {
                    idx[a] += 1;
                    if idx[a] < slots[a].len() {
                        break;
                    }
                    idx[a] = 0;
                    a += 1;
                }
                if a == dim {
                    return false;
                }
            }
        }
    }

    let mut dfs = Dfs {
        inst,
        order: &order,
        cands: &cands,
        placed: Vec::with_capacity(n),
    };
    if !dfs.rec(0) {
        return Ok(None);
    }
    let mut result = vec![Vec::new(); n];
    for (step, &b) in order.iter().enumerate() {
        result[b] = dfs.placed[step].clone();
    }
    Ok(Some(result))
}

/// All subset sums of `sizes` that stay at most `limit`, sorted ascending.
fn axis_positions(sizes: &[&Rational], limit: &Rational) -> Vec<Rational> {
    let mut sums = BTreeSet::new();
    sums.insert(Rational::zero());
    for s in sizes {
        if s.is_zero() {
            continue;
        }
        let grown: Vec<Rational> = sums
            .iter()
            .map(|x| x.clone() + *s)
            .filter(|x| x <= limit)
            .collect();
        sums.extend(grown);
    }
    sums.into_iter().collect()
}

/// Open-interior overlap: boxes with a zero-size axis never overlap.
fn overlaps(pa: &[Rational], sa: &[Rational], pb: &[Rational], sb: &[Rational]) -> bool {
    pa.iter().zip(sa).zip(pb.iter().zip(sb)).all(|((a, aw), (b, bw))| {
        let lo = a.clone().max(b.clone());
        let hi = (a.clone() + aw).min(b.clone() + bw);
        lo < hi
    })
}

fn packable_masks(inst: &NormalizedInstance, limit: usize) -> Result<Vec<bool>, OracleError> {
    let n = inst.len();
    let effective = limit.min(MASK_LIMIT);
    if n > effective {
        return Err(OracleError::TooLarge {
            what: "boxes for the mask oracle",
            got: n,
            limit: effective,
        });
    }
    let full = (1usize << n) - 1;
    let mut packable = vec![false; full + 1];
    for mask in 0..=full {
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        packable[mask] = find_packing(&inst.subset(&subset), n)?.is_some();
    }
    Ok(packable)
}

/// Minimum number of unit bins holding all boxes. Exhaustive over subset
/// partitions, so it is the true bin packing optimum.
pub fn exact_bin_count(inst: &NormalizedInstance, limit: usize) -> Result<u64, OracleError> {
    let n = inst.len();
    if n == 0 {
        return Ok(0);
    }
    let packable = packable_masks(inst, limit)?;
    let full = (1usize << n) - 1;
    let mut dp = vec![u32::MAX; full + 1];
    dp[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let mut s = mask;
        while s != 0 {
            // Only submasks containing the lowest box: each box belongs to
            // exactly one bin, so pin the lowest one to avoid recounting.
            if s & low != 0 && packable[s] && dp[mask ^ s] != u32::MAX {
                dp[mask] = dp[mask].min(dp[mask ^ s] + 1);
            }
            s = (s - 1) & mask;
        }
    }
    Ok(u64::from(dp[full]))
}

/// Maximum total value of a subset of boxes that fits into the unit
/// container. Every box must carry a value.
pub fn exact_okp_value(inst: &NormalizedInstance, limit: usize) -> Result<Rational, OracleError> {
    for b in inst.boxes() {
        if b.value().is_none() {
            return Err(OracleError::MissingValue {
                id: b.id().to_string(),
            });
        }
    }
    let n = inst.len();
    if n == 0 {
        return Ok(Rational::zero());
    }
    let packable = packable_masks(inst, limit)?;
    let mut best = Rational::zero();
    for (mask, ok) in packable.iter().enumerate() {
        if !ok {
            continue;
        }
        let value: Rational = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| inst.boxes()[i].value().expect("checked above").clone())
            .sum();
        if value > best {
            best = value;
        }
    }
    Ok(best)
}
