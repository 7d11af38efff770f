use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use super::element::{CmField, Embedding, FieldElement};
use super::quadratic::{KElement, RealEmbedding};
use crate::par::{self, Execution};

/// Outcome of the bounded search for small non-real integers of `O_K[√α]`.
#[derive(Clone, Debug, Serialize)]
pub struct SmallIntegerReport {
    pub bound: f64,
    pub height_cap: u32,
    pub searched: u64,
    /// Coordinate quadruples `(a, b, c, d)` of the witnesses, ordered by height then lexicographically.
    pub witnesses: Vec<[i64; 4]>,
    /// Always `"found"` or `"none found up to cap"`: a finite search is not a proof.
    pub conclusion: String,
}

/// Enumerates `(a + bω) + (c + dω)√α` with all coordinates in `[-cap, cap]`
/// and `(c, d) ≠ 0`, keeping those with `|σ(z)| ≤ bound` for every embedding.
pub fn check_no_small_nonreal_integers(
    field: &Arc<CmField>,
    bound: f64,
    height_cap: u32,
    exec: Execution,
) -> SmallIntegerReport {
    let cap = height_cap as i64;
    let side = 2 * cap + 1;
    let b2 = bound * bound;
    let bound_q = BigRational::from_float(bound).map(|b| &b * &b);
    let outer: Vec<i64> = (-cap..=cap).collect();
    let chunks = par::map(exec, &outer, |&a| {
        let mut hits = Vec::new();
        for b in -cap..=cap {
            for c in -cap..=cap {
                for d in -cap..=cap {
                    if c == 0 && d == 0 {
                        continue;
                    }
                    let z = FieldElement::from_int_quad(field, [a, b, c, d]);
                    let ok = [Embedding::Sigma1, Embedding::Sigma2]
                        .iter()
                        .all(|&s| z.embed(s).norm_sqr() <= b2 * (1.0 + 1e-9) + 1e-12);
                    if ok && exact_within(field, &z, bound_q.as_ref()) {
                        hits.push([a, b, c, d]);
                    }
                }
            }
        }
        hits
    });
    let mut witnesses: Vec<[i64; 4]> = chunks.into_iter().flatten().collect();
    witnesses.sort_by_key(|w| (w.iter().map(|x| x.abs()).max().unwrap_or(0), *w));
    let conclusion = if witnesses.is_empty() {
        "none found up to cap".to_string()
    } else {
        "found".to_string()
    };
    SmallIntegerReport {
        bound,
        height_cap,
        searched: (side as u64).pow(4) - (side as u64).pow(2),
        witnesses,
        conclusion,
    }
}

fn exact_within(field: &Arc<CmField>, z: &FieldElement, bound_sq: Option<&BigRational>) -> bool {
    let n = z.abs_squared();
    let k = field.base();
    match bound_sq {
        Some(bq) => {
            let bk = KElement::from_rational(bq.clone());
            [RealEmbedding::Plus, RealEmbedding::Minus]
                .iter()
                .all(|&r| k.cmp(&n, &bk, r) != std::cmp::Ordering::Greater)
        }
        None => true,
    }
}
