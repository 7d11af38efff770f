//! Adaptive Gauss–Kronrod (7/15) quadrature with deterministic pairwise accumulation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::par::pairwise_sum;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod rule on `[a, b]`, with the embedded 7-point Gauss difference as error.
pub fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub intervals: usize,
}

/// Hard cap on leaves, independent of depth.
const MAX_INTERVALS: usize = 200_000;

#[derive(Clone, Copy, Debug)]
struct Leaf {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Leaf {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Leaf {}

impl PartialOrd for Leaf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Leaf {
    // largest error first; ties broken by position so the order is total
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

/// Global adaptive bisection: the leaf with the largest error estimate is split until the
/// summed error is at most `max(abs_tol, rel_tol·|value|)`. Leaves deeper than `max_depth`
/// are frozen; hitting that limit or the interval cap clears `converged`.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64, max_depth: u32) -> Estimate {
    let (v, e) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Leaf> = Vec::new();
    heap.push(Leaf {
        a,
        b,
        value: v,
        error: e,
        depth: 0,
    });
    let (mut total_v, mut total_e) = (v, e);
    let mut converged = true;
    while let Some(top) = heap.peek().copied() {
        let tol = abs_tol.max(rel_tol * total_v.abs());
        if total_e <= tol || total_e <= 50.0 * f64::EPSILON * total_v.abs() {
            break;
        }
        if heap.len() + frozen.len() >= MAX_INTERVALS {
            converged = false;
            break;
        }
        heap.pop();
        if top.depth >= max_depth {
            converged = false;
            frozen.push(top);
            continue;
        }
        let m = 0.5 * (top.a + top.b);
        let (v1, e1) = gk15(f, top.a, m);
        let (v2, e2) = gk15(f, m, top.b);
        total_v += v1 + v2 - top.value;
        total_e += e1 + e2 - top.error;
        let d = top.depth + 1;
        heap.push(Leaf {
            a: top.a,
            b: m,
            value: v1,
            error: e1,
            depth: d,
        });
        heap.push(Leaf {
            a: m,
            b: top.b,
            value: v2,
            error: e2,
            depth: d,
        });
    }
    let mut leaves: Vec<Leaf> = heap.into_vec();
    leaves.extend(frozen);
    leaves.sort_by(|x, y| x.a.total_cmp(&y.a));
    let vals: Vec<f64> = leaves.iter().map(|l| l.value).collect();
    let errs: Vec<f64> = leaves.iter().map(|l| l.error).collect();
    Estimate {
        value: pairwise_sum(&vals),
        error: pairwise_sum(&errs),
        converged,
        intervals: leaves.len(),
    }
}
