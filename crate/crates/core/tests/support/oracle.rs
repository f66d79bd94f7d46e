//! Slow, independent reference computations used to cross-check the library.
//! Nothing here calls into the placement or feasibility code under test.

#![allow(dead_code)]

/// One gear as laid out by the reference placement.
#[derive(Debug, Clone, Copy)]
pub struct RefGear {
    pub r: f64,
    pub x: f64,
    pub plane: i64,
    pub axle: usize,
    pub linear: bool,
}

/// Lays out `(radius, coaxial)` steps from scratch. The first step's flag is
/// ignored.
pub fn layout(steps: &[(f64, bool)], plane_limit: Option<i64>) -> Vec<RefGear> {
    let mut out: Vec<RefGear> = Vec::new();
    let mut axles = 0;
    for (i, &(r, coaxial)) in steps.iter().enumerate() {
        if i == 0 {
            out.push(RefGear { r, x: r, plane: 0, axle: 0, linear: false });
            axles = 1;
            continue;
        }
        let p = out[i - 1];
        if coaxial {
            let plane = match plane_limit {
                Some(l) => (p.plane + 1) % l,
                None => p.plane + 1,
            };
            out.push(RefGear { r, x: p.x, plane, axle: p.axle, linear: false });
        } else {
            out.push(RefGear { r, x: p.x + p.r + r, plane: p.plane, axle: axles, linear: true });
            axles += 1;
        }
    }
    out
}

fn meshing(g: &[RefGear], a: usize, b: usize) -> bool {
    (b == a + 1 && g[b].linear) || (a == b + 1 && g[a].linear)
}

/// All-pairs check: every gear against the box, every other gear and every
/// axle. Returns `(feasible, total violation)`.
pub fn naive_feasibility(g: &[RefGear], box_len: f64, axle_r: f64) -> (bool, f64) {
    let mut total = 0.0;
    let mut count = 0;
    let mut add = |d: f64| {
        if d > 0.0 {
            total += d;
            count += 1;
        }
    };
    for a in g {
        add((a.r - a.x).max(0.0) + (a.x + a.r - box_len).max(0.0));
    }
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            if g[i].plane == g[j].plane && !meshing(g, i, j) {
                add(g[i].r + g[j].r - (g[i].x - g[j].x).abs());
            }
        }
    }
    let n_axles = g.iter().map(|a| a.axle).max().map_or(0, |m| m + 1);
    for axle in 0..n_axles {
        let on_axle: Vec<usize> = (0..g.len()).filter(|&m| g[m].axle == axle).collect();
        let x = g[on_axle[0]].x;
        for i in 0..g.len() {
            if g[i].axle == axle || on_axle.iter().any(|&m| meshing(g, i, m)) {
                continue;
            }
            add(g[i].r + axle_r - (g[i].x - x).abs());
        }
    }
    (count == 0, total)
}

fn pop_mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mut s = 0.0;
    for a in v {
        s += a;
    }
    let m = s / n;
    let mut q = 0.0;
    for a in v {
        q += (a - m) * (a - m);
    }
    (m, q / n)
}

/// `[var x, mean ratio, var ratio, mean r, var r, n]` from raw centres and radii.
pub fn scalar_novelty(xs: &[f64], rs: &[f64]) -> [f64; 6] {
    let ratios: Vec<f64> = (1..rs.len()).map(|i| rs[i] / rs[i - 1]).collect();
    let (_, vx) = pop_mean_var(xs);
    let (mq, vq) = pop_mean_var(&ratios);
    let (mr, vr) = pop_mean_var(rs);
    [vx, mq, vq, mr, vr, rs.len() as f64]
}

/// Every step list of `len` gears over radii `5, 10, ..., 30`, as
/// `(gear_id, coaxial)`, with the first flag fixed to linear.
pub fn enumerate(len: usize) -> Vec<Vec<(u8, bool)>> {
    let mut all: Vec<Vec<(u8, bool)>> = (1..=6).map(|id| vec![(id, false)]).collect();
    for _ in 1..len {
        let mut next = Vec::with_capacity(all.len() * 12);
        for prefix in &all {
            for id in 1..=6u8 {
                for coaxial in [false, true] {
                    let mut s = prefix.clone();
                    s.push((id, coaxial));
                    next.push(s);
                }
            }
        }
        all = next;
    }
    all
}
