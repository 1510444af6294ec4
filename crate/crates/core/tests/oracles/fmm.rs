//! Second-order fast marching for the distance function of `dt² + f(t)² dθ²`
//! on a rectangular `(t, θ)` grid.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub struct PolarGrid {
    pub t0: f64,
    pub ht: f64,
    pub nt: usize,
    pub th0: f64,
    pub hth: f64,
    pub nth: usize,
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
    }
}

/// Distances from grid node `(si, sj)`; nodes within `init_radius` cells are
/// seeded with the local flat approximation.
pub fn distances(
    g: &PolarGrid,
    f: &dyn Fn(f64) -> f64,
    si: usize,
    sj: usize,
    init_radius: usize,
) -> Vec<f64> {
    let n = g.nt * g.nth;
    let idx = |i: usize, j: usize| i * g.nth + j;
    let mut val = vec![f64::INFINITY; n];
    let mut frozen = vec![false; n];
    let fs: Vec<f64> = (0..g.nt).map(|i| f(g.t0 + i as f64 * g.ht)).collect();
    let mut heap = BinaryHeap::new();
    let r = init_radius as isize;
    for di in -r..=r {
        for dj in -r..=r {
            let (i, j) = (si as isize + di, sj as isize + dj);
            if i < 0 || j < 0 || i >= g.nt as isize || j >= g.nth as isize {
                continue;
            }
            let (i, j) = (i as usize, j as usize);
            let dt = di as f64 * g.ht;
            let fm = f(g.t0 + (si as f64 + 0.5 * di as f64) * g.ht);
            let d = (dt * dt + (fm * dj as f64 * g.hth).powi(2)).sqrt();
            val[idx(i, j)] = d;
            frozen[idx(i, j)] = true;
        }
    }
    for di in -r..=r {
        for dj in -r..=r {
            let (i, j) = (si as isize + di, sj as isize + dj);
            if i < 0 || j < 0 || i >= g.nt as isize || j >= g.nth as isize {
                continue;
            }
            for (ni, nj) in neighbours(g, i as usize, j as usize) {
                if !frozen[idx(ni, nj)] {
                    let v = update(g, &fs, &val, &frozen, ni, nj);
                    if v < val[idx(ni, nj)] {
                        val[idx(ni, nj)] = v;
                        heap.push(Item(v, idx(ni, nj)));
                    }
                }
            }
        }
    }
    while let Some(Item(v, k)) = heap.pop() {
        if frozen[k] || v > val[k] {
            continue;
        }
        frozen[k] = true;
        let (i, j) = (k / g.nth, k % g.nth);
        for (ni, nj) in neighbours(g, i, j) {
            let m = idx(ni, nj);
            if !frozen[m] {
                let u = update(g, &fs, &val, &frozen, ni, nj);
                if u < val[m] {
                    val[m] = u;
                    heap.push(Item(u, m));
                }
            }
        }
    }
    val
}

fn neighbours(g: &PolarGrid, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> {
    let mut out = Vec::with_capacity(4);
    if i > 0 {
        out.push((i - 1, j));
    }
    if i + 1 < g.nt {
        out.push((i + 1, j));
    }
    if j > 0 {
        out.push((i, j - 1));
    }
    if j + 1 < g.nth {
        out.push((i, j + 1));
    }
    out.into_iter()
}

/// Upwind value along one axis: `(coefficient, target)` with second-order
/// differences when two frozen upwind nodes are available.
fn axis(
    val: &[f64],
    frozen: &[bool],
    k1: Option<usize>,
    k2: Option<usize>,
    h: f64,
) -> Option<(f64, f64)> {
    let k1 = k1.filter(|&k| frozen[k])?;
    let v1 = val[k1];
    if let Some(k2) = k2.filter(|&k| frozen[k]) {
        let v2 = val[k2];
        if v2 <= v1 {
            return Some((1.5 / h, (4.0 * v1 - v2) / 3.0));
        }
    }
    Some((1.0 / h, v1))
}

fn update(g: &PolarGrid, fs: &[f64], val: &[f64], frozen: &[bool], i: usize, j: usize) -> f64 {
    let idx = |i: usize, j: usize| i * g.nth + j;
    let best = |a: Option<(f64, f64)>, b: Option<(f64, f64)>| match (a, b) {
        (Some(x), Some(y)) => Some(if x.1 - 1.0 / x.0 <= y.1 - 1.0 / y.0 {
            x
        } else {
            y
        }),
        (x, None) => x,
        (None, y) => y,
    };
    let m = |i: usize, d: isize, n: usize| -> Option<usize> {
        let k = i as isize + d;
        (k >= 0 && (k as usize) < n).then_some(k as usize)
    };
    let t_axis = best(
        axis(
            val,
            frozen,
            m(i, -1, g.nt).map(|a| idx(a, j)),
            m(i, -2, g.nt).map(|a| idx(a, j)),
            g.ht,
        ),
        axis(
            val,
            frozen,
            m(i, 1, g.nt).map(|a| idx(a, j)),
            m(i, 2, g.nt).map(|a| idx(a, j)),
            g.ht,
        ),
    );
    let hb = fs[i] * g.hth;
    let th_axis = best(
        axis(
            val,
            frozen,
            m(j, -1, g.nth).map(|b| idx(i, b)),
            m(j, -2, g.nth).map(|b| idx(i, b)),
            hb,
        ),
        axis(
            val,
            frozen,
            m(j, 1, g.nth).map(|b| idx(i, b)),
            m(j, 2, g.nth).map(|b| idx(i, b)),
            hb,
        ),
    );
    let one = |(c, a): (f64, f64)| a + 1.0 / c;
    match (t_axis, th_axis) {
        (Some(x), Some(y)) => {
            // c1²(T−a1)² + c2²(T−a2)² = 1
            let (c1, a1) = (x.0 * x.0, x.1);
            let (c2, a2) = (y.0 * y.0, y.1);
            let qa = c1 + c2;
            let qb = -2.0 * (c1 * a1 + c2 * a2);
            let qc = c1 * a1 * a1 + c2 * a2 * a2 - 1.0;
            let disc = qb * qb - 4.0 * qa * qc;
            let single = one(x).min(one(y));
            if disc >= 0.0 {
                let t = (-qb + disc.sqrt()) / (2.0 * qa);
                if t >= a1.max(a2) {
                    return t;
                }
            }
            single
        }
        (Some(x), None) => one(x),
        (None, Some(y)) => one(y),
        (None, None) => f64::INFINITY,
    }
}
