//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's algorithms.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;

// ---------------------------------------------------------------------------
// softmax gradient

/// Logits `w / tau + b`.
fn logits(w: &[f64], b: &[f64], tau: f64) -> Vec<f64> {
    w.iter().zip(b).map(|(w, b)| w / tau + b).collect()
}

/// `-log p_best`, written as `log(sum_k exp(s_k - s_best))`.
pub fn neg_log_prob(w: &[f64], b: &[f64], tau: f64, best: usize) -> f64 {
    let s = logits(w, b, tau);
    let sb = s[best];
    if s.iter().all(|&x| x - sb < 700.0) {
        let rest: f64 = s
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != best)
            .map(|(_, &x)| (x - sb).exp())
            .sum();
        rest.ln_1p()
    } else {
        let m = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = s.iter().map(|&x| (x - m).exp()).sum();
        m + z.ln() - sb
    }
}

/// Central finite difference of `-log p_best` with respect to each weight.
pub fn fd_gradient(w: &[f64], b: &[f64], tau: f64, best: usize, h: f64) -> Vec<f64> {
    (0..w.len())
        .map(|j| {
            let mut up = w.to_vec();
            let mut down = w.to_vec();
            up[j] += h;
            down[j] -= h;
            (neg_log_prob(&up, b, tau, best) - neg_log_prob(&down, b, tau, best)) / (2.0 * h)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// TSPTW

#[derive(Debug, Clone, Copy)]
pub struct RawNode {
    pub x: f64,
    pub y: f64,
    pub ready: f64,
    pub due: f64,
    pub service: f64,
}

pub fn to_text(nodes: &[RawNode]) -> String {
    let mut s = String::new();
    for (i, n) in nodes.iter().enumerate() {
        s.push_str(&format!(
            "{i} {} {} 0 {} {} {}\n",
            n.x, n.y, n.ready, n.due, n.service
        ));
    }
    s
}

fn dist(a: &RawNode, b: &RawNode) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

/// (distance, violations) of the closed tour depot -> `order` -> depot.
pub fn simulate(nodes: &[RawNode], order: &[usize]) -> (f64, u32) {
    let mut time = nodes[0].ready.max(0.0);
    let mut at = 0;
    let mut total = 0.0;
    let mut late = 0;
    for &next in order.iter().chain(std::iter::once(&0)) {
        let d = dist(&nodes[at], &nodes[next]);
        total += d;
        let arrive = time + d;
        if arrive > nodes[next].due {
            late += 1;
        }
        time = arrive.max(nodes[next].ready) + nodes[next].service;
        at = next;
    }
    (total, late)
}

pub fn tour_score(nodes: &[RawNode], order: &[usize]) -> f64 {
    let (d, v) = simulate(nodes, order);
    -(d + 1e6 * v as f64)
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Best score over every ordering of the customers, and how many tours
/// were evaluated.
pub fn brute_force(nodes: &[RawNode]) -> (f64, usize) {
    let mut items: Vec<usize> = (1..nodes.len()).collect();
    let mut best = f64::NEG_INFINITY;
    let mut count = 0;
    permute(&mut items, 0, &mut |order| {
        count += 1;
        best = best.max(tour_score(nodes, order));
    });
    (best, count)
}

/// Random instance with `customers` customers whose windows are built around
/// one random tour, so at least one feasible tour exists.
pub fn random_instance<R: Rng>(rng: &mut R, customers: usize) -> Vec<RawNode> {
    random_instance_with(rng, customers, 10, 60)
}

pub fn random_instance_with<R: Rng>(
    rng: &mut R,
    customers: usize,
    lo: u32,
    hi: u32,
) -> Vec<RawNode> {
    let mut nodes = vec![RawNode {
        x: rng.gen_range(0..=100) as f64,
        y: rng.gen_range(0..=100) as f64,
        ready: 0.0,
        due: 0.0,
        service: 0.0,
    }];
    for _ in 0..customers {
        nodes.push(RawNode {
            x: rng.gen_range(0..=100) as f64,
            y: rng.gen_range(0..=100) as f64,
            ready: 0.0,
            due: 0.0,
            service: rng.gen_range(0..=10) as f64,
        });
    }
    let mut order: Vec<usize> = (1..=customers).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut time = 0.0;
    let mut at = 0;
    for &c in &order {
        let arrive = time + dist(&nodes[at], &nodes[c]);
        let width = rng.gen_range(lo..=hi) as f64;
        let slack = rng.gen_range(0.0..width);
        nodes[c].ready = (arrive - slack).max(0.0).floor();
        nodes[c].due = nodes[c].ready + width + 1.0;
        time = arrive.max(nodes[c].ready) + nodes[c].service;
        at = c;
    }
    nodes[0].due = (time + dist(&nodes[at], &nodes[0]) + 100.0).ceil();
    nodes
}

// ---------------------------------------------------------------------------
// SameGame, row-major with row 0 at the top

pub type Grid = Vec<Vec<u8>>;

pub fn random_grid<R: Rng>(rng: &mut R, w: usize, h: usize, colors: u8) -> Grid {
    (0..h)
        .map(|_| (0..w).map(|_| rng.gen_range(1..=colors)).collect())
        .collect()
}

fn flood(g: &Grid, r: usize, c: usize, seen: &mut [Vec<bool>], out: &mut Vec<(usize, usize)>) {
    let color = g[r][c];
    let mut stack = vec![(r, c)];
    seen[r][c] = true;
    while let Some((r, c)) = stack.pop() {
        out.push((r, c));
        let mut near = Vec::new();
        if r > 0 {
            near.push((r - 1, c));
        }
        if r + 1 < g.len() {
            near.push((r + 1, c));
        }
        if c > 0 {
            near.push((r, c - 1));
        }
        if c + 1 < g[0].len() {
            near.push((r, c + 1));
        }
        for (nr, nc) in near {
            if !seen[nr][nc] && g[nr][nc] == color {
                seen[nr][nc] = true;
                stack.push((nr, nc));
            }
        }
    }
}

/// Groups of size two or more as (color, sorted cells), cells as
/// (row from top, col).
pub fn groups(g: &Grid) -> Vec<(u8, Vec<(usize, usize)>)> {
    let h = g.len();
    let w = g[0].len();
    let mut seen = vec![vec![false; w]; h];
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if g[r][c] == 0 || seen[r][c] {
                continue;
            }
            let mut cells = Vec::new();
            flood(g, r, c, &mut seen, &mut cells);
            if cells.len() >= 2 {
                cells.sort_unstable();
                out.push((g[r][c], cells));
            }
        }
    }
    out
}

/// Removes the cells, drops what is above, and closes empty columns.
#[allow(clippy::needless_range_loop)]
pub fn remove(g: &Grid, cells: &[(usize, usize)]) -> Grid {
    let h = g.len();
    let w = g[0].len();
    let mut g = g.clone();
    for &(r, c) in cells {
        g[r][c] = 0;
    }
    let mut columns: Vec<Vec<u8>> = Vec::new();
    for c in 0..w {
        // bottom to top
        let col: Vec<u8> = (0..h).rev().map(|r| g[r][c]).filter(|&v| v != 0).collect();
        if !col.is_empty() {
            columns.push(col);
        }
    }
    let mut out = vec![vec![0u8; w]; h];
    for (c, col) in columns.iter().enumerate() {
        for (k, &v) in col.iter().enumerate() {
            out[h - 1 - k][c] = v;
        }
    }
    out
}

pub fn is_empty(g: &Grid) -> bool {
    g.iter().all(|row| row.iter().all(|&v| v == 0))
}

/// Best total score reachable from `g` by exhaustive search.
pub fn optimum(g: &Grid) -> u64 {
    fn go(g: &Grid, memo: &mut HashMap<Grid, u64>) -> u64 {
        if let Some(&v) = memo.get(g) {
            return v;
        }
        let gs = groups(g);
        let v = if gs.is_empty() {
            if is_empty(g) {
                1000
            } else {
                0
            }
        } else {
            gs.iter()
                .map(|(_, cells)| {
                    let n = cells.len() as u64;
                    (n - 2) * (n - 2) + go(&remove(g, cells), memo)
                })
                .max()
                .unwrap()
        };
        memo.insert(g.clone(), v);
        v
    }
    go(g, &mut HashMap::new())
}
