//! Brute-force reference implementations used to check the library.
//!
//! Each oracle works on plain nested vectors and follows the textbook
//! definition directly, sharing no code paths with `dsi_core`.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;

pub type Rows = Vec<Vec<f64>>;

/// Pairwise cosine of rows by explicit double loop; diagonal 1.
pub fn cosine_matrix(rows: &Rows) -> Rows {
    let n = rows.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                out[i][j] = 1.0;
                continue;
            }
            let mut dot = 0.0;
            let mut ni = 0.0;
            let mut nj = 0.0;
            for k in 0..rows[i].len() {
                dot += rows[i][k] * rows[j][k];
                ni += rows[i][k] * rows[i][k];
                nj += rows[j][k] * rows[j][k];
            }
            out[i][j] = dot / (ni.sqrt() * nj.sqrt());
        }
    }
    out
}

/// Off-diagonal entries, row-major, min-max scaled (0.5 if all equal).
pub fn normalized_offdiag_flat(m: &Rows) -> Vec<f64> {
    let n = m.len();
    let mut flat = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                flat.push(m[i][j]);
            }
        }
    }
    let lo = flat.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = flat.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    flat.iter()
        .map(|&v| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 })
        .collect()
}

/// Full normalized matrix (diagonal 1) built from the flat oracle.
pub fn normalized_full(m: &Rows) -> Rows {
    let n = m.len();
    let flat = normalized_offdiag_flat(m);
    let mut it = flat.into_iter();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 1.0 } else { it.next().unwrap() })
                .collect()
        })
        .collect()
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    dot / (nu * nv)
}

pub fn mse(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / u.len() as f64
}

pub fn mae(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).abs()).sum::<f64>() / u.len() as f64
}

/// Mean SSIM over every 7×7 window (whole matrix if smaller), computing
/// each window's mean, sample variance and covariance from scratch.
pub fn ssim_windows(a: &Rows, b: &Rows) -> f64 {
    let n = a.len();
    let w = n.min(7);
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let mut total = 0.0;
    let mut count = 0;
    for i0 in 0..=n - w {
        for j0 in 0..=n - w {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for i in i0..i0 + w {
                for j in j0..j0 + w {
                    xs.push(a[i][j]);
                    ys.push(b[i][j]);
                }
            }
            let m = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / m;
            let my = ys.iter().sum::<f64>() / m;
            let vx = xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / (m - 1.0);
            let vy = ys.iter().map(|y| (y - my).powi(2)).sum::<f64>() / (m - 1.0);
            let cov = xs
                .iter()
                .zip(&ys)
                .map(|(x, y)| (x - mx) * (y - my))
                .sum::<f64>()
                / (m - 1.0);
            total += (2.0 * mx * my + c1) * (2.0 * cov + c2)
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    total / count as f64
}

/// Position of `j` in row `i` when classes are listed self first, then by
/// descending similarity with ties by ascending index. Counted, not sorted.
pub fn rank_of(sim: &Rows, i: usize, j: usize) -> usize {
    if i == j {
        return 0;
    }
    let before = (0..sim.len())
        .filter(|&k| k != i && k != j)
        .filter(|&k| sim[i][k] > sim[i][j] || (sim[i][k] == sim[i][j] && k < j))
        .count();
    before + 1
}

/// (DM over all samples, DM over misclassified samples) by expanding the
/// confusion counts into individual samples.
pub fn dm_by_samples(counts: &[Vec<u32>], sim: &Rows) -> (f64, Option<f64>) {
    let n = counts.len();
    let mut all = Vec::new();
    let mut errors = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for _ in 0..counts[i][j] {
                let r = rank_of(sim, i, j) as f64;
                all.push(r);
                if i != j {
                    errors.push(r);
                }
            }
        }
    }
    let norm = (n - 1) as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let dm_all = mean(&all) / norm;
    let dm_err = if errors.is_empty() {
        None
    } else {
        Some(mean(&errors) / norm)
    };
    (dm_all, dm_err)
}

fn numpy_quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let below = pos.floor() as usize;
    let above = pos.ceil() as usize;
    sorted[below] * (1.0 - (pos - below as f64)) + sorted[above] * (pos - below as f64)
}

/// (mean, max, min) WSI via per-row sorting and interpolated quantiles.
pub fn wsi_by_sorting(m: &Rows) -> (f64, f64, f64) {
    let n = m.len();
    let mut upper = Vec::new();
    let mut max_sum = 0.0;
    let mut min_sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            upper.push(m[i][j]);
        }
        let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| m[i][j]).collect();
        row.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q_hi = numpy_quantile(&row, 0.95);
        let q_lo = numpy_quantile(&row, 0.05);
        let top: Vec<f64> = row.iter().cloned().filter(|&v| v >= q_hi).collect();
        let bottom: Vec<f64> = row.iter().cloned().filter(|&v| v <= q_lo).collect();
        max_sum += top.iter().sum::<f64>() / top.len() as f64;
        min_sum += bottom.iter().sum::<f64>() / bottom.len() as f64;
    }
    (
        upper.iter().sum::<f64>() / upper.len() as f64,
        max_sum / n as f64,
        min_sum / n as f64,
    )
}

/// All-pairs undirected distances over child→parent edges, with a virtual
/// node adjacent to every root, by Floyd–Warshall.
pub fn all_pairs_distances(parents: &[Vec<usize>]) -> Vec<Vec<u32>> {
    let n = parents.len();
    let v = n; // virtual root
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            d[c][p] = 1;
            d[p][c] = 1;
        }
        if ps.is_empty() {
            d[c][v] = 1;
            d[v][c] = 1;
        }
    }
    for k in 0..=n {
        for i in 0..=n {
            for j in 0..=n {
                let through = d[i][k] + d[k][j];
                if through < d[i][j] {
                    d[i][j] = through;
                }
            }
        }
    }
    d.truncate(n);
    d.iter_mut().for_each(|r| r.truncate(n));
    d
}

/// Plain breadth-first search between two nodes over the same graph.
pub fn bfs_distance(parents: &[Vec<usize>], a: usize, b: usize) -> u32 {
    let n = parents.len();
    let mut adj = vec![Vec::new(); n + 1];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            adj[c].push(p);
            adj[p].push(c);
        }
        if ps.is_empty() {
            adj[c].push(n);
            adj[n].push(c);
        }
    }
    let mut dist = vec![u32::MAX; n + 1];
    let mut queue = std::collections::VecDeque::from([a]);
    dist[a] = 0;
    while let Some(u) = queue.pop_front() {
        if u == b {
            return dist[u];
        }
        for &w in &adj[u] {
            if dist[w] == u32::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    u32::MAX
}

/// Random forest/DAG: node k>0 gets up to `max_parents` parents among
/// earlier nodes; with probability `root_p` it gets none.
pub fn random_dag(
    rng: &mut impl Rng,
    n: usize,
    max_parents: usize,
    root_p: f64,
) -> Vec<Vec<usize>> {
    (0..n)
        .map(|k| {
            if k == 0 || rng.gen_bool(root_p) {
                return Vec::new();
            }
            let count = rng.gen_range(1..=max_parents);
            let mut ps: Vec<usize> = (0..count).map(|_| rng.gen_range(0..k)).collect();
            ps.sort();
            ps.dedup();
            ps
        })
        .collect()
}

/// Taxonomy JSON with ids `s<k>` for a parent list.
pub fn taxonomy_json(parents: &[Vec<usize>]) -> String {
    let entries: Vec<String> = parents
        .iter()
        .enumerate()
        .map(|(k, ps)| {
            let ps: Vec<String> = ps.iter().map(|p| format!("\"s{p}\"")).collect();
            format!("\"s{k}\": [{}]", ps.join(", "))
        })
        .collect();
    format!("{{{}}}", entries.join(", "))
}

pub fn random_rows(rng: &mut impl Rng, n: usize, d: usize) -> Rows {
    (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

pub fn random_counts(rng: &mut impl Rng, n: usize, max: u32) -> Vec<Vec<u32>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(0..=max)).collect())
        .collect()
}

/// Random symmetric similarity matrix with unit diagonal and entries in
/// [-1, 1].
pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> Rows {
    let mut m = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(-1.0..1.0);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}
