//! Independent dense-matrix and brute-force oracles shared by the
//! integration and acceptance tests. Nothing here calls into the library's
//! algorithms; only plain data goes in and out.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

pub type Edges = Vec<(usize, usize)>;

pub fn random_edges<R: Rng>(rng: &mut R, n: usize, p: f64) -> Edges {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in edges {
        if u != v {
            a[u][v] = true;
            a[v][u] = true;
        }
    }
    a
}

fn degree(a: &[Vec<bool>], i: usize) -> usize {
    a[i].iter().filter(|&&x| x).count()
}

/// Floyd-Warshall; `None` for unreachable pairs.
pub fn distances(a: &[Vec<bool>]) -> Vec<Vec<Option<usize>>> {
    let n = a.len();
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for j in 0..n {
            if a[i][j] {
                d[i][j] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|z| x + y < z) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

pub fn clustering(a: &[Vec<bool>], i: usize) -> f64 {
    let nb: Vec<usize> = (0..a.len()).filter(|&j| a[i][j]).collect();
    if nb.len() < 2 {
        return 0.0;
    }
    let mut links = 0;
    for x in 0..nb.len() {
        for y in x + 1..nb.len() {
            if a[nb[x]][nb[y]] {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (nb.len() * (nb.len() - 1)) as f64
}

/// All simple paths from `s` to `t` with exactly `len` edges.
fn paths_of_length(a: &[Vec<bool>], s: usize, t: usize, len: usize) -> Vec<Vec<usize>> {
    fn walk(a: &[Vec<bool>], path: &mut Vec<usize>, t: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if left == 0 {
            if last == t {
                out.push(path.clone());
            }
            return;
        }
        for next in 0..a.len() {
            if a[last][next] && !path.contains(&next) {
                path.push(next);
                walk(a, path, t, left - 1, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(a, &mut vec![s], t, len, &mut out);
    out
}

/// Unordered pairs, unnormalized, by explicit shortest-path enumeration.
pub fn betweenness(a: &[Vec<bool>], i: usize) -> f64 {
    let n = a.len();
    let d = distances(a);
    let mut total = 0.0;
    for s in 0..n {
        for t in s + 1..n {
            if s == i || t == i {
                continue;
            }
            let Some(len) = d[s][t] else { continue };
            let paths = paths_of_length(a, s, t, len);
            let through = paths.iter().filter(|p| p.contains(&i)).count();
            total += through as f64 / paths.len() as f64;
        }
    }
    total
}

pub fn closeness(a: &[Vec<bool>], i: usize) -> f64 {
    let n = a.len();
    let d = distances(a);
    let reach: Vec<usize> = (0..n).filter_map(|j| d[i][j]).collect();
    let r = reach.len();
    let sum: usize = reach.iter().sum();
    if r < 2 {
        return 0.0;
    }
    r as f64 / sum as f64 * (r - 1) as f64 / (n - 1) as f64
}

pub fn neighbor_degree(a: &[Vec<bool>], i: usize) -> f64 {
    let nb: Vec<usize> = (0..a.len()).filter(|&j| a[i][j]).collect();
    if nb.is_empty() {
        return 0.0;
    }
    nb.iter().map(|&j| degree(a, j) as f64).sum::<f64>() / nb.len() as f64
}

/// Largest adjacency eigenvalue and the unit projection of the all-ones
/// vector onto its eigenspace, by a dense symmetric eigen-solve.
pub fn dominant(a: &[Vec<bool>]) -> (f64, Vec<f64>) {
    let n = a.len();
    if n == 0 || a.iter().all(|r| r.iter().all(|&x| !x)) {
        return (0.0, vec![0.0; n]);
    }
    let m = DMatrix::<f64>::from_fn(n, n, |i, j| if a[i][j] { 1.0 } else { 0.0 });
    let eig = SymmetricEigen::new(m);
    let lambda: f64 = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut proj = vec![0.0; n];
    for (k, &val) in eig.eigenvalues.iter().enumerate() {
        if (val - lambda).abs() < 1e-9 {
            let col = eig.eigenvectors.column(k);
            let weight: f64 = col.iter().sum();
            for i in 0..n {
                proj[i] += weight * col[i];
            }
        }
    }
    let norm = proj.iter().map(|x| x * x).sum::<f64>().sqrt();
    (lambda, proj.iter().map(|x| (x / norm).abs()).collect())
}

/// Adjacency of the subgraph induced by nodes within distance 2 of `center`,
/// with the center's local index.
pub fn ego(a: &[Vec<bool>], center: usize) -> (Vec<Vec<bool>>, usize) {
    let d = distances(a);
    let members: Vec<usize> = (0..a.len()).filter(|&j| d[center][j].is_some_and(|x| x <= 2)).collect();
    let sub = members
        .iter()
        .map(|&x| members.iter().map(|&y| a[x][y]).collect())
        .collect();
    (sub, members.iter().position(|&x| x == center).unwrap())
}

/// The 17 attributes of `target`, straight from their definitions.
pub fn attributes(n: usize, edges: &[(usize, usize)], target: usize) -> [f64; 17] {
    let a = adjacency(n, edges);
    let (_, ec) = dominant(&a);
    let node = [
        degree(&a, target) as f64,
        clustering(&a, target),
        betweenness(&a, target),
        closeness(&a, target),
        ec[target],
        neighbor_degree(&a, target),
    ];

    let (s, _) = ego(&a, target);
    let m = s.len();
    let e = (0..m).map(|i| degree(&s, i)).sum::<usize>() / 2;
    let leaves = (0..m).filter(|&i| degree(&s, i) == 1).count();
    let (ev, sub_ec) = dominant(&s);
    let mean = |f: &dyn Fn(usize) -> f64| (0..m).map(f).sum::<f64>() / m as f64;
    let sub = [
        m as f64,
        e as f64,
        2.0 * e as f64 / m as f64,
        leaves as f64 / m as f64,
        ev,
        if m > 1 { 2.0 * e as f64 / (m * (m - 1)) as f64 } else { 0.0 },
        mean(&|i| clustering(&s, i)),
        mean(&|i| betweenness(&s, i)),
        mean(&|i| closeness(&s, i)),
        mean(&|i| sub_ec[i]),
        mean(&|i| neighbor_degree(&s, i)),
    ];
    let mut out = [0.0; 17];
    out[..6].copy_from_slice(&node);
    out[6..].copy_from_slice(&sub);
    out
}

/// Row `target` of `Â² C` by dense matrix products, `Â = D̃^{-1/2} (A + I) D̃^{-1/2}`.
pub fn dense_propagation(n: usize, edges: &[(usize, usize)], c: &[Vec<f64>], target: usize) -> Vec<f64> {
    let a = adjacency(n, edges);
    let tilde = DMatrix::<f64>::from_fn(n, n, |i, j| if i == j || a[i][j] { 1.0 } else { 0.0 });
    let deg: Vec<f64> = (0..n).map(|i| tilde.row(i).sum()).collect();
    let a_hat = DMatrix::from_fn(n, n, |i, j| tilde[(i, j)] / (deg[i] * deg[j]).sqrt());
    let k = c[0].len();
    let cm = DMatrix::from_fn(n, k, |i, j| c[i][j]);
    let prop = &a_hat * &a_hat * cm;
    prop.row(target).iter().copied().collect()
}

pub fn one_hot(labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    labels
        .iter()
        .map(|&l| (0..k).map(|y| if y == l { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Concordant pairs plus half the tied ones, over all positive/negative pairs.
pub fn pairwise_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if labels[i] && !labels[j] {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}
