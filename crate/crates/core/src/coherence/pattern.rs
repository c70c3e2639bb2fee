//! Zero patterns, the Boolean-power density test, and graph diagnostics.

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use super::UnitaryMatrix;

/// Square Boolean matrix stored as bitset rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternMatrix {
    d: usize,
    rows: Vec<Vec<u64>>,
}

fn words(d: usize) -> usize {
    d.div_ceil(64)
}

impl PatternMatrix {
    pub fn empty(d: usize) -> Self {
        PatternMatrix {
            d,
            rows: vec![vec![0; words(d)]; d],
        }
    }

    /// Panics if `bits` is not square.
    pub fn from_bits(bits: Vec<Vec<bool>>) -> Self {
        let d = bits.len();
        let mut p = Self::empty(d);
        for (i, row) in bits.iter().enumerate() {
            assert_eq!(row.len(), d, "pattern must be square");
            for (j, &b) in row.iter().enumerate() {
                if b {
                    p.set(i, j);
                }
            }
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.rows[i][j / 64] |= 1 << (j % 64);
    }

    pub fn to_bits(&self) -> Vec<Vec<bool>> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn count_true(&self) -> usize {
        self.rows
            .iter()
            .flatten()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn all_true(&self) -> bool {
        self.count_true() == self.d * self.d
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::empty(self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                if self.get(i, j) {
                    t.set(j, i);
                }
            }
        }
        t
    }

    /// Boolean product: row `i` of the result is the OR of the rows of
    /// `other` selected by row `i` of `self`.
    pub fn bool_mul(&self, other: &Self) -> Self {
        let mut out = Self::empty(self.d);
        for i in 0..self.d {
            for k in 0..self.d {
                if self.get(i, k) {
                    for (o, w) in out.rows[i].iter_mut().zip(&other.rows[k]) {
                        *o |= w;
                    }
                }
            }
        }
        out
    }

    pub fn has_loop(&self) -> bool {
        (0..self.d).any(|i| self.get(i, i))
    }
}

/// `true` where `|u_ij| > tol_zero`.
pub fn pattern_matrix(u: &UnitaryMatrix, tol_zero: f64) -> PatternMatrix {
    let d = u.dim();
    let m = u.matrix();
    let mut p = PatternMatrix::empty(d);
    for i in 0..d {
        for j in 0..d {
            if m[(i, j)].norm() > tol_zero {
                p.set(i, j);
            }
        }
    }
    p
}

/// `P^T P` under Boolean arithmetic: `(a, b)` is set when columns `a` and `b`
/// of `P` share a row.
pub fn gram_pattern(p: &PatternMatrix) -> PatternMatrix {
    let t = p.transpose();
    let d = p.dim();
    let mut out = PatternMatrix::empty(d);
    for a in 0..d {
        for b in 0..d {
            if t.rows[a].iter().zip(&t.rows[b]).any(|(x, y)| x & y != 0) {
                out.set(a, b);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct H2Verdict {
    pub satisfied: bool,
    /// Least `M` with `(P^T P)^M` all-true.
    pub minimal_m: Option<usize>,
}

/// Wielandt's bound `(d - 1)^2 + 1` on the exponent of a primitive matrix.
pub fn wielandt_bound(d: usize) -> usize {
    (d - 1) * (d - 1) + 1
}

/// Searches the powers of `P^T P` up to the Wielandt bound for an all-true
/// power.
pub fn check_h2_pattern(p: &PatternMatrix) -> H2Verdict {
    let q = gram_pattern(p);
    let mut cur = q.clone();
    for m in 1..=wielandt_bound(p.dim()) {
        if cur.all_true() {
            return H2Verdict {
                satisfied: true,
                minimal_m: Some(m),
            };
        }
        cur = cur.bool_mul(&q);
    }
    H2Verdict {
        satisfied: false,
        minimal_m: None,
    }
}

pub fn check_h2(u: &UnitaryMatrix) -> H2Verdict {
    check_h2_pattern(&pattern_matrix(u, crate::tol::TOL_ZERO))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDiagnosis {
    pub irreducible: bool,
    pub aperiodic: bool,
    /// Period of the graph when irreducible.
    pub period: Option<usize>,
    /// `max_i dist(i -> i0) + max_j dist(i0 -> j)` minimised over vertices
    /// `i0` with a loop. For a symmetric pattern this is `2 max_i dist(i, i0)`.
    pub m_upper: Option<usize>,
}

fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Treats `p` as the adjacency matrix of a directed graph (`i -> j` when
/// `p[i][j]`).
pub fn graph_diagnosis(p: &PatternMatrix) -> GraphDiagnosis {
    let d = p.dim();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..d).map(|_| g.add_node(())).collect();
    let mut fwd = vec![Vec::new(); d];
    let mut rev = vec![Vec::new(); d];
    for i in 0..d {
        for j in 0..d {
            if p.get(i, j) {
                g.add_edge(nodes[i], nodes[j], ());
                fwd[i].push(j);
                rev[j].push(i);
            }
        }
    }
    let irreducible = d > 0 && kosaraju_scc(&g).len() == 1;
    if !irreducible {
        return GraphDiagnosis {
            irreducible,
            aperiodic: false,
            period: None,
            m_upper: None,
        };
    }

    // period = gcd over edges u -> v of level(u) + 1 - level(v)
    let level = bfs(&fwd, 0);
    let mut period = 0;
    for u in 0..d {
        for &v in &fwd[u] {
            let lu = level[u].unwrap() as i64;
            let lv = level[v].unwrap() as i64;
            period = gcd(period, (lu + 1 - lv).unsigned_abs() as usize);
        }
    }

    let m_upper = (0..d)
        .filter(|&i0| p.get(i0, i0))
        .map(|i0| {
            let to = bfs(&rev, i0).into_iter().map(|x| x.unwrap()).max().unwrap();
            let from = bfs(&fwd, i0).into_iter().map(|x| x.unwrap()).max().unwrap();
            to + from
        })
        .min();

    GraphDiagnosis {
        irreducible,
        aperiodic: period == 1,
        period: Some(period),
        m_upper,
    }
}
