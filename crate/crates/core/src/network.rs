//! Directed impact networks from entropy-of-impact matrices.
//!
//! Cell `(i, j)` of the entropy matrix becomes the edge `j -> i`: stock `j`
//! impacts stock `i`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactNetwork {
    pub edges: Vec<Edge>,
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
}

impl ImpactNetwork {
    fn from_cells(n: usize, cells: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut net = ImpactNetwork {
            edges: Vec::new(),
            in_degree: vec![0; n],
            out_degree: vec![0; n],
        };
        for (i, j, w) in cells {
            net.edges.push(Edge {
                src: j,
                dst: i,
                weight: w,
            });
            net.in_degree[i] += 1;
            net.out_degree[j] += 1;
        }
        net
    }

    pub fn n(&self) -> usize {
        self.in_degree.len()
    }

    /// In-degree if it exceeds the out-degree, minus the out-degree if the
    /// out-degree is larger, 0 on ties.
    pub fn signed_connectivity(&self) -> Vec<i64> {
        self.in_degree
            .iter()
            .zip(&self.out_degree)
            .map(|(&i, &o)| match i.cmp(&o) {
                std::cmp::Ordering::Greater => i as i64,
                std::cmp::Ordering::Less => -(o as i64),
                std::cmp::Ordering::Equal => 0,
            })
            .collect()
    }

    /// Mean total degree seen from an edge endpoint, `sum deg^2 / (2E)`;
    /// large when edges concentrate on few stocks.
    pub fn edge_incident_connectivity(&self) -> Option<f64> {
        if self.edges.is_empty() {
            return None;
        }
        let sq: usize = self
            .in_degree
            .iter()
            .zip(&self.out_degree)
            .map(|(a, b)| (a + b) * (a + b))
            .sum();
        Some(sq as f64 / (2 * self.edges.len()) as f64)
    }

    pub fn to_dot(&self, name: &str, symbols: &[String]) -> String {
        let signed = self.signed_connectivity();
        let mut s = format!("digraph \"{name}\" {{\n");
        for (k, sym) in symbols.iter().enumerate() {
            let _ = writeln!(
                s,
                "  {k} [label=\"{sym}\", in_degree={}, out_degree={}, signed_connectivity={}];",
                self.in_degree[k], self.out_degree[k], signed[k]
            );
        }
        for e in &self.edges {
            let _ = writeln!(s, "  {} -> {} [weight={}];", e.src, e.dst, e.weight);
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptions {
    pub lo_frac: f64,
    pub hi_frac: f64,
    /// Average over the diagonal too when computing the reference mean.
    pub include_diagonal_in_mean: bool,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            lo_frac: 0.6,
            hi_frac: 0.75,
            include_diagonal_in_mean: false,
        }
    }
}

pub fn mean_entropy(i: &Grid<f64>, include_diagonal: bool) -> f64 {
    if include_diagonal {
        i.cells().iter().sum::<f64>() / i.cells().len() as f64
    } else {
        let (s, c) = i
            .off_diagonal()
            .fold((0.0, 0usize), |(s, c), (_, _, v)| (s + v, c + 1));
        s / c as f64
    }
}

/// Edges for the off-diagonal cells inside the half-open band
/// `lo <I> < I_ij <= hi <I>`.
pub fn threshold_network(i: &Grid<f64>, opts: &ThresholdOptions) -> Result<ImpactNetwork> {
    if !(opts.lo_frac >= 0.0 && opts.lo_frac < opts.hi_frac) {
        return Err(Error::Config(format!(
            "threshold band needs 0 <= lo < hi, got ({}, {})",
            opts.lo_frac, opts.hi_frac
        )));
    }
    if i.n() < 2 {
        return Err(Error::Precondition(
            "network needs at least 2 stocks".into(),
        ));
    }
    let mean = mean_entropy(i, opts.include_diagonal_in_mean);
    let (lo, hi) = (opts.lo_frac * mean, opts.hi_frac * mean);
    Ok(ImpactNetwork::from_cells(
        i.n(),
        i.off_diagonal()
            .filter(|(_, _, &v)| lo < v && v <= hi)
            .map(|(a, b, &v)| (a, b, v)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupNetwork {
    /// 1-based group index, ascending in entropy.
    pub q: usize,
    /// Member cells `(i, j)`.
    pub cells: Vec<(usize, usize)>,
    pub network: ImpactNetwork,
}

impl GroupNetwork {
    /// The entropy matrix restricted to this group, other cells zero.
    pub fn group_matrix(&self, i: &Grid<f64>) -> Grid<f64> {
        let mut g = Grid::filled(i.n(), 0.0);
        for &(a, b) in &self.cells {
            g.set(a, b, *i.get(a, b));
        }
        g
    }
}

/// Ranks off-diagonal cells ascending (ties by `(i, j)`), splits them into
/// `Q` equal groups with the remainder in the last, and builds one network
/// per group.
pub fn group_networks(i: &Grid<f64>, q: usize) -> Result<Vec<GroupNetwork>> {
    let n = i.n();
    let mut cells: Vec<(usize, usize, f64)> =
        i.off_diagonal().map(|(a, b, &v)| (a, b, v)).collect();
    let m = cells.len();
    if q == 0 || q > m {
        return Err(Error::Config(format!(
            "{q} groups for {m} off-diagonal values"
        )));
    }
    cells.sort_by(|x, y| x.2.total_cmp(&y.2).then((x.0, x.1).cmp(&(y.0, y.1))));
    let size = m / q;
    Ok((0..q)
        .map(|g| {
            let end = if g + 1 == q { m } else { (g + 1) * size };
            let mut members = cells[g * size..end].to_vec();
            members.sort_by_key(|c| (c.0, c.1));
            GroupNetwork {
                q: g + 1,
                cells: members.iter().map(|c| (c.0, c.1)).collect(),
                network: ImpactNetwork::from_cells(n, members),
            }
        })
        .collect())
}

/// Edge list `src,dst,I_ij,group` over all groups.
pub fn edges_csv(groups: &[GroupNetwork], symbols: &[String]) -> String {
    let mut s = String::from("src,dst,I_ij,group\n");
    for g in groups {
        for e in &g.network.edges {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                symbols[e.src], symbols[e.dst], e.weight, g.q
            );
        }
    }
    s
}

/// Stock by group table `symbol,in_1,out_1,...,in_Q,out_Q`.
pub fn connectivity_csv(groups: &[GroupNetwork], symbols: &[String]) -> String {
    let mut s = String::from("symbol");
    for g in groups {
        let _ = write!(s, ",in_{0},out_{0}", g.q);
    }
    s.push('\n');
    for (k, sym) in symbols.iter().enumerate() {
        s.push_str(sym);
        for g in groups {
            let _ = write!(s, ",{},{}", g.network.in_degree[k], g.network.out_degree[k]);
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Grid<f64> {
        // Off-diagonal mean is 1.0.
        Grid::from_vec(3, vec![9.0, 0.7, 1.2, 0.6, 9.0, 0.75, 1.5, 1.25, 9.0]).unwrap()
    }

    #[test]
    fn threshold_band_is_half_open() {
        let i = fixture();
        let net = threshold_network(&i, &ThresholdOptions::default()).unwrap();
        // 0.7 at (0,1) and 0.75 at (1,2) are inside; 0.6 at (1,0) is not.
        assert_eq!(
            net.edges,
            vec![
                Edge {
                    src: 1,
                    dst: 0,
                    weight: 0.7
                },
                Edge {
                    src: 2,
                    dst: 1,
                    weight: 0.75
                }
            ]
        );
        assert_eq!(net.in_degree, vec![1, 1, 0]);
        assert_eq!(net.out_degree, vec![0, 1, 1]);
        assert_eq!(net.signed_connectivity(), vec![1, 0, -1]);
    }

    #[test]
    fn equal_entropies_outside_band_give_empty_network() {
        let i = Grid::filled(4, 2.0);
        let net = threshold_network(&i, &ThresholdOptions::default()).unwrap();
        assert!(net.edges.is_empty());
        assert_eq!(net.edge_incident_connectivity(), None);
        assert!(threshold_network(
            &i,
            &ThresholdOptions {
                lo_frac: 0.8,
                hi_frac: 0.8,
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn grouping_partitions_cells() {
        let i = Grid::from_fn(4, |a, b| ((a * 4 + b) * 7 % 13) as f64);
        let groups = group_networks(&i, 3).unwrap();
        assert_eq!(
            groups.iter().map(|g| g.cells.len()).collect::<Vec<_>>(),
            vec![4, 4, 4]
        );
        let mut all: Vec<_> = groups.iter().flat_map(|g| g.cells.clone()).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 12);
        // Group 1 holds the four smallest values.
        let max_first = groups[0]
            .cells
            .iter()
            .map(|&(a, b)| *i.get(a, b))
            .fold(0.0, f64::max);
        let min_second = groups[1]
            .cells
            .iter()
            .map(|&(a, b)| *i.get(a, b))
            .fold(f64::INFINITY, f64::min);
        assert!(max_first <= min_second);
        for g in &groups {
            let e = g.network.edges.len();
            assert_eq!(g.network.in_degree.iter().sum::<usize>(), e);
            assert_eq!(g.network.out_degree.iter().sum::<usize>(), e);
        }
        assert_eq!(group_networks(&i, 1).unwrap()[0].network.edges.len(), 12);
        assert!(group_networks(&i, 13).is_err());
        assert!(group_networks(&i, 0).is_err());
    }

    #[test]
    fn remainder_goes_to_last_group() {
        let i = Grid::from_fn(4, |a, b| (a + b) as f64);
        let sizes: Vec<usize> = group_networks(&i, 5)
            .unwrap()
            .iter()
            .map(|g| g.cells.len())
            .collect();
        assert_eq!(sizes, vec![2, 2, 2, 2, 4]);
    }

    #[test]
    fn ties_rank_by_cell() {
        let i = Grid::filled(3, 1.0);
        let g = group_networks(&i, 2).unwrap();
        assert_eq!(g[0].cells, vec![(0, 1), (0, 2), (1, 0)]);
        assert_eq!(g[1].cells, vec![(1, 2), (2, 0), (2, 1)]);
    }

    #[test]
    fn hub_concentration_raises_connectivity() {
        let star = ImpactNetwork::from_cells(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]);
        let chain = ImpactNetwork::from_cells(4, [(1, 0, 1.0), (2, 1, 1.0), (3, 2, 1.0)]);
        assert!(star.edge_incident_connectivity() > chain.edge_incident_connectivity());
    }

    #[test]
    fn exports() {
        let i = fixture();
        let syms: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let groups = group_networks(&i, 2).unwrap();
        let csv = edges_csv(&groups, &syms);
        assert!(
            csv.starts_with("src,dst,I_ij,group\nB,A,0.7,1\nA,B,0.6,1\n"),
            "{csv}"
        );
        assert!(connectivity_csv(&groups, &syms).starts_with("symbol,in_1,out_1,in_2,out_2\nA,"));
        let dot = groups[0].network.to_dot("g1", &syms);
        assert!(dot.contains("1 -> 0 [weight=0.7];"));
    }
}
