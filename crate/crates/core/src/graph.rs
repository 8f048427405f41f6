//! Compressed sparse adjacency for undirected graphs and the BFS routines
//! every metric computation reduces to.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    /// Builds from an undirected edge list. Loops are dropped and parallel
    /// edges collapsed.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u != v {
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            if u != v {
                targets[fill[u as usize]] = v;
                fill[u as usize] += 1;
                targets[fill[v as usize]] = u;
                fill[v as usize] += 1;
            }
        }
        // sort + dedup each adjacency list, then recompact
        let mut compact_offsets = vec![0usize; n + 1];
        let mut compact = Vec::with_capacity(targets.len());
        for v in 0..n {
            let list = &mut targets[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            let mut last = None;
            for &t in list.iter() {
                if last != Some(t) {
                    compact.push(t);
                    last = Some(t);
                }
            }
            compact_offsets[v + 1] = compact.len();
        }
        Graph {
            offsets: compact_offsets,
            targets: compact,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Sorted edge list with `u < v`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        (0..self.n_vertices() as u32)
            .flat_map(|u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }

    /// Distances from `src` to every vertex; `UNREACHABLE` where none.
    pub fn bfs(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.n_vertices()];
        let mut queue = VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in self.neighbors(u) {
                if dist[v as usize] == UNREACHABLE {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: u32, v: u32) -> Result<u32> {
        if u == v {
            return Ok(0);
        }
        let d = self.bfs(u)[v as usize];
        if d == UNREACHABLE {
            return Err(Error::Disconnected(u as usize, v as usize));
        }
        Ok(d)
    }

    /// One shortest path from `u` to `v`, choosing the smallest-index
    /// predecessor at every step so the result is deterministic.
    pub fn shortest_path(&self, u: u32, v: u32) -> Result<Vec<u32>> {
        let from_v = self.bfs(v);
        if from_v[u as usize] == UNREACHABLE {
            return Err(Error::Disconnected(u as usize, v as usize));
        }
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            let want = from_v[cur as usize] - 1;
            cur = *self
                .neighbors(cur)
                .iter()
                .find(|&&w| from_v[w as usize] == want)
                .expect("BFS layers are consistent");
            path.push(cur);
        }
        Ok(path)
    }

    /// Rows of the distance matrix for each source, computed in parallel.
    pub fn distance_rows(&self, sources: &[u32]) -> Vec<Vec<u32>> {
        sources.par_iter().map(|&s| self.bfs(s)).collect()
    }
}

/// Dense symmetric distance matrix over a chosen vertex subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = f(i, j);
            }
        }
        DistanceMatrix { n, data }
    }

    /// Restricts BFS distances in `graph` to `vertices`.
    pub fn from_graph(graph: &Graph, vertices: &[u32]) -> Result<Self> {
        let rows = graph.distance_rows(vertices);
        let n = vertices.len();
        let mut data = vec![0; n * n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate() {
                let d = row[v as usize];
                if d == UNREACHABLE {
                    return Err(Error::Disconnected(vertices[i] as usize, v as usize));
                }
                data[i * n + j] = d;
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_distances() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (2, 1), (3, 3)]);
        assert_eq!(g.n_edges(), 3);
        assert_eq!(g.bfs(0), vec![0, 1, 2, 3]);
        assert_eq!(g.shortest_path(0, 3).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn disconnected_pair() {
        let g = Graph::from_edges(3, &[(0, 1)]);
        assert_eq!(g.distance(0, 2), Err(Error::Disconnected(0, 2)));
    }
}
