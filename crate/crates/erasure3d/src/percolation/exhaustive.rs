//! Reference crossing counter: exhaustive search over sets of pairwise
//! edge-disjoint left-to-right paths.
//!
//! Independent of the max-flow route; used to verify it on small
//! lattices. Bond count is limited to 64 so path sets fit in a bitmask.

use super::{Rectangle, SectionLattice};

/// Maximum number of pairwise edge-disjoint open crossings of `rect`,
/// found by branch-and-bound over explicitly enumerated simple paths.
pub fn max_edge_disjoint_crossings(lattice: &SectionLattice, rect: &Rectangle) -> usize {
    let bonds = lattice.dims[0] * rect.rows;
    assert!(bonds <= 64, "exhaustive oracle is limited to 64 bonds");

    let paths = enumerate_crossings(lattice, rect);
    if paths.is_empty() {
        return 0;
    }

    // Per-column open-bond masks; every crossing uses at least one bond in
    // every column, so the sparsest column caps the answer.
    let m_along = lattice.dims[0];
    let mut column_masks = vec![0u64; m_along];
    for row in rect.row_start..rect.row_start + rect.rows {
        for col in 0..m_along {
            if lattice.open[row * m_along + col] {
                column_masks[col] |= 1 << bond_bit(lattice, rect, col, row);
            }
        }
    }

    let mut best = 0;
    search(&paths, &column_masks, 0, 0, 0, &mut best);
    best
}

fn bond_bit(lattice: &SectionLattice, rect: &Rectangle, col: usize, row: usize) -> usize {
    (row - rect.row_start) * lattice.dims[0] + col
}

fn search(
    paths: &[u64],
    column_masks: &[u64],
    start: usize,
    used: u64,
    depth: usize,
    best: &mut usize,
) {
    if depth > *best {
        *best = depth;
    }
    let cap = column_masks
        .iter()
        .map(|m| (m & !used).count_ones() as usize)
        .min()
        .unwrap_or(0);
    if depth + cap <= *best {
        return;
    }
    for i in start..paths.len() {
        if paths[i] & used == 0 {
            search(paths, column_masks, i + 1, used | paths[i], depth + 1, best);
        }
    }
}

/// All vertex-simple open paths from the left to the right boundary of the
/// rectangle, as bond bitmasks.
fn enumerate_crossings(lattice: &SectionLattice, rect: &Rectangle) -> Vec<u64> {
    let m_along = lattice.dims[0];
    let vwidth = m_along + 1;
    let rows = rect.rows;

    // Adjacency over corner vertices restricted to the rectangle's rows.
    let vcount = vwidth * (rows + 1);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vcount]; // (neighbor, bond bit)
    for row in rect.row_start..rect.row_start + rect.rows {
        for col in 0..m_along {
            if !lattice.open[row * m_along + col] {
                continue;
            }
            let ((ax, ay), (bx, by)) = lattice.bond_endpoints(col, row);
            let a = (ay - rect.row_start) * vwidth + ax;
            let b = (by - rect.row_start) * vwidth + bx;
            let bit = bond_bit(lattice, rect, col, row);
            adj[a].push((b, bit));
            adj[b].push((a, bit));
        }
    }

    let mut paths = Vec::new();
    let mut visited = vec![false; vcount];
    for start_row in 0..=rows {
        let start = start_row * vwidth;
        dfs(start, vwidth, m_along, &adj, &mut visited, 0, &mut paths);
    }
    paths.sort_unstable();
    paths.dedup();
    paths
}

fn dfs(
    v: usize,
    vwidth: usize,
    m_along: usize,
    adj: &[Vec<(usize, usize)>],
    visited: &mut [bool],
    mask: u64,
    paths: &mut Vec<u64>,
) {
    if v % vwidth == m_along {
        paths.push(mask);
        return;
    }
    visited[v] = true;
    for &(next, bit) in &adj[v] {
        if !visited[next] && mask & (1 << bit) == 0 {
            dfs(next, vwidth, m_along, adj, visited, mask | (1 << bit), paths);
        }
    }
    visited[v] = false;
}
