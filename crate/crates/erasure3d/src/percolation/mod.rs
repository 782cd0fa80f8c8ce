//! Subcube tessellation, section bond lattices, edge-disjoint crossing
//! extraction, and the 3D highway system.
//!
//! The cuboid is cut into subcubes of side `c`; a subcube is open when it
//! holds at least one node (probability `p = 1 - e^(-c^3)` in the Poisson
//! limit). Each one-subcube-thick slab projects onto a 2D section whose
//! subsquares carry one diagonal bond each, giving the rotated square
//! bond lattice on which crossings are counted and extracted.

pub mod exhaustive;
pub mod maxflow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::netgen::NetworkInstance;
use crate::{Error, Result};

use maxflow::FlowGraph;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PercolationConfig {
    /// Subcube side length.
    pub c: f64,
    /// Rectangle-height constant (heights are ~ kappa * ln m rows).
    pub kappa: f64,
    /// Highway-density constant used in failure-probability thresholds.
    pub delta: f64,
}

impl Default for PercolationConfig {
    fn default() -> Self {
        PercolationConfig {
            c: 1.5,
            kappa: 1.3,
            delta: 0.1,
        }
    }
}

/// Probability that a subcube of side `c` is open (contains a node) in
/// the large-n Poisson limit.
pub fn occupancy_probability(c: f64) -> f64 {
    -(-c * c * c).exp_m1()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigReport {
    pub p: f64,
    /// `1 + lambda/nu + kappa*ln(6(1-p))` for the x-crossing family and
    /// its analogues; negative values satisfy the crossing-count
    /// growth condition.
    pub condition_x: f64,
    pub condition_y: f64,
    pub condition_z: f64,
    pub warnings: Vec<String>,
}

impl PercolationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c <= 0.0 || self.kappa <= 0.0 || self.delta <= 0.0 {
            return Err(Error::InvalidConfig(
                "percolation constants must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn report(&self, lambda: f64, mu: f64, nu: f64) -> ConfigReport {
        let p = occupancy_probability(self.c);
        let log_term = (6.0 * (1.0 - p)).ln();
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::INFINITY };
        let condition_x = 1.0 + ratio(lambda, nu) + self.kappa * log_term;
        let condition_y = 1.0 + ratio(mu, nu) + self.kappa * log_term;
        let condition_z = 1.0 + ratio(nu, lambda) + self.kappa * log_term;
        let mut warnings = Vec::new();
        if !(5.0 / 6.0 < p && p < 1.0) {
            warnings.push(format!(
                "occupancy probability p = {p:.4} outside (5/6, 1); crossing guarantees void"
            ));
        }
        for (name, v) in [("x", condition_x), ("y", condition_y), ("z", condition_z)] {
            if v >= 0.0 {
                warnings.push(format!(
                    "{name}-crossing condition not met: 1 + ratio + kappa*ln(6(1-p)) = {v:.3} >= 0"
                ));
            }
        }
        ConfigReport {
            p,
            condition_x,
            condition_y,
            condition_z,
            warnings,
        }
    }
}

/// Tessellation of the (effective) cuboid into subcubes of side `c`.
#[derive(Debug, Clone)]
pub struct SubcubeGrid {
    pub c: f64,
    /// Subcube counts per axis: `[m_x, m_y, m_z]`.
    pub dims: [usize; 3],
    /// Node indices per subcube, ascending; an empty list is a closed cube.
    pub members: Vec<Vec<u32>>,
}

impl SubcubeGrid {
    pub fn index(&self, cell: [usize; 3]) -> usize {
        (cell[2] * self.dims[1] + cell[1]) * self.dims[0] + cell[0]
    }

    pub fn cell_of(&self, pos: [f64; 3]) -> [usize; 3] {
        let mut cell = [0usize; 3];
        for a in 0..3 {
            cell[a] = ((pos[a] / self.c) as usize).min(self.dims[a] - 1);
        }
        cell
    }

    pub fn is_open(&self, cell: [usize; 3]) -> bool {
        !self.members[self.index(cell)].is_empty()
    }

    /// Lowest node index in the subcube, if any.
    pub fn representative(&self, cell: [usize; 3]) -> Option<u32> {
        self.members[self.index(cell)].first().copied()
    }

    pub fn open_fraction(&self) -> f64 {
        let open = self.members.iter().filter(|m| !m.is_empty()).count();
        open as f64 / self.members.len() as f64
    }
}

/// Assigns every node to exactly one subcube of side `c` over the
/// effective geometry.
pub fn tessellate(instance: &NetworkInstance, c: f64) -> SubcubeGrid {
    assert!(c > 0.0);
    let extent = instance.config.effective_extent();
    let dims = [
        (extent[0] / c).ceil().max(1.0) as usize,
        (extent[1] / c).ceil().max(1.0) as usize,
        (extent[2] / c).ceil().max(1.0) as usize,
    ];
    let mut grid = SubcubeGrid {
        c,
        dims,
        members: vec![Vec::new(); dims[0] * dims[1] * dims[2]],
    };
    for i in 0..instance.positions.len() {
        let cell = grid.cell_of(instance.effective_position(i));
        let idx = grid.index(cell);
        grid.members[idx].push(i as u32);
    }
    grid
}

/// A one-subcube-thick slab projected onto a plane: one diagonal bond per
/// subsquare, orientation alternating checkerboard-fashion so the bonds
/// form a connected 45-degree-rotated square lattice.
#[derive(Debug, Clone)]
pub struct SectionLattice {
    pub slab_index: usize,
    /// `[m_along, m_across]`: crossings run along the first axis.
    pub dims: [usize; 2],
    /// Bond open flags, index = `row * m_along + col`.
    pub open: Vec<bool>,
}

impl SectionLattice {
    pub fn bond_index(&self, col: usize, row: usize) -> usize {
        row * self.dims[0] + col
    }

    /// Corner endpoints of the diagonal bond of subsquare `(col, row)`.
    pub fn bond_endpoints(&self, col: usize, row: usize) -> ((usize, usize), (usize, usize)) {
        if (col + row) % 2 == 0 {
            ((col, row), (col + 1, row + 1))
        } else {
            ((col + 1, row), (col, row + 1))
        }
    }

    /// Transposed lattice: bottom-to-top crossings of the original become
    /// left-to-right crossings of the transpose. Orientation parity is
    /// symmetric under the swap.
    pub fn transposed(&self) -> SectionLattice {
        let [m_along, m_across] = self.dims;
        let mut open = vec![false; self.open.len()];
        for row in 0..m_across {
            for col in 0..m_along {
                open[col * m_across + row] = self.open[row * m_along + col];
            }
        }
        SectionLattice {
            slab_index: self.slab_index,
            dims: [m_across, m_along],
            open,
        }
    }

    /// I.i.d. Bernoulli(p) bond lattice, for lattice-level statistics.
    pub fn random<R: Rng + ?Sized>(m_along: usize, m_across: usize, p: f64, rng: &mut R) -> Self {
        let open = (0..m_along * m_across).map(|_| rng.gen::<f64>() < p).collect();
        SectionLattice {
            slab_index: 0,
            dims: [m_along, m_across],
            open,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rectangle {
    pub row_start: usize,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RectPartition {
    /// Correction making the rectangle count an integer:
    /// `kappa*ln(m_across) - epsilon_m = m_across / count`.
    pub epsilon_m: f64,
    /// `m_across / count`, the pre-rounding rectangle height in rows.
    pub nominal_height: f64,
    pub rectangles: Vec<Rectangle>,
}

/// Splits a section of `m_across` rows into stacked rectangles of height
/// about `kappa*ln(m_across)` rows. `epsilon_m >= 0` is the smallest
/// correction making the count integral; integer row heights differ by at
/// most one and tile the section exactly.
pub fn partition_rectangles(
    m_along: usize,
    m_across: usize,
    kappa: f64,
) -> Result<RectPartition> {
    if m_along == 0 || m_across < 2 {
        return Err(Error::InvalidConfig(format!(
            "section must be at least 1 x 2 subsquares, got {m_along} x {m_across}"
        )));
    }
    let raw = kappa * (m_across as f64).ln();
    if raw < 1.0 {
        return Err(Error::NoValidPartition { m_across, raw });
    }
    let count = (m_across as f64 / raw).ceil().max(1.0) as usize;
    let nominal_height = m_across as f64 / count as f64;
    let epsilon_m = raw - nominal_height;

    let base = m_across / count;
    let extra = m_across % count;
    let mut rectangles = Vec::with_capacity(count);
    let mut row = 0;
    for j in 0..count {
        let rows = if j < extra { base + 1 } else { base };
        rectangles.push(Rectangle { row_start: row, rows });
        row += rows;
    }
    debug_assert_eq!(row, m_across);
    Ok(RectPartition {
        epsilon_m,
        nominal_height,
        rectangles,
    })
}

const LEFT_BOUNDARY_CAP: u32 = u32::MAX / 4;

/// Builds the unit-capacity flow network of a rectangle. Returns the
/// graph, terminal ids, and the arc id of each open bond.
fn rectangle_flow_graph(
    lattice: &SectionLattice,
    rect: &Rectangle,
) -> (FlowGraph, u32, u32, Vec<(usize, u32)>) {
    let m_along = lattice.dims[0];
    let vwidth = m_along + 1;
    let vcount = vwidth * (rect.rows + 1);
    let src = vcount as u32;
    let sink = vcount as u32 + 1;
    let mut graph = FlowGraph::new(vcount + 2);

    let mut bond_arcs = Vec::new();
    for row in rect.row_start..rect.row_start + rect.rows {
        for col in 0..m_along {
            if !lattice.open[lattice.bond_index(col, row)] {
                continue;
            }
            let ((ax, ay), (bx, by)) = lattice.bond_endpoints(col, row);
            let a = ((ay - rect.row_start) * vwidth + ax) as u32;
            let b = ((by - rect.row_start) * vwidth + bx) as u32;
            let arc = graph.add_undirected_unit(a, b);
            bond_arcs.push((lattice.bond_index(col, row), arc));
        }
    }
    // Crossings may share boundary vertices, so terminal arcs are wide.
    // Ordered bottom row first so that flow decomposition walks paths in
    // ascending row order.
    for r in 0..=rect.rows {
        let left = (r * vwidth) as u32;
        let right = (r * vwidth + m_along) as u32;
        graph.add_directed(src, left, LEFT_BOUNDARY_CAP);
        graph.add_directed(right, sink, LEFT_BOUNDARY_CAP);
    }
    (graph, src, sink, bond_arcs)
}

/// Exact maximum number of pairwise edge-disjoint open crossings of the
/// rectangle from its entry side to its exit side (Menger via max flow).
pub fn count_edge_disjoint_crossings(lattice: &SectionLattice, rect: &Rectangle) -> usize {
    let (mut graph, src, sink, _) = rectangle_flow_graph(lattice, rect);
    graph.max_flow(src, sink) as usize
}

/// Recovers `quota` pairwise edge-disjoint crossings by decomposing the
/// max-flow solution, in ascending entry-row order. Each path is a
/// sequence of bond indices of the lattice.
pub fn extract_crossing_paths(
    lattice: &SectionLattice,
    rect: &Rectangle,
    quota: usize,
) -> Result<Vec<Vec<usize>>> {
    if quota == 0 {
        return Ok(Vec::new());
    }
    let (mut graph, src, sink, bond_arcs) = rectangle_flow_graph(lattice, rect);
    let available = graph.max_flow(src, sink) as usize;
    if quota > available {
        return Err(Error::QuotaInfeasible { quota, available });
    }

    // Net bond usage: at most one direction per bond carries flow.
    let m_along = lattice.dims[0];
    let vwidth = m_along + 1;
    let mut out: Vec<Vec<(u32, usize)>> = vec![Vec::new(); vwidth * (rect.rows + 1) + 2];
    for &(bond, arc) in &bond_arcs {
        let (a, b) = endpoint_ids(lattice, rect, bond, vwidth);
        match graph.net_flow(arc) {
            1 => out[a].push((b as u32, bond)),
            -1 => out[b].push((a as u32, bond)),
            _ => {}
        }
    }
    for list in out.iter_mut() {
        list.sort_unstable();
    }

    // Walk one unit of flow per entry vertex, bottom row upward.
    let mut paths = Vec::with_capacity(quota);
    'rows: for r in 0..=rect.rows {
        let left = r * vwidth;
        loop {
            if paths.len() == quota {
                break 'rows;
            }
            match walk_path(left, m_along, vwidth, &mut out) {
                Some(path) => paths.push(path),
                None => break,
            }
        }
    }
    debug_assert_eq!(paths.len(), quota);
    Ok(paths)
}

/// Rectangle-local vertex ids of a bond's endpoints.
fn endpoint_ids(
    lattice: &SectionLattice,
    rect: &Rectangle,
    bond: usize,
    vwidth: usize,
) -> (usize, usize) {
    let m_along = lattice.dims[0];
    let col = bond % m_along;
    let row = bond / m_along;
    let ((ax, ay), (bx, by)) = lattice.bond_endpoints(col, row);
    (
        (ay - rect.row_start) * vwidth + ax,
        (by - rect.row_start) * vwidth + bx,
    )
}

/// Follows consumed flow from a left-boundary vertex to the right
/// boundary, erasing loops. Returns the bond sequence, or None when no
/// flow leaves the vertex.
fn walk_path(
    start: usize,
    m_along: usize,
    vwidth: usize,
    out: &mut [Vec<(u32, usize)>],
) -> Option<Vec<usize>> {
    if out[start].is_empty() {
        return None;
    }
    let mut vertex_path = vec![start];
    let mut bond_path = Vec::new();
    let mut v = start;
    while v % vwidth != m_along {
        let (next, bond) = out[v].pop()?;
        let next = next as usize;
        if let Some(pos) = vertex_path.iter().position(|&u| u == next) {
            // Flow cycle: drop the loop, keep the consumed arcs consumed.
            vertex_path.truncate(pos + 1);
            bond_path.truncate(pos);
        } else {
            vertex_path.push(next);
            bond_path.push(bond);
        }
        v = next;
    }
    Some(bond_path)
}

/// Lattice-level crossing statistics for one section, used by the
/// percolation statistics mode.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingStats {
    pub min_crossings: usize,
    pub max_crossings: usize,
    pub per_rectangle: Vec<usize>,
    /// `delta * ln(m_across)` (crossing counts at or below it are "few").
    pub threshold: f64,
    /// Every rectangle at or below the threshold (the event the
    /// closed-form failure bound controls).
    pub all_below: bool,
    /// Some rectangle at or below the threshold (`min_j C_j <= threshold`).
    pub min_below: bool,
    pub epsilon_m: f64,
}

pub fn crossing_stats(
    lattice: &SectionLattice,
    kappa: f64,
    delta: f64,
) -> Result<CrossingStats> {
    let partition = partition_rectangles(lattice.dims[0], lattice.dims[1], kappa)?;
    let counts: Vec<usize> = partition
        .rectangles
        .iter()
        .map(|rect| count_edge_disjoint_crossings(lattice, rect))
        .collect();
    let threshold = delta * (lattice.dims[1] as f64).ln();
    let min = counts.iter().copied().min().unwrap_or(0);
    let max = counts.iter().copied().max().unwrap_or(0);
    Ok(CrossingStats {
        min_crossings: min,
        max_crossings: max,
        all_below: counts.iter().all(|&c| c as f64 <= threshold),
        min_below: min as f64 <= threshold,
        per_rectangle: counts,
        threshold,
        epsilon_m: partition.epsilon_m,
    })
}

/// Closed-form upper bound on the probability that every rectangle of the
/// section has at most `delta * ln(m_z)` edge-disjoint crossings:
/// `((4/3)(m_x+1) m_z^(delta ln(p/(1-p)) + kappa ln(6(1-p))) (6(1-p))^(-eps_m))^K`
/// with `K = m_z / (kappa ln(m_z) - eps_m)` rectangles, clamped to [0, 1].
pub fn lemma1_failure_bound(
    p: f64,
    kappa: f64,
    delta: f64,
    m_x: usize,
    m_z: usize,
    epsilon_m: f64,
) -> Result<f64> {
    if !(5.0 / 6.0 < p && p < 1.0) {
        return Err(Error::SubcriticalOccupancy(p));
    }
    let m_z_f = m_z as f64;
    let q6 = 6.0 * (1.0 - p);
    let exponent = delta * (p / (1.0 - p)).ln() + kappa * q6.ln();
    let per_rect = (4.0 / 3.0) * (m_x as f64 + 1.0) * m_z_f.powf(exponent) * q6.powf(-epsilon_m);
    let count = m_z_f / (kappa * m_z_f.ln() - epsilon_m);
    let bound = per_rect.powf(count);
    Ok(bound.clamp(0.0, 1.0))
}

/// Geometry of one highway family: which axis indexes the slabs, which
/// axis the crossings run along, and which axis the sections are
/// partitioned across.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FamilyGeometry {
    pub slab_axis: usize,
    pub along_axis: usize,
    pub across_axis: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RectangleHighways {
    pub rect: Rectangle,
    pub crossings: usize,
    /// Node-index hop sequences, one per extracted crossing, in
    /// extraction (ascending entry row) order.
    pub paths: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlabHighways {
    pub slab_index: usize,
    pub epsilon_m: f64,
    pub rects: Vec<RectangleHighways>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyHighways {
    pub geometry: FamilyGeometry,
    pub slabs: Vec<SlabHighways>,
}

/// The extracted highway system for all three Cartesian directions.
///
/// In flat mode (a single subcube layer in z) the x and y families are
/// built from the one horizontal section and the z family is empty; the
/// protocol then degenerates to the 2D form.
#[derive(Debug, Clone, Serialize)]
pub struct HighwaySystem {
    pub x: FamilyHighways,
    pub y: FamilyHighways,
    pub z: FamilyHighways,
    /// Empirical density: min over rectangles of `C_j / ln(m_across)`.
    pub delta_hat: f64,
    /// Some used rectangle yielded zero crossings.
    pub percolation_failed: bool,
    pub failed_rectangles: usize,
}

impl HighwaySystem {
    pub fn family(&self, axis: usize) -> &FamilyHighways {
        match axis {
            0 => &self.x,
            1 => &self.y,
            _ => &self.z,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("highway system serializes")
    }
}

fn build_family(
    grid: &SubcubeGrid,
    kappa: f64,
    geometry: FamilyGeometry,
) -> Result<FamilyHighways> {
    let m_slab = grid.dims[geometry.slab_axis];
    let m_along = grid.dims[geometry.along_axis];
    let m_across = grid.dims[geometry.across_axis];
    let partition = partition_rectangles(m_along, m_across, kappa)?;

    let mut slabs = Vec::with_capacity(m_slab);
    for slab in 0..m_slab {
        let mut open = vec![false; m_along * m_across];
        for row in 0..m_across {
            for col in 0..m_along {
                let mut cell = [0usize; 3];
                cell[geometry.slab_axis] = slab;
                cell[geometry.along_axis] = col;
                cell[geometry.across_axis] = row;
                open[row * m_along + col] = grid.is_open(cell);
            }
        }
        let lattice = SectionLattice {
            slab_index: slab,
            dims: [m_along, m_across],
            open,
        };

        let mut rects = Vec::with_capacity(partition.rectangles.len());
        for rect in &partition.rectangles {
            let crossings = count_edge_disjoint_crossings(&lattice, rect);
            let bond_paths = extract_crossing_paths(&lattice, rect, crossings)?;
            let paths = bond_paths
                .into_iter()
                .map(|bonds| realize_node_path(grid, &geometry, slab, &lattice, &bonds))
                .collect();
            rects.push(RectangleHighways {
                rect: *rect,
                crossings,
                paths,
            });
        }
        slabs.push(SlabHighways {
            slab_index: slab,
            epsilon_m: partition.epsilon_m,
            rects,
        });
    }
    Ok(FamilyHighways { geometry, slabs })
}

/// One node per open subcube along the bond path, lowest node index.
fn realize_node_path(
    grid: &SubcubeGrid,
    geometry: &FamilyGeometry,
    slab: usize,
    lattice: &SectionLattice,
    bonds: &[usize],
) -> Vec<u32> {
    let m_along = lattice.dims[0];
    let mut path = Vec::with_capacity(bonds.len());
    for &bond in bonds {
        let mut cell = [0usize; 3];
        cell[geometry.slab_axis] = slab;
        cell[geometry.along_axis] = bond % m_along;
        cell[geometry.across_axis] = bond / m_along;
        let node = grid
            .representative(cell)
            .expect("open bond maps to an occupied subcube");
        if path.last() != Some(&node) {
            path.push(node);
        }
    }
    path
}

/// Builds section lattices for every slab in the three families and
/// extracts all available edge-disjoint crossings. A rectangle without a
/// single crossing marks the system as percolation-failed (reported, not
/// fatal).
pub fn build_highway_system(grid: &SubcubeGrid, config: &PercolationConfig) -> Result<HighwaySystem> {
    config.validate()?;
    let flat = grid.dims[2] == 1;

    let (x, y, z) = if flat {
        // Single horizontal section: x crossings partitioned along y and
        // y crossings partitioned along x; no z highways.
        let x = build_family(
            grid,
            config.kappa,
            FamilyGeometry { slab_axis: 2, along_axis: 0, across_axis: 1 },
        )?;
        let y = build_family(
            grid,
            config.kappa,
            FamilyGeometry { slab_axis: 2, along_axis: 1, across_axis: 0 },
        )?;
        let z = FamilyHighways {
            geometry: FamilyGeometry { slab_axis: 1, along_axis: 2, across_axis: 0 },
            slabs: Vec::new(),
        };
        (x, y, z)
    } else {
        let x = build_family(
            grid,
            config.kappa,
            FamilyGeometry { slab_axis: 1, along_axis: 0, across_axis: 2 },
        )?;
        let y = build_family(
            grid,
            config.kappa,
            FamilyGeometry { slab_axis: 0, along_axis: 1, across_axis: 2 },
        )?;
        let z = build_family(
            grid,
            config.kappa,
            FamilyGeometry { slab_axis: 1, along_axis: 2, across_axis: 0 },
        )?;
        (x, y, z)
    };

    let mut delta_hat = f64::INFINITY;
    let mut failed = 0usize;
    for family in [&x, &y, &z] {
        let m_across = grid.dims[family.geometry.across_axis] as f64;
        for slab in &family.slabs {
            for rect in &slab.rects {
                if rect.crossings == 0 {
                    failed += 1;
                }
                let density = rect.crossings as f64 / m_across.ln().max(f64::MIN_POSITIVE);
                delta_hat = delta_hat.min(density);
            }
        }
    }
    if !delta_hat.is_finite() {
        delta_hat = 0.0;
    }

    Ok(HighwaySystem {
        x,
        y,
        z,
        delta_hat,
        percolation_failed: failed > 0,
        failed_rectangles: failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{generate, NetworkConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn full_lattice(m_along: usize, m_across: usize) -> SectionLattice {
        SectionLattice {
            slab_index: 0,
            dims: [m_along, m_across],
            open: vec![true; m_along * m_across],
        }
    }

    #[test]
    fn tessellate_single_node_at_origin() {
        let mut cfg = NetworkConfig::cubic(1, 0);
        cfg.seed = 0;
        let mut inst = generate(&cfg).unwrap();
        inst.positions[0] = [0.0, 0.0, 0.0];
        let grid = tessellate(&inst, 1.0);
        assert!(grid.is_open([0, 0, 0]));
        let open = grid.members.iter().filter(|m| !m.is_empty()).count();
        assert_eq!(open, 1);
    }

    #[test]
    fn tessellate_open_fraction_matches_poisson_limit() {
        let cfg = NetworkConfig::cubic(100_000, 17);
        let inst = generate(&cfg).unwrap();
        let grid = tessellate(&inst, 1.5);
        let expected = occupancy_probability(1.5);
        assert!((expected - 0.96575).abs() < 1e-4);
        assert!(
            (grid.open_fraction() - expected).abs() < 0.005,
            "open fraction {}",
            grid.open_fraction()
        );
    }

    #[test]
    fn tessellate_giant_subcube_holds_everything() {
        let cfg = NetworkConfig::cubic(64, 3);
        let inst = generate(&cfg).unwrap();
        let grid = tessellate(&inst, 1000.0);
        assert_eq!(grid.dims, [1, 1, 1]);
        assert_eq!(grid.members[0].len(), 64);
    }

    #[test]
    fn tessellate_assigns_every_node_once() {
        let cfg = NetworkConfig::cubic(2000, 5);
        let inst = generate(&cfg).unwrap();
        let grid = tessellate(&inst, 1.5);
        let total: usize = grid.members.iter().map(|m| m.len()).sum();
        assert_eq!(total, 2000);
    }

    #[test]
    fn partition_sixty_four_rows_kappa_one() {
        let part = partition_rectangles(64, 64, 1.0).unwrap();
        assert_eq!(part.rectangles.len(), 16);
        assert!(part.rectangles.iter().all(|r| r.rows == 4));
        assert!((part.epsilon_m - (64f64.ln() - 4.0)).abs() < 1e-12);
        let total: usize = part.rectangles.iter().map(|r| r.rows).sum();
        assert_eq!(total, 64);
    }

    #[test]
    fn partition_two_rows_kappa_two() {
        // kappa*ln(2) = 1.386; the smallest nonnegative correction makes
        // two one-row rectangles.
        let part = partition_rectangles(8, 2, 2.0).unwrap();
        assert_eq!(part.rectangles.len(), 2);
        assert!(part.epsilon_m >= 0.0);
        assert!((part.epsilon_m - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn partition_rejects_kappa_log_below_one() {
        assert!(matches!(
            partition_rectangles(8, 2, 0.5),
            Err(Error::NoValidPartition { .. })
        ));
    }

    #[test]
    fn partition_tiles_exactly_with_near_equal_heights() {
        for m in [22, 37, 64, 100, 255] {
            let part = partition_rectangles(10, m, 1.3).unwrap();
            let total: usize = part.rectangles.iter().map(|r| r.rows).sum();
            assert_eq!(total, m);
            let hmin = part.rectangles.iter().map(|r| r.rows).min().unwrap();
            let hmax = part.rectangles.iter().map(|r| r.rows).max().unwrap();
            assert!(hmax - hmin <= 1, "m={m}: heights differ by more than 1");
            assert!(part.epsilon_m >= 0.0);
            let mut row = 0;
            for r in &part.rectangles {
                assert_eq!(r.row_start, row);
                row += r.rows;
            }
        }
    }

    #[test]
    fn closed_lattice_has_no_crossings() {
        let lat = SectionLattice {
            slab_index: 0,
            dims: [5, 4],
            open: vec![false; 20],
        };
        let rect = Rectangle { row_start: 0, rows: 4 };
        assert_eq!(count_edge_disjoint_crossings(&lat, &rect), 0);
        assert!(extract_crossing_paths(&lat, &rect, 0).unwrap().is_empty());
        assert!(matches!(
            extract_crossing_paths(&lat, &rect, 1),
            Err(Error::QuotaInfeasible { .. })
        ));
    }

    #[test]
    fn full_lattice_yields_one_crossing_per_row() {
        for rows in 1..=4 {
            let lat = full_lattice(6, rows);
            let rect = Rectangle { row_start: 0, rows };
            let flow = count_edge_disjoint_crossings(&lat, &rect);
            assert_eq!(flow, rows, "rows = {rows}");
            let oracle = exhaustive::max_edge_disjoint_crossings(&lat, &rect);
            assert_eq!(flow, oracle);
        }
    }

    #[test]
    fn single_open_row_has_unique_crossing() {
        let mut lat = SectionLattice {
            slab_index: 0,
            dims: [7, 3],
            open: vec![false; 21],
        };
        for col in 0..7 {
            lat.open[lat.bond_index(col, 1)] = true;
        }
        let rect = Rectangle { row_start: 0, rows: 3 };
        assert_eq!(count_edge_disjoint_crossings(&lat, &rect), 1);
        let paths = extract_crossing_paths(&lat, &rect, 1).unwrap();
        assert_eq!(paths.len(), 1);
        let expected: Vec<usize> = (0..7).map(|c| lat.bond_index(c, 1)).collect();
        let mut got = paths[0].clone();
        got.sort_unstable();
        assert_eq!(got, expected);
        assert_eq!(exhaustive::max_edge_disjoint_crossings(&lat, &rect), 1);
    }

    #[test]
    fn random_lattices_match_exhaustive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..60 {
            let p = 0.2 + 0.75 * (trial % 7) as f64 / 7.0;
            let lat = SectionLattice::random(6, 6, p, &mut rng);
            let rect = Rectangle { row_start: 0, rows: 6 };
            let flow = count_edge_disjoint_crossings(&lat, &rect);
            let oracle = exhaustive::max_edge_disjoint_crossings(&lat, &rect);
            assert_eq!(flow, oracle, "trial {trial}");
        }
    }

    #[test]
    fn extracted_paths_are_edge_disjoint_and_adjacent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let lat = SectionLattice::random(8, 5, 0.9, &mut rng);
            let rect = Rectangle { row_start: 0, rows: 5 };
            let n = count_edge_disjoint_crossings(&lat, &rect);
            let paths = extract_crossing_paths(&lat, &rect, n).unwrap();
            assert_eq!(paths.len(), n);
            let mut seen = std::collections::HashSet::new();
            for path in &paths {
                for &bond in path {
                    assert!(lat.open[bond]);
                    assert!(seen.insert(bond), "bond {bond} reused");
                }
                for pair in path.windows(2) {
                    let (c0, r0) = (pair[0] % 8, pair[0] / 8);
                    let (c1, r1) = (pair[1] % 8, pair[1] / 8);
                    assert!(
                        c0.abs_diff(c1) <= 1 && r0.abs_diff(r1) <= 1,
                        "non-adjacent subsquares on a path"
                    );
                }
            }
        }
    }

    #[test]
    fn opening_a_bond_never_decreases_crossings() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let mut lat = SectionLattice::random(6, 4, 0.6, &mut rng);
            let rect = Rectangle { row_start: 0, rows: 4 };
            let before = count_edge_disjoint_crossings(&lat, &rect);
            let closed: Vec<usize> = (0..lat.open.len()).filter(|&i| !lat.open[i]).collect();
            if let Some(&bond) = closed.first() {
                lat.open[bond] = true;
                let after = count_edge_disjoint_crossings(&lat, &rect);
                assert!(after >= before);
            }
        }
    }

    #[test]
    fn transposed_lattice_swaps_crossing_direction() {
        let mut lat = SectionLattice {
            slab_index: 0,
            dims: [5, 4],
            open: vec![false; 20],
        };
        // One open column: crosses bottom-to-top only.
        for row in 0..4 {
            lat.open[lat.bond_index(2, row)] = true;
        }
        let rect = Rectangle { row_start: 0, rows: 4 };
        assert_eq!(count_edge_disjoint_crossings(&lat, &rect), 0);
        let t = lat.transposed();
        assert_eq!(t.dims, [4, 5]);
        let trect = Rectangle { row_start: 0, rows: 5 };
        assert_eq!(count_edge_disjoint_crossings(&t, &trect), 1);
    }

    #[test]
    fn lemma1_bound_examples() {
        let p = occupancy_probability(1.5);
        // p -> 1 drives the bound to zero.
        let near_one = lemma1_failure_bound(0.9999, 1.3, 0.1, 64, 64, 0.5).unwrap();
        assert!(near_one < 1e-30);

        let part = partition_rectangles(64, 64, 1.3).unwrap();
        let bound = lemma1_failure_bound(p, 1.3, 0.1, 64, 64, part.epsilon_m).unwrap();
        assert!(bound > 0.0 && bound < 1.0, "bound = {bound}");

        assert!(matches!(
            lemma1_failure_bound(0.5, 1.3, 0.1, 64, 64, 0.2),
            Err(Error::SubcriticalOccupancy(_))
        ));
    }

    #[test]
    fn lemma1_bound_does_not_vanish_when_condition_violated() {
        // kappa = 0.3 violates 1 + lambda/nu + kappa ln(6(1-p)) < 0 for the
        // cubic ratio 1; the bound saturates instead of vanishing in m.
        let p = occupancy_probability(1.5);
        let mut values = Vec::new();
        for m in [32usize, 64, 128] {
            let part = partition_rectangles(m, m, 0.3).unwrap();
            values.push(lemma1_failure_bound(p, 0.3, 0.1, m, m, part.epsilon_m).unwrap());
        }
        assert!(values.iter().all(|&v| v >= 0.99), "values = {values:?}");
    }

    #[test]
    fn highway_system_on_dense_occupancy_fills_every_rectangle() {
        let cfg = NetworkConfig::cubic(20_000, 23);
        let inst = generate(&cfg).unwrap();
        let grid = tessellate(&inst, 1.5);
        let hw = build_highway_system(&grid, &PercolationConfig::default()).unwrap();
        assert!(!hw.percolation_failed);
        assert!(hw.delta_hat > 0.0);
        // Paths hop between adjacent subcubes: bounded hop length.
        let c = 1.5;
        let max_hop = 2.0 * 3f64.sqrt() * c;
        let pos = inst.effective_positions();
        for family in [&hw.x, &hw.y, &hw.z] {
            for slab in &family.slabs {
                for rect in &slab.rects {
                    assert!(rect.crossings >= 1);
                    for path in &rect.paths {
                        for pair in path.windows(2) {
                            let d = crate::netgen::distance(
                                pos[pair[0] as usize],
                                pos[pair[1] as usize],
                            );
                            assert!(d <= max_hop + 1e-9, "hop {d} exceeds bound");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subcritical_occupancy_fails_percolation() {
        // c = 0.5 gives p ~ 0.118, far below the crossing regime.
        let mut failures = 0;
        for seed in 0..10 {
            let cfg = NetworkConfig::cubic(4096, 100 + seed);
            let inst = generate(&cfg).unwrap();
            let grid = tessellate(&inst, 0.5);
            let config = PercolationConfig { c: 0.5, kappa: 4.0, delta: 0.1 };
            let hw = build_highway_system(&grid, &config).unwrap();
            if hw.percolation_failed {
                failures += 1;
            }
        }
        assert!(failures >= 9, "only {failures}/10 trials failed");
    }

    #[test]
    fn config_report_flags_bad_occupancy() {
        let good = PercolationConfig::default().report(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
        assert!(good.warnings.is_empty(), "{:?}", good.warnings);
        assert!(good.condition_x < 0.0);

        let bad = PercolationConfig { c: 0.9, kappa: 1.3, delta: 0.1 }
            .report(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
        assert!(!bad.warnings.is_empty());
    }
}
