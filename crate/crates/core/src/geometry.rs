//! Planar Poisson point processes on a disc: sampling, ALOHA thinning,
//! receiver displacement, superposition and nearest-neighbor queries.
//!
//! Transmitter positions are truncated to the disc; displaced receivers may
//! land outside it. All operations are pure given an explicit generator, so
//! samples can be shared freely across threads.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn dist_sq(&self, other: &Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point2) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

/// Which network a node belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Network {
    Primary,
    Secondary,
}

/// Sampling window: a disc centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub radius: f64,
}

impl Region {
    pub fn new(radius: f64) -> Result<Region> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "region radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Region { radius })
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    /// Uniform point on the disc.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Point2 {
        let r = self.radius * rng.random::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        Point2::new(r * theta.cos(), r * theta.sin())
    }
}

/// One transmitter of a realization, with its network mark and (once
/// displaced) its paired receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedPoint {
    pub pos: Point2,
    pub network: Network,
    pub receiver: Option<Point2>,
}

/// A realization of a marked planar point process.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    pub region: Region,
    pub points: Vec<MarkedPoint>,
}

impl PointSample {
    pub fn empty(region: Region, _network: Network) -> PointSample {
        PointSample { region, points: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Point2> + '_ {
        self.points.iter().map(|p| p.pos)
    }

    /// Positions of the paired receivers, for points that have one.
    pub fn receiver_positions(&self) -> impl Iterator<Item = Point2> + '_ {
        self.points.iter().filter_map(|p| p.receiver)
    }
}

/// Slotted-ALOHA access: every transmitter is active independently with
/// probability `access_probability`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessConfig {
    pub access_probability: f64,
}

impl AccessConfig {
    pub fn new(access_probability: f64) -> Result<AccessConfig> {
        if !(0.0..=1.0).contains(&access_probability) {
            return Err(Error::InvalidParameter(format!(
                "access probability must lie in [0,1], got {access_probability}"
            )));
        }
        Ok(AccessConfig { access_probability })
    }
}

/// Draw a Poisson number of points with the given mean. `Poisson::new`
/// rejects a zero rate, so that case is handled here.
pub(crate) fn poisson_count<R: Rng>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite Poisson mean");
    dist.sample(rng) as u64
}

/// Sample a homogeneous PPP of the given intensity (nodes/m^2) on the disc.
pub fn sample_ppp<R: Rng>(
    intensity: f64,
    region: Region,
    network: Network,
    rng: &mut R,
) -> Result<PointSample> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "intensity must be nonnegative and finite, got {intensity}"
        )));
    }
    let count = poisson_count(intensity * region.area(), rng);
    let mut points = Vec::with_capacity(count as usize);
    for _ in 0..count {
        points.push(MarkedPoint { pos: region.sample_point(rng), network, receiver: None });
    }
    Ok(PointSample { region, points })
}

/// Independent thinning: keep each point with probability `P_a`. The result
/// is a PPP of intensity `P_a * lambda`.
pub fn thin<R: Rng>(sample: &PointSample, access: AccessConfig, rng: &mut R) -> PointSample {
    let p = access.access_probability;
    let points = sample
        .points
        .iter()
        .filter(|_| rng.random::<f64>() < p)
        .copied()
        .collect();
    PointSample { region: sample.region, points }
}

/// Attach a receiver to every transmitter, at exactly `distance` away in a
/// direction uniform on [0, 2pi). Receivers may fall outside the disc.
pub fn displace_receivers<R: Rng>(
    tx_sample: &PointSample,
    distance: f64,
    rng: &mut R,
) -> Result<PointSample> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "pairing distance must be positive, got {distance}"
        )));
    }
    let points = tx_sample
        .points
        .iter()
        .map(|p| {
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            let rx = Point2::new(p.pos.x + distance * phi.cos(), p.pos.y + distance * phi.sin());
            MarkedPoint { receiver: Some(rx), ..*p }
        })
        .collect();
    Ok(PointSample { region: tx_sample.region, points })
}

/// Union of two samples over the same region, preserving marks and pairings.
pub fn superpose(a: &PointSample, b: &PointSample) -> Result<PointSample> {
    if a.region != b.region {
        return Err(Error::RegionMismatch(format!(
            "cannot superpose samples over radii {} and {}",
            a.region.radius, b.region.radius
        )));
    }
    let mut points = Vec::with_capacity(a.len() + b.len());
    points.extend_from_slice(&a.points);
    points.extend_from_slice(&b.points);
    Ok(PointSample { region: a.region, points })
}

/// One neighbor returned by [`nearest`]: the point's index in the sample,
/// its position and its distance to the query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub position: Point2,
    pub distance: f64,
}

/// Result of a nearest-neighbor query. `short` is set when the sample held
/// fewer than the requested number of points.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestResult {
    pub neighbors: Vec<Neighbor>,
    pub short: bool,
}

/// The `j` points of the sample closest to `query`, ascending by Euclidean
/// distance, ties broken by insertion index.
pub fn nearest(query: Point2, sample: &PointSample, j: usize) -> NearestResult {
    let neighbors = k_nearest_positions(query, sample.points.iter().map(|p| p.pos), j);
    let short = neighbors.len() < j;
    NearestResult { neighbors, short }
}

/// k-nearest over an arbitrary position iterator; shared by [`nearest`] and
/// the grid index fallback paths.
pub(crate) fn k_nearest_positions(
    query: Point2,
    positions: impl Iterator<Item = Point2>,
    j: usize,
) -> Vec<Neighbor> {
    if j == 0 {
        return Vec::new();
    }
    // Bounded insertion sort into a j-slot buffer; ties keep the earlier index.
    let mut best: Vec<(f64, usize, Point2)> = Vec::with_capacity(j + 1);
    for (index, pos) in positions.enumerate() {
        let d2 = query.dist_sq(&pos);
        if best.len() == j && d2 >= best[j - 1].0 {
            continue;
        }
        let at = best.partition_point(|&(bd2, bi, _)| (bd2, bi) <= (d2, index));
        best.insert(at, (d2, index, pos));
        if best.len() > j {
            best.pop();
        }
    }
    best.into_iter()
        .map(|(d2, index, position)| Neighbor { index, position, distance: d2.sqrt() })
        .collect()
}

/// Uniform-grid spatial index for repeated k-nearest and range-count queries
/// against a fixed set of positions. Exact: expands cell rings until the
/// k-th candidate is provably closer than any unvisited cell. Cell contents
/// are stored flat (counting sort) to keep per-trial builds allocation-light.
#[derive(Debug, Clone)]
pub struct NeighborGrid {
    cell: f64,
    min_x: f64,
    min_y: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
    positions: Vec<Point2>,
    /// Number of stored positions in the 3x3 cell block around each cell;
    /// any such position is within 2*sqrt(2) cell widths of any query inside
    /// the center cell, which gives range-count queries an O(1) fast path.
    block_counts: Vec<u32>,
}

impl NeighborGrid {
    pub fn build(positions: &[Point2]) -> NeighborGrid {
        let n = positions.len();
        if n == 0 {
            return NeighborGrid {
                cell: 1.0,
                min_x: 0.0,
                min_y: 0.0,
                nx: 1,
                ny: 1,
                starts: vec![0, 0],
                items: Vec::new(),
                positions: Vec::new(),
                block_counts: vec![0],
            };
        }
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for p in positions {
            min_x = min_x.min(p.x);
            max_x = max_x.max(p.x);
            min_y = min_y.min(p.y);
            max_y = max_y.max(p.y);
        }
        let w = (max_x - min_x).max(1e-9);
        let h = (max_y - min_y).max(1e-9);
        // ~2 points per cell on average, capped so tiny sets get one cell.
        let cell = ((w * h * 2.0 / n as f64).sqrt()).max(1e-9);
        let nx = ((w / cell).ceil() as usize + 1).max(1);
        let ny = ((h / cell).ceil() as usize + 1).max(1);
        let cell_of = |p: &Point2| {
            let cx = (((p.x - min_x) / cell) as usize).min(nx - 1);
            let cy = (((p.y - min_y) / cell) as usize).min(ny - 1);
            cy * nx + cx
        };
        let mut starts = vec![0u32; nx * ny + 1];
        for p in positions {
            starts[cell_of(p) + 1] += 1;
        }
        for i in 1..starts.len() {
            starts[i] += starts[i - 1];
        }
        let mut cursor = starts.clone();
        let mut items = vec![0u32; n];
        for (i, p) in positions.iter().enumerate() {
            let c = cell_of(p);
            items[cursor[c] as usize] = i as u32;
            cursor[c] += 1;
        }
        let count_of = |cx: usize, cy: usize| {
            let c = cy * nx + cx;
            starts[c + 1] - starts[c]
        };
        let mut block_counts = vec![0u32; nx * ny];
        for cy in 0..ny {
            for cx in 0..nx {
                let mut total = 0;
                for by in cy.saturating_sub(1)..=(cy + 1).min(ny - 1) {
                    for bx in cx.saturating_sub(1)..=(cx + 1).min(nx - 1) {
                        total += count_of(bx, by);
                    }
                }
                block_counts[cy * nx + cx] = total;
            }
        }
        NeighborGrid {
            cell,
            min_x,
            min_y,
            nx,
            ny,
            starts,
            items,
            positions: positions.to_vec(),
            block_counts,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    #[inline]
    fn cell_items(&self, cx: usize, cy: usize) -> &[u32] {
        let c = cy * self.nx + cx;
        &self.items[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    /// Ring-search anchor for a query point: its grid cell clamped into
    /// bounds, the Chebyshev cell distance of the clamp (0 when the query is
    /// inside the indexed bounding box), and the outermost ring holding any
    /// grid cell. Cells on ring `r` around the anchor are at least
    /// `(r - clamp_distance - 1) * cell` away from the query.
    fn ring_anchor(&self, query: Point2) -> (i64, i64, i64, i64) {
        let qcx = ((query.x - self.min_x) / self.cell).floor();
        let qcy = ((query.y - self.min_y) / self.cell).floor();
        let qcx = qcx.clamp(-1e15, 1e15) as i64;
        let qcy = qcy.clamp(-1e15, 1e15) as i64;
        let cx = qcx.clamp(0, self.nx as i64 - 1);
        let cy = qcy.clamp(0, self.ny as i64 - 1);
        let clamp_dist = (qcx - cx).abs().max((qcy - cy).abs());
        let max_ring = cx
            .max(self.nx as i64 - 1 - cx)
            .max(cy.max(self.ny as i64 - 1 - cy));
        (cx, cy, clamp_dist, max_ring)
    }

    /// Whether at least `k` stored positions lie strictly within `radius`
    /// of `center`. `k = 0` is vacuously true.
    pub fn at_least_k_within(&self, center: Point2, radius: f64, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        if self.positions.len() < k {
            return false;
        }
        let r2 = radius * radius;
        let (acx, acy, clamp_dist, max_ring) = self.ring_anchor(center);
        // O(1) sufficient check: everything in the 3x3 block around the
        // center's cell lies within 2*sqrt(2) cell widths of the center.
        if clamp_dist == 0
            && radius > 2.0 * std::f64::consts::SQRT_2 * self.cell
            && self.block_counts[acy as usize * self.nx + acx as usize] >= k as u32
        {
            return true;
        }
        let mut found = 0usize;
        for ring in 0..=max_ring {
            let ring_min = (ring - clamp_dist - 1).max(0) as f64 * self.cell;
            if ring_min > radius {
                return false;
            }
            let scan = |cx: i64, cy: i64, found: &mut usize| {
                if cx < 0 || cy < 0 || cx >= self.nx as i64 || cy >= self.ny as i64 {
                    return;
                }
                for &idx in self.cell_items(cx as usize, cy as usize) {
                    if center.dist_sq(&self.positions[idx as usize]) < r2 {
                        *found += 1;
                    }
                }
            };
            if ring == 0 {
                scan(acx, acy, &mut found);
            } else {
                for dx in -ring..=ring {
                    scan(acx + dx, acy - ring, &mut found);
                    scan(acx + dx, acy + ring, &mut found);
                }
                for dy in (1 - ring)..ring {
                    scan(acx - ring, acy + dy, &mut found);
                    scan(acx + ring, acy + dy, &mut found);
                }
            }
            if found >= k {
                return true;
            }
        }
        false
    }

    /// The `j` nearest stored positions, ascending by distance, ties broken
    /// by insertion index.
    pub fn k_nearest(&self, query: Point2, j: usize) -> Vec<Neighbor> {
        if j == 0 || self.positions.is_empty() {
            return Vec::new();
        }
        let j = j.min(self.positions.len());
        let (acx, acy, clamp_dist, max_ring) = self.ring_anchor(query);
        let mut best: Vec<(f64, u32)> = Vec::with_capacity(j + 1);
        for ring in 0..=max_ring {
            // Once j candidates are held, stop when every cell of this ring
            // is farther than the current k-th distance.
            if best.len() == j {
                let ring_min = (ring - clamp_dist - 1).max(0) as f64 * self.cell;
                if ring_min * ring_min > best[j - 1].0 {
                    break;
                }
            }
            let visit = |cx: i64, cy: i64, best: &mut Vec<(f64, u32)>| {
                if cx < 0 || cy < 0 || cx >= self.nx as i64 || cy >= self.ny as i64 {
                    return;
                }
                for &idx in self.cell_items(cx as usize, cy as usize) {
                    let d2 = query.dist_sq(&self.positions[idx as usize]);
                    if best.len() == j && (d2, idx) >= (best[j - 1].0, best[j - 1].1) {
                        continue;
                    }
                    let at = best.partition_point(|&(bd2, bi)| (bd2, bi) <= (d2, idx));
                    best.insert(at, (d2, idx));
                    if best.len() > j {
                        best.pop();
                    }
                }
            };
            if ring == 0 {
                visit(acx, acy, &mut best);
            } else {
                for dx in -ring..=ring {
                    visit(acx + dx, acy - ring, &mut best);
                    visit(acx + dx, acy + ring, &mut best);
                }
                for dy in (1 - ring)..ring {
                    visit(acx - ring, acy + dy, &mut best);
                    visit(acx + ring, acy + dy, &mut best);
                }
            }
        }
        best.into_iter()
            .map(|(d2, idx)| Neighbor {
                index: idx as usize,
                position: self.positions[idx as usize],
                distance: d2.sqrt(),
            })
            .collect()
    }
}
