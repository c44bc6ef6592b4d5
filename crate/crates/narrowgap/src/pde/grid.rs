use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::axis;
use crate::geometry::{bisect, Configuration, Point, Scene};
use crate::par;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundaryClass {
    Omega,
    D1,
    D2,
}

impl BoundaryClass {
    pub const ALL: [BoundaryClass; 3] = [BoundaryClass::Omega, BoundaryClass::D1, BoundaryClass::D2];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
#[repr(u8)]
pub enum NodeClass {
    Active = 0,
    BoundaryOmega = 1,
    BoundaryD1 = 2,
    BoundaryD2 = 3,
    Exterior = 4,
}

/// East, west, north, south.
pub const DIRS: [[i32; 2]; 4] = [[1, 0], [-1, 0], [0, 1], [0, -1]];

/// Spacing rule for a grid: fine spacing `h`, optionally graded away from
/// the gap bands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<Grading>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grading {
    /// Growth factor between neighbouring cells.
    pub ratio: f64,
    /// Largest spacing.
    pub h_max: f64,
}

impl GridSpec {
    pub fn uniform(h: f64) -> GridSpec {
        GridSpec { h, grading: None }
    }

    pub fn graded(h: f64, ratio: f64, h_max: f64) -> GridSpec {
        GridSpec { h, grading: Some(Grading { ratio, h_max }) }
    }
}

/// One stencil arm of an active node: either a link to another active node
/// or a cut ending on the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arm {
    /// Active-node index for links, cut index for cuts.
    pub target: u32,
    pub is_cut: bool,
    pub length: f64,
    /// Energy weight: transverse dual width over arm length.
    pub weight: f64,
}

/// An arm that crosses the boundary at fraction `theta` of the lattice edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cut {
    pub node: u32,
    pub dir: u8,
    pub theta: f64,
    pub point: Point,
    pub class: BoundaryClass,
}

static NEXT_GRID_ID: AtomicU64 = AtomicU64::new(1);

/// Cut-cell discretization of Ω̃ on a tensor lattice.
#[derive(Debug)]
pub struct Grid {
    id: u64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// x-period when the lattice wraps around in x.
    pub period: Option<f64>,
    /// Fine spacing.
    pub h: f64,
    pub epsilon: f64,
    pub class: Vec<NodeClass>,
    active_of: Vec<u32>,
    /// Lattice position (i, j) of each active node.
    pub nodes: Vec<[u32; 2]>,
    pub arms: Vec<[Arm; 4]>,
    pub cuts: Vec<Cut>,
    /// Gap patch containing each active node, if any.
    pub patch: Vec<Option<u16>>,
    /// Active nodes within 2 cells of a declared corner.
    pub near_corner: Vec<bool>,
    pub components: usize,
}

const NONE: u32 = u32::MAX;

impl Grid {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lattice_index(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    pub fn active_index(&self, i: usize, j: usize) -> Option<usize> {
        let a = self.active_of[self.lattice_index(i, j)];
        (a != NONE).then_some(a as usize)
    }

    pub fn point(&self, node: usize) -> Point {
        let [i, j] = self.nodes[node];
        [self.xs[i as usize], self.ys[j as usize]]
    }

    pub fn has_class(&self, class: BoundaryClass) -> bool {
        self.cuts.iter().any(|c| c.class == class)
    }

    /// Largest lattice spacing along x over `[a, b]` and along y over `[c, d]`.
    pub fn max_spacing_in(&self, xr: [f64; 2], yr: [f64; 2]) -> (f64, f64) {
        let span = |v: &[f64], r: [f64; 2]| {
            v.windows(2).filter(|w| w[1] > r[0] && w[0] < r[1]).map(|w| w[1] - w[0]).fold(0.0, f64::max)
        };
        (span(&self.xs, xr), span(&self.ys, yr))
    }

    /// Spacing between lattice neighbours `(i, j)` and `(i + di, j + dj)`.
    fn spacing(&self, i: usize, j: usize, d: [i32; 2]) -> Option<(usize, usize, f64)> {
        let (nx, ny) = (self.nx() as i64, self.ny() as i64);
        let (ni, nj) = (i as i64 + d[0] as i64, j as i64 + d[1] as i64);
        if nj < 0 || nj >= ny {
            return None;
        }
        if d[0] != 0 {
            match self.period {
                Some(p) => {
                    let wi = ni.rem_euclid(nx) as usize;
                    let dx = if ni < 0 {
                        self.xs[i] + p - self.xs[wi]
                    } else if ni >= nx {
                        self.xs[wi] + p - self.xs[i]
                    } else {
                        (self.xs[wi] - self.xs[i]).abs()
                    };
                    Some((wi, nj as usize, dx))
                }
                None if ni < 0 || ni >= nx => None,
                None => Some((ni as usize, nj as usize, (self.xs[ni as usize] - self.xs[i]).abs())),
            }
        } else {
            Some((i, nj as usize, (self.ys[nj as usize] - self.ys[j]).abs()))
        }
    }
}

fn dual_widths(v: &[f64], period: Option<f64>) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|k| match period {
            Some(p) => {
                let prev = if k == 0 { v[n - 1] - p } else { v[k - 1] };
                let next = if k + 1 == n { v[0] + p } else { v[k + 1] };
                0.5 * (next - prev)
            }
            None => {
                let prev = if k == 0 { v[0] } else { v[k - 1] };
                let next = if k + 1 == n { v[n - 1] } else { v[k + 1] };
                0.5 * (next - prev)
            }
        })
        .collect()
}

/// Signed indicator of Ω̃ (negative inside) and the boundary class that
/// dominates at `p`.
fn composite(config: &Configuration, scene: &Scene, p: Point) -> (f64, BoundaryClass) {
    let p = config.wrap(p);
    let o = scene.omega.indicator(p);
    let a = -scene.d1.indicator(p);
    let b = -scene.d2.indicator(p);
    if o >= a && o >= b {
        (o, BoundaryClass::Omega)
    } else if a >= b {
        (a, BoundaryClass::D1)
    } else {
        (b, BoundaryClass::D2)
    }
}

/// Builds the cut-cell grid of the configuration's scene.
pub fn build_grid(config: &Configuration, spec: &GridSpec) -> Result<Grid> {
    let scene = config.scene()?;
    if config.dim != 2 {
        return Err(Error::InvalidInput("grids are two-dimensional".into()));
    }
    let h = spec.h;
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("spacing {h} must be positive")));
    }
    let eps = config.epsilon;
    if !config.patches.is_empty() && h > eps / 8.0 * (1.0 + 1e-12) {
        return Err(Error::Resolution(format!("spacing {h} exceeds ε/8 = {} in the gap patches", eps / 8.0)));
    }
    if let Some(g) = spec.grading {
        if !(g.ratio >= 1.0 && g.h_max >= h) {
            return Err(Error::InvalidInput(format!("grading needs ratio >= 1 and h_max >= h (got {g:?})")));
        }
    }

    let bb = scene.omega.bbox();
    let bands: Vec<([f64; 2], [f64; 2])> =
        config.patches.iter().map(|p| p.band_bbox2(config.normal_margin, config.tangent_margin)).collect();
    let pad = 2.0 * spec.grading.map_or(h, |g| g.h_max);
    let make_axis = |lo: f64, hi: f64, fine: Vec<(f64, f64)>| match spec.grading {
        Some(g) => axis::graded(lo - pad, hi + pad, h, &fine, g.ratio, g.h_max),
        None => axis::uniform(lo - pad, hi + pad, h),
    };
    let xs = match config.periodic {
        Some(p) => axis::periodic(p.x0, p.period, h),
        None => make_axis(bb.min[0], bb.max[0], bands.iter().map(|b| (b.0[0], b.0[1])).collect()),
    };
    let ys = make_axis(bb.min[1], bb.max[1], bands.iter().map(|b| (b.1[0], b.1[1])).collect());
    let period = config.periodic.map(|p| p.period);
    let (nx, ny) = (xs.len(), ys.len());
    if (nx as u64) * (ny as u64) >= NONE as u64 {
        return Err(Error::InvalidInput(format!("lattice {nx} x {ny} too large")));
    }

    let mut inside: Vec<bool> = par::map_indexed(nx * ny, |k| {
        let p = [xs[k % nx], ys[k / nx]];
        composite(config, scene, p).0 < 0.0
    });
    let mut grid = assemble(config, scene, &xs, &ys, period, h, eps, &inside)?;
    for _ in 0..4 {
        let close: Vec<usize> = grid
            .cuts
            .iter()
            .filter(|c| c.theta < THETA_MIN)
            .map(|c| {
                let [i, j] = grid.nodes[c.node as usize];
                grid.lattice_index(i as usize, j as usize)
            })
            .collect();
        if close.is_empty() {
            break;
        }
        for k in close {
            inside[k] = false;
        }
        grid = assemble(config, scene, &xs, &ys, period, h, eps, &inside)?;
    }
    let wx = dual_widths(&grid.xs, period);
    let wy = dual_widths(&grid.ys, None);

    grid.components = count_components(&grid);
    if grid.components != config.components {
        return Err(Error::Disconnected { found: grid.components, expected: config.components });
    }

    let g = &grid;
    let patch = par::map_indexed(g.nodes.len(), |n| config.patch_at(g.point(n), 1.0).map(|i| i as u16));
    let near_corner = par::map_indexed(g.nodes.len(), |n| {
        let p = g.point(n);
        let [i, j] = g.nodes[n];
        let cell = wx[i as usize].max(wy[j as usize]);
        config.corners.iter().any(|c| (p[0] - c[0]).hypot(p[1] - c[1]) < 2.0 * cell)
    });
    grid.patch = patch;
    grid.near_corner = near_corner;

    for (k, (bx, by)) in bands.iter().enumerate() {
        let tight = config.patches[k].band_bbox2(0.0, 0.0);
        let xr = if period.is_some() { [f64::NEG_INFINITY, f64::INFINITY] } else { tight.0 };
        let (sx, sy) = grid.max_spacing_in(xr, tight.1);
        if sx.max(sy) > eps / 8.0 * (1.0 + 1e-9) {
            return Err(Error::Resolution(format!(
                "spacing {} in the band of patch {k} ({bx:?} x {by:?}) exceeds ε/8",
                sx.max(sy)
            )));
        }
    }
    Ok(grid)
}

/// Cuts closer than this fraction of an edge to their node drop the node
/// from the active set instead: such nodes sit on the boundary up to
/// rounding, and their arms would carry weights of order 1/θ.
const THETA_MIN: f64 = 1e-6;

#[allow(clippy::too_many_arguments)]
fn assemble(
    config: &Configuration,
    scene: &Scene,
    xs: &[f64],
    ys: &[f64],
    period: Option<f64>,
    h: f64,
    eps: f64,
    inside: &[bool],
) -> Result<Grid> {
    let (nx, ny) = (xs.len(), ys.len());
    let mut active_of = vec![NONE; nx * ny];
    let mut nodes = Vec::new();
    for (k, &a) in inside.iter().enumerate() {
        if a {
            active_of[k] = nodes.len() as u32;
            nodes.push([(k % nx) as u32, (k / nx) as u32]);
        }
    }

    let mut grid = Grid {
        id: NEXT_GRID_ID.fetch_add(1, Ordering::Relaxed),
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        period,
        h,
        epsilon: eps,
        class: vec![NodeClass::Exterior; nx * ny],
        active_of,
        nodes,
        arms: Vec::new(),
        cuts: Vec::new(),
        patch: Vec::new(),
        near_corner: Vec::new(),
        components: 0,
    };
    let wx = dual_widths(&grid.xs, period);
    let wy = dual_widths(&grid.ys, None);

    // Arms, with cuts located by bisection on the composite indicator.
    type Pending = (usize, [Arm; 4], Vec<(u8, Cut)>);
    let g = &grid;
    let per_node: Vec<Result<Pending>> = par::map_indexed(g.nodes.len(), |n| {
        let [i, j] = g.nodes[n];
        let (i, j) = (i as usize, j as usize);
        let p = [g.xs[i], g.ys[j]];
        let blank = Arm { target: 0, is_cut: false, length: 0.0, weight: 0.0 };
        let mut arms = [blank; 4];
        let mut cuts = Vec::new();
        for (d, dir) in DIRS.iter().enumerate() {
            let (ni, nj, len) = g
                .spacing(i, j, *dir)
                .ok_or_else(|| Error::InvalidInput(format!("active node at {p:?} on the lattice edge")))?;
            let width = if dir[0] != 0 { wy[j] } else { wx[i] };
            let nb = g.active_of[nj * nx + ni];
            if nb != NONE {
                arms[d] = Arm { target: nb, is_cut: false, length: len, weight: width / len };
                continue;
            }
            let q = [p[0] + dir[0] as f64 * len, p[1] + dir[1] as f64 * len];
            let along = |t: f64| composite(config, scene, [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]).0;
            let (_, theta) = bisect(along, 0.0, 1.0, 1e-12);
            let point = [p[0] + theta * (q[0] - p[0]), p[1] + theta * (q[1] - p[1])];
            let class = composite(config, scene, point).1;
            let length = theta * len;
            arms[d] = Arm { target: 0, is_cut: true, length, weight: width / length };
            cuts.push((d as u8, Cut { node: n as u32, dir: d as u8, theta, point: config.wrap(point), class }));
        }
        Ok((n, arms, cuts))
    });
    let mut arms = Vec::with_capacity(grid.nodes.len());
    let mut cuts = Vec::new();
    for r in per_node {
        let (n, mut a, cs) = r?;
        for (d, c) in cs {
            a[d as usize].target = cuts.len() as u32;
            let [i, j] = grid.nodes[n];
            if let Some((ni, nj, _)) = grid.spacing(i as usize, j as usize, DIRS[d as usize]) {
                let k = nj * nx + ni;
                if grid.class[k] == NodeClass::Exterior {
                    grid.class[k] = match c.class {
                        BoundaryClass::Omega => NodeClass::BoundaryOmega,
                        BoundaryClass::D1 => NodeClass::BoundaryD1,
                        BoundaryClass::D2 => NodeClass::BoundaryD2,
                    };
                }
            }
            cuts.push(c);
        }
        arms.push(a);
    }
    for &[i, j] in &grid.nodes {
        let k = j as usize * nx + i as usize;
        grid.class[k] = NodeClass::Active;
    }
    grid.arms = arms;
    grid.cuts = cuts;

    Ok(grid)
}

fn count_components(grid: &Grid) -> usize {
    let n = grid.nodes.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for a in &grid.arms[v] {
                if !a.is_cut && !seen[a.target as usize] {
                    seen[a.target as usize] = true;
                    queue.push_back(a.target as usize);
                }
            }
        }
    }
    count
}
