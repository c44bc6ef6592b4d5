use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::{Configuration, Overrides, Params, Periodic, Scene};
use super::orders::{Order, VanishingOrders};
use super::patch::{GapPatch, GraphFn};
use super::shape::{bisect, Band, Disk, Intersection, Point, PowerEpigraph, RoundedRect, Union, UpperArc};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PresetName {
    #[serde(rename = "two_disks_2d")]
    TwoDisks2d,
    #[serde(rename = "flat_gap_2d")]
    FlatGap2d,
    #[serde(rename = "power_gap_2d")]
    PowerGap2d,
    #[serde(rename = "tori_cross_section_2d")]
    ToriCrossSection2d,
    #[serde(rename = "capacitor_strip_2d")]
    CapacitorStrip2d,
    #[serde(rename = "integral_only_3d")]
    IntegralOnly3d,
}

impl PresetName {
    pub const ALL: [PresetName; 6] = [
        PresetName::TwoDisks2d,
        PresetName::FlatGap2d,
        PresetName::PowerGap2d,
        PresetName::ToriCrossSection2d,
        PresetName::CapacitorStrip2d,
        PresetName::IntegralOnly3d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::TwoDisks2d => "two_disks_2d",
            PresetName::FlatGap2d => "flat_gap_2d",
            PresetName::PowerGap2d => "power_gap_2d",
            PresetName::ToriCrossSection2d => "tori_cross_section_2d",
            PresetName::CapacitorStrip2d => "capacitor_strip_2d",
            PresetName::IntegralOnly3d => "integral_only_3d",
        }
    }

    /// Largest admissible ε.
    pub fn eps_max(self) -> f64 {
        match self {
            PresetName::TwoDisks2d => 0.5,
            PresetName::FlatGap2d => 0.2,
            PresetName::PowerGap2d => 0.2,
            PresetName::ToriCrossSection2d => 0.1,
            PresetName::CapacitorStrip2d => 0.25,
            PresetName::IntegralOnly3d => 1.0,
        }
    }

    /// Parameter names and defaults. `alpha` of the 3D preset is a list and
    /// handled separately.
    fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            PresetName::TwoDisks2d => &[("radius", 1.0), ("omega_radius", 4.0), ("half_width", 0.3)],
            PresetName::FlatGap2d => {
                &[("half_length", 2.5), ("corner", 0.3), ("thickness", 2.6), ("omega_radius", 4.5)]
            }
            PresetName::PowerGap2d => {
                &[("alpha", 2.0), ("cap_radius", 1.0), ("cap_height", 0.6), ("omega_radius", 4.0), ("half_width", 0.6)]
            }
            PresetName::ToriCrossSection2d => &[
                ("inner_radius", 0.6),
                ("outer_radius", 0.4),
                ("band_half_width", 0.2),
                ("omega_radius", 2.5),
                ("half_width", 0.25),
            ],
            PresetName::CapacitorStrip2d => {
                &[("period", 0.5), ("layer_below", 0.5), ("plate", 0.5), ("layer_above", 0.5)]
            }
            PresetName::IntegralOnly3d => &[("half_width", 1.0)],
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Resolves numeric parameters against the preset defaults, rejecting
/// unknown keys.
struct Resolved {
    values: BTreeMap<String, f64>,
    params: Params,
}

impl Resolved {
    fn new(name: PresetName, given: &Params) -> Result<Resolved> {
        let defaults = name.defaults();
        let mut values = BTreeMap::new();
        let mut params = Params::new();
        for k in given.keys() {
            let known = defaults.iter().any(|(d, _)| d == k) || (name == PresetName::IntegralOnly3d && k == "alpha");
            if !known {
                return Err(Error::InvalidInput(format!("unknown parameter `{k}` for {name}")));
            }
        }
        for (k, d) in defaults {
            let v = match given.get(*k) {
                None => *d,
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| Error::InvalidInput(format!("parameter `{k}` of {name} must be a number")))?,
            };
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("parameter `{k}` = {v} must be positive")));
            }
            values.insert(k.to_string(), v);
            params.insert(k.to_string(), serde_json::json!(v));
        }
        Ok(Resolved { values, params })
    }

    fn get(&self, k: &str) -> f64 {
        self.values[k]
    }
}

/// Builds and validates a preset configuration at the given ε.
pub fn preset(name: PresetName, epsilon: f64, params: &Params) -> Result<Configuration> {
    if !(epsilon > 0.0 && epsilon <= name.eps_max()) {
        return Err(Error::EpsilonOutOfRange { preset: name.to_string(), eps: epsilon, max: name.eps_max() });
    }
    let mut res = Resolved::new(name, params)?;
    let config = match name {
        PresetName::TwoDisks2d => two_disks(epsilon, &res),
        PresetName::FlatGap2d => flat_gap(epsilon, &res),
        PresetName::PowerGap2d => power_gap(epsilon, &res),
        PresetName::ToriCrossSection2d => tori(epsilon, &res),
        PresetName::CapacitorStrip2d => capacitor(epsilon, &res),
        PresetName::IntegralOnly3d => integral_only(epsilon, &mut res, params),
    }?;
    config.validate()?;
    Ok(config)
}

pub fn preset_by_name(name: &str, epsilon: f64, params: &Params) -> Result<Configuration> {
    preset(name.parse()?, epsilon, params)
}

fn base(name: PresetName, epsilon: f64, res: &Resolved, scene: Option<Scene>) -> Configuration {
    Configuration {
        preset: name,
        dim: 2,
        epsilon,
        eps_max: name.eps_max(),
        params: res.params.clone(),
        overrides: Overrides::default(),
        scene,
        patches: Vec::new(),
        far_margin: 0.5,
        far_radius: 0.02,
        far_collar: 0.0,
        corners: Vec::new(),
        components: 1,
        periodic: None,
        center: [0.0, 0.0],
        normal_margin: 0.05,
        tangent_margin: 0.05,
        solid_orders: None,
        meta: BTreeMap::new(),
    }
}

fn patch2d(center: Point, angle: f64, r: f64, f: GraphFn, g: GraphFn, orders: Vec<Order>) -> GapPatch {
    GapPatch {
        center: center.to_vec(),
        frame: GapPatch::frame2d(angle),
        half_width: r,
        f,
        g,
        orders: VanishingOrders::new(orders).expect("preset orders are valid"),
        sandwich: 4.0,
        graph_bound: 10.0,
    }
}

fn check_fit(name: PresetName, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name}: {what}")))
    }
}

/// Two disks of radius R stacked vertically with a gap ε; D1 below.
fn two_disks(eps: f64, res: &Resolved) -> Result<Configuration> {
    let (rad, ro, r) = (res.get("radius"), res.get("omega_radius"), res.get("half_width"));
    check_fit(PresetName::TwoDisks2d, r < rad, "half_width must be below the radius")?;
    check_fit(PresetName::TwoDisks2d, 2.0 * rad + eps < ro, "disks must fit inside the outer disk")?;
    let c = rad + eps / 2.0;
    let scene = Scene {
        omega: Arc::new(Disk { center: [0.0, 0.0], radius: ro }),
        d1: Arc::new(Disk { center: [0.0, -c], radius: rad }),
        d2: Arc::new(Disk { center: [0.0, c], radius: rad }),
    };
    let mut cfg = base(PresetName::TwoDisks2d, eps, res, Some(scene));
    cfg.patches.push(patch2d(
        [0.0, 0.0],
        0.0,
        r,
        GraphFn::Circle { offset: -c, radius: rad, sign: 1.0 },
        GraphFn::Circle { offset: c, radius: rad, sign: -1.0 },
        vec![Order::Finite(1.0)],
    ));
    cfg.solid_orders = Some(VanishingOrders::finite_list(&[1.0, 1.0])?);
    Ok(cfg)
}

/// Two rounded slabs whose facing sides are parallel at distance ε.
fn flat_gap(eps: f64, res: &Resolved) -> Result<Configuration> {
    let (w, rho, th, ro) = (res.get("half_length"), res.get("corner"), res.get("thickness"), res.get("omega_radius"));
    let name = PresetName::FlatGap2d;
    check_fit(name, rho < w && 2.0 * rho < th, "corner radius too large")?;
    let r = w - rho;
    check_fit(name, r + rho <= th, "thickness must cover the patch box")?;
    check_fit(name, w.hypot(th + eps) < ro, "slabs must fit inside the outer disk")?;
    let slab =
        |sign: f64| RoundedRect { center: [0.0, sign * (eps / 2.0 + th / 2.0)], half: [w, th / 2.0], corner: rho };
    let scene = Scene {
        omega: Arc::new(Disk { center: [0.0, 0.0], radius: ro }),
        d1: Arc::new(slab(-1.0)),
        d2: Arc::new(slab(1.0)),
    };
    let mut cfg = base(name, eps, res, Some(scene));
    cfg.patches.push(patch2d(
        [0.0, 0.0],
        0.0,
        r,
        GraphFn::Constant { value: -eps / 2.0 },
        GraphFn::Constant { value: eps / 2.0 },
        vec![Order::Infinite],
    ));
    // The slabs separate along the rounded corners; the collar is where the
    // two arcs are still closer than the far radius.
    cfg.far_collar = (2.0 * rho * cfg.far_radius).sqrt() + 2.0 * cfg.far_radius;
    cfg.tangent_margin = rho + 0.05;
    cfg.solid_orders = Some(VanishingOrders::new(vec![Order::Infinite, Order::Infinite])?);
    Ok(cfg)
}

/// Facing boundaries y = ±(ε/2 + |x|^{2α}) capped by circular arcs.
fn power_gap(eps: f64, res: &Resolved) -> Result<Configuration> {
    let (alpha, rc, hc, ro, r) = (
        res.get("alpha"),
        res.get("cap_radius"),
        res.get("cap_height"),
        res.get("omega_radius"),
        res.get("half_width"),
    );
    let name = PresetName::PowerGap2d;
    check_fit(name, (1.0..=64.0).contains(&alpha), "alpha must lie in [1, 64]")?;
    let p = 2.0 * alpha;
    // Each inclusion is the region beyond its power graph, capped by a disk
    // of radius `cap_radius` centred `cap_height` past the tip. The graph
    // leaves the disk once, at x = xc.
    let meet = |x: f64| x * x + (x.powf(p) - hc).powi(2) - rc * rc;
    check_fit(name, hc > 0.0 && hc < rc, "cap_height must lie in (0, cap_radius)")?;
    let (_, xc) = bisect(meet, 0.0, rc, 1e-14);
    check_fit(name, r < xc, "half_width must stay inside the power-law part")?;
    check_fit(name, 2.0 * (hc + rc) + eps < ro, "inclusions must fit inside the outer disk")?;
    let side = |s: f64| -> Arc<Intersection> {
        Arc::new(Intersection(vec![
            Arc::new(PowerEpigraph { x0: 0.0, offset: s * eps / 2.0, coef: s, power: p, upward: s > 0.0 }),
            Arc::new(Disk { center: [0.0, s * (eps / 2.0 + hc)], radius: rc }),
        ]))
    };
    let scene = Scene { omega: Arc::new(Disk { center: [0.0, 0.0], radius: ro }), d1: side(-1.0), d2: side(1.0) };
    let mut cfg = base(name, eps, res, Some(scene));
    let yc = eps / 2.0 + xc.powf(p);
    cfg.corners = vec![[xc, yc], [-xc, yc], [xc, -yc], [-xc, -yc]];
    cfg.patches.push(patch2d(
        [0.0, 0.0],
        0.0,
        r,
        GraphFn::Power { offset: -eps / 2.0, sign: -1.0, coef: vec![1.0], power: vec![p] },
        GraphFn::Power { offset: eps / 2.0, sign: 1.0, coef: vec![1.0], power: vec![p] },
        vec![Order::Finite(alpha)],
    ));
    cfg.tangent_margin = 0.1;
    cfg.meta.insert("corner_x".into(), xc);
    Ok(cfg)
}

/// A disk D2 wrapped from above by a horseshoe D1: two disks beside D2 at
/// distance ε, joined by an arc band. Two gap patches, left and right.
fn tori(eps: f64, res: &Resolved) -> Result<Configuration> {
    let (r2, r1, bw, ro, r) = (
        res.get("inner_radius"),
        res.get("outer_radius"),
        res.get("band_half_width"),
        res.get("omega_radius"),
        res.get("half_width"),
    );
    let name = PresetName::ToriCrossSection2d;
    check_fit(name, bw < r1, "band must be narrower than the side disks")?;
    check_fit(name, r < r1.min(r2), "half_width must be below both radii")?;
    check_fit(name, r1 - bw > 0.1, "band must clear the inner disk")?;
    let a = r2 + eps + r1;
    check_fit(name, (a + r1).max(a + bw) < ro, "horseshoe must fit inside the outer disk")?;
    let d1 = Union(vec![
        Arc::new(Disk { center: [a, 0.0], radius: r1 }),
        Arc::new(Disk { center: [-a, 0.0], radius: r1 }),
        Arc::new(UpperArc { center: [0.0, 0.0], r_in: a - bw, r_out: a + bw }),
    ]);
    let scene = Scene {
        omega: Arc::new(Disk { center: [0.0, 0.0], radius: ro }),
        d1: Arc::new(d1),
        d2: Arc::new(Disk { center: [0.0, 0.0], radius: r2 }),
    };
    let mut cfg = base(name, eps, res, Some(scene));
    for rho in [a - bw, a + bw] {
        let x = (rho * rho - r1 * r1 + a * a) / (2.0 * a);
        let y = (rho * rho - x * x).max(0.0).sqrt();
        cfg.corners.push([x, y]);
        cfg.corners.push([-x, y]);
    }
    let f = GraphFn::Circle { offset: -eps / 2.0 - r1, radius: r1, sign: 1.0 };
    let g = GraphFn::Circle { offset: r2 + eps / 2.0, radius: r2, sign: -1.0 };
    cfg.patches.push(patch2d([r2 + eps / 2.0, 0.0], FRAC_PI_2, r, f.clone(), g.clone(), vec![Order::Finite(1.0)]));
    cfg.patches.push(patch2d([-r2 - eps / 2.0, 0.0], -FRAC_PI_2, r, f, g, vec![Order::Finite(1.0)]));
    cfg.solid_orders = Some(VanishingOrders::new(vec![Order::Finite(1.0), Order::Infinite])?);
    Ok(cfg)
}

/// Periodic layered strip: ∂Ω, a buffer layer, plate D1, the gap, plate D2,
/// a buffer layer, ∂Ω. The exact potentials are piecewise linear in y.
fn capacitor(eps: f64, res: &Resolved) -> Result<Configuration> {
    let (l, ha, t, hb) = (res.get("period"), res.get("layer_below"), res.get("plate"), res.get("layer_above"));
    let name = PresetName::CapacitorStrip2d;
    let r = 0.5 * l + 0.05;
    check_fit(name, r < t, "plates must be thicker than half the period")?;
    let top = ha + 2.0 * t + eps + hb;
    let xr = [-l, 2.0 * l];
    let scene = Scene {
        omega: Arc::new(Band { y: [0.0, top], x: xr }),
        d1: Arc::new(Band { y: [ha, ha + t], x: xr }),
        d2: Arc::new(Band { y: [ha + t + eps, ha + 2.0 * t + eps], x: xr }),
    };
    let mut cfg = base(name, eps, res, Some(scene));
    cfg.periodic = Some(Periodic { x0: 0.0, period: l });
    cfg.components = 3;
    cfg.far_margin = 0.5 * ha.min(hb);
    cfg.center = [0.5 * l, 0.5 * top];
    cfg.patches.push(patch2d(
        [0.5 * l, ha + t + eps / 2.0],
        0.0,
        r,
        GraphFn::Constant { value: -eps / 2.0 },
        GraphFn::Constant { value: eps / 2.0 },
        vec![Order::Infinite],
    ));
    for (k, v) in [("period", l), ("layer_below", ha), ("plate", t), ("layer_above", hb), ("height", top)] {
        cfg.meta.insert(k.into(), v);
    }
    Ok(cfg)
}

/// A single 3D gap with g - f = ε + Σ |x_j|^{2α_j} on the unit box; no scene.
fn integral_only(eps: f64, res: &mut Resolved, given: &Params) -> Result<Configuration> {
    let orders: VanishingOrders = match given.get("alpha") {
        None => VanishingOrders::finite_list(&[1.0, 2.0])?,
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(format!("alpha: {e}")))?,
    };
    if orders.dim() != 3 {
        return Err(Error::InvalidInput("integral_only_3d needs two orders".into()));
    }
    res.params.insert("alpha".into(), serde_json::to_value(&orders)?);
    let r = res.get("half_width");
    let (coef, power): (Vec<f64>, Vec<f64>) = orders
        .as_slice()
        .iter()
        .map(|o| match o.finite() {
            Some(a) => (0.5, 2.0 * a),
            None => (0.0, 0.0),
        })
        .unzip();
    let mut cfg = base(PresetName::IntegralOnly3d, eps, res, None);
    cfg.dim = 3;
    cfg.patches.push(GapPatch {
        center: vec![0.0; 3],
        frame: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        half_width: r,
        f: GraphFn::Power { offset: -eps / 2.0, sign: -1.0, coef: coef.clone(), power: power.clone() },
        g: GraphFn::Power { offset: eps / 2.0, sign: 1.0, coef, power },
        orders: orders.clone(),
        sandwich: 4.0,
        graph_bound: 10.0 * (1.0 + r).powf(2.0 * orders.finite().iter().cloned().fold(1.0, f64::max)),
    });
    cfg.solid_orders = Some(orders);
    Ok(cfg)
}
