use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::orders::VanishingOrders;
use super::patch::{validate_gap, GapPatch};
use super::presets::{self, PresetName};
use super::shape::{Point, Shape};
use crate::{Error, Result};

pub type Params = BTreeMap<String, serde_json::Value>;

/// Optional adjustments applied on top of a preset.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub far_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub far_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sandwich: Option<f64>,
}

/// Serialized form of a configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub preset: PresetName,
    pub epsilon: f64,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub overrides: Overrides,
}

/// The three shapes of a 2D scene: the outer domain and the two inclusions.
#[derive(Clone, Debug)]
pub struct Scene {
    pub omega: Shape,
    pub d1: Shape,
    pub d2: Shape,
}

/// x-periodicity of strip-like scenes: points are wrapped into
/// `[x0, x0 + period)` before classification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Periodic {
    pub x0: f64,
    pub period: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Region {
    InD1,
    InD2,
    InGap(usize),
    InFar,
    OutsideOmega,
}

/// An ε-specific two-inclusion scene with its declared gap patches.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub preset: PresetName,
    pub dim: usize,
    pub epsilon: f64,
    pub eps_max: f64,
    /// Preset parameters with defaults filled in.
    pub params: Params,
    pub overrides: Overrides,
    /// `None` for integral-only configurations.
    pub scene: Option<Scene>,
    pub patches: Vec<GapPatch>,
    /// Minimum distance from the inclusions to ∂Ω.
    pub far_margin: f64,
    /// Outside the patch boxes (grown by `far_collar`), no point may be
    /// within this distance of both inclusions.
    pub far_radius: f64,
    pub far_collar: f64,
    /// Corners of piecewise-smooth boundaries; excluded from sup|∇u|.
    pub corners: Vec<Point>,
    /// Number of connected components of Ω̃.
    pub components: usize,
    pub periodic: Option<Periodic>,
    /// Reference point for the polar angle on ∂Ω.
    pub center: Point,
    /// Grid refinement margins around the gap band, across and along it.
    pub normal_margin: f64,
    pub tangent_margin: f64,
    /// Orders of the three-dimensional configuration this scene is a cross
    /// section of, when there is one.
    pub solid_orders: Option<VanishingOrders>,
    /// Preset-specific derived lengths.
    pub meta: BTreeMap<String, f64>,
}

impl Configuration {
    pub fn from_document(doc: &ConfigDocument) -> Result<Configuration> {
        let mut c = presets::preset(doc.preset, doc.epsilon, &doc.params)?;
        c.apply_overrides(&doc.overrides)?;
        Ok(c)
    }

    pub fn to_document(&self) -> ConfigDocument {
        ConfigDocument {
            preset: self.preset,
            epsilon: self.epsilon,
            params: self.params.clone(),
            overrides: self.overrides.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Configuration> {
        Self::from_document(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    /// The same preset and parameters at another ε.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Configuration> {
        let mut doc = self.to_document();
        doc.epsilon = epsilon;
        Self::from_document(&doc)
    }

    fn apply_overrides(&mut self, o: &Overrides) -> Result<()> {
        if let Some(m) = o.far_margin {
            self.far_margin = m;
        }
        if let Some(r) = o.far_radius {
            self.far_radius = r;
        }
        if let Some(c) = o.sandwich {
            for p in &mut self.patches {
                p.sandwich = c;
            }
        }
        self.overrides = o.clone();
        self.validate()
    }

    pub fn scene(&self) -> Result<&Scene> {
        self.scene.as_ref().ok_or_else(|| Error::InvalidInput(format!("{} has no 2D scene", self.preset)))
    }

    pub fn wrap(&self, p: Point) -> Point {
        match self.periodic {
            Some(Periodic { x0, period }) => [x0 + (p[0] - x0).rem_euclid(period), p[1]],
            None => p,
        }
    }

    /// Assigns exactly one region to `p`. Inclusions are closed, Ω is open.
    pub fn classify(&self, p: Point) -> Region {
        let Some(scene) = &self.scene else {
            return Region::OutsideOmega;
        };
        let p = self.wrap(p);
        if !(scene.omega.indicator(p) < 0.0) {
            return Region::OutsideOmega;
        }
        if scene.d1.indicator(p) <= 0.0 {
            return Region::InD1;
        }
        if scene.d2.indicator(p) <= 0.0 {
            return Region::InD2;
        }
        match self.patch_at(p, 1.0) {
            Some(i) => Region::InGap(i),
            None => Region::InFar,
        }
    }

    /// Lowest-index patch whose box scaled by `scale` contains `p`.
    pub fn patch_at(&self, p: Point, scale: f64) -> Option<usize> {
        let p = self.wrap(p);
        self.patches.iter().position(|pt| pt.dim() == 2 && pt.contains2(p, scale))
    }

    /// Checks the gap sandwich of every patch and, for 2D scenes, the
    /// sampled disjointness, margin and far-region conditions.
    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.patches.iter().enumerate() {
            let v = validate_gap(p, self.epsilon, 512)?;
            if !v.within(p.sandwich) {
                return Err(Error::InvalidConfiguration(format!(
                    "patch {i}: gap ratio in [{:.4}, {:.4}] outside the declared sandwich {}",
                    v.c_lo, v.c_hi, p.sandwich
                )));
            }
            check_graph_bound(i, p)?;
        }
        if let Some(scene) = &self.scene {
            self.validate_scene(scene)?;
        }
        Ok(())
    }

    fn validate_scene(&self, scene: &Scene) -> Result<()> {
        let bb = scene.omega.bbox();
        let (xlo, xhi) = match self.periodic {
            Some(Periodic { x0, period }) => (x0, x0 + period),
            None => (bb.min[0], bb.max[0]),
        };
        let n = 160;
        let dirs = 32;
        let ring = |p: Point, rad: f64, k: usize| -> Point {
            let t = 2.0 * PI * k as f64 / dirs as f64;
            self.wrap([p[0] + rad * t.cos(), p[1] + rad * t.sin()])
        };
        for a in 0..n {
            for b in 0..n {
                let p = [
                    xlo + (xhi - xlo) * (a as f64 + 0.5) / n as f64,
                    bb.min[1] + (bb.max[1] - bb.min[1]) * (b as f64 + 0.5) / n as f64,
                ];
                let in1 = scene.d1.indicator(p) <= 0.0;
                let in2 = scene.d2.indicator(p) <= 0.0;
                if in1 && in2 {
                    return Err(Error::InvalidConfiguration(format!("inclusions overlap at {p:?}")));
                }
                if in1 || in2 {
                    for k in 0..dirs {
                        let q = ring(p, self.far_margin, k);
                        if !(scene.omega.indicator(q) < 0.0) {
                            return Err(Error::InvalidConfiguration(format!(
                                "inclusion closer than far_margin {} to the outer boundary near {p:?}",
                                self.far_margin
                            )));
                        }
                    }
                    continue;
                }
                if !(scene.omega.indicator(p) < 0.0) || self.far_collar_contains(p) {
                    continue;
                }
                let near = |s: &Shape| (0..dirs).any(|k| s.indicator(ring(p, self.far_radius, k)) <= 0.0);
                if near(&scene.d1) && near(&scene.d2) {
                    return Err(Error::InvalidConfiguration(format!(
                        "{p:?} lies outside every gap patch but within {} of both inclusions",
                        self.far_radius
                    )));
                }
            }
        }
        Ok(())
    }

    fn far_collar_contains(&self, p: Point) -> bool {
        self.patches
            .iter()
            .any(|pt| pt.dim() == 2 && pt.contains2(p, (pt.half_width + self.far_collar) / pt.half_width))
    }
}

fn check_graph_bound(i: usize, p: &GapPatch) -> Result<()> {
    let m = p.dim() - 1;
    let k = 33usize;
    let r = p.half_width;
    for flat in 0..k.pow(m as u32) {
        let mut rem = flat;
        let x: Vec<f64> = (0..m)
            .map(|_| {
                let v = -r + 2.0 * r * (rem % k) as f64 / (k - 1) as f64;
                rem /= k;
                v
            })
            .collect();
        let mut worst = p.f.value(&x).abs().max(p.g.value(&x).abs());
        for d in p.f.gradient(&x).into_iter().chain(p.g.gradient(&x)) {
            worst = worst.max(d.abs());
        }
        if !(worst <= p.graph_bound) {
            return Err(Error::InvalidConfiguration(format!(
                "patch {i}: gap graphs exceed the bound {} at {x:?}",
                p.graph_bound
            )));
        }
    }
    Ok(())
}

/// γ of the configuration: the minimum over its patches.
pub fn config_gamma(config: &Configuration) -> Result<f64> {
    config
        .patches
        .iter()
        .map(|p| p.orders.gamma())
        .reduce(f64::min)
        .ok_or_else(|| Error::InvalidConfiguration("no gap patches".into()))
}
