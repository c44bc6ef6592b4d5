use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry::{Configuration, PresetName};
use crate::pde::BoundaryValue;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinPhi {
    Zero,
    One,
    /// cos θ about the configuration centre, i.e. x/|x|.
    Dipole,
    /// Linear in y with slope chosen so the capacitor strip field is 1/ε.
    CapacitorDrive,
}

/// Boundary data on ∂Ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    Builtin {
        name: BuiltinPhi,
    },
    /// a0 + Σ_k (a_k cos kθ + b_k sin kθ), θ the polar angle about the
    /// configuration centre; `harmonics[k-1] = [a_k, b_k]`.
    Trig {
        #[serde(default)]
        constant: f64,
        harmonics: Vec<[f64; 2]>,
    },
    /// Periodic piecewise-linear function of θ ∈ [-π, π) through the given
    /// nodes (angles strictly increasing).
    Tabulated {
        angles: Vec<f64>,
        values: Vec<f64>,
    },
    /// Bump from the boundary-data search, resolved at the largest ε of a
    /// sweep and reused for the other rows.
    Search {
        basis_size: usize,
    },
}

impl PhiSpec {
    pub fn builtin(name: BuiltinPhi) -> PhiSpec {
        PhiSpec::Builtin { name }
    }

    /// Short identifier used in table metadata.
    pub fn id(&self) -> String {
        match self {
            PhiSpec::Builtin { name } => {
                serde_json::to_value(name).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
            }
            PhiSpec::Trig { harmonics, .. } => format!("trig{}", harmonics.len()),
            PhiSpec::Tabulated { angles, .. } => format!("tabulated{}", angles.len()),
            PhiSpec::Search { basis_size } => format!("search{basis_size}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PhiSpec::Tabulated { angles, values } => {
                if angles.len() != values.len() || angles.len() < 2 {
                    return Err(Error::InvalidInput("tabulated phi needs >= 2 matching angles and values".into()));
                }
                let inside = angles.iter().all(|a| (-PI..PI).contains(a));
                let sorted = angles.windows(2).all(|w| w[1] > w[0]);
                if !inside || !sorted || values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput(
                        "tabulated phi angles must increase strictly within [-pi, pi)".into(),
                    ));
                }
                Ok(())
            }
            PhiSpec::Trig { constant, harmonics } => {
                if !constant.is_finite() || harmonics.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput("trig coefficients must be finite".into()));
                }
                Ok(())
            }
            PhiSpec::Search { basis_size } if *basis_size < 3 => {
                Err(Error::InvalidInput(format!("search basis size {basis_size} < 3")))
            }
            _ => Ok(()),
        }
    }

    /// The trace on ∂Ω for one configuration. `Search` has to be resolved
    /// first.
    pub fn boundary_value(&self, config: &Configuration) -> Result<BoundaryValue> {
        self.validate()?;
        let c = config.center;
        let angle = move |p: [f64; 2]| (p[1] - c[1]).atan2(p[0] - c[0]);
        Ok(match self.clone() {
            PhiSpec::Builtin { name } => match name {
                BuiltinPhi::Zero => BoundaryValue::Const(0.0),
                BuiltinPhi::One => BoundaryValue::Const(1.0),
                BuiltinPhi::Dipole => BoundaryValue::Trace(Arc::new(move |p| angle(p).cos())),
                BuiltinPhi::CapacitorDrive => {
                    if config.preset != PresetName::CapacitorStrip2d {
                        return Err(Error::InvalidInput("capacitor_drive needs the capacitor preset".into()));
                    }
                    let m = |k: &str| config.meta.get(k).copied().unwrap_or(f64::NAN);
                    let slope = (m("layer_below") + config.epsilon + m("layer_above")) / (config.epsilon * m("height"));
                    BoundaryValue::Trace(Arc::new(move |p| slope * p[1]))
                }
            },
            PhiSpec::Trig { constant, harmonics } => BoundaryValue::Trace(Arc::new(move |p| {
                let t = angle(p);
                constant
                    + harmonics
                        .iter()
                        .enumerate()
                        .map(|(k, [a, b])| {
                            let (s, co) = ((k + 1) as f64 * t).sin_cos();
                            a * co + b * s
                        })
                        .sum::<f64>()
            })),
            PhiSpec::Tabulated { angles, values } => {
                BoundaryValue::Trace(Arc::new(move |p| periodic_interp(&angles, &values, angle(p))))
            }
            PhiSpec::Search { .. } => return Err(Error::InvalidInput("search phi must be resolved before use".into())),
        })
    }
}

/// Linear interpolation on a periodic table over [-π, π).
pub fn periodic_interp(angles: &[f64], values: &[f64], t: f64) -> f64 {
    let n = angles.len();
    let t = (t + PI).rem_euclid(2.0 * PI) - PI;
    let k = angles.partition_point(|a| *a <= t);
    let (i0, i1, a0, a1) = if k == 0 {
        (n - 1, 0, angles[n - 1] - 2.0 * PI, angles[0])
    } else if k == n {
        (n - 1, 0, angles[n - 1], angles[0] + 2.0 * PI)
    } else {
        (k - 1, k, angles[k - 1], angles[k])
    };
    let s = (t - a0) / (a1 - a0);
    values[i0] + s * (values[i1] - values[i0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interp_wraps() {
        let a = [-PI / 2.0, 0.0, PI / 2.0];
        let v = [0.0, 1.0, 0.0];
        assert!((periodic_interp(&a, &v, 0.25 * PI) - 0.5).abs() < 1e-12);
        assert_eq!(periodic_interp(&a, &v, PI), 0.0);
        assert_eq!(periodic_interp(&a, &v, -PI + 1e-3), 0.0);
    }

    #[test]
    fn serde_shape() {
        let s: PhiSpec = serde_json::from_str(r#"{"kind":"builtin","name":"dipole"}"#).unwrap();
        assert_eq!(s, PhiSpec::builtin(BuiltinPhi::Dipole));
        assert!(serde_json::from_str::<PhiSpec>(r#"{"kind":"search","basis_size":4,"x":1}"#).is_err());
        assert!(PhiSpec::Search { basis_size: 2 }.validate().is_err());
    }
}
