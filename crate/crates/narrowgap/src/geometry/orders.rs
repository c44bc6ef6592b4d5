use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Vanishing order of the gap in one tangential direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Finite(f64),
    /// The gap does not open in this direction.
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<f64> {
        match self {
            Order::Finite(a) => Some(a),
            Order::Infinite => None,
        }
    }

    /// Contribution 1/(2α) to γ; zero for an infinite order.
    pub fn gamma_term(self) -> f64 {
        match self {
            Order::Finite(a) => 1.0 / (2.0 * a),
            Order::Infinite => 0.0,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(a) => write!(f, "{a}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Finite(a) => s.serialize_f64(*a),
            Order::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Sym(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(a) => Ok(Order::Finite(a)),
            Raw::Sym(s) => match s.to_ascii_lowercase().as_str() {
                "inf" | "infinity" => Ok(Order::Infinite),
                other => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got \"{other}\""))),
            },
        }
    }
}

/// Per-direction vanishing orders of one gap patch; the length is n - 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct VanishingOrders(Vec<Order>);

impl VanishingOrders {
    pub fn new(orders: Vec<Order>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidOrders("need at least one direction".into()));
        }
        for o in &orders {
            if let Order::Finite(a) = *o {
                if !a.is_finite() || a < 1.0 {
                    return Err(Error::InvalidOrders(format!("finite order {a} must be >= 1")));
                }
            }
        }
        Ok(VanishingOrders(orders))
    }

    pub fn finite_list(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&a| Order::Finite(a)).collect())
    }

    pub fn as_slice(&self) -> &[Order] {
        &self.0
    }

    /// Dimension n of the ambient space.
    pub fn dim(&self) -> usize {
        self.0.len() + 1
    }

    /// The finite orders in their original order.
    pub fn finite(&self) -> Vec<f64> {
        self.0.iter().filter_map(|o| o.finite()).collect()
    }

    /// Number of finite orders, ℓ.
    pub fn ell(&self) -> usize {
        self.0.iter().filter(|o| o.finite().is_some()).count()
    }

    pub fn gamma(&self) -> f64 {
        self.0.iter().map(|o| o.gamma_term()).sum()
    }
}

impl<'de> Deserialize<'de> for VanishingOrders {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<Order>::deserialize(d)?;
        VanishingOrders::new(raw).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for VanishingOrders {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, o) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, ")")
    }
}

/// γ = Σ 1/(2α_j) over the finite orders. Rejects finite orders below 1.
pub fn gamma_of(orders: &[Order]) -> Result<f64> {
    Ok(VanishingOrders::new(orders.to_vec())?.gamma())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        let o = |a: &[Order]| gamma_of(a).unwrap();
        assert_eq!(o(&[Order::Finite(1.0), Order::Finite(2.0)]), 0.75);
        assert_eq!(o(&[Order::Finite(1.0), Order::Infinite]), 0.5);
        assert_eq!(o(&[Order::Infinite, Order::Infinite]), 0.0);
        assert!(gamma_of(&[Order::Finite(0.5)]).is_err());
    }

    #[test]
    fn serde_symbol() {
        let v: VanishingOrders = serde_json::from_str("[1, \"inf\"]").unwrap();
        assert_eq!(v.as_slice(), &[Order::Finite(1.0), Order::Infinite]);
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1.0,\"inf\"]");
        assert!(serde_json::from_str::<VanishingOrders>("[0.5]").is_err());
    }
}
