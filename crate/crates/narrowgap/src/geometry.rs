//! Two-inclusion scenes, gap patches and vanishing orders.

mod config;
mod orders;
mod patch;
mod presets;
mod shape;

pub use config::{config_gamma, ConfigDocument, Configuration, Overrides, Params, Periodic, Region, Scene};
pub use orders::{gamma_of, Order, VanishingOrders};
pub use patch::{validate_gap, GapPatch, GapValidation, GraphFn};
pub use presets::{preset, preset_by_name, PresetName};
pub use shape::{
    bisect, locate_boundary, BBox, Band, Disk, Empty, ImplicitShape, Intersection, Point, PowerEpigraph, RoundedRect,
    Shape, Union, UpperArc,
};
