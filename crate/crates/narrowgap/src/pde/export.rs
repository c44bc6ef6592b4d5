//! Lattice dumps and heat maps.
//!
//! Binary layout, little endian: magic `NGFD`, u32 version (1), u32 nx,
//! u32 ny, f64 h, f64 x0, f64 y0, then nx f64 x-coordinates, ny f64
//! y-coordinates, nx·ny class bytes (row-major, x fastest; 0 active,
//! 1 ∂Ω, 2 ∂D1, 3 ∂D2, 4 exterior) and nx·ny f64 values (NaN off the
//! active set).
//!
//! The CSV dump has a `# nx=.. ny=.. h=.. origin=(x0,y0)` header line followed
//! by `i,j,x,y,class,value` rows.

use std::io::Write;

use super::field::Field;
use super::grid::Grid;
use crate::Result;

pub const MAGIC: &[u8; 4] = b"NGFD";

fn lattice_values(grid: &Grid, field: &Field) -> Result<Vec<f64>> {
    field.check(grid)?;
    let mut v = vec![f64::NAN; grid.nx() * grid.ny()];
    for (n, &[i, j]) in grid.nodes.iter().enumerate() {
        v[grid.lattice_index(i as usize, j as usize)] = field.values[n];
    }
    Ok(v)
}

pub fn write_binary<W: Write>(grid: &Grid, field: &Field, mut out: W) -> Result<()> {
    let values = lattice_values(grid, field)?;
    out.write_all(MAGIC)?;
    out.write_all(&1u32.to_le_bytes())?;
    out.write_all(&(grid.nx() as u32).to_le_bytes())?;
    out.write_all(&(grid.ny() as u32).to_le_bytes())?;
    for v in [grid.h, grid.xs[0], grid.ys[0]] {
        out.write_all(&v.to_le_bytes())?;
    }
    for v in grid.xs.iter().chain(&grid.ys) {
        out.write_all(&v.to_le_bytes())?;
    }
    let classes: Vec<u8> = grid.class.iter().map(|c| *c as u8).collect();
    out.write_all(&classes)?;
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_csv<W: Write>(grid: &Grid, field: &Field, mut out: W) -> Result<()> {
    let values = lattice_values(grid, field)?;
    writeln!(out, "# nx={} ny={} h={} origin=({},{})", grid.nx(), grid.ny(), grid.h, grid.xs[0], grid.ys[0])?;
    writeln!(out, "i,j,x,y,class,value")?;
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let k = grid.lattice_index(i, j);
            writeln!(out, "{i},{j},{},{},{},{}", grid.xs[i], grid.ys[j], grid.class[k] as u8, values[k])?;
        }
    }
    Ok(())
}

/// Heat map of per-node magnitudes (for instance |∇u|) on a log colour
/// scale, one rectangle per active node sized by its dual cell.
pub fn write_svg<W: Write>(grid: &Grid, magnitude: &[f64], mut out: W) -> Result<()> {
    let (x0, x1) = (grid.xs[0], *grid.xs.last().unwrap_or(&grid.xs[0]));
    let (y0, y1) = (grid.ys[0], *grid.ys.last().unwrap_or(&grid.ys[0]));
    let scale = 800.0 / (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let (lo, hi) =
        magnitude.iter().filter(|v| **v > 0.0).fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    let (llo, lhi) = (lo.max(hi * 1e-6).ln(), hi.ln());
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}">"#,
        (x1 - x0) * scale,
        (y1 - y0) * scale
    )?;
    let half = |v: &[f64], k: usize| {
        let a = if k > 0 { 0.5 * (v[k] - v[k - 1]) } else { 0.0 };
        let b = if k + 1 < v.len() { 0.5 * (v[k + 1] - v[k]) } else { 0.0 };
        (a, b)
    };
    for (n, &[i, j]) in grid.nodes.iter().enumerate() {
        let (i, j) = (i as usize, j as usize);
        let (xa, xb) = half(&grid.xs, i);
        let (ya, yb) = half(&grid.ys, j);
        let t = if lhi > llo { ((magnitude[n].max(1e-300).ln() - llo) / (lhi - llo)).clamp(0.0, 1.0) } else { 0.0 };
        let (r, g, b) = ((255.0 * t) as u8, (255.0 * (1.0 - (2.0 * t - 1.0).abs())) as u8, (255.0 * (1.0 - t)) as u8);
        writeln!(
            out,
            r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
            (grid.xs[i] - xa - x0) * scale,
            (y1 - grid.ys[j] - yb) * scale,
            (xa + xb) * scale,
            (ya + yb) * scale
        )?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}
