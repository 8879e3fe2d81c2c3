use std::path::Path;

use anyhow::{Context, Result};
use image::{Rgb, RgbImage};

// Viridis sampled at 0, .25, .5, .75, 1.
const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

pub fn color(v: f64) -> Rgb<u8> {
    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    let x = v * (STOPS.len() - 1) as f64;
    let i = (x.floor() as usize).min(STOPS.len() - 2);
    let t = x - i as f64;
    let mut c = [0u8; 3];
    for k in 0..3 {
        c[k] = (STOPS[i][k] + t * (STOPS[i + 1][k] - STOPS[i][k])).round() as u8;
    }
    Rgb(c)
}

/// One row per step, one column per atom.
pub fn heatmap(rows: &[Vec<f64>], path: &Path) -> Result<()> {
    let n_rows = rows.len().max(1);
    let n_cols = rows.first().map_or(1, |r| r.len()).max(1);
    let cw = (1600 / n_cols).clamp(1, 16) as u32;
    let ch = (400 / n_rows).clamp(4, 24) as u32;
    let mut img = RgbImage::new(cw * n_cols as u32, ch * n_rows as u32);
    for (y, row) in rows.iter().enumerate() {
        for (x, v) in row.iter().enumerate() {
            let c = color(*v);
            for dy in 0..ch {
                for dx in 0..cw {
                    img.put_pixel(x as u32 * cw + dx, y as u32 * ch + dy, c);
                }
            }
        }
    }
    img.save(path).with_context(|| format!("--plot: cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ends_of_the_scale() {
        assert_eq!(color(0.0), Rgb([68, 1, 84]));
        assert_eq!(color(1.0), Rgb([253, 231, 37]));
        assert_eq!(color(f64::NAN), color(0.0));
        assert_eq!(color(2.0), color(1.0));
    }
}
