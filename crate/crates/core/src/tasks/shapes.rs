//! Procedural tool footprints and target masks.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spatial::{io, GridDensity, SearchSpace};

/// Planar shape described on the normalized square `[-1, 1]²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Disc,
    Bar,
    LShape,
    Cross,
    Triangle,
    Ring,
    Square,
}

impl Shape {
    pub const ALL: [Shape; 7] =
        [Shape::Disc, Shape::Bar, Shape::LShape, Shape::Cross, Shape::Triangle, Shape::Ring, Shape::Square];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Disc => "disc",
            Shape::Bar => "bar",
            Shape::LShape => "l-shape",
            Shape::Cross => "cross",
            Shape::Triangle => "triangle",
            Shape::Ring => "ring",
            Shape::Square => "square",
        }
    }

    pub fn contains(self, u: f64, v: f64) -> bool {
        let inside = |a: f64, lo: f64, hi: f64| a >= lo && a <= hi;
        if !(inside(u, -1.0, 1.0) && inside(v, -1.0, 1.0)) {
            return false;
        }
        match self {
            Shape::Disc => u * u + v * v <= 1.0,
            Shape::Bar => v.abs() <= 0.25,
            Shape::LShape => u <= -0.4 || v <= -0.4,
            Shape::Cross => u.abs() <= 0.3 || v.abs() <= 0.3,
            Shape::Triangle => u.abs() <= (1.0 - v) / 2.0,
            Shape::Ring => {
                let r2 = u * u + v * v;
                (0.25..=1.0).contains(&r2)
            }
            Shape::Square => true,
        }
    }

    /// Grid samples with the given spacing inside the shape scaled to
    /// `[-half_extent, half_extent]²`.
    pub fn sample_points(self, half_extent: f64, spacing: f64) -> Result<Vec<[f64; 2]>> {
        if !(half_extent > 0.0 && spacing > 0.0 && spacing <= 2.0 * half_extent) {
            return Err(Error::InvalidModel("shape sampling needs 0 < spacing ≤ 2·half_extent".into()));
        }
        let n = (2.0 * half_extent / spacing).round().max(1.0) as usize;
        let offset = -(n as f64) * spacing / 2.0;
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let x = offset + (i as f64 + 0.5) * spacing;
                let y = offset + (j as f64 + 0.5) * spacing;
                if self.contains(x / half_extent, y / half_extent) {
                    out.push([x, y]);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidModel(format!("shape {} has no samples at this spacing", self.name())));
        }
        Ok(out)
    }

    /// Binary mask of the shape on an `n × n` grid, the shape filling the
    /// central `fill` fraction of each axis.
    pub fn mask(self, space: &SearchSpace<f64>, n: usize, fill: f64) -> Result<GridDensity<f64>> {
        if space.dims() != 2 || n == 0 || !(fill > 0.0 && fill <= 1.0) {
            return Err(Error::InvalidDistribution("mask needs a planar space, n ≥ 1 and fill in (0, 1]".into()));
        }
        let mut values = Vec::with_capacity(n * n);
        for row in 0..n {
            for col in 0..n {
                let u = ((col as f64 + 0.5) / n as f64 * 2.0 - 1.0) / fill;
                let v = ((row as f64 + 0.5) / n as f64 * 2.0 - 1.0) / fill;
                values.push(if self.contains(u, v) { 1.0 } else { 0.0 });
            }
        }
        GridDensity::new(space, vec![n, n], values)
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Shape::ALL
            .into_iter()
            .find(|sh| sh.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown shape `{s}`")))
    }
}

/// Tool footprint from a bundled shape name or a CSV file of body points.
pub fn load_tool(source: &str, half_extent: f64, spacing: f64) -> Result<Vec<[f64; 2]>> {
    match source.parse::<Shape>() {
        Ok(shape) => shape.sample_points(half_extent, spacing),
        Err(_) if Path::new(source).extension().is_some() => {
            let file = std::fs::File::open(source)?;
            let pts = io::read_points_csv(file)?;
            if pts.is_empty() {
                return Err(Error::InvalidModel(format!("tool file {source} has no points")));
            }
            Ok(pts)
        }
        Err(e) => Err(e),
    }
}

/// Target mask from a bundled shape name or an image / CSV grid file.
pub fn load_target(source: &str, space: &SearchSpace<f64>, n: usize, fill: f64) -> Result<GridDensity<f64>> {
    match source.parse::<Shape>() {
        Ok(shape) => shape.mask(space, n, fill),
        Err(_) if Path::new(source).extension().is_some() => io::load_grid_density(Path::new(source), space),
        Err(e) => Err(e),
    }
}
