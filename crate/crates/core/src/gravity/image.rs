use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fall_position, VelocityDistribution};
use crate::diffraction::{blur_samples, DetectorGrid, SimulationSetup};
use crate::error::{Error, Result};

/// Pixel layout of a detector image. Coordinates are pixel centres; row 0
/// is the lowest y (y points up).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageGrid {
    pub nx: usize,
    pub ny: usize,
    pub pitch_x: f64,
    pub pitch_y: f64,
    pub x_min: f64,
    pub y_min: f64,
}

impl ImageGrid {
    pub fn new(nx: usize, ny: usize, pitch_x: f64, pitch_y: f64, x_min: f64, y_min: f64) -> Result<Self> {
        let g = ImageGrid {
            nx,
            ny,
            pitch_x,
            pitch_y,
            x_min,
            y_min,
        };
        g.validate()?;
        Ok(g)
    }

    /// Columns symmetric about x = 0 and rows from y_bottom up to at least
    /// y_top.
    pub fn spanning(half_width: f64, pitch_x: f64, y_bottom: f64, y_top: f64, pitch_y: f64) -> Result<Self> {
        let half = (half_width / pitch_x).floor() as usize;
        let ny = ((y_top - y_bottom) / pitch_y - 1e-9).ceil().max(0.0) as usize + 1;
        Self::new(2 * half + 1, ny, pitch_x, pitch_y, -(half as f64) * pitch_x, y_bottom)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::domain("image dimensions must be positive"));
        }
        if !(self.pitch_x > 0.0 && self.pitch_y > 0.0) {
            return Err(Error::domain("pixel pitch must be positive"));
        }
        Ok(())
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + ix as f64 * self.pitch_x
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y_min + iy as f64 * self.pitch_y
    }

    pub fn y_max(&self) -> f64 {
        self.y(self.ny - 1)
    }

    /// The row axis as a 1D detector window.
    pub fn columns(&self, psf_sigma: f64) -> Result<DetectorGrid> {
        DetectorGrid::new(self.x_min, self.x(self.nx.max(2) - 1), self.pitch_x, psf_sigma)
    }
}

/// Intensity image, stored row-major with row 0 at the bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferogram {
    pub grid: ImageGrid,
    pub data: Vec<f64>,
}

impl Interferogram {
    pub fn zeros(grid: ImageGrid) -> Self {
        Interferogram {
            data: vec![0.0; grid.nx * grid.ny],
            grid,
        }
    }

    pub fn from_data(grid: ImageGrid, data: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if data.len() != grid.nx * grid.ny {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} image needs {} values, got {}",
                grid.nx,
                grid.ny,
                grid.nx * grid.ny,
                data.len()
            )));
        }
        if data.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain("image intensities must be finite and non-negative"));
        }
        Ok(Interferogram { grid, data })
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.data[iy * self.grid.nx + ix]
    }

    pub fn row(&self, iy: usize) -> &[f64] {
        let nx = self.grid.nx;
        &self.data[iy * nx..(iy + 1) * nx]
    }

    pub fn row_mut(&mut self, iy: usize) -> &mut [f64] {
        let nx = self.grid.nx;
        &mut self.data[iy * nx..(iy + 1) * nx]
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn same_shape(&self, other: &Interferogram) -> bool {
        self.grid.nx == other.grid.nx && self.grid.ny == other.grid.ny
    }

    /// Gaussian blur along y with width `sigma` (m), mass-conserving.
    pub fn blur_vertical(&mut self, sigma: f64) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let sigma_rows = sigma / self.grid.pitch_y;
        let mut column = vec![0.0; ny];
        for ix in 0..nx {
            for (iy, c) in column.iter_mut().enumerate() {
                *c = self.data[iy * nx + ix];
            }
            let blurred = blur_samples(&column, sigma_rows);
            for (iy, v) in blurred.into_iter().enumerate() {
                self.data[iy * nx + ix] = v;
            }
        }
    }
}

/// Velocity classes that landed outside the image rows.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClipReport {
    pub clipped_classes: usize,
    pub clipped_weight: f64,
    pub clipped_velocities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub image: Interferogram,
    pub clipping: ClipReport,
    /// (velocity, weight, fraction of the class that fell on the image
    /// columns) for every class placed on the image.
    pub placed: Vec<(f64, f64, f64)>,
}

/// Incoherent sum over velocity classes: each class contributes its
/// blurred diffraction row at the height it falls to, split linearly
/// between the two nearest rows, then the image is blurred vertically.
///
/// Pixel values are fractions of the beam, so the image total is the
/// weighted sum of the per-class fractions that fall on the image.
pub fn synthesize_image(
    distribution: &VelocityDistribution,
    setup: &SimulationSetup,
    grid: &ImageGrid,
    psf_sigma: f64,
) -> Result<Synthesis> {
    grid.validate()?;
    let classes = distribution.classes()?;
    let (lo, hi) = distribution.support();
    if lo < 50.0 || hi > 1000.0 {
        return Err(Error::domain(format!(
            "velocity support [{lo}, {hi}] m/s outside [50, 1000] m/s"
        )));
    }
    if !(psf_sigma >= 0.0) {
        return Err(Error::domain("detector sigma must be non-negative"));
    }

    let columns = setup.with_grid(grid.columns(psf_sigma)?);

    let mut placement = Vec::with_capacity(classes.len());
    let mut clipping = ClipReport::default();
    for &(v, w) in &classes {
        let y = fall_position(v, &setup.geometry)?;
        let r = (y - grid.y_min) / grid.pitch_y;
        let top = (grid.ny - 1) as f64;
        if r < -1e-9 || r > top + 1e-9 {
            clipping.clipped_classes += 1;
            clipping.clipped_weight += w;
            clipping.clipped_velocities.push(v);
        } else {
            placement.push((v, w, r.clamp(0.0, top)));
        }
    }

    let rows: Vec<Vec<f64>> = placement
        .par_iter()
        .map(|&(v, _, _)| {
            let t = columns.class_trace(v)?;
            Ok(t.intensities.iter().map(|i| i * grid.pitch_x).collect())
        })
        .collect::<Result<_>>()?;

    let mut image = Interferogram::zeros(*grid);
    let mut placed = Vec::with_capacity(placement.len());
    for ((v, w, r), row) in placement.iter().zip(&rows) {
        let j0 = r.floor() as usize;
        let frac = r - j0 as f64;
        for (px, value) in image.row_mut(j0).iter_mut().zip(row) {
            *px += w * (1.0 - frac) * value;
        }
        if frac > 0.0 && j0 + 1 < grid.ny {
            for (px, value) in image.row_mut(j0 + 1).iter_mut().zip(row) {
                *px += w * frac * value;
            }
        }
        placed.push((*v, *w, row.iter().sum()));
    }
    image.blur_vertical(psf_sigma);

    Ok(Synthesis {
        image,
        clipping,
        placed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffraction::VelocityBand;
    use crate::presets;

    fn setup() -> SimulationSetup {
        SimulationSetup::new(
            presets::pch2(),
            presets::grating("slg").unwrap(),
            VelocityBand::monochromatic(220.0),
        )
        .unwrap()
    }

    #[test]
    fn interferogram_shape_checks() {
        let g = ImageGrid::new(3, 2, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(Interferogram::from_data(g, vec![0.0; 5]).is_err());
        assert!(Interferogram::from_data(g, vec![-1.0; 6]).is_err());
        let img = Interferogram::from_data(g, (0..6).map(f64::from).collect()).unwrap();
        assert_eq!(img.row(1), &[3.0, 4.0, 5.0]);
        assert_eq!(img.get(2, 0), 2.0);
        assert!(ImageGrid::new(0, 2, 1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn single_velocity_gives_one_blurred_row() {
        let grid = ImageGrid::spanning(40e-6, 1e-6, -300e-6, 0.0, 2e-6).unwrap();
        let syn = synthesize_image(&VelocityDistribution::single(220.0), &setup(), &grid, 3.5e-6)
            .unwrap();
        let img = &syn.image;
        let row_sums: Vec<f64> = (0..grid.ny).map(|j| img.row(j).iter().sum()).collect();
        let peak_row = (0..grid.ny)
            .max_by(|a, b| row_sums[*a].total_cmp(&row_sums[*b]))
            .unwrap();
        let y_expected = fall_position(220.0, &BeamlineGeometry::default()).unwrap();
        assert!((grid.y(peak_row) - y_expected).abs() <= grid.pitch_y);
        // nothing beyond ±6σ of the row
        for (j, s) in row_sums.iter().enumerate() {
            if (grid.y(j) - y_expected).abs() > 6.0 * 3.5e-6 {
                assert!(*s < 1e-9 * row_sums[peak_row]);
            }
        }
        assert_eq!(syn.clipping.clipped_classes, 0);
    }

    use crate::domain::BeamlineGeometry;

    #[test]
    fn clipped_classes_are_reported() {
        let grid = ImageGrid::spanning(40e-6, 1e-6, -150e-6, 0.0, 2e-6).unwrap();
        let dist = VelocityDistribution::Discrete(vec![(220.0, 1.0), (120.0, 1.0)]);
        let syn = synthesize_image(&dist, &setup(), &grid, 3.5e-6).unwrap();
        assert_eq!(syn.clipping.clipped_classes, 1);
        assert!((syn.clipping.clipped_weight - 0.5).abs() < 1e-12);
        assert_eq!(syn.clipping.clipped_velocities, vec![120.0]);
    }

    #[test]
    fn support_outside_physical_range_rejected() {
        let grid = ImageGrid::spanning(40e-6, 1e-6, -150e-6, 0.0, 2e-6).unwrap();
        let dist = VelocityDistribution::single(20.0);
        assert!(synthesize_image(&dist, &setup(), &grid, 3.5e-6).is_err());
    }
}
