//! Detector image processing and false-colour rendering.

use std::io::Write;
use std::path::Path;

use crate::diffraction::{Normalization, Trace};
use crate::error::{Error, Result};
use crate::gravity::Interferogram;

/// The "Hot" colour map: RGB at signal 0.00, 0.01, …, 0.99.
pub const HOT_TABLE: [[f64; 3]; 100] = [
    [0.0, 0.0, 0.0],
    [0.07143, 0.0, 0.0],
    [0.14286, 0.0, 0.0],
    [0.21429, 0.0, 0.0],
    [0.28571, 0.0, 0.0],
    [0.35714, 0.0, 0.0],
    [0.42857, 0.0, 0.0],
    [0.5, 0.0, 0.0],
    [0.57143, 0.0, 0.0],
    [0.64286, 0.0, 0.0],
    [0.71429, 0.0, 0.0],
    [0.78571, 0.0, 0.0],
    [0.85714, 0.0, 0.0],
    [0.92857, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [1.0, 0.02173, 0.0],
    [1.0, 0.04346, 0.0],
    [1.0, 0.06519, 0.0],
    [1.0, 0.08691, 0.0],
    [1.0, 0.10864, 0.0],
    [1.0, 0.13037, 0.0],
    [1.0, 0.1521, 0.0],
    [1.0, 0.17383, 0.0],
    [1.0, 0.19556, 0.0],
    [1.0, 0.21728, 0.0],
    [1.0, 0.23901, 0.0],
    [1.0, 0.26074, 0.0],
    [1.0, 0.28247, 0.0],
    [1.0, 0.3042, 0.0],
    [1.0, 0.32593, 0.0],
    [1.0, 0.34765, 0.0],
    [1.0, 0.36938, 0.0],
    [1.0, 0.39111, 0.0],
    [1.0, 0.41284, 0.0],
    [1.0, 0.43457, 0.0],
    [1.0, 0.4563, 0.0],
    [1.0, 0.47802, 0.0],
    [1.0, 0.49975, 0.0],
    [1.0, 0.52148, 0.0],
    [1.0, 0.54321, 0.0],
    [1.0, 0.56494, 0.0],
    [1.0, 0.58667, 0.0],
    [1.0, 0.6084, 0.0],
    [1.0, 0.63012, 0.0],
    [1.0, 0.65185, 0.0],
    [1.0, 0.67358, 0.0],
    [1.0, 0.69531, 0.0],
    [1.0, 0.71704, 0.0],
    [1.0, 0.73877, 0.0],
    [1.0, 0.76049, 0.0],
    [1.0, 0.78222, 0.0],
    [1.0, 0.80395, 0.0],
    [1.0, 0.82568, 0.0],
    [1.0, 0.84741, 0.0],
    [1.0, 0.86914, 0.0],
    [1.0, 0.89086, 0.0],
    [1.0, 0.91259, 0.0],
    [1.0, 0.93432, 0.0],
    [1.0, 0.95605, 0.0],
    [1.0, 0.97778, 0.0],
    [1.0, 0.97833, 0.025],
    [1.0, 0.97889, 0.05],
    [1.0, 0.97944, 0.075],
    [1.0, 0.98, 0.1],
    [1.0, 0.98056, 0.125],
    [1.0, 0.98111, 0.15],
    [1.0, 0.98167, 0.175],
    [1.0, 0.98222, 0.2],
    [1.0, 0.98278, 0.225],
    [1.0, 0.98333, 0.25],
    [1.0, 0.98389, 0.275],
    [1.0, 0.98444, 0.3],
    [1.0, 0.985, 0.325],
    [1.0, 0.98556, 0.35],
    [1.0, 0.98611, 0.375],
    [1.0, 0.98667, 0.4],
    [1.0, 0.98722, 0.425],
    [1.0, 0.98778, 0.45],
    [1.0, 0.98833, 0.475],
    [1.0, 0.98889, 0.5],
    [1.0, 0.98944, 0.525],
    [1.0, 0.99, 0.55],
    [1.0, 0.99056, 0.575],
    [1.0, 0.99111, 0.6],
    [1.0, 0.99167, 0.625],
    [1.0, 0.99222, 0.65],
    [1.0, 0.99278, 0.675],
    [1.0, 0.99333, 0.7],
    [1.0, 0.99389, 0.725],
    [1.0, 0.99444, 0.75],
    [1.0, 0.995, 0.775],
    [1.0, 0.99556, 0.8],
    [1.0, 0.99611, 0.825],
    [1.0, 0.99667, 0.85],
    [1.0, 0.99722, 0.875],
    [1.0, 0.99778, 0.9],
    [1.0, 0.99833, 0.925],
    [1.0, 0.99889, 0.95],
    [1.0, 0.99944, 0.975],
    [1.0, 1.0, 1.0],];

/// RGB of `value` under the Hot map. Values are clamped to [0, 1]; table
/// rows are returned exactly and values between rows are interpolated
/// linearly. Everything at or above 0.99 is white.
pub fn hot_color(value: f64) -> [f64; 3] {
    let v = if value.is_nan() { 0.0 } else { value.clamp(0.0, 1.0) };
    let t = v * 100.0;
    let nearest = t.round();
    if (t - nearest).abs() < 1e-9 {
        return HOT_TABLE[(nearest as usize).min(99)];
    }
    if t >= 99.0 {
        return HOT_TABLE[99];
    }
    let i = t.floor() as usize;
    let f = t - i as f64;
    let (a, b) = (HOT_TABLE[i], HOT_TABLE[i + 1]);
    [
        a[0] + f * (b[0] - a[0]),
        a[1] + f * (b[1] - a[1]),
        a[2] + f * (b[2] - a[2]),
    ]
}

/// 8-bit channels, round(255·c).
pub fn hot_bytes(value: f64) -> [u8; 3] {
    hot_color(value).map(|c| (255.0 * c).round() as u8)
}

/// Signal of the table row whose quantised colour is closest to `rgb`.
pub fn invert_hot(rgb: [u8; 3]) -> f64 {
    let (best, _) = HOT_TABLE
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let d: i32 = row
                .iter()
                .zip(rgb)
                .map(|(c, b)| {
                    let q = (255.0 * c).round() as i32 - i32::from(b);
                    q * q
                })
                .sum();
            (i, d)
        })
        .min_by_key(|&(_, d)| d)
        .expect("table is not empty");
    best as f64 / 100.0
}

/// Pixel-wise `image − background`, clamped at zero.
pub fn subtract_background(image: &Interferogram, background: &Interferogram) -> Result<Interferogram> {
    if !image.same_shape(background) {
        return Err(Error::DimensionMismatch(format!(
            "image is {}×{}, background {}×{}",
            image.grid.nx, image.grid.ny, background.grid.nx, background.grid.ny
        )));
    }
    let data = image
        .data
        .iter()
        .zip(&background.data)
        .map(|(a, b)| (a - b).max(0.0))
        .collect();
    Ok(Interferogram {
        grid: image.grid,
        data,
    })
}

/// Column sums over the rows with |y − y_center| ≤ half_width.
pub fn extract_band(
    image: &Interferogram,
    y_center: f64,
    half_width: f64,
    normalize: bool,
) -> Result<Trace> {
    if !(half_width >= 0.0) {
        return Err(Error::domain("band half width must be non-negative"));
    }
    let grid = image.grid;
    let slack = 1e-9 * grid.pitch_y;
    let rows: Vec<usize> = (0..grid.ny)
        .filter(|&iy| (grid.y(iy) - y_center).abs() <= half_width + slack)
        .collect();
    if rows.is_empty() {
        return Err(Error::domain(format!(
            "band {y_center:e} ± {half_width:e} m contains no image rows"
        )));
    }
    let mut sum = vec![0.0; grid.nx];
    for iy in rows {
        for (s, v) in sum.iter_mut().zip(image.row(iy)) {
            *s += v;
        }
    }
    let positions = (0..grid.nx).map(|ix| grid.x(ix)).collect();
    let trace = Trace::new(positions, sum, Normalization::Raw)?;
    Ok(if normalize {
        trace.normalized(Normalization::Max)
    } else {
        trace
    })
}

/// Image divided by its maximum (unchanged if all zero).
pub fn normalize_max(image: &Interferogram) -> Interferogram {
    let max = image.max();
    if max > 0.0 {
        Interferogram {
            grid: image.grid,
            data: image.data.iter().map(|v| v / max).collect(),
        }
    } else {
        image.clone()
    }
}

/// Binary PPM (P6, maxval 255) of the Hot-mapped image. Pixel values are
/// used as signal directly, so normalise first if needed. The top output
/// row is the highest y; `vertical_stretch` resamples rows to a height of
/// round(stretch·ny) by nearest row.
pub fn render_image(image: &Interferogram, vertical_stretch: f64) -> Result<Vec<u8>> {
    if !(vertical_stretch > 0.0 && vertical_stretch.is_finite()) {
        return Err(Error::domain("vertical stretch must be positive"));
    }
    let (nx, ny) = (image.grid.nx, image.grid.ny);
    let height = ((vertical_stretch * ny as f64).round() as usize).max(1);
    let mut out = format!("P6\n{nx} {height}\n255\n").into_bytes();
    out.reserve(3 * nx * height);
    for r in 0..height {
        let from_top = (((r as f64 + 0.5) * ny as f64 / height as f64) as usize).min(ny - 1);
        let iy = ny - 1 - from_top;
        for v in image.row(iy) {
            out.extend_from_slice(&hot_bytes(*v));
        }
    }
    Ok(out)
}

pub fn write_ppm(path: &Path, image: &Interferogram, vertical_stretch: f64) -> Result<()> {
    let bytes = render_image(image, vertical_stretch)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

/// Decoded binary PPM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pixmap {
    pub width: usize,
    pub height: usize,
    /// RGB triples, top row first.
    pub pixels: Vec<[u8; 3]>,
}

/// Parse a P6 pixmap with maxval 255.
pub fn decode_ppm(bytes: &[u8]) -> Result<Pixmap> {
    let bad = |reason: &str| Error::Config(format!("invalid PPM: {reason}"));
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P6" {
        return Err(bad("not a binary pixmap"));
    }
    let mut number = || -> Result<usize> {
        token()?.parse().map_err(|_| bad("header field is not a number"))
    };
    let width = number()?;
    let height = number()?;
    let maxval = number()?;
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    // exactly one whitespace byte separates header and raster
    let start = pos + 1;
    let expected = 3 * width * height;
    if bytes.len() < start + expected {
        return Err(bad("raster is truncated"));
    }
    let pixels = bytes[start..start + expected]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    Ok(Pixmap {
        width,
        height,
        pixels,
    })
}
