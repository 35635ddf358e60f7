//! Ground-truth scalar fields, the sensor model, and hotspot labeling.
//!
//! Grid files are plain text: one header line
//! `#grid width=W height=H x_min=.. y_min=.. x_max=.. y_max=..` followed by
//! `W*H` rows of `x,y,value` at cell centers, in any order.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::Point;

/// Axis-aligned workspace rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extent {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Extent {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite());
        if !finite || x_max <= x_min || y_max <= y_min {
            return Err(Error::InvalidArgument(format!(
                "degenerate extent [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn center(&self) -> Point {
        [
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        ]
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }
}

/// Median of a non-empty slice; the mean of the two middle values for even
/// lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Scalar field sampled at cell centers, row-major with rows along `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    width: usize,
    height: usize,
    extent: Extent,
    cells: Vec<f64>,
    hotspot_threshold: f64,
}

impl FieldGrid {
    pub fn new(width: usize, height: usize, extent: Extent, cells: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyInput("field grid"));
        }
        if cells.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: cells.len(),
            });
        }
        if cells.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field grid cells"));
        }
        let hotspot_threshold = median(&cells);
        Ok(Self {
            width,
            height,
            extent,
            cells,
            hotspot_threshold,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn extent(&self) -> &Extent {
        &self.extent
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn hotspot_threshold(&self) -> f64 {
        self.hotspot_threshold
    }

    pub fn same_shape(&self, other: &FieldGrid) -> bool {
        self.width == other.width && self.height == other.height && self.extent == other.extent
    }

    pub fn cell_size(&self) -> (f64, f64) {
        (
            self.extent.width() / self.width as f64,
            self.extent.height() / self.height as f64,
        )
    }

    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.cells[row * self.width + col]
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point {
        let (dx, dy) = self.cell_size();
        [
            self.extent.x_min + (col as f64 + 0.5) * dx,
            self.extent.y_min + (row as f64 + 0.5) * dy,
        ]
    }

    /// All cell centers in storage order.
    pub fn cell_centers(&self) -> Vec<Point> {
        (0..self.height)
            .flat_map(|r| (0..self.width).map(move |c| (c, r)))
            .map(|(c, r)| self.cell_center(c, r))
            .collect()
    }

    /// Storage index of the cell containing `(x, y)`.
    pub fn cell_index(&self, x: f64, y: f64) -> Option<usize> {
        if !self.extent.contains(x, y) {
            return None;
        }
        let (dx, dy) = self.cell_size();
        let col = (((x - self.extent.x_min) / dx) as usize).min(self.width - 1);
        let row = (((y - self.extent.y_min) / dy) as usize).min(self.height - 1);
        Some(row * self.width + col)
    }

    /// Cells strictly above the median.
    pub fn hotspot_mask(&self) -> Vec<bool> {
        self.cells.iter().map(|&v| v > self.hotspot_threshold).collect()
    }

    pub fn is_hotspot_at(&self, x: f64, y: f64) -> bool {
        self.cell_index(x, y)
            .is_some_and(|i| self.cells[i] > self.hotspot_threshold)
    }

    /// Bilinear interpolation between cell centers, clamped at the border
    /// half-cells.
    pub fn interpolate(&self, x: f64, y: f64) -> Result<f64> {
        if !self.extent.contains(x, y) {
            return Err(Error::OutOfExtent { x, y });
        }
        let (dx, dy) = self.cell_size();
        let (c0, tx) = axis_weights((x - self.extent.x_min) / dx - 0.5, self.width);
        let (r0, ty) = axis_weights((y - self.extent.y_min) / dy - 0.5, self.height);
        let c1 = (c0 + 1).min(self.width - 1);
        let r1 = (r0 + 1).min(self.height - 1);
        let bottom = (1.0 - tx) * self.value(c0, r0) + tx * self.value(c1, r0);
        let top = (1.0 - tx) * self.value(c0, r1) + tx * self.value(c1, r1);
        Ok((1.0 - ty) * bottom + ty * top)
    }

    pub fn mean(&self) -> f64 {
        self.cells.iter().sum::<f64>() / self.cells.len() as f64
    }

    /// Population standard deviation.
    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        (self.cells.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.cells.len() as f64).sqrt()
    }

    pub fn range(&self) -> (f64, f64) {
        let lo = self.cells.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.cells.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Applies `f` to every cell; the hotspot threshold is recomputed.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<FieldGrid> {
        FieldGrid::new(
            self.width,
            self.height,
            self.extent,
            self.cells.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Same shape, new cell values.
    pub fn with_cells(&self, cells: Vec<f64>) -> Result<FieldGrid> {
        FieldGrid::new(self.width, self.height, self.extent, cells)
    }

    /// Block-mean downsampling by `factor` along both axes.
    pub fn downsample(&self, factor: usize) -> Result<FieldGrid> {
        if factor == 0 || !self.width.is_multiple_of(factor) || !self.height.is_multiple_of(factor) {
            return Err(Error::NonDivisible {
                factor,
                width: self.width,
                height: self.height,
            });
        }
        let (w, h) = (self.width / factor, self.height / factor);
        let norm = (factor * factor) as f64;
        let mut cells = vec![0.0; w * h];
        for r in 0..h {
            for c in 0..w {
                let mut sum = 0.0;
                for rr in r * factor..(r + 1) * factor {
                    for cc in c * factor..(c + 1) * factor {
                        sum += self.value(cc, rr);
                    }
                }
                cells[r * w + c] = sum / norm;
            }
        }
        FieldGrid::new(w, h, self.extent, cells)
    }

    /// Repeats each cell into a `factor x factor` block.
    pub fn upsample_repeat(&self, factor: usize) -> Result<FieldGrid> {
        if factor == 0 {
            return Err(Error::InvalidArgument("upsample factor must be positive".into()));
        }
        let (w, h) = (self.width * factor, self.height * factor);
        let cells = (0..h)
            .flat_map(|r| (0..w).map(move |c| (c, r)))
            .map(|(c, r)| self.value(c / factor, r / factor))
            .collect();
        FieldGrid::new(w, h, self.extent, cells)
    }

    pub fn standardizer(&self) -> Standardizer {
        let std = self.std_dev();
        Standardizer {
            mean: self.mean(),
            std: if std > 0.0 { std } else { 1.0 },
        }
    }

    /// Writes the grid in the text format described at module level.
    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        let e = &self.extent;
        writeln!(
            out,
            "#grid width={} height={} x_min={} y_min={} x_max={} y_max={}",
            self.width, self.height, e.x_min, e.y_min, e.x_max, e.y_max
        )?;
        for r in 0..self.height {
            for c in 0..self.width {
                let [x, y] = self.cell_center(c, r);
                writeln!(out, "{x},{y},{}", self.value(c, r))?;
            }
        }
        out.flush()
    }
}

fn axis_weights(f: f64, n: usize) -> (usize, f64) {
    if n == 1 {
        return (0, 0.0);
    }
    let f = f.clamp(0.0, (n - 1) as f64);
    let i0 = (f.floor() as usize).min(n - 2);
    (i0, f - i0 as f64)
}

/// Affine map to zero mean and unit variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardizer {
    pub mean: f64,
    pub std: f64,
}

impl Standardizer {
    pub fn apply(&self, v: f64) -> f64 {
        (v - self.mean) / self.std
    }

    pub fn invert(&self, v: f64) -> f64 {
        v * self.std + self.mean
    }
}

/// Reads a grid file.
pub fn load_grid(path: &Path) -> Result<FieldGrid> {
    let file = File::open(path)?;
    parse_grid(BufReader::new(file), path)
}

pub fn parse_grid<R: BufRead>(reader: R, path: &Path) -> Result<FieldGrid> {
    let err = |line: usize, message: String| Error::GridParse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = reader.lines().enumerate().peekable();
    // Other comment lines may precede the header.
    while let Some((_, Ok(l))) = lines.peek() {
        if l.starts_with('#') && !l.starts_with("#grid") {
            lines.next();
        } else {
            break;
        }
    }
    let (hline, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing header".into()))?;
    let header = header?;
    let hline = hline + 1;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("#grid") {
        return Err(err(hline, format!("expected '#grid' header, found {header:?}")));
    }
    let (mut width, mut height) = (None, None);
    let mut bounds = [None; 4];
    for kv in fields {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| err(hline, format!("malformed header field {kv:?}")))?;
        let bad = |e: String| err(hline, format!("header field {key}: {e}"));
        match key {
            "width" => width = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "height" => height = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "x_min" | "y_min" | "x_max" | "y_max" => {
                let slot = ["x_min", "y_min", "x_max", "y_max"]
                    .iter()
                    .position(|k| *k == key)
                    .expect("matched key");
                bounds[slot] = Some(value.parse::<f64>().map_err(|e| bad(e.to_string()))?);
            }
            _ => return Err(err(hline, format!("unknown header field {key:?}"))),
        }
    }
    let (width, height) = match (width, height) {
        (Some(w), Some(h)) if w > 0 && h > 0 => (w, h),
        _ => return Err(err(hline, "header needs positive width and height".into())),
    };
    let [Some(x_min), Some(y_min), Some(x_max), Some(y_max)] = bounds else {
        return Err(err(hline, "header needs x_min, y_min, x_max, y_max".into()));
    };
    let extent = Extent::new(x_min, y_min, x_max, y_max).map_err(|e| err(hline, e.to_string()))?;
    let dx = extent.width() / width as f64;
    let dy = extent.height() / height as f64;

    let mut cells = vec![f64::NAN; width * height];
    let mut seen = vec![false; width * height];
    let mut count = 0usize;
    let mut last = hline;
    for (i, line) in lines {
        let lineno = i + 1;
        last = lineno;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(err(lineno, format!("expected x,y,value, found {line:?}")));
        }
        let mut nums = [0.0; 3];
        for (slot, tok) in nums.iter_mut().zip(&parts) {
            *slot = tok
                .parse::<f64>()
                .map_err(|e| err(lineno, format!("{tok:?}: {e}")))?;
        }
        let [x, y, v] = nums;
        if !v.is_finite() {
            return Err(err(lineno, "non-finite value".into()));
        }
        let col = locate(x, extent.x_min, dx, width)
            .ok_or_else(|| err(lineno, format!("x={x} is not a column center")))?;
        let row = locate(y, extent.y_min, dy, height)
            .ok_or_else(|| err(lineno, format!("y={y} is not a row center")))?;
        let idx = row * width + col;
        if seen[idx] {
            return Err(err(lineno, format!("duplicate cell (row {row}, column {col})")));
        }
        seen[idx] = true;
        cells[idx] = v;
        count += 1;
    }
    if count != width * height {
        let missing = seen.iter().position(|s| !s).unwrap_or(0);
        return Err(err(
            last + 1,
            format!(
                "expected {} cells, found {count}; first missing is row {}, column {}",
                width * height,
                missing / width,
                missing % width
            ),
        ));
    }
    FieldGrid::new(width, height, extent, cells)
}

fn locate(v: f64, min: f64, step: f64, n: usize) -> Option<usize> {
    let f = (v - min) / step - 0.5;
    let i = f.round();
    if i < 0.0 || i >= n as f64 || (f - i).abs() > 1e-3 {
        return None;
    }
    Some(i as usize)
}

/// Reads the field at `location` through bilinear interpolation plus
/// zero-mean Gaussian noise. Always draws one normal variate, even when
/// `noise_std` is zero.
pub fn observe<R: Rng + ?Sized>(grid: &FieldGrid, location: &Point, noise_std: f64, rng: &mut R) -> Result<f64> {
    let clean = grid.interpolate(location[0], location[1])?;
    let normal = Normal::new(0.0, noise_std)
        .map_err(|e| Error::InvalidArgument(format!("noise std {noise_std}: {e}")))?;
    Ok(clean + normal.sample(rng))
}

/// One isotropic Gaussian bump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSource {
    pub center: Point,
    pub amplitude: f64,
    pub spread: f64,
}

impl GaussianSource {
    pub fn value_at(&self, p: &Point) -> f64 {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        self.amplitude * (-(dx * dx + dy * dy) / (2.0 * self.spread * self.spread)).exp()
    }
}

/// Sum of Gaussian sources at `p`.
pub fn field_value(sources: &[GaussianSource], p: &Point) -> f64 {
    sources.iter().map(|s| s.value_at(p)).sum()
}

/// Parameters of the synthetic hotspot environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthParams {
    /// Side lengths of the square workspace anchored at the origin.
    pub size: f64,
    /// Cells per side of the rasterized field.
    pub resolution: usize,
    pub sources: usize,
    pub amplitude: (f64, f64),
    pub spread: (f64, f64),
    /// Minimum distance from source centers to the workspace border.
    pub margin: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            size: 10.0,
            resolution: 50,
            sources: 3,
            amplitude: (0.5, 1.0),
            spread: (0.6, 1.5),
            margin: 1.0,
        }
    }
}

/// A synthetic environment: the sources and their rasterization.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticField {
    pub sources: Vec<GaussianSource>,
    pub grid: FieldGrid,
}

/// Draws `params.sources` random Gaussian sources from `seed` and rasterizes
/// their sum at cell centers.
pub fn synth_environment(seed: u64, params: &SynthParams) -> Result<SyntheticField> {
    let valid = params.size > 2.0 * params.margin
        && params.margin >= 0.0
        && params.resolution > 0
        && params.sources >= 1
        && 0.0 < params.amplitude.0
        && params.amplitude.0 <= params.amplitude.1
        && 0.0 < params.spread.0
        && params.spread.0 <= params.spread.1;
    if !valid {
        return Err(Error::InvalidArgument(format!("invalid synthetic parameters {params:?}")));
    }
    let extent = Extent::new(0.0, 0.0, params.size, params.size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = params.margin;
    let hi = params.size - params.margin;
    let sources: Vec<GaussianSource> = (0..params.sources)
        .map(|_| GaussianSource {
            center: [rng.random_range(lo..=hi), rng.random_range(lo..=hi)],
            amplitude: rng.random_range(params.amplitude.0..=params.amplitude.1),
            spread: rng.random_range(params.spread.0..=params.spread.1),
        })
        .collect();
    let n = params.resolution;
    let template = FieldGrid::new(n, n, extent, vec![0.0; n * n])?;
    let cells = template
        .cell_centers()
        .iter()
        .map(|p| field_value(&sources, p))
        .collect();
    Ok(SyntheticField {
        sources,
        grid: template.with_cells(cells)?,
    })
}
