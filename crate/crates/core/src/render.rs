//! Deterministic rasters (binary PPM) and CSV output.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::MeasureWeights;
use crate::error::{Error, Result};
use crate::ifs::polygon::ConvexPolygon;
use crate::ifs::projection::project_points;
use crate::ifs::{chaos_game, PointCloud, IFS2};
use crate::linalg2::Vec2;
use crate::projective::Direction;

pub const TEMPLATE_BUDGET: usize = 1 << 20;
const BAND: usize = 32;
const WHITE: [u8; 3] = [255, 255, 255];

pub const PALETTE: [[u8; 3]; 8] = [
    [0, 0, 0],
    [200, 30, 30],
    [30, 70, 200],
    [20, 140, 60],
    [230, 130, 0],
    [130, 40, 160],
    [0, 140, 150],
    [120, 80, 30],
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Viewport {
    pub const UNIT: Viewport = Viewport {
        xmin: 0.0,
        xmax: 1.0,
        ymin: 0.0,
        ymax: 1.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RasterSpec {
    pub width: usize,
    pub height: usize,
    pub viewport: Viewport,
}

impl RasterSpec {
    pub fn unit(width: usize, height: usize) -> Self {
        RasterSpec {
            width,
            height,
            viewport: Viewport::UNIT,
        }
    }

    fn validate(&self) -> Result<()> {
        let v = self.viewport;
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("raster needs positive width and height"));
        }
        if !(v.xmax > v.xmin && v.ymax > v.ymin) {
            return Err(Error::invalid(format!("empty viewport {v:?}")));
        }
        Ok(())
    }

    /// Column and row as floats before flooring; row 0 is the top edge.
    fn to_pixel_f(&self, p: Vec2) -> (f64, f64) {
        let v = self.viewport;
        (
            (p.x - v.xmin) / (v.xmax - v.xmin) * self.width as f64,
            (v.ymax - p.y) / (v.ymax - v.ymin) * self.height as f64,
        )
    }

    /// Pixel containing `p`; the right and bottom viewport edges belong to the
    /// last column and row.
    pub fn pixel_of(&self, p: Vec2) -> Option<(usize, usize)> {
        let (fx, fy) = self.to_pixel_f(p);
        let (w, h) = (self.width as f64, self.height as f64);
        if !(fx >= 0.0 && fx <= w && fy >= 0.0 && fy <= h) {
            return None;
        }
        Some(((fx as usize).min(self.width - 1), (fy as usize).min(self.height - 1)))
    }
}

/// 8-bit RGB pixels, row-major from the top-left.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub spec: RasterSpec,
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn blank(spec: RasterSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Raster {
            spec,
            pixels: vec![255; spec.width * spec.height * 3],
        })
    }

    pub fn width(&self) -> usize {
        self.spec.width
    }

    pub fn height(&self) -> usize {
        self.spec.height
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.spec.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Pixels that are not white.
    pub fn lit(&self) -> Vec<(usize, usize)> {
        let w = self.spec.width;
        self.pixels
            .chunks_exact(3)
            .enumerate()
            .filter(|(_, c)| *c != WHITE)
            .map(|(i, _)| (i % w, i / w))
            .collect()
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.spec.width, self.spec.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    /// Runs `paint` on each band of rows in parallel; `paint` gets the band's
    /// first row and its pixel slice.
    fn paint_bands(&mut self, paint: impl Fn(usize, &mut [u8]) + Sync) {
        let stride = 3 * self.spec.width;
        self.pixels
            .par_chunks_mut(stride * BAND)
            .enumerate()
            .for_each(|(b, band)| paint(b * BAND, band));
    }
}

fn color(label: usize) -> [u8; 3] {
    PALETTE[label % PALETTE.len()]
}

/// One pixel per point, colored by label; later points paint over earlier ones.
pub fn render_points(cloud: &PointCloud, spec: RasterSpec) -> Result<Raster> {
    if cloud.is_empty() {
        return Err(Error::invalid("cannot render an empty cloud"));
    }
    let mut r = Raster::blank(spec)?;
    let hits: Vec<(usize, usize, [u8; 3])> = cloud
        .points
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| {
            let label = cloud.labels.as_ref().map_or(0, |l| l[i]);
            spec.pixel_of(p).map(|(x, y)| (x, y, color(label)))
        })
        .collect();
    let w = spec.width;
    r.paint_bands(|row0, band| {
        let rows = band.len() / (3 * w);
        for &(x, y, c) in &hits {
            if y >= row0 && y < row0 + rows {
                let i = 3 * ((y - row0) * w + x);
                band[i..i + 3].copy_from_slice(&c);
            }
        }
    });
    Ok(r)
}

/// Integer points of the segment between two pixel positions.
fn bresenham(x0: i64, y0: i64, x1: i64, y1: i64, mut plot: impl FnMut(i64, i64)) {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        plot(x, y);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Outlines of `T_w([0,1]²)` for every word of length `depth`, colored by first letter.
pub fn render_template(ifs: &IFS2, depth: usize, spec: RasterSpec) -> Result<Raster> {
    if depth == 0 {
        return Err(Error::invalid("template depth must be ≥ 1"));
    }
    let mut r = Raster::blank(spec)?;
    let words = ifs.words(depth, TEMPLATE_BUDGET)?;
    let sq = ConvexPolygon::unit_square();
    let limit = 4 * (spec.width + spec.height) as i64;
    let mut segments: Vec<(i64, i64, i64, i64, [u8; 3])> = Vec::new();
    for w in &words {
        let poly = sq.transformed(&ifs.compose(w)?);
        let px: Vec<(i64, i64)> = poly
            .vertices()
            .iter()
            .map(|&v| {
                let (fx, fy) = spec.to_pixel_f(v);
                (
                    (fx.floor() as i64).min(spec.width as i64 - 1),
                    (fy.floor() as i64).min(spec.height as i64 - 1),
                )
            })
            .collect();
        let c = color(w.first().unwrap_or(0));
        for k in 0..px.len() {
            let (a, b) = (px[k], px[(k + 1) % px.len()]);
            if [a.0, a.1, b.0, b.1].iter().all(|v| v.abs() <= limit) {
                segments.push((a.0, a.1, b.0, b.1, c));
            }
        }
    }
    let (w, h) = (spec.width as i64, spec.height as i64);
    r.paint_bands(|row0, band| {
        let rows = (band.len() / (3 * spec.width)) as i64;
        let row0 = row0 as i64;
        for &(x0, y0, x1, y1, c) in &segments {
            if y0.max(y1) < row0 || y0.min(y1) >= row0 + rows {
                continue;
            }
            bresenham(x0, y0, x1, y1, |x, y| {
                if x >= 0 && x < w && y >= row0 && y < row0 + rows && y < h {
                    let i = 3 * ((y - row0) * w + x) as usize;
                    band[i..i + 3].copy_from_slice(&c);
                }
            });
        }
    });
    Ok(r)
}

/// Occupancy of the `ε`-grid on the line by a projected chaos-game cloud.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Occupancy {
    pub theta: f64,
    pub epsilon: f64,
    pub points: usize,
    pub seed: u64,
    /// Index of the first listed cell; cell `k` is `[kε, (k+1)ε)`.
    pub first_cell: i64,
    pub occupied: Vec<bool>,
}

impl Occupancy {
    pub fn count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![vec!["cell".into(), "lo".into(), "occupied".into()]];
        for (k, &o) in self.occupied.iter().enumerate() {
            let cell = self.first_cell + k as i64;
            rows.push(vec![
                cell.to_string(),
                (cell as f64 * self.epsilon).to_string(),
                u8::from(o).to_string(),
            ]);
        }
        rows
    }
}

pub fn render_projection(
    ifs: &IFS2,
    weights: &MeasureWeights,
    theta: Direction,
    epsilon: f64,
    points: usize,
    seed: u64,
) -> Result<Occupancy> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("ε = {epsilon} must be positive")));
    }
    let cloud = chaos_game(ifs, weights, points, seed)?;
    let cells: Vec<i64> = project_points(&cloud, theta)
        .iter()
        .map(|v| (v / epsilon).floor() as i64)
        .collect();
    let lo = *cells.iter().min().expect("chaos game returns points");
    let hi = *cells.iter().max().expect("chaos game returns points");
    let mut occupied = vec![false; (hi - lo + 1) as usize];
    for c in cells {
        occupied[(c - lo) as usize] = true;
    }
    Ok(Occupancy {
        theta: theta.angle(),
        epsilon,
        points,
        seed,
        first_cell: lo,
        occupied,
    })
}

pub fn write_ppm(r: &Raster, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(&r.to_ppm()).map_err(io)?;
    Ok(())
}

/// CSV with `\n` line endings; the first row is the header.
pub fn write_csv(rows: &[Vec<String>], path: &Path) -> Result<()> {
    let err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(false)
        .from_path(path)
        .map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{curve_ifs, grid_ifs, CurveFamilyParams, GridFamilyParams};
    use crate::ifs::AffineMap2;
    use crate::linalg2::Matrix2;
    use std::f64::consts::PI;

    #[test]
    fn single_center_point() {
        let cloud = PointCloud::new(vec![Vec2::new(0.5, 0.5)]);
        let r = render_points(&cloud, RasterSpec::unit(64, 48)).unwrap();
        assert_eq!(r.lit(), vec![(32, 24)]);
        assert_eq!(r.get(32, 24), PALETTE[0]);
    }

    #[test]
    fn top_left_is_xmin_ymax() {
        let spec = RasterSpec::unit(10, 10);
        assert_eq!(spec.pixel_of(Vec2::new(0.0, 1.0)), Some((0, 0)));
        assert_eq!(spec.pixel_of(Vec2::new(1.0, 0.0)), Some((9, 9)));
        assert_eq!(spec.pixel_of(Vec2::new(1.1, 0.0)), None);
    }

    #[test]
    fn empty_cloud_and_bad_spec() {
        assert!(render_points(&PointCloud::new(vec![]), RasterSpec::unit(4, 4)).is_err());
        let mut s = RasterSpec::unit(4, 4);
        s.viewport.xmax = 0.0;
        assert!(Raster::blank(s).is_err());
    }

    #[test]
    fn cantor_cloud_is_one_row() {
        let pts: Vec<Vec2> = (0..500).map(|k| Vec2::new(k as f64 / 500.0, 0.25)).collect();
        let r = render_points(&PointCloud::new(pts), RasterSpec::unit(200, 200)).unwrap();
        let lit = r.lit();
        assert!(lit.len() > 100 && lit.iter().all(|&(_, y)| y == 150));
    }

    #[test]
    fn white_pixel_ppm() {
        let r = Raster::blank(RasterSpec::unit(1, 1)).unwrap();
        let bytes = r.to_ppm();
        assert_eq!(bytes, b"P6\n1 1\n255\n\xff\xff\xff");
        assert_eq!(bytes.len(), 14);
    }

    #[test]
    fn grid_template_has_cells() {
        let ifs = grid_ifs(&GridFamilyParams::new(0.1, 0.1 + PI / 8.0 + 0.2, PI / 8.0, 5)).unwrap();
        let r = render_template(&ifs, 1, RasterSpec::unit(500, 500)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let any = r.lit().iter().any(|&(x, y)| x / 100 == i && y / 100 == j);
                assert!(any, "cell ({i}, {j}) empty");
            }
        }
    }

    #[test]
    fn depth_two_nests_in_depth_one() {
        let ifs = curve_ifs(&CurveFamilyParams::default()).unwrap();
        let spec = RasterSpec::unit(400, 400);
        let r1 = render_template(&ifs, 1, spec).unwrap();
        let r2 = render_template(&ifs, 2, spec).unwrap();
        let sq = ConvexPolygon::unit_square();
        let outer: Vec<ConvexPolygon> = ifs.maps().iter().map(|t| sq.transformed(t)).collect();
        let px = 1.0 / 400.0;
        for (x, y) in r2.lit() {
            let c = Vec2::new((x as f64 + 0.5) * px, 1.0 - (y as f64 + 0.5) * px);
            assert!(outer.iter().any(|p| p.contains(c, 2.0 * px)));
        }
        assert!(!r1.lit().is_empty());
    }

    #[test]
    fn projection_occupancy() {
        let h = Matrix2::IDENTITY.scale(0.5);
        let seg = IFS2::new(vec![
            AffineMap2::new(h, Vec2::default()),
            AffineMap2::new(h, Vec2::new(0.5, 0.0)),
        ])
        .unwrap();
        let w = MeasureWeights::uniform(2);
        let occ = render_projection(&seg, &w, Direction::new(1.0), 1.0 / 64.0, 50_000, 3).unwrap();
        assert!(occ.occupied.iter().all(|&o| o));
        let flat = render_projection(&seg, &w, Direction::new(0.0), 1.0 / 64.0, 1000, 3).unwrap();
        assert_eq!(flat.count(), 1);
        let cloud = chaos_game(&seg, &w, 50_000, 3).unwrap();
        let proj = project_points(&cloud, Direction::new(1.0));
        assert_eq!(occ.count(), crate::dimension::box_count_1d(&proj, 1.0 / 64.0).unwrap());
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            vec!["a".to_string(), "b".to_string()],
            vec!["0.5".to_string(), "x,y".to_string()],
        ];
        let p = dir.path().join("t.csv");
        write_csv(&rows, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(!text.contains('\r'));
        let mut rd = csv::ReaderBuilder::new().has_headers(false).from_path(&p).unwrap();
        let back: Vec<Vec<String>> = rd
            .records()
            .map(|r| r.unwrap().iter().map(str::to_string).collect())
            .collect();
        assert_eq!(back, rows);
        let r = Raster::blank(RasterSpec::unit(3, 2)).unwrap();
        write_ppm(&r, &dir.path().join("x.ppm")).unwrap();
        assert!(write_ppm(&r, &dir.path().join("missing/x.ppm")).is_err());
    }
}
