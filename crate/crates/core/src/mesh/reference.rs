use crate::geometry::{Point2, Rect};
use crate::mesh::structured::{grid_mesh, subdivide};
use crate::mesh::{Region, TriMesh};
use crate::{Error, Result};

/// Parametrized single-phase transformer cross-section.
///
/// The core is a rectangular frame centered at the origin, cut by four air
/// gaps (one across each side) into four L-shaped pieces. The primary coil
/// surrounds the left limb (positive current inside the window, negative
/// outside), the open secondary surrounds the right limb. The whole
/// arrangement sits in an air box `air_margin` larger than the core on every
/// side; its outer edge carries the homogeneous Dirichlet condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceGeometry {
    pub core_width: f64,
    pub core_height: f64,
    pub limb_width: f64,
    pub window_width: f64,
    pub window_height: f64,
    pub gap: f64,
    pub coil_width: f64,
    pub air_margin: f64,
    pub element_size: f64,
}

impl Default for ReferenceGeometry {
    fn default() -> Self {
        ReferenceGeometry {
            core_width: 0.06,
            core_height: 0.08,
            limb_width: 0.015,
            window_width: 0.03,
            window_height: 0.05,
            gap: 0.0005,
            coil_width: 0.008,
            air_margin: 0.03,
            element_size: 0.004,
        }
    }
}

impl ReferenceGeometry {
    pub fn with_element_size(mut self, h: f64) -> Self {
        self.element_size = h;
        self
    }

    /// Thickness of the horizontal yokes.
    pub fn yoke_height(&self) -> f64 {
        0.5 * (self.core_height - self.window_height)
    }

    /// Exact area of the core region (frame minus the four gaps).
    pub fn core_area(&self) -> f64 {
        self.core_width * self.core_height
            - self.window_width * self.window_height
            - 2.0 * self.gap * self.limb_width
            - 2.0 * self.gap * self.yoke_height()
    }

    pub fn core_diagonal(&self) -> f64 {
        self.core_width.hypot(self.core_height)
    }

    fn coil_span(&self) -> (f64, f64) {
        let half = 0.4 * self.window_height;
        (-half, half)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("core_width", self.core_width),
            ("core_height", self.core_height),
            ("limb_width", self.limb_width),
            ("window_width", self.window_width),
            ("window_height", self.window_height),
            ("gap", self.gap),
            ("coil_width", self.coil_width),
            ("air_margin", self.air_margin),
            ("element_size", self.element_size),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Geometry(format!("{name} must be positive, got {v}")));
            }
        }
        if self.window_width >= self.core_width || self.window_height >= self.core_height {
            return Err(Error::Geometry(format!(
                "window {}x{} does not fit inside core {}x{}",
                self.window_width, self.window_height, self.core_width, self.core_height
            )));
        }
        let implied_limb = 0.5 * (self.core_width - self.window_width);
        if (implied_limb - self.limb_width).abs() > 1e-9 * self.core_width {
            return Err(Error::Geometry(format!(
                "limb_width {} inconsistent with core/window widths (implies {implied_limb})",
                self.limb_width
            )));
        }
        if self.gap >= self.limb_width || self.gap >= self.yoke_height() {
            return Err(Error::Geometry(format!(
                "gap {} must be smaller than limb {} and yoke {}",
                self.gap,
                self.limb_width,
                self.yoke_height()
            )));
        }
        if 2.0 * self.coil_width + self.gap >= self.window_width || self.coil_width >= self.air_margin {
            return Err(Error::Geometry(format!(
                "coil_width {} does not fit in the window or the air margin",
                self.coil_width
            )));
        }
        Ok(())
    }

    pub fn region_at(&self, p: Point2) -> Region {
        let (w2, h2) = (0.5 * self.core_width, 0.5 * self.core_height);
        let (ww2, wh2) = (0.5 * self.window_width, 0.5 * self.window_height);
        let g2 = 0.5 * self.gap;
        let cw = self.coil_width;
        let inside = |x0: f64, x1: f64, y0: f64, y1: f64| p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;

        let in_frame = inside(-w2, w2, -h2, h2) && !inside(-ww2, ww2, -wh2, wh2);
        if in_frame {
            let in_gap = (p.x.abs() > ww2 && p.y.abs() < g2) || (p.y.abs() > wh2 && p.x.abs() < g2);
            return if in_gap { Region::Air } else { Region::Core };
        }
        let (c0, c1) = self.coil_span();
        if p.y > c0 && p.y < c1 {
            if inside(-ww2, -ww2 + cw, c0, c1) {
                return Region::CoilPlusPrimary;
            }
            if inside(-w2 - cw, -w2, c0, c1) {
                return Region::CoilMinusPrimary;
            }
            if inside(ww2 - cw, ww2, c0, c1) || inside(w2, w2 + cw, c0, c1) {
                return Region::CoilSecondary;
            }
        }
        Region::Air
    }

    pub fn domain(&self) -> Rect {
        let (w2, h2) = (0.5 * self.core_width, 0.5 * self.core_height);
        let m = self.air_margin;
        Rect::new(Point2::new(-w2 - m, -h2 - m), Point2::new(w2 + m, h2 + m))
    }

    /// Structured triangulation aligned with every material interface.
    pub fn generate(&self) -> Result<TriMesh> {
        self.validate()?;
        let (w2, h2) = (0.5 * self.core_width, 0.5 * self.core_height);
        let (ww2, wh2) = (0.5 * self.window_width, 0.5 * self.window_height);
        let (g2, cw, m) = (0.5 * self.gap, self.coil_width, self.air_margin);
        let (c0, c1) = self.coil_span();

        let mut xb = vec![
            -w2 - m,
            -w2 - cw,
            -w2,
            -ww2,
            -ww2 + cw,
            -g2,
            g2,
            ww2 - cw,
            ww2,
            w2,
            w2 + cw,
            w2 + m,
        ];
        let mut yb = vec![-h2 - m, -h2, -wh2, c0, -g2, g2, c1, wh2, h2, h2 + m];
        for b in [&mut xb, &mut yb] {
            b.sort_by(f64::total_cmp);
            b.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        }
        let xs = subdivide(&xb, self.element_size);
        let ys = subdivide(&yb, self.element_size);
        grid_mesh(&xs, &ys, |p| self.region_at(p))
    }
}
