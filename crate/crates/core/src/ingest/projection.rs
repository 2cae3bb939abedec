//! Azimuthal equidistant projection on a sphere.

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;

/// Sphere radius in meters (WGS84 semi-major axis).
pub const EARTH_RADIUS: f64 = 6_378_137.0;

/// Azimuthal equidistant projection about `(lon0, lat0)`.
///
/// Distances from the origin are exact on the sphere; over a 50 km extent
/// the spherical model stays within 0.1% of ellipsoidal distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalProjection {
    pub lon0: f64,
    pub lat0: f64,
}

impl LocalProjection {
    pub fn new(lon0: f64, lat0: f64) -> Self {
        Self { lon0, lat0 }
    }

    /// Centres the projection on the mean of the given lon/lat coordinates.
    pub fn centered_on<'a>(coords: impl IntoIterator<Item = &'a [f64; 2]>) -> Option<Self> {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for c in coords {
            sx += c[0];
            sy += c[1];
            n += 1;
        }
        (n > 0).then(|| Self::new(sx / n as f64, sy / n as f64))
    }

    pub fn forward(&self, lon: f64, lat: f64) -> Point2 {
        let (phi0, phi) = (self.lat0.to_radians(), lat.to_radians());
        let dlambda = (lon - self.lon0).to_radians();
        let (sin_phi0, cos_phi0) = phi0.sin_cos();
        let (sin_phi, cos_phi) = phi.sin_cos();
        let (sin_dl, cos_dl) = dlambda.sin_cos();

        let east = cos_phi * sin_dl;
        let north = cos_phi0 * sin_phi - sin_phi0 * cos_phi * cos_dl;
        let sin_c = east.hypot(north);
        let cos_c = sin_phi0 * sin_phi + cos_phi0 * cos_phi * cos_dl;
        if sin_c == 0.0 {
            return Point2::new(0.0, 0.0);
        }
        let c = sin_c.atan2(cos_c);
        let k = EARTH_RADIUS * c / sin_c;
        Point2::new(k * east, k * north)
    }

    /// Inverse of [`forward`](Self::forward); returns `(lon, lat)` in degrees.
    pub fn inverse(&self, p: Point2) -> (f64, f64) {
        let rho = p.x.hypot(p.y);
        if rho == 0.0 {
            return (self.lon0, self.lat0);
        }
        let phi0 = self.lat0.to_radians();
        let (sin_phi0, cos_phi0) = phi0.sin_cos();
        let c = rho / EARTH_RADIUS;
        let (sin_c, cos_c) = c.sin_cos();
        let phi = (cos_c * sin_phi0 + p.y * sin_c * cos_phi0 / rho).asin();
        let dlambda = (p.x * sin_c).atan2(rho * cos_phi0 * cos_c - p.y * sin_phi0 * sin_c);
        (self.lon0 + dlambda.to_degrees(), phi.to_degrees())
    }

    pub fn describe(&self) -> String {
        format!(
            "azimuthal equidistant, sphere R={EARTH_RADIUS} m, origin lon={:.7} lat={:.7}; x east, y north, meters",
            self.lon0, self.lat0
        )
    }
}
