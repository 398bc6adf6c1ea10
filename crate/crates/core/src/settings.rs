use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical settings shared by every computation on a [`Space`](crate::Space).
///
/// `eps` is the absolute tolerance for "numerically zero"; `band` is the width
/// of the zone in which sign decisions are reported as indeterminate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub eps: f64,
    pub band: f64,
    /// Direction count on the full circle for planar mesh scans.
    pub resolution: usize,
    /// Direction count for mesh scans in dimension three and above.
    pub directions_nd: usize,
    /// Number of mesh maxima refined when computing operator norms.
    pub multistart: usize,
    /// Cluster radius for norm-attainment witnesses, in mesh steps.
    pub cluster_steps: f64,
    /// Relative value tolerance defining membership in the attainment set.
    pub value_rtol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            eps: 1e-9,
            band: 1e-6,
            resolution: 4096,
            directions_nd: 20_000,
            multistart: 16,
            cluster_steps: 10.0,
            value_rtol: 1e-7,
        }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.band > 0.0 && self.eps < self.band) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must satisfy 0 < tol < band (tol = {}, band = {})",
                self.eps, self.band
            )));
        }
        if self.resolution < 8 {
            return Err(Error::InvalidParameter(format!(
                "resolution must be at least 8 (got {})",
                self.resolution
            )));
        }
        if self.directions_nd < 8 || self.multistart == 0 {
            return Err(Error::InvalidParameter(
                "directions_nd >= 8 and multistart >= 1 required".into(),
            ));
        }
        if !(self.value_rtol >= 0.0 && self.cluster_steps > 0.0) {
            return Err(Error::InvalidParameter(
                "value_rtol >= 0 and cluster_steps > 0 required".into(),
            ));
        }
        Ok(())
    }
}
