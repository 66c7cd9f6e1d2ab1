//! Numerical thresholds shared by every module.

use serde::{Deserialize, Serialize};

/// All tolerance constants in one record. `Default` gives the values the
/// library is tested with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Speed below which a curve is treated as stationary.
    pub vanishing_speed: f64,
    /// Target change between successive quadrature refinements.
    pub quadrature: f64,
    /// Absolute and relative local error of the Runge-Kutta integrator.
    pub integrator: f64,
    /// Width to which switching and cusp times are bracketed.
    pub event: f64,
    /// Endpoint mismatch below which a shooting run counts as converged.
    pub converge: f64,
    /// Covector distance under which two shooting results are the same.
    pub dedup_covector: f64,
    /// Cost distance under which two shooting results are the same.
    pub dedup_cost: f64,
    /// `rho` below which the pendulum degenerates to uniform rotation.
    pub degenerate_rho: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            vanishing_speed: 1e-9,
            quadrature: 1e-9,
            integrator: 1e-10,
            event: 1e-12,
            converge: 1e-8,
            dedup_covector: 1e-6,
            dedup_cost: 1e-8,
            degenerate_rho: 1e-13,
        }
    }
}

impl Tolerances {
    /// Applies `key=value` overrides separated by commas, e.g.
    /// `integrator=1e-12,converge=1e-9`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self, String> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| format!("bad number in `{item}`"))?;
            if !(value > 0.0) {
                return Err(format!("tolerance `{key}` must be positive"));
            }
            self.set(key.trim(), value)?;
        }
        Ok(self)
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        let slot = match key {
            "vanishing_speed" | "vanishing-speed" => &mut self.vanishing_speed,
            "quadrature" => &mut self.quadrature,
            "integrator" => &mut self.integrator,
            "event" => &mut self.event,
            "converge" => &mut self.converge,
            "dedup_covector" | "dedup-covector" => &mut self.dedup_covector,
            "dedup_cost" | "dedup-cost" => &mut self.dedup_cost,
            "degenerate_rho" | "degenerate-rho" => &mut self.degenerate_rho,
            other => return Err(format!("unknown tolerance `{other}`")),
        };
        *slot = value;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let t = Tolerances::default()
            .with_overrides("integrator=1e-12, converge=5e-9")
            .unwrap();
        assert_eq!(t.integrator, 1e-12);
        assert_eq!(t.converge, 5e-9);
        assert_eq!(t.event, 1e-12);
    }

    #[test]
    fn overrides_reject_garbage() {
        assert!(Tolerances::default().with_overrides("bogus=1").is_err());
        assert!(Tolerances::default().with_overrides("event=-1").is_err());
        assert!(Tolerances::default().with_overrides("event").is_err());
    }
}
