//! Energy model: active power above the idle baseline times wall time.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq)]
pub struct DeviceProfile {
    pub name: String,
    /// Idle draw of the board.
    pub baseline_power_mw: f64,
    /// Extra draw while a crypto operation runs. This is what the estimate
    /// charges; the baseline is informational.
    pub active_delta_mw: f64,
}

// Default deltas are calibrated from the published (time, energy) pairs:
// Edison 1.75 J over 9.68 s, Galileo about 4.3 J over about 15 s, and both
// Raspberry Pi boards about 0.8 J over about 5 s.
const BOARDS: [(&str, f64, f64); 4] = [
    ("edison", 1335.84, 1750.0 / 9.68),
    ("galileo", 7021.44, 4300.0 / 15.0),
    ("rpi1", 2358.4, 800.0 / 5.0),
    ("rpi-zero", 1504.0, 800.0 / 5.0),
];

impl DeviceProfile {
    pub fn new(name: impl Into<String>, baseline_power_mw: f64, active_delta_mw: f64) -> Result<Self, String> {
        let p = DeviceProfile { name: name.into(), baseline_power_mw, active_delta_mw };
        if !(baseline_power_mw.is_finite() && baseline_power_mw > 0.0) {
            return Err(format!("baseline power must be positive, got {baseline_power_mw}"));
        }
        if !(active_delta_mw.is_finite() && active_delta_mw >= 0.0) {
            return Err(format!("active delta must be non-negative, got {active_delta_mw}"));
        }
        Ok(p)
    }

    pub fn builtin() -> Vec<DeviceProfile> {
        BOARDS
            .iter()
            .map(|&(n, b, d)| DeviceProfile { name: n.to_string(), baseline_power_mw: b, active_delta_mw: d })
            .collect()
    }

    pub fn edison() -> Self {
        Self::builtin().remove(0)
    }

    /// Looks up a built-in board. Accepts a few spellings (`rpi0`, `pi-zero`).
    pub fn by_name(name: &str) -> Option<Self> {
        let key: String = name.to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        let key = match key.as_str() {
            "edison" | "inteledison" => "edison",
            "galileo" | "intelgalileo" | "galileogen2" => "galileo",
            "rpi1" | "rpi" | "raspberrypi1" | "pi1" => "rpi1",
            "rpizero" | "rpi0" | "pizero" | "raspberrypizero" => "rpi-zero",
            _ => return None,
        };
        Self::builtin().into_iter().find(|p| p.name == key)
    }

    pub fn with_delta(mut self, active_delta_mw: f64) -> Result<Self, String> {
        self.active_delta_mw = active_delta_mw;
        Self::new(self.name, self.baseline_power_mw, self.active_delta_mw)
    }
}

impl Default for DeviceProfile {
    fn default() -> Self {
        Self::edison()
    }
}

impl fmt::Display for DeviceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (baseline {} mW, delta {:.3} mW)", self.name, self.baseline_power_mw, self.active_delta_mw)
    }
}

impl FromStr for DeviceProfile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::by_name(s).ok_or_else(|| format!("unknown device profile `{s}` (edison, galileo, rpi1, rpi-zero)"))
    }
}

/// Joules for `wall_time_ms` at the profile's active delta.
pub fn estimate_energy(profile: &DeviceProfile, wall_time_ms: f64) -> f64 {
    profile.active_delta_mw * wall_time_ms * 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_definition() {
        let p = DeviceProfile::new("x", 1000.0, 160.0).unwrap();
        assert!((estimate_energy(&p, 5000.0) - 0.8).abs() < 1e-12);
        let zero = DeviceProfile::new("x", 1000.0, 0.0).unwrap();
        assert_eq!(estimate_energy(&zero, 5000.0), 0.0);
    }

    #[test]
    fn edison_calibration() {
        // solve E = delta * t for the published pair instead of trusting the table
        let delta = 1.75 / 9.68 * 1000.0;
        let e = DeviceProfile::edison();
        assert!((e.active_delta_mw - delta).abs() < 1e-9);
        assert!((e.active_delta_mw - 180.8).abs() < 0.05);
        assert!((estimate_energy(&e, 9680.0) - 1.75).abs() < 1e-9);
    }

    #[test]
    fn baselines() {
        let b: Vec<f64> = DeviceProfile::builtin().iter().map(|p| p.baseline_power_mw).collect();
        assert_eq!(b, [1335.84, 7021.44, 2358.4, 1504.0]);
        assert_eq!("Pi-Zero".parse::<DeviceProfile>().unwrap().name, "rpi-zero");
        assert!("arduino".parse::<DeviceProfile>().is_err());
    }

    #[test]
    fn rejects_non_positive_power() {
        assert!(DeviceProfile::new("x", 0.0, 1.0).is_err());
        assert!(DeviceProfile::new("x", 10.0, -1.0).is_err());
        assert!(DeviceProfile::edison().with_delta(f64::NAN).is_err());
    }
}
