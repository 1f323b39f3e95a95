//! Output envelope of a geared actuator from motor constants and reduction.

use crate::error::{Error, Result};

/// Headline figures of one actuator. All quantities are motor side except
/// `peak_output_speed_rad_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorSpec {
    name: String,
    torque_constant_nm_per_a: f64,
    peak_current_a: f64,
    gear_ratio: f64,
    peak_output_speed_rad_s: f64,
    bus_voltage_v: f64,
    rotor_inertia_kg_m2: f64,
    mass_kg: f64,
}

impl ActuatorSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        torque_constant_nm_per_a: f64,
        peak_current_a: f64,
        gear_ratio: f64,
        peak_output_speed_rad_s: f64,
        bus_voltage_v: f64,
        rotor_inertia_kg_m2: f64,
        mass_kg: f64,
    ) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::InvalidActuator("name must not be empty".into()));
        }
        for (field, v) in [
            ("torque_constant_nm_per_a", torque_constant_nm_per_a),
            ("peak_current_a", peak_current_a),
            ("gear_ratio", gear_ratio),
            ("peak_output_speed_rad_s", peak_output_speed_rad_s),
            ("bus_voltage_v", bus_voltage_v),
            ("rotor_inertia_kg_m2", rotor_inertia_kg_m2),
            ("mass_kg", mass_kg),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidActuator(format!(
                    "{name}: {field} must be positive, got {v}"
                )));
            }
        }
        Ok(Self {
            name,
            torque_constant_nm_per_a,
            peak_current_a,
            gear_ratio,
            peak_output_speed_rad_s,
            bus_voltage_v,
            rotor_inertia_kg_m2,
            mass_kg,
        })
    }

    /// Knee actuator: 3K compound gearbox, 20:1.
    pub fn d151() -> Self {
        Self::new("D151", 0.32, 50.0, 20.0, 10.0, 67.2, 0.000922, 2.27).expect("valid fixture")
    }

    /// Ankle actuator: single-stage planetary, 8:1.
    pub fn d110a() -> Self {
        Self::new("D110A", 0.44, 50.0, 8.0, 20.0, 67.2, 0.0002, 1.1).expect("valid fixture")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn torque_constant_nm_per_a(&self) -> f64 {
        self.torque_constant_nm_per_a
    }

    pub fn peak_current_a(&self) -> f64 {
        self.peak_current_a
    }

    pub fn gear_ratio(&self) -> f64 {
        self.gear_ratio
    }

    pub fn peak_output_speed_rad_s(&self) -> f64 {
        self.peak_output_speed_rad_s
    }

    pub fn bus_voltage_v(&self) -> f64 {
        self.bus_voltage_v
    }

    pub fn rotor_inertia_kg_m2(&self) -> f64 {
        self.rotor_inertia_kg_m2
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass_kg
    }
}

/// `k_t · I_peak · G`, with no saturation derating.
pub fn peak_output_torque(spec: &ActuatorSpec) -> f64 {
    spec.torque_constant_nm_per_a * spec.peak_current_a * spec.gear_ratio
}

pub fn motor_side_speed(spec: &ActuatorSpec) -> f64 {
    spec.peak_output_speed_rad_s * spec.gear_ratio
}

/// Rotor inertia seen at the output: `J_rotor · G²`.
pub fn reflected_inertia(spec: &ActuatorSpec) -> f64 {
    spec.rotor_inertia_kg_m2 * spec.gear_ratio * spec.gear_ratio
}
