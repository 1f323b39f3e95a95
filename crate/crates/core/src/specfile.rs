//! Plain `key = value` spec files.
//!
//! ```text
//! # D151 knee gearbox
//! target_ratio  = 20        # "p" or "p/q"
//! rotor_bore_mm = 79.4
//! module_mm     = 0.6
//! n_planets     = 4         # optional, default 4
//! ```
//!
//! Optional keys and defaults: `n_planets` (4), `min_teeth_sun`,
//! `min_teeth_planet_in`, `min_teeth_planet_out` (17 each), `alpha_min_rad`
//! (0.1), `ratio_tolerance` (0), `top_k` (10). Unknown and repeated keys
//! are errors. `#` starts a comment.
//!
//! Actuator fixtures use the same syntax with one `[name]` section per
//! actuator, each carrying all seven actuator fields.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use num_traits::Signed;

use crate::actuator::ActuatorSpec;
use crate::error::{Error, Result};
use crate::gear_model::SynthesisSpec;
use crate::rational::{parse_rational, Rational};

pub const SPEC_KEYS: [&str; 10] = [
    "target_ratio",
    "rotor_bore_mm",
    "module_mm",
    "n_planets",
    "min_teeth_sun",
    "min_teeth_planet_in",
    "min_teeth_planet_out",
    "alpha_min_rad",
    "ratio_tolerance",
    "top_k",
];

pub const ACTUATOR_KEYS: [&str; 7] = [
    "torque_constant_nm_per_a",
    "peak_current_a",
    "gear_ratio",
    "peak_output_speed_rad_s",
    "bus_voltage_v",
    "rotor_inertia_kg_m2",
    "mass_kg",
];

/// Bundled fixture with the D151 and D110A actuators.
pub const BUNDLED_ACTUATORS: &str = include_str!("../data/actuators.conf");

/// Spec file for the D151 knee gearbox.
pub const D151_SPEC: &str = include_str!("../data/d151.spec");

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Debug, Clone)]
struct Section {
    name: Option<String>,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

fn tokenize(text: &str, allowed: &[&str]) -> Result<Vec<Section>> {
    let mut sections = vec![Section {
        name: None,
        line: 0,
        entries: Vec::new(),
    }];
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .ok_or_else(|| Error::parse(line, format!("malformed section header `{content}`")))?;
            if sections.iter().any(|s| s.name.as_deref() == Some(name)) {
                return Err(Error::parse(line, format!("duplicate section `{name}`")));
            }
            sections.push(Section {
                name: Some(name.to_string()),
                line,
                entries: Vec::new(),
            });
            seen.clear();
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected `key = value`, found `{content}`")))?;
        let key = key.trim();
        let value = value.trim();
        if !allowed.contains(&key) {
            return Err(Error::parse(line, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(Error::parse(line, format!("missing value for `{key}`")));
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::parse(line, format!("duplicate key `{key}`")));
        }
        sections.last_mut().expect("at least one section").entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    Ok(sections)
}

fn rational(e: &Entry) -> Result<Rational> {
    parse_rational(&e.value).map_err(|m| Error::parse(e.line, format!("{}: {m}", e.key)))
}

fn positive_rational(e: &Entry) -> Result<Rational> {
    let v = rational(e)?;
    if !v.is_positive() {
        return Err(Error::parse(e.line, format!("{} must be positive", e.key)));
    }
    Ok(v)
}

fn integer<T: std::str::FromStr>(e: &Entry) -> Result<T> {
    e.value
        .parse()
        .map_err(|_| Error::parse(e.line, format!("{}: `{}` is not a valid integer", e.key, e.value)))
}

fn real(e: &Entry) -> Result<f64> {
    e.value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(e.line, format!("{}: `{}` is not a number", e.key, e.value)))
}

/// Parses a synthesis spec document.
pub fn parse_spec(text: &str) -> Result<SynthesisSpec> {
    let sections = tokenize(text, &SPEC_KEYS)?;
    if let Some(s) = sections.get(1) {
        return Err(Error::parse(s.line, "sections are not allowed in a spec file"));
    }
    let root = &sections[0];
    let required = |key: &str| {
        root.get(key)
            .ok_or_else(|| Error::parse(0, format!("missing required key `{key}`")))
    };

    let target_ratio = rational(required("target_ratio")?)?;
    let rotor_bore_mm = positive_rational(required("rotor_bore_mm")?)?;
    let module_mm = positive_rational(required("module_mm")?)?;
    let mut spec = SynthesisSpec::new(target_ratio, rotor_bore_mm, module_mm);

    for e in &root.entries {
        match e.key.as_str() {
            "n_planets" => spec.n_planets = integer(e)?,
            "min_teeth_sun" => spec.min_teeth_sun = integer(e)?,
            "min_teeth_planet_in" => spec.min_teeth_planet_in = integer(e)?,
            "min_teeth_planet_out" => spec.min_teeth_planet_out = integer(e)?,
            "alpha_min_rad" => spec.alpha_min_rad = real(e)?,
            "ratio_tolerance" => spec.ratio_tolerance = rational(e)?,
            "top_k" => spec.top_k = integer(e)?,
            _ => {}
        }
    }
    // Attribute single-field failures to their line where possible.
    spec.validate().map_err(|err| match err {
        Error::InvalidSpec(msg) => {
            let line = root
                .entries
                .iter()
                .find(|e| msg.starts_with(e.key.as_str()))
                .map_or(0, |e| e.line);
            Error::parse(line, msg)
        }
        other => other,
    })?;
    Ok(spec)
}

/// Parses an actuator fixture into one spec per section, in file order.
pub fn parse_actuators(text: &str) -> Result<Vec<ActuatorSpec>> {
    let sections = tokenize(text, &ACTUATOR_KEYS)?;
    if let Some(e) = sections[0].entries.first() {
        return Err(Error::parse(
            e.line,
            "actuator fields must follow a `[name]` section header",
        ));
    }
    let mut out = Vec::new();
    for s in &sections[1..] {
        let name = s.name.clone().unwrap_or_default();
        let mut values = [0.0; 7];
        for (slot, key) in values.iter_mut().zip(ACTUATOR_KEYS) {
            let e = s
                .get(key)
                .ok_or_else(|| Error::parse(s.line, format!("[{name}]: missing required key `{key}`")))?;
            *slot = real(e)?;
        }
        let [kt, i, g, w, v, j, m] = values;
        let spec =
            ActuatorSpec::new(name, kt, i, g, w, v, j, m).map_err(|err| Error::parse(s.line, err.to_string()))?;
        out.push(spec);
    }
    if out.is_empty() {
        return Err(Error::parse(0, "no actuator sections found"));
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_spec_file(path: impl AsRef<Path>) -> Result<SynthesisSpec> {
    parse_spec(&read(path.as_ref())?)
}

pub fn read_actuator_file(path: impl AsRef<Path>) -> Result<Vec<ActuatorSpec>> {
    parse_actuators(&read(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_spec_is_the_d151_instance() {
        let spec = parse_spec(D151_SPEC).unwrap();
        let reference = SynthesisSpec::d151();
        assert_eq!(spec.target_ratio, reference.target_ratio);
        assert_eq!(spec.rotor_bore_mm, reference.rotor_bore_mm);
        assert_eq!(spec.module_mm, reference.module_mm);
        assert_eq!(spec.n_planets, 4);
        assert_eq!(spec.alpha_min_rad, 0.1);
    }

    #[test]
    fn defaults_apply() {
        let spec = parse_spec("target_ratio = 41/2\nrotor_bore_mm = 60\nmodule_mm = 0.5\n").unwrap();
        assert_eq!(spec.target_ratio, Rational::new(41, 2));
        assert_eq!(spec.n_planets, 4);
        assert_eq!(spec.min_teeth_sun, 17);
        assert_eq!(spec.top_k, 10);
        assert_eq!(spec.ratio_tolerance, Rational::from_integer(0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_spec("target_ratio = 20\nrotor_bore_mm = 79.4\nmodule_mm = 0\n").unwrap_err();
        assert_eq!(err, Error::parse(3, "module_mm must be positive"));

        let err = parse_spec("target_ratio = 20\n\nmodul_mm = 0.6\n").unwrap_err();
        assert_eq!(err, Error::parse(3, "unknown key `modul_mm`"));

        let err = parse_spec("target_ratio = 20\nmodule_mm = 0.6\n").unwrap_err();
        assert_eq!(err, Error::parse(0, "missing required key `rotor_bore_mm`"));

        let err = parse_spec("target_ratio = 20\nrotor_bore_mm = 79.4\nmodule_mm = 0.6\nn_planets = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");

        let err = parse_spec("target_ratio = 20\ntarget_ratio = 21\n").unwrap_err();
        assert_eq!(err, Error::parse(2, "duplicate key `target_ratio`"));

        let err = parse_spec("target_ratio 20\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn bundled_actuators() {
        let acts = parse_actuators(BUNDLED_ACTUATORS).unwrap();
        assert_eq!(acts.len(), 2);
        assert_eq!(acts[0], ActuatorSpec::d151());
        assert_eq!(acts[1], ActuatorSpec::d110a());
    }

    #[test]
    fn actuator_fixture_errors() {
        assert!(parse_actuators("").is_err());
        assert!(parse_actuators("gear_ratio = 2\n").is_err());
        let err = parse_actuators("[A]\ngear_ratio = 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
