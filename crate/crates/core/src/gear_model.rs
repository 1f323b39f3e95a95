//! Domain types for 3K compound planetary gearboxes and exact evaluation of
//! every synthesis constraint.
//!
//! A 3K train has a sun (`Z_S`), compound planets whose input gear (`Z_P1`)
//! meshes the sun and the grounded ring (`Z_F`) and whose output gear
//! (`Z_P2`) meshes the output ring (`Z_O`). Integer and rational constraints
//! are decided without floating point; only the carrier clearance angle and
//! the cost are real-valued.

use std::f64::consts::PI;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

/// Largest tooth count accepted for a single gear. Keeps every product in the
/// ratio formula far inside `i128`.
pub const MAX_TEETH: u32 = 1_000_000;

pub const DEFAULT_N_PLANETS: u32 = 4;
/// Undercut-free minimum for 20° involute teeth.
pub const DEFAULT_MIN_TEETH: u32 = 17;
pub const DEFAULT_ALPHA_MIN_RAD: f64 = 0.1;
pub const DEFAULT_TOP_K: usize = 10;

/// The five tooth counts of a 3K compound train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ToothCounts {
    pub sun: u32,
    pub planet_in: u32,
    pub planet_out: u32,
    pub ring_fixed: u32,
    pub ring_out: u32,
}

impl ToothCounts {
    pub const fn new(sun: u32, planet_in: u32, planet_out: u32, ring_fixed: u32, ring_out: u32) -> Self {
        Self {
            sun,
            planet_in,
            planet_out,
            ring_fixed,
            ring_out,
        }
    }

    /// Builds a structurally consistent set from the three free counts.
    pub fn from_free(sun: u32, planet_in: u32, planet_out: u32) -> Self {
        let (ring_fixed, ring_out) = derive_rings(sun, planet_in, planet_out);
        Self::new(sun, planet_in, planet_out, ring_fixed, ring_out)
    }

    pub fn as_array(&self) -> [u32; 5] {
        [
            self.sun,
            self.planet_in,
            self.planet_out,
            self.ring_fixed,
            self.ring_out,
        ]
    }

    /// Tie-break key for equal-cost designs.
    pub fn lex_key(&self) -> (u32, u32, u32) {
        (self.sun, self.planet_in, self.planet_out)
    }
}

impl fmt::Display for ToothCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.sun, self.planet_in, self.planet_out, self.ring_fixed, self.ring_out
        )
    }
}

/// A candidate or final gearbox: tooth counts, planet count, module and rotor bore.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GearboxDesign {
    teeth: ToothCounts,
    n_planets: u32,
    module_mm: Rational,
    rotor_bore_mm: Rational,
}

impl GearboxDesign {
    pub fn new(teeth: ToothCounts, n_planets: u32, module_mm: Rational, rotor_bore_mm: Rational) -> Result<Self> {
        for (name, z) in [
            ("z_sun", teeth.sun),
            ("z_planet_in", teeth.planet_in),
            ("z_planet_out", teeth.planet_out),
            ("z_ring_fixed", teeth.ring_fixed),
            ("z_ring_out", teeth.ring_out),
        ] {
            if z == 0 {
                return Err(Error::InvalidDesign(format!("{name} must be positive")));
            }
            if z > MAX_TEETH {
                return Err(Error::InvalidDesign(format!(
                    "{name} = {z} exceeds the supported maximum of {MAX_TEETH}"
                )));
            }
        }
        if n_planets < 2 {
            return Err(Error::InvalidDesign(format!(
                "n_planets must be at least 2, got {n_planets}"
            )));
        }
        if !module_mm.is_positive() {
            return Err(Error::InvalidDesign("module_mm must be positive".into()));
        }
        if !rotor_bore_mm.is_positive() {
            return Err(Error::InvalidDesign("rotor_bore_mm must be positive".into()));
        }
        Ok(Self {
            teeth,
            n_planets,
            module_mm,
            rotor_bore_mm,
        })
    }

    /// Design carrying the planet count and geometry of `spec`.
    pub fn for_spec(teeth: ToothCounts, spec: &SynthesisSpec) -> Result<Self> {
        Self::new(teeth, spec.n_planets, spec.module_mm, spec.rotor_bore_mm)
    }

    pub fn teeth(&self) -> ToothCounts {
        self.teeth
    }

    pub fn n_planets(&self) -> u32 {
        self.n_planets
    }

    pub fn module_mm(&self) -> Rational {
        self.module_mm
    }

    pub fn rotor_bore_mm(&self) -> Rational {
        self.rotor_bore_mm
    }
}

/// Problem definition for tooth-count synthesis.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSpec {
    pub target_ratio: Rational,
    pub rotor_bore_mm: Rational,
    pub module_mm: Rational,
    pub n_planets: u32,
    pub min_teeth_sun: u32,
    pub min_teeth_planet_in: u32,
    pub min_teeth_planet_out: u32,
    pub alpha_min_rad: f64,
    /// Relative tolerance on the ratio; zero means exact equality.
    pub ratio_tolerance: Rational,
    pub top_k: usize,
}

impl SynthesisSpec {
    /// Spec with every optional field at its default.
    pub fn new(target_ratio: Rational, rotor_bore_mm: Rational, module_mm: Rational) -> Self {
        Self {
            target_ratio,
            rotor_bore_mm,
            module_mm,
            n_planets: DEFAULT_N_PLANETS,
            min_teeth_sun: DEFAULT_MIN_TEETH,
            min_teeth_planet_in: DEFAULT_MIN_TEETH,
            min_teeth_planet_out: DEFAULT_MIN_TEETH,
            alpha_min_rad: DEFAULT_ALPHA_MIN_RAD,
            ratio_tolerance: Rational::zero(),
            top_k: DEFAULT_TOP_K,
        }
    }

    /// The D151 knee gearbox instance: ratio 20, 79.4 mm bore, module 0.6.
    pub fn d151() -> Self {
        Self::new(Rational::from_integer(20), Rational::new(397, 5), Rational::new(3, 5))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        if self.target_ratio <= Rational::from_integer(1) {
            return fail(format!(
                "target_ratio must be greater than 1, got {}",
                self.target_ratio
            ));
        }
        if !self.rotor_bore_mm.is_positive() {
            return fail("rotor_bore_mm must be positive".into());
        }
        if !self.module_mm.is_positive() {
            return fail("module_mm must be positive".into());
        }
        if self.n_planets < 2 {
            return fail(format!("n_planets must be at least 2, got {}", self.n_planets));
        }
        for (name, v) in [
            ("min_teeth_sun", self.min_teeth_sun),
            ("min_teeth_planet_in", self.min_teeth_planet_in),
            ("min_teeth_planet_out", self.min_teeth_planet_out),
        ] {
            if v == 0 {
                return fail(format!("{name} must be at least 1"));
            }
        }
        if !self.alpha_min_rad.is_finite() || self.alpha_min_rad < 0.0 {
            return fail("alpha_min_rad must be a finite non-negative angle".into());
        }
        let alpha_cap = PI / f64::from(self.n_planets);
        if self.alpha_min_rad >= alpha_cap {
            return fail(format!(
                "alpha_min_rad must be below pi/n_planets = {alpha_cap:.6} for n_planets = {}",
                self.n_planets
            ));
        }
        if self.ratio_tolerance.is_negative() {
            return fail("ratio_tolerance must be non-negative".into());
        }
        if self.top_k == 0 {
            return fail("top_k must be at least 1".into());
        }
        Ok(())
    }

    /// D / M as an exact rational.
    pub fn bore_over_module(&self) -> Rational {
        self.rotor_bore_mm / self.module_mm
    }

    /// floor(D / M): the largest admissible fixed-ring tooth count.
    pub fn ring_cap(&self) -> i128 {
        self.bore_over_module().floor().to_integer()
    }

    pub fn with_target_ratio(mut self, ratio: Rational) -> Self {
        self.target_ratio = ratio;
        self
    }

    pub fn with_n_planets(mut self, n: u32) -> Self {
        self.n_planets = n;
        self
    }

    pub fn with_module_mm(mut self, module: Rational) -> Self {
        self.module_mm = module;
        self
    }

    pub fn with_rotor_bore_mm(mut self, bore: Rational) -> Self {
        self.rotor_bore_mm = bore;
        self
    }

    pub fn with_min_teeth(mut self, sun: u32, planet_in: u32, planet_out: u32) -> Self {
        self.min_teeth_sun = sun;
        self.min_teeth_planet_in = planet_in;
        self.min_teeth_planet_out = planet_out;
        self
    }

    pub fn with_alpha_min_rad(mut self, alpha: f64) -> Self {
        self.alpha_min_rad = alpha;
        self
    }

    pub fn with_ratio_tolerance(mut self, tol: Rational) -> Self {
        self.ratio_tolerance = tol;
        self
    }

    pub fn with_top_k(mut self, k: usize) -> Self {
        self.top_k = k;
        self
    }
}

/// Identifies one entry of a [`ConstraintReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintId {
    /// Z_F = Z_S + 2·Z_P1
    StructuralFixedRing,
    /// Z_O = Z_S + Z_P1 + Z_P2
    StructuralOutputRing,
    /// n_P | (Z_F + Z_S)
    AssemblySunFixed,
    /// n_P | (2·Z_O − 2·Z_P2)
    AssemblyOutput,
    GearRatio,
    CarrierClearance,
    MinSun,
    MinPlanetIn,
    MinPlanetOut,
    /// Z_F ≤ D / M
    FixedRingBound,
    /// Z_P1 − Z_P2 ≥ n_P
    PlanetDifferential,
    /// Z_F − Z_O ≥ n_P
    RingDifferential,
}

impl ConstraintId {
    /// Report order.
    pub const ALL: [ConstraintId; 12] = [
        ConstraintId::StructuralFixedRing,
        ConstraintId::StructuralOutputRing,
        ConstraintId::AssemblySunFixed,
        ConstraintId::AssemblyOutput,
        ConstraintId::GearRatio,
        ConstraintId::CarrierClearance,
        ConstraintId::MinSun,
        ConstraintId::MinPlanetIn,
        ConstraintId::MinPlanetOut,
        ConstraintId::FixedRingBound,
        ConstraintId::PlanetDifferential,
        ConstraintId::RingDifferential,
    ];

    /// Order in which the synthesizer eliminates candidates; a rejected
    /// candidate is charged to the first constraint it fails in this order.
    pub const PRUNING_ORDER: [ConstraintId; 12] = [
        ConstraintId::StructuralFixedRing,
        ConstraintId::StructuralOutputRing,
        ConstraintId::MinSun,
        ConstraintId::MinPlanetIn,
        ConstraintId::MinPlanetOut,
        ConstraintId::FixedRingBound,
        ConstraintId::PlanetDifferential,
        ConstraintId::RingDifferential,
        ConstraintId::GearRatio,
        ConstraintId::AssemblySunFixed,
        ConstraintId::AssemblyOutput,
        ConstraintId::CarrierClearance,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ConstraintId::StructuralFixedRing => "structural_fixed_ring",
            ConstraintId::StructuralOutputRing => "structural_output_ring",
            ConstraintId::AssemblySunFixed => "assembly_sun_fixed",
            ConstraintId::AssemblyOutput => "assembly_output",
            ConstraintId::GearRatio => "gear_ratio",
            ConstraintId::CarrierClearance => "carrier_clearance",
            ConstraintId::MinSun => "min_sun",
            ConstraintId::MinPlanetIn => "min_planet_in",
            ConstraintId::MinPlanetOut => "min_planet_out",
            ConstraintId::FixedRingBound => "fixed_ring_bound",
            ConstraintId::PlanetDifferential => "planet_differential",
            ConstraintId::RingDifferential => "ring_differential",
        }
    }
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Computed value behind a constraint decision.
///
/// Equalities carry the signed difference, divisibility checks the
/// remainder, inequalities the slack (non-negative iff satisfied).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    Integer(i64),
    Rational(Rational),
    Real(f64),
    /// The ratio formula's denominator vanished.
    DegenerateDenominator,
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Integer(v) => write!(f, "{v}"),
            Residual::Rational(r) => write!(f, "{r}"),
            Residual::Real(x) => write!(f, "{x:.6}"),
            Residual::DegenerateDenominator => f.write_str("degenerate-denominator"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintEntry {
    pub id: ConstraintId,
    pub satisfied: bool,
    pub residual: Residual,
}

impl ConstraintEntry {
    fn new(id: ConstraintId, satisfied: bool, residual: Residual) -> Self {
        Self {
            id,
            satisfied,
            residual,
        }
    }
}

/// Per-constraint outcome of [`validate`], in [`ConstraintId::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintReport {
    entries: [ConstraintEntry; 12],
    overall_feasible: bool,
}

impl ConstraintReport {
    fn from_entries(entries: [ConstraintEntry; 12]) -> Self {
        let overall_feasible = entries.iter().all(|e| e.satisfied);
        Self {
            entries,
            overall_feasible,
        }
    }

    pub fn entries(&self) -> &[ConstraintEntry] {
        &self.entries
    }

    pub fn overall_feasible(&self) -> bool {
        self.overall_feasible
    }

    pub fn entry(&self, id: ConstraintId) -> &ConstraintEntry {
        &self.entries[id.index()]
    }

    pub fn failed(&self) -> impl Iterator<Item = &ConstraintEntry> {
        self.entries.iter().filter(|e| !e.satisfied)
    }

    /// First failed constraint in pruning order, if any.
    pub fn first_failure(&self) -> Option<ConstraintId> {
        ConstraintId::PRUNING_ORDER
            .into_iter()
            .find(|id| !self.entry(*id).satisfied)
    }
}

/// Reduction ratio of the train:
/// `2·Z_P1·(Z_F − Z_P1 + Z_P2) / ((Z_F − 2·Z_P1)·(Z_P1 − Z_P2))`.
pub fn gear_ratio(design: &GearboxDesign) -> Result<Rational> {
    let t = design.teeth;
    let (zf, p1, p2) = (
        i128::from(t.ring_fixed),
        i128::from(t.planet_in),
        i128::from(t.planet_out),
    );
    let ring_term = zf - 2 * p1;
    let planet_term = p1 - p2;
    if ring_term == 0 {
        return Err(Error::DegenerateRatio("z_ring_fixed = 2 * z_planet_in"));
    }
    if planet_term == 0 {
        return Err(Error::DegenerateRatio("z_planet_in = z_planet_out"));
    }
    Ok(Rational::new(2 * p1 * (zf - p1 + p2), ring_term * planet_term))
}

/// Returns the fixed and output ring counts implied by the sun and planets.
pub fn derive_rings(sun: u32, planet_in: u32, planet_out: u32) -> (u32, u32) {
    (sun + 2 * planet_in, sun + planet_in + planet_out)
}

pub fn check_structural(design: &GearboxDesign) -> [ConstraintEntry; 2] {
    let t = design.teeth;
    let (zs, p1, p2) = (i64::from(t.sun), i64::from(t.planet_in), i64::from(t.planet_out));
    let fixed = i64::from(t.ring_fixed) - zs - 2 * p1;
    let out = i64::from(t.ring_out) - zs - p1 - p2;
    [
        ConstraintEntry::new(ConstraintId::StructuralFixedRing, fixed == 0, Residual::Integer(fixed)),
        ConstraintEntry::new(ConstraintId::StructuralOutputRing, out == 0, Residual::Integer(out)),
    ]
}

/// Equal-spacing assembly conditions; residuals are the remainders.
pub fn check_assembly(design: &GearboxDesign) -> [ConstraintEntry; 2] {
    let t = design.teeth;
    let n = i64::from(design.n_planets);
    let sun_fixed = (i64::from(t.ring_fixed) + i64::from(t.sun)).mod_floor(&n);
    let output = (2 * i64::from(t.ring_out) - 2 * i64::from(t.planet_out)).mod_floor(&n);
    [
        ConstraintEntry::new(
            ConstraintId::AssemblySunFixed,
            sun_fixed == 0,
            Residual::Integer(sun_fixed),
        ),
        ConstraintEntry::new(ConstraintId::AssemblyOutput, output == 0, Residual::Integer(output)),
    ]
}

/// Angular room left for a carrier spoke between adjacent planets:
/// `π/n_P − asin(Z_P1 / (Z_S + Z_P1))`.
pub fn carrier_clearance(design: &GearboxDesign) -> f64 {
    let t = design.teeth;
    let half_angle = (f64::from(t.planet_in) / (f64::from(t.sun) + f64::from(t.planet_in))).asin();
    PI / f64::from(design.n_planets) - half_angle
}

/// Whether `ratio` matches the spec target, exactly or within the relative
/// tolerance `|G − G_target| ≤ tol·G_target`.
pub fn ratio_matches(ratio: &Rational, spec: &SynthesisSpec) -> bool {
    if spec.ratio_tolerance.is_zero() {
        *ratio == spec.target_ratio
    } else {
        (*ratio - spec.target_ratio).abs() <= spec.ratio_tolerance * spec.target_ratio
    }
}

/// Minimum-size, fixed-ring bound and differential entries.
pub fn check_sizes(design: &GearboxDesign, spec: &SynthesisSpec) -> [ConstraintEntry; 6] {
    let t = design.teeth;
    let n = i64::from(design.n_planets);
    let min_entry = |id, z: u32, min: u32| {
        let slack = i64::from(z) - i64::from(min);
        ConstraintEntry::new(id, slack >= 0, Residual::Integer(slack))
    };
    let bound_slack = spec.bore_over_module() - Rational::from_integer(i128::from(t.ring_fixed));
    let planet_slack = i64::from(t.planet_in) - i64::from(t.planet_out) - n;
    let ring_slack = i64::from(t.ring_fixed) - i64::from(t.ring_out) - n;
    [
        min_entry(ConstraintId::MinSun, t.sun, spec.min_teeth_sun),
        min_entry(ConstraintId::MinPlanetIn, t.planet_in, spec.min_teeth_planet_in),
        min_entry(ConstraintId::MinPlanetOut, t.planet_out, spec.min_teeth_planet_out),
        ConstraintEntry::new(
            ConstraintId::FixedRingBound,
            !bound_slack.is_negative(),
            Residual::Rational(bound_slack),
        ),
        ConstraintEntry::new(
            ConstraintId::PlanetDifferential,
            planet_slack >= 0,
            Residual::Integer(planet_slack),
        ),
        ConstraintEntry::new(
            ConstraintId::RingDifferential,
            ring_slack >= 0,
            Residual::Integer(ring_slack),
        ),
    ]
}

/// Synthesis objective
/// `(1/Z_S)² + (Z_F − D/M)² + Z_P1² + Z_P2² + Z_O²`.
///
/// The first two terms reward a large sun and a fixed ring filling the
/// rotor bore; the rest penalize large planets and output ring.
pub fn cost(design: &GearboxDesign, spec: &SynthesisSpec) -> f64 {
    let t = design.teeth;
    let sq = |x: f64| x * x;
    sq(1.0 / f64::from(t.sun))
        + sq(f64::from(t.ring_fixed) - to_f64(&spec.bore_over_module()))
        + sq(f64::from(t.planet_in))
        + sq(f64::from(t.planet_out))
        + sq(f64::from(t.ring_out))
}

/// Runs every constraint. A degenerate ratio is recorded as a failed entry.
pub fn validate(design: &GearboxDesign, spec: &SynthesisSpec) -> ConstraintReport {
    let [sf, so] = check_structural(design);
    let [asf, ao] = check_assembly(design);
    let ratio = match gear_ratio(design) {
        Ok(g) => ConstraintEntry::new(
            ConstraintId::GearRatio,
            ratio_matches(&g, spec),
            Residual::Rational(g - spec.target_ratio),
        ),
        Err(_) => ConstraintEntry::new(ConstraintId::GearRatio, false, Residual::DegenerateDenominator),
    };
    let alpha = carrier_clearance(design);
    let clearance = ConstraintEntry::new(
        ConstraintId::CarrierClearance,
        alpha >= spec.alpha_min_rad,
        Residual::Real(alpha - spec.alpha_min_rad),
    );
    let [ms, mpi, mpo, bound, pd, rd] = check_sizes(design, spec);
    ConstraintReport::from_entries([sf, so, asf, ao, ratio, clearance, ms, mpi, mpo, bound, pd, rd])
}

/// Pitch diameters `Z·M` in millimetres, in tooth-count order.
pub fn pitch_diameters(design: &GearboxDesign) -> [f64; 5] {
    let m = to_f64(&design.module_mm);
    design.teeth.as_array().map(|z| f64::from(z) * m)
}
