//! Global tooth-count synthesis by exhaustive enumeration.
//!
//! The two structural equalities eliminate the ring counts, leaving the
//! free triple `(Z_S, Z_P1, Z_P2)`. The fixed-ring bound caps
//! `Z_S + 2·Z_P1` at `floor(D/M)`, so the domain is finite and enumerating it
//! yields the global optimum. [`synthesize`] prunes in its loop structure and
//! may split the sun range across threads; [`oracle_synthesize`] walks the
//! whole box through [`validate`] and is kept as the reference.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::thread;

use crate::error::{Error, Result};
use crate::gear_model::{
    carrier_clearance, check_assembly, cost, gear_ratio, ratio_matches, validate, ConstraintId, GearboxDesign,
    SynthesisSpec, ToothCounts,
};
use crate::rational::{parse_rational, Rational};

/// Costs closer than this are treated as equal and ordered by tooth key.
pub const COST_TIE_EPS: f64 = 1e-9;

/// Upper limit on `floor(D/M)` accepted by the search.
pub const MAX_SEARCH_CAP: i128 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub design: GearboxDesign,
    pub cost: f64,
    pub ratio: Rational,
    pub clearance_rad: f64,
}

impl Solution {
    fn key(&self) -> (u32, u32, u32) {
        self.design.teeth().lex_key()
    }
}

/// Total order used for ranking: cost (within [`COST_TIE_EPS`]), then
/// `(Z_S, Z_P1, Z_P2)` ascending.
pub fn rank_order(a: &Solution, b: &Solution) -> Ordering {
    if (a.cost - b.cost).abs() <= COST_TIE_EPS {
        a.key().cmp(&b.key())
    } else {
        a.cost.total_cmp(&b.cost)
    }
}

fn sort_canonical(solutions: &mut [Solution]) {
    // Keys are unique, so ordering by key first makes the final order
    // independent of how the input was assembled.
    solutions.sort_by_key(Solution::key);
    solutions.sort_by(rank_order);
}

/// Number of candidates charged to each constraint.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PruneCounts([u64; 12]);

impl PruneCounts {
    pub fn get(&self, id: ConstraintId) -> u64 {
        self.0[id.index()]
    }

    fn add(&mut self, id: ConstraintId, n: u64) {
        self.0[id.index()] += n;
    }

    fn merge(&mut self, other: &PruneCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Non-zero counts in pruning order.
    pub fn iter(&self) -> impl Iterator<Item = (ConstraintId, u64)> + '_ {
        ConstraintId::PRUNING_ORDER
            .into_iter()
            .map(|id| (id, self.get(id)))
            .filter(|(_, n)| *n > 0)
    }

    /// The constraint that eliminated the most candidates.
    pub fn dominant(&self) -> Option<(ConstraintId, u64)> {
        self.iter().fold(None, |best, (id, n)| match best {
            Some((_, m)) if m >= n => best,
            _ => Some((id, n)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub spec: SynthesisSpec,
    /// Best designs, at most `spec.top_k`, in rank order.
    pub solutions: Vec<Solution>,
    /// Size of the full feasible set before truncation to `top_k`.
    pub feasible_count: u64,
    /// Size of the box `[min, floor(D/M)]³` of free triples.
    pub candidates_examined: u64,
    pub prune_counts: PruneCounts,
}

impl SolutionSet {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn best(&self) -> Option<&Solution> {
        self.solutions.first()
    }

    pub fn contains(&self, teeth: &ToothCounts) -> bool {
        self.solutions.iter().any(|s| s.design.teeth() == *teeth)
    }

    /// Candidates not eliminated by any constraint yet not feasible.
    /// Zero whenever the accounting is consistent.
    pub fn surviving_infeasible(&self) -> u64 {
        self.candidates_examined - self.feasible_count - self.prune_counts.total()
    }
}

/// Inclusive per-variable search ranges.
#[derive(Debug, Clone, Copy)]
struct SearchBox {
    cap: u32,
    sun: (u32, u32),
    planet_in: (u32, u32),
    planet_out: (u32, u32),
}

impl SearchBox {
    fn new(spec: &SynthesisSpec) -> Result<Self> {
        spec.validate()?;
        let cap = spec.ring_cap();
        if cap > MAX_SEARCH_CAP {
            return Err(Error::InvalidSpec(format!(
                "floor(rotor_bore_mm / module_mm) = {cap} exceeds the search limit of {MAX_SEARCH_CAP}"
            )));
        }
        let cap = cap.max(0) as u32;
        Ok(Self {
            cap,
            sun: (spec.min_teeth_sun, cap),
            planet_in: (spec.min_teeth_planet_in, cap),
            planet_out: (spec.min_teeth_planet_out, cap),
        })
    }

    fn len(range: (u32, u32)) -> u64 {
        if range.1 >= range.0 {
            u64::from(range.1 - range.0 + 1)
        } else {
            0
        }
    }

    fn size(&self) -> u64 {
        Self::len(self.sun) * Self::len(self.planet_in) * Self::len(self.planet_out)
    }
}

fn finish(spec: &SynthesisSpec, mut feasible: Vec<Solution>, candidates: u64, prune: PruneCounts) -> SolutionSet {
    sort_canonical(&mut feasible);
    let feasible_count = feasible.len() as u64;
    feasible.truncate(spec.top_k);
    SolutionSet {
        spec: spec.clone(),
        solutions: feasible,
        feasible_count,
        candidates_examined: candidates,
        prune_counts: prune,
    }
}

fn solution(design: GearboxDesign, spec: &SynthesisSpec, ratio: Rational, clearance_rad: f64) -> Solution {
    Solution {
        design,
        cost: cost(&design, spec),
        ratio,
        clearance_rad,
    }
}

/// Searches one contiguous slice of sun counts.
fn search_suns(spec: &SynthesisSpec, bx: &SearchBox, suns: (u32, u32)) -> (Vec<Solution>, PruneCounts) {
    let mut found = Vec::new();
    let mut prune = PruneCounts::default();
    let planet_out_span = SearchBox::len(bx.planet_out);
    let n = spec.n_planets;

    for sun in suns.0..=suns.1 {
        for planet_in in bx.planet_in.0..=bx.planet_in.1 {
            if u64::from(sun) + 2 * u64::from(planet_in) > u64::from(bx.cap) {
                // every remaining planet_in overflows the bound as well
                let remaining = SearchBox::len((planet_in, bx.planet_in.1));
                prune.add(ConstraintId::FixedRingBound, remaining * planet_out_span);
                break;
            }

            let hi = planet_in.saturating_sub(n).min(bx.planet_out.1);
            let mut visited_out = 0u64;
            if hi >= bx.planet_out.0 {
                for planet_out in bx.planet_out.0..=hi {
                    visited_out += 1;
                    let teeth = ToothCounts::from_free(sun, planet_in, planet_out);
                    let design = GearboxDesign::for_spec(teeth, spec).expect("search box yields valid designs");
                    let ratio = match gear_ratio(&design) {
                        Ok(g) if ratio_matches(&g, spec) => g,
                        _ => {
                            prune.add(ConstraintId::GearRatio, 1);
                            continue;
                        }
                    };
                    if let Some(e) = check_assembly(&design).iter().find(|e| !e.satisfied) {
                        prune.add(e.id, 1);
                        continue;
                    }
                    let alpha = carrier_clearance(&design);
                    if alpha < spec.alpha_min_rad {
                        prune.add(ConstraintId::CarrierClearance, 1);
                        continue;
                    }
                    found.push(solution(design, spec, ratio, alpha));
                }
            }
            prune.add(ConstraintId::PlanetDifferential, planet_out_span - visited_out);
        }
    }
    (found, prune)
}

/// Splits `[lo, hi]` into at most `parts` contiguous, non-empty slices.
fn partition(lo: u32, hi: u32, parts: usize) -> Vec<(u32, u32)> {
    if hi < lo {
        return Vec::new();
    }
    let len = (hi - lo + 1) as usize;
    let parts = parts.clamp(1, len);
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = lo;
    for i in 0..parts {
        let size = (base + usize::from(i < extra)) as u32;
        out.push((start, start + size - 1));
        start += size;
    }
    out
}

/// Default worker count for [`synthesize`].
pub fn default_workers() -> usize {
    thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Finds the `top_k` best feasible designs using all available cores.
pub fn synthesize(spec: &SynthesisSpec) -> Result<SolutionSet> {
    synthesize_with_workers(spec, default_workers())
}

/// As [`synthesize`] with an explicit worker count. The output does not
/// depend on `workers`.
pub fn synthesize_with_workers(spec: &SynthesisSpec, workers: usize) -> Result<SolutionSet> {
    let bx = SearchBox::new(spec)?;
    let slices = partition(bx.sun.0, bx.sun.1, workers);

    let results: Vec<(Vec<Solution>, PruneCounts)> = if slices.len() <= 1 {
        slices.iter().map(|s| search_suns(spec, &bx, *s)).collect()
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = slices
                .iter()
                .map(|s| scope.spawn(move || search_suns(spec, &bx, *s)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect()
        })
    };

    let mut feasible = Vec::new();
    let mut prune = PruneCounts::default();
    for (found, counts) in results {
        feasible.extend(found);
        prune.merge(&counts);
    }
    Ok(finish(spec, feasible, bx.size(), prune))
}

/// Reference implementation: every triple of the box goes through
/// [`validate`] with no pruning and no early exit.
pub fn oracle_synthesize(spec: &SynthesisSpec) -> Result<SolutionSet> {
    let bx = SearchBox::new(spec)?;
    let mut feasible = Vec::new();
    let mut prune = PruneCounts::default();
    for sun in bx.sun.0..=bx.sun.1 {
        for planet_in in bx.planet_in.0..=bx.planet_in.1 {
            for planet_out in bx.planet_out.0..=bx.planet_out.1 {
                let teeth = ToothCounts::from_free(sun, planet_in, planet_out);
                let design = GearboxDesign::for_spec(teeth, spec)?;
                let report = validate(&design, spec);
                match report.first_failure() {
                    Some(id) => prune.add(id, 1),
                    None => {
                        let ratio = gear_ratio(&design)?;
                        feasible.push(solution(design, spec, ratio, carrier_clearance(&design)));
                    }
                }
            }
        }
    }
    Ok(finish(spec, feasible, bx.size(), prune))
}

/// Spec field varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    TargetRatio,
    ModuleMm,
    NPlanets,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::TargetRatio => "target_ratio",
            SweepParam::ModuleMm => "module_mm",
            SweepParam::NPlanets => "n_planets",
        }
    }

    /// Copy of `base` with this parameter set from `value`.
    pub fn apply(self, base: &SynthesisSpec, value: &str) -> Result<SynthesisSpec> {
        let bad = |msg: String| Error::InvalidSpec(format!("{} = `{value}`: {msg}", self.name()));
        let spec = match self {
            SweepParam::TargetRatio => base.clone().with_target_ratio(parse_rational(value).map_err(bad)?),
            SweepParam::ModuleMm => base.clone().with_module_mm(parse_rational(value).map_err(bad)?),
            SweepParam::NPlanets => {
                let n = value.trim().parse::<u32>().map_err(|e| bad(e.to_string()))?;
                base.clone().with_n_planets(n)
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "target_ratio" => Ok(SweepParam::TargetRatio),
            "module_mm" => Ok(SweepParam::ModuleMm),
            "n_planets" => Ok(SweepParam::NPlanets),
            other => Err(Error::InvalidSpec(format!(
                "unknown sweep parameter `{other}` (expected target_ratio, module_mm or n_planets)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub outcome: Result<SolutionSet>,
}

impl SweepRow {
    pub fn best(&self) -> Option<&Solution> {
        self.outcome.as_ref().ok().and_then(SolutionSet::best)
    }

    pub fn feasible_count(&self) -> u64 {
        self.outcome.as_ref().map(|s| s.feasible_count).unwrap_or(0)
    }
}

/// Runs [`synthesize_with_workers`] once per value. A value that does not
/// yield a valid spec fails its own row only.
pub fn sweep(spec: &SynthesisSpec, param: SweepParam, values: &[String], workers: usize) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidSpec("values must be non-empty".into()));
    }
    Ok(values
        .iter()
        .map(|v| SweepRow {
            value: v.trim().to_string(),
            outcome: param.apply(spec, v).and_then(|s| synthesize_with_workers(&s, workers)),
        })
        .collect())
}
