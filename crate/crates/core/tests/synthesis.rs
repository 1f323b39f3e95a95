use std::collections::BTreeSet;

use gearsynth::{
    oracle_synthesize, sweep, synthesize, synthesize_with_workers, validate, GearboxDesign, Rational, SolutionSet,
    SweepParam, SynthesisSpec, ToothCounts,
};

const PAPER_TEETH: ToothCounts = ToothCounts::new(44, 44, 32, 132, 120);

fn all(spec: SynthesisSpec) -> SynthesisSpec {
    spec.with_top_k(usize::MAX)
}

/// Spec on an integer grid with `floor(D/M) = cap` and module 0.6.
fn grid_spec(g: i128, n: u32, cap: i128) -> SynthesisSpec {
    let module = Rational::new(3, 5);
    SynthesisSpec::new(Rational::from_integer(g), module * Rational::from_integer(cap), module).with_n_planets(n)
}

fn teeth_set(set: &SolutionSet) -> BTreeSet<[u32; 5]> {
    set.solutions.iter().map(|s| s.design.teeth().as_array()).collect()
}

// Frozen from the brute-force oracle and cross-checked with an independent
// enumeration written outside this crate.
#[test]
fn d151_regression_fixture() {
    let set = synthesize(&all(SynthesisSpec::d151())).unwrap();
    assert_eq!(set.feasible_count, 11);
    assert_eq!(set.best().unwrap().design.teeth(), ToothCounts::new(28, 24, 18, 76, 70));
    assert!((set.best().unwrap().cost - 8973.445719954649).abs() < 1e-9);
    let rank = set.solutions.iter().position(|s| s.design.teeth() == PAPER_TEETH);
    assert_eq!(rank, Some(10));
}

#[test]
fn d151_top5_excludes_the_eleventh_ranked_design() {
    let set = synthesize(&SynthesisSpec::d151().with_top_k(5)).unwrap();
    assert_eq!(set.solutions.len(), 5);
    assert!(!set.contains(&PAPER_TEETH));
    assert_eq!(set.feasible_count, 11);
}

#[test]
fn d151_feasible_set_matches_oracle() {
    let spec = all(SynthesisSpec::d151());
    let fast = synthesize(&spec).unwrap();
    let slow = oracle_synthesize(&spec).unwrap();
    assert_eq!(fast.solutions, slow.solutions);
    assert_eq!(fast.prune_counts, slow.prune_counts);
    assert!(fast.contains(&PAPER_TEETH));
}

#[test]
fn every_returned_design_revalidates() {
    for (g, n, cap) in [(8, 2, 80), (16, 4, 132), (24, 5, 132)] {
        let spec = all(grid_spec(g, n, cap));
        let set = synthesize(&spec).unwrap();
        for s in &set.solutions {
            assert!(validate(&s.design, &spec).overall_feasible(), "{}", s.design.teeth());
        }
    }
}

#[test]
fn small_domains_are_complete() {
    // third path: validate-only filter over the raw box
    for g in [8, 12, 16, 20, 24] {
        for n in [2, 3, 4, 5] {
            let spec = all(grid_spec(g, n, 60));
            let mut expected = BTreeSet::new();
            for zs in 17..=60 {
                for p1 in 17..=60 {
                    for p2 in 17..=60 {
                        let d = GearboxDesign::for_spec(ToothCounts::from_free(zs, p1, p2), &spec).unwrap();
                        if validate(&d, &spec).overall_feasible() {
                            expected.insert(d.teeth().as_array());
                        }
                    }
                }
            }
            let got = synthesize_with_workers(&spec, 2).unwrap();
            assert_eq!(teeth_set(&got), expected, "G={g} n={n}");
            assert_eq!(got.feasible_count as usize, expected.len());
        }
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    for g in [8, 12, 16, 20, 24] {
        for n in [2, 4, 5] {
            for cap in [80, 132] {
                let spec = all(grid_spec(g, n, cap));
                let reference = synthesize_with_workers(&spec, 1).unwrap();
                for workers in [2, 3, 4, 8, 16] {
                    let other = synthesize_with_workers(&spec, workers).unwrap();
                    assert_eq!(other, reference, "G={g} n={n} cap={cap} workers={workers}");
                }
            }
        }
    }
}

#[test]
fn ranking_is_sorted_by_cost() {
    let set = synthesize(&all(grid_spec(12, 2, 132))).unwrap();
    assert!(set.feasible_count > 1);
    for w in set.solutions.windows(2) {
        assert!(w[0].cost <= w[1].cost + 1e-9);
    }
}

#[test]
fn zero_clearance_boundary_agrees_with_oracle() {
    // with six planets a sun equal to the input planet leaves no clearance at all
    for alpha in [0.0, 1e-15, 0.01] {
        let spec = all(grid_spec(12, 6, 100).with_alpha_min_rad(alpha));
        let fast = synthesize_with_workers(&spec, 4).unwrap();
        let slow = oracle_synthesize(&spec).unwrap();
        assert_eq!(fast.solutions, slow.solutions, "alpha_min = {alpha}");
    }
}

#[test]
fn ratio_tolerance_admits_near_designs() {
    let exact = all(SynthesisSpec::d151());
    let loose = exact.clone().with_ratio_tolerance(Rational::new(1, 50));
    let a = synthesize(&exact).unwrap();
    let b = synthesize(&loose).unwrap();
    assert!(b.feasible_count > a.feasible_count);
    let target = Rational::from_integer(20);
    for s in &b.solutions {
        let dev = (s.ratio - target) / target;
        assert!(dev <= Rational::new(1, 50) && dev >= Rational::new(-1, 50));
    }
    assert_eq!(b, oracle_synthesize(&loose).unwrap());
}

#[test]
fn sweep_target_ratio() {
    let values: Vec<String> = ["15", "20", "25"].map(String::from).to_vec();
    let rows = sweep(&all(SynthesisSpec::d151()), SweepParam::TargetRatio, &values, 2).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].outcome.as_ref().unwrap().contains(&PAPER_TEETH));
    assert!(!rows[0].outcome.as_ref().unwrap().contains(&PAPER_TEETH));
}

#[test]
fn sweep_three_planets_drops_paper_design() {
    let rows = sweep(&all(SynthesisSpec::d151()), SweepParam::NPlanets, &["3".to_string()], 2).unwrap();
    let set = rows[0].outcome.as_ref().unwrap();
    assert!(!set.contains(&PAPER_TEETH));
}

#[test]
fn singleton_sweep_equals_synthesize() {
    let spec = SynthesisSpec::d151();
    let rows = sweep(&spec, SweepParam::ModuleMm, &["0.6".to_string()], 3).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].outcome.as_ref().unwrap(), &synthesize(&spec).unwrap());
}

#[test]
fn vacuous_domain() {
    // floor(D/M) = 16 < 17
    let spec = grid_spec(20, 4, 16);
    let set = synthesize(&spec).unwrap();
    assert!(set.is_empty());
    assert_eq!(set.candidates_examined, 0);
    assert_eq!(oracle_synthesize(&spec).unwrap(), set);
}
