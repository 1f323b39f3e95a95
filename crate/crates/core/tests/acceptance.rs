//! Exit criteria. Run with `cargo test --test acceptance -- --nocapture` to
//! see one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use gearsynth::{
    carrier_clearance, gear_ratio, oracle_synthesize, peak_output_torque, synthesize, synthesize_with_workers,
    validate, ActuatorSpec, GearboxDesign, Rational, SynthesisSpec, ToothCounts,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const PAPER_TEETH: ToothCounts = ToothCounts::new(44, 44, 32, 132, 120);
const D151_SPEC: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/d151.spec");

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn paper_spec() -> SynthesisSpec {
    SynthesisSpec::d151()
        .with_min_teeth(17, 17, 17)
        .with_alpha_min_rad(0.1)
        .with_n_planets(4)
}

fn paper_solution_reproduction() -> Outcome {
    let spec = paper_spec();
    let design = GearboxDesign::for_spec(PAPER_TEETH, &spec).unwrap();

    let start = Instant::now();
    let report = validate(&design, &spec);
    let elapsed = start.elapsed();

    let entries = report.entries().len();
    let all_pass = report.entries().iter().all(|e| e.satisfied);
    let ratio = gear_ratio(&design).unwrap();
    let alpha = carrier_clearance(&design);
    let alpha_err = (alpha - PI / 12.0).abs();
    let passed = entries == 12
        && all_pass
        && report.overall_feasible()
        && ratio == Rational::new(20, 1)
        && alpha_err <= 1e-12
        && elapsed < Duration::from_millis(1);
    Outcome {
        name: "paper-solution reproduction",
        passed,
        detail: format!(
            "{entries} entries all_pass={all_pass} ratio={ratio} |alpha-pi/12|={alpha_err:.1e} in {elapsed:?}"
        ),
    }
}

fn grid_spec(g: i128, n: u32, cap: i128) -> SynthesisSpec {
    let module = Rational::new(3, 5);
    SynthesisSpec::new(Rational::from_integer(g), module * Rational::from_integer(cap), module)
        .with_n_planets(n)
        .with_top_k(usize::MAX)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut total_feasible = 0;
    for g in [8, 12, 16, 20, 24] {
        for n in [2, 4, 5] {
            for cap in [80, 132] {
                let spec = grid_spec(g, n, cap);
                assert_eq!(spec.ring_cap(), cap);
                let fast = synthesize_with_workers(&spec, 1).unwrap();
                let slow = oracle_synthesize(&spec).unwrap();
                total_feasible += slow.feasible_count;
                if fast.solutions != slow.solutions || fast.feasible_count != slow.feasible_count {
                    mismatches.push(format!("G={g} n={n} cap={cap}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        name: "oracle equivalence (5x3x2 grid)",
        passed: mismatches.is_empty() && elapsed < Duration::from_secs(300),
        detail: format!("{total_feasible} feasible designs, mismatches {mismatches:?}, {elapsed:?}"),
    }
}

fn actuator_table() -> Outcome {
    let d151 = peak_output_torque(&ActuatorSpec::d151());
    let d110a = peak_output_torque(&ActuatorSpec::d110a());
    Outcome {
        name: "actuator table consistency",
        passed: d151 == 320.0 && d110a == 176.0,
        detail: format!("D151 {d151} N·m, D110A {d110a} N·m"),
    }
}

fn algebraic_identity() -> Outcome {
    let mut violations = 0u64;
    let mut checked = 0u64;
    for zs in 17..=60u32 {
        for p1 in 17..=60u32 {
            for p2 in 17..=60u32 {
                let t = ToothCounts::from_free(zs, p1, p2);
                let design = GearboxDesign::new(t, 4, Rational::new(3, 5), Rational::new(397, 5)).unwrap();
                checked += 1;
                if t.ring_fixed as i64 - 2 * p1 as i64 != zs as i64 || zs == 0 {
                    violations += 1;
                }
                match gear_ratio(&design) {
                    Ok(g) => {
                        let closed = Rational::new(
                            2 * i128::from(p1) * i128::from(t.ring_out),
                            i128::from(zs) * (i128::from(p1) - i128::from(p2)),
                        );
                        if g != closed {
                            violations += 1;
                        }
                    }
                    Err(_) if p1 == p2 => {}
                    Err(_) => violations += 1,
                }
            }
        }
    }
    Outcome {
        name: "algebraic-identity property",
        passed: violations == 0,
        detail: format!("{checked} triples, {violations} violations"),
    }
}

fn module_scaling() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_3c0f);
    let scales = [Rational::new(1, 2), Rational::from_integer(2), Rational::new(37, 10)];
    let mut differing = 0;
    for _ in 0..100 {
        let t = ToothCounts::new(
            rng.gen_range(10..150),
            rng.gen_range(10..150),
            rng.gen_range(10..150),
            rng.gen_range(30..300),
            rng.gen_range(30..300),
        );
        let spec = SynthesisSpec::new(
            Rational::new(rng.gen_range(2..400), rng.gen_range(1..10)),
            Rational::new(rng.gen_range(200..2000), 10),
            Rational::new(rng.gen_range(3..20), 10),
        )
        .with_n_planets(rng.gen_range(2..7))
        .with_alpha_min_rad(rng.gen_range(0.0..0.3));
        let base = validate(&GearboxDesign::for_spec(t, &spec).unwrap(), &spec);
        for c in scales {
            let scaled = spec
                .clone()
                .with_rotor_bore_mm(spec.rotor_bore_mm * c)
                .with_module_mm(spec.module_mm * c);
            let report = validate(&GearboxDesign::for_spec(t, &scaled).unwrap(), &scaled);
            if report != base {
                differing += 1;
            }
        }
    }
    Outcome {
        name: "module-scaling invariance",
        passed: differing == 0,
        detail: format!("100 pairs x 3 scales, {differing} differing reports"),
    }
}

fn determinism() -> Outcome {
    let run = |workers: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_gearsynth"))
            .args([
                "synth",
                "--spec",
                D151_SPEC,
                "--format",
                "csv",
                "--quiet",
                "--workers",
                workers,
            ])
            .output()
            .expect("run gearsynth");
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    let reference = run("1");
    let mut outputs = vec![run("1"), run("1")];
    outputs.extend(["4", "8"].map(run));
    let identical = outputs.iter().all(|o| *o == reference);
    Outcome {
        name: "determinism (3 runs, workers 1/4/8)",
        passed: identical && !reference.is_empty(),
        detail: format!("{} bytes of CSV, identical={identical}", reference.len()),
    }
}

fn divisibility_negative() -> Outcome {
    let spec = paper_spec().with_n_planets(3).with_top_k(usize::MAX);
    let set = synthesize(&spec).unwrap();
    let excluded = !set.contains(&PAPER_TEETH);
    let remainder = (PAPER_TEETH.ring_fixed + PAPER_TEETH.sun) % 3;
    Outcome {
        name: "divisibility negative (n_P = 3)",
        passed: excluded && remainder == 2,
        detail: format!(
            "paper design excluded={excluded} among {} feasible, 176 mod 3 = {remainder}",
            set.feasible_count
        ),
    }
}

#[test]
fn acceptance() {
    let outcomes = [
        paper_solution_reproduction(),
        oracle_equivalence(),
        actuator_table(),
        algebraic_identity(),
        module_scaling(),
        determinism(),
        divisibility_negative(),
    ];
    for o in &outcomes {
        println!(
            "[{}] {:<40} {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
