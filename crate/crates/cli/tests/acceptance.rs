//! Acceptance suite. Each criterion prints one PASS/FAIL line; run with
//! `cargo test -p treespin-cli --test acceptance -- --nocapture` to see them.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treespin_core::census::{
    count_periodic_ground_states, exhaustive_min_energy, theorem2_formula,
};
use treespin_core::io::{ColoringFile, SpecFile};
use treespin_core::periodic_subgroups::CosetLabel;
use treespin_core::spin_config::energy_delta;
use treespin_core::{
    build_a_sets, count_by_constraint_graph, gamma_check, hamiltonian, kronecker_u, parity_vector,
    periodic_config, reduce, u_extremes, volume, CensusOptions, CosetColoring, CouplingSign,
    GroundStateChecker, ModelParams, SpinConfiguration, SubgroupSpec, TreeParams, Word,
};

const SEED: u64 = 0x7265_6573_7061_6e31;
const PROPERTY_CASES: usize = 1000;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treespin"))
}

fn within(label: &str, started: Instant, limit: Duration) {
    let elapsed = started.elapsed();
    assert!(elapsed < limit, "{label} took {elapsed:?}, limit {limit:?}");
}

fn random_word(rng: &mut ChaCha8Rng, k: u32, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    let letters: Vec<u32> = (0..len).map(|_| rng.random_range(1..=k + 1)).collect();
    reduce(&letters, TreeParams::new(k).unwrap()).unwrap()
}

fn random_spec(rng: &mut ChaCha8Rng, k: u32, m: u32) -> SubgroupSpec {
    let vectors: Vec<CosetLabel> = (0..=k)
        .map(|_| CosetLabel::new(m, rng.random_range(0..1u64 << m)).unwrap())
        .collect();
    SubgroupSpec::from_vectors(k, m, &vectors).unwrap()
}

/// Distinct nonzero generator vectors spanning GF(2)^m, drawn by rejection.
fn random_full_index_spec(rng: &mut ChaCha8Rng, k: u32, m: u32) -> SubgroupSpec {
    loop {
        let mut bits: Vec<u64> = Vec::new();
        while bits.len() <= k as usize {
            let b = rng.random_range(1..1u64 << m);
            if !bits.contains(&b) {
                bits.push(b);
            }
        }
        let vectors: Vec<CosetLabel> = bits
            .iter()
            .map(|&b| CosetLabel::new(m, b).unwrap())
            .collect();
        let spec = SubgroupSpec::from_vectors(k, m, &vectors).unwrap();
        if spec.is_full_index() {
            return spec;
        }
    }
}

/// Next permutation in lexicographic order; false after the last one.
fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn criterion_1() {
    let started = Instant::now();
    let params = ModelParams::new(2, 2, 3, rat(1)).unwrap();
    let res = exhaustive_min_energy(&params, 2, &CensusOptions::default()).unwrap();
    assert_eq!(res.state_count, 59049);
    assert_eq!(res.minimizer_count, Some(3));
    assert_eq!(res.minimizers.len(), 3);
    for m in &res.minimizers {
        assert!(m.iter().all(|&s| s == m[0]), "non-constant minimizer {m:?}");
    }
    let firsts: HashSet<u32> = res.minimizers.iter().map(|m| m[0]).collect();
    assert_eq!(firsts.len(), 3);
    assert_eq!(res.ground_state_count, Some(3));
    assert!(res.agreement["minimizers_equal_ground_states"]);
    assert!(res.agreement["checker_confirms_minimizers"]);
    within("criterion 1", started, Duration::from_secs(10));
}

fn criterion_2(dir: &Path) {
    let started = Instant::now();
    let spec = build_a_sets(3, 3).unwrap();
    assert_eq!(spec.a_sets(), &[vec![1, 4], vec![2, 4], vec![3, 4]]);
    let gamma = gamma_check(&spec, 4);
    assert!(gamma.pass && gamma.witness.is_none());

    let params = ModelParams::new(3, 2, 8, rat(-1)).unwrap();
    let checker = GroundStateChecker::new(&params, 4).unwrap();
    let v = volume(4, spec.tree());
    let labels: Vec<usize> = v
        .iter()
        .map(|x| parity_vector(x, &spec).unwrap().bits() as usize)
        .collect();
    assert_eq!(checker.volume(), &v);
    assert!(checker.targets().iter().all(|&t| t == 0));
    let mut perm: Vec<u32> = (1..=8).collect();
    let mut seen = 0;
    loop {
        let spins: Vec<u32> = labels.iter().map(|&l| perm[l]).collect();
        let u = checker.ball_u_values(&spins).unwrap();
        assert!(u.iter().all(|&x| x == 0), "coloring {perm:?} fails");
        if seen % 97 == 0 {
            let config = SpinConfiguration::from_spins(&v, &spins).unwrap();
            assert!(checker.check(&config).unwrap().pass);
        }
        seen += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    assert_eq!(seen, 40320);
    // the spins above are exactly periodic_config's output
    let coloring = CosetColoring::new(3, vec![3, 7, 1, 8, 2, 6, 4, 5]).unwrap();
    let via_lib = periodic_config(&coloring, &spec, 4, 8).unwrap();
    let by_hand: Vec<u32> = labels.iter().map(|&l| coloring.colors()[l]).collect();
    assert_eq!(
        via_lib,
        SpinConfiguration::from_spins(&v, &by_hand).unwrap()
    );

    // CLI: check exits 0 for an injective coloring
    let spec_path = dir.join("spec33.json");
    let coloring_path = dir.join("injective.json");
    std::fs::write(
        &spec_path,
        serde_json::to_string(&SpecFile::from(&spec)).unwrap(),
    )
    .unwrap();
    std::fs::write(
        &coloring_path,
        serde_json::to_string(&ColoringFile::from(&coloring)).unwrap(),
    )
    .unwrap();
    let out = bin()
        .args(["check", "--spec"])
        .arg(&spec_path)
        .arg("--coloring")
        .arg(&coloring_path)
        .args(["--q", "8", "--n", "4", "--J", "-1"])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["result"]["pass"], true);
    assert!(json["result"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["u_value"] == 0));
    within("criterion 2", started, Duration::from_secs(10));
}

fn criterion_3() {
    let started = Instant::now();
    let spec = build_a_sets(3, 3).unwrap();
    for q in 2..=6u32 {
        let res = count_periodic_ground_states(
            &spec,
            q,
            CouplingSign::Positive,
            &CensusOptions::default(),
        )
        .unwrap();
        assert_eq!(res.periodic_count, Some(q as u128), "q={q}");
        assert_eq!(res.formula_count, Some(q as u128));
        assert!(res.oracles_agree() && res.formula_agrees());
    }
    within("criterion 3", started, Duration::from_secs(5));
}

fn criterion_4(dir: &Path) {
    let started = Instant::now();
    assert_eq!(theorem2_formula(8, 3).unwrap(), 6720);
    let spec = build_a_sets(3, 3).unwrap();
    let single = CensusOptions::default().with_workers(1);
    let res = count_periodic_ground_states(&spec, 8, CouplingSign::Negative, &single).unwrap();
    let graph = count_by_constraint_graph(&spec, 8).unwrap();
    assert_eq!(res.state_count, 16_777_216);
    assert_eq!(res.periodic_count, Some(graph));
    assert_eq!(res.constraint_graph_count, Some(graph));
    assert!(res.agreement["enumeration_equals_constraint_graph"]);
    assert_eq!(res.formula_count, Some(6720));
    let count = res.periodic_count.unwrap();
    assert_eq!(res.agreement["formula_count"], count == 6720);
    println!(
        "      periodic count {count}, constraint graph {graph}, formula 6720, ratio {}, ball restrictions {}",
        res.formula_ratio.as_ref().map(|r| r.to_string()).unwrap_or_default(),
        res.restriction_count.unwrap()
    );

    let spec_path = dir.join("spec33-census.json");
    std::fs::write(
        &spec_path,
        serde_json::to_string(&SpecFile::from(&spec)).unwrap(),
    )
    .unwrap();
    let out = bin()
        .args(["census", "periodic", "--spec"])
        .arg(&spec_path)
        .args(["--q", "8", "--J", "-1", "--workers", "1"])
        .output()
        .unwrap();
    let expected_code = if count == 6720 { 0 } else { 3 };
    assert_eq!(
        out.status.code(),
        Some(expected_code),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["result"]["periodic_count"], count.to_string());
    assert_eq!(json["result"]["formula_count"], "6720");
    assert_eq!(json["result"]["agreement"]["formula_count"], count == 6720);
    within("criterion 4", started, Duration::from_secs(300));
}

fn criterion_5() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    // group and metric axioms
    for _ in 0..PROPERTY_CASES {
        let k = rng.random_range(1..=4);
        let x = random_word(&mut rng, k, 10);
        let y = random_word(&mut rng, k, 10);
        let z = random_word(&mut rng, k, 10);
        let e = x.params().identity();
        assert_eq!(
            x.multiply(&y).unwrap().multiply(&z).unwrap(),
            x.multiply(&y.multiply(&z).unwrap()).unwrap()
        );
        assert_eq!(e.multiply(&x).unwrap(), x);
        assert_eq!(x.multiply(&e).unwrap(), x);
        assert!(x.multiply(&x.inverse()).unwrap().is_identity());
        let dxy = x.distance(&y).unwrap();
        assert_eq!(dxy, y.distance(&x).unwrap());
        assert_eq!(dxy == 0, x == y);
        assert!(x.distance(&z).unwrap() <= dxy + y.distance(&z).unwrap());
    }

    // U bounds and the Kronecker delta identity
    for _ in 0..PROPERTY_CASES {
        let q = rng.random_range(2..=8u32);
        let len = rng.random_range(1..=12usize);
        let spins: Vec<u32> = (0..len).map(|_| rng.random_range(1..=q)).collect();
        let u = kronecker_u(&spins, q).unwrap();
        let (lo, hi) = u_extremes(len, q);
        assert!(lo <= u && u <= hi);
        let a = rng.random_range(1..=q);
        let b = rng.random_range(1..=q);
        assert_eq!(kronecker_u(&[a, b], q).unwrap(), usize::from(a == b));
    }

    // parity homomorphism and validity <=> unit-ball label injectivity
    for _ in 0..PROPERTY_CASES {
        let k = rng.random_range(1..=4);
        let m = rng.random_range(1..=4);
        let spec = random_spec(&mut rng, k, m);
        let x = random_word(&mut rng, k, 8);
        let y = random_word(&mut rng, k, 8);
        assert_eq!(
            parity_vector(&x.multiply(&y).unwrap(), &spec).unwrap(),
            parity_vector(&x, &spec)
                .unwrap()
                .xor(parity_vector(&y, &spec).unwrap())
        );
        assert_eq!(gamma_check(&spec, 1).pass, spec.is_valid());
    }

    // census counts do not depend on the number of workers
    for case in 0..PROPERTY_CASES {
        let one = CensusOptions::default().with_workers(1);
        let four = CensusOptions::default().with_workers(4);
        if case % 2 == 0 {
            let m = rng.random_range(2..=3u32);
            let k = rng.random_range(m - 1..=2);
            let spec = random_full_index_spec(&mut rng, k, m);
            let positive = rng.random_bool(0.5);
            let (sign, q) = if positive {
                (CouplingSign::Positive, rng.random_range(2..=3))
            } else {
                (CouplingSign::Negative, k + 2)
            };
            let a = count_periodic_ground_states(&spec, q, sign, &one).unwrap();
            let b = count_periodic_ground_states(&spec, q, sign, &four).unwrap();
            assert_eq!(a.periodic_count, b.periodic_count);
            assert_eq!(a.restriction_count, b.restriction_count);
            assert_eq!(a.agreement, b.agreement);
        } else {
            let k = rng.random_range(1..=3);
            let q = rng.random_range(2..=3);
            let r = rng.random_range(1..=2);
            let j = if rng.random_bool(0.5) {
                rat(1)
            } else {
                rat(-2)
            };
            let params = ModelParams::new(k, r, q, j).unwrap();
            let a = exhaustive_min_energy(&params, 1, &one).unwrap();
            let b = exhaustive_min_energy(&params, 1, &four).unwrap();
            assert_eq!(a.min_energy, b.min_energy);
            assert_eq!(a.minimizer_count, b.minimizer_count);
            assert_eq!(a.minimizers, b.minimizers);
            assert_eq!(a.ground_state_count, b.ground_state_count);
        }
    }
    // same through the CLI flag
    let runs: Vec<serde_json::Value> = ["1", "4"]
        .iter()
        .map(|w| {
            let out = bin()
                .args([
                    "--workers",
                    w,
                    "census",
                    "exhaustive",
                    "--k",
                    "2",
                    "--r",
                    "2",
                    "--q",
                    "4",
                    "--n",
                    "2",
                    "--J",
                    "-1",
                ])
                .output()
                .unwrap();
            assert_eq!(
                out.status.code(),
                Some(0),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
            let mut json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
            json["result"]["wall_time_ms"].take();
            json["result"]["parameters"]["workers"].take();
            json["result"].take()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0]["minimizer_count"], "192");
    within("criterion 5", started, Duration::from_secs(120));
}

fn criterion_6() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let params = ModelParams::new(2, 2, 4, "-7/3".parse().unwrap()).unwrap();
    let v = volume(3, params.tree());
    for _ in 0..100 {
        let spins: Vec<u32> = (0..v.len()).map(|_| rng.random_range(1..=4)).collect();
        let config = SpinConfiguration::from_spins(&v, &spins).unwrap();
        let vertex = v.as_slice()[rng.random_range(0..v.len())].clone();
        let new_spin = rng.random_range(1..=4);
        let delta = energy_delta(&config, &vertex, new_spin, &params, 3).unwrap();
        let mut flipped = config.clone();
        flipped.set(vertex, new_spin).unwrap();
        let recomputed =
            hamiltonian(&flipped, &params, 3).unwrap() - hamiltonian(&config, &params, 3).unwrap();
        assert_eq!(delta, recomputed);
    }
    within("criterion 6", started, Duration::from_secs(5));
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let criteria: [(&str, &dyn Fn()); 6] = [
        (
            "1 exhaustive J>0 minimizers are the 3 constants",
            &criterion_1,
        ),
        (
            "2 injective colorings of spec(3,3) have U=0 on V_4",
            &|| criterion_2(dir.path()),
        ),
        ("3 periodic J>0 count equals q for q=2..6", &criterion_3),
        ("4 periodic J<0 count vs closed form, q=8", &|| {
            criterion_4(dir.path())
        }),
        ("5 randomized property suites (seeded)", &criterion_5),
        ("6 single-flip locality", &criterion_6),
    ];
    let mut failed = Vec::new();
    for (name, check) in &criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let status = if outcome.is_ok() { "PASS" } else { "FAIL" };
        println!("[{status}] AC{name} ({:.2?})", started.elapsed());
        if outcome.is_err() {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
