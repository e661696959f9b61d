//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::HashMap;
use std::time::Instant;

use causal_lab::certificates::{
    certificate_report, divergence_witness, dual_certificate, fidelity_divergence_sample,
    nosignalling_check, swap_pairs_choi, PairLayout,
};
use causal_lab::combinatorics::{
    cause_exact_plan, enumerate_diagrams, grouping_count, groupings, majorizes,
    multiplicity_ratio, schur_weyl_record, YoungDiagram,
};
use causal_lab::discrimination::{
    classical_consistency_oracle, classical_error_exact, classical_monte_carlo,
    complementarity_bound, gram_schmidt_sequence_success, helstrom, pgm_success,
    quantum_k_no_ref_success, rank_of_configurations, superposed_error_formula, uniform_priors,
    ClassicalAssignment, ComplementarityInput,
};
use causal_lab::linalg::{haar_ket, haar_unitary, task_rng, trace_norm};
use causal_lab::rates::{
    advantage_boundary, chernoff_numeric, heralded_rate, min_queries, noisy_chernoff_rate,
    noisy_intermediary_states, scenario_error, Scenario,
};
use causal_lab::states::{
    apply_intermediary_channel, cause_probe_output, singlet_product_probe, superposed_config_state,
    symmetric_choi, uniform_probe, CausalChannel, ProbeState, Symmetry,
};
use causal_lab::{CVector, DensityMatrix, Ket, UnitaryMatrix, C64};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 0xC0FFEE;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($arg)+));
        }
    };
}

fn lib<T>(r: causal_lab::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rational(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn outputs(probe: &ProbeState, u: &UnitaryMatrix) -> std::result::Result<(DensityMatrix, DensityMatrix), String> {
    let out = |slot| {
        let ch = lib(CausalChannel::new(probe.d(), slot, u.clone()))?;
        lib(apply_intermediary_channel(&ch, probe, 2))
    };
    Ok((out(0)?, out(1)?))
}

fn binary_error(probe: &ProbeState, u: &UnitaryMatrix) -> std::result::Result<f64, String> {
    let (a, b) = outputs(probe, u)?;
    Ok(lib(helstrom(&a, &b, 0.5))?.p_err)
}

fn c1_classical_threshold() -> Outcome {
    let plan = lib(min_queries(Scenario::Classical, 2, 1e-6, 2))?;
    ensure!(plan.n == 20, "N = {} (want 20)", plan.n);
    let want = rational(1, 1 << 20);
    ensure!(plan.achieved_err_exact.as_ref() == Some(&want), "exact error {:?}", plan.achieved_err_exact);
    let (e19, x19) = lib(scenario_error(Scenario::Classical, 2, 19, 2))?;
    ensure!(x19 == Some(rational(1, 1 << 19)) && e19 > 1e-6, "N=19 error {e19:e} should exceed 1e-6");
    Ok(format!("N=20, error 1/2^20 exact; N=19 gives {e19:.3e}"))
}

fn c2_quantum_threshold() -> Outcome {
    let plan = lib(min_queries(Scenario::Superposed, 2, 1e-6, 2))?;
    ensure!(plan.n == 12, "N = {} (want 12)", plan.n);
    let r = YoungDiagram::new(vec![6, 6]).unwrap().multiplicity();
    ensure!(r == BigUint::from(132u32), "r = {r} (want 132)");
    let r = 132.0f64;
    let direct = 1.0 / (2.0 * 4096.0) * r * (1.0 - (1.0 - 1.0 / (r * r)).sqrt());
    let rel = (plan.achieved_err - direct).abs() / direct;
    ensure!(rel <= 1e-9, "achieved {:e} vs formula {direct:e} (rel {rel:e})", plan.achieved_err);
    ensure!((plan.achieved_err - 4.624e-7).abs() < 5e-11, "achieved {:e} not ≈ 4.624e-7", plan.achieved_err);
    Ok(format!("N=12, r=132, error {:.6e}", plan.achieved_err))
}

fn c3_brute_force_helstrom() -> Outcome {
    let mut details = Vec::new();
    for (d, n) in [(2usize, 2usize), (3, 3)] {
        let probe = lib(singlet_product_probe(d, n))?;
        let u = lib(haar_unitary(d, SEED))?;
        let p = binary_error(&probe, &u)?;
        let want = 1.0 / (2.0 * (d as f64).powi(n as i32));
        ensure!((p - want).abs() <= 1e-9, "singlet (d={d},N={n}): {p} vs {want}");
        details.push(format!("singlet({d},{n})={p:.10}"));
    }
    let probe = lib(uniform_probe(2, 1))?;
    for perm in [[0usize, 1], [1, 0]] {
        let u = lib(UnitaryMatrix::permutation(&perm))?;
        let p = binary_error(&probe, &u)?;
        ensure!((p - 0.25).abs() <= 1e-10, "uniform probe with {perm:?}: {p}");
    }
    details.push("uniform(2,1)=0.25".into());
    Ok(details.join(", "))
}

fn c4_superposed_probe() -> Outcome {
    let rank = lib(rank_of_configurations(4, 2))?;
    ensure!(rank == 2, "rank {rank} (want 2)");
    let probe = lib(superposed_config_state(4, 2))?;
    let (a, b) = outputs(&probe, &UnitaryMatrix::identity(2))?;
    ensure!(a.dim() == 768, "output dimension {}", a.dim());
    let p = lib(helstrom(&a, &b, 0.5))?.p_err;
    let formula = lib(superposed_error_formula(2, 4, 2.0, 1.0))?.p_err;
    let closed = (1.0 - 3f64.sqrt() / 2.0) / 16.0;
    ensure!((p - formula).abs() <= 1e-9, "Helstrom {p} vs formula {formula}");
    ensure!((formula - closed).abs() <= 1e-15, "formula {formula} vs closed form {closed}");
    Ok(format!("rank 2, Helstrom {p:.12} on 768-dim outputs"))
}

fn c5_unitary_independence() -> Outcome {
    let probe = lib(superposed_config_state(4, 2))?;
    let (a0, b0) = outputs(&probe, &UnitaryMatrix::identity(2))?;
    let mut worst = 0.0f64;
    for i in 0..20 {
        let u = lib(haar_unitary(2, SEED + i))?;
        let (a, b) = outputs(&probe, &u)?;
        worst = worst.max(lib(trace_norm(&(a.matrix() - a0.matrix())))?);
        worst = worst.max(lib(trace_norm(&(b.matrix() - b0.matrix())))?);
    }
    ensure!(worst <= 1e-10, "max trace distance {worst:e}");
    Ok(format!("max trace distance over 20 unitaries {worst:.2e}"))
}

fn c6_fidelity_divergence() -> Outcome {
    let mut details = Vec::new();
    for (d, refs) in [(2usize, vec![1usize, 2, 4]), (3, vec![1, 3, 9])] {
        let exact = 1.0 / (d * d) as f64;
        for &r in &refs {
            let w = lib(divergence_witness(d, r, SEED))?;
            ensure!((w - exact).abs() <= 1e-12, "witness d={d} refDim={r}: {w}");
        }
        let r = *refs.last().unwrap();
        let est = lib(fidelity_divergence_sample(d, r, 10_000, SEED))?;
        ensure!(est.min_ratio >= exact - 1e-9, "d={d}: sampled ratio {} below {exact}", est.min_ratio);
        details.push(format!("d={d}: min sampled {:.6} (skipped {})", est.min_ratio, est.skipped));
    }
    Ok(details.join(", "))
}

fn c7_dual_certificate() -> Outcome {
    let mut details = Vec::new();
    for (d, n) in [(2usize, 1usize), (2, 2), (3, 1), (3, 2)] {
        let cert = lib(dual_certificate(d, n))?;
        let dd = (d as f64).powi(n as i32);
        let closed = ((dd + 1.0).sqrt() + (dd - 1.0).sqrt()).powi(2) / (4.0 * dd);
        ensure!((cert.lambda - closed).abs() <= 1e-12, "({d},{n}) λ {} vs {closed}", cert.lambda);
        let bound = (1.0 - (1.0 - 1.0 / (dd * dd)).sqrt()) / 2.0;
        ensure!((cert.implied_error() - bound).abs() <= 1e-12, "({d},{n}) bound {}", cert.implied_error());
        let ok = lib(certificate_report(&cert, cert.lambda))?;
        let min = ok.per_hypothesis_min_eig.iter().copied().fold(f64::INFINITY, f64::min);
        ensure!(min >= -1e-9, "({d},{n}) min eigenvalue {min:e}");
        let half = lib(certificate_report(&cert, cert.lambda / 2.0))?;
        let hmin = half.per_hypothesis_min_eig.iter().copied().fold(f64::INFINITY, f64::min);
        ensure!(!half.feasible && hmin < -1e-9, "({d},{n}) λ/2 still feasible ({hmin:e})");
        details.push(format!("({d},{n}) min eig {min:.1e}"));
    }
    Ok(details.join(", "))
}

fn c8_no_signalling() -> Outcome {
    for n in [1usize, 2] {
        let layout = PairLayout::two_slot(n);
        for sign in [Symmetry::Plus, Symmetry::Minus] {
            let c = lib(symmetric_choi(sign, 2, n))?;
            for s in 0..n {
                let ok = lib(nosignalling_check(&c, &layout, &[s], 50, SEED, 1e-10))?;
                ensure!(ok, "{sign:?} N={n} signals from input {s}");
            }
        }
    }
    let swap = lib(swap_pairs_choi(2))?;
    let signals = !lib(nosignalling_check(&swap, &PairLayout::two_slot(2), &[0], 50, SEED, 1e-10))?;
    ensure!(signals, "SWAP counterexample passed the check");
    Ok("C± pass for N∈{1,2}; SWAP fails".into())
}

fn syt_count(rows: Vec<usize>, memo: &mut HashMap<Vec<usize>, BigUint>) -> BigUint {
    if rows.iter().sum::<usize>() <= 1 {
        return BigUint::one();
    }
    if let Some(x) = memo.get(&rows) {
        return x.clone();
    }
    let mut total = BigUint::from(0u32);
    for i in 0..rows.len() {
        if rows[i] > rows.get(i + 1).copied().unwrap_or(0) {
            let mut next = rows.clone();
            next[i] -= 1;
            while next.last() == Some(&0) {
                next.pop();
            }
            total += syt_count(next, memo);
        }
    }
    memo.insert(rows, total.clone());
    total
}

fn c9_combinatorics() -> Outcome {
    let mut memo = HashMap::new();
    let (mut diagrams, mut pairs, mut violations) = (0usize, 0usize, 0usize);
    for d in 1..=4usize {
        for n in 1..=12usize {
            let all = lib(enumerate_diagrams(n, d))?;
            let recs: Vec<_> = all.iter().map(|l| schur_weyl_record(l, d)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            let total: BigUint = recs.iter().map(|r| &r.rep_dim * &r.multiplicity).sum();
            ensure!(total == BigUint::from(d).pow(n as u32), "Σ d_λ m_λ ≠ d^N at N={n}, d={d}");
            for r in &recs {
                ensure!(syt_count(r.diagram.rows().to_vec(), &mut memo) == r.multiplicity, "SYT count differs for {}", r.diagram);
            }
            for a in &recs {
                for b in &recs {
                    if lib(majorizes(&a.diagram, &b.diagram))? {
                        pairs += 1;
                        if a.ratio() < b.ratio() {
                            violations += 1;
                        }
                    }
                }
            }
            if n % d == 0 {
                let rect = schur_weyl_record(&lib(YoungDiagram::balanced(n, d))?, d).map_err(|e| e.to_string())?;
                ensure!(recs.iter().all(|r| r.ratio() >= rect.ratio()), "rectangle not minimal at N={n}, d={d}");
                let g = lib(grouping_count(n, d))?;
                let explicit = lib(groupings(n, d))?.configurations.map(|c| c.len());
                ensure!(explicit.map(BigUint::from) == Some(g.clone()), "grouping count {g} vs {explicit:?} at N={n}, d={d}");
            }
            diagrams += recs.len();
        }
    }
    ensure!(violations == 0, "{violations} majorization violations");
    Ok(format!("{diagrams} diagrams, {pairs} comparable pairs, 0 violations"))
}

fn c10_asymptotic() -> Outcome {
    let errs: Vec<f64> = [20usize, 40, 60]
        .iter()
        .map(|&n| multiplicity_ratio(n, 2).map(|r| (r - 1.0).abs()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure!(errs[0] > errs[1] && errs[1] > errs[2], "not decreasing: {errs:?}");
    ensure!(errs[1] <= 0.1, "N=40 relative error {}", errs[1]);
    Ok(format!("|ratio−1| = {:.4}, {:.4}, {:.4}", errs[0], errs[1], errs[2]))
}

fn c11_classical_k() -> Outcome {
    let exact = lib(classical_error_exact(2, 5, 3, 1))?;
    ensure!(exact == rational(47, 768), "exact {exact}");
    let p = 47.0 / 768.0;
    let trials = 1_000_000u64;
    let mc = lib(classical_monte_carlo(2, 5, 3, trials, SEED))?;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let z = (mc - p) / sigma;
    ensure!(z.abs() <= 4.0, "Monte Carlo {mc} is {z:.2}σ away");
    for n in 1..=4usize {
        let constant = lib(classical_error_exact(2, n, 2, 1))?;
        for a in ClassicalAssignment::all(2, n) {
            let e = lib(classical_consistency_oracle(2, n, &a))?;
            ensure!(e >= constant, "assignment {:?} beats the constant input", a.values());
            ensure!(e == lib(classical_error_exact(2, n, 2, a.distinct()))?, "oracle/formula mismatch for {:?}", a.values());
        }
    }
    Ok(format!("47/768 exact, Monte Carlo {mc:.6} ({z:+.2}σ), v=1 optimal for N≤4"))
}

fn c12_quantum_k() -> Outcome {
    let mut points = 0;
    for d in [2usize, 3, 4] {
        for blocks in 1..=4usize {
            let n = d * blocks;
            if n > 12 {
                continue;
            }
            let rect = lib(YoungDiagram::balanced(n, d))?;
            let two = BigRational::one() - lib(quantum_k_no_ref_success(d, n, 2, &rect))?;
            let want = BigRational::new(BigInt::one(), BigInt::from(2u32) * BigInt::from(BigUint::from(d).pow(n as u32)));
            ensure!(two == want, "k=2 identity fails at d={d}, N={n}");
            for k in [2usize, 3, 4, 6, 10] {
                let q = BigRational::one() - lib(quantum_k_no_ref_success(d, n, k, &rect))?;
                let c = lib(classical_error_exact(d, n, k, 1))?;
                ensure!(q < c, "quantum not below classical at d={d}, N={n}, k={k}");
                points += 1;
            }
        }
    }
    Ok(format!("k=2 identity exact; quantum < classical at {points} grid points"))
}

fn c13_cause_identification() -> Outcome {
    let a = lib(cause_probe_output(2, 2, 1, 0))?;
    let b = lib(cause_probe_output(2, 2, 1, 1))?;
    let h = lib(helstrom(&a, &b, 0.5))?.p_err;
    let states: Vec<DensityMatrix> = (0..4).map(|x| cause_probe_output(4, 2, 1, x)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let pgm = lib(pgm_success(&states, &uniform_priors(4)))?.p_success;
    let plan = lib(cause_exact_plan(6, 2))?;
    let mut failures = Vec::new();
    if (h - 0.2).abs() > 1e-10 {
        failures.push(format!("Helstrom(k=2) = {h:.10}, expected 0.2"));
    }
    if (pgm - 4.0 / 7.0).abs() > 1e-6 {
        failures.push(format!("PGM(k=4) = {pgm:.10}, expected {:.10}", 4.0 / 7.0));
    }
    if plan.n != 4 {
        failures.push(format!("cause_exact_plan(6,2) = {}, expected 4", plan.n));
    }
    let summary = format!("Helstrom {h:.10}, PGM {pgm:.10}, plan N={}", plan.n);
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failures.join("; ")))
    }
}

fn c14_noisy_rates() -> Outcome {
    let mut worst = 0.0f64;
    for d in [2usize, 3] {
        for p in [0.05, 0.1, 0.3] {
            let (a, b) = lib(noisy_intermediary_states(d, p))?;
            let numeric = lib(chernoff_numeric(&a, &b, 41))?;
            let bracket = lib(noisy_chernoff_rate(d, p))?;
            worst = worst.max((numeric - bracket).abs());
        }
    }
    ensure!(worst <= 1e-9, "Chernoff numeric vs bracket gap {worst:e}");
    let boundary = lib(advantage_boundary(2))?;
    ensure!((boundary - 0.0893).abs() <= 1e-3, "boundary {boundary}");
    for d in 2..=5usize {
        let r = heralded_rate(d, 1.0 / (d as f64 + 1.0));
        ensure!((r - (d as f64).log2()).abs() <= 1e-12, "heralded rate at threshold, d={d}: {r}");
    }
    Ok(format!("max Chernoff gap {worst:.1e}, boundary {boundary:.6}"))
}

fn c15_gram_schmidt() -> Outcome {
    let m = 4.0f64;
    let mut details = Vec::new();
    for l in [2usize, 3] {
        let s = lib(gram_schmidt_sequence_success(4, l))?;
        let bound = 1.0 - (l as f64 - 1.0) / (2.0 * m * m) - 5.0 / (m * m * m);
        ensure!(s >= bound, "l={l}: success {s} below {bound}");
        details.push(format!("l={l}: {s:.6} ≥ {bound:.6}"));
    }
    Ok(details.join(", "))
}

fn c16_square_root_measurement() -> Outcome {
    for d in [2usize, 3] {
        let psi = lib(haar_ket(vec![d], &mut task_rng(SEED, d as u64)))?;
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
        let mut states = Vec::new();
        for a in 0..d {
            for b in 0..d {
                let v = CVector::from_fn(d, |i, _| {
                    let src = (i + d - a) % d;
                    psi.amplitudes()[src] * omega.powu((b * src) as u32)
                });
                states.push(lib(Ket::new(v, vec![d]))?.to_density());
            }
        }
        let s = lib(pgm_success(&states, &uniform_priors(d * d)))?.p_success;
        ensure!((s - 1.0 / d as f64).abs() <= 1e-10, "d={d}: PGM success {s}");
    }
    for (d, n) in [(2usize, 1usize), (2, 4), (3, 2), (4, 3)] {
        let b = complementarity_bound(&lib(ComplementarityInput::new(1.0, d, n, 16))?);
        let want = 1.0 / (2.0 * (d as f64).powi(n as i32));
        ensure!((b.p_err_lower - want).abs() <= 1e-15, "T=1 bound {} vs {want}", b.p_err_lower);
    }
    Ok("PGM = 1/d on Weyl–Heisenberg orbits; T=1 bound = 1/(2d^N)".into())
}

fn main() {
    let criteria: [Criterion; 16] = [
        ("classical threshold", c1_classical_threshold),
        ("quantum threshold", c2_quantum_threshold),
        ("brute-force Helstrom", c3_brute_force_helstrom),
        ("superposed probe", c4_superposed_probe),
        ("unitary independence", c5_unitary_independence),
        ("fidelity divergence", c6_fidelity_divergence),
        ("dual certificate", c7_dual_certificate),
        ("no-signalling", c8_no_signalling),
        ("combinatorics", c9_combinatorics),
        ("asymptotic multiplicity", c10_asymptotic),
        ("k-hypothesis classical", c11_classical_k),
        ("k-hypothesis quantum", c12_quantum_k),
        ("cause identification", c13_cause_identification),
        ("noisy rates", c14_noisy_rates),
        ("Gram-Schmidt measurement", c15_gram_schmidt),
        ("square-root measurement", c16_square_root_measurement),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{secs:.2}s]: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name} [{secs:.2}s]: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {} failed{}",
        criteria.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" ({failed:?})") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
