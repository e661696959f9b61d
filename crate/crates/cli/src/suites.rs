//! Named verification suites. Each check yields a record plus a verdict.

use std::fmt;
use std::str::FromStr;

use causal_lab::certificates::{
    certificate_report, divergence_witness, dual_certificate, fidelity_divergence_sample,
    nosignalling_check, swap_pairs_choi, PairLayout,
};
use causal_lab::combinatorics::{
    enumerate_diagrams, grouping_count, groupings, majorizes, schur_weyl_record, YoungDiagram,
};
use causal_lab::discrimination::{
    classical_consistency_oracle, classical_error_exact, helstrom, rank_of_configurations,
    ClassicalAssignment,
};
use causal_lab::linalg::haar_unitary;
use causal_lab::UnitaryMatrix;
use causal_lab::rates::{chernoff_numeric, noisy_chernoff_rate, noisy_intermediary_states};
use causal_lab::states::{
    apply_intermediary_channel, singlet_product_probe, symmetric_choi, uniform_probe, CausalChannel,
    ProbeState, Symmetry,
};
use causal_lab::{Error, Result};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::output::{Provenance, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Helstrom,
    Rank,
    Ykl,
    Divergence,
    Nosignal,
    Chernoff,
    ClassicalOracle,
    Combinatorics,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Helstrom,
        Suite::Rank,
        Suite::Ykl,
        Suite::Divergence,
        Suite::Nosignal,
        Suite::Chernoff,
        Suite::ClassicalOracle,
        Suite::Combinatorics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Helstrom => "helstrom",
            Suite::Rank => "rank",
            Suite::Ykl => "ykl",
            Suite::Divergence => "divergence",
            Suite::Nosignal => "nosignal",
            Suite::Chernoff => "chernoff",
            Suite::ClassicalOracle => "classical-oracle",
            Suite::Combinatorics => "combinatorics",
        }
    }

    /// Default `(d, N)` when the flags are omitted.
    fn defaults(self) -> (usize, usize) {
        match self {
            Suite::Helstrom => (2, 2),
            Suite::Rank => (2, 4),
            Suite::Ykl => (2, 1),
            Suite::Divergence => (2, 1),
            Suite::Nosignal => (2, 2),
            Suite::Chernoff => (2, 1),
            Suite::ClassicalOracle => (2, 4),
            Suite::Combinatorics => (4, 12),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub record: Record,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub trials: Option<u64>,
    pub seed: u64,
}

fn check(
    suite: Suite,
    name: &str,
    value: f64,
    prov: Provenance,
    passed: bool,
    detail: String,
) -> Check {
    Check {
        record: Record::new(format!("{suite}/{name}"), value, prov),
        passed,
        detail,
    }
}

pub fn run_suite(suite: Suite, params: &SuiteParams) -> Result<Vec<Check>> {
    let (d0, n0) = suite.defaults();
    let d = params.d.unwrap_or(d0);
    let n = params.n.unwrap_or(n0);
    match suite {
        Suite::Helstrom => helstrom_suite(d, n, params.seed),
        Suite::Rank => rank_suite(d, n),
        Suite::Ykl => ykl_suite(d, n),
        Suite::Divergence => divergence_suite(d, params.trials.unwrap_or(1_000), params.seed),
        Suite::Nosignal => nosignal_suite(d, n, params.trials.unwrap_or(50), params.seed),
        Suite::Chernoff => chernoff_suite(d, params.p),
        Suite::ClassicalOracle => oracle_suite(d, n),
        Suite::Combinatorics => combinatorics_suite(d, n),
    }
}

fn binary_error(probe: &ProbeState, u: &UnitaryMatrix) -> Result<f64> {
    let out = |slot| apply_intermediary_channel(&CausalChannel::new(probe.d(), slot, u.clone())?, probe, 2);
    Ok(helstrom(&out(0)?, &out(1)?, 0.5)?.p_err)
}

fn helstrom_suite(d: usize, n: usize, seed: u64) -> Result<Vec<Check>> {
    let want = 0.5 / (d as f64).powi(n as i32);
    let p = binary_error(&singlet_product_probe(d, n)?, &haar_unitary(d, seed)?)?;
    let mut checks = vec![check(
        Suite::Helstrom,
        "singlet-probe",
        p,
        Provenance::BruteForce,
        (p - want).abs() <= 1e-9,
        format!("Helstrom {p:.12e} vs 1/(2d^N) = {want:.12e}"),
    )];
    checks[0].record = checks[0].record.clone().d(d).n(n).k(2);
    let probe = uniform_probe(d, 1)?;
    let want = 0.5 / d as f64;
    for (i, perm) in [(0..d).collect::<Vec<_>>(), (0..d).map(|i| (i + 1) % d).collect()].into_iter().enumerate() {
        let p = binary_error(&probe, &UnitaryMatrix::permutation(&perm)?)?;
        let mut c = check(
            Suite::Helstrom,
            &format!("uniform-probe-perm-{i}"),
            p,
            Provenance::BruteForce,
            (p - want).abs() <= 1e-10,
            format!("uniform probe, permutation {perm:?}: {p:.12e} vs 1/(2d) = {want:.12e}"),
        );
        c.record = c.record.d(d).n(1).k(2);
        checks.push(c);
    }
    Ok(checks)
}

fn rank_suite(d: usize, n: usize) -> Result<Vec<Check>> {
    let rank = rank_of_configurations(n, d)?;
    let m = YoungDiagram::balanced(n, d)?.multiplicity();
    let ok = m.to_usize() == Some(rank);
    let mut c = check(Suite::Rank, "configuration-rank", rank as f64, Provenance::BruteForce, ok, format!("rank {rank} vs rectangular multiplicity {m}"));
    c.record = c.record.d(d).n(n);
    Ok(vec![c])
}

fn ykl_suite(d: usize, n: usize) -> Result<Vec<Check>> {
    let cert = dual_certificate(d, n)?;
    let report = certificate_report(&cert, cert.lambda)?;
    let min = report.per_hypothesis_min_eig.iter().copied().fold(f64::INFINITY, f64::min);
    let half = certificate_report(&cert, cert.lambda / 2.0)?;
    let hmin = half.per_hypothesis_min_eig.iter().copied().fold(f64::INFINITY, f64::min);
    let dd = (d as f64).powi(n as i32);
    let bound = (1.0 - (1.0 - 1.0 / (dd * dd)).sqrt()) / 2.0;
    let mut checks = vec![
        check(Suite::Ykl, "lambda", cert.lambda, Provenance::Formula, (cert.lambda - cert.closed_form_lambda()).abs() <= 1e-12, format!("λ = {:.15}", cert.lambda)),
        check(Suite::Ykl, "implied-error", cert.implied_error(), Provenance::Formula, (cert.implied_error() - bound).abs() <= 1e-12, format!("1 − λ = {:.6e}", cert.implied_error())),
        check(Suite::Ykl, "min-eigenvalue", min, Provenance::BruteForce, min >= -1e-9, format!("min eigenvalue of λC − ½C_x {min:.3e}")),
        check(Suite::Ykl, "half-lambda-min-eigenvalue", hmin, Provenance::BruteForce, !half.feasible, format!("λ/2 gives min eigenvalue {hmin:.3e} (must be infeasible)")),
    ];
    for c in &mut checks {
        c.record = c.record.clone().d(d).n(n).k(2);
    }
    Ok(checks)
}

fn divergence_suite(d: usize, trials: u64, seed: u64) -> Result<Vec<Check>> {
    let exact = 1.0 / (d * d) as f64;
    let r = (d * d).min(64 / d);
    let w = divergence_witness(d, r, seed)?;
    let est = fidelity_divergence_sample(d, r, trials as usize, seed)?;
    let mut checks = vec![
        check(Suite::Divergence, "identical-input-witness", w, Provenance::BruteForce, (w - exact).abs() <= 1e-12, format!("ratio {w:.15} vs 1/d² = {exact}")),
        check(Suite::Divergence, "sampled-min-ratio", est.min_ratio, Provenance::MonteCarlo, est.min_ratio >= exact - 1e-9, format!("{} samples (refDim {r}), min ratio {:.12}", est.samples, est.min_ratio)),
    ];
    for c in &mut checks {
        c.record = c.record.clone().d(d).n(1);
    }
    Ok(checks)
}

fn nosignal_suite(d: usize, n: usize, trials: u64, seed: u64) -> Result<Vec<Check>> {
    let layout = PairLayout::two_slot(n);
    let mut checks = Vec::new();
    for (sign, label) in [(Symmetry::Plus, "plus"), (Symmetry::Minus, "minus")] {
        let c = symmetric_choi(sign, d, n)?;
        for s in 0..n {
            let ok = nosignalling_check(&c, &layout, &[s], trials as usize, seed, 1e-10)?;
            let mut ch = check(Suite::Nosignal, &format!("{label}-input-{s}"), if ok { 1.0 } else { 0.0 }, Provenance::BruteForce, ok, format!("C_{label}: input {s} does not signal"));
            ch.record = ch.record.d(d).n(n);
            checks.push(ch);
        }
    }
    let swap = swap_pairs_choi(d)?;
    let signals = !nosignalling_check(&swap, &PairLayout::two_slot(2), &[0], trials as usize, seed, 1e-10)?;
    let mut ch = check(Suite::Nosignal, "swap-counterexample", if signals { 0.0 } else { 1.0 }, Provenance::BruteForce, signals, "SWAP across pairs must signal".into());
    ch.record = ch.record.d(d).n(2);
    checks.push(ch);
    Ok(checks)
}

fn chernoff_suite(d: usize, p: Option<f64>) -> Result<Vec<Check>> {
    let grid: Vec<f64> = p.map(|x| vec![x]).unwrap_or_else(|| vec![0.05, 0.1, 0.3]);
    let mut checks = Vec::new();
    for p in grid {
        let (a, b) = noisy_intermediary_states(d, p)?;
        let numeric = chernoff_numeric(&a, &b, 41)?;
        let bracket = noisy_chernoff_rate(d, p)?;
        let gap = (numeric - bracket).abs();
        let mut ch = check(Suite::Chernoff, "numeric-rate", numeric, Provenance::BruteForce, gap <= 1e-9, format!("p={p}: numeric {numeric:.12} vs bracket {bracket:.12}"));
        ch.record = ch.record.d(d).n(1).p(p);
        checks.push(ch);
    }
    Ok(checks)
}

fn oracle_suite(d: usize, n_max: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 1..=n_max {
        let best = classical_error_exact(d, n, 2, 1)?;
        let mut agree = true;
        let mut optimal = true;
        for a in ClassicalAssignment::all(d, n) {
            let e = classical_consistency_oracle(d, n, &a)?;
            agree &= e == classical_error_exact(d, n, 2, a.distinct())?;
            optimal &= e >= best;
        }
        let value = best.to_f64().unwrap_or(f64::NAN);
        let mut ch = check(Suite::ClassicalOracle, "constant-input-error", value, Provenance::BruteForce, agree && optimal, format!("N={n}: oracle matches formula {agree}, v=1 optimal {optimal}"));
        ch.record = ch.record.d(d).n(n).k(2);
        checks.push(ch);
    }
    Ok(checks)
}

fn combinatorics_suite(d_max: usize, n_max: usize) -> Result<Vec<Check>> {
    let cells: Vec<(usize, usize)> = (1..=d_max).flat_map(|d| (1..=n_max).map(move |n| (d, n))).collect();
    cells
        .into_par_iter()
        .map(|(d, n)| -> Result<Check> {
            let recs = enumerate_diagrams(n, d)?
                .iter()
                .map(|l| schur_weyl_record(l, d))
                .collect::<Result<Vec<_>>>()?;
            let total: num_bigint::BigUint = recs.iter().map(|r| &r.rep_dim * &r.multiplicity).sum();
            let sums = total == num_bigint::BigUint::from(d).pow(n as u32);
            let mut violations = 0usize;
            for a in &recs {
                for b in &recs {
                    if majorizes(&a.diagram, &b.diagram)? && a.ratio() < b.ratio() {
                        violations += 1;
                    }
                }
            }
            let (rect_min, groups) = if n % d == 0 {
                let rect = schur_weyl_record(&YoungDiagram::balanced(n, d)?, d)?;
                let g = grouping_count(n, d)?;
                let explicit = groupings(n, d)?.configurations.map(|c| c.len());
                (
                    recs.iter().all(|r| r.ratio() >= rect.ratio()),
                    explicit.map(num_bigint::BigUint::from) == Some(g),
                )
            } else {
                (true, true)
            };
            let ok = sums && violations == 0 && rect_min && groups;
            let mut ch = check(Suite::Combinatorics, "diagram-count", recs.len() as f64, Provenance::BruteForce, ok, format!("N={n}, d={d}: Σd_λm_λ=d^N {sums}, majorization violations {violations}, rectangle minimal {rect_min}, groupings {groups}"));
            ch.record = ch.record.d(d).n(n);
            Ok(ch)
        })
        .collect::<Result<Vec<_>>>()
}

/// Maps a library error onto the exit-code convention.
pub fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidInput(_) | Error::Guardrail { .. } | Error::DimensionMismatch { .. }
    )
}
