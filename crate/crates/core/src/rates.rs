//! Discrimination rates, query planning and the noisy-channel exponents.
//!
//! Rates are in bits per query throughout.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::combinatorics::{enumerate_diagrams, ln_big, YoungDiagram};
use crate::discrimination::{classical_error_exact, confusion_error, superposed_error_formula};
use crate::error::{guardrail, invalid, mismatch, Error, Result};
use crate::linalg::{hermitian_eigen, DensityMatrix, NULL_EIGENVALUE};
use crate::states::{
    apply_intermediary_channel, depolarize, entangled_battery_probe, CausalChannel, NoiseModel,
};
use crate::UnitaryMatrix;

/// Noiseless intermediary rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub d: usize,
    /// `log₂ d`.
    pub r_classical: f64,
    /// `2 log₂ d`.
    pub r_quantum: f64,
}

pub fn rates_summary(d: usize) -> Result<RateReport> {
    if d < 2 {
        return Err(invalid("d must be at least 2"));
    }
    let r = (d as f64).log2();
    Ok(RateReport {
        d,
        r_classical: r,
        r_quantum: 2.0 * r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Classical inputs with the consistency rule.
    Classical,
    /// Reference-free quantum probe on a one-dimensional sector.
    Coherent,
    /// Superposition of singlet groupings with a reference.
    Superposed,
    /// Identifying one cause among `k` candidates.
    CauseId,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Classical,
        Scenario::Coherent,
        Scenario::Superposed,
        Scenario::CauseId,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Classical => "classical",
            Scenario::Coherent => "coherent",
            Scenario::Superposed => "superposed",
            Scenario::CauseId => "cause-id",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| invalid(format!("unknown scenario '{s}'")))
    }
}

/// Largest number of queries searched by [`min_queries`].
pub const MAX_PLAN_QUERIES: usize = 4096;

/// Smallest admissible query count meeting a target error.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub scenario: Scenario,
    pub d: usize,
    pub k: usize,
    pub n: usize,
    /// Spacing of admissible query counts (`d` for the superposed scenario).
    pub step: usize,
    pub achieved_err: f64,
    /// Exact value when the scenario's formula is rational.
    pub achieved_err_exact: Option<BigRational>,
    /// Error at `n − step`, when that count is admissible.
    pub previous_err: Option<f64>,
    pub target: f64,
}

fn inverse_power(d: usize, n: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(BigUint::from(d).pow(n as u32)))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

/// Error of `scenario` at `n` queries, with the exact value when rational.
pub fn scenario_error(scenario: Scenario, d: usize, n: usize, k: usize) -> Result<(f64, Option<BigRational>)> {
    if d < 2 || n == 0 {
        return Err(invalid("need d ≥ 2 and N ≥ 1"));
    }
    match scenario {
        Scenario::Classical => {
            let e = classical_error_exact(d, n, k, 1)?;
            Ok((to_f64(&e), Some(e)))
        }
        Scenario::Coherent => {
            if k < 2 {
                return Err(invalid("k must be at least 2"));
            }
            let e = confusion_error(k, &inverse_power(d, n));
            Ok((to_f64(&e), Some(e)))
        }
        Scenario::Superposed => {
            if k != 2 {
                return Err(invalid("the superposed scenario is binary (k = 2)"));
            }
            let rect = YoungDiagram::balanced(n, d)?;
            let r = rect.multiplicity().to_f64().unwrap_or(f64::INFINITY);
            let rep = rect.rep_dim(d).to_f64().unwrap_or(f64::INFINITY);
            Ok((superposed_error_formula(d, n, r, rep)?.p_err, None))
        }
        Scenario::CauseId => {
            let e = cause_id_error_exact(k as u64, n, d)?;
            Ok((to_f64(&e), Some(e)))
        }
    }
}

/// Smallest `N` (a multiple of `d` for the superposed scenario) with error at most `eps`.
pub fn min_queries(scenario: Scenario, d: usize, eps: f64, k: usize) -> Result<PlanResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("target error {eps} outside (0, 1)")));
    }
    let step = if scenario == Scenario::Superposed { d } else { 1 };
    let mut previous = None;
    let mut n = step;
    while n <= MAX_PLAN_QUERIES {
        let (err, exact) = scenario_error(scenario, d, n, k)?;
        if err <= eps {
            return Ok(PlanResult {
                scenario,
                d,
                k,
                n,
                step,
                achieved_err: err,
                achieved_err_exact: exact,
                previous_err: previous,
                target: eps,
            });
        }
        previous = Some(err);
        n += step;
    }
    Err(guardrail("queries to reach target", format!("> {MAX_PLAN_QUERIES}"), MAX_PLAN_QUERIES))
}

/// `(k − 1)/(d^{2N} + k − 1)`.
pub fn cause_id_error_exact(k: u64, n: usize, d: usize) -> Result<BigRational> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let km1 = BigInt::from(k - 1);
    let dd = BigInt::from(BigUint::from(d).pow(2 * n as u32));
    Ok(BigRational::new(km1.clone(), dd + km1))
}

pub fn cause_id_error(k: u64, n: usize, d: usize) -> Result<f64> {
    Ok(to_f64(&cause_id_error_exact(k, n, d)?))
}

/// Relative tolerance of the golden-section refinement in `s`.
const S_TOL: f64 = 1e-8;

/// Minimizes `f` over `[0, 1]`: grid scan, then golden section around the best point.
pub fn minimize_unit(f: impl Fn(f64) -> f64, grid_points: usize) -> (f64, f64) {
    let g = grid_points.max(2);
    let mut best = (0.0, f(0.0));
    for i in 1..g {
        let s = i as f64 / (g - 1) as f64;
        let v = f(s);
        if v < best.1 {
            best = (s, v);
        }
    }
    let h = 1.0 / (g - 1) as f64;
    let (mut lo, mut hi) = ((best.0 - h).max(0.0), (best.0 + h).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > S_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    for (s, v) in [(x1, f1), (x2, f2)] {
        if v < best.1 {
            best = (s, v);
        }
    }
    best
}

/// `x^s` with `0^s = 0` for every `s`, matching the support convention of
/// fractional matrix powers.
fn support_pow(x: f64, s: f64) -> f64 {
    if x <= NULL_EIGENVALUE {
        0.0
    } else {
        x.powf(s)
    }
}

/// Below this minimum the exponent is reported as `+∞` (orthogonal supports).
pub const CHERNOFF_FLOOR: f64 = 1e-14;

/// `−log₂ min_{0≤s≤1} Tr[ρ₁^s ρ₂^{1−s}]`; `+∞` when the minimum is below [`CHERNOFF_FLOOR`].
pub fn chernoff_numeric(rho1: &DensityMatrix, rho2: &DensityMatrix, grid_points: usize) -> Result<f64> {
    if grid_points < 11 {
        return Err(invalid("gridPoints must be at least 11"));
    }
    if rho1.dim() != rho2.dim() {
        return Err(mismatch(rho1.dim(), rho2.dim()));
    }
    rho1.validate()?;
    rho2.validate()?;
    let (e1, v1) = hermitian_eigen(rho1.matrix())?;
    let (e2, v2) = hermitian_eigen(rho2.matrix())?;
    let overlaps = (v1.adjoint() * v2).map(|z| z.norm_sqr());
    let q = |s: f64| {
        let mut acc = 0.0;
        for (i, &a) in e1.iter().enumerate() {
            let ai = support_pow(a, s);
            if ai == 0.0 {
                continue;
            }
            for (j, &b) in e2.iter().enumerate() {
                acc += ai * support_pow(b, 1.0 - s) * overlaps[(i, j)];
            }
        }
        acc
    };
    let (_, min) = minimize_unit(q, grid_points);
    if min <= CHERNOFF_FLOOR {
        return Ok(f64::INFINITY);
    }
    Ok((-min.log2()).max(0.0))
}

/// Single-query outputs under depolarizing noise `p` with a maximally entangled
/// probe: `[(1−p)Φ + p I/d²]_{B R} ⊗ I_C/d` and the same with `B ↔ C`.
///
/// Factor order is `B, C, R`.
pub fn noisy_intermediary_states(d: usize, p: f64) -> Result<(DensityMatrix, DensityMatrix)> {
    let noise = NoiseModel::new(p, d)?;
    let probe = entangled_battery_probe(d, 1)?;
    let out = |slot: usize| -> Result<DensityMatrix> {
        let ch = CausalChannel::new(d, slot, UnitaryMatrix::identity(d))?;
        let clean = apply_intermediary_channel(&ch, &probe, 2)?;
        depolarize(&clean, &noise, &[slot])
    };
    Ok((out(0)?, out(1)?))
}

/// `(1/d²)[a^s + (d²−1)b^s][a^{1−s} + (d²−1)b^{1−s}]` with `a = 1 − p + p/d²`, `b = p/d²`.
pub fn chernoff_bracket(d: usize, p: f64, s: f64) -> f64 {
    let d2 = (d * d) as f64;
    let (a, b) = (1.0 - p + p / d2, p / d2);
    let side = |t: f64| support_pow(a, t) + (d2 - 1.0) * support_pow(b, t);
    side(s) * side(1.0 - s) / d2
}

/// Grid resolution for the bracket minimization.
pub const BRACKET_GRID: usize = 101;

/// `−log₂ min_s` of [`chernoff_bracket`].
pub fn noisy_chernoff_rate(d: usize, p: f64) -> Result<f64> {
    if d < 2 || !(0.0..=1.0).contains(&p) {
        return Err(invalid("need d ≥ 2 and p ∈ [0, 1]"));
    }
    let (_, min) = minimize_unit(|s| chernoff_bracket(d, p, s), BRACKET_GRID);
    Ok((-min.log2()).max(0.0))
}

/// `−log₂((1 − p)/d² + p)`.
pub fn heralded_rate(d: usize, p: f64) -> f64 {
    let d2 = (d * d) as f64;
    -((1.0 - p) / d2 + p).log2()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyRateReport {
    pub d: usize,
    pub p: f64,
    pub chernoff_rate: f64,
    pub heralded_rate: f64,
    /// `1/(d + 1)`: heralded rate equals `log₂ d` here.
    pub threshold_heralded: f64,
    /// Noise level where the Chernoff rate drops to `log₂ d`.
    pub advantage_boundary: f64,
}

/// Bisection tolerance for the advantage boundary.
pub const BOUNDARY_TOL: f64 = 1e-6;

pub fn advantage_boundary(d: usize) -> Result<f64> {
    let target = (d as f64).log2();
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > BOUNDARY_TOL / 4.0 {
        let mid = 0.5 * (lo + hi);
        if noisy_chernoff_rate(d, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn noisy_rates(d: usize, p: f64) -> Result<NoisyRateReport> {
    Ok(NoisyRateReport {
        d,
        p,
        chernoff_rate: noisy_chernoff_rate(d, p)?,
        heralded_rate: heralded_rate(d, p),
        threshold_heralded: 1.0 / (d as f64 + 1.0),
        advantage_boundary: advantage_boundary(d)?,
    })
}

/// Binomial mixture `Σ_k C(N,k)(1−p)^k p^{N−k} · perK(k)`.
pub fn heralded_error(d: usize, p: f64, n: usize, per_k: impl Fn(usize) -> f64) -> Result<f64> {
    if d < 2 || !(0.0..=1.0).contains(&p) {
        return Err(invalid("need d ≥ 2 and p ∈ [0, 1]"));
    }
    if p == 0.0 {
        return Ok(per_k(n));
    }
    if p == 1.0 {
        return Ok(per_k(0));
    }
    let (lq, lp) = ((1.0 - p).ln(), p.ln());
    let ln_binom = |k: usize| ln_big(&crate::combinatorics::binomial(n, k));
    Ok((0..=n)
        .map(|k| (ln_binom(k) + k as f64 * lq + (n - k) as f64 * lp).exp() * per_k(k))
        .sum())
}

/// Largest copy number accepted by [`entangled_probe_error`].
pub const MAX_PROBE_COPIES: usize = 200;

/// Exact error with `k` maximally entangled copies, none depolarized:
/// `½ Σ_λ p_λ² (1 − √(1 − m_λ^{−2}))` over diagrams with `k` boxes and at most `d` rows.
pub fn entangled_probe_error(k: usize, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(invalid("d must be at least 2"));
    }
    if k == 0 {
        return Ok(0.5);
    }
    if k > MAX_PROBE_COPIES {
        return Err(guardrail("entangled copies", k, MAX_PROBE_COPIES));
    }
    let ln_dk = k as f64 * (d as f64).ln();
    let mut acc = 0.0;
    for lambda in enumerate_diagrams(k, d)? {
        let m = lambda.multiplicity();
        let ln_p = ln_big(&lambda.rep_dim(d)) + ln_big(&m) - ln_dk;
        let inv_m2 = (-2.0 * ln_big(&m)).exp();
        // 1 − √(1 − x) = x/(1 + √(1 − x)).
        let gap = inv_m2 / (1.0 + (1.0 - inv_m2).sqrt());
        acc += (2.0 * ln_p).exp() * gap;
    }
    Ok(0.5 * acc)
}

/// [`heralded_error`] with [`entangled_probe_error`] as the per-count error.
pub fn heralded_error_default(d: usize, p: f64, n: usize) -> Result<f64> {
    let table = (0..=n).map(|k| entangled_probe_error(k, d)).collect::<Result<Vec<_>>>()?;
    heralded_error(d, p, n, |k| table[k])
}
