//! Discrimination procedures and the closed-form error formulas they check.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::combinatorics::{binomial, schur_weyl_record, YoungDiagram};
use crate::error::{guardrail, invalid, mismatch, Error, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, spectral_map, task_rng, trace_norm, CMatrix, CVector,
    DensityMatrix,
};
use crate::states::{configuration_vectors, cause_probe_output};

/// Outcome of a binary discrimination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryResult {
    pub p_err: f64,
    /// `‖ρ₁ − ρ₂‖₁` (not halved).
    pub trace_distance: f64,
}

/// Minimum error of telling `rho1` (prior `prior`) from `rho2` (prior `1 − prior`).
pub fn helstrom(rho1: &DensityMatrix, rho2: &DensityMatrix, prior: f64) -> Result<BinaryResult> {
    if rho1.dim() != rho2.dim() {
        return Err(mismatch(rho1.dim(), rho2.dim()));
    }
    if !(0.0..=1.0).contains(&prior) {
        return Err(invalid(format!("prior {prior} outside [0,1]")));
    }
    let trace_distance = trace_norm(&(rho1.matrix() - rho2.matrix()))?;
    let weighted = if prior == 0.5 {
        trace_distance / 2.0
    } else {
        trace_norm(&(rho1.matrix().scale(prior) - rho2.matrix().scale(1.0 - prior)))?
    };
    Ok(BinaryResult {
        p_err: (1.0 - weighted) / 2.0,
        trace_distance,
    })
}

/// Outcome of a many-hypothesis discrimination.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub p_success: f64,
    /// `Tr[E_x ρ_x]` for each hypothesis.
    pub per_hypothesis: Vec<f64>,
}

/// Relative eigenvalue cutoff for the pseudo-inverse square root.
pub const PGM_SUPPORT_CUTOFF: f64 = 1e-12;

/// Success probability of the square-root measurement
/// `E_x = ρ̄^{−1/2} π_x ρ_x ρ̄^{−1/2}`, `ρ̄ = Σ π_x ρ_x`, inverted on its support.
pub fn pgm_success(states: &[DensityMatrix], priors: &[f64]) -> Result<EnsembleResult> {
    let first = states.first().ok_or_else(|| invalid("empty ensemble"))?;
    if priors.len() != states.len() {
        return Err(mismatch(states.len(), priors.len()));
    }
    if priors.iter().any(|&p| !(p >= 0.0)) || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(invalid("priors must be non-negative and sum to 1"));
    }
    let n = first.dim();
    let mut avg = CMatrix::zeros(n, n);
    for (rho, &p) in states.iter().zip(priors) {
        if rho.dim() != n {
            return Err(mismatch(n, rho.dim()));
        }
        avg += rho.matrix().scale(p);
    }
    let (w, v) = hermitian_eigen(&avg)?;
    let top = w.last().copied().unwrap_or(0.0);
    let cut = PGM_SUPPORT_CUTOFF * top;
    let inv_sqrt = spectral_map(&w, &v, |x| if x > cut { x.powf(-0.5) } else { 0.0 });
    let support = spectral_map(&w, &v, |x| if x > cut { 1.0 } else { 0.0 });

    let mut total = CMatrix::zeros(n, n);
    let mut per_hypothesis = Vec::with_capacity(states.len());
    for (rho, &p) in states.iter().zip(priors) {
        let e = &inv_sqrt * rho.matrix().scale(p) * &inv_sqrt;
        per_hypothesis.push((&e * rho.matrix()).trace().re);
        total += e;
    }
    let defect = (total - support).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if defect > 1e-9 {
        return Err(Error::Numerical(format!(
            "square-root measurement incomplete on support (defect {defect:e})"
        )));
    }
    let p_success = per_hypothesis.iter().zip(priors).map(|(s, p)| s * p).sum();
    Ok(EnsembleResult {
        p_success,
        per_hypothesis,
    })
}

/// `Tr √ρ` for a positive semidefinite operator.
pub fn root_trace(rho: &CMatrix) -> Result<f64> {
    let w = hermitian_eigenvalues(rho)?;
    Ok(w.iter().map(|&x| x.max(0.0).sqrt()).sum())
}

/// Inputs to the complementarity bound between telling the cause and guessing the gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementarityInput {
    /// `Tr √⟨Ψ⟩` of the twirled probe.
    t: f64,
    d: usize,
    n: usize,
    ensemble_size: u64,
}

impl ComplementarityInput {
    pub fn new(t: f64, d: usize, n: usize, ensemble_size: u64) -> Result<Self> {
        let dn = (d as f64).powi(n as i32);
        if !(dn >= 2.0) {
            return Err(invalid("need d^N ≥ 2"));
        }
        if !(t >= 1.0 - 1e-12 && t <= dn.sqrt() + 1e-12) {
            return Err(invalid(format!("T = {t} outside [1, √(d^N)]")));
        }
        if ensemble_size == 0 {
            return Err(invalid("ensemble size must be positive"));
        }
        Ok(Self {
            t,
            d,
            n,
            ensemble_size,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementarityBound {
    pub p_err_lower: f64,
    pub p_guess_upper: f64,
}

/// `p_guess ≤ T²/|U|` and `p_err ≥ (1/(2D))·(1 + (T² − 1)²/(2(D − 1)))`, `D = d^N`.
pub fn complementarity_bound(input: &ComplementarityInput) -> ComplementarityBound {
    let dn = (input.d as f64).powi(input.n as i32);
    let t2 = input.t * input.t;
    let p_guess_upper = t2 / input.ensemble_size as f64;
    let lift = p_guess_upper * input.ensemble_size as f64 - 1.0;
    ComplementarityBound {
        p_err_lower: (1.0 + lift * lift / (2.0 * (dn - 1.0))) / (2.0 * dn),
        p_guess_upper,
    }
}

fn rational(n: &BigUint, d: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(n.clone()), BigInt::from(d.clone()))
}

/// Number of injective maps from a `v`-set into a `d`-set.
pub fn injective_count(d: usize, v: usize) -> BigUint {
    if v > d {
        return BigUint::zero();
    }
    (d - v + 1..=d).map(BigUint::from).product()
}

/// `Σ_{t=1}^{k−1} t/(t+1)·C(k−1,t)·qᵗ(1−q)^{k−1−t}`: error of guessing uniformly
/// among the true side and the `t ~ Bin(k−1, q)` decoys that look consistent.
pub fn confusion_error(k: usize, q: &BigRational) -> BigRational {
    let one = BigRational::one();
    let rest = &one - q;
    let mut acc = BigRational::zero();
    for t in 1..k {
        let w = BigRational::new(BigInt::from(t), BigInt::from(t + 1));
        let c = BigRational::from_integer(BigInt::from(binomial(k - 1, t)));
        acc += w * c * num_traits::pow(q.clone(), t) * num_traits::pow(rest.clone(), k - 1 - t);
    }
    acc
}

/// Exact error of the classical consistency strategy with `k` candidate sides
/// and an input assignment using `v` distinct values.
pub fn classical_error_exact(d: usize, n: usize, k: usize, v: usize) -> Result<BigRational> {
    if v == 0 || v > d || v > n {
        return Err(invalid(format!("need 1 ≤ v ≤ min(N, d), got v = {v}, N = {n}, d = {d}")));
    }
    if k < 2 {
        return Err(invalid("k must be at least 2"));
    }
    let q = rational(&injective_count(d, v), &BigUint::from(d).pow(n as u32));
    Ok(confusion_error(k, &q))
}

/// The classical inputs `a₁ … a_N ∈ {0 … d−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalAssignment {
    values: Vec<usize>,
    d: usize,
}

impl ClassicalAssignment {
    pub fn new(values: Vec<usize>, d: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("assignment must be non-empty"));
        }
        if let Some(&bad) = values.iter().find(|&&x| x >= d) {
            return Err(invalid(format!("value {bad} outside alphabet of size {d}")));
        }
        Ok(Self { values, d })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Number of distinct values `v`.
    pub fn distinct(&self) -> usize {
        let mut seen = vec![false; self.d];
        self.values.iter().filter(|&&x| !std::mem::replace(&mut seen[x], true)).count()
    }

    /// True when some injective map sends each `a_i` to `s_i`.
    pub fn consistent_with(&self, s: &[usize]) -> bool {
        let mut fwd = vec![usize::MAX; self.d];
        let mut back = vec![usize::MAX; self.d];
        for (&a, &b) in self.values.iter().zip(s) {
            if fwd[a] == usize::MAX && back[b] == usize::MAX {
                fwd[a] = b;
                back[b] = a;
            } else if fwd[a] != b || back[b] != a {
                return false;
            }
        }
        true
    }

    /// Every assignment of length `n` over `d` symbols, in base-`d` counting order.
    pub fn all(d: usize, n: usize) -> Vec<ClassicalAssignment> {
        let total = d.pow(n as u32);
        (0..total)
            .map(|mut x| {
                let mut values = vec![0; n];
                for f in (0..n).rev() {
                    values[f] = x % d;
                    x /= d;
                }
                ClassicalAssignment { values, d }
            })
            .collect()
    }
}

/// Largest `d^N` enumerated by [`classical_consistency_oracle`].
pub const ORACLE_MAX_STRINGS: usize = 1 << 20;

/// Exact two-sided error of the consistency rule, by brute force.
///
/// The cause side shows `π(a)`; the other side shows a uniformly random
/// string. The guess is the unique consistent side, or a fair coin when both
/// are consistent. The error is maximised over all `d!` relabellings `π`.
pub fn classical_consistency_oracle(
    d: usize,
    n: usize,
    assignment: &ClassicalAssignment,
) -> Result<BigRational> {
    if assignment.values.len() != n || assignment.d != d {
        return Err(mismatch(format!("assignment of length {n} over {d}"), assignment.values.len()));
    }
    let total = d
        .checked_pow(n as u32)
        .filter(|&t| t <= ORACLE_MAX_STRINGS)
        .ok_or_else(|| guardrail("oracle noise strings", format!("{d}^{n}"), ORACLE_MAX_STRINGS))?;
    if d > 8 {
        return Err(guardrail("oracle relabellings", format!("{d}!"), "8!"));
    }
    let strings = ClassicalAssignment::all(d, n);
    let mut worst = BigRational::zero();
    let mut perm: Vec<usize> = (0..d).collect();
    let mut perms = Vec::new();
    permutations(&mut perm, 0, &mut perms);
    for pi in &perms {
        let cause: Vec<usize> = assignment.values.iter().map(|&a| pi[a]).collect();
        let cause_ok = assignment.consistent_with(&cause);
        let mut half_errors = 0u64;
        for s in &strings {
            let noise_ok = assignment.consistent_with(&s.values);
            half_errors += match (cause_ok, noise_ok) {
                (true, true) => 1,
                (true, false) => 0,
                (false, true) => 2,
                (false, false) => 1,
            };
        }
        let err = BigRational::new(BigInt::from(half_errors), BigInt::from(2 * total as u64));
        if err > worst {
            worst = err;
        }
    }
    Ok(worst)
}

fn permutations(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, out);
        p.swap(k, i);
    }
}

const MC_CHUNK: u64 = 16_384;

/// Empirical error of the consistency rule with the constant input, a random
/// cause among `k` sides and uniform noise elsewhere.
///
/// Trials run in fixed chunks with per-chunk generators, so the result depends
/// only on `(d, N, k, trials, seed)`.
pub fn classical_monte_carlo(d: usize, n: usize, k: usize, trials: u64, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    if d < 2 || n == 0 || k < 2 {
        return Err(invalid("need d ≥ 2, N ≥ 1, k ≥ 2"));
    }
    let chunks = trials.div_ceil(MC_CHUNK);
    let errors: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = task_rng(seed, c);
            let count = MC_CHUNK.min(trials - c * MC_CHUNK);
            let mut errs = 0u64;
            let mut consistent = Vec::with_capacity(k);
            for _ in 0..count {
                let cause = rng.gen_range(0..k);
                consistent.clear();
                for side in 0..k {
                    // Constant input: a side is consistent iff its string is
                    // constant, which the relabelled cause output always is.
                    let ok = side == cause || {
                        let first = rng.gen_range(0..d);
                        (1..n).all(|_| rng.gen_range(0..d) == first)
                    };
                    if ok {
                        consistent.push(side);
                    }
                }
                let guess = consistent[rng.gen_range(0..consistent.len())];
                if guess != cause {
                    errs += 1;
                }
            }
            errs
        })
        .sum();
    Ok(errors as f64 / trials as f64)
}

/// Success of the reference-free `k`-hypothesis strategy supported on sector `λ₀`:
/// `d^N/(k d_λ) · [1 − (1 − p_λ/m_λ)^k]`.
pub fn quantum_k_no_ref_success(d: usize, n: usize, k: usize, lambda: &YoungDiagram) -> Result<BigRational> {
    if lambda.box_count() != n {
        return Err(invalid(format!("diagram {lambda} does not have {n} boxes")));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let rec = schur_weyl_record(lambda, d)?;
    let dn = BigUint::from(d).pow(n as u32);
    let x = rational(&rec.rep_dim, &dn);
    let one = BigRational::one();
    let inner = &one - num_traits::pow(&one - &x, k);
    let pref = rational(&dn, &(&rec.rep_dim * BigUint::from(k)));
    Ok(pref * inner)
}

/// Binary error with a reference of effective rank `r` on sector `λ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperposedError {
    /// `d_λ/(2d^N) · r(1 − √(1 − r^{−2}))`.
    pub p_err: f64,
    /// Large-`r` form `d_λ/(4 r d^N)`.
    pub asymptotic: f64,
}

pub fn superposed_error_formula(d: usize, n: usize, r: f64, rep_dim: f64) -> Result<SuperposedError> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(invalid(format!("rank r must be at least 1, got {r}")));
    }
    if !(rep_dim >= 1.0) {
        return Err(invalid(format!("representation dimension must be at least 1, got {rep_dim}")));
    }
    let dn = (d as f64).powi(n as i32);
    // r(1 − √(1 − 1/r²)) rewritten to avoid cancellation at large r.
    let f = 1.0 / (r * (1.0 + (1.0 - 1.0 / (r * r)).sqrt()));
    Ok(SuperposedError {
        p_err: rep_dim / (2.0 * dn) * f,
        asymptotic: rep_dim / (4.0 * r * dn),
    })
}

/// Largest Gram matrix accepted by [`rank_of_configurations`].
pub const MAX_GRAM: usize = 4096;

/// Rank of the Gram matrix of the singlet-grouping vectors.
pub fn rank_of_configurations(n: usize, d: usize) -> Result<usize> {
    let vectors = configuration_vectors(n, d, MAX_GRAM)?;
    let g = vectors.len();
    let mut gram = CMatrix::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            let x = vectors[i].dotc(&vectors[j]);
            gram[(i, j)] = x;
            gram[(j, i)] = x.conj();
        }
    }
    let w = hermitian_eigenvalues(&gram)?;
    let top = w.last().copied().unwrap_or(0.0);
    Ok(w.iter().filter(|&&x| x > 1e-9 * top).count())
}

/// Success of the sequential Gram–Schmidt measurement on `l` states
/// `Φ_x ⊗ (I_m/m)^{⊗(l−1)}` (one output, `l` references of dimension `m`).
///
/// Eigenvectors of each state are orthonormalized batch by batch against all
/// earlier batches; batch `x` spans the projector for outcome `x`.
pub fn gram_schmidt_sequence_success(m: usize, l: usize) -> Result<f64> {
    if m < 2 || l == 0 {
        return Err(invalid("need m ≥ 2 and l ≥ 1"));
    }
    let dim = m
        .checked_pow((l + 1) as u32)
        .filter(|&x| x <= crate::states::MAX_DENSE_DIM)
        .ok_or_else(|| guardrail("Gram–Schmidt dimension", format!("{m}^{}", l + 1), crate::states::MAX_DENSE_DIM))?;
    let mut basis: Vec<CVector> = Vec::new();
    let mut total = 0.0;
    for x in 0..l {
        let rho = cause_probe_output(l, m, 1, x)?;
        let (w, v) = hermitian_eigen(rho.matrix())?;
        let eig: Vec<CVector> = w
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 1e-12)
            .map(|(j, _)| v.column(j).into_owned())
            .collect();
        let start = basis.len();
        for e in &eig {
            let mut u = e.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dotc(&u);
                    u -= b * c;
                }
            }
            let norm = u.norm();
            if norm > 1e-10 {
                basis.push(u.unscale(norm));
            }
        }
        let mut proj = CMatrix::zeros(dim, dim);
        for b in &basis[start..] {
            proj += b * b.adjoint();
        }
        total += (proj * rho.matrix()).trace().re;
    }
    Ok(total / l as f64)
}

/// Uniform priors of length `k`.
pub fn uniform_priors(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::linalg::{haar_ket, random_density, Ket, UnitaryMatrix, C64};
    use crate::states::{
        apply_intermediary_channel, singlet_product_probe, uniform_probe, CausalChannel,
    };

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn helstrom_trivial_cases() {
        let mut rng = task_rng(1, 0);
        let rho = random_density(vec![3], &mut rng).unwrap();
        assert!((helstrom(&rho, &rho, 0.5).unwrap().p_err - 0.5).abs() < 1e-14);
        let z = Ket::basis(vec![2], 0).unwrap().to_density();
        let o = Ket::basis(vec![2], 1).unwrap().to_density();
        let res = helstrom(&z, &o, 0.5).unwrap();
        assert!(res.p_err.abs() < 1e-14);
        assert!((res.trace_distance - 2.0).abs() < 1e-14);
        assert!((helstrom(&z, &o, 0.2).unwrap().p_err).abs() < 1e-14);
        assert!(helstrom(&z, &rho, 0.5).is_err());
    }

    #[test]
    fn helstrom_singlet_probe() {
        let probe = singlet_product_probe(2, 2).unwrap();
        let out = |slot| {
            let ch = CausalChannel::new(2, slot, UnitaryMatrix::identity(2)).unwrap();
            apply_intermediary_channel(&ch, &probe, 2).unwrap()
        };
        let res = helstrom(&out(0), &out(1), 0.5).unwrap();
        assert!((res.p_err - 0.125).abs() < 1e-12);
    }

    #[test]
    fn helstrom_coherent_probe_with_permutation() {
        let probe = uniform_probe(2, 1).unwrap();
        let x = UnitaryMatrix::permutation(&[1, 0]).unwrap();
        let out = |slot| {
            let ch = CausalChannel::new(2, slot, x.clone()).unwrap();
            apply_intermediary_channel(&ch, &probe, 2).unwrap()
        };
        let res = helstrom(&out(0), &out(1), 0.5).unwrap();
        assert!((res.p_err - 0.25).abs() < 1e-12);
    }

    #[test]
    fn pgm_orthogonal_is_perfect() {
        let states: Vec<DensityMatrix> =
            (0..3).map(|i| Ket::basis(vec![3], i).unwrap().to_density()).collect();
        let res = pgm_success(&states, &uniform_priors(3)).unwrap();
        assert!((res.p_success - 1.0).abs() < 1e-12);
        assert!(pgm_success(&[], &[]).is_err());
        assert!(pgm_success(&states, &[0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn pgm_weyl_heisenberg_orbit() {
        for d in [2usize, 3] {
            let mut rng = task_rng(2, d as u64);
            let psi = haar_ket(vec![d], &mut rng).unwrap();
            let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
            let mut states = Vec::new();
            for a in 0..d {
                for b in 0..d {
                    let v = CVector::from_fn(d, |i, _| {
                        let src = (i + d - a) % d;
                        psi.amplitudes()[src] * omega.powu((b * src) as u32)
                    });
                    states.push(Ket::new(v, vec![d]).unwrap().to_density());
                }
            }
            let res = pgm_success(&states, &uniform_priors(d * d)).unwrap();
            assert!((res.p_success - 1.0 / d as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn pgm_beats_random_guess_on_cause_states() {
        // Checked value: the square-root measurement does at least as well as
        // the port-based expression d²/(k−1+d²) on these states.
        let d = 2;
        for k in [2usize, 4, 6] {
            let states: Vec<DensityMatrix> =
                (0..k).map(|x| cause_probe_output(k, d, 1, x).unwrap()).collect();
            let res = pgm_success(&states, &uniform_priors(k)).unwrap();
            let port = (d * d) as f64 / (k - 1 + d * d) as f64;
            assert!(res.p_success >= port - 1e-9, "k={k}: {}", res.p_success);
            assert!(res.p_success >= 1.0 / k as f64);
        }
    }

    #[test]
    fn cause_states_helstrom_matches_certificate_bound() {
        let a = cause_probe_output(2, 2, 1, 0).unwrap();
        let b = cause_probe_output(2, 2, 1, 1).unwrap();
        let p = helstrom(&a, &b, 0.5).unwrap().p_err;
        let bound = (1.0 - (1.0 - 1.0 / 4.0f64).sqrt()) / 2.0;
        assert!((p - bound).abs() < 1e-10, "{p}");
    }

    #[test]
    fn complementarity_examples() {
        for (d, n) in [(2usize, 1usize), (2, 3), (3, 2)] {
            let dn = (d as f64).powi(n as i32);
            let b = complementarity_bound(&ComplementarityInput::new(1.0, d, n, 10).unwrap());
            assert!((b.p_err_lower - 1.0 / (2.0 * dn)).abs() < 1e-15);
            assert!((b.p_guess_upper - 0.1).abs() < 1e-15);
        }
        let mut last = 0.0;
        for i in 0..20 {
            let t = 1.0 + i as f64 * (8f64.sqrt() - 1.0) / 19.0;
            let b = complementarity_bound(&ComplementarityInput::new(t, 2, 3, 5).unwrap());
            if i > 0 {
                assert!(b.p_err_lower > last);
            }
            last = b.p_err_lower;
        }
        assert!(ComplementarityInput::new(0.5, 2, 1, 1).is_err());
        assert!(ComplementarityInput::new(3.0, 2, 1, 1).is_err());
    }

    #[test]
    fn classical_exact_examples() {
        for (d, n) in [(2usize, 3usize), (3, 4), (5, 2)] {
            let want = r(1, 2 * (d as i64).pow(n as u32 - 1));
            assert_eq!(classical_error_exact(d, n, 2, 1).unwrap(), want);
        }
        assert_eq!(classical_error_exact(2, 20, 2, 1).unwrap(), r(1, 1 << 20));
        assert_eq!(classical_error_exact(2, 5, 3, 1).unwrap(), r(47, 768));
        assert!(classical_error_exact(2, 5, 3, 3).is_err());
        assert!(classical_error_exact(2, 5, 1, 1).is_err());
    }

    #[test]
    fn classical_leading_term() {
        // Leading term (k−1)P(d,v)/(2d^N); the remainder is O(q²).
        let (d, n, k) = (3usize, 8usize, 4usize);
        let exact = classical_error_exact(d, n, k, 1).unwrap();
        let q = r(3, 3i64.pow(8));
        let lead = q.clone() * r((k - 1) as i64, 2);
        let gap = (exact - lead.clone()).abs();
        assert!(gap <= q.clone() * q * r(10, 1));
    }

    #[test]
    fn oracle_examples() {
        let a = ClassicalAssignment::new(vec![0, 0, 0], 2).unwrap();
        assert_eq!(classical_consistency_oracle(2, 3, &a).unwrap(), r(1, 8));
        let b = ClassicalAssignment::new(vec![0, 1], 2).unwrap();
        assert_eq!(b.distinct(), 2);
        assert_eq!(classical_consistency_oracle(2, 2, &b).unwrap(), r(1, 4));
        assert!(ClassicalAssignment::new(vec![2], 2).is_err());
        assert!(classical_consistency_oracle(2, 3, &b).is_err());
    }

    #[test]
    fn oracle_agrees_with_formula() {
        for d in 2..4 {
            for n in 1..5 {
                for a in ClassicalAssignment::all(d, n) {
                    let v = a.distinct();
                    let oracle = classical_consistency_oracle(d, n, &a).unwrap();
                    assert_eq!(oracle, classical_error_exact(d, n, 2, v).unwrap(), "{a:?}");
                }
            }
        }
    }

    #[test]
    fn monte_carlo_contract() {
        assert!(classical_monte_carlo(2, 5, 3, 0, 1).is_err());
        let a = classical_monte_carlo(2, 5, 3, 50_000, 9).unwrap();
        let b = classical_monte_carlo(2, 5, 3, 50_000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn monte_carlo_binary() {
        let trials = 400_000u64;
        let p = 1.0 / 1024.0;
        let est = classical_monte_carlo(2, 10, 2, trials, 5).unwrap();
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((est - p).abs() < 4.0 * sigma, "{est}");
    }

    #[test]
    fn quantum_k_examples() {
        for (d, n) in [(2usize, 2usize), (2, 4), (3, 3)] {
            let rect = YoungDiagram::balanced(n, d).unwrap();
            assert_eq!(quantum_k_no_ref_success(d, n, 1, &rect).unwrap(), BigRational::one());
            let p = quantum_k_no_ref_success(d, n, 2, &rect).unwrap();
            let dn = (d as i64).pow(n as u32);
            assert_eq!(BigRational::one() - p, r(1, 2 * dn));
        }
        let rect = YoungDiagram::balanced(6, 2).unwrap();
        let err = BigRational::one() - quantum_k_no_ref_success(2, 6, 3, &rect).unwrap();
        let lead = r(2, 128);
        let rel = ((err - lead.clone()) / lead).abs();
        assert!(rel <= r(2, 64));
        let bad = YoungDiagram::new(vec![1, 1, 1]).unwrap();
        assert!(quantum_k_no_ref_success(2, 3, 2, &bad).is_err());
    }

    #[test]
    fn superposed_formula_examples() {
        let e = superposed_error_formula(2, 3, 1.0, 1.0).unwrap();
        assert!((e.p_err - 1.0 / 16.0).abs() < 1e-16);
        let e = superposed_error_formula(2, 4, 2.0, 1.0).unwrap();
        assert!((e.p_err - (1.0 - 3f64.sqrt() / 2.0) / 16.0).abs() < 1e-15);
        let e = superposed_error_formula(2, 12, 132.0, 1.0).unwrap();
        assert!((e.p_err - 4.6239e-7).abs() < 1e-10 && e.p_err < 1e-6);
        assert!(superposed_error_formula(2, 4, 0.0, 1.0).is_err());
    }

    #[test]
    fn configuration_ranks() {
        assert_eq!(rank_of_configurations(4, 2).unwrap(), 2);
        assert_eq!(rank_of_configurations(6, 2).unwrap(), 5);
        assert_eq!(rank_of_configurations(8, 2).unwrap(), 14);
        assert_eq!(rank_of_configurations(6, 3).unwrap(), 5);
    }

    #[test]
    fn gram_schmidt_examples() {
        assert!((gram_schmidt_sequence_success(4, 1).unwrap() - 1.0).abs() < 1e-12);
        let m = 4.0f64;
        let two = gram_schmidt_sequence_success(4, 2).unwrap();
        assert!(two >= 1.0 - 1.0 / (2.0 * m * m) - 5.0 / (m * m * m));
        let three = gram_schmidt_sequence_success(4, 3).unwrap();
        assert!(three >= 1.0 - 2.0 / (2.0 * m * m) - 5.0 / (m * m * m));
        assert!(gram_schmidt_sequence_success(8, 4).is_err());
    }
}
