//! Young diagrams, Schur–Weyl dimension data and grouping catalogs.
//!
//! Everything here is exact: big integers and rationals, with floats only in
//! the asymptotic (log-domain) helpers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{guardrail, invalid, Result};

/// Largest box count accepted by [`enumerate_diagrams`].
pub const MAX_DIAGRAM_BOXES: usize = 200;
/// Largest number of diagrams [`enumerate_diagrams`] will materialize.
pub const MAX_DIAGRAM_COUNT: usize = 1_000_000;
/// Largest grouping count that [`groupings`] lists explicitly.
pub const MAX_EXPLICIT_GROUPINGS: u64 = 1_000_000;
/// [`extremal_diagrams`] confirms its answer by exhaustive scan below this many diagrams.
pub const EXTREMAL_SCAN_CAP: usize = 50_000;

/// A partition of `box_count` into non-increasing positive rows.
///
/// Trailing zero rows are dropped on construction, so `(2,2,0)` and `(2,2)`
/// are the same diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct YoungDiagram {
    rows: Vec<usize>,
    box_count: usize,
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid(format!("rows {rows:?} are not non-increasing")));
        }
        let mut rows = rows;
        while rows.last() == Some(&0) {
            rows.pop();
        }
        let box_count = rows.iter().sum();
        Ok(Self { rows, box_count })
    }

    /// The `d`-row diagram of `n` boxes whose rows differ by at most one:
    /// `n mod d` rows of length `⌈n/d⌉` followed by rows of length `⌊n/d⌋`.
    /// For `d | n` this is the rectangular diagram.
    pub fn balanced(n: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(invalid("d must be at least 1"));
        }
        let (q, t) = n.div_rem(&d);
        let mut rows = vec![q + 1; t];
        rows.extend(std::iter::repeat_n(q, d - t));
        Self::new(rows)
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn box_count(&self) -> usize {
        self.box_count
    }

    /// Number of non-empty rows.
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Hook lengths in row-major order.
    pub fn hooks(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.box_count);
        for (i, &len) in self.rows.iter().enumerate() {
            for j in 0..len {
                let arm = len - j - 1;
                let leg = self.rows[i + 1..].iter().take_while(|&&r| r > j).count();
                out.push(arm + leg + 1);
            }
        }
        out
    }

    pub fn hook_product(&self) -> BigUint {
        self.hooks().into_iter().map(BigUint::from).product()
    }

    /// Dimension of the symmetric-group irrep, `N!/∏hook`.
    pub fn multiplicity(&self) -> BigUint {
        factorial(self.box_count) / self.hook_product()
    }

    /// `∏(d − i + j)` over boxes, 1-based `(i, j)`. Zero when the diagram has more than `d` rows.
    fn content_product(&self, d: usize) -> BigUint {
        let mut acc = BigUint::one();
        for (i, &len) in self.rows.iter().enumerate() {
            for j in 0..len {
                // d - (i+1) + (j+1)
                match (d + j).checked_sub(i) {
                    Some(0) | None => return BigUint::zero(),
                    Some(c) => acc *= BigUint::from(c),
                }
            }
        }
        acc
    }

    /// Dimension of the `U(d)` irrep labelled by this diagram.
    pub fn rep_dim(&self, d: usize) -> BigUint {
        self.content_product(d) / self.hook_product()
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// Natural log of a big integer, accurate to double precision.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// All partitions of `n` into at most `d` parts, in descending lexicographic order.
///
/// `n = 0` yields the single empty diagram.
pub fn enumerate_diagrams(n: usize, d: usize) -> Result<Vec<YoungDiagram>> {
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    if n > MAX_DIAGRAM_BOXES {
        return Err(guardrail("diagram enumeration box count", n, MAX_DIAGRAM_BOXES));
    }
    let mut out = Vec::new();
    let mut rows = Vec::with_capacity(d);
    fill_rows(n, n, d, &mut rows, &mut out)?;
    Ok(out)
}

fn fill_rows(
    remaining: usize,
    max_part: usize,
    parts_left: usize,
    rows: &mut Vec<usize>,
    out: &mut Vec<YoungDiagram>,
) -> Result<()> {
    if remaining == 0 {
        if out.len() >= MAX_DIAGRAM_COUNT {
            return Err(guardrail("diagram enumeration count", "more", MAX_DIAGRAM_COUNT));
        }
        out.push(YoungDiagram {
            rows: rows.clone(),
            box_count: rows.iter().sum(),
        });
        return Ok(());
    }
    if parts_left == 0 {
        return Ok(());
    }
    let lo = remaining.div_ceil(parts_left);
    let hi = max_part.min(remaining);
    for part in (lo..=hi).rev() {
        rows.push(part);
        fill_rows(remaining - part, part, parts_left - 1, rows, out)?;
        rows.pop();
    }
    Ok(())
}

/// Exact Schur–Weyl data of one diagram for `U(d)^{⊗N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchurWeylRecord {
    pub diagram: YoungDiagram,
    pub d: usize,
    pub hook_product: BigUint,
    /// `d_λ`, dimension of the unitary-group irrep.
    pub rep_dim: BigUint,
    /// `m_λ`, dimension of the permutation-group irrep.
    pub multiplicity: BigUint,
    /// `p_λ = d_λ m_λ / d^N`.
    pub measure: BigRational,
}

impl SchurWeylRecord {
    /// `d_λ / m_λ` as an exact rational.
    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.rep_dim.clone().into(), self.multiplicity.clone().into())
    }
}

pub fn schur_weyl_record(diagram: &YoungDiagram, d: usize) -> Result<SchurWeylRecord> {
    if d == 0 || diagram.num_rows() > d {
        return Err(invalid(format!(
            "diagram {diagram} has {} rows, at most d = {d} allowed",
            diagram.num_rows()
        )));
    }
    let n = diagram.box_count();
    let hook_product = diagram.hook_product();
    let rep_dim = diagram.content_product(d) / &hook_product;
    let multiplicity = factorial(n) / &hook_product;
    let measure = BigRational::new(
        (&rep_dim * &multiplicity).into(),
        BigUint::from(d).pow(n as u32).into(),
    );
    Ok(SchurWeylRecord {
        diagram: diagram.clone(),
        d,
        hook_product,
        rep_dim,
        multiplicity,
        measure,
    })
}

/// Dominance order: every partial row sum of `lambda` is at least that of `mu`.
pub fn majorizes(lambda: &YoungDiagram, mu: &YoungDiagram) -> Result<bool> {
    if lambda.box_count() != mu.box_count() {
        return Err(invalid(format!(
            "box counts differ: {} vs {}",
            lambda.box_count(),
            mu.box_count()
        )));
    }
    let depth = lambda.num_rows().max(mu.num_rows());
    let (mut sl, mut sm) = (0usize, 0usize);
    for s in 0..depth {
        sl += lambda.rows().get(s).copied().unwrap_or(0);
        sm += mu.rows().get(s).copied().unwrap_or(0);
        if sl < sm {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimiser and maximiser of `d_λ/m_λ` over `Y_{N,d}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalDiagrams {
    pub min_ratio: YoungDiagram,
    pub max_ratio: YoungDiagram,
    /// True when an exhaustive scan over `Y_{N,d}` confirmed both extrema.
    pub scanned: bool,
}

pub fn extremal_diagrams(n: usize, d: usize) -> Result<ExtremalDiagrams> {
    if n == 0 || d == 0 {
        return Err(invalid("extremal diagrams need N ≥ 1 and d ≥ 1"));
    }
    let min_ratio = YoungDiagram::balanced(n, d)?;
    let max_ratio = YoungDiagram::new(vec![n])?;
    let mut scanned = false;
    if n <= MAX_DIAGRAM_BOXES {
        if let Ok(all) = enumerate_diagrams(n, d) {
            if all.len() <= EXTREMAL_SCAN_CAP {
                // All ratios share the N! denominator, so the content products order them.
                let lo = min_ratio.content_product(d);
                let hi = max_ratio.content_product(d);
                for lam in &all {
                    let c = lam.content_product(d);
                    if c < lo || c > hi {
                        return Err(crate::Error::Numerical(format!(
                            "diagram {lam} escapes the predicted extrema at N={n}, d={d}"
                        )));
                    }
                }
                scanned = true;
            }
        }
    }
    Ok(ExtremalDiagrams {
        min_ratio,
        max_ratio,
        scanned,
    })
}

/// Closed-form number of ways to split `n` labelled items into unordered blocks of size `d`.
pub fn grouping_count(n: usize, d: usize) -> Result<BigUint> {
    if d == 0 || !n.is_multiple_of(d) {
        return Err(invalid(format!("block size d = {d} must divide N = {n}")));
    }
    let blocks = n / d;
    Ok(factorial(n) / (factorial(d).pow(blocks as u32) * factorial(blocks)))
}

/// One configuration: `N/d` blocks, each sorted, blocks ordered by their smallest element.
pub type Grouping = Vec<Vec<usize>>;

/// Every grouping of `{0, …, N−1}` into blocks of size `d`.
///
/// Items are 0-based. Configurations are listed in lexicographic order of
/// their canonical form, which is the reference-basis order used by
/// [`crate::states::superposed_config_state`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupingCatalog {
    pub n: usize,
    pub d: usize,
    pub count: BigUint,
    /// `None` when the count exceeds [`MAX_EXPLICIT_GROUPINGS`] (count-only mode).
    pub configurations: Option<Vec<Grouping>>,
}

impl GroupingCatalog {
    pub fn is_count_only(&self) -> bool {
        self.configurations.is_none()
    }
}

pub fn groupings(n: usize, d: usize) -> Result<GroupingCatalog> {
    let count = grouping_count(n, d)?;
    let configurations = if count <= BigUint::from(MAX_EXPLICIT_GROUPINGS) {
        let mut out = Vec::new();
        let mut used = vec![false; n];
        let mut current = Vec::with_capacity(n / d.max(1));
        build_groupings(d, &mut used, &mut current, &mut out);
        Some(out)
    } else {
        None
    };
    Ok(GroupingCatalog {
        n,
        d,
        count,
        configurations,
    })
}

fn build_groupings(d: usize, used: &mut [bool], current: &mut Grouping, out: &mut Vec<Grouping>) {
    let Some(first) = used.iter().position(|u| !u) else {
        out.push(current.clone());
        return;
    };
    used[first] = true;
    let rest: Vec<usize> = (first + 1..used.len()).filter(|&i| !used[i]).collect();
    let mut pick = Vec::with_capacity(d);
    choose_block(d - 1, &rest, 0, &mut pick, &mut |companions| {
        let mut block = Vec::with_capacity(d);
        block.push(first);
        block.extend_from_slice(companions);
        for &c in companions {
            used[c] = true;
        }
        current.push(block);
        build_groupings(d, used, current, out);
        current.pop();
        for &c in companions {
            used[c] = false;
        }
    });
    used[first] = false;
}

fn choose_block(
    need: usize,
    pool: &[usize],
    start: usize,
    pick: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if need == 0 {
        visit(pick);
        return;
    }
    for i in start..pool.len() {
        if pool.len() - i < need {
            break;
        }
        pick.push(pool[i]);
        choose_block(need - 1, pool, i + 1, pick, visit);
        pick.pop();
    }
}

/// Natural log of the large-`N` form of `m_λ` for the rectangular diagram.
pub fn ln_asymptotic_multiplicity(n: usize, d: usize) -> Result<f64> {
    if d == 0 || n == 0 || !n.is_multiple_of(d) {
        return Err(invalid(format!("need N ≥ 1 with d | N, got N = {n}, d = {d}")));
    }
    let (nf, df) = (n as f64, d as f64);
    let ln_fact = |m: usize| (1..=m).map(|i| (i as f64).ln()).sum::<f64>();
    let prod: f64 = (1..=d).map(|i| ln_fact(d - i)).sum();
    Ok(nf * df.ln() + 0.5 * df * df * df.ln() + prod
        - 0.5 * (df - 1.0) * (2.0 * std::f64::consts::PI).ln()
        - 0.5 * (df * df - 1.0) * nf.ln())
}

/// Large-`N` approximation of the rectangular-diagram multiplicity.
///
/// Evaluated in the log domain; overflows to `+∞` only when the value itself
/// exceeds the double range.
pub fn asymptotic_multiplicity(n: usize, d: usize) -> Result<f64> {
    Ok(ln_asymptotic_multiplicity(n, d)?.exp())
}

/// `m_exact / asymptotic` for the rectangular diagram, computed from logs.
pub fn multiplicity_ratio(n: usize, d: usize) -> Result<f64> {
    let ln_asym = ln_asymptotic_multiplicity(n, d)?;
    let exact = YoungDiagram::balanced(n, d)?.multiplicity();
    Ok((ln_big(&exact) - ln_asym).exp())
}

/// Query budget for identifying one cause among `k` candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct CausePlan {
    pub k: u64,
    pub n: usize,
    pub error_bound: f64,
    pub slack: f64,
}

/// Smallest `N` with `Σ_{λ∈Y_{N,d}} m_λ ≥ k`: enough orthogonal multiplicity
/// vectors to tell all `k` candidates apart without error.
pub fn cause_exact_plan(k: u64, d: usize) -> Result<CausePlan> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if d < 2 {
        return Err(invalid("d must be at least 2"));
    }
    let target = BigUint::from(k);
    for n in 1..=MAX_DIAGRAM_BOXES {
        let total: BigUint = enumerate_diagrams(n, d)?.iter().map(|l| l.multiplicity()).sum();
        if total >= target {
            return Ok(CausePlan {
                k,
                n,
                error_bound: 0.0,
                slack: 0.0,
            });
        }
    }
    Err(guardrail("exact cause plan", format!("N > {MAX_DIAGRAM_BOXES}"), MAX_DIAGRAM_BOXES))
}

/// `N = ⌈(1+ε) log_d(k) / 2⌉` with error bound `(k−1)/m_{λ₀}²`.
///
/// `λ₀` is the balanced diagram (rectangular when `d | N`), and the bound is
/// clamped to 1. A ceiling argument within 1e−9 of an integer snaps to it so
/// that `k = d^{2N₀}` gives exactly `N₀`.
pub fn cause_approx_plan(k: u64, d: usize, eps: f64) -> Result<CausePlan> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if d < 2 {
        return Err(invalid("d must be at least 2"));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(invalid(format!("slack must be finite and non-negative, got {eps}")));
    }
    let x = (1.0 + eps) * (k as f64).ln() / (d as f64).ln() / 2.0;
    let snapped = if (x - x.round()).abs() < 1e-9 { x.round() } else { x.ceil() };
    let n = (snapped as usize).max(1);
    let m = YoungDiagram::balanced(n, d)?.multiplicity();
    let m = m.to_f64().unwrap_or(f64::INFINITY);
    let error_bound = ((k - 1) as f64 / (m * m)).min(1.0);
    Ok(CausePlan {
        k,
        n,
        error_bound,
        slack: eps,
    })
}

/// Orders diagrams by `d_λ/m_λ` (exact).
pub fn compare_ratio(a: &SchurWeylRecord, b: &SchurWeylRecord) -> Ordering {
    a.ratio().cmp(&b.ratio())
}
