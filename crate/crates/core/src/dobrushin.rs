//! Dobrushin interaction matrices and the error bounds built on them.
//!
//! For a binary node the total-variation distance between two conditionals is
//! the gap between their probabilities of `+1`. With that convention:
//!
//! - `C_ij` is the largest change of node `i`'s conditional when only `x_j`
//!   flips. For an Ising model it equals `f(M*, J_ij)` where
//!   `f(M, J) = |1/(e^{M+2J}+1) − 1/(e^{M−2J}+1)|` and `M*` is the achievable
//!   local field `2(h_i + Σ_{l≠j} J_il x_l)` nearest zero.
//! - `b_j` is the largest gap between node `j`'s conditionals under the
//!   localized model and the original model.
//! - With `D = (I − C)^{-1}` on the region block, the query's marginal error is
//!   at most `Σ_{j∈∂α} D_qj b_j`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BoundaryMethod, IsingModel, LocalizedModel, Region};

/// Default limit on the number of variables whose signs are enumerated.
pub const DEFAULT_ENUMERATION_CAP: usize = 25;

const POWER_ITERATIONS: usize = 200;
const POWER_TOL: f64 = 1e-10;
const NEGATIVITY_TOL: f64 = 1e-12;
const INVERSE_TOL: f64 = 1e-8;

/// `f(M, J)`: the conditional gap of a node with local field `M` when a
/// neighbor with coupling `J` flips.
pub fn flip_gap(m: f64, j: f64) -> f64 {
    let j = j.abs();
    if 2.0 * j < 300.0 && m.abs() < 700.0 {
        // σ(a) − σ(b) = sinh((a−b)/2) / (2 cosh(a/2) cosh(b/2)), with a, b = −M ± 2J.
        (2.0 * j).sinh() / (m.cosh() + (2.0 * j).cosh())
    } else {
        (logistic(-m + 2.0 * j) - logistic(-m - 2.0 * j)).abs()
    }
}

pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Smallest `|base + 2 Σ_l w_l x_l|` over `x ∈ {-1, +1}^k`, by Gray-code enumeration.
fn min_abs_signed_sum(base: f64, weights: &[f64]) -> f64 {
    let mut sum = base - 2.0 * weights.iter().sum::<f64>();
    let mut signs = vec![false; weights.len()];
    let mut best = sum.abs();
    for step in 1u64..(1u64 << weights.len()) {
        let bit = step.trailing_zeros() as usize;
        signs[bit] = !signs[bit];
        sum += if signs[bit] { 4.0 } else { -4.0 } * weights[bit];
        best = best.min(sum.abs());
        if best == 0.0 {
            break;
        }
    }
    best
}

/// Dobrushin interaction entry `C_ij`: row `i` is the conditioned node, column
/// `j` the flipped one.
pub fn c_entry(model: &IsingModel, i: usize, j: usize, cap: usize) -> Result<f64> {
    model.check_node(i)?;
    model.check_node(j)?;
    if i == j {
        return Err(Error::InvalidParameter(format!("C_ii is not defined (i = j = {i})")));
    }
    let Some(coupling) = model.coupling(i, j) else {
        return Ok(0.0);
    };
    let others: Vec<f64> = model.neighbors(i).iter().filter(|&&(k, _)| k != j).map(|&(_, w)| w).collect();
    if others.len() > cap {
        return Err(Error::EnumerationCap { node: i, count: others.len(), cap });
    }
    let m_star = min_abs_signed_sum(2.0 * model.field(i), &others);
    Ok(flip_gap(m_star, coupling))
}

/// Dense `C` over all nodes of `model` (intended for small local models).
pub fn c_matrix(model: &IsingModel, cap: usize) -> Result<DMatrix<f64>> {
    let n = model.n();
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        for &(j, _) in model.neighbors(i) {
            c[(i, j)] = c_entry(model, i, j, cap)?;
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DobrushinCoefficient {
    /// `c = max_i Σ_j C_ij`.
    pub c: f64,
    /// Lowest-id node attaining the maximum row sum.
    pub argmax: usize,
}

pub fn dobrushin_coefficient(model: &IsingModel, cap: usize) -> Result<DobrushinCoefficient> {
    let mut best = DobrushinCoefficient { c: 0.0, argmax: 0 };
    for i in 0..model.n() {
        let mut row = 0.0;
        for &(j, _) in model.neighbors(i) {
            row += c_entry(model, i, j, cap)?;
        }
        if row > best.c {
            best = DobrushinCoefficient { c: row, argmax: i };
        }
    }
    Ok(best)
}

/// Perturbation coefficients `b_j`, aligned with `region.alpha()`.
///
/// Interior nodes have identical conditionals in both models and get 0. For a
/// boundary node the localized conditional is `σ(2(h̃_j + A))` and the original
/// one `σ(2(h_j + A + B))`, where `A` sums over neighbors inside the region and
/// `B` over the cut. The gap is monotone in `B`, so only the extreme values
/// `B = ±Σ|J_cut|` need to be paired with each sign pattern of `A`.
pub fn b_vector(model: &IsingModel, localized: &LocalizedModel, region: &Region, cap: usize) -> Result<Vec<f64>> {
    let mut b = vec![0.0; region.len()];
    for &j in region.boundary_alpha() {
        if model.degree(j) > cap {
            return Err(Error::EnumerationCap { node: j, count: model.degree(j), cap });
        }
        let p = region.position(j).expect("boundary node lies in the region");
        let h_loc = localized.h_tilde()[p];
        let h = model.field(j);
        let mut inside = Vec::new();
        let mut cut = 0.0;
        for &(k, w) in model.neighbors(j) {
            if region.contains(k) {
                inside.push(w);
            } else {
                cut += w.abs();
            }
        }
        let mut gap: f64 = 0.0;
        let mut a = -inside.iter().sum::<f64>();
        let mut signs = vec![false; inside.len()];
        for step in 0u64..(1u64 << inside.len()) {
            if step > 0 {
                let bit = step.trailing_zeros() as usize;
                signs[bit] = !signs[bit];
                a += if signs[bit] { 2.0 } else { -2.0 } * inside[bit];
            }
            let mu = logistic(2.0 * (h_loc + a));
            for s in [-cut, cut] {
                gap = gap.max((mu - logistic(2.0 * (h + a + s))).abs());
            }
        }
        b[p] = gap;
    }
    Ok(b)
}

/// Result of inverting `I − C` for a region block.
#[derive(Debug, Clone, PartialEq)]
pub struct DBlock {
    /// `(I − C)^{-1}`, absent when `I − C` is singular.
    pub d: Option<DMatrix<f64>>,
    /// Power-iteration (Collatz–Wielandt) upper estimate of the spectral radius of `C`.
    pub spectral_radius: f64,
    /// The Neumann series converges and `D` passed its checks.
    pub valid: bool,
}

/// Upper estimate of the spectral radius of a nonnegative matrix.
///
/// Iterates `x ← (I + C)x` from the all-ones vector and tracks the
/// Collatz–Wielandt ratios `max_i (Cx)_i / x_i` (an upper bound for every
/// positive `x`) and `min_i (Cx)_i / x_i` (a lower bound). The shift by `I`
/// keeps the iteration from oscillating on bipartite structure.
pub fn spectral_radius_upper(c: &DMatrix<f64>) -> f64 {
    let n = c.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut x = nalgebra::DVector::from_element(n, 1.0);
    let mut upper = f64::INFINITY;
    for _ in 0..POWER_ITERATIONS {
        let cx = c * &x;
        let mut hi: f64 = 0.0;
        let mut lo = f64::INFINITY;
        for i in 0..n {
            let r = cx[i] / x[i];
            hi = hi.max(r);
            lo = lo.min(r);
        }
        upper = upper.min(hi);
        if upper - lo <= POWER_TOL {
            break;
        }
        x += cx;
        let scale = x.max();
        if !(scale > 0.0) || !scale.is_finite() {
            break;
        }
        x /= scale;
    }
    upper
}

/// The matrix and its inverse from the previous (one node smaller) region.
#[derive(Debug, Clone, Copy)]
pub struct PreviousBlock<'a> {
    pub c: &'a DMatrix<f64>,
    pub d: &'a DMatrix<f64>,
}

/// `D = (I − C)^{-1}` with validity checks.
///
/// With `prev`, the new node must be the last index and the inverse is
/// updated from the previous one: a Woodbury correction for the rows of the
/// old block that changed, then the bordered block-inverse identity for the
/// new row and column. Falls back to a direct solve if either pivot is
/// singular.
pub fn d_matrix(c: &DMatrix<f64>, prev: Option<PreviousBlock<'_>>) -> Result<DBlock> {
    let n = c.nrows();
    if c.ncols() != n {
        return Err(Error::InvalidParameter(format!("C block must be square, got {}×{}", n, c.ncols())));
    }
    if c.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter("C block must be finite and nonnegative".into()));
    }
    let a = DMatrix::identity(n, n) - c;
    let d = match prev {
        Some(p) => {
            if p.c.nrows() + 1 != n || p.d.nrows() + 1 != n {
                return Err(Error::InvalidParameter("previous block must be exactly one node smaller".into()));
            }
            bordered_inverse(&a, c, p).or_else(|| a.clone().try_inverse())
        }
        None => a.clone().try_inverse(),
    };
    let spectral_radius = spectral_radius_upper(c);
    let valid = match &d {
        Some(d) => {
            let residual = (d * &a - DMatrix::identity(n, n)).abs().max();
            spectral_radius < 1.0 && d.iter().all(|&v| v >= -NEGATIVITY_TOL) && residual <= INVERSE_TOL
        }
        None => false,
    };
    Ok(DBlock { d, spectral_radius, valid })
}

fn bordered_inverse(a: &DMatrix<f64>, c: &DMatrix<f64>, prev: PreviousBlock<'_>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let m = n - 1;
    let p = prev.d;
    // Old block of the new matrix = (I − C_prev) + Δ, with Δ nonzero on a few rows.
    let delta = prev.c - c.view((0, 0), (m, m));
    let rows: Vec<usize> = (0..m).filter(|&r| delta.row(r).iter().any(|&v| v != 0.0)).collect();
    let a22_inv = if rows.is_empty() {
        p.clone()
    } else {
        let k = rows.len();
        let p_cols = DMatrix::from_fn(m, k, |i, t| p[(i, rows[t])]);
        let delta_rows = DMatrix::from_fn(k, m, |t, j| delta[(rows[t], j)]);
        let small = DMatrix::identity(k, k) + &delta_rows * &p_cols;
        let small_inv = small.try_inverse()?;
        p - &p_cols * small_inv * (&delta_rows * p)
    };
    let a12 = a.view((0, m), (m, 1)).into_owned();
    let a21 = a.view((m, 0), (1, m)).into_owned();
    let a11 = a[(m, m)];
    let left = &a22_inv * &a12; // m×1
    let right = &a21 * &a22_inv; // 1×m
    let schur = a11 - (&a21 * &left)[(0, 0)];
    if schur.abs() < 1e-14 {
        return None;
    }
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((0, 0), (m, m)).copy_from(&(&a22_inv + &left * &right / schur));
    out.view_mut((0, m), (m, 1)).copy_from(&(-&left / schur));
    out.view_mut((m, 0), (1, m)).copy_from(&(-&right / schur));
    out[(m, m)] = 1.0 / schur;
    Some(out)
}

/// Certified bound on the query's marginal error for a localized model.
#[derive(Debug, Clone, PartialEq)]
pub struct DobrushinCertificate {
    pub alpha: Vec<usize>,
    pub query_index: usize,
    pub c_block: DMatrix<f64>,
    pub d_block: Option<DMatrix<f64>>,
    /// `b_j` aligned with `alpha`; zero off the boundary.
    pub b: Vec<f64>,
    /// `Σ_{j∈∂α} D_qj b_j`, or `+∞` when `I − C` is singular.
    pub bound: f64,
    pub valid: bool,
    /// Largest row sum of `c_block`.
    pub c_local: f64,
    pub spectral_radius: f64,
    pub method: BoundaryMethod,
    pub enumeration_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub alpha: Vec<usize>,
    pub bound: f64,
    pub valid: bool,
    pub b: Vec<f64>,
    pub c_local: f64,
    pub spectral_radius: f64,
    pub method: BoundaryMethod,
    pub enumeration_cap: usize,
}

impl DobrushinCertificate {
    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            alpha: self.alpha.clone(),
            bound: self.bound,
            valid: self.valid,
            b: self.b.clone(),
            c_local: self.c_local,
            spectral_radius: self.spectral_radius,
            method: self.method,
            enumeration_cap: self.enumeration_cap,
        }
    }

    /// The bound if the certificate is valid, otherwise `+∞`.
    pub fn usable_bound(&self) -> f64 {
        if self.valid {
            self.bound
        } else {
            f64::INFINITY
        }
    }
}

/// Builds the certificate for `localized` against the original `model`.
pub fn corollary2_bound(
    model: &IsingModel,
    region: &Region,
    localized: &LocalizedModel,
    cap: usize,
) -> Result<DobrushinCertificate> {
    certify(model, region, localized, cap, None)
}

/// Like [`corollary2_bound`], reusing `prev` (the certificate of `region`
/// minus its last node) to update `D` incrementally.
pub fn corollary2_bound_incremental(
    model: &IsingModel,
    region: &Region,
    localized: &LocalizedModel,
    cap: usize,
    prev: &DobrushinCertificate,
) -> Result<DobrushinCertificate> {
    let usable = prev.alpha.len() + 1 == region.len() && region.alpha().starts_with(&prev.alpha);
    match (&prev.d_block, usable) {
        (Some(d), true) => certify(model, region, localized, cap, Some(PreviousBlock { c: &prev.c_block, d })),
        _ => certify(model, region, localized, cap, None),
    }
}

fn certify(
    model: &IsingModel,
    region: &Region,
    localized: &LocalizedModel,
    cap: usize,
    prev: Option<PreviousBlock<'_>>,
) -> Result<DobrushinCertificate> {
    if localized.alpha() != region.alpha() {
        return Err(Error::InvalidParameter("localized model and region disagree on alpha".into()));
    }
    let c_block = c_matrix(localized.local(), cap)?;
    let b = b_vector(model, localized, region, cap)?;
    let block = d_matrix(&c_block, prev)?;
    let q = region.query_position();
    let bound = match &block.d {
        Some(d) => region
            .boundary_alpha()
            .iter()
            .map(|&j| {
                let p = region.position(j).expect("boundary node lies in the region");
                d[(q, p)] * b[p]
            })
            .sum(),
        None => f64::INFINITY,
    };
    let c_local = (0..c_block.nrows()).map(|i| c_block.row(i).sum()).fold(0.0, f64::max);
    Ok(DobrushinCertificate {
        alpha: region.alpha().to_vec(),
        query_index: q,
        c_block,
        d_block: block.d,
        b,
        bound,
        valid: block.valid && bound.is_finite(),
        c_local,
        spectral_radius: block.spectral_radius,
        method: localized.method(),
        enumeration_cap: cap,
    })
}

fn check_coefficient(c: f64) -> Result<()> {
    if c.is_nan() || c < 0.0 {
        return Err(Error::InvalidParameter(format!("Dobrushin coefficient must be in [0, 1), got {c}")));
    }
    if c >= 1.0 {
        return Err(Error::DobrushinViolated { c });
    }
    Ok(())
}

const T_MIN: f64 = 1.0 + 1e-6;
const T_MAX: f64 = 1e4;

/// Minimizes `objective(t)` over `t ∈ [T_MIN, T_MAX]`: a log-spaced scan in
/// `t − 1` followed by golden-section refinement around the best grid point.
fn minimize_over_t(objective: impl Fn(f64) -> f64) -> (f64, f64) {
    const GRID: usize = 400;
    let (lo, hi) = ((T_MIN - 1.0).ln(), (T_MAX - 1.0).ln());
    let t_at = |u: f64| 1.0 + u.exp();
    let us: Vec<f64> = (0..=GRID).map(|k| lo + (hi - lo) * k as f64 / GRID as f64).collect();
    let mut best_k = 0;
    let mut best = f64::INFINITY;
    for (k, &u) in us.iter().enumerate() {
        let v = objective(t_at(u));
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let (mut a, mut b) = (us[best_k.saturating_sub(1)], us[(best_k + 1).min(GRID)]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (objective(t_at(x1)), objective(t_at(x2)));
    for _ in 0..100 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = objective(t_at(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = objective(t_at(x2));
        }
    }
    let mut best_t = t_at(us[best_k]);
    for (u, f) in [(x1, f1), (x2, f2)] {
        if f < best {
            best = f;
            best_t = t_at(u);
        }
    }
    (best_t, best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusResult {
    /// Smallest hop distance from the query to ∂α that guarantees error ≤ ε.
    pub radius: usize,
    /// The `t > 1` attaining it (2 when the closed form wins).
    pub t: f64,
    /// `⌈−ln(ε(1−c)) / ln((1+c)/(2c))⌉`, the `t = 2` special case.
    pub radius_t2: usize,
}

fn radius_objective(c: f64, eps: f64, t: f64) -> f64 {
    (t / (2.0 * eps * (t - 1.0) * (1.0 - c))).ln() / ((1.0 + (t - 1.0) * c) / (t * c)).ln()
}

fn ceil_clamped(x: f64) -> usize {
    if x <= 0.0 {
        0
    } else {
        x.ceil() as usize
    }
}

/// Distance to the boundary sufficient for an ε-accurate query marginal,
/// given the global Dobrushin coefficient `c`.
pub fn theorem2_radius(c: f64, eps: f64) -> Result<RadiusResult> {
    check_coefficient(c)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if c == 0.0 {
        // D = I: only a query sitting on the boundary can be off, by at most 1/2.
        let r = usize::from(eps < 0.5);
        return Ok(RadiusResult { radius: r, t: 2.0, radius_t2: r });
    }
    let radius_t2 = ceil_clamped(radius_objective(c, eps, 2.0));
    let (t, g) = minimize_over_t(|t| radius_objective(c, eps, t));
    let r = ceil_clamped(g);
    Ok(if r <= radius_t2 { RadiusResult { radius: r, t, radius_t2 } } else { RadiusResult { radius: radius_t2, t: 2.0, radius_t2 } })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceBound {
    pub eps: f64,
    pub t: f64,
}

fn distance_bound_at(c: f64, d: usize, t: f64) -> f64 {
    let decay = ((1.0 + (t - 1.0) * c) / (t * c)).ln();
    t / (2.0 * (t - 1.0) * (1.0 - c)) * (-(d as f64) * decay).exp()
}

/// Error bound for a region whose boundary is `d` hops from the query.
pub fn theorem2_bound(c: f64, d: usize) -> Result<DistanceBound> {
    check_coefficient(c)?;
    if c == 0.0 {
        return Ok(DistanceBound { eps: if d == 0 { 0.5 } else { 0.0 }, t: T_MAX });
    }
    let (t, log_eps) = minimize_over_t(|t| distance_bound_at(c, d, t).ln());
    let at_two = distance_bound_at(c, d, 2.0);
    let eps = log_eps.exp();
    Ok(if eps <= at_two { DistanceBound { eps, t } } else { DistanceBound { eps: at_two, t: 2.0 } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::MeanFieldConfig;
    use crate::model::{build_model, localize, make_region};

    const CAP: usize = DEFAULT_ENUMERATION_CAP;

    /// The gap written exactly as the two logistic terms.
    fn f_direct(m: f64, j: f64) -> f64 {
        (1.0 / ((m + 2.0 * j).exp() + 1.0) - 1.0 / ((m - 2.0 * j).exp() + 1.0)).abs()
    }

    #[test]
    fn flip_gap_matches_direct_form() {
        for &m in &[-3.0, -0.6, 0.0, 0.2, 1.0, 5.0] {
            for &j in &[-1.0, -0.25, 0.0, 0.1, 0.4, 2.0] {
                assert!((flip_gap(m, j) - f_direct(m, j)).abs() < 1e-14, "m={m} j={j}");
            }
        }
        assert_eq!(flip_gap(0.0, 500.0), 1.0);
        assert_eq!(flip_gap(1e4, 0.3), 0.0);
    }

    #[test]
    fn c_entry_cases() {
        let m = build_model(&[(0, 1, 0.0)], vec![0.0, 0.0]).unwrap();
        assert_eq!(c_entry(&m, 0, 1, CAP).unwrap(), 0.0);

        let m = build_model(&[(0, 1, 0.25)], vec![0.0, 0.0]).unwrap();
        let v = c_entry(&m, 0, 1, CAP).unwrap();
        assert!((v - f_direct(0.0, 0.25)).abs() < 1e-15);
        assert!((v - 0.25f64.tanh()).abs() < 1e-15);

        // deg 2: other neighbor coupling 0.4, h = 0.1 → M ∈ {1.0, −0.6}, nearest zero −0.6.
        let m = build_model(&[(0, 1, 0.3), (0, 2, 0.4)], vec![0.1, 0.0, 0.0]).unwrap();
        let cases = [2.0 * (0.1 + 0.4), 2.0 * (0.1 - 0.4)];
        let brute = cases.iter().map(|&mm| f_direct(mm, 0.3)).fold(0.0, f64::max);
        assert!((c_entry(&m, 0, 1, CAP).unwrap() - brute).abs() < 1e-15);
        assert!((brute - f_direct(-0.6, 0.3)).abs() < 1e-15);

        assert_eq!(c_entry(&m, 1, 2, CAP).unwrap(), 0.0);
        assert!(c_entry(&m, 1, 1, CAP).is_err());
        assert!(matches!(c_entry(&m, 0, 1, 0), Err(Error::EnumerationCap { node: 0, count: 1, cap: 0 })));
    }

    #[test]
    fn dobrushin_coefficient_cases() {
        let m = build_model(&[], vec![0.3, 0.1]).unwrap();
        assert_eq!(dobrushin_coefficient(&m, CAP).unwrap().c, 0.0);
        let m = build_model(&[(0, 1, 0.6)], vec![0.0, 0.0]).unwrap();
        let c = dobrushin_coefficient(&m, CAP).unwrap();
        assert!((c.c - f_direct(0.0, 0.6)).abs() < 1e-15);
        assert_eq!(c.argmax, 0);
        let star = build_model(&[(0, 1, 0.3), (0, 2, 0.3), (0, 3, 0.3)], vec![0.0; 4]).unwrap();
        assert_eq!(dobrushin_coefficient(&star, CAP).unwrap().argmax, 0);
    }

    #[test]
    fn d_matrix_cases() {
        let z = DMatrix::zeros(3, 3);
        let r = d_matrix(&z, None).unwrap();
        assert!(r.valid);
        assert_eq!(r.d.unwrap(), DMatrix::identity(3, 3));

        let r = d_matrix(&DMatrix::from_element(1, 1, 0.5), None).unwrap();
        assert!((r.d.unwrap()[(0, 0)] - 2.0).abs() < 1e-15);

        let c = DMatrix::from_row_slice(2, 2, &[0.0, 0.3, 0.3, 0.0]);
        let r = d_matrix(&c, None).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0]) / (1.0 - 0.09);
        assert!((r.d.unwrap() - expect).abs().max() < 1e-15);
        assert!((r.spectral_radius - 0.3).abs() < 1e-9);

        let singular = DMatrix::from_element(1, 1, 1.0);
        let r = d_matrix(&singular, None).unwrap();
        assert!(!r.valid && r.d.is_none());

        let hot = DMatrix::from_row_slice(2, 2, &[0.0, 1.5, 1.5, 0.0]);
        assert!(!d_matrix(&hot, None).unwrap().valid);

        assert!(d_matrix(&DMatrix::from_element(1, 1, -0.1), None).is_err());
    }

    #[test]
    fn spectral_radius_on_reducible_and_bipartite() {
        let c = DMatrix::from_row_slice(2, 2, &[0.5, 0.9, 0.0, 0.0]);
        assert!((spectral_radius_upper(&c) - 0.5).abs() < 1e-8);
        let c = DMatrix::from_row_slice(3, 3, &[0.0, 0.6, 0.0, 0.2, 0.0, 0.2, 0.0, 0.6, 0.0]);
        // Eigenvalues 0 and ±sqrt(0.24).
        assert!((spectral_radius_upper(&c) - 0.24f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn incremental_update_matches_direct_solve() {
        let c4 = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 0.2, 0.1, 0.0, 0.25, 0.0, 0.0, 0.3, 0.1, 0.0, 0.0, 0.2, 0.0, 0.15, 0.3, 0.0],
        );
        let mut c3 = c4.view((0, 0), (3, 3)).into_owned();
        c3[(1, 0)] = 0.2; // a row of the old block changed
        let d3 = d_matrix(&c3, None).unwrap().d.unwrap();
        let inc = d_matrix(&c4, Some(PreviousBlock { c: &c3, d: &d3 })).unwrap();
        let direct = d_matrix(&c4, None).unwrap();
        assert!((inc.d.unwrap() - direct.d.unwrap()).abs().max() < 1e-12);
        assert_eq!(inc.valid, direct.valid);
    }

    #[test]
    fn b_vector_cases() {
        // Node 0 has one cut edge and no region neighbors, h = 0.
        let j = 0.7;
        let m = build_model(&[(0, 1, j)], vec![0.0, 0.4]).unwrap();
        let r = make_region(&m, &[0], 0).unwrap();
        let loc = localize(&m, &r, BoundaryMethod::DropOut, &MeanFieldConfig::default()).unwrap();
        let b = b_vector(&m, &loc, &r, CAP).unwrap();
        let two_case = [-1.0f64, 1.0].iter().map(|x| (0.5 - 1.0 / (1.0 + (-2.0 * j * x).exp())).abs()).fold(0.0, f64::max);
        assert!((b[0] - two_case).abs() < 1e-15);
        assert!((two_case - (0.5 - 1.0 / (1.0 + (-2.0 * j).exp())).abs()).abs() < 1e-15);

        // A node with no cut edges gets 0.
        let m = build_model(&[(0, 1, 0.5), (1, 2, 0.5)], vec![0.0; 3]).unwrap();
        let r = make_region(&m, &[0, 1], 0).unwrap();
        let loc = localize(&m, &r, BoundaryMethod::DropOut, &MeanFieldConfig::default()).unwrap();
        let b = b_vector(&m, &loc, &r, CAP).unwrap();
        assert_eq!(b[0], 0.0);
        assert!(b[1] > 0.0);
    }

    fn b_by_full_enumeration(model: &IsingModel, loc: &LocalizedModel, region: &Region, j: usize) -> f64 {
        let p = region.position(j).unwrap();
        let nb = model.neighbors(j);
        let mut gap: f64 = 0.0;
        for mask in 0u32..(1 << nb.len()) {
            let (mut orig, mut local) = (model.field(j), loc.h_tilde()[p]);
            for (bit, &(k, w)) in nb.iter().enumerate() {
                let x = if mask >> bit & 1 == 1 { 1.0 } else { -1.0 };
                orig += w * x;
                if region.contains(k) {
                    local += w * x;
                }
            }
            let mu = 1.0 / (1.0 + (-2.0 * orig).exp());
            let nu = 1.0 / (1.0 + (-2.0 * local).exp());
            gap = gap.max((mu - nu).abs());
        }
        gap
    }

    #[test]
    fn b_vector_matches_full_enumeration() {
        let m = build_model(
            &[(0, 1, 0.3), (1, 2, 0.5), (1, 3, -0.7), (0, 4, 0.2), (4, 3, 0.9), (3, 5, -0.4)],
            vec![0.1, 0.0, 1.0, -0.3, 0.4, 0.2],
        )
        .unwrap();
        let r = make_region(&m, &[0, 1, 4], 0).unwrap();
        let mf = MeanFieldConfig::default();
        for method in [BoundaryMethod::DropOut, BoundaryMethod::MeanField] {
            let loc = localize(&m, &r, method, &mf).unwrap();
            let b = b_vector(&m, &loc, &r, CAP).unwrap();
            for &j in r.alpha() {
                let want = if r.boundary_alpha().contains(&j) { b_by_full_enumeration(&m, &loc, &r, j) } else { 0.0 };
                assert!((b[r.position(j).unwrap()] - want).abs() < 1e-14, "{method} node {j}");
            }
        }
    }

    #[test]
    fn mean_field_can_shrink_b() {
        // Node 1 sits near saturation (h = 2), so the worst-case gap is lopsided;
        // the negative mean across the cut moves h̃ toward the midpoint.
        let m = build_model(&[(0, 1, 0.1), (1, 2, 0.5)], vec![0.0, 2.0, -0.8]).unwrap();
        let r = make_region(&m, &[0, 1], 0).unwrap();
        let mf = MeanFieldConfig::default();
        let drop = localize(&m, &r, BoundaryMethod::DropOut, &mf).unwrap();
        let comp = localize(&m, &r, BoundaryMethod::MeanField, &mf).unwrap();
        assert!(comp.h_tilde()[1] < drop.h_tilde()[1]);
        let b_drop = b_vector(&m, &drop, &r, CAP).unwrap();
        let b_mf = b_vector(&m, &comp, &r, CAP).unwrap();
        assert!(b_mf[1] < b_drop[1], "{b_mf:?} vs {b_drop:?}");
        // A symmetric cut with an unbiased neighbor cannot be improved on: dropout is centred.
        let m = build_model(&[(0, 1, 0.5)], vec![0.0, 0.7]).unwrap();
        let r = make_region(&m, &[0], 0).unwrap();
        let b_drop = b_vector(&m, &localize(&m, &r, BoundaryMethod::DropOut, &mf).unwrap(), &r, CAP).unwrap();
        let b_mf = b_vector(&m, &localize(&m, &r, BoundaryMethod::MeanField, &mf).unwrap(), &r, CAP).unwrap();
        assert!(b_mf[0] >= b_drop[0]);
    }

    #[test]
    fn whole_component_has_zero_bound() {
        let m = build_model(&[(0, 1, 0.3), (1, 2, 0.5)], vec![0.2, 0.0, 1.0]).unwrap();
        let r = make_region(&m, &[1, 0, 2], 1).unwrap();
        let loc = localize(&m, &r, BoundaryMethod::DropOut, &MeanFieldConfig::default()).unwrap();
        let cert = corollary2_bound(&m, &r, &loc, CAP).unwrap();
        assert!(cert.valid);
        assert_eq!(cert.bound, 0.0);
    }

    #[test]
    fn radius_examples() {
        let t2 = ((1.0f64 / (0.01 * 0.5)).ln() / 1.5f64.ln()).ceil() as usize;
        assert_eq!(t2, 14);
        let r = theorem2_radius(0.5, 0.01).unwrap();
        assert_eq!(r.radius_t2, 14);
        assert!(r.radius <= 14);
        assert!(theorem2_bound(0.5, r.radius).unwrap().eps <= 0.01);

        assert_eq!(theorem2_radius(0.5, 10.0).unwrap().radius, 0);
        assert!(matches!(theorem2_radius(1.0, 0.1), Err(Error::DobrushinViolated { .. })));
        assert!(theorem2_radius(0.5, 0.0).is_err());
        assert!(theorem2_bound(1.2, 3).is_err());
    }

    #[test]
    fn distance_bound_examples() {
        let b0 = theorem2_bound(0.5, 0).unwrap();
        assert!(b0.eps.is_finite() && b0.eps > 0.0);
        assert!(theorem2_bound(0.5, 14).unwrap().eps <= 0.01);
        let mut last = f64::INFINITY;
        for d in 0..40 {
            let e = theorem2_bound(0.3, d).unwrap().eps;
            assert!(e < last);
            last = e;
        }
    }

    #[test]
    fn radius_monotonicity_sweep() {
        for &c in &[0.01, 0.1, 0.3, 0.6, 0.9, 0.99] {
            let mut last = usize::MAX;
            for k in 0..30 {
                let eps = 10f64.powf(-6.0 + 0.2 * k as f64);
                let r = theorem2_radius(c, eps).unwrap().radius;
                assert!(r <= last, "c={c} eps={eps}");
                last = r;
                assert!(theorem2_bound(c, r).unwrap().eps <= eps * (1.0 + 1e-9), "c={c} eps={eps} r={r}");
            }
        }
        for &eps in &[1e-4, 1e-2, 0.2] {
            let mut last = 0;
            for k in 1..50 {
                let c = k as f64 / 50.0;
                let r = theorem2_radius(c, eps).unwrap().radius;
                assert!(r >= last, "c={c} eps={eps}");
                last = r;
            }
        }
    }
}
