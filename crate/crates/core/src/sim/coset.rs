//! Gaussian coset states `|psi_y>` over `{x : A x = y mod q}` and the
//! `GenGauss` state-preparation procedure.

use crate::error::{Error, Result};
use crate::gauss;
use crate::rng::{self, Rng};
use crate::sim::state::PureState;
use crate::zq::{centered, ZqMatrix, ZqVector};
use num_complex::Complex64;

/// Default cap on the number of ball points visited during enumeration.
pub const ENUM_BUDGET: u64 = 1_000_000;

/// A normalized Gaussian coset state together with its provenance.
#[derive(Clone, Debug)]
pub struct CosetState {
    pub state: PureState,
    pub a: ZqMatrix,
    pub y: ZqVector,
    pub sigma: f64,
    pub radius: f64,
}

/// Enumerate `{x in Z_q^m : ||c(x)|| <= radius}` by coordinate recursion
/// with running norm pruning, visiting at most `budget` points.
/// Vectors are produced in deterministic (lexicographic centered) order.
fn enumerate_ball(
    m: usize,
    q: u64,
    radius: f64,
    budget: u64,
    mut visit: impl FnMut(&[i64]) -> Result<()>,
) -> Result<()> {
    let cut_box = (q / 2) as i64;
    let cut = if radius.is_finite() {
        (radius.floor() as i64).min(cut_box)
    } else {
        cut_box
    };
    let lo = if q % 2 == 0 { -(cut_box - 1) } else { -cut_box };
    let lo = lo.max(-cut);
    let radius_sq = if radius.is_finite() { radius * radius + 1e-9 } else { f64::INFINITY };
    let mut coords = vec![0i64; m];
    let mut visited: u64 = 0;
    fn rec(
        depth: usize,
        m: usize,
        lo: i64,
        hi: i64,
        radius_sq: f64,
        norm_sq: f64,
        coords: &mut Vec<i64>,
        visited: &mut u64,
        budget: u64,
        visit: &mut impl FnMut(&[i64]) -> Result<()>,
    ) -> Result<()> {
        if depth == m {
            *visited += 1;
            if *visited > budget {
                return Err(Error::Budget(format!(
                    "ball enumeration exceeded budget of {budget} points"
                )));
            }
            return visit(coords);
        }
        for v in lo..=hi {
            let ns = norm_sq + (v * v) as f64;
            if ns <= radius_sq {
                coords[depth] = v;
                rec(depth + 1, m, lo, hi, radius_sq, ns, coords, visited, budget, visit)?;
            }
        }
        Ok(())
    }
    rec(0, m, lo, cut, radius_sq, 0.0, &mut coords, &mut visited, budget, &mut visit)
}

/// All vectors of the centered ball `{x in Z_q^m : ||c(x)|| <= radius}` in
/// deterministic order.
pub fn enumerate_ball_vectors(
    m: usize,
    q: u64,
    radius: f64,
    budget: u64,
) -> Result<Vec<ZqVector>> {
    let mut out = Vec::new();
    enumerate_ball(m, q, radius, budget, |coords| {
        out.push(ZqVector::from_i64(coords, q));
        Ok(())
    })?;
    Ok(out)
}

/// Exactly the coset vectors `{x : A x = y, ||c(x)|| <= radius}` in
/// deterministic order.
pub fn enumerate_coset(
    a: &ZqMatrix,
    y: &ZqVector,
    radius: f64,
    budget: u64,
) -> Result<Vec<ZqVector>> {
    if a.rows != y.len() {
        return Err(Error::Dimension("y length must equal the row count of A".into()));
    }
    let mut out = Vec::new();
    enumerate_ball(a.cols, a.q, radius, budget, |coords| {
        let x = ZqVector::from_i64(coords, a.q);
        if a.mul_vec(&x) == *y {
            out.push(x);
        }
        Ok(())
    })?;
    Ok(out)
}

/// Build the normalized coset state with `amplitude(x) ~ rho_sigma(c(x))` on
/// the coset intersected with the ball of the given radius.
pub fn build_coset_state(
    a: &ZqMatrix,
    y: &ZqVector,
    sigma: f64,
    radius: f64,
) -> Result<CosetState> {
    build_coset_state_with_budget(a, y, sigma, radius, ENUM_BUDGET)
}

pub fn build_coset_state_with_budget(
    a: &ZqMatrix,
    y: &ZqVector,
    sigma: f64,
    radius: f64,
    budget: u64,
) -> Result<CosetState> {
    if sigma <= 0.0 {
        return Err(Error::Parameter("sigma must be positive".into()));
    }
    let support = enumerate_coset(a, y, radius, budget)?;
    if support.is_empty() {
        return Err(Error::EmptySupport(format!(
            "coset of y = {:?} has no points within radius {radius}",
            y.entries()
        )));
    }
    let mut state = PureState::new(a.q, a.cols);
    for x in &support {
        let mass = gauss::gaussian_mass(x, sigma)?;
        state.set_amplitude(x, Complex64::new(mass, 0.0));
    }
    state.normalize()?;
    Ok(CosetState { state, a: a.clone(), y: y.clone(), sigma, radius })
}

/// `GenGauss(A, sigma)`: simulate preparing the Gaussian superposition,
/// computing `A x` into a fresh register and measuring it. The measured
/// image `y` is sampled with probability proportional to the squared
/// Gaussian mass of its coset slice, and the post-measurement state is
/// exactly `build_coset_state(A, y, sigma, radius)`.
pub fn gen_gauss(
    a: &ZqMatrix,
    sigma: f64,
    radius: f64,
    budget: u64,
    rng: &mut Rng,
) -> Result<(CosetState, ZqVector)> {
    if sigma <= 0.0 {
        return Err(Error::Parameter("sigma must be positive".into()));
    }
    // Group squared masses by the image y = A x.
    let mut masses: std::collections::BTreeMap<Vec<u64>, f64> = std::collections::BTreeMap::new();
    enumerate_ball(a.cols, a.q, radius, budget, |coords| {
        let x = ZqVector::from_i64(coords, a.q);
        let y = a.mul_vec(&x);
        let rho = gauss::gaussian_mass(&x, sigma)?;
        *masses.entry(y.entries().to_vec()).or_default() += rho * rho;
        Ok(())
    })?;
    if masses.is_empty() {
        return Err(Error::EmptySupport("no lattice points within the radius".into()));
    }
    let total: f64 = masses.values().sum();
    let u = rng::uniform_f64(rng) * total;
    let mut acc = 0.0;
    let mut chosen = None;
    for (y, w) in &masses {
        acc += w;
        chosen = Some(y.clone());
        if u < acc {
            break;
        }
    }
    let y = ZqVector::from_entries(chosen.unwrap(), a.q);
    let state = build_coset_state_with_budget(a, &y, sigma, radius, budget)?;
    Ok((state, y))
}

/// Exact marginal `Pr[y]` of `gen_gauss`, for test oracles.
pub fn gen_gauss_marginal(
    a: &ZqMatrix,
    sigma: f64,
    radius: f64,
    budget: u64,
) -> Result<Vec<(ZqVector, f64)>> {
    let mut masses: std::collections::BTreeMap<Vec<u64>, f64> = std::collections::BTreeMap::new();
    enumerate_ball(a.cols, a.q, radius, budget, |coords| {
        let x = ZqVector::from_i64(coords, a.q);
        let y = a.mul_vec(&x);
        let rho = gauss::gaussian_mass(&x, sigma)?;
        *masses.entry(y.entries().to_vec()).or_default() += rho * rho;
        Ok(())
    })?;
    let total: f64 = masses.values().sum();
    Ok(masses
        .into_iter()
        .map(|(y, w)| (ZqVector::from_entries(y, a.q), w / total))
        .collect())
}

/// Centered box check used by coset-state invariants.
pub fn within_radius(x: &ZqVector, radius: f64) -> bool {
    let norm_sq: f64 = x
        .entries()
        .iter()
        .map(|&e| {
            let c = centered(e, x.q) as f64;
            c * c
        })
        .sum();
    norm_sq.sqrt() <= radius + 1e-9
}
