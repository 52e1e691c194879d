//! Commutative reduction: each step matrix becomes a scalar weight
//! (`P_minus -> p`, `P_plus -> q = 1 - p`), path sums become expectations over
//! a simple random walk, and the operator Ito identity becomes the discrete
//! Ito formula / Doob-Meyer decomposition.

use num_complex::Complex;

use crate::decoherence::{level_integral, real_values};
use crate::error::{Error, Result};
use crate::ito::{ito_step, ito_telescoped, FunctionTable};
use crate::pathspace::{PathFn, PathSum, Walk};
use crate::scalar::{re, Cx, Real};

/// Left/right step probabilities; `q` is derived so `p + q = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepWeights<T> {
    p: T,
    q: T,
}

impl<T: Real> StepWeights<T> {
    pub fn new(p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::BadWeight(p.to_f64_lossy()));
        }
        Ok(Self { p, q: T::one() - p })
    }

    pub fn symmetric() -> Self {
        Self {
            p: T::lit(0.5),
            q: T::lit(0.5),
        }
    }

    /// Weight of a left step.
    pub fn p(&self) -> T {
        self.p
    }

    /// Weight of a right step.
    pub fn q(&self) -> T {
        self.q
    }

    /// `p^{#left(k)} q^{#right(k)}` for every path index `k`.
    pub fn path_weights(&self, n: u32) -> Vec<T> {
        let mut out = Vec::with_capacity(1usize << n);
        out.push(T::one());
        for _ in 0..n {
            let len = out.len();
            for k in 0..len {
                let w = out[k];
                out.push(w * self.q);
                out[k] = w * self.p;
            }
        }
        out
    }
}

impl<T: Real> Walk<T> for StepWeights<T> {
    type Op = Cx<T>;
    fn step_left(&self) -> Cx<T> {
        re(self.p)
    }
    fn step_right(&self) -> Cx<T> {
        re(self.q)
    }
}

/// `E[f(Y_0, ..., Y_n)] = sum_k f(w^(k)) p^{#left} q^{#right}`
pub fn classical_sigma<T: Real, F: PathFn<T> + ?Sized>(
    eval: &PathSum,
    wts: &StepWeights<T>,
    n: u32,
    f: &F,
) -> Result<Cx<T>> {
    eval.sigma(wts, n, f)
}

/// Expectations of the three sides of the telescoped discrete Ito formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoobMeyer<T> {
    /// `E[sum_m 1/2 (f(Y_m+1) - f(Y_m-1)) (Y_{m+1} - Y_m)]`
    pub martingale_expect: Complex<T>,
    /// `E[sum_m 1/2 (f(Y_m+1) - 2 f(Y_m) + f(Y_m-1))]`
    pub compensator_expect: Complex<T>,
    /// `E[f(Y_n)] - f(0)`
    pub total_expect: Complex<T>,
}

pub fn doob_meyer<T: Real>(
    eval: &PathSum,
    wts: &StepWeights<T>,
    n: u32,
    f: &FunctionTable<T>,
) -> Result<DoobMeyer<T>> {
    let d = ito_telescoped(eval, wts, n, f)?;
    Ok(DoobMeyer {
        martingale_expect: d.martingale_term,
        compensator_expect: d.compensator_term,
        total_expect: d.lhs,
    })
}

/// `E[1/2 (f(Y_m+1) - f(Y_m-1)) (Y_{m+1} - Y_m)]` for each `m`.
pub fn martingale_increments<T: Real>(
    eval: &PathSum,
    wts: &StepWeights<T>,
    n: u32,
    f: &FunctionTable<T>,
) -> Result<Vec<Cx<T>>> {
    (0..n)
        .map(|m| ito_step(eval, wts, n, m, f).map(|d| d.martingale_term))
        .collect()
}

/// Largest residual of the scalar one-step (every `m`) and telescoped
/// identities.
pub fn classical_theorem_check<T: Real>(
    eval: &PathSum,
    wts: &StepWeights<T>,
    n: u32,
    f: &FunctionTable<T>,
) -> Result<T> {
    let mut worst = ito_telescoped(eval, wts, n, f)?.residual::<T>();
    for m in 0..n {
        worst = worst.max(ito_step(eval, wts, n, m, f)?.residual::<T>());
    }
    Ok(worst)
}

/// `P(Y_n = x)` for `x` in `[-n, n]` from endpoint-indicator path sums.
pub fn endpoint_distribution<T: Real>(
    eval: &PathSum,
    wts: &StepWeights<T>,
    n: u32,
) -> Result<Vec<T>> {
    let ni = n as i64;
    (-ni..=ni)
        .map(|x| {
            if (x + ni) % 2 != 0 {
                return Ok(T::zero());
            }
            let f = |w: &[i64]| {
                if w[w.len() - 1] == x {
                    re(T::one())
                } else {
                    re(T::zero())
                }
            };
            classical_sigma(eval, wts, n, &f).map(|z| z.re)
        })
        .collect()
}

/// The min-kernel integral with scalar weights:
/// `sum_{k,k'} min(f_k, f_k') w_k w_k'`.
pub fn classical_quantum_integral<T: Real, F: PathFn<T> + ?Sized>(
    eval: &PathSum,
    wts: &StepWeights<T>,
    n: u32,
    f: &F,
) -> Result<T> {
    eval.check_n(n)?;
    let values = real_values(n, f)?;
    Ok(level_integral(
        values.into_iter().zip(wts.path_weights(n)).collect(),
    ))
}

/// `C(n, k)` in exact integer arithmetic; `None` on overflow or `k > n`.
pub fn binomial_coefficient(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return None;
    }
    let k = k.min(n - k);
    // each partial product C(n, i+1) is an integer
    (0..k).try_fold(1u64, |acc, i| acc.checked_mul(n - i).map(|v| v / (i + 1)))
}

/// Exact-coefficient binomial law `C(n, m) p^l q^m` at `x = m - l`, as a
/// dense vector over `[-n, n]`.
pub fn binomial_law<T: Real>(wts: &StepWeights<T>, n: u32) -> Result<Vec<T>> {
    let ni = n as i64;
    (-ni..=ni)
        .map(|x| {
            if (x + ni) % 2 != 0 {
                return Ok(T::zero());
            }
            let m = ((ni + x) / 2) as u64;
            let c =
                binomial_coefficient(n as u64, m).ok_or(Error::EnumerationCap { n, cap: 62 })?;
            let l = n as i32 - m as i32;
            Ok(T::from_u64(c).unwrap() * wts.p.powi(l) * wts.q.powi(m as i32))
        })
        .collect()
}
