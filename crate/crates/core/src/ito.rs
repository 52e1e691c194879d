//! Discrete Ito formula for operator-valued path sums.
//!
//! For a function `f` on the integers and any step `m`, every path satisfies
//!
//! ```text
//! f(w(m+1)) - f(w(m)) = 1/2 {f(w(m)+1) - f(w(m)-1)} (w(m+1) - w(m))
//!                     + 1/2 {f(w(m)+1) - 2 f(w(m)) + f(w(m)-1)}
//! ```
//!
//! because the increment is `+-1`. Weighting each path by its ordered
//! operator product and summing gives an identity between 2x2 matrices; this
//! module evaluates the three sums independently so the identity can be
//! checked rather than assumed.

use std::fmt;

use num_traits::Zero;
use rand::Rng;

use crate::coin::Coin;
use crate::error::{Error, Result};
use crate::evolution::u_xi;
use crate::mat2::{Mat2, StepOperator};
use crate::pathspace::{read_complex_table, Path, PathSum, Walk};
use crate::scalar::{cx, expi, re, Cx, Real};

/// A complex function tabulated on `[-(horizon + 1), horizon + 1]`, enough
/// to evaluate `f(w(m) +- 1)` along any walk of at most `horizon` steps.
#[derive(Clone, PartialEq)]
pub struct FunctionTable<T> {
    name: String,
    horizon: u32,
    values: Vec<Cx<T>>,
}

impl<T: Real> fmt::Debug for FunctionTable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionTable")
            .field("name", &self.name)
            .field("horizon", &self.horizon)
            .finish()
    }
}

impl<T: Real> FunctionTable<T> {
    pub fn from_fn(name: impl Into<String>, horizon: u32, f: impl Fn(i64) -> Cx<T>) -> Self {
        let r = horizon as i64 + 1;
        Self {
            name: name.into(),
            horizon,
            values: (-r..=r).map(f).collect(),
        }
    }

    pub fn constant(horizon: u32, c: Cx<T>) -> Self {
        Self::from_fn("const", horizon, |_| c)
    }

    /// `f(x) = x`
    pub fn identity(horizon: u32) -> Self {
        Self::from_fn("x", horizon, |x| re(T::from_i64(x).unwrap()))
    }

    /// `f(x) = x^2`
    pub fn square(horizon: u32) -> Self {
        Self::from_fn("x^2", horizon, |x| re(T::from_i64(x * x).unwrap()))
    }

    /// `f(x) = |x|`
    pub fn abs(horizon: u32) -> Self {
        Self::from_fn("|x|", horizon, |x| re(T::from_i64(x.abs()).unwrap()))
    }

    /// `f(x) = max(x - 1, -x)`, the alternative Tanaka integrand.
    pub fn ceil_alt(horizon: u32) -> Self {
        Self::from_fn("max(x-1,-x)", horizon, |x| {
            re(T::from_i64((x - 1).max(-x)).unwrap())
        })
    }

    /// `f(x) = e^{i xi x}`
    pub fn exp_i(horizon: u32, xi: T) -> Self {
        Self::from_fn(format!("exp(i*{xi}*x)"), horizon, move |x| {
            expi(xi * T::from_i64(x).unwrap())
        })
    }

    /// Real and imaginary parts independently uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(horizon: u32, rng: &mut R) -> Self {
        let r = horizon as i64 + 1;
        let values = (-r..=r)
            .map(|_| {
                cx(
                    T::lit(rng.random_range(-1.0..=1.0)),
                    T::lit(rng.random_range(-1.0..=1.0)),
                )
            })
            .collect();
        Self {
            name: "random".into(),
            horizon,
            values,
        }
    }

    /// Builds a table from `(x, value)` rows; every site of the domain must
    /// be present.
    pub fn from_rows(name: impl Into<String>, horizon: u32, rows: &[(i64, Cx<T>)]) -> Result<Self> {
        let r = horizon as i64 + 1;
        let mut values = vec![None; (2 * r + 1) as usize];
        for &(x, v) in rows {
            if x.abs() <= r {
                values[(x + r) as usize] = Some(v);
            }
        }
        let mut out = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            match v {
                Some(v) => out.push(v),
                None => {
                    return Err(Error::Parse(format!(
                        "function table has no value at x = {}",
                        i as i64 - r
                    )))
                }
            }
        }
        Ok(Self {
            name: name.into(),
            horizon,
            values: out,
        })
    }

    /// Parses `random | x | x2 | abs | ceil | const:<re>[,<im>] | exp:<xi> |
    /// table:<file>`. `seed` is only consumed by `random`.
    pub fn parse(spec: &str, horizon: u32, seed: u64) -> Result<Self> {
        use rand::SeedableRng;
        let (kind, arg) = match spec.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a)),
            None => (spec.trim(), None),
        };
        let float = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        };
        let need = || arg.ok_or_else(|| Error::Parse(format!("{kind} needs an argument")));
        let mut t = match kind {
            "random" => Self::random(horizon, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed)),
            "x" | "identity" => Self::identity(horizon),
            "x2" | "square" => Self::square(horizon),
            "abs" => Self::abs(horizon),
            "ceil" => Self::ceil_alt(horizon),
            "const" => {
                let v = crate::coin::parse_floats(need()?)?;
                match v.as_slice() {
                    [a] => Self::constant(horizon, re(T::lit(*a))),
                    [a, b] => Self::constant(horizon, cx(T::lit(*a), T::lit(*b))),
                    _ => return Err(Error::Parse(format!("const expects re[,im], got {v:?}"))),
                }
            }
            "exp" => Self::exp_i(horizon, T::lit(float(need()?)?)),
            "table" => {
                let rows: Vec<(i64, Cx<T>)> = read_complex_table(need()?)?
                    .into_iter()
                    .map(|(x, a, b)| (x, cx(T::lit(a), T::lit(b))))
                    .collect();
                Self::from_rows(spec, horizon, &rows)?
            }
            other => return Err(Error::Parse(format!("unknown function kind {other:?}"))),
        };
        t.name = spec.to_string();
        Ok(t)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// `f(x)`; panics outside `[-(horizon + 1), horizon + 1]`.
    #[inline]
    pub fn at(&self, x: i64) -> Cx<T> {
        let r = self.horizon as i64 + 1;
        assert!(x.abs() <= r, "x = {x} outside table domain |x| <= {r}");
        self.values[(x + r) as usize]
    }

    /// `(f(x+1) - f(x-1)) / 2`
    #[inline]
    pub fn half_first_difference(&self, x: i64) -> Cx<T> {
        (self.at(x + 1) - self.at(x - 1)) * T::lit(0.5)
    }

    /// `(f(x+1) - 2 f(x) + f(x-1)) / 2`
    #[inline]
    pub fn half_second_difference(&self, x: i64) -> Cx<T> {
        (self.at(x + 1) - self.at(x) * T::lit(2.0) + self.at(x - 1)) * T::lit(0.5)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    fn check_covers(&self, n: u32) -> Result<()> {
        if self.horizon < n {
            return Err(Error::TableTooShort {
                covered: self.horizon + 1,
                needed: n + 1,
            });
        }
        Ok(())
    }
}

/// The three sides of the operator Ito identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItoDecomposition<O> {
    pub lhs: O,
    pub martingale_term: O,
    pub compensator_term: O,
}

impl<O> ItoDecomposition<O> {
    /// `max |lhs - martingale_term - compensator_term|`
    pub fn residual<T: Real>(&self) -> T
    where
        O: StepOperator<T>,
    {
        self.lhs
            .distance(&self.martingale_term.plus(&self.compensator_term))
    }
}

/// One-step identity at step `m` of an `n`-step walk.
pub fn ito_step<T: Real, W: Walk<T>>(
    eval: &PathSum,
    walk: &W,
    n: u32,
    m: u32,
    f: &FunctionTable<T>,
) -> Result<ItoDecomposition<W::Op>> {
    if m >= n {
        return Err(Error::StepOutOfRange { m, n });
    }
    f.check_covers(n)?;
    let m = m as usize;
    let [lhs, mart, comp] = eval.sigma_multi(walk, n, |w: &[i64]| {
        let (x, y) = (w[m], w[m + 1]);
        [
            f.at(y) - f.at(x),
            f.half_first_difference(x) * T::from_i64(y - x).unwrap(),
            f.half_second_difference(x),
        ]
    })?;
    Ok(ItoDecomposition {
        lhs,
        martingale_term: mart,
        compensator_term: comp,
    })
}

/// Telescoped identity: `sum_k {f(w(n)) - f(0)} P_k` against the `m`-sums of
/// the first and second difference terms.
pub fn ito_telescoped<T: Real, W: Walk<T>>(
    eval: &PathSum,
    walk: &W,
    n: u32,
    f: &FunctionTable<T>,
) -> Result<ItoDecomposition<W::Op>> {
    f.check_covers(n)?;
    let [lhs, mart, comp] = eval.sigma_multi(walk, n, |w: &[i64]| {
        let mut mart = Cx::zero();
        let mut comp = Cx::zero();
        for p in w.windows(2) {
            mart = mart + f.half_first_difference(p[0]) * T::from_i64(p[1] - p[0]).unwrap();
            comp = comp + f.half_second_difference(p[0]);
        }
        [f.at(w[w.len() - 1]) - f.at(w[0]), mart, comp]
    })?;
    Ok(ItoDecomposition {
        lhs,
        martingale_term: mart,
        compensator_term: comp,
    })
}

/// Checks the scalar identity along one path at every step and in telescoped
/// form. Returns the largest absolute residual.
pub fn scalar_ito_check<T: Real>(path: &Path, f: &FunctionTable<T>) -> Result<T> {
    f.check_covers(path.n())?;
    let w = path.positions();
    let mut worst = T::zero();
    let mut mart = Cx::zero();
    let mut comp = Cx::zero();
    for p in w.windows(2) {
        let step_mart = f.half_first_difference(p[0]) * T::from_i64(p[1] - p[0]).unwrap();
        let step_comp = f.half_second_difference(p[0]);
        let lhs = f.at(p[1]) - f.at(p[0]);
        worst = worst.max((lhs - step_mart - step_comp).norm());
        mart = mart + step_mart;
        comp = comp + step_comp;
    }
    let lhs = f.at(w[w.len() - 1]) - f.at(w[0]);
    Ok(worst.max((lhs - mart - comp).norm()))
}

/// Telescoped identity for `f(x) = |x|`.
///
/// The martingale term becomes `sum_k sum_m sgn(w(m)) (w(m+1) - w(m)) P_k` and
/// the compensator term `sum_k sum_m I{w(m) = 0} P_k`, the operator-valued
/// local time at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tanaka<O> {
    pub ito: ItoDecomposition<O>,
}

impl<O> Tanaka<O> {
    pub fn lhs(&self) -> &O {
        &self.ito.lhs
    }

    pub fn sgn_term(&self) -> &O {
        &self.ito.martingale_term
    }

    pub fn local_time_term(&self) -> &O {
        &self.ito.compensator_term
    }
}

pub fn tanaka<T: Real, W: Walk<T>>(eval: &PathSum, walk: &W, n: u32) -> Result<Tanaka<W::Op>> {
    Ok(Tanaka {
        ito: ito_telescoped(eval, walk, n, &FunctionTable::abs(n))?,
    })
}

/// `sgn` with `sgn(0) = 0`.
pub fn sgn(x: i64) -> i64 {
    x.signum()
}

/// The Tanaka sums written with `sgn` and `I{0}` directly rather than as
/// differences of `|x|`: `(sum_k |w(n)| P_k, sgn sum, local time)`.
pub fn tanaka_explicit<T: Real, W: Walk<T>>(
    eval: &PathSum,
    walk: &W,
    n: u32,
) -> Result<ItoDecomposition<W::Op>> {
    let [lhs, s, l] = eval.sigma_multi(walk, n, |w: &[i64]| {
        let mut s = 0i64;
        let mut visits = 0i64;
        for p in w.windows(2) {
            s += sgn(p[0]) * (p[1] - p[0]);
            visits += i64::from(p[0] == 0);
        }
        [
            re(T::from_i64(w[w.len() - 1].abs()).unwrap()),
            re(T::from_i64(s).unwrap()),
            re(T::from_i64(visits).unwrap()),
        ]
    })?;
    Ok(ItoDecomposition {
        lhs,
        martingale_term: s,
        compensator_term: l,
    })
}

/// `U(xi)^n` two ways and its three-term expansion
/// `U^n + i sin(xi) S + (cos(xi) - 1) C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharDecomposition<T> {
    pub xi: T,
    /// `U(xi)^n` by repeated squaring.
    pub lhs_power: Mat2<T>,
    /// `sum_k e^{i xi w(n)} P_k`
    pub lhs_paths: Mat2<T>,
    /// `U^n`
    pub term0: Mat2<T>,
    /// `S = sum_k sum_m e^{i xi w(m)} (w(m+1) - w(m)) P_k`
    pub sin_term: Mat2<T>,
    /// `C = sum_k sum_m e^{i xi w(m)} P_k`
    pub cos_term: Mat2<T>,
}

impl<T: Real> CharDecomposition<T> {
    pub fn rhs(&self) -> Mat2<T> {
        let i_sin = cx(T::zero(), self.xi.sin());
        let cos_m1 = re(self.xi.cos() - T::one());
        self.term0
            .add(&self.sin_term.scale(i_sin))
            .add(&self.cos_term.scale(cos_m1))
    }

    /// Largest pairwise entrywise gap among the three evaluations.
    pub fn max_residual(&self) -> T {
        let rhs = self.rhs();
        self.lhs_power
            .max_abs_diff(&self.lhs_paths)
            .max(self.lhs_power.max_abs_diff(&rhs))
            .max(self.lhs_paths.max_abs_diff(&rhs))
    }
}

pub fn char_decomposition<T: Real>(
    eval: &PathSum,
    coin: &Coin<T>,
    n: u32,
    xi: T,
) -> Result<CharDecomposition<T>> {
    let [lhs_paths, sin_term, cos_term] = eval.sigma_multi(coin, n, |w: &[i64]| {
        let mut s = Cx::zero();
        let mut c = Cx::zero();
        for p in w.windows(2) {
            let e = expi(xi * T::from_i64(p[0]).unwrap());
            s = s + e * T::from_i64(p[1] - p[0]).unwrap();
            c = c + e;
        }
        [expi(xi * T::from_i64(w[w.len() - 1]).unwrap()), s, c]
    })?;
    Ok(CharDecomposition {
        xi,
        lhs_power: u_xi(coin, xi).pow(n as u64),
        lhs_paths,
        term0: coin.u().pow(n as u64),
        sin_term,
        cos_term,
    })
}

/// Scale `n * max|f|` used to normalise Ito residuals; never below 1.
pub fn residual_scale<T: Real>(n: u32, f: &FunctionTable<T>) -> T {
    (T::from_u32(n).unwrap() * f.max_abs()).max(T::one())
}
