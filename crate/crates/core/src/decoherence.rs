//! Decoherence matrix and the min-kernel path integral.
//!
//! `D_n(k, k') = <P_k phi, P_k' phi>` is the Gram matrix of the path images
//! of the initial state. The integral
//! `int f dmu_n = sum_{k,k'} min(f_k, f_k') D_n(k, k')` is evaluated either
//! densely from `D_n` or matrix-free through level sets of `f`:
//! with `f_(1) <= ... <= f_(N)` sorted and `S_t = sum_{j >= t} P_(j) phi`,
//!
//! ```text
//! int f dmu_n = f_(1) ||S_1||^2 + sum_{t >= 2} (f_(t) - f_(t-1)) ||S_t||^2
//! ```
//!
//! which follows from `min(a, b) = f_(1) + sum_t (f_(t) - f_(t-1)) I{a >= f_(t)} I{b >= f_(t)}`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coin::{Coin, QubitState};
use crate::error::{Error, Result};
use crate::mat2::{Mat2, Spinor};
use crate::pathspace::{path_images, positions_into, PathFn, PathFunctional, PathSum};
use crate::scalar::{Cx, Real};

/// Default largest `n` for which `D_n` is materialised (`4^12` entries).
pub const DEFAULT_DENSE_MAX_N: u32 = 12;

/// Dense `2^n x 2^n` decoherence matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceMatrix<T> {
    n: u32,
    dim: usize,
    entries: Vec<Cx<T>>,
}

/// Builds `D_n` with the default dense cap.
pub fn decoherence_matrix<T: Real>(
    coin: &Coin<T>,
    phi: &QubitState<T>,
    n: u32,
) -> Result<DecoherenceMatrix<T>> {
    DecoherenceMatrix::build(coin, phi, n, DEFAULT_DENSE_MAX_N)
}

impl<T: Real> DecoherenceMatrix<T> {
    pub fn build(coin: &Coin<T>, phi: &QubitState<T>, n: u32, dense_cap: u32) -> Result<Self> {
        if n > dense_cap {
            return Err(Error::DenseCap { n, cap: dense_cap });
        }
        let images = path_images(coin, phi.spinor(), n);
        let dim = images.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in &images {
            for b in &images {
                entries.push(a.inner(b));
            }
        }
        Ok(Self { n, dim, entries })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, k: usize, kp: usize) -> Cx<T> {
        self.entries[k * self.dim + kp]
    }

    /// `max |D(k, k') - conj(D(k', k))|`
    pub fn hermitian_residual(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `sum_{k,k'} D(k, k')`, which equals `||U^n phi||^2`. Summed pairwise
    /// so rounding does not grow with the `4^n` entry count.
    pub fn grand_sum(&self) -> Cx<T> {
        pairwise_sum(&self.entries)
    }

    /// Smallest `D(i,i) D(j,j) - |D(i,j)|^2` over all pairs when
    /// `dim <= 256`, otherwise over `samples` seeded random pairs.
    pub fn min_principal_minor(&self, samples: usize, seed: u64) -> T {
        let minor =
            |i: usize, j: usize| self.get(i, i).re * self.get(j, j).re - self.get(i, j).norm_sqr();
        let mut worst = T::infinity();
        if self.dim <= 256 {
            for i in 0..self.dim {
                for j in i..self.dim {
                    worst = worst.min(minor(i, j));
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let i = rng.random_range(0..self.dim);
                let j = rng.random_range(0..self.dim);
                worst = worst.min(minor(i, j));
            }
        }
        worst
    }

    fn matvec(&self, x: &[Cx<T>], y: &mut [Cx<T>]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            *yi = row.iter().zip(x).fold(Cx::zero(), |s, (a, b)| s + *a * *b);
        }
    }

    /// Extreme eigenvalue estimates `(min, max)` from a Lanczos run with full
    /// reorthogonalisation, at most `max_steps` long, from a seeded random
    /// start. Ritz values lie inside the spectrum, and the run stops early
    /// once the Krylov space is invariant, at which point they are exact.
    pub fn eigen_bounds(&self, max_steps: usize, seed: u64) -> (T, T) {
        let dim = self.dim;
        let steps = max_steps.min(dim).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q: Vec<Cx<T>> = (0..dim)
            .map(|_| {
                Cx::new(
                    T::lit(rng.random_range(-1.0..1.0)),
                    T::lit(rng.random_range(-1.0..1.0)),
                )
            })
            .collect();
        normalize(&mut q);
        let scale = self
            .entries
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
            .max(T::min_positive_value());
        let mut basis: Vec<Vec<Cx<T>>> = Vec::with_capacity(steps);
        let mut alphas = Vec::with_capacity(steps);
        let mut betas: Vec<T> = Vec::with_capacity(steps);
        let mut z = vec![Cx::zero(); dim];
        for _ in 0..steps {
            self.matvec(&q, &mut z);
            let alpha = dot(&q, &z).re;
            basis.push(q.clone());
            alphas.push(alpha);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &z);
                    for (zi, bi) in z.iter_mut().zip(b) {
                        *zi = *zi - c * *bi;
                    }
                }
            }
            let beta = norm(&z);
            if basis.len() == steps
                || beta <= T::epsilon() * T::lit(64.0) * scale * T::from_usize(dim).unwrap()
            {
                break;
            }
            betas.push(beta);
            q = z.iter().map(|v| *v / beta).collect();
        }
        tridiagonal_extremes(&alphas, &betas)
    }

    /// `sum_{k,k'} min(f_k, f_k') D(k, k')` by the direct double sum.
    pub fn integrate(&self, f: &[T]) -> T {
        assert_eq!(f.len(), self.dim);
        let mut acc = Cx::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + self.get(i, j) * f[i].min(f[j]);
            }
        }
        acc.re
    }
}

fn pairwise_sum<T: Real>(xs: &[Cx<T>]) -> Cx<T> {
    if xs.len() <= 32 {
        return xs.iter().fold(Cx::zero(), |s, z| s + *z);
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn dot<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
    a.iter()
        .zip(b)
        .fold(Cx::zero(), |s, (x, y)| s + x.conj() * *y)
}

fn norm<T: Real>(a: &[Cx<T>]) -> T {
    a.iter().fold(T::zero(), |s, x| s + x.norm_sqr()).sqrt()
}

fn normalize<T: Real>(a: &mut [Cx<T>]) {
    let n = norm(a);
    for x in a {
        *x = *x / n;
    }
}

/// Smallest and largest eigenvalue of the symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off`, by Sturm-sequence bisection.
pub(crate) fn tridiagonal_extremes<T: Real>(diag: &[T], off: &[T]) -> (T, T) {
    let m = diag.len();
    // Gershgorin interval
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..m {
        let r = if i > 0 { off[i - 1].abs() } else { T::zero() }
            + if i < off.len() && i + 1 < m {
                off[i].abs()
            } else {
                T::zero()
            };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    // number of eigenvalues strictly below x
    let count_below = |x: T| {
        let mut count = 0;
        let mut d = T::one();
        for i in 0..m {
            let b2 = if i > 0 {
                off[i - 1] * off[i - 1]
            } else {
                T::zero()
            };
            d = diag[i] - x - if i > 0 { b2 / d } else { T::zero() };
            if d == T::zero() {
                d = -T::epsilon() * (x.abs() + T::one());
            }
            if d < T::zero() {
                count += 1;
            }
        }
        count
    };
    let bisect = |target: usize| {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = (a + b) * T::lit(0.5);
            if mid <= a || mid >= b {
                break;
            }
            if count_below(mid) >= target {
                b = mid;
            } else {
                a = mid;
            }
        }
        (a + b) * T::lit(0.5)
    };
    (bisect(1), bisect(m))
}

/// A vector whose squared norm enters the level-set integral.
pub trait LevelVector<T>: Copy {
    fn zero() -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn norm_sq(&self) -> T;
}

impl<T: Real> LevelVector<T> for Spinor<T> {
    fn zero() -> Self {
        Spinor::zero()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn norm_sq(&self) -> T {
        Spinor::norm_sq(self)
    }
}

impl<T: Real> LevelVector<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn plus(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn norm_sq(&self) -> T {
        *self * *self
    }
}

/// `sum_{k,k'} min(f_k, f_k') <v_k, v_k'>` from `(f_k, v_k)` pairs via the
/// level-set decomposition. Ties need no merging: only the first member of a
/// tie carries a nonzero level increment, and its suffix contains the rest.
pub fn level_integral<T: Real, V: LevelVector<T>>(mut items: Vec<(T, V)>) -> T {
    if items.is_empty() {
        return T::zero();
    }
    items.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("NaN filtered by caller"));
    let mut suffix = V::zero();
    let mut suffix_norms = vec![T::zero(); items.len()];
    for (t, (_, v)) in items.iter().enumerate().rev() {
        suffix = suffix.plus(v);
        suffix_norms[t] = suffix.norm_sq();
    }
    let mut acc = items[0].0 * suffix_norms[0];
    for t in 1..items.len() {
        let step = items[t].0 - items[t - 1].0;
        if step > T::zero() {
            acc = acc + step * suffix_norms[t];
        }
    }
    acc
}

/// Evaluates a path functional on every path, rejecting complex or NaN values.
pub fn real_values<T: Real, F: PathFn<T> + ?Sized>(n: u32, f: &F) -> Result<Vec<T>> {
    let mut buf = Vec::with_capacity(n as usize + 1);
    (0..1u64 << n)
        .map(|k| {
            positions_into(n, k, &mut buf);
            let v = f.eval(&buf);
            if v.im != T::zero() {
                return Err(Error::ComplexIntegrand {
                    k,
                    imag: v.im.to_f64_lossy(),
                });
            }
            if v.re.is_nan() {
                return Err(Error::NanIntegrand { k });
            }
            Ok(v.re)
        })
        .collect()
}

/// `G = sum_k v_k v_k^H` with `v_k = P_k phi`.
///
/// Writing `V = [v_0, ..., v_{N-1}]` gives `D_n = V^H V` and `G = V V^H`,
/// which share their nonzero eigenvalues, so the spectrum of `D_n` is that of
/// this 2x2 matrix padded with `N - 2` zeros.
pub fn dual_gram<T: Real>(
    eval: &PathSum,
    coin: &Coin<T>,
    phi: &QubitState<T>,
    n: u32,
) -> Result<Mat2<T>> {
    eval.check_n(n)?;
    let images = path_images(coin, phi.spinor(), n);
    let outer = |v: &Spinor<T>| {
        Mat2::new(
            v.l * v.l.conj(),
            v.l * v.r.conj(),
            v.r * v.l.conj(),
            v.r * v.r.conj(),
        )
    };
    Ok(pairwise(&images, &outer))
}

fn pairwise<T: Real>(vs: &[Spinor<T>], outer: &dyn Fn(&Spinor<T>) -> Mat2<T>) -> Mat2<T> {
    if vs.len() <= 32 {
        return vs.iter().fold(Mat2::zero(), |s, v| s.add(&outer(v)));
    }
    let (a, b) = vs.split_at(vs.len() / 2);
    pairwise(a, outer).add(&pairwise(b, outer))
}

/// Eigenvalues `(min, max)` of the Hermitian part of a 2x2 matrix.
pub fn hermitian_eigenvalues<T: Real>(g: &Mat2<T>) -> (T, T) {
    let half = T::lit(0.5);
    let (a, d) = (g.a.re, g.d.re);
    let off = (g.b + g.c.conj()).scale(half);
    let mid = (a + d) * half;
    let r = ((a - d) * half).hypot(off.norm());
    (mid - r, mid + r)
}

/// Smallest and largest eigenvalue of `D_n` without forming it.
pub fn spectrum_bounds<T: Real>(
    eval: &PathSum,
    coin: &Coin<T>,
    phi: &QubitState<T>,
    n: u32,
) -> Result<(T, T)> {
    let (lo, hi) = hermitian_eigenvalues(&dual_gram(eval, coin, phi, n)?);
    // n >= 2 has more than two paths, so zero is in the spectrum
    Ok(if n >= 2 {
        (lo.min(T::zero()), hi)
    } else {
        (lo, hi)
    })
}

/// `int f dmu_n`, matrix-free. `eval` supplies the enumeration cap.
pub fn quantum_integral<T: Real, F: PathFn<T> + ?Sized>(
    eval: &PathSum,
    coin: &Coin<T>,
    phi: &QubitState<T>,
    n: u32,
    f: &F,
) -> Result<T> {
    eval.check_n(n)?;
    let values = real_values(n, f)?;
    let images = path_images(coin, phi.spinor(), n);
    Ok(level_integral(values.into_iter().zip(images).collect()))
}

/// `||sigma_n(I{w(n) = x}) phi||^2`
pub fn cylinder_distribution<T: Real>(
    eval: &PathSum,
    coin: &Coin<T>,
    phi: &QubitState<T>,
    n: u32,
    x: i64,
) -> Result<T> {
    let s = eval.sigma(coin, n, &PathFunctional::cylinder(x))?;
    Ok(s.apply(phi.spinor()).norm_sq())
}

/// `||sigma_n(I_A) phi||^2` for `A` given as a membership predicate on path
/// indices.
pub fn indicator_norm<T: Real>(
    eval: &PathSum,
    coin: &Coin<T>,
    phi: &QubitState<T>,
    n: u32,
    member: &(dyn Fn(u64) -> bool + Sync),
) -> Result<T> {
    let f = |w: &[i64]| {
        let k = crate::pathspace::index_of_positions(w).expect("enumerated path");
        if member(k) {
            Cx::one()
        } else {
            Cx::zero()
        }
    };
    let s = eval.sigma(coin, n, &f)?;
    Ok(s.apply(phi.spinor()).norm_sq())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{distribution, evolve_recursion};
    use crate::scalar::cx;

    fn ev() -> PathSum {
        PathSum::default()
    }

    #[test]
    fn one_step_hadamard() {
        let d = decoherence_matrix(&Coin::<f64>::hadamard(), &QubitState::left(), 1).unwrap();
        let want = [[0.5, 0.0], [0.0, 0.5]];
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                assert!((d.get(i, j) - cx(*w, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn two_step_diagonal() {
        let d = decoherence_matrix(&Coin::<f64>::hadamard(), &QubitState::left(), 2).unwrap();
        for k in 0..4 {
            assert!((d.get(k, k).re - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn structural_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..4 {
            let c = Coin::<f64>::random(&mut rng);
            let phi = QubitState::random(&mut rng);
            for n in 1..=7 {
                let d = decoherence_matrix(&c, &phi, n).unwrap();
                assert!(d.hermitian_residual() <= 1e-13);
                assert!((d.grand_sum() - cx(1.0, 0.0)).norm() <= 1e-12);
                assert!(d.min_principal_minor(1000, 1) >= -1e-10);
                let (lo, hi) = d.eigen_bounds(64, 2);
                assert!(lo >= -1e-10, "lo={lo}");
                assert!(hi <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn lanczos_matches_dense_eigensolver() {
        use nalgebra::{Complex, DMatrix};
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 1..=5 {
            let c = Coin::<f64>::random(&mut rng);
            let phi = QubitState::random(&mut rng);
            let d = decoherence_matrix(&c, &phi, n).unwrap();
            let m = DMatrix::from_fn(d.dim(), d.dim(), |i, j| {
                let z = d.get(i, j);
                Complex::new(z.re, z.im)
            });
            let eig = m.symmetric_eigenvalues();
            let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let (a, b) = d.eigen_bounds(64, 5);
            assert!((a - lo).abs() < 1e-10, "n={n}: {a} vs {lo}");
            assert!((b - hi).abs() < 1e-10, "n={n}: {b} vs {hi}");
        }
    }

    #[test]
    fn dual_gram_spectrum_matches_dense() {
        use nalgebra::{Complex, DMatrix};
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for n in 1..=6 {
            let c = Coin::<f64>::random(&mut rng);
            let phi = QubitState::random(&mut rng);
            let d = decoherence_matrix(&c, &phi, n).unwrap();
            let m = DMatrix::from_fn(d.dim(), d.dim(), |i, j| {
                let z = d.get(i, j);
                Complex::new(z.re, z.im)
            });
            let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
            eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let g = dual_gram(&ev(), &c, &phi, n).unwrap();
            let (lo, hi) = hermitian_eigenvalues(&g);
            let k = eig.len();
            assert!((eig[k - 1] - hi).abs() < 1e-12, "n={n}");
            assert!((eig[k - 2] - lo).abs() < 1e-12, "n={n}");
            assert!(eig[..k - 2].iter().all(|e| e.abs() < 1e-12));
            // trace of G is the grand diagonal sum of D
            let tr: f64 = (0..d.dim()).map(|i| d.get(i, i).re).sum();
            assert!((g.trace().re - tr).abs() < 1e-12);
            let (a, b) = spectrum_bounds(&ev(), &c, &phi, n).unwrap();
            assert!((b - hi).abs() < 1e-15 && a <= 0.0_f64.max(lo));
        }
    }

    #[test]
    fn hermitian_eigenvalues_closed_form() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let g = Mat2::<f64>::new(cx(2.0, 0.0), cx(0.0, 1.0), cx(0.0, -1.0), cx(2.0, 0.0));
        let (lo, hi) = hermitian_eigenvalues(&g);
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
    }

    #[test]
    fn tridiagonal_bisection() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3
        let (lo, hi) = tridiagonal_extremes(&[2.0f64, 2.0], &[1.0]);
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 3.0).abs() < 1e-12);
        let (lo, hi) = tridiagonal_extremes(&[-4.0f64], &[]);
        assert!((lo + 4.0).abs() < 1e-12 && (hi + 4.0).abs() < 1e-12);
    }

    #[test]
    fn dense_cap() {
        let c = Coin::<f64>::hadamard();
        assert_eq!(
            DecoherenceMatrix::build(&c, &QubitState::left(), 5, 4),
            Err(Error::DenseCap { n: 5, cap: 4 })
        );
    }

    #[test]
    fn integral_of_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let c = Coin::<f64>::random(&mut rng);
        let phi = QubitState::random(&mut rng);
        for n in 1..=8 {
            let one = quantum_integral(&ev(), &c, &phi, n, &PathFunctional::constant(1.0)).unwrap();
            assert!((one - 1.0).abs() < 1e-12);
            for cval in [-2.5, 0.0, 3.75] {
                let v =
                    quantum_integral(&ev(), &c, &phi, n, &PathFunctional::constant(cval)).unwrap();
                let d = decoherence_matrix(&c, &phi, n).unwrap();
                let dense = d.integrate(&vec![cval; d.dim()]);
                assert!((v - cval).abs() < 1e-12);
                assert!((dense - cval).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_free_matches_double_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for n in 1..=8 {
            let c = Coin::<f64>::random(&mut rng);
            let phi = QubitState::random(&mut rng);
            let d = decoherence_matrix(&c, &phi, n).unwrap();
            // signed values with deliberate ties
            let vals: Vec<f64> = (0..d.dim())
                .map(|_| (rng.random_range(-4..4) as f64) * 0.5)
                .collect();
            let table = vals.clone();
            let f = move |w: &[i64]| {
                cx(
                    table[crate::pathspace::index_of_positions(w).unwrap() as usize],
                    0.0,
                )
            };
            let mf = quantum_integral(&ev(), &c, &phi, n, &f).unwrap();
            assert!((mf - d.integrate(&vals)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn shift_by_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let c = Coin::<f64>::random(&mut rng);
        let phi = QubitState::random(&mut rng);
        let n = 6;
        let f = |w: &[i64]| cx((w.iter().sum::<i64>() as f64).sin(), 0.0);
        let g = |w: &[i64]| cx((w.iter().sum::<i64>() as f64).sin() + 1.5, 0.0);
        let a = quantum_integral(&ev(), &c, &phi, n, &f).unwrap();
        let b = quantum_integral(&ev(), &c, &phi, n, &g).unwrap();
        assert!((b - a - 1.5).abs() < 1e-12);
    }

    #[test]
    fn indicator_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let c = Coin::<f64>::random(&mut rng);
        let phi = QubitState::random(&mut rng);
        let n = 7;
        for _ in 0..10 {
            let mask: Vec<bool> = (0..1 << n).map(|_| rng.random_bool(0.4)).collect();
            let m2 = mask.clone();
            let f = move |w: &[i64]| {
                let k = crate::pathspace::index_of_positions(w).unwrap() as usize;
                cx(if m2[k] { 1.0 } else { 0.0 }, 0.0)
            };
            let lhs = quantum_integral(&ev(), &c, &phi, n, &f).unwrap();
            let rhs = indicator_norm(&ev(), &c, &phi, n, &|k| mask[k as usize]).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn complex_integrand_rejected() {
        let c = Coin::<f64>::hadamard();
        let f = PathFunctional::endpoint_exp(0.3);
        assert!(matches!(
            quantum_integral(&ev(), &c, &QubitState::left(), 3, &f),
            Err(Error::ComplexIntegrand { .. })
        ));
    }

    #[test]
    fn cylinders_reproduce_distribution() {
        let c = Coin::<f64>::hadamard();
        let phi = QubitState::left();
        assert!((cylinder_distribution(&ev(), &c, &phi, 2, 0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(cylinder_distribution(&ev(), &c, &phi, 2, 1).unwrap(), 0.0);
        for n in 1..=10 {
            let d = distribution(&evolve_recursion(&c, &phi, n));
            let mut total = 0.0;
            for x in -(n as i64)..=n as i64 {
                let p = cylinder_distribution(&ev(), &c, &phi, n, x).unwrap();
                assert!((p - d.at(x)).abs() <= 1e-12);
                total += p;
            }
            assert!((total - 1.0).abs() <= 1e-12);
        }
    }
}
