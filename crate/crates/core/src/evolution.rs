//! Position-space and momentum-space time evolution.
//!
//! Three independent routes to the amplitudes `Psi_n(x)`:
//!
//! * [`evolve_recursion`]: `Psi_{t+1}(x) = P_minus Psi_t(x+1) + P_plus Psi_t(x-1)`
//! * [`evolve_fourier`]: `Psi^_n(xi) = U(xi)^n phi` sampled on a uniform grid
//!   and inverted by an exact finite sum
//! * [`field_via_paths`]: `Psi_n(x) = Xi_n(l, m) phi` with `x = m - l`

use serde::Serialize;

use crate::coin::{Coin, QubitState};
use crate::error::{Error, Result};
use crate::mat2::{Mat2, Spinor};
use crate::pathspace::xi_level;
use crate::scalar::{expi, Cx, Real};

/// Amplitudes `Psi_n(x)` on `[-n, n]`, stored densely. Sites with
/// `x + n` odd are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeField<T> {
    n: u32,
    psi: Vec<Spinor<T>>,
}

impl<T: Real> AmplitudeField<T> {
    fn origin(phi: &QubitState<T>) -> Self {
        Self {
            n: 0,
            psi: vec![*phi.spinor()],
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `Psi_n(x)`, zero outside `[-n, n]`.
    pub fn at(&self, x: i64) -> Spinor<T> {
        let n = self.n as i64;
        if x.abs() > n {
            Spinor::zero()
        } else {
            self.psi[(x + n) as usize]
        }
    }

    /// `(x, Psi_n(x))` for every stored site.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Spinor<T>)> {
        let n = self.n as i64;
        self.psi
            .iter()
            .enumerate()
            .map(move |(i, s)| (i as i64 - n, s))
    }

    pub fn total_probability(&self) -> T {
        self.psi.iter().fold(T::zero(), |s, v| s + v.norm_sq())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let n = self.n.max(other.n) as i64;
        (-n..=n)
            .map(|x| self.at(x).max_abs_diff(&other.at(x)))
            .fold(T::zero(), T::max)
    }
}

/// `P(X_n = x)` on `[-n, n]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution<T> {
    pub n: u32,
    pub probs: Vec<T>,
}

impl<T: Real> Distribution<T> {
    pub fn at(&self, x: i64) -> T {
        let n = self.n as i64;
        if x.abs() > n {
            T::zero()
        } else {
            self.probs[(x + n) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        let n = self.n as i64;
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, p)| (i as i64 - n, *p))
    }

    pub fn total(&self) -> T {
        self.probs.iter().fold(T::zero(), |s, p| s + *p)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let n = self.n.max(other.n) as i64;
        (-n..=n)
            .map(|x| (self.at(x) - other.at(x)).abs())
            .fold(T::zero(), T::max)
    }
}

pub fn evolve_recursion<T: Real>(coin: &Coin<T>, phi: &QubitState<T>, n: u32) -> AmplitudeField<T> {
    let (pm, pp) = (*coin.p_minus(), *coin.p_plus());
    let mut field = AmplitudeField::origin(phi);
    for t in 0..n as i64 {
        let next_n = t + 1;
        let psi = (-next_n..=next_n)
            .map(|x| pm.apply(&field.at(x + 1)).add(&pp.apply(&field.at(x - 1))))
            .collect();
        field = AmplitudeField {
            n: next_n as u32,
            psi,
        };
    }
    field
}

/// `U(xi) = e^{-i xi} P_minus + e^{i xi} P_plus = diag(e^{-i xi}, e^{i xi}) U`.
pub fn u_xi<T: Real>(coin: &Coin<T>, xi: T) -> Mat2<T> {
    coin.p_minus()
        .scale(expi(-xi))
        .add(&coin.p_plus().scale(expi(xi)))
}

/// Default Fourier grid size: the smallest power of two `>= 2n + 2`.
pub fn default_samples(n: u32) -> usize {
    (2 * n as usize + 2).next_power_of_two()
}

/// Evolves in momentum space and inverts on `M` uniform samples
/// `xi_j = -pi + 2 pi j / M`. `Psi^_n` is a trigonometric polynomial of degree
/// `<= n`, so any `M >= 2n + 1` recovers it exactly.
pub fn evolve_fourier<T: Real>(
    coin: &Coin<T>,
    phi: &QubitState<T>,
    n: u32,
    samples: Option<usize>,
) -> Result<AmplitudeField<T>> {
    let min = 2 * n as usize + 1;
    let big_m = samples.unwrap_or_else(|| default_samples(n));
    if big_m < min {
        return Err(Error::Aliasing {
            samples: big_m,
            n,
            min,
        });
    }
    let mf = T::from_usize(big_m).unwrap();
    let tau = T::TAU();
    let pi = T::PI();
    let hat: Vec<Spinor<T>> = (0..big_m)
        .map(|j| {
            let xi = -pi + tau * T::from_usize(j).unwrap() / mf;
            u_xi(coin, xi).pow(n as u64).apply(phi.spinor())
        })
        .collect();
    // e^{-2 pi i r / M}
    let twiddle: Vec<Cx<T>> = (0..big_m)
        .map(|r| expi(-tau * T::from_usize(r).unwrap() / mf))
        .collect();
    let ni = n as i64;
    let inv_m = mf.recip();
    let psi = (-ni..=ni)
        .map(|x| {
            if (x + ni) % 2 != 0 {
                return Spinor::zero();
            }
            // e^{-i xi_j x} = (-1)^x e^{-2 pi i j x / M}
            let xm = x.rem_euclid(big_m as i64) as usize;
            let mut acc = Spinor::zero();
            for (j, h) in hat.iter().enumerate() {
                acc = acc.add(&h.scale(twiddle[(j * xm) % big_m]));
            }
            let sign = if x.rem_euclid(2) == 0 { inv_m } else { -inv_m };
            acc.scale(Cx::new(sign, T::zero()))
        })
        .collect();
    Ok(AmplitudeField { n, psi })
}

/// `Psi_n(x) = Xi_n(l, m) phi` from the lattice recursion on path sums.
pub fn field_via_paths<T: Real>(coin: &Coin<T>, phi: &QubitState<T>, n: u32) -> AmplitudeField<T> {
    let level = xi_level(coin, n);
    let ni = n as i64;
    let psi = (-ni..=ni)
        .map(|x| {
            if (x + ni) % 2 != 0 {
                Spinor::zero()
            } else {
                level[((ni + x) / 2) as usize].apply(phi.spinor())
            }
        })
        .collect();
    AmplitudeField { n, psi }
}

/// `P(X_n = x) = |Psi^L_n(x)|^2 + |Psi^R_n(x)|^2`
pub fn distribution<T: Real>(field: &AmplitudeField<T>) -> Distribution<T> {
    Distribution {
        n: field.n,
        probs: field.psi.iter().map(Spinor::norm_sq).collect(),
    }
}

/// `P(X_n = x) = ||Xi_n(l, m) phi||^2`
pub fn distribution_via_paths<T: Real>(
    coin: &Coin<T>,
    phi: &QubitState<T>,
    n: u32,
) -> Distribution<T> {
    distribution(&field_via_paths(coin, phi, n))
}

/// Distribution pipeline selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Paths,
    Recursion,
    Fourier,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paths" => Ok(Self::Paths),
            "recursion" => Ok(Self::Recursion),
            "fourier" => Ok(Self::Fourier),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

pub fn evolve<T: Real>(
    method: Method,
    coin: &Coin<T>,
    phi: &QubitState<T>,
    n: u32,
) -> Result<AmplitudeField<T>> {
    Ok(match method {
        Method::Paths => field_via_paths(coin, phi, n),
        Method::Recursion => evolve_recursion(coin, phi, n),
        Method::Fourier => evolve_fourier(coin, phi, n, None)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathspace::{path_from_index, path_operator};
    use crate::scalar::cx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn oracle_by_enumeration(c: &Coin<f64>, phi: &QubitState<f64>, n: u32) -> Vec<f64> {
        let mut amps = vec![Spinor::zero(); 2 * n as usize + 1];
        for k in 0..1u64 << n {
            let p = path_from_index(n, k).unwrap();
            let x = p.positions()[n as usize];
            let v = path_operator(c, &p).apply(phi.spinor());
            let slot = &mut amps[(x + n as i64) as usize];
            *slot = slot.add(&v);
        }
        amps.iter().map(Spinor::norm_sq).collect()
    }

    #[test]
    fn one_step_hadamard() {
        let c = Coin::<f64>::hadamard();
        let f = evolve_recursion(&c, &QubitState::left(), 1);
        assert!(
            f.at(-1)
                .max_abs_diff(&Spinor::new(cx(H, 0.0), cx(0.0, 0.0)))
                < 1e-16
        );
        assert!(f.at(1).max_abs_diff(&Spinor::new(cx(0.0, 0.0), cx(H, 0.0))) < 1e-16);
        assert_eq!(f.at(0), Spinor::zero());
    }

    #[test]
    fn two_step_hadamard() {
        let c = Coin::<f64>::hadamard();
        let phi = QubitState::left();
        for m in [Method::Paths, Method::Recursion, Method::Fourier] {
            let d = distribution(&evolve(m, &c, &phi, 2).unwrap());
            let want = [0.25, 0.0, 0.5, 0.0, 0.25];
            for (x, p) in d.iter() {
                assert!((p - want[(x + 2) as usize]).abs() < 1e-15, "{m:?} x={x}");
            }
        }
        let oracle = oracle_by_enumeration(&c, &phi, 2);
        assert!((oracle[0] - 0.25).abs() < 1e-15 && (oracle[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_steps_is_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let c = Coin::<f64>::random(&mut rng);
        let phi = QubitState::random(&mut rng);
        for m in [Method::Paths, Method::Recursion, Method::Fourier] {
            let f = evolve(m, &c, &phi, 0).unwrap();
            assert!(f.at(0).max_abs_diff(phi.spinor()) < 1e-15);
            assert_eq!(distribution(&f).probs.len(), 1);
        }
    }

    #[test]
    fn u_xi_examples() {
        let c = Coin::<f64>::hadamard();
        assert!(u_xi(&c, 0.0).max_abs_diff(c.u()) < 1e-16);
        assert!(u_xi(&c, std::f64::consts::PI).max_abs_diff(&(-*c.u())) < 1e-15);
        let want = Mat2::new(cx(0.0, -H), cx(0.0, -H), cx(0.0, H), cx(0.0, -H));
        assert!(u_xi(&c, std::f64::consts::FRAC_PI_2).max_abs_diff(&want) < 1e-15);
        let diag = Mat2::diag(expi(-0.7), expi(0.7)).mul(c.u());
        assert!(u_xi(&c, 0.7).max_abs_diff(&diag) < 1e-15);
    }

    #[test]
    fn u_xi_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let c = Coin::<f64>::random(&mut rng);
        for _ in 0..100 {
            let xi: f64 = rand::Rng::random_range(&mut rng, -10.0..10.0);
            assert!(u_xi(&c, xi).unitarity_defect().2 <= 1e-13);
        }
    }

    #[test]
    fn aliasing_rejected() {
        let c = Coin::<f64>::hadamard();
        assert_eq!(
            evolve_fourier(&c, &QubitState::left(), 4, Some(8)),
            Err(Error::Aliasing {
                samples: 8,
                n: 4,
                min: 9
            })
        );
        assert!(evolve_fourier(&c, &QubitState::left(), 4, Some(9)).is_ok());
    }

    #[test]
    fn fourier_is_sampling_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let c = Coin::<f64>::random(&mut rng);
        let phi = QubitState::random(&mut rng);
        for n in [1u32, 5, 17, 40] {
            let a = evolve_fourier(&c, &phi, n, Some(2 * n as usize + 2)).unwrap();
            let b = evolve_fourier(&c, &phi, n, Some(4 * n as usize + 4)).unwrap();
            let odd = evolve_fourier(&c, &phi, n, Some(2 * n as usize + 1)).unwrap();
            assert!(a.max_abs_diff(&b) <= 1e-12);
            assert!(a.max_abs_diff(&odd) <= 1e-12);
        }
    }

    #[test]
    fn pipelines_agree_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let c = Coin::<f64>::random(&mut rng);
            let phi = QubitState::random(&mut rng);
            for n in 1..=10 {
                let oracle = oracle_by_enumeration(&c, &phi, n);
                for m in [Method::Paths, Method::Recursion, Method::Fourier] {
                    let d = distribution(&evolve(m, &c, &phi, n).unwrap());
                    for (i, p) in d.probs.iter().enumerate() {
                        assert!((p - oracle[i]).abs() <= 1e-12);
                    }
                    assert!((d.total() - 1.0).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn symmetric_initial_state_gives_symmetric_distribution() {
        let c = Coin::<f64>::hadamard();
        let phi = QubitState::new(cx(H, 0.0), cx(0.0, H)).unwrap();
        let d = distribution_via_paths(&c, &phi, 10);
        let oracle = oracle_by_enumeration(&c, &phi, 10);
        for x in 0..=10i64 {
            assert!((d.at(x) - d.at(-x)).abs() <= 1e-12);
            assert!((d.at(x) - oracle[(x + 10) as usize]).abs() <= 1e-12);
        }
    }

    #[test]
    fn one_step_via_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let c = Coin::<f64>::random(&mut rng);
        let d = distribution_via_paths(&c, &QubitState::left(), 1);
        assert!((d.at(-1) - c.u().a.norm_sqr()).abs() < 1e-15);
        assert!((d.at(1) - c.u().c.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn long_fourier_run_is_normalised() {
        let c = Coin::<f64>::hadamard();
        let f = evolve_fourier::<f64>(&c, &QubitState::left(), 500, None).unwrap();
        assert!((f.total_probability() - 1.0).abs() <= 1e-10);
        let d = distribution(&f);
        assert!(d.probs.iter().all(|p| *p >= -1e-14));
    }
}
