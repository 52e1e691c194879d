//! Coins and initial chirality states.

use std::str::FromStr;

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::mat2::{Mat2, Spinor};
use crate::scalar::{cx, expi, Cx, Real};

/// A unitary coin `U = P_minus + P_plus`.
///
/// `p_minus` keeps the top row of `U` and moves the walker left, `p_plus`
/// keeps the bottom row and moves it right. Unitarity is checked once at
/// construction; the fields are private so the split cannot drift from `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coin<T> {
    u: Mat2<T>,
    p_minus: Mat2<T>,
    p_plus: Mat2<T>,
}

impl<T: Real> Coin<T> {
    /// Builds a coin from `[[a, b], [c, d]]`, rejecting non-unitary input at
    /// the default tolerance of `T`.
    pub fn new(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Result<Self> {
        Self::with_tol(Mat2::new(a, b, c, d), T::default_tol())
    }

    pub fn from_matrix(u: Mat2<T>) -> Result<Self> {
        Self::with_tol(u, T::default_tol())
    }

    pub fn with_tol(u: Mat2<T>, tol: T) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::NonFinite);
        }
        let (row, col, dev) = u.unitarity_defect();
        if dev.is_nan() || dev > tol {
            return Err(Error::NotUnitary {
                row,
                col,
                deviation: dev.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
        let z = Cx::zero();
        Ok(Self {
            u,
            p_minus: Mat2::new(u.a, u.b, z, z),
            p_plus: Mat2::new(z, z, u.c, u.d),
        })
    }

    /// The Hadamard coin `(1/sqrt 2) [[1, 1], [1, -1]]`.
    pub fn hadamard() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::from_matrix(Mat2::from_real(h, h, h, -h)).expect("Hadamard is unitary")
    }

    pub fn identity() -> Self {
        Self::from_matrix(Mat2::identity()).expect("identity is unitary")
    }

    /// Random element of U(2):
    /// `e^{i delta} [[cos t e^{i alpha}, sin t e^{i beta}], [-sin t e^{-i beta}, cos t e^{-i alpha}]]`
    /// with `t` uniform in `[0, pi/2]` and the three phases uniform in `[0, 2 pi)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let two_pi = T::TAU();
        let theta = T::lit(rng.random::<f64>()) * T::FRAC_PI_2();
        let delta = T::lit(rng.random::<f64>()) * two_pi;
        let alpha = T::lit(rng.random::<f64>()) * two_pi;
        let beta = T::lit(rng.random::<f64>()) * two_pi;
        let (s, c) = theta.sin_cos();
        let g = expi(delta);
        let u = Mat2::new(
            g * expi(alpha) * c,
            g * expi(beta) * s,
            -(g * expi(-beta) * s),
            g * expi(-alpha) * c,
        );
        Self::from_matrix(u).expect("parameterisation is unitary")
    }

    pub fn u(&self) -> &Mat2<T> {
        &self.u
    }

    /// Left-moving part: top row of `U`.
    pub fn p_minus(&self) -> &Mat2<T> {
        &self.p_minus
    }

    /// Right-moving part: bottom row of `U`.
    pub fn p_plus(&self) -> &Mat2<T> {
        &self.p_plus
    }
}

impl<T: Real> FromStr for Coin<T> {
    type Err = Error;

    /// `"hadamard"` or eight comma separated decimals
    /// `a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("hadamard") {
            return Ok(Self::hadamard());
        }
        let parts = parse_floats(s)?;
        if parts.len() != 8 {
            return Err(Error::Parse(format!(
                "coin spec needs \"hadamard\" or 8 numbers, got {} in {s:?}",
                parts.len()
            )));
        }
        let e = |i: usize| cx(T::lit(parts[i]), T::lit(parts[i + 1]));
        Self::new(e(0), e(2), e(4), e(6))
    }
}

pub(crate) fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{p:?}: {e}")))
        })
        .collect()
}

/// Normalised initial chirality state `phi = alpha |L> + beta |R>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState<T> {
    v: Spinor<T>,
}

impl<T: Real> QubitState<T> {
    pub fn new(alpha: Cx<T>, beta: Cx<T>) -> Result<Self> {
        Self::with_tol(alpha, beta, T::default_tol())
    }

    pub fn with_tol(alpha: Cx<T>, beta: Cx<T>, tol: T) -> Result<Self> {
        if !(crate::scalar::is_finite(alpha) && crate::scalar::is_finite(beta)) {
            return Err(Error::NonFinite);
        }
        let v = Spinor::new(alpha, beta);
        let n = v.norm_sq();
        let dev = (n - T::one()).abs();
        if dev.is_nan() || dev > tol {
            return Err(Error::NotNormalized {
                norm_sq: n.to_f64_lossy(),
            });
        }
        Ok(Self { v })
    }

    /// `|L> = (1, 0)`
    pub fn left() -> Self {
        Self {
            v: Spinor::new(Cx::one(), Cx::zero()),
        }
    }

    /// `|R> = (0, 1)`
    pub fn right() -> Self {
        Self {
            v: Spinor::new(Cx::zero(), Cx::one()),
        }
    }

    /// Uniformly random pure state (normalised complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut g = || {
                // Box-Muller
                let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                let u2: f64 = rng.random();
                let r = (-2.0 * u1.ln()).sqrt();
                let t = std::f64::consts::TAU * u2;
                (r * t.cos(), r * t.sin())
            };
            let (a, b) = g();
            let (c, d) = g();
            let norm = (a * a + b * b + c * c + d * d).sqrt();
            if norm > 1e-6 {
                let alpha = cx(T::lit(a / norm), T::lit(b / norm));
                let beta = cx(T::lit(c / norm), T::lit(d / norm));
                if let Ok(s) = Self::new(alpha, beta) {
                    return s;
                }
            }
        }
    }

    pub fn alpha(&self) -> Cx<T> {
        self.v.l
    }

    pub fn beta(&self) -> Cx<T> {
        self.v.r
    }

    pub fn spinor(&self) -> &Spinor<T> {
        &self.v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_coin_split() {
        let one = cx(1.0, 0.0);
        let zero = cx(0.0, 0.0);
        let c = Coin::<f64>::new(one, zero, zero, one).unwrap();
        assert_eq!(*c.p_minus(), Mat2::from_real(1.0, 0.0, 0.0, 0.0));
        assert_eq!(*c.p_plus(), Mat2::from_real(0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn hadamard_matches_explicit_entries() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let explicit = Coin::<f64>::new(cx(h, 0.0), cx(h, 0.0), cx(h, 0.0), cx(-h, 0.0)).unwrap();
        let c = Coin::<f64>::hadamard();
        assert_eq!(c, explicit);
        for z in c.u().entries() {
            assert!((z.norm() - h).abs() < 1e-16 && z.im == 0.0);
        }
        assert_eq!(*c.p_minus(), Mat2::from_real(h, h, 0.0, 0.0));
        let g = c.u().adjoint().mul(c.u());
        assert!(g.max_abs_diff(&Mat2::identity()) <= 1e-15);
    }

    #[test]
    fn hadamard_p_minus_squared() {
        let c = Coin::<f64>::hadamard();
        let sq = c.p_minus().mul(c.p_minus());
        assert!(sq.max_abs_diff(&Mat2::from_real(0.5, 0.5, 0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn rejects_all_ones() {
        let one = cx(1.0, 0.0);
        match Coin::<f64>::new(one, one, one, one) {
            // U^H U - I = [[1, 2], [2, 1]]
            Err(Error::NotUnitary { deviation, .. }) => assert!((deviation - 2.0).abs() < 1e-15),
            other => panic!("expected NotUnitary, got {other:?}"),
        }
    }

    #[test]
    fn split_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let c = Coin::<f64>::random(&mut rng);
            assert_eq!(c.p_minus().add(c.p_plus()), *c.u());
            assert_eq!(c.p_minus().c, Cx::zero());
            assert_eq!(c.p_minus().d, Cx::zero());
            assert_eq!(c.p_plus().a, Cx::zero());
            assert_eq!(c.p_plus().b, Cx::zero());
        }
    }

    #[test]
    fn random_coins_preserve_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let c = Coin::<f64>::random(&mut rng);
            for _ in 0..100 {
                let phi = QubitState::<f64>::random(&mut rng);
                let out = c.u().apply(phi.spinor());
                assert!((out.norm_sq() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn parses_coin_specs() {
        let c: Coin<f64> = "hadamard".parse().unwrap();
        assert_eq!(c, Coin::hadamard());
        let id: Coin<f64> = "1,0,0,0,0,0,1,0".parse().unwrap();
        assert_eq!(id, Coin::identity());
        assert!(matches!(
            "1,0,1,0,1,0,1,0".parse::<Coin<f64>>(),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!("1,0,0".parse::<Coin<f64>>(), Err(Error::Parse(_))));
        assert!(matches!(
            "x,0,0,0,0,0,1,0".parse::<Coin<f64>>(),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn single_precision_hadamard() {
        let c = Coin::<f32>::hadamard();
        assert!(c.u().unitarity_defect().2 < 1e-6);
    }

    #[test]
    fn qubit_state_validation() {
        assert!(QubitState::<f64>::new(cx(1.0, 0.0), cx(1.0, 0.0)).is_err());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(QubitState::<f64>::new(cx(h, 0.0), cx(0.0, h)).is_ok());
    }
}
