//! SU(2) spin-coherent input states in the Fock basis and their moments.
//!
//! Under the Holstein–Primakoff mapping the state `|λ, j⟩` lives on
//! occupations `0..=2j` with amplitudes `C(|λ|) λ^η / √(η!(2j−η)!)`, so a
//! cutoff of `2j` represents it exactly.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::scalar::{czero, ln_factorial, log_sum_exp, Real};

/// Parameters `(j, λ)` of a spin-coherent state; `j` is stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2CoherentParams<T> {
    two_j: usize,
    lambda: Complex<T>,
}

fn two_j_from<T: Real>(j: T) -> Result<usize> {
    let two_j = j + j;
    let rounded = two_j.round();
    if !j.is_finite() || rounded < T::one() || (two_j - rounded).abs() > T::epsilon() * two_j {
        return Err(Error::InvalidSpin(j.to_f64().unwrap_or(f64::NAN)));
    }
    rounded
        .to_usize()
        .ok_or(Error::InvalidSpin(j.to_f64().unwrap_or(f64::NAN)))
}

impl<T: Real> Su2CoherentParams<T> {
    /// `j` must be a positive half-integer.
    pub fn new(j: T, lambda: Complex<T>) -> Result<Self> {
        let two_j = two_j_from(j)?;
        Self::from_two_j(two_j, lambda)
    }

    pub fn from_two_j(two_j: usize, lambda: Complex<T>) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::InvalidLambda(
                lambda.norm().to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self { two_j, lambda })
    }

    /// `λ = |λ| e^{i·phase}`.
    pub fn from_polar(j: T, magnitude: T, phase: T) -> Result<Self> {
        if magnitude.is_nan() || magnitude < T::zero() {
            return Err(Error::InvalidLambda(magnitude.to_f64().unwrap_or(f64::NAN)));
        }
        Self::new(j, Complex::from_polar(magnitude, phase))
    }

    /// Bloch-sphere angles: `λ = e^{−iφ} tan(θ/2)`.
    pub fn from_angles(j: T, theta: T, phi: T) -> Result<Self> {
        let half = theta / T::lit(2.0);
        Self::new(j, Complex::from_polar(half.tan(), -phi))
    }

    pub fn two_j(&self) -> usize {
        self.two_j
    }

    pub fn j(&self) -> T {
        T::from_count(self.two_j) / T::lit(2.0)
    }

    pub fn lambda(&self) -> Complex<T> {
        self.lambda
    }

    /// Success probability of the equivalent binomial law, `|λ|²/(1+|λ|²)`.
    pub fn binomial_p(&self) -> T {
        let m2 = self.lambda.norm_sqr();
        if m2.is_infinite() {
            T::one()
        } else {
            m2 / (T::one() + m2)
        }
    }
}

/// Log of the unnormalized magnitude `|λ|^η / √(η!(2j−η)!)`.
fn ln_weight<T: Real>(two_j: usize, ln_abs_lambda: T, eta: usize) -> T {
    let power = if eta == 0 {
        T::zero()
    } else {
        T::from_count(eta) * ln_abs_lambda
    };
    power - (ln_factorial::<T>(eta) + ln_factorial::<T>(two_j - eta)) / T::lit(2.0)
}

/// Normalization constant `C(|λ|) = [Σₘ |λ|^{2m}/(m!(2j−m)!)]^{−1/2}`.
pub fn normalization_c<T: Real>(abs_lambda: T, j: T) -> Result<T> {
    let two_j = two_j_from(j)?;
    if !abs_lambda.is_finite() || abs_lambda < T::zero() {
        return Err(Error::InvalidLambda(
            abs_lambda.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let ln_abs = abs_lambda.ln();
    let terms: Vec<T> = (0..=two_j)
        .map(|m| ln_weight(two_j, ln_abs, m) * T::lit(2.0))
        .collect();
    Ok((-log_sum_exp(&terms) / T::lit(2.0)).exp())
}

/// Fock expansion of the spin-coherent state with cutoff `2j`.
pub fn su2_coherent<T: Real>(p: &Su2CoherentParams<T>) -> FockState<T> {
    let two_j = p.two_j;
    let ln_abs = p.lambda.norm().ln();
    let arg = p.lambda.arg();
    let ln_w: Vec<T> = (0..=two_j)
        .map(|eta| ln_weight(two_j, ln_abs, eta))
        .collect();
    let doubled: Vec<T> = ln_w.iter().map(|&w| w * T::lit(2.0)).collect();
    let ln_norm = log_sum_exp(&doubled) / T::lit(2.0);
    let amplitudes = ln_w
        .iter()
        .enumerate()
        .map(|(eta, &w)| {
            let mag = (w - ln_norm).exp();
            if mag == T::zero() {
                czero()
            } else {
                Complex::from_polar(mag, T::from_count(eta) * arg)
            }
        })
        .collect();
    FockState::new(amplitudes).expect("spin-coherent weights are never all zero")
}

/// Input-state moments consumed by the closed-form QFIs and sensitivities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputMoments<T> {
    /// `⟨n̂₁⟩`
    pub mean_n: T,
    /// `⟨n̂₁²⟩`
    pub mean_n_sq: T,
    /// `Δ²n̂₁`
    pub var_n: T,
    /// `ν = ⟨b̂₁⟩`
    pub nu: Complex<T>,
    /// `⟨b̂₁²⟩`
    pub lowering_sq: Complex<T>,
    /// `μ = −(⟨b̂₁²⟩ − ⟨b̂₁⟩²)`
    pub mu: Complex<T>,
    /// `n̄`, same value as `mean_n`.
    pub nbar: T,
}

impl<T: Real> InputMoments<T> {
    /// `Δ²b̂₁ = ⟨b̂₁²⟩ − ⟨b̂₁⟩² = −μ`.
    pub fn lowering_variance(&self) -> Complex<T> {
        -self.mu
    }

    /// `⟨n̂₁⟩ − |⟨b̂₁⟩|²`, the incoherent part of the photon number.
    pub fn incoherent_number(&self) -> T {
        (self.mean_n - self.nu.norm_sqr()).max(T::zero())
    }
}

/// Moments of a single-mode state by direct amplitude sums.
pub fn moments_of<T: Real>(state: &FockState<T>) -> InputMoments<T> {
    let c = state.amplitudes();
    let mut mean_n = T::zero();
    let mut mean_n_sq = T::zero();
    let mut nu = czero();
    let mut lowering_sq = czero();
    for (n, a) in c.iter().enumerate() {
        let nf = T::from_count(n);
        let p = a.norm_sqr();
        mean_n += nf * p;
        mean_n_sq += nf * nf * p;
        if let Some(next) = c.get(n + 1) {
            nu += a.conj() * next * T::from_count(n + 1).sqrt();
        }
        if let Some(next2) = c.get(n + 2) {
            lowering_sq += a.conj() * next2 * (T::from_count(n + 1) * T::from_count(n + 2)).sqrt();
        }
    }
    InputMoments {
        mean_n,
        mean_n_sq,
        var_n: (mean_n_sq - mean_n * mean_n).max(T::zero()),
        nu,
        lowering_sq,
        mu: -(lowering_sq - nu * nu),
        nbar: mean_n,
    }
}

/// Moments of `su2_coherent(p)`.
pub fn input_moments<T: Real>(p: &Su2CoherentParams<T>) -> InputMoments<T> {
    moments_of(&su2_coherent(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn params(j: f64, re: f64) -> Su2CoherentParams<f64> {
        Su2CoherentParams::new(j, Complex::new(re, 0.0)).unwrap()
    }

    #[test]
    fn spin_must_be_positive_half_integer() {
        assert!(Su2CoherentParams::new(0.3, Complex::new(1.0, 0.0)).is_err());
        assert!(Su2CoherentParams::new(0.0, Complex::new(1.0, 0.0)).is_err());
        assert!(Su2CoherentParams::new(-1.0, Complex::new(1.0, 0.0)).is_err());
        assert!(Su2CoherentParams::new(f64::NAN, Complex::new(1.0, 0.0)).is_err());
        assert_eq!(params(1.5, 1.0).two_j(), 3);
        assert!(Su2CoherentParams::new(1.0, Complex::new(f64::INFINITY, 0.0)).is_err());
        assert!(normalization_c(1.0, 0.25).is_err());
        assert!(normalization_c(-1.0, 1.0).is_err());
    }

    #[test]
    fn zero_lambda_is_vacuum() {
        for j in [0.5, 1.0, 2.5] {
            let s = su2_coherent(&params(j, 0.0));
            assert_eq!(s.cutoff(), (2.0 * j) as usize);
            assert_eq!(s.amplitude(0), Complex::new(1.0, 0.0));
            assert!(s.amplitudes()[1..]
                .iter()
                .all(|a| *a == Complex::new(0.0, 0.0)));
            let m = input_moments(&params(j, 0.0));
            assert_eq!((m.mean_n, m.var_n), (0.0, 0.0));
            assert_eq!(m.nu, Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn half_spin_unit_lambda() {
        let s = su2_coherent(&params(0.5, 1.0));
        assert!((s.amplitude(0).re - H).abs() < 1e-15);
        assert!((s.amplitude(1).re - H).abs() < 1e-15);
        let m = input_moments(&params(0.5, 1.0));
        assert!((m.mean_n - 0.5).abs() < 1e-15);
        assert!((m.var_n - 0.25).abs() < 1e-15);
        assert!((m.nu - Complex::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn spin_one_unit_lambda() {
        // (1/√2, 1, 1/√2) normalized by √2
        let s = su2_coherent(&params(1.0, 1.0));
        let expect = [0.5, H, 0.5];
        for (n, e) in expect.iter().enumerate() {
            assert!((s.amplitude(n).re - e).abs() < 1e-15, "n = {n}");
        }
        let m = input_moments(&params(1.0, 1.0));
        assert!((m.mean_n - 1.0).abs() < 1e-14);
        assert!((m.mean_n_sq - 1.5).abs() < 1e-14);
        assert!((m.var_n - 0.5).abs() < 1e-14);
    }

    #[test]
    fn normalization_examples() {
        // λ = 0: C = √((2j)!)
        assert!((normalization_c(0.0, 2.0).unwrap() - 24f64.sqrt()).abs() < 1e-12);
        assert!((normalization_c(1.0, 0.5).unwrap() - H).abs() < 1e-15);
        assert!((normalization_c(1.0, 1.0).unwrap() - H).abs() < 1e-15);
    }

    #[test]
    fn normalization_agrees_with_amplitudes() {
        for (j, lam) in [(1.5, 0.7), (3.0, 2.0), (2.0, 0.1)] {
            let p = params(j, lam);
            let c = normalization_c(lam, j).unwrap();
            let s = su2_coherent(&p);
            for eta in 0..=p.two_j() {
                let direct = c * lam.powi(eta as i32)
                    / (ln_factorial::<f64>(eta).exp() * ln_factorial::<f64>(p.two_j() - eta).exp())
                        .sqrt();
                assert!((s.amplitude(eta).re - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn angle_parametrization() {
        let theta = std::f64::consts::FRAC_PI_2;
        let p = Su2CoherentParams::from_angles(1.0, theta, 0.4).unwrap();
        assert!((p.lambda() - Complex::from_polar(1.0, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn large_spin_does_not_overflow() {
        let s = su2_coherent(&params(20.0, 10.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        let s32 = su2_coherent(&Su2CoherentParams::new(20.0f32, Complex::new(10.0, 0.0)).unwrap());
        assert!((s32.norm_sqr() - 1.0).abs() < 1e-5);
    }
}
