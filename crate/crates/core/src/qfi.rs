//! Quantum Fisher information of the interferometer and the matching
//! quantum Cramér–Rao bounds.
//!
//! The two-parameter matrix is written in sum/difference coordinates with
//! generators `Ĥ_s = (n̂₂ + n̂₃)/2` and `Ĥ_d = (n̂₂ − n̂₃)/2`. For a pure state
//! and commuting generators every element is a covariance,
//! `F_ij = 4 Cov(Ĥ_i, Ĥ_j)`, which the closed forms below evaluate from
//! moments of the input modes. [`qfim_oracle`] recomputes the same matrix
//! from finite differences of the propagated state vector.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{FockState, TwoModeState};
use crate::interferometer::{apply_bs, apply_phase, BeamSplitter, PhaseConfig, Scenario};
use crate::scalar::Real;
use crate::states::{input_moments, InputMoments, Su2CoherentParams};

/// Default central-difference step of the oracles.
pub const DEFAULT_STEP: f64 = 1e-5;

/// 2×2 Fisher matrix in `(φ_s, φ_d)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qfim<T> {
    pub f_ss: T,
    pub f_dd: T,
    pub f_sd: T,
}

impl<T: Real> Qfim<T> {
    pub fn zero() -> Self {
        Self {
            f_ss: T::zero(),
            f_dd: T::zero(),
            f_sd: T::zero(),
        }
    }

    pub fn determinant(&self) -> T {
        self.f_ss * self.f_dd - self.f_sd * self.f_sd
    }

    /// Positive semidefinite up to `slack`.
    pub fn is_psd(&self, slack: T) -> bool {
        self.f_ss >= -slack && self.f_dd >= -slack && self.determinant() >= -slack
    }

    /// QFI for a phase on the lower arm only: `F_dd + F_ss − 2F_sd`.
    pub fn single_arm(&self) -> T {
        self.f_dd + self.f_ss - T::lit(2.0) * self.f_sd
    }

    /// `1 / (F⁻¹)_dd = F_dd − F_sd²/F_ss`; `None` when `F_ss = 0`.
    pub fn schur_difference(&self) -> Option<T> {
        (self.f_ss > T::zero()).then(|| self.f_dd - self.f_sd * self.f_sd / self.f_ss)
    }
}

/// Scalar QFIs of the three scenarios with their Cramér–Rao bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiReport<T> {
    /// Single-arm phase.
    pub f_a: T,
    /// Symmetric phase, `(τ⁴+|r|⁴)Δ²n₁ + 2|τr|²⟨n₁⟩` (sum of the arm variances).
    pub f_b: T,
    /// Symmetric phase including the arm covariance; equals `F_dd`.
    pub f_b_exact: T,
    /// Two-parameter (difference phase) QFI, `4|τr|²⟨n₁⟩`.
    pub f_c: T,
    /// Shot-noise information `⟨n₁⟩`.
    pub f_sql: T,
    pub qcrb_a: T,
    pub qcrb_b: T,
    pub qcrb_c: T,
    pub sql: T,
    /// `F_ss = 0`: the Schur-complement route to `f_c` is undefined.
    pub degenerate: bool,
}

/// `1/√F`, infinite when `F ≤ 0`.
pub fn qcrb<T: Real>(f: T) -> T {
    if f > T::zero() {
        T::one() / f.sqrt()
    } else {
        T::infinity()
    }
}

/// Closed-form matrix for a spin-coherent state in mode 1 and vacuum in mode 0.
pub fn qfim_su2<T: Real>(p: &Su2CoherentParams<T>, bs1: &BeamSplitter<T>) -> Qfim<T> {
    qfim_from_moments(&input_moments(p), bs1)
}

pub fn qfim_from_moments<T: Real>(m: &InputMoments<T>, bs1: &BeamSplitter<T>) -> Qfim<T> {
    let contrast = bs1.tau_sq() - bs1.r_sq();
    let tr_sq = bs1.tau_sq() * bs1.r_sq();
    Qfim {
        f_ss: m.var_n,
        f_dd: contrast * contrast * m.var_n + T::lit(4.0) * tr_sq * m.mean_n,
        f_sd: -contrast * m.var_n,
    }
}

pub fn qfi_report_su2<T: Real>(p: &Su2CoherentParams<T>, bs1: &BeamSplitter<T>) -> QfiReport<T> {
    qfi_report_from_moments(&input_moments(p), bs1)
}

pub fn qfi_report_from_moments<T: Real>(
    m: &InputMoments<T>,
    bs1: &BeamSplitter<T>,
) -> QfiReport<T> {
    let four = T::lit(4.0);
    let t2 = bs1.tau_sq();
    let r2 = bs1.r_sq();
    let f_c = four * t2 * r2 * m.mean_n;
    let f_a = four * t2 * t2 * m.var_n + f_c;
    let f_b = (t2 * t2 + r2 * r2) * m.var_n + T::lit(2.0) * t2 * r2 * m.mean_n;
    let f_b_exact = qfim_from_moments(m, bs1).f_dd;
    QfiReport {
        f_a,
        f_b,
        f_b_exact,
        f_c,
        f_sql: m.mean_n,
        qcrb_a: qcrb(f_a),
        qcrb_b: qcrb(f_b),
        qcrb_c: qcrb(f_c),
        sql: qcrb(m.mean_n),
        degenerate: m.var_n == T::zero(),
    }
}

/// Single-mode moments entering the general product-state matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMoments<T> {
    pub mean_n: T,
    pub mean_n_sq: T,
    /// `⟨b̂⟩`
    pub lowering: Complex<T>,
    /// `⟨b̂²⟩`
    pub lowering_sq: Complex<T>,
    /// `⟨n̂b̂⟩`
    pub number_lowering: Complex<T>,
}

impl<T: Real> ModeMoments<T> {
    pub fn of_mode(state: &TwoModeState<T>, mode: usize) -> Result<Self> {
        Ok(Self {
            mean_n: state.expect_number(mode)?,
            mean_n_sq: state.expect_number_sq(mode)?,
            lowering: state.expect_lowering(mode)?,
            lowering_sq: state.expect_lowering_sq(mode)?,
            number_lowering: state.expect_number_lowering(mode)?,
        })
    }

    pub fn of_state(state: &FockState<T>) -> Self {
        let s = TwoModeState::tensor(&FockState::vacuum(0), state);
        Self::of_mode(&s, 1).expect("mode 1 exists")
    }

    pub fn variance(&self) -> T {
        (self.mean_n_sq - self.mean_n * self.mean_n).max(T::zero())
    }

    /// `⟨n̂b̂†⟩ = conj⟨b̂n̂⟩ = conj(⟨n̂b̂⟩ + ⟨b̂⟩)`.
    fn number_raising(&self) -> Complex<T> {
        (self.number_lowering + self.lowering).conj()
    }
}

/// Matrix for an arbitrary product input `|ψ₀⟩ ⊗ |ψ₁⟩`.
///
/// `F_ss` and `F_dd` follow the published element formulas term by term.
/// `F_sd` is the covariance `Cov(n̂₀+n̂₁, n̂₂−n̂₃)` written out in input
/// moments; its mode-0 coherence term enters with a positive sign.
pub fn qfim_general<T: Real>(
    m0: &ModeMoments<T>,
    m1: &ModeMoments<T>,
    bs1: &BeamSplitter<T>,
) -> Qfim<T> {
    let four = T::lit(4.0);
    let eight = T::lit(8.0);
    let contrast = bs1.tau_sq() - bs1.r_sq();
    let tr = bs1.tau() * bs1.r_mag();
    let (v0, v1) = (m0.variance(), m1.variance());
    let (b0, b1) = (m0.lowering, m1.lowering);
    let (n0, n1) = (m0.mean_n, m1.mean_n);

    let f_ss = v0 + v1;

    let coherence = n0 * n1
        - b0.norm_sqr() * b1.norm_sqr()
        - (m0.lowering_sq.conj() * m1.lowering_sq - b0.conj() * b0.conj() * b1 * b1).re;
    let raising_number0 = m0.number_lowering.conj(); // ⟨b̂₀†n̂₀⟩
    let raising_number1 = m1.number_lowering.conj(); // ⟨b̂₁†n̂₁⟩
    let cross_dd =
        ((raising_number0 - b0.conj() * n0) * b1 + b0 * (raising_number1 - b1.conj() * n1)).im;
    let f_dd =
        contrast * contrast * (v0 + v1) + eight * tr * tr * coherence + four * tr * tr * (n0 + n1)
            - eight * tr * contrast * cross_dd;

    let cross_sd = ((m0.number_lowering - b0 * n0) * b1.conj()
        + b0 * (m1.number_raising() - b1.conj() * n1))
        .im;
    let f_sd = contrast * (v0 - v1) + four * tr * cross_sd;

    Qfim { f_ss, f_dd, f_sd }
}

fn check_step<T: Real>(step: T) -> Result<()> {
    if step >= T::lit(1e-8) && step <= T::lit(1e-2) {
        Ok(())
    } else {
        Err(Error::StepOutOfRange(step.to_f64().unwrap_or(f64::NAN)))
    }
}

/// Central difference with one Richardson step: `(4D(h/2) − D(h)) / 3`.
fn richardson_derivative<T, F>(f: F, x: T, step: T) -> Result<TwoModeState<T>>
where
    T: Real,
    F: Fn(T) -> TwoModeState<T>,
{
    let two = T::lit(2.0);
    let coarse = TwoModeState::difference_quotient(&f(x + step), &f(x - step), two * step)?;
    let half = step / two;
    let fine = TwoModeState::difference_quotient(&f(x + half), &f(x - half), step)?;
    let amplitudes = fine
        .amplitudes()
        .iter()
        .zip(coarse.amplitudes())
        .map(|(a, b)| (a * T::lit(4.0) - b) / T::lit(3.0))
        .collect();
    Ok(TwoModeState::from_unitary_output(
        fine.cutoffs(),
        amplitudes,
    ))
}

fn fisher_element<T: Real>(
    psi: &TwoModeState<T>,
    di: &TwoModeState<T>,
    dj: &TwoModeState<T>,
) -> Result<T> {
    let overlap = TwoModeState::inner(di, dj)?;
    let proj = TwoModeState::inner(di, psi)? * TwoModeState::inner(psi, dj)?;
    Ok(T::lit(4.0) * (overlap - proj).re)
}

/// Finite-difference Fisher matrix of `apply_phase(apply_bs(input, bs1))`
/// around `(φ_s, φ_d) = base`.
pub fn qfim_oracle<T: Real>(
    input: &TwoModeState<T>,
    bs1: &BeamSplitter<T>,
    base: (T, T),
    step: T,
) -> Result<Qfim<T>> {
    check_step(step)?;
    let arms = apply_bs(input, bs1)?;
    let (s0, d0) = base;
    let at = |s: T, d: T| apply_phase(&arms, &PhaseConfig::from_sum_difference(s, d));
    let psi = at(s0, d0);
    let ds = richardson_derivative(|s| at(s, d0), s0, step)?;
    let dd = richardson_derivative(|d| at(s0, d), d0, step)?;
    Ok(Qfim {
        f_ss: fisher_element(&psi, &ds, &ds)?,
        f_dd: fisher_element(&psi, &dd, &dd)?,
        f_sd: fisher_element(&psi, &ds, &dd)?,
    })
}

/// Finite-difference QFI of one scenario at phase `phi`. For the
/// two-parameter scenario this is the Schur complement of the oracle matrix
/// (zero when `F_ss` vanishes).
pub fn qfi_oracle<T: Real>(
    input: &TwoModeState<T>,
    bs1: &BeamSplitter<T>,
    scenario: Scenario,
    phi: T,
    step: T,
) -> Result<T> {
    check_step(step)?;
    match scenario {
        Scenario::TwoParam => {
            let m = qfim_oracle(input, bs1, (phi, phi), step)?;
            Ok(m.schur_difference().unwrap_or(T::zero()))
        }
        _ => {
            let arms = apply_bs(input, bs1)?;
            let at = |x: T| apply_phase(&arms, &scenario.config(x));
            let psi = at(phi);
            let d = richardson_derivative(at, phi, step)?;
            fisher_element(&psi, &d, &d)
        }
    }
}
