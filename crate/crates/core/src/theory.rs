//! Closed-form calendar-time Epps curve of the fine-to-coarse Hawkes model.
//!
//! With `Γ₁₂ = α^(r)/β` and `Γ₁₃ = α^(c)/β`:
//!
//! ```text
//! C¹¹/Δt = Λ + RC₁/(2G₁) + RC₂/(2G₂)
//!          + R [C₂G₁²(e^{−ΔtG₂} − 1) + C₁G₂²(e^{−ΔtG₁} − 1)] / (2G₁²G₂²Δt)
//! C¹²/Δt = −RC₁/(2G₁) + RC₂/(2G₂)
//!          + R [C₂G₁²(e^{−ΔtG₂} − 1) − C₁G₂²(e^{−ΔtG₁} − 1)] / (2G₁²G₂²Δt)
//! ρ(Δt)  = C¹²/C¹¹
//! ```
//!
//! Both rates are half the increment (co)variance rate of `X¹ = N₁ − N₂`; the
//! common factor cancels in `ρ`. The `(e^{−x} − 1)/Δt` terms are evaluated with
//! `expm1` so small `Δt` does not cancel catastrophically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which coefficient multiplies `G₂² e^{−ΔtG₁}` in the variance expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceForm {
    /// `C₁`, which makes `C¹¹/Δt → Λ` as `Δt → 0`.
    #[default]
    Consistent,
    /// `Q₁`, as the expression is commonly printed. Diverges like `1/Δt` near zero.
    PrintedQ1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub lambda: f64,
    pub r: f64,
    pub c1: f64,
    pub c2: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
    pub g1: f64,
    pub g2: f64,
    pub gamma12: f64,
    pub gamma13: f64,
    pub form: VarianceForm,
}

pub fn theory_params(mu: f64, beta: f64, gamma12: f64, gamma13: f64) -> Result<TheoryParams> {
    if !(gamma12 + gamma13 < 1.0) {
        return Err(Error::Domain(format!(
            "Γ12 + Γ13 = {} must be below 1",
            gamma12 + gamma13
        )));
    }
    if !(beta > 0.0) || !(mu >= 0.0) || gamma12 < 0.0 || gamma13 < 0.0 {
        return Err(Error::Domain("need μ >= 0, β > 0 and Γ >= 0".into()));
    }
    let (a, b) = (gamma12, gamma13);
    let sum = a + b;
    let diff = a - b;
    let q_den = ((a + 1.0).powi(2) - b * b) * (1.0 - sum);
    let q1 = -mu * (a * a + a - b * b) / q_den;
    let q2 = -mu * b / q_den;
    Ok(TheoryParams {
        lambda: mu / (1.0 - sum),
        r: beta * mu / (sum - 1.0),
        c1: (2.0 + sum) * sum / (1.0 + sum),
        c2: (2.0 + diff) * diff / (1.0 + diff),
        q1,
        q2,
        q3: q2,
        q4: q1,
        g1: beta * (1.0 + sum),
        g2: beta * (1.0 + diff),
        gamma12,
        gamma13,
        form: VarianceForm::default(),
    })
}

/// Parameters of the fine-to-coarse model `(μ, α^(r), α^(c), β)`.
pub fn theory_params_from_model(mu: f64, alpha_r: f64, alpha_c: f64, beta: f64) -> Result<TheoryParams> {
    theory_params(mu, beta, alpha_r / beta, alpha_c / beta)
}

impl TheoryParams {
    pub fn with_form(mut self, form: VarianceForm) -> Self {
        self.form = form;
        self
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Δt = {dt} must be positive and finite")))
    }
}

/// `(e^{−g dt} − 1) / dt`.
fn decay_rate(g: f64, dt: f64) -> f64 {
    (-g * dt).exp_m1() / dt
}

/// `C¹¹_Δt / Δt`.
pub fn theory_variance_rate(p: &TheoryParams, dt: f64) -> Result<f64> {
    check_dt(dt)?;
    let den = 2.0 * p.g1 * p.g1 * p.g2 * p.g2;
    let plateau = p.lambda + p.r * p.c1 / (2.0 * p.g1) + p.r * p.c2 / (2.0 * p.g2);
    let mut bracket = p.c2 * p.g1 * p.g1 * decay_rate(p.g2, dt);
    bracket += match p.form {
        VarianceForm::Consistent => p.c1 * p.g2 * p.g2 * decay_rate(p.g1, dt),
        VarianceForm::PrintedQ1 => {
            p.q1 * p.g2 * p.g2 * decay_rate(p.g1, dt) + (p.q1 - p.c1) * p.g2 * p.g2 / dt
        }
    };
    Ok(plateau + p.r * bracket / den)
}

/// `C¹²_Δt / Δt`.
pub fn theory_covariance_rate(p: &TheoryParams, dt: f64) -> Result<f64> {
    check_dt(dt)?;
    let den = 2.0 * p.g1 * p.g1 * p.g2 * p.g2;
    let plateau = -p.r * p.c1 / (2.0 * p.g1) + p.r * p.c2 / (2.0 * p.g2);
    let bracket =
        p.c2 * p.g1 * p.g1 * decay_rate(p.g2, dt) - p.c1 * p.g2 * p.g2 * decay_rate(p.g1, dt);
    Ok(plateau + p.r * bracket / den)
}

pub fn theory_rho(p: &TheoryParams, dt: f64) -> Result<f64> {
    Ok(theory_covariance_rate(p, dt)? / theory_variance_rate(p, dt)?)
}

/// `lim_{Δt→∞} ρ = 2Γ₁₃(1 + Γ₁₂) / (1 + Γ₁₃² + 2Γ₁₂ + Γ₁₂²)`.
pub fn theory_rho_limit(gamma12: f64, gamma13: f64) -> Result<f64> {
    if !(gamma12 + gamma13 < 1.0) || gamma12 < 0.0 || gamma13 < 0.0 {
        return Err(Error::Domain(format!(
            "need Γ >= 0 and Γ12 + Γ13 < 1, got ({gamma12}, {gamma13})"
        )));
    }
    let (a, b) = (gamma12, gamma13);
    Ok(2.0 * b * (1.0 + a) / (1.0 + b * b + 2.0 * a + a * a))
}

#[cfg(test)]
mod tests {
    use super::*;

    const G12: f64 = 0.023 / 0.11;
    const G13: f64 = 0.05 / 0.11;

    fn default_model() -> TheoryParams {
        theory_params(0.015, 0.11, G12, G13).unwrap()
    }

    #[test]
    fn parameter_block() {
        let p = default_model();
        assert!((p.lambda - 0.015 / (1.0 - 0.073 / 0.11)).abs() < 1e-15);
        assert!((p.lambda - 0.044_594_594_6).abs() < 1e-10);
        assert!((p.g1 - 0.183).abs() < 1e-12);
        assert!((p.g2 - 0.083).abs() < 1e-12);
        assert!(p.g1 > p.g2 && p.g2 > 0.0);
        assert_eq!(p.q1, p.q4);
        assert_eq!(p.q2, p.q3);
    }

    #[test]
    fn no_cross_coupling_symmetry() {
        let p = theory_params(0.015, 0.11, G12, 0.0).unwrap();
        assert!((p.c1 - p.c2).abs() < 1e-15);
        assert!((p.g1 - p.g2).abs() < 1e-15);
        for dt in [0.01, 1.0, 100.0] {
            assert!(theory_covariance_rate(&p, dt).unwrap().abs() < 1e-15);
            assert!(theory_rho(&p, dt).unwrap().abs() < 1e-12);
        }
        assert_eq!(theory_rho_limit(G12, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn unstable_rejected() {
        assert!(theory_params(0.015, 0.11, 0.6, 0.5).is_err());
        assert!(theory_rho_limit(0.6, 0.5).is_err());
        assert!(theory_rho(&default_model(), 0.0).is_err());
        assert!(theory_variance_rate(&default_model(), -1.0).is_err());
    }

    #[test]
    fn small_scale_limits() {
        let p = default_model();
        let v = theory_variance_rate(&p, 1e-6).unwrap();
        assert!((v / p.lambda - 1.0).abs() < 1e-4);
        assert!(theory_covariance_rate(&p, 1e-6).unwrap().abs() < 1e-6);
        assert!(theory_rho(&p, 1e-6).unwrap() < 1e-4);
    }

    #[test]
    fn large_scale_plateau() {
        let p = default_model();
        let plateau = p.lambda + p.r * p.c1 / (2.0 * p.g1) + p.r * p.c2 / (2.0 * p.g2);
        let drop = p.r * (-p.c1 * p.g2 * p.g2 - p.c2 * p.g1 * p.g1) / (2.0 * p.g1 * p.g1 * p.g2 * p.g2 * 1e6);
        let v = theory_variance_rate(&p, 1e6).unwrap();
        assert!((v - (plateau + drop)).abs() < 1e-8 * v);
        assert!((v - plateau).abs() < 1e-5 * plateau);
    }

    #[test]
    fn limit_value() {
        // 2·(5/11)·(1 + 23/110) / (1 + (5/11)² + 2·23/110 + (23/110)²)
        let want = 2.0 * (50.0 / 110.0) * (133.0 / 110.0)
            / (1.0 + (50.0f64 / 110.0).powi(2) + 46.0 / 110.0 + (23.0f64 / 110.0).powi(2));
        let got = theory_rho_limit(G12, G13).unwrap();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.658_774_58).abs() < 1e-8);
    }

    #[test]
    fn limit_as_coupling_saturates() {
        let g = 1.0 - 1e-9;
        assert!((theory_rho_limit(0.0, g).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn curve_approaches_limit() {
        let p = default_model();
        let lim = theory_rho_limit(G12, G13).unwrap();
        // the gap decays like 1/Δt: about 4e-6 at Δt = 1e6
        assert!((theory_rho(&p, 1e6).unwrap() - lim).abs() < 1e-5);
        assert!((theory_rho(&p, 1e8).unwrap() - lim).abs() < 1e-6);
    }

    #[test]
    fn monotone_and_bounded() {
        let p = default_model();
        let lim = theory_rho_limit(G12, G13).unwrap();
        let mut prev = -1.0;
        for k in 0..1000 {
            let dt = 10f64.powf(-2.0 + 6.0 * k as f64 / 999.0);
            let r = theory_rho(&p, dt).unwrap();
            assert!(r >= 0.0 && r <= lim + 1e-12, "dt = {dt}, rho = {r}");
            assert!(r >= prev - 1e-14, "not monotone at dt = {dt}");
            prev = r;
        }
    }

    #[test]
    fn printed_form_diverges() {
        let p = default_model().with_form(VarianceForm::PrintedQ1);
        assert!(theory_variance_rate(&p, 1e-6).unwrap() > 1e3);
        let c = default_model();
        assert!((theory_variance_rate(&p, 1e6).unwrap() - theory_variance_rate(&c, 1e6).unwrap()).abs() < 1e-10);
    }
}
