//! Closed-form right-hand sides of the step-size inequalities.

use std::f64::consts::SQRT_2;

/// Predictor bound on `mu(z+)^{-1} ||psi(z+)||*_{xbar+}` for `z in N(eta)`
/// and `c_p = alpha_p kappa_x < 1`.
pub fn predictor_proximity_bound(c_p: f64, eta: f64) -> f64 {
    c_p / (1.0 - c_p).powi(2)
        + (2.0 * eta * (SQRT_2 + c_p) + 4.0 * (1.0 + SQRT_2) * c_p)
            / ((1.0 - c_p) * (SQRT_2 - c_p) * (2.0 - c_p * eta))
}

/// Corrector bound on `mu(z+)^{-1} ||psi(z+)||*_{xbar+}` for `z in N(theta)`
/// and `0 <= alpha_c <= 1`.
pub fn corrector_proximity_bound(theta: f64, alpha_c: f64) -> f64 {
    let at = alpha_c * theta;
    (2.0 * (at / (1.0 - at)).powi(2)
        + 4.0 * (1.0 - alpha_c) * theta / (1.0 - at)
        + SQRT_2 * alpha_c * theta * theta)
        / (2.0 - alpha_c * theta * theta)
}

/// Bound on `||n(x+)||_{x+}` after a damped Newton step `x+ = x + alpha n(x)`
/// with `alpha ||n(x)||_x < 1`.
pub fn damped_newton_bound(alpha: f64, newton_norm: f64) -> f64 {
    let an = alpha * newton_norm;
    (an / (1.0 - an)).powi(2) + (1.0 - alpha) * newton_norm / (1.0 - an)
}

/// `|mu+ - mu| / mu` bound after a predictor step with `alpha < 1/kappa_x`.
pub fn predictor_mu_change_bound(alpha: f64, eta: f64, kappa_x: f64, nubar: f64) -> f64 {
    alpha * (1.0 + (1.0 - alpha) * eta * kappa_x / nubar)
}

/// Interval containing `mu+ / mu` after a predictor step.
pub fn predictor_mu_ratio_bounds(alpha: f64, eta: f64, kappa_x: f64, nubar: f64) -> (f64, f64) {
    let t = alpha * eta * kappa_x / nubar;
    ((1.0 - alpha) * (1.0 - t), (1.0 - alpha) * (1.0 + t))
}

/// Lower end of the interval containing `mu+ / mu` after a corrector step
/// from `N(theta)`; the upper end is 1.
pub fn corrector_mu_ratio_lower(alpha: f64, theta: f64, nubar: f64) -> f64 {
    1.0 - alpha * theta * theta / nubar
}

/// The right-hand side `mu+ q^2 / (1 - q)^2` claimed by the original
/// analysis, with `q = mu+^{-1} ||sbar+ + mu+ gbar(xbar)||*_xbar` measured at
/// the old `xbar`. Kept only to reproduce its failure.
pub fn original_claim_bound(mu_plus: f64, q: f64) -> f64 {
    mu_plus * q * q / (1.0 - q).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictor_bound_at_preset_constants() {
        // Hand evaluation: 0.02/0.98^2 + 0.47998/(0.98 * 1.39421 * 1.998).
        assert_close!(predictor_proximity_bound(0.020, 0.10), 0.196647, 1e-5);
        assert!(predictor_proximity_bound(0.020, 0.10) <= 0.20);
        assert!(predictor_proximity_bound(0.025, 0.1225) <= 0.25);
        assert_close!(
            predictor_proximity_bound(0.0, 0.1),
            2.0 * 0.1 * SQRT_2 / (SQRT_2 * 2.0),
            1e-15
        );
    }

    #[test]
    fn corrector_bound_at_preset_constants() {
        // theta = 0.2, alpha = 1: (2 * 0.0625 + sqrt2 * 0.04) / 1.96.
        let expected = (2.0 * 0.0625 + SQRT_2 * 0.04) / 1.96;
        assert_close!(corrector_proximity_bound(0.20, 1.0), expected, 1e-15);
        assert!(corrector_proximity_bound(0.20, 1.0) <= 0.10);
        assert!(corrector_proximity_bound(0.25, 1.0) <= 0.175);
    }

    #[test]
    fn damped_newton_special_cases() {
        assert_close!(damped_newton_bound(1.0, 0.5), 1.0, 1e-15);
        assert_eq!(damped_newton_bound(0.0, 0.3), 0.3);
    }

    #[test]
    fn ratio_bounds_collapse_at_zero_step() {
        assert_eq!(predictor_mu_ratio_bounds(0.0, 0.1, 2.0, 3.0), (1.0, 1.0));
        assert_eq!(predictor_mu_change_bound(0.0, 0.1, 2.0, 3.0), 0.0);
        assert_eq!(corrector_mu_ratio_lower(0.0, 0.3, 3.0), 1.0);
    }
}
