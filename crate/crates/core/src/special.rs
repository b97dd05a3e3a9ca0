//! Gamma function and ℓp-ball volumes.

/// Lanczos approximation (g = 7, 9 coefficients), |error| < 1e-13 for x > 0.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection formula
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + 7.5;
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Volume of the unit ℓp ball in `R^n`: `(2Γ(1+1/p))^n / Γ(1+n/p)`.
pub fn lp_ball_volume(n: usize, p: f64) -> f64 {
    assert!(p > 0.0);
    (2.0 * gamma(1.0 + 1.0 / p)).powi(n as i32) / gamma(1.0 + n as f64 / p)
}

/// Volume of the unit Euclidean ball in `R^n`.
pub fn euclidean_ball_volume(n: usize) -> f64 {
    lp_ball_volume(n, 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-12);
        assert!((gamma(1.0) - 1.0).abs() < 1e-13);
        assert!((gamma(5.0) - 24.0).abs() < 1e-10);
        assert!((gamma(1.5) - 0.5 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn ball_volumes() {
        assert!((euclidean_ball_volume(2) - PI).abs() < 1e-12);
        assert!((euclidean_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-11);
        // l1 ball = cross-polytope, volume 2^n/n!
        assert!((lp_ball_volume(3, 1.0) - 8.0 / 6.0).abs() < 1e-12);
        // "l∞" limit sanity: large p approaches the cube volume 2^n
        assert!((lp_ball_volume(2, 400.0) - 4.0).abs() < 0.02);
    }
}
