//! The univariate sextic
//!
//! ```text
//! s(x) = x⁶/6 − 21x⁵/10 + 57x⁴/8 − x³/12 − 435x²/32 − 297x/32
//! ```
//!
//! has critical points −0.5 (a double root of s′), 1.5, 4.5 and 5.5, with
//! `s(1.5) < s(−0.5) < s(5.5) < s(4.5)`. The local nonglobal minimizer 5.5
//! does not have the second smallest critical value: the stationary point
//! −0.5 lies below it.

use serde::Serialize;

/// Coefficients of x⁶ … x¹.
pub const COEFFICIENTS: [f64; 6] = [1.0 / 6.0, -21.0 / 10.0, 57.0 / 8.0, -1.0 / 12.0, -435.0 / 32.0, -297.0 / 32.0];
/// Labels x₁…x₄ in ascending order.
pub const CRITICAL_POINTS: [f64; 4] = [-0.5, 1.5, 4.5, 5.5];
pub const DERIVATIVE_TOL: f64 = 1e-9;

pub fn s(x: f64) -> f64 {
    COEFFICIENTS.iter().fold(0.0, |acc, &a| (acc + a) * x)
}

pub fn s_prime(x: f64) -> f64 {
    COEFFICIENTS.iter().enumerate().fold(0.0, |acc, (i, &a)| acc * x + (6 - i) as f64 * a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalValue {
    pub label: String,
    pub x: f64,
    pub value: f64,
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SexticDemo {
    pub coefficients: [f64; 6],
    pub critical_points: Vec<CriticalValue>,
    /// Labels in increasing order of `s`.
    pub ordering: Vec<String>,
    pub derivatives_vanish: bool,
    pub ordering_holds: bool,
    pub passed: bool,
}

pub fn sextic_demo() -> SexticDemo {
    let critical_points: Vec<CriticalValue> = CRITICAL_POINTS
        .iter()
        .enumerate()
        .map(|(i, &x)| CriticalValue { label: format!("x{}", i + 1), x, value: s(x), derivative: s_prime(x) })
        .collect();
    let derivatives_vanish = critical_points.iter().all(|c| c.derivative.abs() <= DERIVATIVE_TOL);
    let v = |i: usize| critical_points[i].value;
    // s(x₂) < s(x₁) < s(x₄) < s(x₃)
    let ordering_holds = v(1) < v(0) && v(0) < v(3) && v(3) < v(2);
    let mut by_value: Vec<&CriticalValue> = critical_points.iter().collect();
    by_value.sort_by(|a, b| a.value.total_cmp(&b.value));
    let ordering = by_value.iter().map(|c| c.label.clone()).collect();
    SexticDemo {
        coefficients: COEFFICIENTS,
        critical_points,
        ordering,
        derivatives_vanish,
        ordering_holds,
        passed: derivatives_vanish && ordering_holds,
    }
}

impl SexticDemo {
    pub fn to_text(&self) -> String {
        let mut s = String::from("s(x) = x^6/6 - 21x^5/10 + 57x^4/8 - x^3/12 - 435x^2/32 - 297x/32\n");
        for c in &self.critical_points {
            s.push_str(&format!("  {} = {:>5}: s = {:<22} s' = {:e}\n", c.label, c.x, c.value, c.derivative));
        }
        s.push_str(&format!("  increasing s: {}\n", self.ordering.join(" < ")));
        s.push_str(if self.passed {
            "ordering s(x2) < s(x1) < s(x4) < s(x3) holds\n"
        } else {
            "ordering check FAILED\n"
        });
        s
    }
}
