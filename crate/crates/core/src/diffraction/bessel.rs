//! Bessel functions of the first kind, orders 0 and 1.
//!
//! Power series for `|u| ≤ 12`, Hankel asymptotic expansion beyond. Both
//! branches stay within about 1e-11 absolute error.

use std::f64::consts::{FRAC_PI_4, PI};

const SERIES_LIMIT: f64 = 12.0;

/// First positive zero of `J1`.
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512_3;

fn series(order: u32, u: f64) -> f64 {
    let half = 0.5 * u;
    let q = -half * half;
    // (u/2)^n / n!
    let mut term = (1..=order).fold(1.0, |acc, k| acc * half / f64::from(k));
    let mut sum = term;
    for k in 1..200u32 {
        term *= q / (f64::from(k) * f64::from(k + order));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn asymptotic(order: u32, u: f64) -> f64 {
    let mu = 4.0 * f64::from(order * order);
    let eight_u = 8.0 * u;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..60u32 {
        let odd = f64::from(2 * k - 1);
        a *= (mu - odd * odd) / (f64::from(k) * eight_u);
        if a.abs() > prev || a == 0.0 {
            break;
        }
        prev = a.abs();
        // signs follow the pattern +Q, −P, −Q, +P, ...
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = u - f64::from(order) * 0.5 * PI - FRAC_PI_4;
    (2.0 / (PI * u)).sqrt() * (p * chi.cos() - q * chi.sin())
}

pub fn j0(u: f64) -> f64 {
    let x = u.abs();
    if x <= SERIES_LIMIT {
        series(0, x)
    } else {
        asymptotic(0, x)
    }
}

pub fn j1(u: f64) -> f64 {
    let x = u.abs();
    let v = if x <= SERIES_LIMIT {
        series(1, x)
    } else {
        asymptotic(1, x)
    };
    if u < 0.0 {
        -v
    } else {
        v
    }
}
