//! Factorials and binomial coefficients for photon-counting factors.

/// Largest `n` whose factorial is finite in `f64`.
pub const MAX_FACTORIAL: u32 = 170;

/// Exact binomial coefficient. Exact for every `n <= 128`; `None` on overflow.
pub fn binomial(n: u32, k: u32) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Binomial coefficient as a float.
pub fn binomial_f64(n: u32, k: u32) -> f64 {
    match binomial(n, k) {
        Some(b) => b as f64,
        None => (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp(),
    }
}

/// `n!` as a float; exact up to `22!`.
pub fn factorial(n: u32) -> f64 {
    assert!(n <= MAX_FACTORIAL, "factorial argument {n} too large");
    (2..=n).fold(1.0, |acc, i| acc * f64::from(i))
}

pub fn sqrt_factorial(n: u32) -> f64 {
    if n <= MAX_FACTORIAL {
        factorial(n).sqrt()
    } else {
        (0.5 * ln_factorial(n)).exp()
    }
}

pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| f64::from(i).ln()).sum()
}

/// Precomputed `√(n!)` for `n = 0..=max`.
#[derive(Clone, Debug)]
pub struct SqrtFactorials(Vec<f64>);

impl SqrtFactorials {
    pub fn new(max: u32) -> Self {
        let mut table = Vec::with_capacity(max as usize + 1);
        let mut acc = 1.0_f64;
        table.push(1.0);
        for n in 1..=max {
            acc *= f64::from(n).sqrt();
            table.push(acc);
        }
        SqrtFactorials(table)
    }

    pub fn get(&self, n: u32) -> f64 {
        self.0.get(n as usize).copied().unwrap_or_else(|| sqrt_factorial(n))
    }
}
