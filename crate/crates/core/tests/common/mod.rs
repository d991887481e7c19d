#![allow(dead_code)]

use rand::Rng;

const EXPONENTS: [&str; 6] = ["1/2", "3/2", "-1/4", "3/4", "5/3", "7/2"];

fn term<R: Rng>(rng: &mut R) -> String {
    let c = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let k = rng.gen_range(0..=4);
    let side = if rng.gen_bool(0.5) { "1-x" } else { "1+x" };
    match rng.gen_range(0..4) {
        0 => format!("{c}*x^{k}"),
        1 => format!(
            "{c}*({side})^({})",
            EXPONENTS[rng.gen_range(0..EXPONENTS.len())]
        ),
        2 => format!("{c}*x^{k}*ln({side})"),
        _ => format!("{c}*({side})^{k}*ln(2+x)"),
    }
}

/// A sum of one to three closed-form terms, all smooth inside (−1, 1).
pub fn random_dsl<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=3);
    (0..n).map(|_| term(rng)).collect::<Vec<_>>().join(" + ")
}

/// K(x)² for φ = 1/(1−x²), ψ = 1 on [0, 1), at x = 1 − d.
pub fn p1_k_squared(d: f64) -> f64 {
    let x = 1.0 - d;
    (x / (2.0 * d * (2.0 - d)) + 0.25 * ((2.0 - d) / d).ln()) * d
}
