//! Explicit bounds on the k-th prime (Rosser, Dusart).

/// Lower bound `p_k >= k (ln k + ln ln k - 1)`, valid for `k >= 2`.
pub fn nth_prime_lower(k: u64) -> f64 {
    if k < 2 {
        return 2.0;
    }
    let kf = k as f64;
    let l = kf.ln();
    kf * (l + l.ln() - 1.0)
}

/// Upper bound `p_k <= k (ln k + ln ln k)`, valid for `k >= 6`; exact below that.
pub fn nth_prime_upper(k: u64) -> f64 {
    const FIRST: [f64; 6] = [2.0, 2.0, 3.0, 5.0, 7.0, 11.0];
    if k < 6 {
        return FIRST[k as usize];
    }
    let kf = k as f64;
    let l = kf.ln();
    kf * (l + l.ln())
}

/// Cipolla's asymptotic estimate of `p_k`, a starting guess only.
pub fn nth_prime_estimate(k: u64) -> f64 {
    if k < 6 {
        return nth_prime_upper(k);
    }
    let kf = k as f64;
    let l = kf.ln();
    let ll = l.ln();
    kf * (l + ll - 1.0 + (ll - 2.0) / l)
}

/// Integer bracket `(lo, hi)` with `lo < p_k <= hi`.
pub fn nth_prime_bracket(k: u64) -> (u64, u64) {
    let lo = (nth_prime_lower(k) * (1.0 - 1e-12)).floor() as u64;
    let hi = (nth_prime_upper(k) * (1.0 + 1e-12)).ceil() as u64 + 1;
    (lo.saturating_sub(1), hi)
}
