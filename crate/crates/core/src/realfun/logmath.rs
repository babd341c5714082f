//! Log-domain arithmetic on `[0, ∞]`, where `-∞` stands for zero.
//!
//! Products follow `0 · ∞ = 0`, so zero absorbs everything.

pub const NEG_INF: f64 = f64::NEG_INFINITY;
pub const POS_INF: f64 = f64::INFINITY;

/// `ln(e^a + e^b)`.
#[inline]
pub fn ln_add(a: f64, b: f64) -> f64 {
    if a == NEG_INF {
        return b;
    }
    if b == NEG_INF {
        return a;
    }
    if a == POS_INF || b == POS_INF {
        return POS_INF;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^a · e^b)` with zero absorbing infinity.
#[inline]
pub fn ln_mul(a: f64, b: f64) -> f64 {
    if a == NEG_INF || b == NEG_INF {
        NEG_INF
    } else {
        a + b
    }
}

/// `ln((e^a)^e)`; `0^e` is `∞` for `e < 0`, and anything to the power 0 is 1.
#[inline]
pub fn ln_pow(a: f64, e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else if a == NEG_INF {
        if e > 0.0 {
            NEG_INF
        } else {
            POS_INF
        }
    } else if a == POS_INF {
        if e > 0.0 {
            POS_INF
        } else {
            NEG_INF
        }
    } else {
        a * e
    }
}

/// `ln(e^a / e^b)` with `0/0 = 0` and `x/∞ = 0`.
#[inline]
pub fn ln_div(a: f64, b: f64) -> f64 {
    ln_mul(a, ln_pow(b, -1.0))
}

/// `ln(e^a - e^b)` for `a ≥ b`; returns `-∞` when the difference is not positive.
#[inline]
pub fn ln_sub(a: f64, b: f64) -> f64 {
    if b == NEG_INF {
        return a;
    }
    if a == POS_INF {
        return POS_INF;
    }
    if b >= a {
        return NEG_INF;
    }
    a + (-(b - a).exp_m1()).ln()
}

/// Log-sum-exp of a slice.
pub fn ln_sum(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(NEG_INF, f64::max);
    if m == NEG_INF || m == POS_INF {
        return m;
    }
    let s: f64 = values.iter().map(|v| (v - m).exp()).sum();
    m + s.ln()
}

/// Converts a log value back to the linear scale.
#[inline]
pub fn lin(a: f64) -> f64 {
    a.exp()
}

/// Log of a nonnegative linear value.
#[inline]
pub fn ln_of(x: f64) -> f64 {
    if x <= 0.0 {
        NEG_INF
    } else {
        x.ln()
    }
}
