//! Thin wrappers over `libm` so the numerical code reads like `std`.

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `|t|^e` with fast paths for the integer exponents used in practice.
#[inline]
pub(crate) fn abs_pow(t: f64, e: f64) -> f64 {
    let a = abs(t);
    if e == 1.0 {
        a
    } else if e == 2.0 {
        a * a
    } else if e == 3.0 {
        a * a * a
    } else if e == 0.0 {
        1.0
    } else {
        powf(a, e)
    }
}

/// Signed power `[t]^{l-1} = |t|^{l-2} t`.
#[inline]
pub(crate) fn signed_pow(t: f64, l: f64) -> f64 {
    if l == 2.0 {
        t
    } else if l == 3.0 {
        abs(t) * t
    } else if t == 0.0 {
        0.0
    } else {
        let m = powf(abs(t), l - 1.0);
        if t < 0.0 {
            -m
        } else {
            m
        }
    }
}

/// Riemann zeta `ζ(x)` for real `x ≠ 1` by Euler–Maclaurin summation.
pub(crate) fn zeta(x: f64) -> f64 {
    const N: usize = 16;
    // B_{2j} / (2j)!
    const COEFF: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let n = N as f64;
    let mut sum = 0.0;
    for k in 1..N {
        sum += powf(k as f64, -x);
    }
    sum += powf(n, 1.0 - x) / (x - 1.0) + 0.5 * powf(n, -x);
    let mut rising = x;
    let mut p = powf(n, -x - 1.0);
    for (j, c) in COEFF.iter().enumerate() {
        sum += c * rising * p;
        let m = 2 * j as i32 + 1;
        rising *= (x + m as f64) * (x + m as f64 + 1.0);
        p /= n * n;
    }
    sum
}
