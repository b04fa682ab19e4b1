//! Numeric output formatting: 12 significant digits, plain decimal where it
//! fits and scientific otherwise (printf `%g` style). This is the precision
//! contract for golden-file comparisons, so the functions here must stay
//! deterministic.

pub const SIG_DIGITS: usize = 12;

/// Format with `sig` significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string(); // covers -0.0 as well
    }
    if !x.is_finite() {
        return format!("{x}");
    }

    // Round once in scientific form to learn the decimal exponent.
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp_str) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp_str.parse().expect("exponent");

    if exp < -4 || exp >= sig as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let prec = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.prec$}"))
    }
}

/// Twelve significant digits, the CLI-wide default.
pub fn fmt12(x: f64) -> String {
    fmt_sig(x, SIG_DIGITS)
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

/// `re+imi` with both parts at 12 significant digits.
pub fn fmt_complex(z: ptsim_core::linalg::Complex64) -> String {
    let sign = if z.im.is_sign_negative() && z.im != 0.0 { "-" } else { "+" };
    format!("{}{}{}i", fmt12(z.re), sign, fmt12(z.im.abs()))
}

/// Render a small complex matrix as bracketed rows.
pub fn fmt_matrix(m: &ptsim_core::linalg::CMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        out.push_str("  [ ");
        for j in 0..m.cols() {
            if j > 0 {
                out.push_str("  ");
            }
            out.push_str(&fmt_complex(m[(i, j)]));
        }
        out.push_str(" ]\n");
    }
    out
}
