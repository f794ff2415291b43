//! Numeric formatting for emitted artifacts: six significant digits, `%g` style.

/// Formats `x` with six significant digits, dropping trailing zeros.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Rounding may bump the exponent (e.g. 999999.5 -> 1e+06), so take it
    // from the scientific rendering.
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds `x` to six significant digits.
pub fn round6(x: f64) -> f64 {
    if x.is_finite() {
        sig6(x).parse().expect("sig6 output parses")
    } else {
        x
    }
}
