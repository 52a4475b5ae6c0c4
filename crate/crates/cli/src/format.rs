//! Number formatting for CSV and text reports.

/// `x` with `digits` significant digits in the style of C's `%.{digits}g`:
/// fixed notation for exponents in `[-4, digits)`, scientific otherwise,
/// trailing zeros dropped.
pub fn sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1, "need at least one significant digit");
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

/// `x` with twelve decimals, trailing zeros (and a bare point) removed.
pub fn decimals12(x: f64) -> String {
    let s = format!("{x:.12}");
    match trim_zeros(&s) {
        "-0" => "0".to_string(),
        t => t.to_string(),
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
