//! Number formatting shared by reports and the CLI.

/// Formats like C's `%.9g`: nine significant digits, trailing zeros removed.
pub fn sig9(x: f64) -> String {
    sig(x, 9)
}

pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", mant, sign, exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(2.381097845541816), "2.38109785");
        assert_eq!(sig9(14937.98148), "14937.9815");
        assert_eq!(sig9(3814279.1047602206), "3814279.1");
        assert_eq!(sig9(5.811082807e31), "5.81108281e+31");
        assert_eq!(sig9(0.000123456789123), "0.000123456789");
        assert_eq!(sig9(1.5e-7), "1.5e-07");
        assert_eq!(sig9(-42.0), "-42");
        assert_eq!(sig9(999999999.7), "1e+09");
    }
}
