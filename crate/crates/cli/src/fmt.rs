//! Nine-significant-digit rendering shared by CSV and JSON output.

const DIGITS: usize = 9;

/// `%.9g`: fixed notation for decimal exponents in [-5, 9), scientific
/// otherwise; trailing zeros dropped.
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS as i32).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// The value a reader of [`sig`] would recover.
pub fn round(x: f64) -> f64 {
    sig(x).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(1.0), "1");
        assert_eq!(sig(-1.0), "-1");
        assert_eq!(sig(std::f64::consts::PI), "3.14159265");
        assert_eq!(sig(2.0 * 2f64.sqrt()), "2.82842712");
        assert_eq!(sig(0.5), "0.5");
        assert_eq!(sig(1.0 / 15.0), "0.0666666667");
        assert_eq!(sig(1e-7), "1e-07");
        assert_eq!(sig(1.5e-12), "1.5e-12");
        assert_eq!(sig(123456789.0), "123456789");
        assert_eq!(sig(1234567890.0), "1.23456789e+09");
        assert_eq!(sig(0.00012345), "0.00012345");
        assert_eq!(sig(9.999999999), "10");
    }

    #[test]
    fn negative_zero_prints_as_zero() {
        assert_eq!(sig(-0.0), "0");
    }

    #[test]
    fn round_is_idempotent() {
        for x in [0.1, 1.0 / 3.0, -2.5e-9, 6.02214076e23] {
            assert_eq!(round(round(x)), round(x));
        }
    }
}
