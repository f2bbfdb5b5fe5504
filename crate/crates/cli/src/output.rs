//! CSV writing. Numbers are printed with 15 significant digits, trailing zeros
//! trimmed, fixed notation for exponents in `-5..15` and scientific otherwise.

use std::io::Write;

/// `printf("%.15g")`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV writer with LF line endings that accepts rows of differing lengths, so
/// footer rows can be shorter than the header.
pub fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(true)
        .from_writer(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(num(std::f64::consts::LN_2), "0.693147180559945");
        assert_eq!(num(0.386_427_080_156_826_2), "0.386427080156826");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-2.5), "-2.5");
        assert_eq!(num(1e-7), "1e-07");
        assert_eq!(num(1.234_5e20), "1.2345e+20");
        assert_eq!(num(0.0001), "0.0001");
        assert_eq!(num(123_456.0), "123456");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn rounding_that_changes_the_exponent() {
        assert_eq!(num(9.999_999_999_999_999), "10");
        assert_eq!(num(0.999_999_999_999_999_9), "1");
    }

    #[test]
    fn lf_endings_and_short_footers() {
        let mut w = writer(Vec::new());
        w.write_record(["n", "E_n", "a_n"]).unwrap();
        w.write_record(["estimate", "0.5"]).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text, "n,E_n,a_n\nestimate,0.5\n");
    }
}
