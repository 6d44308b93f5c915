//! Plain-text number and table formatting.

use crate::usd::SweepRecord;

pub const VERSION_LINE: &str = concat!("# coherence-lab ", env!("CARGO_PKG_VERSION"));

pub const SWEEP_HEADER: &str =
    "eta,alpha,max,min,at_theta_states,max_vartheta,max_varphi,min_vartheta,min_varphi";

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` with 12 significant digits, like C's `%.12g`.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

/// Sweep records as CSV: version line, header, one row per record.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = format!("{VERSION_LINE}\n{SWEEP_HEADER}\n");
    for r in records {
        let fields = [
            r.eta,
            r.alpha,
            r.max_value,
            r.min_value,
            r.value_at_theta_states,
            r.max_arg.0,
            r.max_arg.1,
            r.min_arg.0,
            r.min_arg.1,
        ];
        out.push_str(&fields.iter().map(|&x| sig12(x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Generic CSV table with a version line.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("{VERSION_LINE}\n{}\n", header.join(","));
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(-0.25), "-0.25");
        assert_eq!(sig12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(1.5e-7), "1.5e-7");
        assert_eq!(sig12(123456789012345.0), "1.23456789012e14");
        assert_eq!(sig12(f64::NAN), "nan");
    }
}
