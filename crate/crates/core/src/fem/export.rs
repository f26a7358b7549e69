use std::fmt::Write;

use crate::error::{check_len, Result};
use crate::fem::StructuredMesh;
use crate::Real;

/// Formats `x` with `sig` significant digits in the style of C's `%g`.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        format!("{}e{}{:02}", trim_zeros(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Element field as `nely` rows of `nelx` values, top row first.
pub fn field_to_csv<T: Real>(mesh: &StructuredMesh<T>, values: &[T]) -> Result<String> {
    check_len(mesh.n_elements(), values.len())?;
    let mut out = String::new();
    for ey in (0..mesh.nely).rev() {
        for ex in 0..mesh.nelx {
            if ex > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", format_sig(values[mesh.element(ex, ey)].as_f64(), 6));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1412.0, 9), "1412");
        assert_eq!(format_sig(23.84, 9), "23.84");
        assert_eq!(format_sig(0.1 + 0.2, 9), "0.3");
        assert_eq!(format_sig(1.0 / 3.0, 6), "0.333333");
        assert_eq!(format_sig(-2.5e-7, 9), "-2.5e-07");
        assert_eq!(format_sig(123456789012.0, 9), "1.23456789e+11");
        assert_eq!(format_sig(0.0001, 3), "0.0001");
        assert_eq!(format_sig(0.0, 9), "0");
    }

    #[test]
    fn grid_layout() {
        let m = StructuredMesh::<f64>::unit(3, 2).unwrap();
        let v: Vec<f64> = (0..6).map(|e| e as f64).collect();
        // element (ex, ey) = ex·2 + ey; top row is ey = 1
        assert_eq!(field_to_csv(&m, &v).unwrap(), "1,3,5\n0,2,4\n");
    }
}
