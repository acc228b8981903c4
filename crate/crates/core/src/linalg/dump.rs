//! Plain-text matrix dump: one line per row, tab-separated `re+imi` entries.

use num_complex::Complex64 as C64;

use super::ComplexMatrix;

pub fn format_entry(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

pub fn dump(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = (0..m.cols()).map(|j| format_entry(m[(i, j)])).collect();
        out.push_str(&line.join("\t"));
        out.push('\n');
    }
    out
}
