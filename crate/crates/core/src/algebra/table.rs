//! Generator multiplication tables.
//!
//! The product follows the doubling rule
//!
//! ```text
//! (a, b)(c, d) = (a c - d* b, d a + b c*)
//! ```
//!
//! where an element of level `r` is split into its low and high halves of
//! level `r - 1`. Generator `i_p` with `p < 2^(r-1)` is `(i_p, 0)`, and
//! `i_p` with `p >= 2^(r-1)` is `(0, i_(p - 2^(r-1)))`.

use std::sync::OnceLock;

use super::MAX_LEVEL;

/// One entry of a generator table: `i_left * i_right = sign * i_result`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorProduct {
    pub left: usize,
    pub right: usize,
    pub result: usize,
    pub sign: i8,
}

fn conj_sign(p: usize) -> i8 {
    if p == 0 {
        1
    } else {
        -1
    }
}

/// Signed generator product computed directly from the doubling recursion.
pub(crate) fn doubling_product(level: u32, p: usize, q: usize) -> (usize, i8) {
    if level == 0 {
        return (0, 1);
    }
    let half = 1usize << (level - 1);
    match (p < half, q < half) {
        (true, true) => doubling_product(level - 1, p, q),
        // (x, 0)(0, y) = (0, y x)
        (true, false) => {
            let (idx, s) = doubling_product(level - 1, q - half, p);
            (idx + half, s)
        }
        // (0, x)(y, 0) = (0, x y*)
        (false, true) => {
            let (idx, s) = doubling_product(level - 1, p - half, q);
            (idx + half, s * conj_sign(q))
        }
        // (0, x)(0, y) = (-y* x, 0)
        (false, false) => {
            let (idx, s) = doubling_product(level - 1, q - half, p - half);
            (idx, -s * conj_sign(q - half))
        }
    }
}

static TABLES: [OnceLock<Vec<GeneratorProduct>>; MAX_LEVEL as usize + 1] =
    [const { OnceLock::new() }; MAX_LEVEL as usize + 1];

/// The full `2^r x 2^r` table, row-major in `(left, right)`.
///
/// Built once per level on first use.
///
/// # Panics
/// If `level > MAX_LEVEL`.
pub fn generator_table(level: u32) -> &'static [GeneratorProduct] {
    assert!(level <= MAX_LEVEL, "level {level} exceeds MAX_LEVEL");
    TABLES[level as usize].get_or_init(|| {
        let dim = 1usize << level;
        let mut table = Vec::with_capacity(dim * dim);
        for left in 0..dim {
            for right in 0..dim {
                let (result, sign) = doubling_product(level, left, right);
                table.push(GeneratorProduct { left, right, result, sign });
            }
        }
        table
    })
}

/// `i_p * i_q` at the given level.
pub fn generator_product(level: u32, p: usize, q: usize) -> GeneratorProduct {
    let dim = 1usize << level;
    generator_table(level)[p * dim + q]
}

/// Render the multiplication table as rows of signed generator names.
pub fn format_table(level: u32) -> String {
    let dim = 1usize << level;
    let table = generator_table(level);
    let width = format!("-i{}", dim - 1).len();
    let mut out = String::new();
    out.push_str(&format!("{:>width$} |", "*"));
    for q in 0..dim {
        out.push_str(&format!(" {:>width$}", format!("i{q}")));
    }
    out.push('\n');
    out.push_str(&"-".repeat((width + 1) * (dim + 1) + 1));
    out.push('\n');
    for p in 0..dim {
        out.push_str(&format!("{:>width$} |", format!("i{p}")));
        for q in 0..dim {
            let g = table[p * dim + q];
            let name = if g.sign > 0 {
                format!("i{}", g.result)
            } else {
                format!("-i{}", g.result)
            };
            out.push_str(&format!(" {name:>width$}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_closed_and_signed() {
        for level in 0..=5 {
            let dim = 1usize << level;
            let table = generator_table(level);
            assert_eq!(table.len(), dim * dim);
            for g in table {
                assert!(g.result < dim);
                assert!(g.sign == 1 || g.sign == -1);
            }
            // each row is a signed permutation
            for p in 0..dim {
                let mut seen = vec![false; dim];
                for q in 0..dim {
                    let g = generator_product(level, p, q);
                    assert!(!seen[g.result]);
                    seen[g.result] = true;
                }
            }
        }
    }

    #[test]
    fn quaternion_units() {
        let g = generator_product(2, 1, 2);
        assert_eq!((g.result, g.sign), (3, 1));
        let g = generator_product(2, 2, 1);
        assert_eq!((g.result, g.sign), (3, -1));
        let g = generator_product(2, 3, 3);
        assert_eq!((g.result, g.sign), (0, -1));
    }

    #[test]
    fn printed_table_has_a_row_per_generator() {
        let text = format_table(2);
        assert_eq!(text.lines().count(), 2 + 4);
        assert!(text.contains("-i0"));
    }
}
