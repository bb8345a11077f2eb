//! The fault-injection matrix: one row per fault class, one column per sample.

use serde::{Deserialize, Serialize};

use super::params::{FaultClass, FaultFlags};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Options beyond the total count and faulty fraction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatrixOptions {
    /// Replaces the `round(n_total * fraction / 6)` straylight count.
    pub n_straylight: Option<usize>,
    /// Chance that a faulty column also gets each further non-straylight class.
    pub extra_fault_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectionMatrix {
    n_total: usize,
    n_straylight: usize,
    /// Row-major, `FaultClass::COUNT` rows of `n_total` entries.
    rows: Vec<Vec<bool>>,
}

/// Straylight sample count for a run: `round(n_total * fraction / classes)`.
pub fn straylight_count(n_total: usize, faulty_fraction: f64) -> usize {
    (n_total as f64 * faulty_fraction / FaultClass::COUNT as f64).round() as usize
}

/// Number of faulty columns, `round(n_total * fraction)`.
pub fn faulty_count(n_total: usize, faulty_fraction: f64) -> usize {
    (n_total as f64 * faulty_fraction).round() as usize
}

impl InjectionMatrix {
    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_straylight(&self) -> usize {
        self.n_straylight
    }

    pub fn row(&self, class: FaultClass) -> &[bool] {
        &self.rows[class.row()]
    }

    pub fn get(&self, class: FaultClass, column: usize) -> bool {
        self.rows[class.row()][column]
    }

    pub fn column(&self, column: usize) -> FaultFlags {
        let mut f = FaultFlags::none();
        for c in FaultClass::ALL {
            f.set(c, self.get(c, column));
        }
        f
    }

    pub fn class_count(&self, class: FaultClass) -> usize {
        self.row(class).iter().filter(|&&b| b).count()
    }

    pub fn faulty_columns(&self) -> usize {
        (0..self.n_total).filter(|&i| self.column(i).any()).count()
    }
}

/// Straylight occupies a prefix of `n_straylight` columns. The remaining
/// faulty columns are drawn at random from the rest and each receives one
/// non-straylight class from a shuffled round-robin, which balances the
/// per-class counts; extra classes may then be added with
/// `extra_fault_probability`. Nominal columns stay all zero.
pub fn build_injection_matrix(
    n_total: usize,
    faulty_fraction: f64,
    options: &MatrixOptions,
    rng: &mut SeededRng,
) -> Result<InjectionMatrix> {
    if !(0.0..=1.0).contains(&faulty_fraction) {
        return Err(Error::invalid(format!(
            "faulty_fraction must lie in [0, 1], got {faulty_fraction}"
        )));
    }
    if !(0.0..=1.0).contains(&options.extra_fault_probability) {
        return Err(Error::invalid(format!(
            "extra_fault_probability must lie in [0, 1], got {}",
            options.extra_fault_probability
        )));
    }
    let n_faulty = faulty_count(n_total, faulty_fraction);
    let n_sl = options
        .n_straylight
        .unwrap_or_else(|| straylight_count(n_total, faulty_fraction));
    if n_sl > n_total {
        return Err(Error::invalid(format!("n_straylight {n_sl} exceeds n_total {n_total}")));
    }
    let n_other = n_faulty.saturating_sub(n_sl);

    let mut rows = vec![vec![false; n_total]; FaultClass::COUNT];
    rows[FaultClass::Straylight.row()][..n_sl].fill(true);

    let others: Vec<usize> = rng
        .distinct((n_total - n_sl) as u64, n_other)
        .into_iter()
        .map(|i| n_sl + i as usize)
        .collect();
    let plain = &FaultClass::ALL[..FaultClass::COUNT - 1];
    let mut assigned: Vec<FaultClass> = (0..n_other).map(|i| plain[i % plain.len()]).collect();
    rng.shuffle(&mut assigned);
    for (&col, class) in others.iter().zip(assigned) {
        rows[class.row()][col] = true;
    }
    if options.extra_fault_probability > 0.0 {
        for col in (0..n_sl).chain(others.iter().copied()) {
            for class in plain {
                if !rows[class.row()][col] && rng.bernoulli(options.extra_fault_probability) {
                    rows[class.row()][col] = true;
                }
            }
        }
    }
    Ok(InjectionMatrix {
        n_total,
        n_straylight: n_sl,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_sl(n: usize) -> MatrixOptions {
        MatrixOptions {
            n_straylight: Some(n),
            ..Default::default()
        }
    }

    #[test]
    fn straylight_prefix() {
        let m = build_injection_matrix(10, 0.5, &with_sl(3), &mut SeededRng::new(1)).unwrap();
        let row: Vec<u8> = m.row(FaultClass::Straylight).iter().map(|&b| b as u8).collect();
        assert_eq!(row, [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn zero_fraction_is_nominal() {
        let m = build_injection_matrix(40, 0.0, &MatrixOptions::default(), &mut SeededRng::new(2)).unwrap();
        assert_eq!(m.faulty_columns(), 0);
    }

    #[test]
    fn fraction_bounds() {
        let o = MatrixOptions::default();
        assert!(build_injection_matrix(10, 1.2, &o, &mut SeededRng::new(0)).is_err());
        assert!(build_injection_matrix(10, -0.1, &o, &mut SeededRng::new(0)).is_err());
    }

    #[test]
    fn faulty_count_matches_fraction() {
        let m = build_injection_matrix(101, 0.5, &MatrixOptions::default(), &mut SeededRng::new(3)).unwrap();
        assert_eq!(m.faulty_columns(), 51);
        assert_eq!(m.n_straylight(), 8);
    }
}
