//! Comparison of non-Lindbladian regions between two sweeps on the same grid.

use std::path::Path;

use serde::Serialize;

use crate::error::SweepError;
use crate::pipeline::SweepRecord;
use crate::sweep::read_csv;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseComparison {
    pub points: usize,
    pub count_a: usize,
    pub count_b: usize,
    /// `count_a − count_b`.
    pub difference: i64,
    /// Points non-Lindbladian in both runs.
    pub overlap: usize,
}

/// A point counts as non-Lindbladian when `μ_min` is a number (finite or `inf`) and nonzero.
pub fn is_non_lindbladian(r: &SweepRecord) -> bool {
    !r.mu_min.is_nan() && !r.has_lindbladian
}

pub fn compare_records(a: &[SweepRecord], b: &[SweepRecord]) -> Result<PhaseComparison, SweepError> {
    if a.len() != b.len() {
        return Err(SweepError::GridMismatch(format!("{} vs {} points", a.len(), b.len())));
    }
    let mut cmp = PhaseComparison { points: a.len(), count_a: 0, count_b: 0, difference: 0, overlap: 0 };
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if x.e != y.e || x.omega != y.omega {
            return Err(SweepError::GridMismatch(format!("row {}: ({}, {}) vs ({}, {})", i + 1, x.e, x.omega, y.e, y.omega)));
        }
        let (na, nb) = (is_non_lindbladian(x), is_non_lindbladian(y));
        cmp.count_a += na as usize;
        cmp.count_b += nb as usize;
        cmp.overlap += (na && nb) as usize;
    }
    cmp.difference = cmp.count_a as i64 - cmp.count_b as i64;
    Ok(cmp)
}

pub fn compare_phases(run_a: &Path, run_b: &Path) -> Result<PhaseComparison, SweepError> {
    compare_records(&read_csv(run_a)?, &read_csv(run_b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(e: f64, omega: f64, mu: f64) -> SweepRecord {
        SweepRecord {
            e,
            omega,
            mu_min: mu,
            has_lindbladian: mu == 0.0,
            frobenius_to_exact: 0.0,
            best_branch: 0,
            degenerate_flag: false,
            wall_time_ms: 0,
        }
    }

    #[test]
    fn counts_and_overlap() {
        let a = vec![rec(0.0, 1.0, 0.0), rec(1.0, 1.0, 0.2), rec(2.0, 1.0, f64::INFINITY), rec(3.0, 1.0, f64::NAN)];
        let b = vec![rec(0.0, 1.0, 0.0), rec(1.0, 1.0, 0.0), rec(2.0, 1.0, 0.4), rec(3.0, 1.0, 0.3)];
        let c = compare_records(&a, &b).unwrap();
        assert_eq!((c.count_a, c.count_b, c.difference, c.overlap), (2, 2, 0, 1));
        let same = compare_records(&a, &a).unwrap();
        assert_eq!(same.difference, 0);
    }

    #[test]
    fn grid_mismatch() {
        let a = vec![rec(0.0, 1.0, 0.0)];
        let b = vec![rec(0.0, 1.5, 0.0)];
        assert!(matches!(compare_records(&a, &b), Err(SweepError::GridMismatch(_))));
        assert!(matches!(compare_records(&a, &[]), Err(SweepError::GridMismatch(_))));
    }
}
