use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{canonical_assignments, lpt_simulate, makespan_at};
use crate::rational::{ExtRational, Rational};

/// Largest job count the exhaustive optimum will enumerate.
pub const ORACLE_MAX_JOBS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("jobs must be sorted in nonincreasing order (job {0} exceeds its predecessor)")]
    Unsorted(usize),
    #[error("job {0} has negative size")]
    Negative(usize),
    #[error("{0} jobs exceed the exhaustive-search limit of {ORACLE_MAX_JOBS}")]
    TooManyJobs(usize),
    #[error("need at least one machine")]
    NoMachines,
}

/// LPT makespan, optimal makespan and their exact ratio for one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub lpt_makespan: Rational,
    pub opt_makespan: Rational,
    pub ratio: ExtRational,
    pub lpt_assignment: Vec<usize>,
    pub opt_assignment: Vec<usize>,
}

/// Simulates LPT and finds the optimum by enumerating every canonical assignment.
pub fn brute_oracle(x: &[Rational], m: usize) -> Result<OracleReport, OracleError> {
    if m == 0 {
        return Err(OracleError::NoMachines);
    }
    if let Some(j) = x.iter().position(|v| v.is_negative()) {
        return Err(OracleError::Negative(j + 1));
    }
    if let Some(j) = (1..x.len()).find(|&j| x[j] > x[j - 1]) {
        return Err(OracleError::Unsorted(j + 1));
    }
    if x.len() > ORACLE_MAX_JOBS {
        return Err(OracleError::TooManyJobs(x.len()));
    }
    let lpt = lpt_simulate(x, m);
    let lpt_makespan = makespan_at(x, &lpt.z, m);
    let mut opt: Option<(Rational, Vec<usize>)> = None;
    for z in canonical_assignments(x.len(), m) {
        let c = makespan_at(x, &z, m);
        if opt.as_ref().is_none_or(|(b, _)| c < *b) {
            opt = Some((c, z));
        }
    }
    let (opt_makespan, opt_assignment) = opt.expect("at least one assignment");
    let ratio = if opt_makespan.is_zero() {
        if lpt_makespan.is_zero() {
            ExtRational::Finite(Rational::one())
        } else {
            ExtRational::PosInf
        }
    } else {
        ExtRational::Finite(&lpt_makespan / &opt_makespan)
    };
    Ok(OracleReport { lpt_makespan, opt_makespan, ratio, lpt_assignment: lpt.z, opt_assignment })
}
