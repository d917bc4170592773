use num_traits::Zero;

use super::Assignment;
use crate::rational::Rational;
use crate::symexpr::LinExpr;
use crate::trace::{Halt, Oracle, TracedProgram};

/// LPT on `m` machines written against symbolic job sizes.
///
/// Each job goes to the least-loaded machine; machines are scanned in index
/// order and the incumbent is replaced only on a strictly smaller load. With
/// `annotate_max`, the most loaded machine is found the same way (strictly
/// larger load) and recorded in the output.
#[derive(Clone, Copy, Debug)]
pub struct LptProgram {
    pub m: usize,
    pub n: usize,
    pub annotate_max: bool,
}

impl TracedProgram for LptProgram {
    type Output = Assignment;

    fn dim(&self) -> usize {
        self.n
    }

    fn run(&self, x: &[LinExpr], o: &mut dyn Oracle) -> Result<Assignment, Halt> {
        let mut loads = vec![LinExpr::zero(); self.m];
        let mut z = Vec::with_capacity(x.len());
        for xj in x {
            let mut best = 0;
            for i in 1..self.m {
                if o.lt(&loads[i], &loads[best])? {
                    best = i;
                }
            }
            loads[best] += xj;
            z.push(best + 1);
        }
        let max_machine = if self.annotate_max {
            let mut best = 0;
            for i in 1..self.m {
                if o.gt(&loads[i], &loads[best])? {
                    best = i;
                }
            }
            Some(best + 1)
        } else {
            None
        };
        Ok(Assignment { z, max_machine })
    }
}

/// Direct simulation of LPT on concrete sizes, with the same tie-breaking.
pub fn lpt_simulate(x: &[Rational], m: usize) -> Assignment {
    let mut loads = vec![Rational::zero(); m];
    let mut z = Vec::with_capacity(x.len());
    for xj in x {
        let i = (0..m).fold(0, |b, i| if loads[i] < loads[b] { i } else { b });
        loads[i] += xj;
        z.push(i + 1);
    }
    let max = (0..m).fold(0, |b, i| if loads[i] > loads[b] { i } else { b });
    Assignment { z, max_machine: Some(max + 1) }
}
