//! A common interface over the two synthesizers.

use std::time::Instant;

use crate::error::SynthError;
use crate::eusolver::{eusolver_solve, EusolverConfig};
use crate::program::Program;
use crate::task::PbeTask;
use crate::unify::{polygen_solve_until, PolygenConfig};

pub trait PbeSolver: Sync {
    fn name(&self) -> &'static str;

    fn solve(&self, task: &PbeTask, seed: u64, deadline: Option<Instant>) -> Result<Program, SynthError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PolyGen(pub PolygenConfig);

impl PbeSolver for PolyGen {
    fn name(&self) -> &'static str {
        "polygen"
    }

    fn solve(&self, task: &PbeTask, seed: u64, deadline: Option<Instant>) -> Result<Program, SynthError> {
        polygen_solve_until(task, &self.0, seed, deadline)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Eusolver(pub EusolverConfig);

impl PbeSolver for Eusolver {
    fn name(&self) -> &'static str {
        "eusolver"
    }

    fn solve(&self, task: &PbeTask, _seed: u64, deadline: Option<Instant>) -> Result<Program, SynthError> {
        eusolver_solve(task, &self.0, deadline)
    }
}

/// Looks a solver up by its CLI name.
pub fn by_name(name: &str) -> Option<Box<dyn PbeSolver>> {
    match name {
        "polygen" => Some(Box::new(PolyGen::default())),
        "eusolver" => Some(Box::new(Eusolver::default())),
        _ => None,
    }
}
