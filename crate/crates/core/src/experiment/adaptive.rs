//! Gradient-triggered grid doubling for the 1D kinetic solvers.

use crate::error::Result;
use crate::solver1d::Solver1D;

/// Trigger state: the grid is doubled once `‖∂ₓS‖∞` reaches twice the value
/// recorded at the previous refinement (or at `t = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveController {
    pub s_ref: f64,
    pub max_levels: usize,
    pub levels: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdaptDecision {
    Keep,
    Refine,
    /// The trigger fired but `max_levels` refinements were already made.
    Cap,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinementEvent {
    pub t: f64,
    pub step: u64,
    /// Cell count after the refinement.
    pub n_x: usize,
    pub s_ref: f64,
}

impl AdaptiveController {
    pub fn new(initial_grad: f64, max_levels: usize) -> Self {
        Self {
            s_ref: initial_grad,
            max_levels,
            levels: 0,
        }
    }

    /// Applies the trigger rule to the current `‖∂ₓS‖∞`; on `Refine` the
    /// reference value is updated.
    pub fn check(&mut self, linf_grad: f64) -> AdaptDecision {
        if !(linf_grad >= 2.0 * self.s_ref) {
            return AdaptDecision::Keep;
        }
        if self.levels >= self.max_levels {
            return AdaptDecision::Cap;
        }
        self.s_ref = linf_grad;
        self.levels += 1;
        AdaptDecision::Refine
    }
}

/// Checks the trigger against the solver's current chemoattractant and
/// doubles its grid when it fires. The caller halves its time step.
pub fn adapt_if_needed(controller: &mut AdaptiveController, solver: &mut Solver1D) -> Result<(AdaptDecision, Option<RefinementEvent>)> {
    let decision = controller.check(solver.chemo().linf_grad());
    if decision != AdaptDecision::Refine {
        return Ok((decision, None));
    }
    solver.refine()?;
    let event = RefinementEvent {
        t: solver.time(),
        step: solver.steps(),
        n_x: solver.grid().n_x(),
        s_ref: controller.s_ref,
    };
    log::info!("refined to {} cells at t = {}", event.n_x, event.t);
    Ok((decision, Some(event)))
}
