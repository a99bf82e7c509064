//! Independent re-validation of a solution file against its instance.

use capkc_core::lp::KSearch;
use capkc_core::pipeline::{certify, resolve_variant, validate};
use capkc_core::{Error, MetricInstance, Solution};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] Error),
}

/// Checks the assignment, loads, radius and ratio bound, and that
/// `tau_star` is the least candidate threshold that certifies: it
/// certifies, and the candidate below it does not.
pub fn verify_solution(inst: &MetricInstance, sol: &Solution) -> Result<(), VerifyError> {
    let invalid = |m: String| Err(VerifyError::Invalid(m));
    let variant = resolve_variant(inst, sol.variant)?;
    if variant != sol.variant {
        return invalid(format!("variant {} does not match the instance", sol.variant));
    }
    if let Err(e) = validate(inst, sol) {
        return invalid(e.to_string());
    }
    if !sol.certified {
        return invalid("solution is not marked certified".into());
    }
    let candidates = inst.candidate_thresholds();
    let Some(pos) = candidates.iter().position(|t| t == &sol.tau_star) else {
        return invalid("tau_star is not a pairwise distance".into());
    };
    let cert = certify(inst, variant, &sol.tau_star, KSearch::Binary)?;
    let Some(cert) = cert else {
        return invalid("tau_star does not certify".into());
    };
    let ks: Vec<(Vec<usize>, usize)> = cert.components.iter().map(|c| (c.vertices.clone(), c.k)).collect();
    let reported: Vec<(Vec<usize>, usize)> = sol.components.iter().map(|c| (c.vertices.clone(), c.k_i)).collect();
    if ks != reported {
        return invalid("components or k_i differ from the certification".into());
    }
    if pos > 0 && certify(inst, variant, &candidates[pos - 1], KSearch::Binary)?.is_some() {
        return invalid("a smaller threshold also certifies".into());
    }
    Ok(())
}
