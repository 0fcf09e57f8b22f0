//! `Φ_q`, `Ψ_p`, `Θ_{p,q}`, Calderón's `S_{p,q}`, the built-in test operators
//! and the harnesses that check weak-type and Boyd-type inequalities on them.

mod calderon;
mod curve;
mod handle;
mod harness;
pub mod oracle;
mod theta;

pub use calderon::{calderon, calderon_curve, hardy_curve};
pub use curve::{Curve, CurvePiece, PowerTail};
pub use handle::{Image, OperatorHandle};
pub use harness::{
    calderon_boundedness_probe, calderon_domination_check, v_grid, verify_boyd_commutative, verify_phi_moment,
    weak_type_certificate, BoydReport, DominationReport, PhiMomentReport, ProbeReport, WeakTypeCertificate, Witness,
    DIVERGENCE_STEPS, GEOMETRIC_POINTS,
};

pub use theta::{
    phi_q_distribution, psi_p_distribution, theta_distribution, theta_norm, theta_rearrangement_at, PowerPiece,
    PowerSumDistribution,
};
