//! Empirical freezing of the game conventions under which the Avoider-Enforcer
//! and Client-Waiter boards are read back as QBF outcomes.

use std::fmt;

use bdqbf_core::formula::{PairedSatInstance, QbfFormula};
use bdqbf_core::gadgets::{cw_falsifier_only_clause, paired_sat_to_client_waiter, qbf3_to_avoider_enforcer};
use bdqbf_core::game::{solve_positional, AeRule, Convention, LoneVertexRule, Side, Winner};
use bdqbf_core::qbf::{solve_paired_sat, solve_qbf_oracle};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// QBF player whose win a game winner stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Satisfier,
    Falsifier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AePlayer {
    Avoider,
    Enforcer,
}

/// Avoider-Enforcer setting: move rule, who moves first, and which QBF
/// player Avoider stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AeConfiguration {
    #[serde(default)]
    pub rule: AeRule,
    pub first: AePlayer,
    pub avoider_role: Role,
}

impl AeConfiguration {
    /// The four settings under one move rule.
    pub fn candidates(rule: AeRule) -> [AeConfiguration; 4] {
        let c = |first, avoider_role| AeConfiguration { rule, first, avoider_role };
        [
            c(AePlayer::Avoider, Role::Satisfier),
            c(AePlayer::Avoider, Role::Falsifier),
            c(AePlayer::Enforcer, Role::Satisfier),
            c(AePlayer::Enforcer, Role::Falsifier),
        ]
    }

    pub fn convention(&self) -> Convention {
        let first = match self.first {
            AePlayer::Avoider => Side::Primary,
            AePlayer::Enforcer => Side::Secondary,
        };
        Convention::avoider_enforcer(first).with_ae_rule(self.rule)
    }

    /// QBF truth value predicted by a game result.
    pub fn predicted_truth(&self, winner: Winner) -> bool {
        (winner == Winner::AvoiderWin) == (self.avoider_role == Role::Satisfier)
    }
}

impl fmt::Display for AeConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = match self.rule {
            AeRule::Strict => "strict",
            AeRule::Monotone => "monotone",
        };
        write!(f, "{rule}, {:?} first, Avoider={:?}", self.first, self.avoider_role)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CwConfiguration {
    pub client_role: Role,
    pub lone_vertex: LoneVertexRule,
}

impl CwConfiguration {
    pub const ALL: [CwConfiguration; 2] = [
        CwConfiguration { client_role: Role::Satisfier, lone_vertex: LoneVertexRule::ToClient },
        CwConfiguration { client_role: Role::Falsifier, lone_vertex: LoneVertexRule::ToClient },
    ];

    pub fn convention(&self) -> Convention {
        Convention::client_waiter().with_lone_vertex(self.lone_vertex)
    }

    pub fn predicted_truth(&self, winner: Winner) -> bool {
        (winner == Winner::ClientWin) == (self.client_role == Role::Satisfier)
    }
}

impl fmt::Display for CwConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Client={:?}, lone vertex {:?}", self.client_role, self.lone_vertex)
    }
}

/// Agreement of one candidate configuration with a calibration sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub config: String,
    pub agree: usize,
    pub disagree: usize,
    /// Sample index of the first disagreement.
    pub first_disagreement: Option<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalibrationError {
    #[error("calibration sample is empty")]
    EmptySample,
    #[error("sample {index} cannot be reduced: {reason}")]
    Construction { index: usize, reason: String },
    #[error("sample {index} was not solved within the budget")]
    Unsolved { index: usize },
    #[error("no configuration agrees with all {samples} samples")]
    NoConsistent { samples: usize, tallies: Vec<Tally> },
    #[error("{} configurations agree with all {samples} samples; the sample does not separate them", survivors.len())]
    Ambiguous { samples: usize, survivors: Vec<String>, tallies: Vec<Tally> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration<C> {
    pub frozen: C,
    pub samples: usize,
    pub true_instances: usize,
    pub tallies: Vec<Tally>,
}

/// `observed[k]` holds the truth value and, per candidate, the predicted truth.
fn freeze<C: Copy + fmt::Display>(candidates: &[C], observed: &[(bool, Vec<bool>)]) -> Result<Calibration<C>, CalibrationError> {
    if observed.is_empty() {
        return Err(CalibrationError::EmptySample);
    }
    let tallies: Vec<Tally> = candidates
        .iter()
        .enumerate()
        .map(|(c, cfg)| {
            let mut t = Tally { config: cfg.to_string(), agree: 0, disagree: 0, first_disagreement: None };
            for (k, (truth, predicted)) in observed.iter().enumerate() {
                if predicted[c] == *truth {
                    t.agree += 1;
                } else {
                    t.disagree += 1;
                    t.first_disagreement.get_or_insert(k);
                }
            }
            t
        })
        .collect();
    let survivors: Vec<usize> = (0..candidates.len()).filter(|&c| tallies[c].disagree == 0).collect();
    let samples = observed.len();
    match survivors.as_slice() {
        [] => Err(CalibrationError::NoConsistent { samples, tallies }),
        [c] => Ok(Calibration {
            frozen: candidates[*c],
            samples,
            true_instances: observed.iter().filter(|o| o.0).count(),
            tallies,
        }),
        _ => Err(CalibrationError::Ambiguous {
            samples,
            survivors: survivors.iter().map(|&c| candidates[c].to_string()).collect(),
            tallies,
        }),
    }
}

/// Solves every sample formula and its board under both first players with
/// move rule `rule`, and freezes the unique configuration that reproduces
/// every truth value.
pub fn calibrate_ae_convention(
    sample: &[QbfFormula],
    rule: AeRule,
    budget: u64,
) -> Result<Calibration<AeConfiguration>, CalibrationError> {
    let candidates = AeConfiguration::candidates(rule);
    let mut observed = Vec::with_capacity(sample.len());
    for (index, f) in sample.iter().enumerate() {
        let (h, _) = qbf3_to_avoider_enforcer(f)
            .map_err(|e| CalibrationError::Construction { index, reason: e.to_string() })?;
        let truth = solve_qbf_oracle(f, budget).winner.ok_or(CalibrationError::Unsolved { index })?.is_true();
        let mut winners = [Winner::AvoiderWin; 2];
        for (slot, first) in [AePlayer::Avoider, AePlayer::Enforcer].into_iter().enumerate() {
            let conv = AeConfiguration { rule, first, avoider_role: Role::Satisfier }.convention();
            winners[slot] = solve_positional(&h, conv, budget).winner.ok_or(CalibrationError::Unsolved { index })?;
        }
        let predicted = candidates
            .iter()
            .map(|c| c.predicted_truth(winners[(c.first == AePlayer::Enforcer) as usize]))
            .collect();
        observed.push((truth, predicted));
    }
    freeze(&candidates, &observed)
}

/// Same procedure for the Client-Waiter board. Instances with a clause over
/// Falsifier variables only are decided before construction and skipped.
pub fn calibrate_cw_mapping(sample: &[PairedSatInstance], budget: u64) -> Result<Calibration<CwConfiguration>, CalibrationError> {
    let mut observed = Vec::with_capacity(sample.len());
    for (index, inst) in sample.iter().enumerate() {
        if cw_falsifier_only_clause(inst).is_some() {
            continue;
        }
        let (h, _) = paired_sat_to_client_waiter(inst)
            .map_err(|e| CalibrationError::Construction { index, reason: e.to_string() })?;
        let truth = solve_paired_sat(inst, budget).winner.ok_or(CalibrationError::Unsolved { index })?.is_true();
        let winner = solve_positional(&h, Convention::client_waiter(), budget)
            .winner
            .ok_or(CalibrationError::Unsolved { index })?;
        observed.push((truth, CwConfiguration::ALL.iter().map(|c| c.predicted_truth(winner)).collect()));
    }
    freeze(&CwConfiguration::ALL, &observed)
}

/// Settings every verification report carries. A `None` setting comes with
/// the calibration finding that prevented freezing it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrozenConfiguration {
    pub ae: Option<AeConfiguration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ae_finding: Option<String>,
    pub cw: Option<CwConfiguration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cw_finding: Option<String>,
}

impl FrozenConfiguration {
    /// Strict Avoider-Enforcer play is tried first; only when no strict
    /// setting fits does the monotone rule get its own calibration round.
    pub fn calibrate(ae_sample: &[QbfFormula], cw_sample: &[PairedSatInstance], budget: u64) -> Self {
        let mut frozen = FrozenConfiguration::default();
        if !ae_sample.is_empty() {
            match calibrate_ae_convention(ae_sample, AeRule::Strict, budget) {
                Ok(c) => frozen.ae = Some(c.frozen),
                Err(strict @ CalibrationError::NoConsistent { .. }) => {
                    match calibrate_ae_convention(ae_sample, AeRule::Monotone, budget) {
                        Ok(c) => frozen.ae = Some(c.frozen),
                        Err(e) => frozen.ae_finding = Some(format!("strict: {}; monotone: {}", describe(&strict), describe(&e))),
                    }
                }
                Err(e) => frozen.ae_finding = Some(describe(&e)),
            }
        }
        if !cw_sample.is_empty() {
            match calibrate_cw_mapping(cw_sample, budget) {
                Ok(c) => frozen.cw = Some(c.frozen),
                Err(e) => frozen.cw_finding = Some(describe(&e)),
            }
        }
        frozen
    }
}

fn describe(e: &CalibrationError) -> String {
    let tallies = match e {
        CalibrationError::NoConsistent { tallies, .. } | CalibrationError::Ambiguous { tallies, .. } => tallies,
        _ => return e.to_string(),
    };
    let parts: Vec<String> = tallies.iter().map(|t| format!("[{}] {}/{}", t.config, t.agree, t.agree + t.disagree)).collect();
    format!("{e}: {}", parts.join("; "))
}
