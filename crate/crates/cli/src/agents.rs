//! Agent construction from configuration.

use anyhow::Result;

use pte_core::agent::{
    AgentError, ChoiceAgent, ChoiceOutcome, ChoicePayload, ChoiceRequest, SessionState,
    SyntheticMarkerAgent, SyntheticPtAgent,
};
use pte_core::pt::PtParams;

use crate::config::AgentConfig;
use crate::llm::LlmAgent;

/// Synthetic agent covering both trial kinds: battery trials go to the
/// planted-PT side, sweep trials to the planted-marker side.
pub struct SyntheticAgent {
    pt: SyntheticPtAgent,
    marker: SyntheticMarkerAgent,
}

impl ChoiceAgent for SyntheticAgent {
    fn decide(
        &mut self,
        session: &mut SessionState,
        request: &ChoiceRequest<'_>,
    ) -> Result<ChoiceOutcome, AgentError> {
        match &request.payload {
            ChoicePayload::Battery { .. } => self.pt.decide(session, request),
            ChoicePayload::Mapping { .. } => self.marker.decide(session, request),
        }
    }
}

pub fn build_agent(config: &AgentConfig) -> Result<Box<dyn ChoiceAgent>> {
    match config {
        AgentConfig::Synthetic {
            sigma,
            lambda,
            gamma,
            marker_probs,
            sharpness,
        } => {
            let params = PtParams::new(*sigma, *lambda, *gamma)?;
            Ok(Box::new(SyntheticAgent {
                pt: SyntheticPtAgent::new(params),
                marker: SyntheticMarkerAgent::new(marker_probs.clone(), *sharpness),
            }))
        }
        AgentConfig::Llm {
            endpoint,
            model,
            credential_env,
            temperature,
            max_tokens,
            max_retries,
        } => Ok(Box::new(LlmAgent::new(
            endpoint,
            model,
            credential_env,
            *temperature,
            *max_tokens,
            *max_retries,
        )?)),
    }
}
