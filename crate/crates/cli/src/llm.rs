//! HTTP chat-completions agent.
//!
//! Speaks the common chat-completions JSON shape: POST {model, messages,
//! temperature, max_tokens}, read choices[0].message.content. The bearer
//! token comes from the environment variable named in the config; it is
//! never logged or persisted.

use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use pte_core::agent::{
    parse_label, AgentError, ChoiceAgent, ChoiceOutcome, ChoiceRequest, SessionState,
};
use pte_core::prompt::INTRO;

#[derive(Debug, Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Debug, Deserialize)]
struct ChatChoice {
    message: ChatContent,
}

#[derive(Debug, Deserialize)]
struct ChatContent {
    content: String,
}

pub struct LlmAgent {
    client: reqwest::blocking::Client,
    endpoint: String,
    model: String,
    token: String,
    temperature: f64,
    max_tokens: u32,
    max_retries: u32,
}

impl LlmAgent {
    pub fn new(
        endpoint: &str,
        model: &str,
        credential_env: &str,
        temperature: f64,
        max_tokens: u32,
        max_retries: u32,
    ) -> Result<Self> {
        let token = std::env::var(credential_env)
            .with_context(|| format!("credential environment variable {credential_env} not set"))?;
        if token.is_empty() {
            bail!("credential environment variable {credential_env} is empty");
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .context("building HTTP client")?;
        Ok(Self {
            client,
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            token,
            temperature,
            max_tokens,
            max_retries,
        })
    }

    fn complete(&self, session: &SessionState, prompt: &str) -> Result<String, AgentError> {
        let mut messages = vec![ChatMessage {
            role: "system",
            content: INTRO,
        }];
        for (past_prompt, reply) in session.history() {
            messages.push(ChatMessage {
                role: "user",
                content: past_prompt,
            });
            messages.push(ChatMessage {
                role: "assistant",
                content: reply,
            });
        }
        messages.push(ChatMessage {
            role: "user",
            content: prompt,
        });
        let body = json!({
            "model": self.model,
            "messages": messages,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        });

        let mut last = String::new();
        for attempt in 0..=self.max_retries {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(500 << attempt.min(6)));
            }
            let sent = self
                .client
                .post(&self.endpoint)
                .bearer_auth(&self.token)
                .json(&body)
                .send();
            match sent.and_then(|r| r.error_for_status()) {
                Ok(response) => match response.json::<ChatResponse>() {
                    Ok(parsed) => {
                        return parsed
                            .choices
                            .into_iter()
                            .next()
                            .map(|c| c.message.content)
                            .ok_or_else(|| AgentError::Transport {
                                message: "empty choices array".to_string(),
                                attempts: attempt + 1,
                            });
                    }
                    Err(e) => last = format!("malformed response body: {e}"),
                },
                Err(e) => last = e.to_string(),
            }
        }
        Err(AgentError::Transport {
            message: last,
            attempts: self.max_retries + 1,
        })
    }
}

impl ChoiceAgent for LlmAgent {
    fn decide(
        &mut self,
        session: &mut SessionState,
        request: &ChoiceRequest<'_>,
    ) -> Result<ChoiceOutcome, AgentError> {
        let reply = self.complete(session, request.prompt)?;
        match parse_label(&reply) {
            Some(label) => Ok(ChoiceOutcome {
                label,
                raw_reply: reply,
                attempts: 1,
            }),
            None => Err(AgentError::UnparseableReply { reply, attempts: 1 }),
        }
    }
}
