//! Claim-Split: few-shot prompting a completion model to break a claim into
//! subclaims, then parsing and count-filtering the result.
//!
//! Model access goes through [`CompletionClient`]; [`ReplayClient`] serves
//! recorded completions keyed by [`prompt_digest`] so nothing on the test
//! path talks to a live model.

mod client;
mod entailment_prompt;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{
    prompt_digest, CompletionClient, CompletionError, CompletionRecord, HttpCompletionClient, HttpCompletionConfig,
    RecordingClient, ReplayClient,
};
pub use entailment_prompt::{parse_answer, EntailmentPrompt};

pub const MIN_SUBCLAIMS: usize = 2;
pub const MAX_SUBCLAIMS: usize = 6;

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("claim text is empty")]
    EmptyClaim,
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("reading template {path}: {source}")]
    TemplateIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("claim {claim_id}: {source}")]
    Client {
        claim_id: String,
        #[source]
        source: CompletionError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotExample {
    pub claim: String,
    pub subclaims: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    #[serde(default)]
    pub name: String,
    pub instruction: String,
    pub examples: Vec<FewShotExample>,
}

const WICE_TEMPLATE: &str = include_str!("../../templates/claimsplit_wice.json");
const DECONTEXTUALIZE_TEMPLATE: &str = include_str!("../../templates/decontextualize.json");

impl PromptTemplate {
    /// The six-example template used to build the WiCE subclaims.
    pub fn wice() -> Self {
        Self::from_json(WICE_TEMPLATE).expect("bundled template is valid")
    }

    /// Template producing standalone sentences, for scoring with
    /// off-the-shelf entailment models.
    pub fn decontextualize() -> Self {
        Self::from_json(DECONTEXTUALIZE_TEMPLATE).expect("bundled template is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, DecomposeError> {
        let template: Self = serde_json::from_str(text).map_err(|e| DecomposeError::InvalidTemplate(e.to_string()))?;
        template.validate()?;
        Ok(template)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DecomposeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DecomposeError::TemplateIo {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), DecomposeError> {
        let bad = |m: String| Err(DecomposeError::InvalidTemplate(m));
        if self.instruction.trim().is_empty() {
            return bad("empty instruction".into());
        }
        if self.examples.is_empty() {
            return bad("no examples".into());
        }
        for (i, ex) in self.examples.iter().enumerate() {
            if ex.claim.trim().is_empty() || ex.claim.contains('\n') {
                return bad(format!("example {i}: claim must be a single non-empty line"));
            }
            if ex.subclaims.is_empty() {
                return bad(format!("example {i}: no subclaims"));
            }
            if ex.subclaims.iter().any(|s| s.trim() != s || s.is_empty() || s.contains('\n')) {
                return bad(format!("example {i}: subclaims must be trimmed single lines"));
            }
        }
        Ok(())
    }
}

fn push_block(out: &mut String, claim: &str) {
    out.push_str("Sentence: ");
    out.push_str(claim);
    out.push_str("\nFacts:");
}

/// Instruction, one `Sentence:/Facts:` block per example, then the target
/// claim followed by a bare `Facts:` for the model to continue.
pub fn render_prompt(template: &PromptTemplate, claim_text: &str) -> Result<String, DecomposeError> {
    if claim_text.trim().is_empty() {
        return Err(DecomposeError::EmptyClaim);
    }
    let mut out = String::new();
    out.push_str(&template.instruction);
    out.push('\n');
    for ex in &template.examples {
        push_block(&mut out, &ex.claim);
        for s in &ex.subclaims {
            out.push_str("\n- ");
            out.push_str(s);
        }
        out.push_str("\n\n");
    }
    push_block(&mut out, claim_text);
    Ok(out)
}

/// Bullet lines (`- text`) in order. Blank lines are skipped; the first
/// other line ends the list.
pub fn parse_subclaims(completion: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in completion.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.strip_prefix("- ") {
            Some(rest) if !rest.trim().is_empty() => out.push(rest.trim().to_string()),
            _ => break,
        }
    }
    out
}

pub fn count_accepted(n: usize) -> bool {
    (MIN_SUBCLAIMS..=MAX_SUBCLAIMS).contains(&n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub claim_id: String,
    pub subclaims: Vec<String>,
    pub raw_completion: String,
    pub accepted: bool,
}

impl Decomposition {
    pub fn from_completion(claim_id: impl Into<String>, raw_completion: impl Into<String>) -> Self {
        let raw_completion = raw_completion.into();
        let subclaims = parse_subclaims(&raw_completion);
        let mut d = Self {
            claim_id: claim_id.into(),
            subclaims,
            raw_completion,
            accepted: false,
        };
        d.accepted = filter_by_count(&d);
        d
    }
}

pub fn filter_by_count(decomposition: &Decomposition) -> bool {
    count_accepted(decomposition.subclaims.len())
}

pub fn decompose(
    claim_id: &str,
    claim_text: &str,
    client: &dyn CompletionClient,
    template: &PromptTemplate,
) -> Result<Decomposition, DecomposeError> {
    let prompt = render_prompt(template, claim_text)?;
    let completion = client.complete(&prompt).map_err(|source| DecomposeError::Client {
        claim_id: claim_id.to_string(),
        source,
    })?;
    Ok(Decomposition::from_completion(claim_id, completion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    struct Canned(&'static str);

    impl CompletionClient for Canned {
        fn complete(&self, _prompt: &str) -> Result<String, CompletionError> {
            Ok(self.0.to_string())
        }
    }

    struct Down;

    impl CompletionClient for Down {
        fn complete(&self, _prompt: &str) -> Result<String, CompletionError> {
            Err(CompletionError::Transport {
                attempts: 4,
                message: "connection refused".into(),
            })
        }
    }

    fn one_example() -> PromptTemplate {
        PromptTemplate {
            name: "t".into(),
            instruction: "Segment the following sentence into individual facts:".into(),
            examples: vec![FewShotExample {
                claim: "Ada wrote code and poems.".into(),
                subclaims: vec!["Ada wrote code.".into(), "Ada wrote poems.".into()],
            }],
        }
    }

    #[test]
    fn render_single_example_layout() {
        let prompt = render_prompt(&one_example(), "Bo is tall.").unwrap();
        assert_eq!(
            prompt,
            "Segment the following sentence into individual facts:\n\
             Sentence: Ada wrote code and poems.\n\
             Facts:\n\
             - Ada wrote code.\n\
             - Ada wrote poems.\n\
             \n\
             Sentence: Bo is tall.\n\
             Facts:"
        );
    }

    #[test]
    fn render_rejects_empty_claim() {
        assert!(matches!(render_prompt(&one_example(), "  "), Err(DecomposeError::EmptyClaim)));
    }

    #[test]
    fn bundled_templates() {
        let wice = PromptTemplate::wice();
        assert_eq!(wice.examples.len(), 6);
        assert_eq!(wice.instruction, "Segment the following sentence into individual facts:");
        let prompt = render_prompt(&wice, "X.").unwrap();
        assert_eq!(prompt.matches("Sentence: ").count(), 7);
        assert!(prompt.ends_with("Sentence: X.\nFacts:"));
        assert!(wice.examples.iter().all(|e| count_accepted(e.subclaims.len())));
        assert!(PromptTemplate::decontextualize().examples.len() >= 3);
    }

    #[test]
    fn template_validation() {
        let mut t = one_example();
        t.examples.clear();
        assert!(t.validate().is_err());
        assert!(PromptTemplate::from_json(r#"{"instruction":"i","examples":[{"claim":"c","subclaims":[" x"]}]}"#).is_err());
        assert!(PromptTemplate::from_json("{").is_err());
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_subclaims("- A.\n- B."), vec!["A.", "B."]);
        assert_eq!(parse_subclaims("- A.\n\nSentence: next\n- B."), vec!["A."]);
        assert!(parse_subclaims("no bullets here").is_empty());
        assert_eq!(parse_subclaims("\n  - A.  \n-B.\n- C."), vec!["A."]);
        assert!(parse_subclaims("").is_empty());
    }

    #[test]
    fn count_filter() {
        assert!(!count_accepted(0));
        assert!(!count_accepted(1));
        assert!(count_accepted(2));
        assert!(count_accepted(3));
        assert!(count_accepted(6));
        assert!(!count_accepted(7));
    }

    #[test]
    fn decompose_with_stub_clients() {
        let t = one_example();
        let d = decompose("c1", "Bo is tall and kind.", &Canned(" - Bo is tall.\n- Bo is kind.\n- Bo exists."), &t).unwrap();
        assert_eq!(d.subclaims.len(), 3);
        assert!(d.accepted);
        let d = decompose("c2", "Bo.", &Canned("Bo is a person."), &t).unwrap();
        assert!(d.subclaims.is_empty());
        assert!(!d.accepted);
        assert_eq!(d.raw_completion, "Bo is a person.");
        match decompose("c3", "Bo.", &Down, &t) {
            Err(DecomposeError::Client { claim_id, .. }) => assert_eq!(claim_id, "c3"),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn example_blocks_round_trip(subs in prop::collection::vec("[A-Za-z][A-Za-z ,.]{0,30}[a-z.]", 1..8)) {
            let t = PromptTemplate {
                name: String::new(),
                instruction: "i".into(),
                examples: vec![FewShotExample { claim: "c".into(), subclaims: subs.clone() }],
            };
            prop_assume!(t.validate().is_ok());
            let prompt = render_prompt(&t, "target").unwrap();
            let block = prompt.split("Facts:\n").nth(1).unwrap();
            prop_assert_eq!(parse_subclaims(block), subs);
        }

        #[test]
        fn filter_depends_only_on_length(n in 0usize..12) {
            let completion: String = (0..n).map(|i| format!("- fact {i}\n")).collect();
            let d = Decomposition::from_completion("c", completion);
            prop_assert_eq!(d.subclaims.len(), n);
            prop_assert_eq!(d.accepted, (2..=6).contains(&n));
        }
    }
}
