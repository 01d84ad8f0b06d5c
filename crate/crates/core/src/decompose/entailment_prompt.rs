use crate::corpus::EntailmentLabel;

use super::DecomposeError;

const BUILTIN: &str = include_str!("../../templates/entailment_xml.txt");

/// Few-shot prompt asking a chat model for an explanation plus a
/// three-way label in XML. The template holds one `{claim}` placeholder
/// followed by one `{evidence}` placeholder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntailmentPrompt {
    template: String,
}

impl EntailmentPrompt {
    pub fn builtin() -> Self {
        Self::new(BUILTIN).expect("bundled prompt is valid")
    }

    pub fn new(template: impl Into<String>) -> Result<Self, DecomposeError> {
        let template = template.into();
        let claim = template.find("{claim}");
        let evidence = template.find("{evidence}");
        match (claim, evidence) {
            (Some(c), Some(e)) if c < e && template.matches("{claim}").count() == 1 && template.matches("{evidence}").count() == 1 => {
                Ok(Self { template })
            }
            _ => Err(DecomposeError::InvalidTemplate(
                "expected one {claim} placeholder followed by one {evidence} placeholder".into(),
            )),
        }
    }

    /// Evidence sentences become `<sentence_N>` elements, one per line.
    pub fn render(&self, claim: &str, evidence: &[(usize, &str)]) -> String {
        let evidence: Vec<String> = evidence
            .iter()
            .map(|(i, s)| format!("        <sentence_{i}>{s}</sentence_{i}>"))
            .collect();
        let (head, rest) = self.template.split_once("{claim}").expect("validated");
        let (middle, tail) = rest.split_once("{evidence}").expect("validated");
        format!("{head}{claim}{middle}{}{tail}", evidence.join("\n"))
    }
}

/// The label inside the first `<answer>` element, if it names one.
pub fn parse_answer(completion: &str) -> Option<EntailmentLabel> {
    let start = completion.find("<answer>")? + "<answer>".len();
    let end = completion[start..].find("</answer>")? + start;
    completion[start..end].trim().parse().ok()
}
