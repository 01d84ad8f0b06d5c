use claimcheck::textproc::{segment_sentences, tokenize};

/// Hand-marked boundaries: each entry is one sentence of the document.
const SENTENCES: [&str; 20] = [
    "The Halvorsen Bridge crosses the Ottar River near Skarnes.",
    "Dr. Inga Moe designed it in 1928.",
    "Construction began the following spring!",
    "Was the site stable enough?",
    "Engineers from the U.S. Army Corps of Engineers were consulted.",
    "Work stopped for 3.5 months in 1930.",
    "1931 brought heavy floods.",
    "The deck was finished by Mr. Aas and his crew.",
    "\"It will stand for a century,\" the mayor said.",
    "(The bridge was later repainted.)",
    "Traffic opened at 9 a.m. on 4 June 1932.",
    "Heavy vehicles, e.g. Trucks from Hamar, were restricted.",
    "A toll was charged until Jan. 1950.",
    "The toll booth stood on St. Olav Street.",
    "Repairs cost approx. 40,000 kroner.",
    "What happened next?!",
    "The old bridge was closed in 1957.",
    "A new span, 412 m long, replaced it.",
    "Today the structure is a protected monument.",
    "Visitors can walk across it year-round.",
];

#[test]
fn twenty_sentence_document_matches_hand_marking() {
    let text = SENTENCES.join(" ");
    let got = segment_sentences(&text);
    assert_eq!(got, SENTENCES);
}

#[test]
fn irregular_whitespace_between_sentences() {
    let text = SENTENCES.join("\n  ");
    assert_eq!(segment_sentences(&text), SENTENCES);
}

#[test]
fn segmentation_preserves_tokens() {
    let text = SENTENCES.join("  ");
    let rejoined = segment_sentences(&text).join(" ");
    assert_eq!(tokenize(&rejoined), tokenize(&text));
}
