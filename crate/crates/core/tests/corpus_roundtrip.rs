use claimcheck::corpus::{read_jsonl, Corpus};
use claimcheck::{Claim, EvidenceDocument};

const CLAIMS: &str = r#"{"id":"c1","text":"The bridge opened in 1932 and is red.","context":"It is old.","subclaims":[{"id":"c1-0","text":"The bridge opened in 1932.","tokens":["the","bridge","opened","in","1932"],"gold":{"label":"supported","support_sets":[[["d1",1]]],"unsupported_tokens":[]},"note":"kept"},{"id":"c1-1","text":"The bridge is red.","tokens":["the","bridge","is","red"],"gold":{"label":"partially_supported","support_sets":[[["d1",2]]],"unsupported_tokens":[3]}}],"evidence_ids":["d1"],"gold":{"label":"partially_supported","support_sets":[[["d1",1],["d1",2]]],"unsupported_tokens":[]},"source":{"page":"Bridge","rev":7}}
{"id":"c2","text":"The town has a museum.","context":"","subclaims":[],"evidence_ids":["d1","d2"]}
"#;

const EVIDENCE: &str = r#"{"id":"d1","sentences":["Construction began in 1929.","The bridge opened in 1932.","It is painted dark red."],"url":"https://example.org/a"}
{"id":"d2","sentences":["The museum opened in 1990."]}
"#;

#[test]
fn load_save_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (claims, evidence) = (dir.path().join("claims.jsonl"), dir.path().join("evidence.jsonl"));
    std::fs::write(&claims, CLAIMS).unwrap();
    std::fs::write(&evidence, EVIDENCE).unwrap();

    let corpus = Corpus::load(&claims, &evidence).unwrap();
    let (claims2, evidence2) = (dir.path().join("c2.jsonl"), dir.path().join("e2.jsonl"));
    corpus.save(&claims2, &evidence2).unwrap();
    assert_eq!(std::fs::read_to_string(&claims2).unwrap(), CLAIMS);
    assert_eq!(std::fs::read_to_string(&evidence2).unwrap(), EVIDENCE);
}

#[test]
fn unknown_fields_are_kept() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("claims.jsonl");
    std::fs::write(&path, CLAIMS).unwrap();
    let claims: Vec<Claim> = read_jsonl(&path).unwrap();
    assert_eq!(claims[0].extra["source"]["rev"], 7);
    assert_eq!(claims[0].subclaims[0].extra["note"], "kept");

    let path = dir.path().join("evidence.jsonl");
    std::fs::write(&path, EVIDENCE).unwrap();
    let docs: Vec<EvidenceDocument> = read_jsonl(&path).unwrap();
    assert_eq!(docs[0].extra["url"], "https://example.org/a");
    assert_eq!(docs[0].sentences[2].token_count, 5);
    assert_eq!(docs[0].sentences[2].index, 2);
}

#[test]
fn dangling_references_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (claims, evidence) = (dir.path().join("claims.jsonl"), dir.path().join("evidence.jsonl"));
    std::fs::write(&claims, CLAIMS.replace("[\"d1\",2]]]", "[\"d1\",9]]]")).unwrap();
    std::fs::write(&evidence, EVIDENCE).unwrap();
    assert!(Corpus::load(&claims, &evidence).is_err());

    std::fs::write(&claims, CLAIMS.replace("\"d1\",\"d2\"", "\"d1\",\"d3\"")).unwrap();
    assert!(Corpus::load(&claims, &evidence).is_err());
}

#[test]
fn malformed_line_reports_its_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("claims.jsonl");
    std::fs::write(&path, format!("{CLAIMS}{{\"id\": 3}}\n")).unwrap();
    let err = read_jsonl::<Claim>(&path).unwrap_err().to_string();
    assert!(err.contains(":3:"), "{err}");
}
