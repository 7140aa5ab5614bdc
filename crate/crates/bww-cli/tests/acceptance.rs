//! CLI contract acceptance: exit codes over the fixture corpus, the JSON
//! report, and the export round trip.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../bww-core/tests/fixtures")
        .join(name)
}

fn bww(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bww"))
        .args(args)
        .env("BWW_NO_COLOR", "1")
        .output()
        .expect("bww binary runs")
}

fn check(name: &str) -> Output {
    bww(&["check", fixture(name).to_str().unwrap()])
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process exited normally")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Criterion: exit statuses 0/1/2/3 over the corpus, warnings and infos
/// never breaking success, and query truth values staying data.
#[test]
fn cli_exit_code_contract() {
    // Conformant: exit 0, silent.
    let ok = check("library.bww");
    assert_eq!(exit_code(&ok), 0);
    assert_eq!(stdout(&ok), "");
    assert_eq!(stderr(&ok), "");

    // Warnings and infos alone keep exit 0 but are reported.
    let warn = check("rules/w1.bww");
    assert_eq!(exit_code(&warn), 0);
    assert!(stderr(&warn).contains("warning[W1]"));
    let info = check("rules/i2.bww");
    assert_eq!(exit_code(&info), 0);
    assert!(stderr(&info).contains("info[I2]"));

    // Validation errors: exit 1.
    for name in ["rules/v1.bww", "rules/v4.bww", "rules/v9.bww"] {
        let out = check(name);
        assert_eq!(exit_code(&out), 1, "{} should exit 1", name);
    }

    // Frontend failures: exit 2, every error reported.
    let parse = check("bad/parse_error.bww");
    assert_eq!(exit_code(&parse), 2);
    assert_eq!(stderr(&parse).lines().count(), 1);
    assert!(stderr(&parse).contains("error[P1]"));
    let two = check("bad/two_errors.bww");
    assert_eq!(exit_code(&two), 2);
    assert_eq!(stderr(&two).lines().count(), 2);
    assert_eq!(exit_code(&check("bad/lex_error.bww")), 2);
    assert_eq!(exit_code(&check("bad/unknown_name.bww")), 2);

    // Bad invocation or unknown identifier: exit 3.
    let lib = fixture("library.bww");
    let lib = lib.to_str().unwrap();
    let unknown_ident = bww(&["query", lib, "possesses?(ghost, Title)"]);
    assert_eq!(exit_code(&unknown_ident), 3);
    let unknown_fn = bww(&["query", lib, "teleports?(Book)"]);
    assert_eq!(exit_code(&unknown_fn), 3);
    let missing = bww(&["check", "no/such/file.bww"]);
    assert_eq!(exit_code(&missing), 3);

    // A query evaluating to false is still success.
    let falsy = bww(&["query", lib, "possesses?(Student, Title)"]);
    assert_eq!(exit_code(&falsy), 0);
    assert_eq!(stdout(&falsy).trim(), "false");

    println!("ACCEPTANCE PASS: CLI contract — exit codes 0/1/2/3 verified over the corpus");
}

#[test]
fn json_report_matches_text_report() {
    // A fixture with both an error and a warning.
    let dir = std::env::temp_dir();
    let path = dir.join(format!("bww_mixed_{}.bww", std::process::id()));
    std::fs::write(
        &path,
        "model Mixed {\n  property P;\n  thing Ghost;\n  thing t possesses P;\n  states of t: a;\n  history t { a @ 1; a @ 2; }\n}\n",
    )
    .unwrap();

    let text = bww(&["check", path.to_str().unwrap()]);
    let json = bww(&["check", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&text), 1);
    assert_eq!(exit_code(&json), 1);

    let mut text_codes: Vec<String> = stderr(&text)
        .lines()
        .map(|l| {
            let start = l.find('[').unwrap() + 1;
            let end = l.find(']').unwrap();
            l[start..end].to_string()
        })
        .collect();
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    let mut json_codes: Vec<String> = parsed
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["code"].as_str().unwrap().to_string())
        .collect();
    text_codes.sort();
    json_codes.sort();
    assert_eq!(text_codes, json_codes);
    assert_eq!(text_codes, vec!["V1".to_string(), "W1".to_string()]);

    std::fs::remove_file(&path).ok();
    println!("ACCEPTANCE PASS: CLI contract — text and JSON reports carry identical diagnostic sets");
}

#[test]
fn json_report_shape_for_a_single_violation() {
    let out = bww(&[
        "check",
        fixture("rules/v1.bww").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&out), 1);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let arr = parsed.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["code"], "V1");
    assert_eq!(arr[0]["severity"], "error");
    assert!(arr[0]["line"].is_u64());
    assert!(arr[0]["message"].as_str().unwrap().contains("Ghost"));
}

/// Criterion: export JSON round-trips to a structurally identical model.
#[test]
fn export_round_trips_through_the_reader() {
    let dir = std::env::temp_dir();
    let out_path = dir.join(format!("bww_export_{}.json", std::process::id()));
    let export = bww(&[
        "export",
        fixture("library.bww").to_str().unwrap(),
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&export), 0);

    let written = std::fs::read_to_string(&out_path).unwrap();
    let doc = bww_core::export::ModelDoc::from_json(&written).unwrap();
    let reimported = bww_core::export::import_model(&doc).unwrap();
    let doc2 = bww_core::export::export_model(&reimported);
    assert_eq!(
        written,
        bww_core::export::to_json(&doc2),
        "export of the reimported model must be byte-identical"
    );

    // Spot-check document content against the fixture.
    let parsed: serde_json::Value = serde_json::from_str(&written).unwrap();
    let things: Vec<&str> = parsed["things"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["name"].as_str().unwrap())
        .collect();
    assert_eq!(things, vec!["Book", "Player", "Printer", "Student", "null"]);
    assert_eq!(parsed["diagnostics"].as_array().unwrap().len(), 0);

    std::fs::remove_file(&out_path).ok();
    println!("ACCEPTANCE PASS: CLI contract — export JSON round-trips to a structurally identical model");
}

#[test]
fn export_of_an_empty_model_is_just_the_null_thing() {
    let dir = std::env::temp_dir();
    let model_path = dir.join(format!("bww_empty_{}.bww", std::process::id()));
    std::fs::write(&model_path, "model Empty { }\n").unwrap();
    let out = bww(&["export", model_path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["things"].as_array().unwrap().len(), 1);
    assert_eq!(parsed["things"][0]["name"], "null");
    assert_eq!(parsed["things"][0]["isNull"], true);
    assert!(parsed["properties"].as_array().unwrap().is_empty());
    assert!(parsed["processes"].as_array().unwrap().is_empty());
    std::fs::remove_file(&model_path).ok();
}

#[test]
fn closure_subcommand_prints_sorted_pairs() {
    let out = bww(&["closure", fixture("figure6.bww").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    let lines: Vec<String> = stdout(&out).lines().map(|l| l.to_string()).collect();
    assert_eq!(lines.len(), 10, "a four-property chain closes to ten pairs");
    let mut sorted = lines.clone();
    sorted.sort();
    assert_eq!(lines, sorted, "pairs print in lexicographic order");
    assert!(lines.contains(&"BeingPerson -> HostelResident".to_string()));

    // No precedence declarations: only the reflexive floor.
    let dir = std::env::temp_dir();
    let path = dir.join(format!("bww_refl_{}.bww", std::process::id()));
    std::fs::write(
        &path,
        "model R { property A; property B; thing t possesses A, B; }\n",
    )
    .unwrap();
    let refl = bww(&["closure", path.to_str().unwrap()]);
    assert_eq!(exit_code(&refl), 0);
    assert_eq!(stdout(&refl), "A -> A\nB -> B\n");
    std::fs::remove_file(&path).ok();

    // A cycle still closes and exits 0.
    let cyc = bww(&["closure", fixture("rules/i2.bww").to_str().unwrap()]);
    assert_eq!(exit_code(&cyc), 0);
    let cyc_out = stdout(&cyc);
    assert!(cyc_out.contains("Chicken -> Egg") && cyc_out.contains("Egg -> Chicken"));
}

#[test]
fn query_subcommand_mirrors_the_semantics() {
    let lib = fixture("library.bww");
    let lib = lib.to_str().unwrap();
    let cases = [
        ("possesses?(Book, Title)", "true"),
        ("possesses?(null, Title)", "false"),
        ("isIn?(Book, onTheRack, 3)", "true"),
        ("isIn?(Book, issued, 3)", "false"),
        ("event?(Book, onTheRack, issued)", "true"),
        // onTheRack -> claimed skips the issued interval.
        ("event?(Book, onTheRack, claimed)", "false"),
        ("composableEvent?(<Book, issued, claimed>, <Book, claimed, issued>)", "true"),
        ("process?(<Book, issued, claimed>, <Book, claimed, issued>)", "true"),
        ("fromState!(<Book, issued, claimed>)", "issued"),
        ("toState!(<Book, issued, claimed>)", "claimed"),
        ("composite?(Book)", "false"),
        ("complexProperty?(Title)", "false"),
    ];
    for (expr, expected) in cases {
        let out = bww(&["query", lib, expr]);
        assert_eq!(exit_code(&out), 0, "query {} failed: {}", expr, stderr(&out));
        assert_eq!(stdout(&out).trim(), expected, "query {}", expr);
    }

    let hostel = fixture("hostel.bww");
    let hostel = hostel.to_str().unwrap();
    let cases = [
        ("precedes?(BeingPerson, StayingInHostel)", "true"),
        ("precedes?(BeingPerson, BeingPerson)", "true"),
        ("precedes?(AgeTen, Vegetarian)", "false"),
        ("complexProperty?(ScholarsInHostel)", "true"),
        ("possesses?(scholar1, ScholarsInHostel)", "true"),
        ("possesses?(dayScholar, ScholarsInHostel)", "false"),
    ];
    for (expr, expected) in cases {
        let out = bww(&["query", hostel, expr]);
        assert_eq!(exit_code(&out), 0, "query {} failed: {}", expr, stderr(&out));
        assert_eq!(stdout(&out).trim(), expected, "query {}", expr);
    }

    let child = fixture("childlabor.bww");
    let child = child.to_str().unwrap();
    let cases = [
        ("memberof_c?(Minors, p1)", "true"),
        ("memberof_k?(ChildLabor, p1)", "true"),
        ("memberof_k?(ChildLabor, p2)", "false"),
        ("kind?({p1}, {Underaged, WorksFor})", "true"),
        ("class?({p1, p2}, Underaged)", "true"),
        ("characteristicProp_c?(Minors, Underaged)", "true"),
        ("characteristicProp_c?(Minors, Enrolled)", "false"),
        ("characteristicProp_k?(ChildLabor, {Underaged, WorksFor})", "true"),
        ("partof?(p1, acme)", "false"),
    ];
    for (expr, expected) in cases {
        let out = bww(&["query", child, expr]);
        assert_eq!(exit_code(&out), 0, "query {} failed: {}", expr, stderr(&out));
        assert_eq!(stdout(&out).trim(), expected, "query {}", expr);
    }

    // Queries run on models with validation errors (exit 2 is the only
    // blocker), and on warnings.
    let v1 = fixture("rules/v1.bww");
    let out = bww(&["query", v1.to_str().unwrap(), "composite?(Ghost)"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out).trim(), "false");
    let bad = fixture("bad/parse_error.bww");
    let out = bww(&["query", bad.to_str().unwrap(), "composite?(x)"]);
    assert_eq!(exit_code(&out), 2);
}
