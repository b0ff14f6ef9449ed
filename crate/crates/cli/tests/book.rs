//! The console transcripts in the guide's command-line chapter are real.

use std::process::Command;

const CHAPTER: &str = include_str!("../../../book/src/cli.md");

/// `(argv, expected output)` for each `$ gatkit ...` line of every console
/// block. Commands that read files the chapter does not provide are skipped.
fn transcripts() -> Vec<(Vec<String>, String)> {
    let mut out = Vec::new();
    let mut in_console = false;
    let mut current: Option<(Vec<String>, Vec<&str>)> = None;
    for line in CHAPTER.lines() {
        if line.starts_with("```") {
            in_console = line == "```console";
            if let Some((argv, lines)) = current.take() {
                out.push((argv, lines.join("\n").trim_end().to_string()));
            }
            continue;
        }
        if !in_console {
            continue;
        }
        if let Some(cmd) = line.strip_prefix("$ ") {
            if let Some((argv, lines)) = current.take() {
                out.push((argv, lines.join("\n").trim_end().to_string()));
            }
            let argv = shlex::split(cmd).expect("well-quoted command");
            if argv[0] == "gatkit" && !argv.iter().any(|a| a.ends_with(".gat")) {
                current = Some((argv[1..].to_vec(), Vec::new()));
            }
        } else if let Some((_, lines)) = current.as_mut() {
            lines.push(line);
        }
    }
    out
}

#[test]
fn console_transcripts_match() {
    let cases = transcripts();
    assert!(cases.len() >= 7, "found only {} transcripts", cases.len());
    for (argv, expected) in cases {
        let o = Command::new(env!("CARGO_BIN_EXE_gatkit"))
            .args(&argv)
            .env_remove("GATKIT_PATH")
            .output()
            .unwrap();
        let got = String::from_utf8_lossy(&o.stdout);
        assert_eq!(got.trim_end(), expected, "gatkit {}", argv.join(" "));
    }
}
