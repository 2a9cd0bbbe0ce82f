//! Fixture commands whose seeded JSON output is pinned in
//! `tests/fixtures/expected`.

use std::path::{Path, PathBuf};

use dfb_core::shell::run;

pub fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

pub fn expected_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/expected")
}

/// Arguments after the program name; `@name` stands for a fixture path.
pub fn argv(args: &[&str]) -> Vec<String> {
    args.iter()
        .map(|a| match a.strip_prefix('@') {
            Some(f) => fixture(f),
            None => a.to_string(),
        })
        .collect()
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn dfb(args: &[&str]) -> Outcome {
    let mut full = vec!["dfb".to_string()];
    full.extend(argv(args));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(full, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Every fixture command paired with the name of its expected output. Each
/// runs with `--seed 42 --json` appended.
pub const RUNS: &[(&str, &[&str])] = &[
    ("check_fell_pair2", &["check-fell", "@pair2.json"]),
    ("check_fell_pair3_mixed", &["check-fell", "@pair3_mixed.json"]),
    ("check_cstar_pair2", &["check-cstar", "@pair2.json"]),
    ("check_double_grid22", &["check-double", "@grid22.json"]),
    ("check_double_grid22_dim2", &["check-double", "@grid22_dim2.json"]),
    ("saturation_pair3_mixed", &["saturation", "@pair3_mixed.json"]),
    ("compose_h", &["compose", "@grid12.json", "--sections", "s1,s2", "--dir", "h"]),
    ("compose_v", &["compose", "@grid21.json", "--sections", "s1,s3", "--dir", "v"]),
    ("compose4_hv", &["compose4", "@grid22.json", "--sections", "s1,s2,s3,s4", "--order", "hv"]),
    ("union_h", &["union", "@grid12.json", "--sections", "s1,s2", "--dir", "h"]),
    ("union_v", &["union", "@grid21.json", "--sections", "s1,s3", "--dir", "v"]),
    ("gns_trace", &["gns", "@pair2.json", "--object", "0", "--state", "@rho_trace.json", "--homsets"]),
    ("gns_pure", &["gns", "@pair2.json", "--object", "0", "--state", "@rho_pure.json", "--homsets"]),
    ("dual_pair2", &["dual", "@pair2.json", "--section", "s1"]),
    ("dual_grid11", &["dual", "@grid11.json", "--section", "s1"]),
    ("example1", &["example1"]),
];

/// Runs one pinned command and compares it with its expected output.
/// Returns the first mismatch or failing check.
pub fn check_run(name: &str, args: &[&str]) -> Result<(), String> {
    let mut full = args.to_vec();
    full.extend(["--seed", "42", "--json"]);
    let o = dfb(&full);
    if o.code != 0 {
        return Err(format!("{name}: exit {} ({})", o.code, o.stderr.trim()));
    }
    if let Some(line) = o.stdout.lines().find(|l| l.contains("\"status\":\"fail\"")) {
        return Err(format!("{name}: {line}"));
    }
    let path = expected_dir().join(format!("{name}.jsonl"));
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if o.stdout != want {
        return Err(format!("{name} differs from {}", path.display()));
    }
    Ok(())
}
