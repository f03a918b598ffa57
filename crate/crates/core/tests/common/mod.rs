//! Golden CLI transcripts shared by the `cli_golden` and `acceptance` targets.

#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub stdin: Option<&'static str>,
    pub exit_code: i32,
}

const fn case(name: &'static str, args: &'static [&'static str], exit_code: i32) -> Case {
    Case {
        name,
        args,
        stdin: None,
        exit_code,
    }
}

pub const CASES: &[Case] = &[
    case("sperner_human", &["sperner", "0,0,1,1"], 0),
    case(
        "sperner_json",
        &["sperner", "0,0,1,1", "--format", "json"],
        0,
    ),
    case("sperner_boundary", &["sperner", "1,0"], 2),
    case(
        "sperner_min_json",
        &["sperner", "0,1", "--format", "json"],
        0,
    ),
    case(
        "sperner_vertices_csv",
        &[
            "sperner",
            "0,1,0,1,1",
            "--vertices",
            "0,1/4,1/2,3/4,1",
            "--format",
            "csv",
        ],
        0,
    ),
    case("sperner_malformed", &["sperner", "0,2,1"], 1),
    case("solve_swap_human", &["solve", "1 - x", "0", "1"], 0),
    case(
        "solve_swap_json",
        &["solve", "1 - x", "0", "1", "--format", "json"],
        0,
    ),
    case(
        "solve_quadratic_json",
        &[
            "solve",
            "(x*x + 2)/4",
            "0",
            "1",
            "--epsilon",
            "1/1000000",
            "--lipschitz",
            "1/2",
            "--format",
            "json",
        ],
        0,
    ),
    case(
        "solve_quadratic_single_grid_csv",
        &[
            "solve",
            "(x*x + 2)/4",
            "0",
            "1",
            "--epsilon",
            "1/100",
            "--lipschitz",
            "1/2",
            "--mode",
            "single-grid",
            "--format",
            "csv",
        ],
        0,
    ),
    case("solve_non_self_map", &["solve", "x + 1", "0", "1"], 2),
    case("solve_parse_error", &["solve", "1 - y", "0", "1"], 1),
    Case {
        name: "solve_stdin_unconverged",
        args: &[
            "solve",
            "-",
            "1",
            "2",
            "--max-rounds",
            "5",
            "--format",
            "json",
        ],
        stdin: Some("ifneg(x*x - 2, 2, 1)\n"),
        exit_code: 3,
    },
    case(
        "plmap_fixed_points_json",
        &[
            "plmap",
            "0,0,1",
            "--vertices",
            "0,1,2",
            "fixed-points",
            "--format",
            "json",
        ],
        0,
    ),
    case(
        "plmap_eval_human",
        &["plmap", "0,1", "--vertices", "0,1", "eval", "1/4"],
        0,
    ),
    case(
        "plmap_eval_json",
        &[
            "plmap",
            "0,1",
            "--vertices",
            "0,1",
            "eval",
            "1/4",
            "--format",
            "json",
        ],
        0,
    ),
    case(
        "plmap_alternating_json",
        &[
            "plmap",
            "0,1,0,1",
            "--vertices",
            "0,1,2,3",
            "fixed-points",
            "--format",
            "json",
        ],
        0,
    ),
    case(
        "plmap_trace_csv",
        &[
            "plmap",
            "0,0,1",
            "trace",
            "--resolution",
            "4",
            "--format",
            "csv",
        ],
        0,
    ),
    case(
        "counterexample_csv",
        &["counterexample", "--depth", "10", "--format", "csv"],
        0,
    ),
    case(
        "counterexample_depth1_json",
        &["counterexample", "--depth", "1", "--format", "json"],
        0,
    ),
    case(
        "counterexample_depth1_human",
        &["counterexample", "--depth", "1"],
        0,
    ),
    case(
        "counterexample_depth0",
        &["counterexample", "--depth", "0"],
        1,
    ),
];

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.out"))
}

pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

pub fn run_case(case: &Case) -> Outcome {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sperner1d"))
        .args(case.args)
        .env_remove("SPERNER1D_FORMAT")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut stdin = child.stdin.take().unwrap();
        if let Some(input) = case.stdin {
            stdin.write_all(input.as_bytes()).unwrap();
        }
    }
    let output = child.wait_with_output().unwrap();
    Outcome {
        stdout: String::from_utf8(output.stdout).unwrap(),
        exit_code: output.status.code().unwrap_or(-1),
    }
}

/// `Ok(())` when stdout and exit code match the frozen transcript. With
/// `UPDATE_GOLDEN=1` the transcript is rewritten instead.
pub fn check_case(case: &Case) -> Result<(), String> {
    let outcome = run_case(case);
    let path = golden_path(case.name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &outcome.stdout).unwrap();
    }
    let expected = std::fs::read_to_string(&path)
        .map_err(|e| format!("{}: missing golden file: {e}", case.name))?;
    if outcome.exit_code != case.exit_code {
        return Err(format!(
            "{}: exit code {} (expected {})",
            case.name, outcome.exit_code, case.exit_code
        ));
    }
    if outcome.stdout != expected {
        return Err(format!(
            "{}: stdout differs\n--- expected\n{expected}--- actual\n{}",
            case.name, outcome.stdout
        ));
    }
    Ok(())
}
