use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

const WINDOW3: &str = "input ld: Real
output acc := acc[-1|0] + ld[now] - ld[-3|0]
output ok := acc[now] <= 15
";

const BRANCHY: &str = "input x: Bool
input y: Bool
output a := x[now] || y[now]
output b := (x[now] ^ y[now]) -> a[now]
";

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Files {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn symon(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symon"))
        .args(args.iter().map(|a| a.as_ref()))
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn window_files(f: &Files) -> (PathBuf, PathBuf) {
    (
        f.write("f.lola", WINDOW3),
        f.write("f.csv", "ld\n[1,5]\n4\n5\n7\n"),
    )
}

#[test]
fn run_prints_records() {
    let f = Files::new();
    let (spec, trace) = window_files(&f);
    let o = symon(&[&"run", &spec, &trace]);
    assert_eq!(code(&o), 0);
    // acc^0 = ld^0 in [1,5]; acc^3 = 4 + 5 + 7 regardless of ld^0
    let expected = "0\tacc\tbounds\t[1,5]\n0\tok\ttri\ttt\n\
                    1\tacc\tbounds\t[5,9]\n1\tok\ttri\ttt\n\
                    2\tacc\tbounds\t[10,14]\n2\tok\ttri\ttt\n\
                    3\tacc\tval\t16\n3\tok\ttri\tff\n";
    assert_eq!(stdout(&o), expected);
    let unpruned = symon(&[&"run", &"--no-prune", &spec, &trace]);
    assert_eq!(stdout(&unpruned), expected);
}

#[test]
fn interval_monitor_loses_the_last_verdict() {
    let f = Files::new();
    let (spec, trace) = window_files(&f);
    let o = symon(&[&"run", &"--abs", &spec, &trace]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("3\tacc\tabs\t[12,20]\n"), "{out}");
    assert!(out.contains("3\tok\tabs\t?\n"), "{out}");
}

#[test]
fn compare_reports_csv() {
    let f = Files::new();
    let (spec, trace) = window_files(&f);
    let o = symon(&[&"compare", &spec, &trace]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(
        out.starts_with("stream,sym_determined,sym_undetermined,abs_determined,abs_undetermined\n")
    );
    assert!(out.contains("\nok,4,0,3,1\n"), "{out}");
    assert!(out.contains("\ndisagreements,0\n"), "{out}");
}

#[test]
fn bench_prints_one_row_per_length() {
    let f = Files::new();
    let spec = f.write("b.lola", BRANCHY);
    let o = symon(&[&"bench", &spec, &"--lengths", &"5", &"20"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "length,mean_event_us,max_measure");
    assert!(
        lines[1].starts_with("5,") && lines[2].starts_with("20,"),
        "{out}"
    );
    assert_eq!(lines[1].rsplit(',').next(), lines[2].rsplit(',').next());
}

fn trace_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(String::from)
        .collect()
}

#[test]
fn inject_is_reproducible() {
    let f = Files::new();
    let rows: String = (1..=20).map(|i| format!("{i}\n")).collect();
    let trace = f.write("t.csv", &format!("v\n{rows}"));
    let a = f.dir.path().join("a.csv");
    let b = f.dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = symon(&[
            &"inject",
            &trace,
            &"--perturb",
            &"0.25",
            &"0.1",
            &"--seed",
            &"7",
            &"-o",
            out,
        ]);
        assert_eq!(code(&o), 0);
    }
    let lines = trace_lines(&a);
    assert_eq!(lines, trace_lines(&b));
    assert_eq!(lines.iter().filter(|l| l.starts_with('[')).count(), 5);

    let o = symon(&[
        &"inject",
        &trace,
        &"--bursts",
        &"2",
        &"3",
        &"4",
        &"--seed",
        &"1",
    ]);
    let blanks = stdout(&o).lines().filter(|l| *l == "?").count();
    assert!((6..=8).contains(&blanks), "{blanks}");
}

#[test]
fn zero_fraction_is_identity() {
    let f = Files::new();
    let trace = f.write("t.csv", "v,w\n1.5,tt\n[1,2],?\n-3,ff\n");
    let o = symon(&[&"inject", &trace, &"--perturb", &"0", &"0.5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "v,w\n1.5,tt\n[1,2],?\n-3,ff\n");
}

#[test]
fn input_errors_exit_with_one() {
    let f = Files::new();
    let (spec, trace) = window_files(&f);
    let bad_spec = f.write("bad.lola", "input ld: Real\noutput acc := ld[+1|0]\n");
    let bad_trace = f.write("bad.csv", "ld\n[5,1]\n");
    let wrong_column = f.write("col.csv", "x\n1\n");
    let missing = f.dir.path().join("missing.csv");
    for args in [
        vec![&"run" as &dyn AsRef<std::ffi::OsStr>, &bad_spec, &trace],
        vec![&"run", &spec, &bad_trace],
        vec![&"run", &spec, &wrong_column],
        vec![&"run", &spec, &missing],
        vec![&"inject", &trace],
        vec![&"inject", &trace, &"--unknowns", &"lots"],
        vec![&"inject", &trace, &"--unknowns", &"2"],
    ] {
        let o = symon(&args);
        assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let o = symon(&[&"run", &spec, &missing]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.csv"));
}

#[test]
fn lookback_below_assumption_depth_is_rejected() {
    let f = Files::new();
    let spec = f.write(
        "l.lola",
        "input ld: Real\noutput ok := ld[now] <= 5\nassumption ld[-2|0] <= ld[now]\n",
    );
    let trace = f.write("l.csv", "ld\n1\n2\n3\n");
    assert_eq!(code(&symon(&[&"run", &spec, &trace])), 0);
    assert_eq!(
        code(&symon(&[&"run", &"--lookback", &"1", &spec, &trace])),
        1
    );
}

#[test]
fn solver_limit_exits_with_two() {
    let f = Files::new();
    let spec = f.write("b.lola", BRANCHY);
    let trace = f.write("b.csv", "x,y\n?,?\n?,?\n");
    let ok = symon(&[&"run", &spec, &trace]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("0\tb\ttri\ttt\n"));
    let o = symon(&[&"run", &"--max-nodes", &"1", &spec, &trace]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("limit"));
}
