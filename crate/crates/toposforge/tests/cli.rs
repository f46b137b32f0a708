use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toposforge")).args(args).env_remove("TOPOSFORGE_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eval_on_sierpinski() {
    let o = run(&["eval", "--space", "sierpinski.top", "--formula", "~~U"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "FORCED on X; truth-value = X\n");
    let o = run(&["eval", "--space", "sierpinski", "--formula", "U \\/ ~U"]);
    assert_eq!(stdout(&o), "NOT-FORCED on X; truth-value = U\n");
    let o = run(&["truth", "--space", "sierpinski", "--formula", "~U"]);
    assert_eq!(stdout(&o), "truth-value = {}\n");
}

#[test]
fn eval_on_a_spectrum() {
    let o = run(&["eval", "--ring", "zmod12", "--formula", "forall s:O. (~inv(s)) => nilp(s)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("FORCED"));
    let o = run(&["eval", "--ring", "zmod12", "--formula", "forall s:O. ~inv(s) => s = 0"]);
    assert!(stdout(&o).starts_with("NOT-FORCED"));
}

#[test]
fn exit_codes() {
    let o = run(&["eval", "--space", "sierpinski", "--formula", "U /\\"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset"));
    assert_eq!(run(&["eval", "--space", "sierpinski", "--formula", "V"]).status.code(), Some(3));
    assert_eq!(run(&["eval", "--space", "nowhere", "--formula", "true"]).status.code(), Some(3));
    assert_eq!(run(&["eval", "--ring", "zmod12", "--formula", "forall s:Nope. true"]).status.code(), Some(3));
}

#[test]
fn translations() {
    let o = run(&["translate", "--nucleus", "negneg", "exists x:F. p(x)=y"]);
    assert_eq!(stdout(&o), "~~(exists x:F. ~~(p(x)=y))\n");
    assert_eq!(stdout(&run(&["translate", "--nucleus", "j", "true"])), "true\n");
    let o = run(&["translate", "--elide-gray", "--nucleus", "j", "a=b /\\ c=d"]);
    assert_eq!(stdout(&o), "box[j](a=b) /\\ box[j](c=d)\n");
    assert_eq!(run(&["translate", "--nucleus", "j", "a = "]).status.code(), Some(2));
}

#[test]
fn spec_output() {
    let o = run(&["spec", "--ring", "zmod12"]);
    let out = stdout(&o);
    assert!(out.contains("frame: 4 elements"));
    assert!(out.contains("points: 2"));
    assert!(out.contains("(1): 12 sections"));
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "spectrum", "--ring", "zmod12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS zmod 12: frame=4 elements, points=2, Γ≅A"));

    let o = run(&["verify", "inference-rules", "--space", "sierpinski.top"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.contains("FAIL space0[2pt,3op] excluded-middle (probe)"));
    assert!(!out.lines().any(|l| l.starts_with("FAIL") && !l.contains("(probe)")));

    let o = run(&["verify", "box-theorem", "--max-points", "5", "--max-depth", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("box-theorem: 100 checks, 0 failed"));

    // Same seed, same bytes.
    let a = run(&["verify", "locality", "--seed", "7", "--spaces", "5"]);
    let b = run(&["verify", "locality", "--seed", "7", "--spaces", "5"]);
    assert_eq!(a.stdout, b.stdout);

    assert_eq!(run(&["verify", "spectrum", "--ring", "nonsense ring"]).status.code(), Some(3));
}

#[test]
fn sheafify_a_file() {
    let dir = std::env::temp_dir().join(format!("toposforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.sheaf");
    std::fs::write(&path, "sheaf F on sierpinski\nsections U: a b\nsections X: a b\nrestrict X->U: a->a b->b\n").unwrap();
    let o = run(&["sheafify", "--space", "sierpinski", "--sheaf", path.to_str().unwrap(), "--nucleus", "open_U"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("sheaf F_open_U on sierpinski"));
    let o = run(&["sheafify", "--space", "sierpinski", "--sheaf", path.to_str().unwrap(), "--nucleus", "bogus"]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).unwrap();
}
