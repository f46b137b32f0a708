//! Acceptance criteria 1 to 11. Each test prints one `PASS`/`FAIL` line
//! with its counts (run with `--nocapture` to see them), then the failing
//! report lines, if any.

use std::time::{Duration, Instant};

use toposforge::corpus;
use toposforge::suites::{self, Suite, SuiteConfig};
use toposforge_core::forcing::Report;

/// Wall-clock limits, pinned.
const BOX_THEOREM_LIMIT: Duration = Duration::from_secs(60);
const QUASICOHERATOR_LIMIT: Duration = Duration::from_secs(120);

fn cfg() -> SuiteConfig {
    SuiteConfig { seed: corpus::DEFAULT_SEED, max_points: 6, max_depth: 3, space_count: 20, samples: 10, ..SuiteConfig::default() }
}

fn run(suite: Suite, cfg: &SuiteConfig) -> (Report, Duration) {
    let start = Instant::now();
    let report = suites::run(suite, cfg).unwrap_or_else(|e| panic!("{suite:?}: {e}"));
    (report, start.elapsed())
}

fn checks(report: &Report) -> usize {
    report.lines.iter().filter(|l| !l.probe).count()
}

/// Prints the verdict line and the failures, then asserts.
fn verdict(criterion: u32, ok: bool, detail: String, report: &Report) {
    println!("{} criterion {criterion}: {detail}", if ok { "PASS" } else { "FAIL" });
    for line in report.failures().take(20) {
        println!("    {line}");
    }
    assert!(ok, "criterion {criterion}: {detail}");
}

#[test]
fn criterion_01_inference_rules() {
    let cfg = cfg();
    let spaces = cfg.spaces();
    assert!(spaces.len() >= 20 && spaces.iter().all(|s| s.num_points() <= 6));
    let (report, t) = run(Suite::InferenceRules, &cfg);
    let probes = report.lines.iter().filter(|l| l.probe).count();
    let probe_failures = report.lines.iter().filter(|l| l.probe && !l.pass).count();
    let summary = report.lines.iter().find(|l| l.location == "excluded-middle probe").expect("summary line");
    verdict(
        1,
        report.passed() && summary.pass && probe_failures > 0,
        format!(
            "{} spaces, {} rule checks x {} instances, {} failures; excluded middle fails on {probe_failures}/{probes} spaces ({:.2?})",
            spaces.len(),
            checks(&report) - 1,
            cfg.samples,
            report.failures().count(),
            t
        ),
        &report,
    );
}

#[test]
fn criterion_02_locality_and_monotonicity() {
    let (report, t) = run(Suite::Locality, &cfg());
    verdict(2, report.passed(), format!("{} checks, {} failures ({t:.2?})", checks(&report), report.failures().count()), &report);
}

#[test]
fn criterion_03_geometric_formulas() {
    let (report, t) = run(Suite::GeometricSpreading, &cfg());
    let formulas = report.lines.iter().filter(|l| !l.location.ends_with("implication")).count();
    verdict(
        3,
        report.passed() && formulas >= 200,
        format!("{formulas} geometric formulas, {} checks, {} failures ({t:.2?})", checks(&report), report.failures().count()),
        &report,
    );
}

#[test]
fn criterion_04_nuclei() {
    let (report, t) = run(Suite::Nuclei, &cfg());
    verdict(4, report.passed(), format!("{} checks, {} failures ({t:.2?})", checks(&report), report.failures().count()), &report);
}

#[test]
fn criterion_05_box_translation() {
    let cfg = SuiteConfig { max_points: 5, samples: 100, ..cfg() };
    let (report, t) = run(Suite::BoxTheorem, &cfg);
    verdict(
        5,
        report.passed() && checks(&report) >= 100 && t < BOX_THEOREM_LIMIT,
        format!("{} triples, {} failures, {t:.2?} (limit {BOX_THEOREM_LIMIT:?})", checks(&report), report.failures().count()),
        &report,
    );
}

#[test]
fn criterion_06_sheafification() {
    let (report, t) = run(Suite::Sheafification, &cfg());
    verdict(
        6,
        report.passed() && checks(&report) > 0,
        format!("{} (sheaf, nucleus) pairs, {} failures ({t:.2?})", checks(&report), report.failures().count()),
        &report,
    );
}

#[test]
fn criterion_07_spectrum_counts() {
    let (report, t) = run(Suite::Spectrum, &cfg());
    let counts: Vec<_> = report.lines.iter().filter(|l| l.location.ends_with(" counts") || l.location.ends_with(" known")).collect();
    let rings = report.lines.iter().filter(|l| l.location.ends_with(" counts")).count();
    let known = report.lines.iter().filter(|l| l.location.ends_with(" known")).count();
    let ok = counts.iter().all(|l| l.pass) && rings == corpus::rings().len() && known == 2;
    verdict(7, ok, format!("{rings} rings, ℤ/12 and ℤ/4 pinned ({t:.2?})"), &report);
}

#[test]
fn criterion_08_structure_sheaf_and_generic_filter() {
    let (spectrum, t1) = run(Suite::Spectrum, &cfg());
    let sheaf_lines: Vec<_> = spectrum.lines.iter().filter(|l| l.location.contains("Γ≅A") || l.location.ends_with(" stalks")).collect();
    let (filter, t2) = run(Suite::GenericFilter, &cfg());
    let ideals = filter.lines.iter().filter(|l| l.location.contains("{x |")).count();
    let mut report = spectrum.clone();
    report.extend(filter.clone());
    verdict(
        8,
        sheaf_lines.iter().all(|l| l.pass) && sheaf_lines.len() == 2 * corpus::rings().len() && filter.passed() && ideals >= 50,
        format!("Γ≅A and stalks on {} rings; {ideals} comprehension ideals ({:.2?})", sheaf_lines.len() / 2, t1 + t2),
        &report,
    );
}

#[test]
fn criterion_09_internal_ring_properties() {
    let (report, t) = run(Suite::Dimension, &cfg());
    verdict(9, report.passed(), format!("{} checks, {} failures ({t:.2?})", checks(&report), report.failures().count()), &report);
}

#[test]
fn criterion_10_quasicoherator() {
    let (report, t) = run(Suite::Quasicoherator, &cfg());
    verdict(
        10,
        report.passed() && t < QUASICOHERATOR_LIMIT,
        format!("{} instances, {} failures, {t:.2?} (limit {QUASICOHERATOR_LIMIT:?})", checks(&report) / 2, report.failures().count()),
        &report,
    );
}

#[test]
fn criterion_11_elimination_table() {
    let (report, t) = run(Suite::Elimination, &cfg());
    let coverage = report.lines.iter().find(|l| l.location == "elimination coverage").expect("coverage line");
    verdict(11, report.passed(), format!("{}, {} checks, {} failures ({t:.2?})", coverage.detail, checks(&report), report.failures().count()), &report);
}

#[test]
fn metaproperties_match_topology() {
    let (report, t) = run(Suite::Metaproperties, &cfg());
    println!("{} metaproperties: {} checks ({t:.2?})", if report.passed() { "PASS" } else { "FAIL" }, checks(&report));
    assert!(report.passed(), "{report}");
}
