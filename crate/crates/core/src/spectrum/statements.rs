//! Internal statements about the structure sheaf, written against the names
//! registered by [`SpecEnvironment`](super::SpecEnvironment). Schemas without
//! an upper bound take the environment default, which is `|A|`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// `inv(s)` agrees with its definition.
pub const INV_DEFINED: &str = "forall s:O. inv(s) => exists t:O. s*t = 1";
pub const INV_CHARACTERIZED: &str = "forall s:O. (exists t:O. s*t = 1) => inv(s)";
pub const NILP_DEFINED: &str = "forall s:O. nilp(s) => bigvee[n=0..] s^n = 0";
pub const NILP_CHARACTERIZED: &str = "forall s:O. (bigvee[n=0..] s^n = 0) => nilp(s)";

/// Õ is a local ring.
pub const LOCAL: &str = "~(zero = one) /\\ forall x,y:O. inv(x + y) => inv(x) \\/ inv(y)";

/// Non-invertible elements are nilpotent.
pub const NONUNIT_NILPOTENT: &str = "forall s:O. ~inv(s) => nilp(s)";

/// The same, with both predicates spelled out.
pub const NONUNIT_NILPOTENT_EXPLICIT: &str =
    "forall s:O. ~(exists t:O. s*t = 1) => bigvee[n=0..] s^n = 0";

/// Õ is a field in the sense that non-units vanish.
pub const FIELD: &str = "forall s:O. ~inv(s) => s = 0";

/// Krull dimension at most zero: every `a` has a complementary `b`.
pub const KRULL_DIM_ZERO: &str =
    "forall a:O. exists b:O. (exists u,v:O. u*a + v*b = 1) /\\ bigvee[n=0..] (a*b)^n = 0";

pub const REDUCED: &str = "forall s:O. (bigvee[n=0..] s^n = 0) => s = 0";

/// The generic filter is a filter of `A̲`.
pub const FILTER_AXIOMS: &str = "oneA in Fil /\\ ~(zeroA in Fil) \
    /\\ (forall s,t:A. s*t in Fil => s in Fil /\\ t in Fil) \
    /\\ (forall s,t:A. s in Fil /\\ t in Fil => s*t in Fil) \
    /\\ (forall s,t:A. s+t in Fil => s in Fil \\/ t in Fil)";

pub fn module_zero(m: &str) -> String {
    format!("forall x:{m}. x = 0")
}

/// `m` is generated by `k` elements.
pub fn module_generated(m: &str, k: usize) -> String {
    if k == 0 {
        return module_zero(m);
    }
    let gens: Vec<String> = (1..=k).map(|i| format!("g{i}")).collect();
    let coeffs: Vec<String> = (1..=k).map(|i| format!("c{i}")).collect();
    let sum: Vec<String> = (0..k).map(|i| format!("{}*{}", coeffs[i], gens[i])).collect();
    format!(
        "exists {}:{m}. forall x:{m}. exists {}:O. x = {}",
        gens.join(","),
        coeffs.join(","),
        sum.join(" + ")
    )
}

pub fn injective(f: &str, m: &str) -> String {
    format!("forall x,y:{m}. {f}(x) = {f}(y) => x = y")
}

pub fn surjective(f: &str, m: &str, n: &str) -> String {
    format!("forall y:{n}. exists x:{m}. {f}(x) = y")
}

/// The quasicoherence condition for a submodule `G` of `M`.
pub fn quasicoherent(m: &str, g: &str) -> String {
    format!("forall f:O. forall s:{m}. (inv(f) => s in {g}) => bigvee[n=0..] f^n * s in {g}")
}
