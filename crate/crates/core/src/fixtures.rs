//! Built-in presentations.

use crate::parse::parse_spec_str;
use crate::spec::GroupSpec;

pub const Z: &str = "[group]\nrank = 1\nn = 0\n";

pub const K2: &str = r#"[group]
rank = 2
n = 0

[conj]
"0,1" = "a1^-1"
"#;

pub const DINF: &str = r#"[group]
rank = 1
n = 2

[zconj]
"0" = "a0^-1"
"#;

pub const ZZ4: &str = r#"[group]
rank = 1
n = 4

[zconj]
"0" = "a0^-1"
"#;

pub const EX414: &str = r#"[group]
rank = 2
n = 2

[conj]
"0,1" = "a1^-1"

[zconj]
"0" = "a0^-1 a1^1"
"1" = "a1^-1"
"#;

pub const RANK3: &str = r#"[group]
rank = 3
n = 2

[conj]
"0,1" = "a1^-1"
"0,2" = "a2^-1"
"1,2" = "a2^-1"

[zconj]
"0" = "a0^-1"
"1" = "a1^-1"
"2" = "a2^-1"
"#;

/// Names of the fixtures that are group presentations (`promislow` is data only).
pub const SPEC_NAMES: [&str; 6] = ["z", "k2", "dinf", "zz4", "ex414", "rank3"];

pub const ALL_NAMES: [&str; 7] = ["z", "k2", "dinf", "zz4", "ex414", "promislow", "rank3"];

pub fn fixture_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "z" => Z,
        "k2" => K2,
        "dinf" => DINF,
        "zz4" => ZZ4,
        "ex414" => EX414,
        "rank3" => RANK3,
        _ => return None,
    })
}

pub fn fixture(name: &str) -> Option<GroupSpec> {
    fixture_text(name).map(|t| parse_spec_str(t).expect("built-in fixture parses"))
}

pub fn z() -> GroupSpec {
    fixture("z").unwrap()
}

pub fn k2() -> GroupSpec {
    fixture("k2").unwrap()
}

pub fn dinf() -> GroupSpec {
    fixture("dinf").unwrap()
}

pub fn zz4() -> GroupSpec {
    fixture("zz4").unwrap()
}

pub fn ex414() -> GroupSpec {
    fixture("ex414").unwrap()
}

pub fn rank3() -> GroupSpec {
    fixture("rank3").unwrap()
}
