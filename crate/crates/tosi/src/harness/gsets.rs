//! The twelve standard index-set families used by the size/power tables.
//!
//! G11-G13 are assumed-zero sets with no true signal (ToMax size),
//! G14-G16 are assumed-zero sets contaminated by signal (ToMax power),
//! G21-G23 contain at least one true zero (ToMin size), and G24-G26 are
//! entirely nonzero (ToMin power), all relative to a true support {1..s}.

use crate::engine::TestMode;
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Builds all twelve families for dimension p and support size s.
pub fn build_gsets(p: usize, s: usize) -> Result<BTreeMap<String, Vec<usize>>> {
    if s == 0 || 2 * s >= p {
        return Err(Error::Domain(format!(
            "need 0 < s < p/2 for the standard set families, got s = {s}, p = {p}"
        )));
    }
    if s < 4 {
        return Err(Error::Domain(format!(
            "the standard set families reference indices up to s >= 4, got s = {s}"
        )));
    }
    let mut map = BTreeMap::new();
    let range = |a: usize, b: usize| (a..=b).collect::<Vec<usize>>();
    map.insert("G11".to_string(), vec![p - 1, p]);
    map.insert("G12".to_string(), range(p / 2, p));
    map.insert("G13".to_string(), range(s + 1, p));
    map.insert("G14".to_string(), vec![2, s + 1]);
    map.insert("G15".to_string(), {
        let mut v = vec![3];
        v.extend(s + 1..=p);
        v
    });
    map.insert("G16".to_string(), {
        let mut v = vec![3, 4];
        v.extend(s + 1..=p);
        v
    });
    map.insert("G21".to_string(), vec![p - 1, p]);
    map.insert("G22".to_string(), range(s + 1, p));
    map.insert("G23".to_string(), range(1, p));
    map.insert("G24".to_string(), vec![1, 2]);
    map.insert("G25".to_string(), range(1, 4));
    map.insert("G26".to_string(), range(1, s));
    Ok(map)
}

/// Test direction for a family label: G1x are ToMax sets, G2x ToMin.
pub fn gset_mode(label: &str) -> Result<TestMode> {
    if label.starts_with("G1") {
        Ok(TestMode::Max)
    } else if label.starts_with("G2") {
        Ok(TestMode::Min)
    } else {
        Err(Error::Domain(format!("unknown set family label {label}")))
    }
}

/// Whether the family is a null set (size row) for its test direction,
/// given a true support of {1..s}.
pub fn gset_is_null(label: &str) -> Result<bool> {
    match label {
        "G11" | "G12" | "G13" | "G21" | "G22" | "G23" => Ok(true),
        "G14" | "G15" | "G16" | "G24" | "G25" | "G26" => Ok(false),
        _ => Err(Error::Domain(format!("unknown set family label {label}"))),
    }
}
