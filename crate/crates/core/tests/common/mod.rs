#![allow(dead_code)]

use kodaira_core::{parse_presentations, realize, FiniteGroup};

pub fn catalog_file(name: &str) -> Vec<FiniteGroup> {
    let path = format!("{}/../catalog-cli/catalog/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_presentations(&text)
        .unwrap()
        .iter()
        .map(|p| realize(p).unwrap())
        .collect()
}

pub fn catalog_group(file: &str, label: &str) -> FiniteGroup {
    catalog_file(file)
        .into_iter()
        .find(|g| g.label() == Some(label))
        .unwrap_or_else(|| panic!("{label} not in {file}"))
}
