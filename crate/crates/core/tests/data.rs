use freearr::catalog;
use freearr::classes::InductionTable;
use freearr::format::{emit_arrangement, parse_arrangement};
use sha2::{Digest, Sha256};

#[test]
fn catalog_files_match_checksums() {
    let sums: Vec<(&str, &str)> =
        catalog::SHA256SUMS.lines().filter_map(|l| l.split_once("  ")).collect();
    assert_eq!(sums.len(), catalog::data_files().len());
    for (name, text) in catalog::data_files() {
        let want = sums.iter().find(|(_, n)| *n == name).unwrap_or_else(|| panic!("{name} not listed")).0;
        let got: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(got, want, "{name}");
    }
}

#[test]
fn catalog_files_match_disk() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/catalog");
    for (name, text) in catalog::data_files() {
        assert_eq!(std::fs::read_to_string(dir.join(name)).unwrap(), text, "{name}");
    }
}

#[test]
fn arrangement_files_round_trip_byte_for_byte() {
    for text in [catalog::A_TXT, catalog::B_TXT, catalog::C_TXT, catalog::D_TXT] {
        let a = parse_arrangement(text, true).unwrap();
        assert_eq!(emit_arrangement(&a), text);
        assert_eq!(parse_arrangement(&emit_arrangement(&a), true).unwrap(), a);
    }
}

#[test]
fn table_files_round_trip_byte_for_byte() {
    for text in [catalog::TABLE_A_TXT, catalog::TABLE_C_TXT] {
        assert_eq!(InductionTable::parse(text).unwrap().emit(), text);
    }
}

#[test]
fn tables_list_the_catalog_arrangements_in_order() {
    let a = catalog::table_a().arrangement().unwrap();
    assert_eq!(a, catalog::arr_a());
    let c = catalog::table_c().arrangement().unwrap();
    assert_eq!(c, catalog::arr_c());
}

#[test]
fn derived_files_are_the_stated_deletions() {
    let (a, b) = (catalog::arr_a(), catalog::arr_b());
    let h = freearr::canonicalize(&[0, 0, 1, 1, 0, 0, 0]).unwrap();
    assert_eq!(a.deletion(&h).unwrap(), b);
    let (c, d) = (catalog::arr_c(), catalog::arr_d());
    let h = freearr::canonicalize(&[1, 1, 0, 0, 0]).unwrap();
    assert_eq!(c.deletion(&h).unwrap(), d);
}
