mod common;

use common::*;

fn ok(c: Check) {
    match c {
        Ok(n) => assert!(n > 0),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn deletion_restriction_recursion() {
    ok(deletion_restriction(11, 500));
}

#[test]
fn product_formulas_hold() {
    ok(product_formulas(12, 300));
}

#[test]
fn lattice_matches_subset_expansion() {
    ok(whitney_oracle(13, 400));
}

#[test]
fn saito_certificates_round_trip() {
    ok(saito_round_trip(14, 300));
}

#[test]
fn catalog_certificates_round_trip() {
    ok(saito_round_trip_catalog());
}

#[test]
fn addition_deletion_two_of_three() {
    ok(two_of_three(15, 300));
}

#[test]
fn products_close_af_and_sf() {
    ok(product_closure(16, 150));
}

#[test]
fn class_containments_hold() {
    ok(class_containments(17, 200));
}

#[test]
fn localizations_of_d_are_additionally_free() {
    ok(af_localization_closure_d());
}
