//! Composite layouts checked against hand-transcribed symbolic tables.

mod common;

use common::symbolic::*;

fn check(o: Outcome) {
    if let Err(e) = o {
        panic!("{e}");
    }
}

#[test]
fn horizontal_composite_top_row() {
    check(horizontal_composite_of_top_row());
}

#[test]
fn horizontal_composite_bottom_row() {
    check(horizontal_composite_of_bottom_row());
}

#[test]
fn vertical_composite_left_column() {
    check(vertical_composite_of_left_column());
}

#[test]
fn vertical_composite_right_column() {
    check(vertical_composite_of_right_column());
}

#[test]
fn block_composite_both_orders() {
    check(block_composite_in_both_orders());
}

#[test]
fn horizontal_union_layout() {
    check(horizontal_union());
}

#[test]
fn vertical_union_layout() {
    check(vertical_union());
}

#[test]
fn all_ones_union() {
    check(horizontal_union_of_all_ones_is_all_ones());
}

#[test]
fn dual_layout() {
    check(dual_section_layout());
}
