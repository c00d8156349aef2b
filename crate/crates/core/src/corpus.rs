//! Example specifications shipped with the library.

pub const TRIM: &str = include_str!("../specs/trim.csx");
pub const UNINHABITED: &str = include_str!("../specs/uninhabited.csx");
pub const PERFECT_BINDER: &str = include_str!("../specs/perfect_binder.csx");
pub const BOOKLET_MAKER: &str = include_str!("../specs/booklet_maker.csx");

/// `(file name, text)` for every example.
pub const ALL: [(&str, &str); 4] = [
    ("trim.csx", TRIM),
    ("uninhabited.csx", UNINHABITED),
    ("perfect_binder.csx", PERFECT_BINDER),
    ("booklet_maker.csx", BOOKLET_MAKER),
];
