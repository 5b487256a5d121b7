//! A workbench for discrete ordinary differential equations over the
//! integers: function algebras built from recurrence schemas that advance
//! along the binary length of their argument, together with translations to
//! and from leveled boolean circuits with modular counting gates.

pub mod circuit;
pub mod engine;
pub mod expr;
pub mod fixtures;
pub mod oracle;
pub mod program_text;
pub mod sexpr;
pub mod stdlib;
pub mod xlate;
