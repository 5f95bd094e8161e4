//! Exact-arithmetic toolkit for vector-valued modular forms.

pub mod exactfield;
pub mod qseries;
pub mod scalarforms;
pub mod matrix;
pub mod replib;
pub mod weightcalc;
pub mod detlab;
pub mod suites;
pub mod cli;
