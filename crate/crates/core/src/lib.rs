#![allow(clippy::needless_range_loop)]

pub mod exact_algebra;
pub mod frobenius;
pub mod geometry;
pub mod gw_engine;
pub mod semisimple;
