#![allow(dead_code)]

pub mod chains;
pub mod clock;
pub mod grammar;
pub mod views;
