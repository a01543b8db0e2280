#![allow(dead_code)]

pub mod gradcheck;
pub mod mac;
pub mod tc_cases;
