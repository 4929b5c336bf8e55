//! Shared fixtures for the benchmarks.

use autloop_core::{parse_model, SullivanModel};

pub const S2: &str = "model S2\ndim 2\ncomplete\ngen x 2\ngen y 3\nd y = x^2\n";
pub const CP3: &str = "model CP3\ndim 6\ncomplete\ngen x 2\ngen y 7\nd y = x^4\n";
pub const S2XS3: &str = "model S2xS3\ndim 5\ncomplete\ngen x 2\ngen y 3\ngen z 3\nd y = x^2\n";
pub const SU3: &str = "model SU3\ndim 8\ncomplete\ngen a 3\ngen b 5\n";

pub fn model(text: &str) -> SullivanModel {
    parse_model(text).expect("fixture parses")
}
