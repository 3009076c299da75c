//! Small named planes used in tests and fixtures.

use crate::plane::PartialPlane;

/// The Fano plane: points p0..p6, line Li = {p_i, p_{i+1}, p_{i+3}} mod 7.
pub fn fano() -> PartialPlane {
    let points: Vec<String> = (0..7).map(|i| format!("p{i}")).collect();
    let lines: Vec<String> = (0..7).map(|i| format!("L{i}")).collect();
    let mut incidences = Vec::new();
    for i in 0..7u32 {
        for d in [0, 1, 3] {
            incidences.push((format!("p{}", (i + d) % 7), format!("L{i}")));
        }
    }
    PartialPlane::build(&points, &lines, &incidences).expect("fano")
}

/// A triangle: three points, three lines, each line through two points.
pub fn triangle() -> PartialPlane {
    PartialPlane::build(
        &["a", "b", "c"],
        &["ab", "bc", "ca"],
        &[
            ("a", "ab"),
            ("b", "ab"),
            ("b", "bc"),
            ("c", "bc"),
            ("c", "ca"),
            ("a", "ca"),
        ],
    )
    .expect("triangle")
}
