//! Runs in its own process so the environment override cannot leak into other tests.

use linkoid::invariants::{bracket, max_crossings, InvariantError, DEFAULT_MAX_CROSSINGS};
use linkoid::GaussCode;

#[test]
fn environment_override_lowers_the_limit() {
    assert_eq!(max_crossings(), DEFAULT_MAX_CROSSINGS);
    let g: GaussCode = "loop: O1+ U2+ O3+ U1+ O2+ U3+".parse().unwrap();
    assert!(bracket(&g, None).is_ok());
    std::env::set_var("LINKOID_MAX_CROSSINGS", "2");
    assert_eq!(max_crossings(), 2);
    assert!(matches!(bracket(&g, None), Err(InvariantError::TooManyCrossings { count: 3, limit: 2 })));
    std::env::set_var("LINKOID_MAX_CROSSINGS", "not a number");
    assert_eq!(max_crossings(), DEFAULT_MAX_CROSSINGS);
}
