//! Fuzzes the trajectory CSV reader.
//!
//! Invariants exercised on arbitrary input:
//! - the reader may reject, but must never panic or allocate unboundedly;
//! - anything it accepts must survive write → read → write with the second
//!   write byte-identical to the first (the float format is shortest
//!   round-trip, so serialization is a fixed point).

#![no_main]

use libfuzzer_sys::fuzz_target;
use manakov::io::{read_trajectories_csv, write_trajectories_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(set) = read_trajectories_csv(data) else {
        return;
    };
    let mut first = Vec::new();
    write_trajectories_csv(&mut first, &set).expect("writing to memory cannot fail");
    let reparsed = read_trajectories_csv(first.as_slice())
        .expect("serialized trajectories must parse back");
    let mut second = Vec::new();
    write_trajectories_csv(&mut second, &reparsed).expect("writing to memory cannot fail");
    assert_eq!(first, second, "trajectory CSV round trip must be byte-stable");
});
