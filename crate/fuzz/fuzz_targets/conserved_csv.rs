//! Fuzzes the conserved-quantity CSV reader.
//!
//! Invariants exercised on arbitrary input:
//! - the reader may reject, but must never panic;
//! - anything it accepts must survive write → read → write with the second
//!   write byte-identical to the first.

#![no_main]

use libfuzzer_sys::fuzz_target;
use manakov::io::{read_conserved_csv, write_conserved_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_conserved_csv(data) else {
        return;
    };
    let mut first = Vec::new();
    write_conserved_csv(&mut first, &rows).expect("writing to memory cannot fail");
    let reparsed =
        read_conserved_csv(first.as_slice()).expect("serialized samples must parse back");
    let mut second = Vec::new();
    write_conserved_csv(&mut second, &reparsed).expect("writing to memory cannot fail");
    assert_eq!(first, second, "conserved CSV round trip must be byte-stable");
});
