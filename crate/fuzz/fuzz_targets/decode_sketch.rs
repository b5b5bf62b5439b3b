// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

#![no_main]

use libfuzzer_sys::fuzz_target;
use loglog_beta::Sketch;

fuzz_target!(|data: &[u8]| {
    // Anything that decodes must re-encode to the same bytes.
    if let Ok(sketch) = Sketch::decode(data) {
        assert_eq!(sketch.encode(), data);
    }
});
