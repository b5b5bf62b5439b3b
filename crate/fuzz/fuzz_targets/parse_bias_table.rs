// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

#![no_main]

use libfuzzer_sys::fuzz_target;
use loglog_beta::calibration::BiasTable;

fuzz_target!(|text: &str| {
    if let Ok(table) = BiasTable::from_text(text) {
        assert_eq!(BiasTable::from_text(&table.to_text()).unwrap(), table);
        let (low, high) = table.range();
        let _ = table.lookup((low + high) / 2.0);
    }
});
