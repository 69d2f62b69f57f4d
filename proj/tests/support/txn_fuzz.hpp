#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace testsupport {

struct TxnFuzzStats {
    int sequences = 0;
    int prepares = 0;
    int prepare_failures = 0;
    int commits = 0;
    int commit_expiries = 0;
    int rollbacks = 0;
    int releases = 0;
    int ticks = 0;
};

// Random prepare/commit/rollback/release/tick sequences against a pool,
// with the driver keeping its own slot and flow ledger. Returns the first
// conservation violation, or nothing when all sequences balance.
std::optional<std::string> run_txn_fuzz(std::uint64_t seed, int sequences,
                                        TxnFuzzStats* stats = nullptr);

}  // namespace testsupport
