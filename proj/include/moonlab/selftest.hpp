#pragma once

// Acceptance suite behind `moonlab selftest`.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace moonlab::selftest {

inline constexpr std::uint64_t kDefaultSamples = 1'000'000;

struct Options {
    /// Samples per cell. Absolute tolerances widen by sqrt(kDefaultSamples / samples)
    /// when this is smaller than the default.
    std::uint64_t samples = kDefaultSamples;
    std::uint64_t seed = 20240601;
    /// Worker threads; 0 resolves through MOONLAB_THREADS.
    unsigned threads = 0;
    /// Runs the engine with inverted M semantics; the suite must then fail.
    bool canary = false;
};

enum class Outcome { Pass, Fail, Skip, Info };

struct CriterionResult {
    std::string id;
    std::string name;
    Outcome outcome = Outcome::Pass;
    std::string detail;
};

struct SuiteResult {
    std::vector<CriterionResult> criteria;
    double seconds = 0.0;
    bool passed() const;
};

/// Runs every criterion, printing one line per result to `out` as it completes.
SuiteResult run(const Options& options, std::ostream& out);

}  // namespace moonlab::selftest
