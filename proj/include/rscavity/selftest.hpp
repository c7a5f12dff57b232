#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rscavity {

struct SelftestOptions {
  std::uint64_t seed = 1;
  /// Fault to inject: "" (none) or "threshold-constant", which corrupts the
  /// stored reference value of d_con(3).
  std::string fault;
};

struct SelftestCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;

  bool ok() const;
  /// One "PASS|FAIL name: detail" line per check.
  std::string text() const;
  /// FNV-1a of text(), as 16 hex digits.
  std::string digest() const;
};

/// Fast invariant checks across all modules. Deterministic given the options.
SelftestReport run_selftest(const SelftestOptions& options = {});

}  // namespace rscavity
