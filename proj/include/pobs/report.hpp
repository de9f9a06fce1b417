#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pobs {

/// Outcome of an invariant check: a verdict plus the named residuals that
/// justify it. Every *_check in the library returns one of these.
struct CheckReport {
  std::string name;
  bool pass = true;
  std::vector<std::pair<std::string, double>> residuals;
  std::vector<std::string> notes;
  // Overrides the headline residual when the residual list mixes in
  // non-residual metrics.
  double primary = std::numeric_limits<double>::quiet_NaN();

  CheckReport() = default;
  explicit CheckReport(std::string n) : name(std::move(n)) {}

  CheckReport& add(std::string key, double value);
  CheckReport& note(std::string text);
  /// Records a sub-verdict: pass &= ok.
  CheckReport& require(bool ok);

  /// Named residual; throws std::out_of_range if absent.
  double residual(std::string_view key) const;
  bool has(std::string_view key) const;
  /// Largest absolute residual, used as the headline value in audits.
  double headline() const;

  nlohmann::ordered_json to_json() const;
};

}  // namespace pobs
