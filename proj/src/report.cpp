#include "pobs/report.hpp"

#include <cmath>
#include <stdexcept>

namespace pobs {

CheckReport& CheckReport::add(std::string key, double value) {
  residuals.emplace_back(std::move(key), value);
  return *this;
}

CheckReport& CheckReport::note(std::string text) {
  notes.push_back(std::move(text));
  return *this;
}

CheckReport& CheckReport::require(bool ok) {
  pass = pass && ok;
  return *this;
}

double CheckReport::residual(std::string_view key) const {
  for (const auto& [k, v] : residuals) {
    if (k == key) return v;
  }
  throw std::out_of_range("report '" + name + "' has no residual '" + std::string(key) + "'");
}

bool CheckReport::has(std::string_view key) const {
  for (const auto& kv : residuals) {
    if (kv.first == key) return true;
  }
  return false;
}

double CheckReport::headline() const {
  if (!std::isnan(primary)) return primary;
  double worst = 0.0;
  for (const auto& kv : residuals) {
    if (std::isfinite(kv.second)) worst = std::max(worst, std::abs(kv.second));
  }
  return worst;
}

nlohmann::ordered_json CheckReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["pass"] = pass;
  j["residual"] = headline();
  auto& r = j["residuals"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : residuals) {
    if (std::isfinite(v)) {
      r[k] = v;
    } else {
      r[k] = nullptr;
    }
  }
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

}  // namespace pobs
