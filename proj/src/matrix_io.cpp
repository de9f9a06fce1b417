#include "pobs/matrix_io.hpp"

#include <cstdio>
#include <fstream>

#include "pobs/errors.hpp"

namespace pobs::io {

namespace {

Complex complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(path, "expected a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Index read_dim(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) {
    throw ConfigError(path + "/dim", "missing or non-integer dim");
  }
  const auto d = j["dim"].get<long long>();
  if (d < 1) throw ConfigError(path + "/dim", "dim must be positive");
  return static_cast<Index>(d);
}

}  // namespace

Json complex_list_to_json(const Complex* data, Index count) {
  Json out = Json::array();
  for (Index i = 0; i < count; ++i) out.push_back({data[i].real(), data[i].imag()});
  return out;
}

Vector complex_list_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of [re, im] pairs");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = complex_from_json(j[i], path + "/" + std::to_string(i));
  }
  return v;
}

Json matrix_to_json(const PseudoObservable& p) {
  Json j;
  j["dim"] = p.dim();
  const Index d = p.dim();
  Json entries = Json::array();
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) entries.push_back({p(r, c).real(), p(r, c).imag()});
  }
  j["entries"] = std::move(entries);
  if (p.unit_tag()) j["unit_tag"] = *p.unit_tag();
  return j;
}

PseudoObservable matrix_from_json(const Json& j, const std::string& path) {
  const Index d = read_dim(j, path);
  if (!j.contains("entries")) throw ConfigError(path + "/entries", "missing entries");
  const Vector flat = complex_list_from_json(j["entries"], path + "/entries");
  if (flat.size() != d * d) {
    throw ConfigError(path + "/entries", "expected " + std::to_string(d * d) + " entries, got " +
                                             std::to_string(flat.size()));
  }
  Matrix m(d, d);
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) m(r, c) = flat(r * d + c);
  }
  std::optional<std::string> tag;
  if (j.contains("unit_tag")) {
    if (!j["unit_tag"].is_string()) throw ConfigError(path + "/unit_tag", "expected a string");
    tag = j["unit_tag"].get<std::string>();
  }
  try {
    return PseudoObservable(std::move(m), std::move(tag));
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

Json vector_to_json(const Vector& v) {
  Json j;
  j["dim"] = v.size();
  j["amplitudes"] = complex_list_to_json(v.data(), v.size());
  return j;
}

Vector vector_from_json(const Json& j, const std::string& path) {
  const Index d = read_dim(j, path);
  if (!j.contains("amplitudes")) throw ConfigError(path + "/amplitudes", "missing amplitudes");
  Vector v = complex_list_from_json(j["amplitudes"], path + "/amplitudes");
  if (v.size() != d) throw ConfigError(path + "/amplitudes", "length does not match dim");
  return v;
}

PseudoObservable load_matrix(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string(), "cannot open matrix file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string(), e.what());
  }
  return matrix_from_json(j, file.string());
}

void save_matrix(const PseudoObservable& p, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << matrix_to_json(p).dump(2) << '\n';
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace pobs::io
