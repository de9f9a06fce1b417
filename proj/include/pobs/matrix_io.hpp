// Matrix literal exchange format (JSON):
//
//   {"dim": 2, "entries": [[re, im], [re, im], [re, im], [re, im]],
//    "unit_tag": "energy"}
//
// `entries` lists dim*dim [re, im] pairs in row-major order; `unit_tag` is
// optional. State vectors use {"dim": d, "amplitudes": [[re, im], ...]}.
// Transformations are stored as the matrix of their unitary W.

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pobs/core_algebra.hpp"

namespace pobs::io {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const PseudoObservable& p);
/// Throws ConfigError (rooted at `path`) on malformed documents.
PseudoObservable matrix_from_json(const Json& j, const std::string& path = "");

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& path = "");

/// [[re, im], ...] list shared by both formats.
Vector complex_list_from_json(const Json& j, const std::string& path);
Json complex_list_to_json(const Complex* data, Index count);

/// Fixed scientific notation with 17 significant digits ("%.16e").
std::string csv_number(double v);

PseudoObservable load_matrix(const std::filesystem::path& file);
void save_matrix(const PseudoObservable& p, const std::filesystem::path& file);

}  // namespace pobs::io
