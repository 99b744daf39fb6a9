#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mfact/core.hpp"

namespace mfact {

// CSV: one row per line, comma separated, entries written with 17
// significant digits so that reading back is exact. Blank lines are
// ignored. JSON: {"n": n, "entries": [row-major]}.

DenseMatrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const DenseMatrix& m);

nlohmann::json matrix_to_json(const DenseMatrix& m);
DenseMatrix matrix_from_json(const nlohmann::json& j);

/// Reads CSV or JSON; JSON is recognized by a leading '{'. Throws ParseError
/// for malformed content and InvalidArgument for unreadable files.
DenseMatrix load_matrix(const std::filesystem::path& path);

/// Round-trip decimal form of a double ("%.17g").
std::string format_exact(double v);

}  // namespace mfact
