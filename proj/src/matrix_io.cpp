#include "mfact/matrix_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace mfact {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& token, std::size_t line) {
  const std::string t = trim(token);
  if (t.empty()) throw Error(ErrorCode::ParseError, "empty field on line " + std::to_string(line));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) {
    throw Error(ErrorCode::ParseError,
                "cannot parse '" + t + "' as a number on line " + std::to_string(line));
  }
  return v;
}

}  // namespace

std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DenseMatrix read_matrix_csv(std::istream& in) {
  std::vector<double> entries;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t count = 0;
    while (std::getline(ss, field, ',')) {
      entries.push_back(parse_number(field, line_no));
      ++count;
    }
    if (line.back() == ',') {
      throw Error(ErrorCode::ParseError, "trailing comma on line " + std::to_string(line_no));
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw Error(ErrorCode::ParseError, "ragged row on line " + std::to_string(line_no));
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::ParseError, "no matrix rows found");
  if (rows != cols) {
    throw Error(ErrorCode::ParseError, "matrix is " + std::to_string(rows) + "x" +
                                           std::to_string(cols) + ", expected square");
  }
  try {
    return DenseMatrix(rows, std::move(entries));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void write_matrix_csv(std::ostream& out, const DenseMatrix& m) {
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = 0; j < m.n(); ++j) {
      if (j > 0) out << ',';
      out << format_exact(m(i, j));
    }
    out << '\n';
  }
}

nlohmann::json matrix_to_json(const DenseMatrix& m) {
  return nlohmann::json{{"n", m.n()},
                        {"entries", std::vector<double>(m.entries().begin(), m.entries().end())}};
}

DenseMatrix matrix_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    auto entries = j.at("entries").get<std::vector<double>>();
    return DenseMatrix(n, std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad matrix JSON: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return matrix_from_json(j);
  }
  std::istringstream csv(text);
  return read_matrix_csv(csv);
}

}  // namespace mfact
