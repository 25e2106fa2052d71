#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sie/core.hpp"

namespace sie::io {

using nlohmann::json;

/// "re+imj" / "re-imj", round-trip precision.
std::string format_complex(cplx z);
cplx parse_complex(const std::string& s);

json matrix_to_json(const Mat& m);  // {"rows", "cols", "entries": [row-major strings]}
Mat matrix_from_json(const json& j);
json vector_to_json(const Vec& v);
Vec vector_from_json(const json& j);

/// RFC-4180 writer: fields containing comma, quote, CR or LF are quoted and
/// embedded quotes doubled; records end with CRLF.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

std::string csv_escape(const std::string& field);
std::string fmt_double(double x);  // %.17g, "inf"/"nan" spelled out

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace sie::io
