#include "sie/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace sie::io {

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(cplx z) {
  std::string re = fmt_double(z.real());
  std::string im = fmt_double(std::abs(z.imag()));
  const bool neg = std::signbit(z.imag());
  return re + (neg ? "-" : "+") + im + "j";
}

cplx parse_complex(const std::string& s) {
  if (s.empty()) fail(Code::BadArgument, "empty complex literal");
  if (s.back() != 'j') {
    char* end = nullptr;
    const double re = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') fail(Code::BadArgument, "bad complex literal: " + s);
    return {re, 0.0};
  }
  // Split at the last sign that is not part of an exponent or the leading sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size() - 1; i > 0; --i) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string body = s.substr(0, s.size() - 1);
  char* end = nullptr;
  if (split == std::string::npos) {
    const double im = std::strtod(body.c_str(), &end);
    if (*end != '\0') fail(Code::BadArgument, "bad complex literal: " + s);
    return {0.0, im};
  }
  const std::string rs = body.substr(0, split), is = body.substr(split);
  const double re = std::strtod(rs.c_str(), &end);
  if (*end != '\0') fail(Code::BadArgument, "bad complex literal: " + s);
  const double im = std::strtod(is.c_str(), &end);
  if (*end != '\0') fail(Code::BadArgument, "bad complex literal: " + s);
  return {re, im};
}

json matrix_to_json(const Mat& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(format_complex(m(i, j)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

Mat matrix_from_json(const json& j) {
  const auto r = j.at("rows").get<Eigen::Index>(), c = j.at("cols").get<Eigen::Index>();
  const auto& e = j.at("entries");
  if (static_cast<Eigen::Index>(e.size()) != r * c) fail(Code::Mismatch, "matrix entry count");
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = parse_complex(e[static_cast<std::size_t>(i * c + k)].get<std::string>());
  return m;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(format_complex(v[i]));
  return out;
}

Vec vector_from_json(const json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_complex(j[i].get<std::string>());
  return v;
}

std::string csv_escape(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << "\r\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace sie::io
