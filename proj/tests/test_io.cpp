#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sie/io.hpp"
#include "sie/rng.hpp"
#include "test_util.hpp"

using namespace sie;

TEST_CASE("complex literals round trip") {
  for (cplx z : {cplx(0.1, -0.2), cplx(-3.0, 0.0), cplx(1e-300, 2.5e10), cplx(0.0, -0.0)}) {
    const cplx back = io::parse_complex(io::format_complex(z));
    CHECK(back.real() == z.real());
    CHECK(back.imag() == z.imag());
  }
  CHECK(io::format_complex(cplx(1.5, -2.0)) == "1.5-2j");
  CHECK(io::parse_complex("2.5") == cplx(2.5, 0.0));
  CHECK_CODE(io::parse_complex(""), Code::BadArgument);
  CHECK_CODE(io::parse_complex("1+xj"), Code::BadArgument);
}

TEST_CASE("number formatting") {
  CHECK(io::fmt_double(kInf) == "inf");
  CHECK(io::fmt_double(-kInf) == "-inf");
  CHECK(io::fmt_double(std::nan("")) == "nan");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(io::fmt_double(x)) == x);
}

TEST_CASE("CSV quoting") {
  CHECK(io::csv_escape("plain") == "plain");
  CHECK(io::csv_escape("a,b") == "\"a,b\"");
  CHECK(io::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(io::csv_escape("two\nlines") == "\"two\nlines\"");
  std::ostringstream out;
  io::CsvWriter w(out);
  w.row({"x", "y,z"});
  w.row({"1", ""});
  CHECK(out.str() == "x,\"y,z\"\r\n1,\r\n");
}

TEST_CASE("matrix and vector JSON round trip") {
  Rng rng(91);
  const Mat m = random_hermitian(rng, 3).topLeftCorner(2, 3);
  CHECK((io::matrix_from_json(io::matrix_to_json(m)) - m).norm() == 0.0);
  const Vec v = random_vector(rng, 5);
  CHECK((io::vector_from_json(io::vector_to_json(v)) - v).norm() == 0.0);
}

TEST_CASE("FNV-1a hashing") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
}
