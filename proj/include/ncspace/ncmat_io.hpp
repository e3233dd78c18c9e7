#pragma once

// NCMAT v1 text format:
//
//   NCMAT 1
//   rows cols
//   re im re im ...      (one line per row, `cols` pairs, 17 significant digits)

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ncspace/matcore.hpp"

namespace ncspace {

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw ParseError(std::string(what) + ": unexpected end of input");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw ParseError(std::string(what) + ": bad number '" + tok + "'");
  }
  if (!std::isfinite(v)) throw ParseError(std::string(what) + ": non-finite entry");
  return v;
}

}  // namespace detail

inline void write_ncmat(std::ostream& out, const CMat& x) {
  require_finite(x, "write_ncmat");
  out << "NCMAT 1\n" << x.rows() << ' ' << x.cols() << '\n';
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j > 0) out << ' ';
      out << detail::format_double(x(i, j).real()) << ' ' << detail::format_double(x(i, j).imag());
    }
    out << '\n';
  }
}

inline CMat read_ncmat(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "NCMAT") throw ParseError("read_ncmat: missing NCMAT header");
  if (version != 1) throw ParseError("read_ncmat: unsupported version " + std::to_string(version));
  long long rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) throw ParseError("read_ncmat: bad shape line");
  require_capacity(rows, "read_ncmat");
  require_capacity(cols, "read_ncmat");
  CMat x(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    for (long long j = 0; j < cols; ++j) {
      const double re = detail::parse_double(in, "read_ncmat");
      const double im = detail::parse_double(in, "read_ncmat");
      x(i, j) = cplx(re, im);
    }
  }
  return x;
}

inline std::string to_ncmat_string(const CMat& x) {
  std::ostringstream os;
  write_ncmat(os, x);
  return os.str();
}

inline CMat from_ncmat_string(const std::string& text) {
  std::istringstream is(text);
  return read_ncmat(is);
}

inline CMat load_ncmat(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_ncmat(in);
}

inline void save_ncmat(const std::string& path, const CMat& x) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  write_ncmat(out, x);
}

}  // namespace ncspace
