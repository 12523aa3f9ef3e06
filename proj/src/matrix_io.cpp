#include "toprank/matrix_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "toprank/corpus.hpp"

namespace toprank {

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  std::array<char, 32> buf{};
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), m(r, c));
      out.write(buf.data(), res.ptr - buf.data());
    }
    out << '\n';
  }
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_matrix(out, m);
  if (!out) throw Error("write failed: " + path.string());
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("matrix: missing header line");
  std::istringstream header(line);
  long rows = -1, cols = -1;
  std::string extra;
  if (!(header >> rows >> cols) || (header >> extra) || rows < 1 || cols < 1) {
    throw Error("matrix: invalid header '" + line + "'");
  }
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw Error("matrix: expected " + std::to_string(rows) + " rows, found " + std::to_string(r));
    }
    const char* p = line.data();
    const char* end = line.data() + line.size();
    long c = 0;
    while (true) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      if (p == end) break;
      double v = 0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc{}) throw Error("matrix: row " + std::to_string(r) + ": invalid number");
      if (c >= cols) break;
      m(r, c++) = v;
      p = res.ptr;
    }
    if (c != cols || p != end) {
      throw Error("matrix: row " + std::to_string(r) + ": expected " + std::to_string(cols) + " values");
    }
    if (!m.row(r).allFinite()) throw Error("matrix: row " + std::to_string(r) + ": non-finite value");
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw Error("matrix: more than " + std::to_string(rows) + " rows");
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_matrix(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace toprank
