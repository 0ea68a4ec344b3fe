#include "z2edge/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace z2edge {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_matrix(std::ostream& out, const std::string& name, const Matrix& m) {
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
    throw InvalidArgument("write_matrix: block name must be a single token");
  }
  out << "%%cmatrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j).real()) << ' '
          << format_double(m(i, j).imag());
    }
    out << '\n';
  }
}

std::vector<NamedMatrix> read_matrices(std::istream& in) {
  std::vector<NamedMatrix> blocks;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << "read_matrices: line " << line_no << ": " << why;
    throw InvalidArgument(os.str());
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream header(line);
    std::string tag, name;
    long long rows = -1, cols = -1;
    header >> tag >> name >> rows >> cols;
    if (tag != "%%cmatrix" || name.empty() || rows < 0 || cols < 0) {
      fail("expected '%%cmatrix <name> <rows> <cols>'");
    }
    Matrix m(rows, cols);
    for (long long i = 0; i < rows; ++i) {
      if (!std::getline(in, line)) fail("unexpected end of file");
      ++line_no;
      std::istringstream row(line);
      for (long long j = 0; j < cols; ++j) {
        double re = 0, im = 0;
        if (!(row >> re >> im)) fail("too few entries in row");
        m(i, j) = cplx(re, im);
      }
      std::string extra;
      if (row >> extra) fail("too many entries in row");
    }
    blocks.push_back({name, std::move(m)});
  }
  return blocks;
}

void save_matrices(const std::string& path,
                   const std::vector<NamedMatrix>& blocks) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("save_matrices: cannot open " + path);
  for (const auto& b : blocks) write_matrix(out, b.name, b.value);
  if (!out) throw InvalidArgument("save_matrices: write failed for " + path);
}

std::vector<NamedMatrix> load_matrices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("load_matrices: cannot open " + path);
  return read_matrices(in);
}

const Matrix& find_matrix(const std::vector<NamedMatrix>& blocks,
                          const std::string& name) {
  for (const auto& b : blocks) {
    if (b.name == name) return b.value;
  }
  throw InvalidArgument("matrix block '" + name + "' not found");
}

}  // namespace z2edge
