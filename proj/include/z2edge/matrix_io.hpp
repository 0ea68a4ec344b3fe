#pragma once

// Text serialization for dense complex matrices.
//
// A file holds one or more named blocks:
//
//   %%cmatrix <name> <rows> <cols>
//   re im re im ...        (one line per row, row-major)
//
// Values are written with 17 significant digits so a write/read cycle is
// exact. Lines starting with '#' are comments.

#include <iosfwd>
#include <string>
#include <vector>

#include "z2edge/operator_core.hpp"

namespace z2edge {

struct NamedMatrix {
  std::string name;
  Matrix value;
};

void write_matrix(std::ostream& out, const std::string& name, const Matrix& m);
std::vector<NamedMatrix> read_matrices(std::istream& in);

void save_matrices(const std::string& path,
                   const std::vector<NamedMatrix>& blocks);
std::vector<NamedMatrix> load_matrices(const std::string& path);

// Looks up a block by name; throws InvalidArgument when it is missing.
const Matrix& find_matrix(const std::vector<NamedMatrix>& blocks,
                          const std::string& name);

}  // namespace z2edge
