#include "janus/io.hpp"

#include <cstdio>
#include <ostream>

#include "janus/sparse.hpp"

namespace janus::io {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_market(std::ostream& out, const CsrMatrix& a) {
  std::size_t nnz_lower = 0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (auto k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
      if (a.col_idx()[k] <= r) ++nnz_lower;
    }
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.rows() << ' ' << a.cols() << ' ' << nnz_lower << '\n';
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (auto k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
      const auto c = a.col_idx()[k];
      if (c <= r) out << (r + 1) << ' ' << (c + 1) << ' ' << fmt(a.values()[k]) << '\n';
    }
  }
}

}  // namespace janus::io
