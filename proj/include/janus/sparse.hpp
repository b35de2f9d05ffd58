#pragma once

// Coordinate-form accumulation and compressed-row storage for the assembled
// operators, plus the OpenMP matrix-vector kernel used by the solver.

#include <cstddef>
#include <span>
#include <vector>

namespace janus {

using Vec = std::vector<double>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Accumulates graph-Laplacian edges: add_edge(i, j, c) contributes
/// c (e_i - e_j)(e_i - e_j)^T.
class CooBuilder {
 public:
  explicit CooBuilder(std::size_t n) : n_(n) {}

  std::size_t size() const { return n_; }
  void add(std::size_t row, std::size_t col, double value);
  void add_edge(std::size_t i, std::size_t j, double weight);
  void append(const CooBuilder& other);
  std::span<const Triplet> triplets() const { return entries_; }

 private:
  std::size_t n_;
  std::vector<Triplet> entries_;
};

class CsrMatrix {
 public:
  CsrMatrix() = default;
  explicit CsrMatrix(std::size_t n);  // n x n zero matrix
  /// Duplicates are summed in the order they appear after a stable sort by
  /// (row, col), so the result depends only on the triplet sequence.
  static CsrMatrix from_triplets(std::size_t n, std::span<const Triplet> triplets);

  std::size_t rows() const { return n_; }
  std::size_t cols() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  double at(std::size_t r, std::size_t c) const;
  Vec diagonal() const;
  double max_abs() const;

  /// y = A x, rows split across OpenMP threads; each row sums in column
  /// order so the result is independent of the thread count.
  void multiply(std::span<const double> x, std::span<double> y) const;
  Vec multiply(std::span<const double> x) const;

  CsrMatrix operator+(const CsrMatrix& other) const;

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  Vec values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

namespace serial {
/// Reference single-threaded y = A x.
void multiply(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
}  // namespace serial

}  // namespace janus
