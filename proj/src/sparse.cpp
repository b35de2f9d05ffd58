#include "janus/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "janus/error.hpp"

namespace janus {

void CooBuilder::add(std::size_t row, std::size_t col, double value) {
  entries_.push_back({row, col, value});
}

void CooBuilder::add_edge(std::size_t i, std::size_t j, double weight) {
  if (weight == 0.0 || i == j) return;
  entries_.push_back({i, i, weight});
  entries_.push_back({j, j, weight});
  entries_.push_back({i, j, -weight});
  entries_.push_back({j, i, -weight});
}

void CooBuilder::append(const CooBuilder& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

CsrMatrix::CsrMatrix(std::size_t n) : n_(n), row_ptr_(n + 1, 0) {}

CsrMatrix CsrMatrix::from_triplets(std::size_t n, std::span<const Triplet> triplets) {
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = triplets[a];
    const auto& y = triplets[b];
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  CsrMatrix m(n);
  std::size_t last_row = n, last_col = n;
  std::vector<std::size_t> counts(n, 0);
  for (auto k : order) {
    const auto& t = triplets[k];
    if (t.row >= n || t.col >= n) throw Error(ErrorCode::DimensionMismatch, "triplet out of range");
    if (t.row == last_row && t.col == last_col) {
      m.values_.back() += t.value;
      continue;
    }
    m.col_idx_.push_back(t.col);
    m.values_.push_back(t.value);
    ++counts[t.row];
    last_row = t.row;
    last_col = t.col;
  }
  for (std::size_t r = 0; r < n; ++r) m.row_ptr_[r + 1] = m.row_ptr_[r] + counts[r];
  return m;
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
    if (col_idx_[k] == c) return values_[k];
  }
  return 0.0;
}

Vec CsrMatrix::diagonal() const {
  Vec d(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) d[r] = at(r, r);
  return d;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw Error(ErrorCode::DimensionMismatch, "spmv size");
  const auto n = static_cast<std::ptrdiff_t>(n_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (auto k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      acc += values_[k] * x[col_idx_[k]];
    }
    y[static_cast<std::size_t>(r)] = acc;
  }
}

Vec CsrMatrix::multiply(std::span<const double> x) const {
  Vec y(n_, 0.0);
  multiply(x, y);
  return y;
}

CsrMatrix CsrMatrix::operator+(const CsrMatrix& other) const {
  if (other.n_ != n_) throw Error(ErrorCode::DimensionMismatch, "matrix sum size");
  std::vector<Triplet> t;
  t.reserve(nnz() + other.nnz());
  for (const CsrMatrix* m : {this, &other}) {
    for (std::size_t r = 0; r < n_; ++r) {
      for (auto k = m->row_ptr_[r]; k < m->row_ptr_[r + 1]; ++k) {
        t.push_back({r, m->col_idx_[k], m->values_[k]});
      }
    }
  }
  return from_triplets(n_, t);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace serial {

void multiply(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double acc = 0.0;
    for (auto k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
      acc += a.values()[k] * x[a.col_idx()[k]];
    }
    y[r] = acc;
  }
}

}  // namespace serial

}  // namespace janus
