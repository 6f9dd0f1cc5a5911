#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace crn {

using Rational = mpq_class;
using Integer = mpz_class;
using RationalVector = std::vector<Rational>;

/// Dense row-major matrix over Q.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RationalMatrix transpose() const;
  RationalVector row(std::size_t i) const;
  RationalVector multiply(const RationalVector& x) const;

  static RationalMatrix from_rows(const std::vector<RationalVector>& rows, std::size_t cols);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

struct RowEchelon {
  RationalMatrix reduced;            // reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
};

RowEchelon rref(RationalMatrix m);
std::size_t rank(const RationalMatrix& m);

/// Basis of {x : m x = 0}, one vector per free column, with a 1 in that column.
std::vector<RationalVector> nullspace(const RationalMatrix& m);

/// Exact equality of span(a) and span(b); vectors must share a length.
bool same_span(const std::vector<RationalVector>& a, const std::vector<RationalVector>& b);
bool in_span(const std::vector<RationalVector>& basis, const RationalVector& v);

/// Scale to the primitive integer vector (gcd 1) along the same ray.
std::vector<Integer> primitive(const RationalVector& v);
std::vector<Integer> primitive(std::vector<Integer> v);

RationalVector to_rational(const std::vector<int>& v);
RationalVector to_rational(const std::vector<std::int64_t>& v);

bool is_zero(const RationalVector& v);

}  // namespace crn
