#include "crn/rational.hpp"

#include <algorithm>
#include <stdexcept>

namespace crn {

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RationalVector RationalMatrix::row(std::size_t i) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

RationalVector RationalMatrix::multiply(const RationalVector& x) const {
  if (x.size() != cols_) throw std::invalid_argument("RationalMatrix::multiply: size mismatch");
  RationalVector y(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Rational acc = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (sgn((*this)(i, j)) != 0) acc += (*this)(i, j) * x[j];
    }
    y[i] = acc;
  }
  return y;
}

RationalMatrix RationalMatrix::from_rows(const std::vector<RationalVector>& rows, std::size_t cols) {
  RationalMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("from_rows: ragged rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

RowEchelon rref(RationalMatrix m) {
  RowEchelon out;
  std::size_t lead_row = 0;
  for (std::size_t col = 0; col < m.cols() && lead_row < m.rows(); ++col) {
    std::size_t pivot = lead_row;
    while (pivot < m.rows() && sgn(m(pivot, col)) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != lead_row) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(pivot, j), m(lead_row, j));
    }
    Rational inv = 1 / m(lead_row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(lead_row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == lead_row || sgn(m(i, col)) == 0) continue;
      Rational factor = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= factor * m(lead_row, j);
    }
    out.pivots.push_back(col);
    ++lead_row;
  }
  out.reduced = std::move(m);
  return out;
}

std::size_t rank(const RationalMatrix& m) { return rref(m).pivots.size(); }

std::vector<RationalVector> nullspace(const RationalMatrix& m) {
  auto echelon = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : echelon.pivots) is_pivot[p] = true;

  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(m.cols());
    v[free] = 1;
    for (std::size_t k = 0; k < echelon.pivots.size(); ++k) {
      v[echelon.pivots[k]] = -echelon.reduced(k, free);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

bool in_span(const std::vector<RationalVector>& basis, const RationalVector& v) {
  std::vector<RationalVector> rows = basis;
  std::size_t r0 = rank(RationalMatrix::from_rows(rows, v.size()));
  rows.push_back(v);
  return rank(RationalMatrix::from_rows(rows, v.size())) == r0;
}

bool same_span(const std::vector<RationalVector>& a, const std::vector<RationalVector>& b) {
  std::size_t n = !a.empty() ? a.front().size() : (!b.empty() ? b.front().size() : 0);
  auto ra = rank(RationalMatrix::from_rows(a, n));
  auto rb = rank(RationalMatrix::from_rows(b, n));
  if (ra != rb) return false;
  std::vector<RationalVector> both = a;
  both.insert(both.end(), b.begin(), b.end());
  return rank(RationalMatrix::from_rows(both, n)) == ra;
}

std::vector<Integer> primitive(std::vector<Integer> v) {
  Integer g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g == 0 || g == 1) return v;
  for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  return v;
}

std::vector<Integer> primitive(const RationalVector& v) {
  Integer l = 1;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  std::vector<Integer> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rational scaled = v[i] * l;
    out[i] = scaled.get_num();
  }
  return primitive(std::move(out));
}

RationalVector to_rational(const std::vector<int>& v) {
  RationalVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

RationalVector to_rational(const std::vector<std::int64_t>& v) {
  RationalVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rational(Integer(static_cast<long>(v[i])));
  return out;
}

bool is_zero(const RationalVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return sgn(x) == 0; });
}

}  // namespace crn
