#pragma once

#include <cstdint>
#include <vector>

namespace lhom {

// Arithmetic modulo the prime 2^31 - 1.
struct PrimeField {
  static constexpr std::uint64_t p = 2147483647ULL;

  static std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    return s >= p ? s - p : s;
  }
  static std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + p - b; }
  static std::uint64_t mul(std::uint64_t a, std::uint64_t b) { return (a * b) % p; }
  static std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    a %= p;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  static std::uint64_t inv(std::uint64_t a) { return pow(a, p - 2); }
};

// Incrementally built row basis. A row is kept iff it is linearly
// independent of the rows kept before it; pivots are first non-zero columns.
class RowBasis {
 public:
  explicit RowBasis(std::size_t cols) : cols_(cols) {}

  // Returns true (and keeps the row) iff it is independent of the basis.
  bool insert(std::vector<std::uint64_t> row) {
    using F = PrimeField;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      std::uint64_t c = row[pivots_[i]];
      if (c == 0) continue;
      // rows_[i] is normalised to 1 at its pivot.
      const auto& b = rows_[i];
      for (std::size_t j = pivots_[i]; j < cols_; ++j)
        if (b[j]) row[j] = F::sub(row[j], F::mul(c, b[j]));
    }
    std::size_t piv = 0;
    while (piv < cols_ && row[piv] == 0) ++piv;
    if (piv == cols_) return false;
    std::uint64_t s = F::inv(row[piv]);
    for (std::size_t j = piv; j < cols_; ++j) row[j] = F::mul(row[j], s);
    rows_.push_back(std::move(row));
    pivots_.push_back(piv);
    return true;
  }

  std::size_t rank() const { return rows_.size(); }

 private:
  std::size_t cols_;
  std::vector<std::vector<std::uint64_t>> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace lhom
