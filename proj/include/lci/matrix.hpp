#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lci {

// Dense row-major matrix with an explicit per-cell presence mask. The
// feature pipeline never materializes NaN: absent cells are masked out and
// carry a zero payload.
struct DataMatrix {
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> present;

  DataMatrix() = default;
  explicit DataMatrix(std::size_t n_cols) : cols(n_cols) {}

  std::size_t rows() const { return cols == 0 ? 0 : values.size() / cols; }

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  bool is_present(std::size_t r, std::size_t c) const {
    return present[r * cols + c] != 0;
  }

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
  std::span<const std::uint8_t> row_mask(std::size_t r) const {
    return {present.data() + r * cols, cols};
  }

  void push_row(std::span<const double> v, std::span<const std::uint8_t> m) {
    values.insert(values.end(), v.begin(), v.end());
    present.insert(present.end(), m.begin(), m.end());
  }

  // All-present convenience row.
  void push_row(std::span<const double> v) {
    values.insert(values.end(), v.begin(), v.end());
    present.insert(present.end(), v.size(), 1);
  }
};

}  // namespace lci
