#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace irdg {

// Small dense square matrix, row-major. Everything in this project is k x k
// where k is the number of vertex types, so no sparse or blocked storage.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t k, double fill = 0.0) : k_(k), a_(k * k, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size())
        throw std::invalid_argument("Matrix::from_rows: ragged row " + std::to_string(i));
      for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t size() const noexcept { return k_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * k_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * k_ + j]; }

  const std::vector<double>& data() const noexcept { return a_; }

 private:
  std::size_t k_ = 0;
  std::vector<double> a_;
};

}  // namespace irdg
