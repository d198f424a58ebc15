#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace crisk {

/// N observations of an m-dimensional random vector, stored row-major.
class Sample {
 public:
  Sample(std::vector<double> values, std::size_t dim);

  /// One-dimensional sample.
  static Sample scalar(std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  double at(std::size_t i, std::size_t coord) const noexcept { return data_[i * dim_ + coord]; }
  std::span<const double> values() const noexcept { return data_; }

  double min(std::size_t coord = 0) const;
  double max(std::size_t coord = 0) const;
  double mean(std::size_t coord = 0) const;
  /// Standard deviation with denominator N-1 (0 when N == 1).
  double stddev(std::size_t coord = 0) const;

  Sample shifted(double c) const;
  Sample scaled(double t) const;

 private:
  std::vector<double> data_;
  std::size_t n_;
  std::size_t dim_;
};

}  // namespace crisk
