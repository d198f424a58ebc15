#include "crisk/sample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crisk/error.hpp"

namespace crisk {

Sample::Sample(std::vector<double> values, std::size_t dim) : data_(std::move(values)), n_(0), dim_(dim) {
  if (dim_ == 0) fail(ErrorKind::BadParameters, "sample dimension must be positive");
  if (data_.empty()) fail(ErrorKind::BadParameters, "sample needs at least one observation");
  if (data_.size() % dim_ != 0) {
    fail(ErrorKind::DimensionMismatch, "sample of " + std::to_string(data_.size()) +
                                           " values is not a whole number of rows of dimension " +
                                           std::to_string(dim_));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) fail(ErrorKind::NonFiniteValue, "sample contains a non-finite coordinate");
  }
  n_ = data_.size() / dim_;
}

Sample Sample::scalar(std::vector<double> values) { return Sample(std::move(values), 1); }

double Sample::min(std::size_t coord) const {
  double m = at(0, coord);
  for (std::size_t i = 1; i < n_; ++i) m = std::min(m, at(i, coord));
  return m;
}

double Sample::max(std::size_t coord) const {
  double m = at(0, coord);
  for (std::size_t i = 1; i < n_; ++i) m = std::max(m, at(i, coord));
  return m;
}

double Sample::mean(std::size_t coord) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += at(i, coord);
  return s / static_cast<double>(n_);
}

double Sample::stddev(std::size_t coord) const {
  if (n_ < 2) return 0.0;
  const double m = mean(coord);
  double ss = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double d = at(i, coord) - m;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n_ - 1));
}

Sample Sample::shifted(double c) const {
  std::vector<double> v(data_);
  for (double& x : v) x += c;
  return Sample(std::move(v), dim_);
}

Sample Sample::scaled(double t) const {
  std::vector<double> v(data_);
  for (double& x : v) x *= t;
  return Sample(std::move(v), dim_);
}

}  // namespace crisk
