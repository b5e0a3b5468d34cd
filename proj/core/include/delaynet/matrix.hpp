#pragma once

#include <span>
#include <vector>

#include "delaynet/error.hpp"

namespace delaynet {

// Dense post x pre matrix. Storage is presynaptic-major: column(i) is the
// contiguous slice of all postsynaptic entries for presynaptic neuron i,
// which is the access order of every per-synapse loop in this codebase.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int post, int pre, double fill = 0.0)
      : post_(post), pre_(pre),
        data_(static_cast<std::size_t>(post) * static_cast<std::size_t>(pre), fill) {
    require(post >= 1 && pre >= 1, ErrorKind::config, "Matrix: sizes must be positive");
  }

  int post() const { return post_; }
  int pre() const { return pre_; }
  std::size_t size() const { return data_.size(); }

  double at(int j_post, int i_pre) const {
    return data_[index(j_post, i_pre)];
  }
  double& at(int j_post, int i_pre) { return data_[index(j_post, i_pre)]; }

  std::span<const double> column(int i_pre) const {
    return {data_.data() + static_cast<std::size_t>(i_pre) * post_,
            static_cast<std::size_t>(post_)};
  }
  std::span<double> column(int i_pre) {
    return {data_.data() + static_cast<std::size_t>(i_pre) * post_,
            static_cast<std::size_t>(post_)};
  }

  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Matrix& other) const {
    return post_ == other.post_ && pre_ == other.pre_;
  }

 private:
  std::size_t index(int j_post, int i_pre) const {
    return static_cast<std::size_t>(i_pre) * post_ + static_cast<std::size_t>(j_post);
  }

  int post_ = 0;
  int pre_ = 0;
  std::vector<double> data_;
};

}  // namespace delaynet
