#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "chase/core/errors.hpp"

namespace chase {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using ColVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

Index numel(const Shape& shape);
std::string to_string(const Shape& shape);
/// Row-major strides of `shape`.
Shape strides_of(const Shape& shape);

/// Dense row-major N-d array. Value semantics; the element count always equals
/// the product of the extents.
template <typename Scalar>
class Tensor {
 public:
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using MatrixMap = Eigen::Map<RowMatrix<Scalar>>;
  using ConstMatrixMap = Eigen::Map<const RowMatrix<Scalar>>;

  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    check_extents();
    data_ = Storage::Zero(numel(shape_));
  }

  Tensor(Shape shape, Storage data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_extents();
    if (data_.size() != numel(shape_)) {
      throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                           " does not match shape " + to_string(shape_));
    }
  }

  Tensor(Shape shape, std::initializer_list<Scalar> values)
      : Tensor(std::move(shape), Eigen::Map<const Storage>(values.begin(), values.size())) {}

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

  static Tensor constant(Shape shape, Scalar value) {
    Tensor t(std::move(shape));
    t.data_.setConstant(value);
    return t;
  }

  static Tensor scalar(Scalar value) { return Tensor(Shape{}, Storage::Constant(1, value)); }

  const Shape& shape() const noexcept { return shape_; }
  Index rank() const noexcept { return static_cast<Index>(shape_.size()); }
  Index size() const noexcept { return data_.size(); }
  Index dim(Index axis) const { return shape_.at(static_cast<std::size_t>(axis)); }

  Storage& data() noexcept { return data_; }
  const Storage& data() const noexcept { return data_; }

  Scalar& operator[](Index i) { return data_[i]; }
  Scalar operator[](Index i) const { return data_[i]; }

  Scalar& operator()(std::initializer_list<Index> idx) { return data_[offset(idx)]; }
  Scalar operator()(std::initializer_list<Index> idx) const { return data_[offset(idx)]; }

  /// Scalar value of a one-element tensor.
  Scalar item() const {
    if (data_.size() != 1) throw DimensionError("item() on tensor of shape " + to_string(shape_));
    return data_[0];
  }

  /// View as a rows x cols row-major matrix; rows * cols must equal size().
  MatrixMap matrix(Index rows, Index cols) {
    check_view(rows, cols);
    return MatrixMap(data_.data(), rows, cols);
  }
  ConstMatrixMap matrix(Index rows, Index cols) const {
    check_view(rows, cols);
    return ConstMatrixMap(data_.data(), rows, cols);
  }
  /// Rank-2 tensors only.
  MatrixMap matrix() { return matrix(dim(0), dim(1)); }
  ConstMatrixMap matrix() const { return matrix(dim(0), dim(1)); }

  Tensor reshaped(Shape shape) const { return Tensor(std::move(shape), data_); }

  bool all_finite() const { return data_.isFinite().all(); }

  template <typename Other>
  Tensor<Other> cast() const {
    return Tensor<Other>(shape_, data_.template cast<Other>());
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && (a.data_ == b.data_).all();
  }

 private:
  void check_extents() const {
    for (Index d : shape_) {
      if (d <= 0) throw DimensionError("non-positive extent in shape " + to_string(shape_));
    }
  }

  void check_view(Index rows, Index cols) const {
    if (rows * cols != data_.size()) {
      throw DimensionError("cannot view tensor of shape " + to_string(shape_) + " as " +
                           std::to_string(rows) + "x" + std::to_string(cols));
    }
  }

  Index offset(std::initializer_list<Index> idx) const {
    if (static_cast<std::size_t>(idx.size()) != shape_.size()) {
      throw IndexError("index rank does not match tensor of shape " + to_string(shape_));
    }
    Index off = 0;
    std::size_t a = 0;
    for (Index i : idx) {
      if (i < 0 || i >= shape_[a]) throw IndexError("index out of range for shape " + to_string(shape_));
      off = off * shape_[a] + i;
      ++a;
    }
    return off;
  }

  Shape shape_;
  Storage data_ = Storage::Zero(1);
};

using TensorXd = Tensor<double>;
using TensorXf = Tensor<float>;

}  // namespace chase
