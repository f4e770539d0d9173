#ifndef ADT_TENSOR_HPP
#define ADT_TENSOR_HPP

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

#include "adt/errors.hpp"

namespace adt {

// Dense row-major tensor of doubles. Axis 0 is the slowest-varying axis, so
// for conditional probability tables (child variable on axis 0) the column
// for parent configuration j is the strided slice data[i * num_columns() + j].
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(count(shape_), 0.0) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != count(shape_))
            throw ShapeMismatch("tensor data length does not match shape");
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    std::size_t flat_index(std::span<const std::size_t> idx) const {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < shape_.size(); ++a) flat = flat * shape_[a] + idx[a];
        return flat;
    }

    double at(std::initializer_list<std::size_t> idx) const {
        return data_[flat_index(std::span<const std::size_t>(idx.begin(), idx.size()))];
    }
    double& at(std::initializer_list<std::size_t> idx) {
        return data_[flat_index(std::span<const std::size_t>(idx.begin(), idx.size()))];
    }

    // Number of parent configurations when axis 0 is the child variable.
    std::size_t num_columns() const {
        if (shape_.empty()) return 0;
        return size() == 0 ? 0 : size() / shape_[0];
    }

    double column_entry(std::size_t child, std::size_t col) const {
        return data_[child * num_columns() + col];
    }
    double& column_entry(std::size_t child, std::size_t col) {
        return data_[child * num_columns() + col];
    }

    bool operator==(const Tensor& other) const = default;

    static std::size_t count(const std::vector<std::size_t>& shape) {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                               [](std::size_t a, std::size_t b) { return a * b; });
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

}  // namespace adt

#endif
