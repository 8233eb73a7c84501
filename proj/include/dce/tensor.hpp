#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dce {

// Dense row-major tensor of doubles. All training and gradient checking is
// done in 64-bit; see checkpoint.hpp for on-disk storage.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> shape_in, double fill = 0.0);

    static Tensor zeros(std::vector<std::size_t> shape_in) { return Tensor(std::move(shape_in)); }

    std::size_t size() const { return data.size(); }
    std::size_t rows() const;
    std::size_t cols() const;

    double& at(std::size_t i);
    double at(std::size_t i) const;
    double& at(std::size_t r, std::size_t c);
    double at(std::size_t r, std::size_t c) const;

    void fill(double v);
    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    bool all_finite() const;
};

std::size_t shape_numel(const std::vector<std::size_t>& shape);
std::string shape_to_string(const std::vector<std::size_t>& shape);

// A named parameter tensor paired with its gradient accumulator. Models hand
// spans of these to the optimizer, the gradient checker and the checkpoint
// writer.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;

    Param() = default;
    Param(std::string name_in, Tensor value_in)
        : name(std::move(name_in)), value(std::move(value_in)), grad(Tensor::zeros(value.shape)) {}

    void zero_grad() { grad.fill(0.0); }
};

void zero_grads(const std::vector<Param*>& params);

}  // namespace dce
