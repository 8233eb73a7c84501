#include "dce/tensor.hpp"

#include <cmath>
#include <sstream>

#include "dce/errors.hpp"

namespace dce {

Tensor::Tensor(std::vector<std::size_t> shape_in, double fill) : shape(std::move(shape_in)) {
    for (std::size_t extent : shape) {
        if (extent == 0) throw DimensionError("tensor extents must be positive");
    }
    data.assign(shape_numel(shape), fill);
}

std::size_t Tensor::rows() const {
    if (shape.size() != 2) throw DimensionError("rows() requires a rank-2 tensor");
    return shape[0];
}

std::size_t Tensor::cols() const {
    if (shape.size() != 2) throw DimensionError("cols() requires a rank-2 tensor");
    return shape[1];
}

double& Tensor::at(std::size_t i) {
    if (i >= data.size()) throw IndexError("tensor index out of range");
    return data[i];
}

double Tensor::at(std::size_t i) const {
    if (i >= data.size()) throw IndexError("tensor index out of range");
    return data[i];
}

double& Tensor::at(std::size_t r, std::size_t c) {
    if (shape.size() != 2 || r >= shape[0] || c >= shape[1])
        throw IndexError("tensor (row,col) index out of range");
    return data[r * shape[1] + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
    if (shape.size() != 2 || r >= shape[0] || c >= shape[1])
        throw IndexError("tensor (row,col) index out of range");
    return data[r * shape[1] + c];
}

void Tensor::fill(double v) {
    for (double& x : data) x = v;
}

bool Tensor::all_finite() const {
    for (double x : data) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t extent : shape) n *= extent;
    return n;
}

std::string shape_to_string(const std::vector<std::size_t>& shape) {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out << ",";
        out << shape[i];
    }
    out << ")";
    return out.str();
}

void zero_grads(const std::vector<Param*>& params) {
    for (Param* p : params) p->zero_grad();
}

}  // namespace dce
