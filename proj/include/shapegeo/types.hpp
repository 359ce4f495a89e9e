#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace shapegeo {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

// Error hierarchy. The CLI maps each family onto an exit code.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed mesh file or configuration document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Non-manifold, boundary, or inconsistently oriented input.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Degenerate triangles or stars. `timestep` is set when raised while evaluating a path.
class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& what, int timestep = -1)
        : Error(timestep >= 0 ? what + " (timestep " + std::to_string(timestep) + ")" : what),
          timestep_(timestep)
    {}
    int timestep() const { return timestep_; }

private:
    int timestep_;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Shooting could not bracket the boundary value.
class BracketingError : public Error {
public:
    using Error::Error;
};

/// Per-vertex data tied to a mesh with V vertices.
template <typename T>
class VertexField {
public:
    VertexField() = default;
    explicit VertexField(std::size_t n, const T& fill = T{}) : values_(n, fill) {}
    explicit VertexField(std::vector<T> values) : values_(std::move(values)) {}

    std::size_t size() const { return values_.size(); }
    T& operator[](std::size_t i) { return values_[i]; }
    const T& operator[](std::size_t i) const { return values_[i]; }

    std::span<const T> values() const { return values_; }
    std::span<T> values() { return values_; }
    const std::vector<T>& vector() const { return values_; }

    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

private:
    std::vector<T> values_;
};

using ScalarField = VertexField<double>;
using VectorField = VertexField<Vec3>;

/// Neumaier compensated summation; order-dependent but deterministic.
template <typename T>
class CompensatedSum {
public:
    CompensatedSum() { reset(); }

    void reset()
    {
        if constexpr (std::is_arithmetic_v<T>) {
            sum_ = 0;
            comp_ = 0;
        } else {
            sum_.setZero();
            comp_.setZero();
        }
    }

    void add(const T& x)
    {
        if constexpr (std::is_arithmetic_v<T>) {
            add_scalar(sum_, comp_, x);
        } else {
            for (Eigen::Index i = 0; i < sum_.size(); ++i) add_scalar(sum_[i], comp_[i], x[i]);
        }
    }

    CompensatedSum& operator+=(const T& x)
    {
        add(x);
        return *this;
    }

    T value() const { return sum_ + comp_; }

private:
    static void add_scalar(double& s, double& c, double x)
    {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }

    T sum_;
    T comp_;
};

} // namespace shapegeo
