#pragma once

#include <stdexcept>
#include <string>

namespace bernstein {

/// Input that violates a documented precondition (bad resolution, m <= n, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation requested on a geometry that does not support it.
class UnsupportedGeometry : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The evolving metric lost positive definiteness.
class MetricDegeneration : public std::runtime_error {
public:
    MetricDegeneration(double time, double min_eigenvalue)
        : std::runtime_error("metric degenerated at t = " + std::to_string(time) +
                             " (smallest eigenvalue " + std::to_string(min_eigenvalue) + ")"),
          time_(time), min_eigenvalue_(min_eigenvalue) {}

    double time() const { return time_; }
    double min_eigenvalue() const { return min_eigenvalue_; }

private:
    double time_;
    double min_eigenvalue_;
};

/// A NaN or Inf appeared in a field during integration.
class NonFiniteField : public std::runtime_error {
public:
    NonFiniteField(const std::string& field, int node, double time)
        : std::runtime_error("non-finite value in field '" + field + "' at node " + std::to_string(node) +
                             ", t = " + std::to_string(time)),
          node_(node), time_(time) {}

    int node() const { return node_; }
    double time() const { return time_; }

private:
    int node_;
    double time_;
};

}  // namespace bernstein
