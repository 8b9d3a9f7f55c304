#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef PSML_MAX_STATE_DIM
#define PSML_MAX_STATE_DIM 8
#endif

namespace psml {

inline constexpr int kMaxStateDim = PSML_MAX_STATE_DIM;

// State-space vectors and matrices carry their storage inline; the hot loops
// of the samplers never touch the heap.
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxStateDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                             kMaxStateDim, kMaxStateDim>;
using IndexList = std::vector<int>;

// A point X(t) in R^k.
using StateVector = Vector;

// Input outside an operation's admissible domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Factorization or floating-point failure inside a numerical kernel.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or malformed input file.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Constraint { kFree, kPositive, kUnitInterval };

struct ParamSpec {
  std::string name;
  Constraint constraint = Constraint::kFree;
};

// Model parameters in their natural (constrained) units, with a constraint
// descriptor per entry.
class ParamVector {
 public:
  ParamVector() = default;
  ParamVector(std::vector<double> values, std::vector<Constraint> constraints);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::vector<double> to_vector() const { return values_; }
  std::span<const Constraint> constraints() const { return constraints_; }

  // True when every entry lies inside its admissible range.
  bool admissible() const;

 private:
  std::vector<double> values_;
  std::vector<Constraint> constraints_;
};

// Observation times of one dataset and the Euler substep count between them.
class TimeGrid {
 public:
  TimeGrid(double t0, std::vector<double> times, int substeps);

  double t0() const { return t0_; }
  std::span<const double> times() const { return times_; }
  int substeps() const { return substeps_; }
  std::size_t intervals() const { return times_.size(); }
  double start(std::size_t i) const { return i == 0 ? t0_ : times_[i - 1]; }
  double end(std::size_t i) const { return times_[i]; }
  double step(std::size_t i) const {
    return (end(i) - start(i)) / substeps_;
  }

 private:
  double t0_;
  std::vector<double> times_;
  int substeps_;
};

struct Observation {
  double time = 0.0;
  Vector values;  // observed coordinates, in observed-set order
};

// A fully known initial state followed by partial observations.
struct Dataset {
  double t0 = 0.0;
  StateVector x0;
  IndexList observed;
  std::vector<Observation> records;

  std::vector<double> times() const;
  TimeGrid grid(int substeps) const { return TimeGrid(t0, times(), substeps); }
  void validate(int dimension) const;
};

// Gather the entries of v at the given indices.
Vector select(const Vector& v, const IndexList& idx);

// Indices of {0..k-1} not in `observed`, ascending.
IndexList complement(const IndexList& observed, int dimension);

}  // namespace psml
