#pragma once

#include "psml/types.hpp"

namespace psml {

// N(mean, covariance) in R^k.
struct GaussianSpec {
  Vector mean;
  Matrix covariance;

  int dimension() const { return static_cast<int>(mean.size()); }
};

// Lower Cholesky factor of a covariance matrix. When the plain factorization
// fails (singular or marginally indefinite input), 1e-10 * trace / k is added
// to the diagonal once before giving up with NumericalError.
class GaussianFactor {
 public:
  explicit GaussianFactor(const Matrix& covariance);

  int dimension() const { return static_cast<int>(lower_.rows()); }
  const Matrix& lower() const { return lower_; }
  double log_determinant() const { return log_det_; }
  bool jittered() const { return jittered_; }

  double log_density(const Vector& x, const Vector& mean) const;
  // mean + L z.
  Vector sample(const Vector& mean, const Vector& z) const;
  // Solves covariance * y = b.
  Matrix solve(const Matrix& b) const;

 private:
  Matrix lower_;
  double log_det_ = 0.0;
  bool jittered_ = false;
};

double mvn_logpdf(const Vector& x, const GaussianSpec& spec);

// Marginal law of the coordinates `idx` (in that order).
GaussianSpec marginal(const GaussianSpec& spec, const IndexList& idx);

// Law of the complement of `given` (ascending order) conditional on
// x[given] == given_values.
GaussianSpec conditional(const GaussianSpec& spec, const IndexList& given,
                         const Vector& given_values);

// Symmetric PSD square root via eigendecomposition; negative eigenvalues are
// clipped to zero. Throws DomainError for input asymmetric beyond 1e-12
// relative.
Matrix matrix_sqrt(const Matrix& sigma);

// Relative asymmetry ||A - A^T||_F / (1 + ||A||_F).
double asymmetry(const Matrix& a);

}  // namespace psml
