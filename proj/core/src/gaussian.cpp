#include "psml/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace psml {
namespace {

constexpr double kJitterScale = 1e-10;
constexpr double kSymmetryTolerance = 1e-12;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

bool try_cholesky(const Matrix& a, Matrix& lower) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return false;
  lower = llt.matrixL();
  for (int i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0) || !std::isfinite(lower(i, i))) return false;
  }
  return true;
}

}  // namespace

GaussianFactor::GaussianFactor(const Matrix& covariance) {
  const int k = static_cast<int>(covariance.rows());
  if (covariance.cols() != k) throw DomainError("covariance must be square");
  if (k == 0) return;
  if (!covariance.allFinite()) {
    throw NumericalError("covariance has non-finite entries");
  }
  if (!try_cholesky(covariance, lower_)) {
    const double trace = covariance.trace();
    if (!(trace > 0.0)) {
      throw NumericalError("covariance is singular with non-positive trace");
    }
    Matrix jittered = covariance;
    jittered.diagonal().array() += kJitterScale * trace / k;
    if (!try_cholesky(jittered, lower_)) {
      throw NumericalError("covariance is not positive semidefinite");
    }
    jittered_ = true;
  }
  log_det_ = 2.0 * lower_.diagonal().array().log().sum();
}

double GaussianFactor::log_density(const Vector& x, const Vector& mean) const {
  const int k = dimension();
  if (k == 0) return 0.0;
  Vector r = x - mean;
  lower_.triangularView<Eigen::Lower>().solveInPlace(r);
  return -0.5 * (k * kLog2Pi + log_det_ + r.squaredNorm());
}

Vector GaussianFactor::sample(const Vector& mean, const Vector& z) const {
  if (dimension() == 0) return mean;
  return mean + lower_.triangularView<Eigen::Lower>() * z;
}

Matrix GaussianFactor::solve(const Matrix& b) const {
  Matrix y = b;
  lower_.triangularView<Eigen::Lower>().solveInPlace(y);
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(y);
  return y;
}

double mvn_logpdf(const Vector& x, const GaussianSpec& spec) {
  if (x.size() != spec.mean.size() ||
      spec.covariance.rows() != spec.mean.size()) {
    throw DomainError("mvn_logpdf: dimension mismatch");
  }
  return GaussianFactor(spec.covariance).log_density(x, spec.mean);
}

GaussianSpec marginal(const GaussianSpec& spec, const IndexList& idx) {
  GaussianSpec out;
  out.mean = spec.mean(idx);
  out.covariance = spec.covariance(idx, idx);
  return out;
}

GaussianSpec conditional(const GaussianSpec& spec, const IndexList& given,
                         const Vector& given_values) {
  const IndexList rest = complement(given, spec.dimension());
  GaussianSpec out;
  if (given.empty()) return marginal(spec, rest);
  const Matrix s_gg = spec.covariance(given, given);
  const Matrix s_rg = spec.covariance(rest, given);
  const GaussianFactor factor(s_gg);
  // gain = S_rg S_gg^{-1}, formed as (S_gg^{-1} S_gr)^T.
  const Matrix gain = factor.solve(s_rg.transpose()).transpose();
  out.mean = spec.mean(rest) + gain * (given_values - spec.mean(given));
  out.covariance = spec.covariance(rest, rest) - gain * s_rg.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

double asymmetry(const Matrix& a) {
  return (a - a.transpose()).norm() / (1.0 + a.norm());
}

Matrix matrix_sqrt(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw DomainError("matrix_sqrt: matrix must be square");
  }
  if (!sigma.allFinite()) throw DomainError("matrix_sqrt: non-finite entries");
  if (asymmetry(sigma) > kSymmetryTolerance) {
    throw DomainError("matrix_sqrt: matrix is not symmetric");
  }
  if (sigma.rows() == 0) return sigma;
  const Matrix sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("matrix_sqrt: eigendecomposition failed");
  }
  const Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix& v = eig.eigenvectors();
  Matrix b = v * roots.asDiagonal() * v.transpose();
  return 0.5 * (b + b.transpose());
}

}  // namespace psml
