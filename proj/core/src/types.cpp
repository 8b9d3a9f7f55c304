#include "psml/types.hpp"

#include <algorithm>
#include <cmath>

namespace psml {

ParamVector::ParamVector(std::vector<double> values,
                         std::vector<Constraint> constraints)
    : values_(std::move(values)), constraints_(std::move(constraints)) {
  if (constraints_.empty()) constraints_.assign(values_.size(), Constraint::kFree);
  if (constraints_.size() != values_.size()) {
    throw DomainError("ParamVector: one constraint per value required");
  }
}

bool ParamVector::admissible() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v)) return false;
    switch (constraints_[i]) {
      case Constraint::kFree:
        break;
      case Constraint::kPositive:
        if (!(v > 0.0)) return false;
        break;
      case Constraint::kUnitInterval:
        if (v < 0.0 || v > 1.0) return false;
        break;
    }
  }
  return true;
}

TimeGrid::TimeGrid(double t0, std::vector<double> times, int substeps)
    : t0_(t0), times_(std::move(times)), substeps_(substeps) {
  if (substeps_ < 1) throw DomainError("TimeGrid: substeps must be >= 1");
  double previous = t0_;
  for (double t : times_) {
    if (!(t > previous)) {
      throw DomainError("TimeGrid: times must be strictly increasing");
    }
    previous = t;
  }
}

std::vector<double> Dataset::times() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.time);
  return out;
}

void Dataset::validate(int dimension) const {
  if (x0.size() != dimension) {
    throw ConfigError("dataset: x0 has " + std::to_string(x0.size()) +
                      " entries, model dimension is " +
                      std::to_string(dimension));
  }
  if (!x0.allFinite()) throw ConfigError("dataset: x0 is not finite");
  if (observed.empty()) throw ConfigError("dataset: observed set is empty");
  for (int i : observed) {
    if (i < 0 || i >= dimension) {
      throw ConfigError("dataset: observed index out of range");
    }
    if (std::count(observed.begin(), observed.end(), i) > 1) {
      throw ConfigError("dataset: observed index listed twice");
    }
  }
  double previous = t0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (!(rec.time > previous)) {
      throw ConfigError("dataset: record " + std::to_string(r) +
                        " time is not increasing");
    }
    previous = rec.time;
    if (rec.values.size() != static_cast<int>(observed.size()) ||
        !rec.values.allFinite()) {
      throw ConfigError("dataset: record " + std::to_string(r) +
                        " has a malformed observation");
    }
  }
}

Vector select(const Vector& v, const IndexList& idx) {
  Vector out(static_cast<int>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

IndexList complement(const IndexList& observed, int dimension) {
  IndexList out;
  for (int i = 0; i < dimension; ++i) {
    if (std::find(observed.begin(), observed.end(), i) == observed.end()) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace psml
