#pragma once

#include <cmath>
#include <string>

#include "maxdist/covmodel.hpp"
#include "maxdist/errors.hpp"
#include "maxdist/rng.hpp"

namespace maxdist {

enum class InnovationKind { Gaussian, Rademacher, Uniform, ThreePoint };

/// Law of the i.i.d. innovation components; every kind is standardized to
/// mean 0 and variance 1, and every kind is sub-Gaussian (bounded or normal).
///
/// ThreePoint(kappa4) puts mass 1/(2 kappa4) on each of +-sqrt(kappa4) and the
/// rest at 0, realizing any fourth moment in [1, 5) with a bounded law.
struct InnovationSpec {
  InnovationKind kind = InnovationKind::Gaussian;
  double kappa4_param = 3.0;  // ThreePoint only

  static InnovationSpec gaussian() { return {InnovationKind::Gaussian, 3.0}; }
  static InnovationSpec rademacher() { return {InnovationKind::Rademacher, 1.0}; }
  static InnovationSpec uniform() { return {InnovationKind::Uniform, 1.8}; }
  static InnovationSpec three_point(double kappa4) {
    check_kurtosis_range(kappa4);
    return {InnovationKind::ThreePoint, kappa4};
  }

  void validate() const {
    if (kind == InnovationKind::ThreePoint) check_kurtosis_range(kappa4_param);
  }

  std::string describe() const {
    switch (kind) {
      case InnovationKind::Gaussian:
        return "gaussian";
      case InnovationKind::Rademacher:
        return "rademacher";
      case InnovationKind::Uniform:
        return "uniform";
      case InnovationKind::ThreePoint:
        return "threepoint(kappa4=" + std::to_string(kappa4_param) + ")";
    }
    return "?";
  }
};

/// Exact fourth moment of the law.
inline double kurtosis_of(const InnovationSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case InnovationKind::Gaussian:
      return 3.0;
    case InnovationKind::Rademacher:
      return 1.0;
    case InnovationKind::Uniform:
      return 9.0 / 5.0;
    case InnovationKind::ThreePoint:
      return spec.kappa4_param;
  }
  return 0.0;
}

inline double draw_innovation(const InnovationSpec& spec, RngStream& rng) {
  switch (spec.kind) {
    case InnovationKind::Gaussian:
      return rng.normal();
    case InnovationKind::Rademacher:
      return rng.rademacher();
    case InnovationKind::Uniform:
      return std::sqrt(3.0) * (2.0 * rng.uniform01() - 1.0);
    case InnovationKind::ThreePoint: {
      const double k = spec.kappa4_param;
      const double u = rng.uniform01();
      if (u <= 0.5 / k) return -std::sqrt(k);
      if (u <= 1.0 / k) return std::sqrt(k);
      return 0.0;
    }
  }
  return 0.0;
}

}  // namespace maxdist
