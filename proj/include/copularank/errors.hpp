#pragma once

#include <stdexcept>
#include <string>

namespace copularank {

// A coordinate of the sample (or subsample) holds two exactly equal values.
class TiesDetected : public std::runtime_error {
 public:
  explicit TiesDetected(const std::string& what) : std::runtime_error(what) {}
};

// Every drawn subsample contained a tie; the data is unusable for a rank method.
class AllSubsamplesTied : public std::runtime_error {
 public:
  explicit AllSubsamplesTied(const std::string& what) : std::runtime_error(what) {}
};

class GridMismatch : public std::invalid_argument {
 public:
  explicit GridMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Kullback divergence is infinite: the reference has a zero cell where p > 0.
class DivergenceUndefined : public std::domain_error {
 public:
  explicit DivergenceUndefined(const std::string& what) : std::domain_error(what) {}
};

class CombinatorialExplosion : public std::length_error {
 public:
  explicit CombinatorialExplosion(const std::string& what) : std::length_error(what) {}
};

// The likelihood maximum sits on the edge of the admissible parameter interval.
class MleBoundHit : public std::runtime_error {
 public:
  MleBoundHit(const std::string& what, double theta) : std::runtime_error(what), theta_(theta) {}
  double theta() const noexcept { return theta_; }

 private:
  double theta_;
};

}  // namespace copularank
