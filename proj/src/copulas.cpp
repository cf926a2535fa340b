#include "copularank/copulas.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <tuple>
#include <utility>
#include <stdexcept>
#include <vector>

#include "copularank/errors.hpp"

namespace copularank {
namespace {

constexpr double kThetaBound = 50.0;

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in [0,1]");
  }
}

void check_theta(double theta) {
  if (!std::isfinite(theta) || theta == 0.0) throw std::domain_error("Frank theta must be finite and nonzero");
}

void check_rho(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("correlation must lie in (-1,1)");
}

// Keeps a probability strictly inside (0,1).
double open_unit(double x) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(x, lo, hi);
}

// (1 - e^{-theta}) - (1 - e^{-theta u})(1 - e^{-theta v}), written as a sum of
// two terms of equal sign.
double frank_denominator(double u, double v, double theta) {
  return std::exp(-theta * u) * -std::expm1(-theta * v) + std::exp(-theta * v) * -std::expm1(-theta * (1.0 - v));
}

}  // namespace

CopulaModel make_mixture(CopulaModel base, CopulaModel contaminant) {
  return MixtureHalf{std::make_shared<const CopulaModel>(std::move(base)),
                     std::make_shared<const CopulaModel>(std::move(contaminant))};
}

void validate_model(const CopulaModel& model) {
  struct Visitor {
    void operator()(const IndependenceCopula&) const {}
    void operator()(const FrankCopula& m) const {
      if (!std::isfinite(m.theta) || std::abs(m.theta) < kFrankThetaFloor) {
        throw std::invalid_argument("Frank theta must satisfy |theta| >= 1e-6");
      }
    }
    void operator()(const GaussianCopula& m) const { check_rho(m.rho); }
    void operator()(const StudentCopula& m) const {
      if (m.dof < 1) throw std::invalid_argument("Student degrees of freedom must be >= 1");
      check_rho(m.rho);
    }
    void operator()(const MixtureHalf& m) const {
      if (!m.base || !m.contaminant) throw std::invalid_argument("mixture components must be set");
      validate_model(*m.base);
      validate_model(*m.contaminant);
    }
  };
  std::visit(Visitor{}, model);
}

std::string describe(const CopulaModel& model) {
  struct Visitor {
    std::string operator()(const IndependenceCopula&) const { return "independence"; }
    std::string operator()(const FrankCopula& m) const {
      std::ostringstream out;
      out << "frank(" << m.theta << ")";
      return out.str();
    }
    std::string operator()(const GaussianCopula& m) const {
      std::ostringstream out;
      out << "gaussian(" << m.rho << ")";
      return out.str();
    }
    std::string operator()(const StudentCopula& m) const {
      std::ostringstream out;
      out << "student(" << m.dof << "," << m.rho << ")";
      return out.str();
    }
    std::string operator()(const MixtureHalf& m) const {
      return "mixture(" + describe(*m.base) + "," + describe(*m.contaminant) + ")";
    }
  };
  return std::visit(Visitor{}, model);
}

double frank_cdf(double u, double v, double theta) {
  check_unit(u, "u");
  check_unit(v, "v");
  check_theta(theta);
  if (std::abs(theta) <= 1.0) {
    return -std::log1p(std::expm1(-theta * u) * std::expm1(-theta * v) / std::expm1(-theta)) / theta;
  }
  // 1 + (...)/(e^{-theta} - 1) equals denominator / (1 - e^{-theta}); both share a sign.
  const double ratio = frank_denominator(u, v, theta) / -std::expm1(-theta);
  return -std::log(ratio) / theta;
}

double frank_log_pdf(double u, double v, double theta) {
  check_unit(u, "u");
  check_unit(v, "v");
  check_theta(theta);
  const double scale = theta * -std::expm1(-theta);  // > 0 for either sign of theta
  const double denominator = frank_denominator(u, v, theta);
  return std::log(scale) - theta * (u + v) - 2.0 * std::log(std::abs(denominator));
}

double frank_pdf(double u, double v, double theta) { return std::exp(frank_log_pdf(u, v, theta)); }

double frank_conditional_inverse(double u, double w, double theta) {
  check_theta(theta);
  const double a = std::exp(-theta * u);
  double v;
  if (std::abs(theta) <= 1.0) {
    v = -std::log1p(w * std::expm1(-theta) / (w + (1.0 - w) * a)) / theta;
  } else {
    // 1 + w(e^{-theta} - 1)/(w + (1-w)a) = (w e^{-theta} + (1-w)a) / (w + (1-w)a), all terms positive.
    v = -(std::log(w * std::exp(-theta) + (1.0 - w) * a) - std::log(w + (1.0 - w) * a)) / theta;
  }
  return open_unit(v);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal quantile needs p in (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double student_cdf(double t, double dof) {
  return boost::math::cdf(boost::math::students_t_distribution<double>(dof), t);
}

namespace {

using UnitPair = std::pair<double, double>;

UnitPair draw_pair(const CopulaModel& model, RandomStream& stream);

struct PairDrawer {
  RandomStream& stream;

  UnitPair operator()(const IndependenceCopula&) const { return {stream.uniform01(), stream.uniform01()}; }

  UnitPair operator()(const FrankCopula& m) const {
    const double u = stream.uniform01();
    const double w = stream.uniform01();
    return {u, frank_conditional_inverse(u, w, m.theta)};
  }

  UnitPair operator()(const GaussianCopula& m) const {
    const double z1 = stream.standard_normal();
    const double z2 = m.rho * z1 + std::sqrt(1.0 - m.rho * m.rho) * stream.standard_normal();
    return {open_unit(normal_cdf(z1)), open_unit(normal_cdf(z2))};
  }

  UnitPair operator()(const StudentCopula& m) const {
    const double z1 = stream.standard_normal();
    const double z2 = m.rho * z1 + std::sqrt(1.0 - m.rho * m.rho) * stream.standard_normal();
    std::chi_squared_distribution<double> chi2(m.dof);
    const double scale = std::sqrt(m.dof / chi2(stream));
    const boost::math::students_t_distribution<double> student(m.dof);
    return {open_unit(boost::math::cdf(student, z1 * scale)), open_unit(boost::math::cdf(student, z2 * scale))};
  }

  UnitPair operator()(const MixtureHalf& m) const {
    const bool from_base = (stream() >> 63) != 0;
    return draw_pair(from_base ? *m.base : *m.contaminant, stream);
  }
};

UnitPair draw_pair(const CopulaModel& model, RandomStream& stream) { return std::visit(PairDrawer{stream}, model); }

}  // namespace

BivariateSample sample_copula(const CopulaModel& model, std::size_t count, RandomStream& stream) {
  if (count < 2) throw std::invalid_argument("copula samples need at least 2 observations");
  validate_model(model);
  std::vector<double> us(count), vs(count);
  for (std::size_t i = 0; i < count; ++i) std::tie(us[i], vs[i]) = draw_pair(model, stream);
  return BivariateSample(std::move(us), std::move(vs));
}

BivariateSample frank_sample(double theta, std::size_t count, RandomStream& stream) {
  return sample_copula(FrankCopula{theta}, count, stream);
}

BivariateSample gaussian_copula_sample(double rho, std::size_t count, RandomStream& stream) {
  return sample_copula(GaussianCopula{rho}, count, stream);
}

BivariateSample student_copula_sample(int dof, double rho, std::size_t count, RandomStream& stream) {
  return sample_copula(StudentCopula{dof, rho}, count, stream);
}

BivariateSample independence_sample(std::size_t count, RandomStream& stream) {
  return sample_copula(IndependenceCopula{}, count, stream);
}

BivariateSample mixture_sample(const CopulaModel& base, const CopulaModel& contaminant, std::size_t count,
                               RandomStream& stream) {
  return sample_copula(make_mixture(base, contaminant), count, stream);
}

FrankFit frank_mle(const BivariateSample& sample) {
  if (sample.size() < 5) throw std::invalid_argument("Frank likelihood fit needs N >= 5");
  const JointRanks ranks = compute_ranks(sample);
  const double denom = static_cast<double>(sample.size()) + 1.0;
  std::vector<double> us(sample.size()), vs(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    us[i] = ranks.r[i] / denom;
    vs[i] = ranks.s[i] / denom;
  }

  auto log_likelihood = [&](double theta) {
    if (std::abs(theta) < kFrankThetaFloor) theta = std::copysign(kFrankThetaFloor, theta == 0.0 ? 1.0 : theta);
    double sum = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) sum += frank_log_pdf(us[i], vs[i], theta);
    return sum;
  };

  std::uintmax_t iterations = 500;
  const auto best = boost::math::tools::brent_find_minima(
      [&](double theta) { return -log_likelihood(theta); }, -kThetaBound, kThetaBound,
      std::numeric_limits<double>::digits / 2, iterations);
  double theta = best.first;
  if (std::abs(theta) < kFrankThetaFloor) {
    const double up = log_likelihood(kFrankThetaFloor);
    const double down = log_likelihood(-kFrankThetaFloor);
    theta = up >= down ? kFrankThetaFloor : -kFrankThetaFloor;
  }
  if (std::abs(theta) > kThetaBound - 1e-3) {
    throw MleBoundHit("Frank likelihood maximum at the parameter bound", theta);
  }
  return {theta, log_likelihood(theta)};
}

}  // namespace copularank
