#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>

#include "copularank/random.hpp"
#include "copularank/sample.hpp"

namespace copularank {

struct IndependenceCopula {};

struct FrankCopula {
  double theta;  // |theta| >= 1e-6
};

struct GaussianCopula {
  double rho;  // in (-1, 1)
};

struct StudentCopula {
  int dof;  // >= 1
  double rho;
};

struct MixtureHalf;

/// Parametric copula used for simulation. Validate with validate_model.
using CopulaModel = std::variant<IndependenceCopula, FrankCopula, GaussianCopula, StudentCopula, MixtureHalf>;

/// Each observation comes from `base` with probability 1/2, else from `contaminant`.
struct MixtureHalf {
  std::shared_ptr<const CopulaModel> base;
  std::shared_ptr<const CopulaModel> contaminant;
};

CopulaModel make_mixture(CopulaModel base, CopulaModel contaminant);

/// Throws std::invalid_argument on out-of-range parameters.
void validate_model(const CopulaModel& model);

std::string describe(const CopulaModel& model);

inline constexpr double kFrankThetaFloor = 1e-6;

/// C(u,v) = -(1/theta) log(1 + (e^{-theta u} - 1)(e^{-theta v} - 1) / (e^{-theta} - 1)).
double frank_cdf(double u, double v, double theta);

/// Mixed partial d^2 C / du dv.
double frank_pdf(double u, double v, double theta);
double frank_log_pdf(double u, double v, double theta);

/// Solves dC/du(u, v) = w for v.
double frank_conditional_inverse(double u, double w, double theta);

BivariateSample frank_sample(double theta, std::size_t count, RandomStream& stream);
BivariateSample gaussian_copula_sample(double rho, std::size_t count, RandomStream& stream);
BivariateSample student_copula_sample(int dof, double rho, std::size_t count, RandomStream& stream);
BivariateSample independence_sample(std::size_t count, RandomStream& stream);
BivariateSample mixture_sample(const CopulaModel& base, const CopulaModel& contaminant, std::size_t count,
                               RandomStream& stream);

/// Draws `count` pairs in (0,1)^2 from any model.
BivariateSample sample_copula(const CopulaModel& model, std::size_t count, RandomStream& stream);

double normal_cdf(double z);
double normal_quantile(double p);
double student_cdf(double t, double dof);

struct FrankFit {
  double theta;
  double log_likelihood;
};

/// Maximum pseudo-likelihood estimate of the Frank parameter from the rank
/// pseudo-observations r_i/(N+1), s_i/(N+1), over [-50, 50] minus the open
/// interval (-1e-6, 1e-6). Requires N >= 5 and no ties. Throws MleBoundHit if
/// the maximum lies at +-50.
FrankFit frank_mle(const BivariateSample& sample);

}  // namespace copularank
