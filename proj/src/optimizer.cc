//
// Copyright 2026 The R2DP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "r2dp/optimizer.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "fmt/format.h"
#include "r2dp/errors.h"
#include "r2dp/mechanisms.h"
#include "r2dp/nelder_mead.h"
#include "r2dp/special_functions.h"

namespace r2dp {
namespace {

// Loss assigned to candidates whose utility or projection cannot be computed.
constexpr double kFailureLoss = 1e300;
// Weight on the epsilon residual when projection fails.
constexpr double kPenaltyWeight = 1e6;

double ToSearch(double value, ParameterScale scale) {
  switch (scale) {
    case ParameterScale::kLinear: return value;
    case ParameterScale::kLog: return std::log(value);
    case ParameterScale::kLogit: return std::log(value) - std::log1p(-value);
  }
  return value;
}

double FromSearch(double z, ParameterScale scale) {
  switch (scale) {
    case ParameterScale::kLinear: return z;
    case ParameterScale::kLog: return std::exp(z);
    case ParameterScale::kLogit: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

// Starting shape of a family seed, before clamping into the slot's boxes.
std::vector<double> FamilySeedShape(Family family) {
  switch (family) {
    case Family::kDegenerate: return {};
    case Family::kBernoulli: return {0.5, 2.0};
    case Family::kGamma: return {2.0};
    case Family::kUniform: return {0.5};
    case Family::kTruncGaussian: return {0.0, 0.5, 100.0};
    case Family::kNoncentralChiSq: return {2.0, 1.0};
    case Family::kRayleigh: return {};
  }
  return {};
}

MgfDist SlotDistribution(Family family, const std::vector<double>& v) {
  switch (family) {
    case Family::kDegenerate: return MgfDist::Degenerate(1.0);
    case Family::kBernoulli: return MgfDist::Bernoulli(v[0], 1.0, v[1]);
    case Family::kGamma: return MgfDist::Gamma(v[0], 1.0);
    case Family::kUniform: return MgfDist::Uniform(v[0], v[0] + 1.0);
    case Family::kTruncGaussian: return MgfDist::TruncGaussian(v[0], 1.0, v[1], v[1] + v[2]);
    case Family::kNoncentralChiSq: return MgfDist::NoncentralChiSq(v[0], v[1]);
    case Family::kRayleigh: return MgfDist::Rayleigh(1.0);
  }
  throw UnsupportedFamily("unknown family");
}

// Flattened search coordinates: per slot an optional log weight (only when
// there are several slots) followed by the transformed shape parameters.
class Layout {
 public:
  explicit Layout(const SearchSpaceSpec& spec) : spec_(spec) {
    const bool weighted = spec.slots.size() > 1;
    for (const FamilySlot& slot : spec.slots) {
      if (weighted) {
        lower_.push_back(std::log(spec.coefficient_min));
        upper_.push_back(std::log(spec.coefficient_max));
      }
      for (const ParameterBox& box : slot.boxes) {
        lower_.push_back(ToSearch(box.lower, box.scale));
        upper_.push_back(ToSearch(box.upper, box.scale));
      }
    }
  }

  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  std::size_t size() const { return lower_.size(); }

  LinearCombo Build(const std::vector<double>& z) const {
    const bool weighted = spec_.slots.size() > 1;
    std::vector<ComboTerm> terms;
    std::size_t at = 0;
    for (const FamilySlot& slot : spec_.slots) {
      const double weight = weighted ? std::exp(z[at++]) : 1.0;
      std::vector<double> values;
      for (const ParameterBox& box : slot.boxes) values.push_back(FromSearch(z[at++], box.scale));
      terms.push_back({weight, SlotDistribution(slot.family, values)});
    }
    return LinearCombo(std::move(terms));
  }

  // Seed emphasizing slot `focus` with the family's default shape.
  std::vector<double> FamilySeed(std::size_t focus) const {
    const bool weighted = spec_.slots.size() > 1;
    const double side_weight = 0.5 * (std::log(spec_.coefficient_min) +
                                      std::log(spec_.coefficient_max));
    std::vector<double> z;
    for (std::size_t s = 0; s < spec_.slots.size(); ++s) {
      const FamilySlot& slot = spec_.slots[s];
      if (weighted) z.push_back(s == focus ? std::log(spec_.coefficient_max) : side_weight);
      const std::vector<double> shape = FamilySeedShape(slot.family);
      for (std::size_t i = 0; i < slot.boxes.size(); ++i) {
        const ParameterBox& box = slot.boxes[i];
        const double value = i < shape.size() ? shape[i] : std::sqrt(box.lower * box.upper);
        z.push_back(ToSearch(std::clamp(value, box.lower, box.upper), box.scale));
      }
    }
    return z;
  }

  std::vector<double> RandomSeed(Rng& rng) const {
    std::vector<double> z(size());
    for (std::size_t i = 0; i < size(); ++i) {
      z[i] = lower_[i] + (upper_[i] - lower_[i]) * OpenUniform(rng);
    }
    return z;
  }

  std::vector<double> Steps() const {
    std::vector<double> step(size());
    for (std::size_t i = 0; i < size(); ++i) {
      step[i] = std::min(2.0, 0.25 * (upper_[i] - lower_[i]));
    }
    return step;
  }

  bool OnBoundary(const std::vector<double>& z) const {
    for (std::size_t i = 0; i < size(); ++i) {
      const double slack = 1e-9 * std::max(1.0, upper_[i] - lower_[i]);
      if (z[i] <= lower_[i] + slack || z[i] >= upper_[i] - slack) return true;
    }
    return false;
  }

 private:
  const SearchSpaceSpec& spec_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

bool AllPointMasses(const LinearCombo& combo) {
  for (const ComboTerm& term : combo.terms()) {
    if (term.coefficient > 0.0 && term.dist.family() != Family::kDegenerate) return false;
  }
  return true;
}

double Loss(double utility, const UtilityGoal& goal) {
  return goal.HigherIsBetter() ? -utility : utility;
}

struct Incumbent {
  std::optional<LinearCombo> combo;
  CandidateEvaluation eval;
  double loss = std::numeric_limits<double>::infinity();
  int restart = 0;
  bool on_boundary = false;

  // Better utility, then smaller residual; earlier entries win exact ties.
  bool ImprovedBy(double other_loss, double other_residual) const {
    if (!combo) return true;
    if (other_loss != loss) return other_loss < loss;
    return other_residual < eval.residual;
  }
};

}  // namespace

FamilySlot DefaultSlot(Family family) {
  using S = ParameterScale;
  switch (family) {
    case Family::kDegenerate: return {family, {}};
    case Family::kBernoulli:
      return {family, {{"p", 1e-3, 1.0 - 1e-3, S::kLogit}, {"ratio", 1e-3, 1e3, S::kLog}}};
    case Family::kGamma: return {family, {{"k", 0.05, 200.0, S::kLog}}};
    case Family::kUniform: return {family, {{"offset", 1e-6, 1e3, S::kLog}}};
    case Family::kTruncGaussian:
      return {family,
              {{"mu", -20.0, 20.0, S::kLinear},
               {"a", 1e-6, 50.0, S::kLog},
               {"width", 1e-2, 1e3, S::kLog}}};
    case Family::kNoncentralChiSq:
      return {family, {{"k", 0.05, 200.0, S::kLog}, {"lambda", 1e-6, 200.0, S::kLog}}};
    case Family::kRayleigh: return {family, {}};
  }
  throw UnsupportedFamily("unknown family");
}

SearchSpaceSpec SearchSpaceSpec::Default(bool extended) {
  SearchSpaceSpec spec;
  for (Family f : {Family::kGamma, Family::kUniform, Family::kTruncGaussian}) {
    spec.slots.push_back(DefaultSlot(f));
  }
  if (extended) {
    spec.slots.push_back(DefaultSlot(Family::kNoncentralChiSq));
    spec.slots.push_back(DefaultSlot(Family::kRayleigh));
  }
  return spec;
}

void SearchSpaceSpec::Validate() const {
  if (slots.empty()) throw InvalidArgument("search space needs at least one family slot");
  if (!(coefficient_min > 0.0) || !(coefficient_min <= coefficient_max) ||
      !std::isfinite(coefficient_max)) {
    throw InvalidArgument("coefficient bounds must satisfy 0 < min <= max < inf");
  }
  if (restarts < 0) throw InvalidArgument("restarts must be >= 0");
  if (max_evals < 1) throw InvalidArgument("max_evals must be >= 1");
  if (!(constraint_tol > 0.0)) throw InvalidArgument("constraint tolerance must be > 0");
  if (eval_trials < 1) throw InvalidArgument("eval_trials must be >= 1");
  for (const FamilySlot& slot : slots) {
    const FamilySlot reference = DefaultSlot(slot.family);
    if (slot.boxes.size() != reference.boxes.size()) {
      throw InvalidArgument(fmt::format("{} slot needs {} parameter boxes",
                                        FamilyName(slot.family), reference.boxes.size()));
    }
    for (const ParameterBox& box : slot.boxes) {
      bool ok = std::isfinite(box.lower) && std::isfinite(box.upper) && box.lower <= box.upper;
      if (box.scale == ParameterScale::kLog) ok = ok && box.lower > 0.0;
      if (box.scale == ParameterScale::kLogit) ok = ok && box.lower > 0.0 && box.upper < 1.0;
      if (!ok) {
        throw InvalidArgument(fmt::format("invalid box [{}, {}] for {} parameter '{}'",
                                          box.lower, box.upper, FamilyName(slot.family),
                                          box.name));
      }
    }
  }
}

LinearCombo LaplaceSeed(const PrivacySpec& privacy) {
  privacy.Validate();
  return LinearCombo::Singleton(MgfDist::Degenerate(privacy.epsilon / privacy.sensitivity));
}

CandidateEvaluation EvaluateCandidate(const LinearCombo& combo, const PrivacySpec& privacy,
                                      const UtilityGoal& goal,
                                      const EvaluationOptions& options) {
  privacy.Validate();
  CandidateEvaluation eval;
  eval.epsilon = EpsilonOfCombo(combo, privacy.sensitivity);
  eval.residual = std::abs(eval.epsilon - privacy.epsilon);
  eval.passes_filter = AllPointMasses(combo) ||
                       CheckNecessaryCondition(combo, privacy.sensitivity).passes;
  bool computable = true;
  try {
    if (goal.PriorDependent()) {
      Rng rng(options.eval_seed);
      eval.utility = ExpectedMetricEmpirical(combo, goal, options.eval_trials, rng).mean;
    } else {
      eval.utility = AnalyticUtility(combo, goal);
    }
    computable = std::isfinite(eval.utility);
  } catch (const DomainError&) {
    computable = false;
  } catch (const DivergentIntegral&) {
    computable = false;
  } catch (const NonFinite&) {
    computable = false;
  }
  if (!computable) eval.utility = goal.HigherIsBetter() ? 0.0 : kInf;
  eval.feasible = computable && std::isfinite(eval.epsilon) &&
                  eval.residual <= options.constraint_tol && eval.passes_filter;
  return eval;
}

double ProjectScale(const LinearCombo& combo, const PrivacySpec& privacy) {
  privacy.Validate();
  const auto residual = [&](double c) {
    return EpsilonOfCombo(combo.Scaled(c), privacy.sensitivity) - privacy.epsilon;
  };
  // Exact for a point mass and the right order of magnitude otherwise.
  const double guess = privacy.epsilon / (privacy.sensitivity * combo.Mean());
  if (!(guess > 0.0) || !std::isfinite(guess)) throw NonFinite("no starting scale");
  boost::uintmax_t max_iter = 200;
  const boost::math::tools::eps_tolerance<double> tolerance(50);
  std::pair<double, double> bracket;
  try {
    bracket = boost::math::tools::bracket_and_solve_root(residual, guess, 2.0, true, tolerance,
                                                         max_iter);
  } catch (const std::exception& e) {
    throw NonFinite(fmt::format("epsilon projection failed: {}", e.what()));
  }
  const double lo = std::abs(residual(bracket.first));
  const double hi = std::abs(residual(bracket.second));
  const double c = lo <= hi ? bracket.first : bracket.second;
  if (!(c > 0.0) || !std::isfinite(c)) throw NonFinite("epsilon projection left (0, inf)");
  return c;
}

double StaircaseUtility(const PrivacySpec& privacy, const UtilityGoal& goal,
                        const EvaluationOptions& options) {
  const Staircase staircase(privacy.epsilon, privacy.sensitivity);
  switch (goal.metric) {
    case Metric::kUsefulness: return staircase.Usefulness(goal.gamma);
    case Metric::kL1: return staircase.L1();
    case Metric::kL2: return staircase.L2();
    default: {
      Rng rng(options.eval_seed);
      return ExpectedMetricEmpirical([&staircase](Rng& r) { return staircase.Sample(r); },
                                     goal, options.eval_trials, rng)
          .mean;
    }
  }
}

CalibratedMechanism Optimize(const SearchSpaceSpec& spec, const PrivacySpec& privacy,
                             const UtilityGoal& goal, uint64_t seed) {
  spec.Validate();
  privacy.Validate();
  goal.Validate();
  const EvaluationOptions options{spec.constraint_tol, spec.eval_seed, spec.eval_trials};
  const Layout layout(spec);
  SolverDiagnostics diagnostics;

  Incumbent best;
  const LinearCombo laplace = LaplaceSeed(privacy);
  const CandidateEvaluation laplace_eval = EvaluateCandidate(laplace, privacy, goal, options);
  ++diagnostics.evaluations;
  best.combo = laplace;
  best.eval = laplace_eval;
  best.loss = Loss(laplace_eval.utility, goal);

  const std::vector<double> steps = layout.Steps();
  for (int restart = 1; restart <= spec.restarts; ++restart) {
    Incumbent local;
    local.restart = restart;
    const auto objective = [&](const std::vector<double>& z) {
      ++diagnostics.evaluations;
      double unscaled_epsilon = kInf;
      try {
        const LinearCombo shape = layout.Build(z);
        unscaled_epsilon = EpsilonOfCombo(shape, privacy.sensitivity);
        const LinearCombo combo = shape.Scaled(ProjectScale(shape, privacy));
        const CandidateEvaluation eval = EvaluateCandidate(combo, privacy, goal, options);
        if (!eval.passes_filter) ++diagnostics.filtered_candidates;
        const double loss = Loss(eval.utility, goal);
        if (eval.feasible && local.ImprovedBy(loss, eval.residual)) {
          local.combo = combo;
          local.eval = eval;
          local.loss = loss;
          local.on_boundary = layout.OnBoundary(z);
        }
        return std::isfinite(loss) ? loss : kFailureLoss;
      } catch (const Error&) {
        ++diagnostics.failed_candidates;
        const double gap = std::abs(unscaled_epsilon - privacy.epsilon);
        return std::isfinite(gap) ? std::min(kFailureLoss, 1e6 + kPenaltyWeight * gap)
                                  : kFailureLoss;
      }
    };
    std::vector<double> start;
    if (static_cast<std::size_t>(restart) <= spec.slots.size()) {
      start = layout.FamilySeed(static_cast<std::size_t>(restart - 1));
    } else {
      Rng rng = DeriveStream(seed, static_cast<uint64_t>(restart));
      start = layout.RandomSeed(rng);
    }
    NelderMeadOptions nm;
    nm.max_evals = spec.max_evals;
    const NelderMeadResult result =
        MinimizeNelderMead(objective, start, steps, layout.lower(), layout.upper(), nm);
    diagnostics.budget_exhausted |= !result.converged;
    if (local.combo && best.ImprovedBy(local.loss, local.eval.residual)) best = local;
  }
  if (!best.combo) throw InfeasibleSpec("no candidate satisfied the privacy constraint");

  diagnostics.constraint_residual = best.eval.residual;
  diagnostics.winning_restart = best.restart;
  diagnostics.hit_box_boundary = best.on_boundary;
  CalibratedMechanism out{*best.combo,
                          best.eval.epsilon,
                          privacy.epsilon,
                          privacy.sensitivity,
                          goal.metric,
                          goal.Parameter(),
                          best.eval.utility,
                          laplace_eval.utility,
                          std::nullopt,
                          diagnostics};
  try {
    out.staircase_utility = StaircaseUtility(privacy, goal, options);
  } catch (const Error&) {
    out.staircase_utility.reset();
  }
  return out;
}

CalibratedMechanism Optimize(const SearchSpaceSpec& spec, const PrivacySpec& privacy,
                             const UtilityGoal& goal, Rng& rng) {
  return Optimize(spec, privacy, goal, static_cast<uint64_t>(rng()));
}

}  // namespace r2dp
