// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "laytoken/error.hpp"

namespace laytoken::nn {

double relative_error(double analytic, double numeric) {
  const double denom = std::max(std::abs(analytic), std::abs(numeric));
  return denom == 0.0 ? 0.0 : std::abs(analytic - numeric) / denom;
}

namespace {

double evaluate(const LossBuilder& loss) {
  Tape tape(false);
  const Var v = loss(tape);
  if (v.value().size() != 1) throw ArgumentError("loss must be a scalar");
  const double x = v.scalar();
  if (!std::isfinite(x)) throw NumericError("loss is not finite");
  return x;
}

}  // namespace

GradCheckReport grad_check(const LossBuilder& loss, std::span<Parameter* const> params,
                           const GradCheckOptions& options) {
  if (!(options.epsilon >= 1e-7 && options.epsilon <= 1e-3))
    throw ArgumentError("epsilon must lie in [1e-7, 1e-3]");
  GradCheckReport report;
  if (options.n_probes == 0) {
    report.warnings.emplace_back("no probes requested; gradient check is vacuous");
    return report;
  }
  if (params.empty()) throw ArgumentError("no parameters to probe");

  for (auto* p : params) p->zero_grad();
  {
    Tape tape(true);
    const Var v = loss(tape);
    if (v.value().size() != 1) throw ArgumentError("loss must be a scalar");
    if (!std::isfinite(v.scalar())) throw NumericError("loss is not finite");
    tape.backward(v);
  }

  std::mt19937_64 rng(options.seed);
  for (std::size_t probe = 0; probe < options.n_probes; ++probe) {
    Parameter& p = *params[probe % params.size()];
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < p.grad.size(); ++i)
      if (p.grad[i] != 0.0) live.push_back(i);
    std::size_t index;
    if (!live.empty()) {
      index = live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng)];
    } else {
      index = std::uniform_int_distribution<std::size_t>(0, p.value.size() - 1)(rng);
    }

    const double saved = p.value[index];
    p.value[index] = saved + options.epsilon;
    const double up = evaluate(loss);
    p.value[index] = saved - options.epsilon;
    const double down = evaluate(loss);
    p.value[index] = saved;

    ProbeResult r;
    r.parameter = p.name;
    r.index = index;
    r.analytic = p.grad[index];
    r.numeric = (up - down) / (2.0 * options.epsilon);
    r.rel_error = relative_error(r.analytic, r.numeric);
    report.max_rel_error = std::max(report.max_rel_error, r.rel_error);
    report.probes.push_back(std::move(r));
  }
  return report;
}

}  // namespace laytoken::nn
