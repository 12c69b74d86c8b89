/*
 * Copyright 2026 the latentplot authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "latentplot/config.hpp"
#include "latentplot/model.hpp"

namespace latentplot {

// Training objective per example:
//
//   J = E_{z ~ planning}[ log P(y | x, z) ]
//       - KL( summarization || planning )
//
// approximated by Monte Carlo with M samples from the planning model
// and N from the summarization model, all over the forced-EOS outline
// space. The loss minimized is -J summed over the corpus, with the KL
// term optionally reweighted.

/// Adam with the inverse-square-root warmup schedule. Gradients are
/// consumed and cleared by step().
class Adam {
 public:
  Adam(ParamSet& params, double peak_lr, std::size_t warmup,
       double beta1 = 0.9, double beta2 = 0.98, double eps = 1e-9);

  void step();
  std::size_t steps_taken() const { return t_; }
  double current_lr() const;

 private:
  struct Slot {
    Param* param;
    Tensor m;
    Tensor v;
  };
  std::vector<Slot> slots_;
  double peak_lr_, beta1_, beta2_, eps_;
  std::size_t warmup_;
  std::size_t t_ = 0;
};

struct ObjectiveOptions {
  std::size_t m = 1;
  std::size_t n = 1;
  double kl_weight = 1.0;
  EstimatorMode estimator = EstimatorMode::kLiteral;
  ObjectiveKind objective = ObjectiveKind::kLatent;
  bool freeze_summarizer = false;
  std::size_t max_outline_len = 6;

  static ObjectiveOptions from(const RunConfig& cfg) {
    return ObjectiveOptions{cfg.m_samples,  cfg.n_samples,
                            cfg.kl_weight,  cfg.estimator,
                            cfg.objective,  cfg.freeze_summarizer,
                            cfg.max_outline_len};
  }
};

/// Value and per-term breakdown of one MC estimate of J, with the
/// sampled outlines. total = expectation_term - kl_term.
struct ObjectiveEstimate {
  double total = 0.0;
  double expectation_term = 0.0;
  double kl_term = 0.0;
  std::vector<OutlineSample> planning_samples;
  std::vector<OutlineSample> summarization_samples;
};

ObjectiveEstimate estimate_objective(const EncodedExample& example,
                                     const ModelTriple& models,
                                     const ObjectiveOptions& options,
                                     std::uint64_t seed);

struct ExactObjective {
  double j = 0.0;
  double expectation_term = 0.0;
  double kl = 0.0;  // >= 0 up to roundoff
};

/// Brute-force J by enumerating the forced-EOS outline space over
/// vocab_subset. Only feasible for tiny verification models.
ExactObjective exact_objective(const EncodedExample& example,
                               const ModelTriple& models, std::size_t max_len,
                               const std::vector<int>& vocab_subset);

struct SurrogateResult {
  Var loss;
  double loss_value = 0.0;
  double expectation_term = 0.0;
  double kl_term = 0.0;
  std::vector<double> rewards;  // log P(y|x,z^(m)) values, for the baseline
  std::vector<OutlineSample> planning_samples;
  std::vector<OutlineSample> summarization_samples;
};

/// Differentiable loss for one example on the given tape.
///
/// literal mode treats the sampled outlines as constants, so gradients
/// reach gamma through the generation scores, phi through its own
/// sample scores, and theta through the distillation term.
/// score-function mode adds the reward-weighted score term
/// -(1/M) sum (r_m - baseline) log P(z^(m)|x) for theta and the
/// log-ratio-weighted correction for phi.
SurrogateResult surrogate_loss(Tape& tape, ParamBinder& binder,
                               const EncodedExample& example,
                               const ModelTriple& models,
                               const ObjectiveOptions& options,
                               std::uint64_t seed, double baseline,
                               Rng* dropout_rng = nullptr);

// ---- training loops -----------------------------------------------------

struct PretrainEpochStats {
  std::size_t epoch = 0;
  double train_nll_planning = 0.0;   // per predicted token
  double train_nll_generation = 0.0;
  double train_nll_summarization = 0.0;
  double valid_nll_planning = 0.0;
  double valid_nll_generation = 0.0;
  double valid_nll_summarization = 0.0;
};

/// Maximum-likelihood pre-training of all three models on the extracted
/// outlines. Errors (listing ids) when training examples lack outlines.
std::vector<PretrainEpochStats> pretrain(
    ModelTriple& models, const std::vector<EncodedExample>& train,
    const std::vector<EncodedExample>& valid, const RunConfig& cfg);

struct TrainLogRecord {
  std::size_t step = 0;
  double loss = 0.0;
  double expectation_term = 0.0;
  double kl_term = 0.0;
  double valid_ppl = 0.0;
  std::string probe_summarization;  // "(S)" outline for the probe example
  std::string probe_planning;       // "(P)" outline for the probe example
};

struct TrainResult {
  std::vector<TrainLogRecord> records;
  std::size_t steps_run = 0;
  bool diverged = false;
  std::string divergence_message;
};

using TrainCallback = std::function<void(const TrainLogRecord&)>;

/// Joint optimization of the MC objective over the corpus. On
/// divergence the parameters roll back to the last logged state and the
/// result is marked. The vocabulary is only used to render probe
/// outlines in the log; it may be null.
TrainResult train_joint(ModelTriple& models,
                        const std::vector<EncodedExample>& train,
                        const std::vector<EncodedExample>& valid,
                        const RunConfig& cfg,
                        const Vocabulary* vocab = nullptr,
                        const TrainCallback& on_log = nullptr);

/// The variational-inference alternative: identical except the
/// expectation term conditions the generation model on summarizer
/// samples.
TrainResult train_vi(ModelTriple& models,
                     const std::vector<EncodedExample>& train,
                     const std::vector<EncodedExample>& valid,
                     const RunConfig& cfg, const Vocabulary* vocab = nullptr,
                     const TrainCallback& on_log = nullptr);

/// Number of scored positions when `target` is scored under an optional
/// forced-EOS bound (content tokens plus EOS unless at the bound).
std::size_t scored_token_count(const TokenSeq& target,
                               std::optional<std::size_t> forced_eos_max);

}  // namespace latentplot
