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

#include "latentplot/objective.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "latentplot/common.hpp"
#include "latentplot/decode.hpp"
#include "latentplot/metrics.hpp"
#include "latentplot/rng.hpp"

namespace latentplot {

// ---- Adam -----------------------------------------------------------------

Adam::Adam(ParamSet& params, double peak_lr, std::size_t warmup, double beta1,
           double beta2, double eps)
    : peak_lr_(peak_lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      warmup_(warmup == 0 ? 1 : warmup) {
  for (Param* p : params.ordered())
    slots_.push_back({p, Tensor::zeros(p->value.shape()),
                      Tensor::zeros(p->value.shape())});
}

double Adam::current_lr() const {
  const double t = static_cast<double>(t_ == 0 ? 1 : t_);
  const double w = static_cast<double>(warmup_);
  const double factor = std::min(t / w, std::sqrt(w / t));
  return peak_lr_ * factor;
}

void Adam::step() {
  ++t_;
  const double lr = current_lr();
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (Slot& s : slots_) {
    double* value = s.param->value.data();
    double* grad = s.param->grad.data();
    double* m = s.m.data();
    double* v = s.v.data();
    const std::size_t n = s.param->value.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grad[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      value[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
      grad[i] = 0.0;
    }
  }
}

// ---- shared helpers ---------------------------------------------------

std::size_t scored_token_count(const TokenSeq& target,
                               std::optional<std::size_t> forced_eos_max) {
  const bool at_cap = forced_eos_max && target.ids.size() == *forced_eos_max;
  return target.ids.size() + (at_cap ? 0 : 1);
}

namespace {

TokenSeq outline_seq(std::vector<int> ids) {
  return TokenSeq{std::move(ids), Role::kOutline};
}

const Model& expectation_sampler(const ModelTriple& models,
                                 const ObjectiveOptions& options) {
  return options.objective == ObjectiveKind::kVi ? *models.summarization
                                                 : *models.planning;
}

std::vector<OutlineSample> draw_samples(const Model& sampler,
                                        const EncodedExample& example,
                                        std::size_t count, std::size_t max_len,
                                        Rng& rng) {
  const CondInput input = input_for(sampler, example.title, example.story);
  std::vector<OutlineSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(sampler.sample_outline(input, max_len, rng));
  return out;
}

}  // namespace

// ---- estimate / exact -------------------------------------------------

ObjectiveEstimate estimate_objective(const EncodedExample& example,
                                     const ModelTriple& models,
                                     const ObjectiveOptions& options,
                                     std::uint64_t seed) {
  if (options.m < 1 || options.n < 1)
    throw Error("estimate_objective: M and N must be at least 1");
  ObjectiveEstimate est;

  Rng rng_m(derive_seed(seed, "m"));
  const Model& esampler = expectation_sampler(models, options);
  est.planning_samples =
      draw_samples(esampler, example, options.m, options.max_outline_len, rng_m);
  for (const OutlineSample& z : est.planning_samples) {
    const CondInput input = input_for(*models.generation, example.title,
                                      example.story, outline_seq(z.ids));
    est.expectation_term +=
        models.generation->sequence_logprob(input, example.story);
  }
  est.expectation_term /= static_cast<double>(options.m);

  Rng rng_n(derive_seed(seed, "n"));
  est.summarization_samples = draw_samples(
      *models.summarization, example, options.n, options.max_outline_len, rng_n);
  for (const OutlineSample& z : est.summarization_samples) {
    // re-score both sides teacher-forced so identical models give a
    // log-ratio of exactly zero
    const double lp_phi = models.summarization->sequence_logprob(
        input_for(*models.summarization, example.title, example.story),
        outline_seq(z.ids), options.max_outline_len);
    const double lp_theta = models.planning->sequence_logprob(
        input_for(*models.planning, example.title, example.story),
        outline_seq(z.ids), options.max_outline_len);
    est.kl_term += lp_phi - lp_theta;
  }
  est.kl_term /= static_cast<double>(options.n);

  est.total = est.expectation_term - est.kl_term;
  return est;
}

ExactObjective exact_objective(const EncodedExample& example,
                               const ModelTriple& models, std::size_t max_len,
                               const std::vector<int>& vocab_subset) {
  const CondInput planning_in =
      input_for(*models.planning, example.title, example.story);
  const CondInput summarization_in =
      input_for(*models.summarization, example.title, example.story);

  const std::vector<OutlineSample> pz =
      models.planning->enumerate_outlines(planning_in, max_len, vocab_subset);
  const std::vector<OutlineSample> qz = models.summarization->enumerate_outlines(
      summarization_in, max_len, vocab_subset);
  if (pz.size() != qz.size())
    throw Error("exact_objective: enumeration mismatch");

  ExactObjective out;
  for (std::size_t i = 0; i < pz.size(); ++i) {
    if (pz[i].ids != qz[i].ids)
      throw Error("exact_objective: enumeration order mismatch");
    const CondInput gen_in = input_for(*models.generation, example.title,
                                       example.story, outline_seq(pz[i].ids));
    const double reward =
        models.generation->sequence_logprob(gen_in, example.story);
    out.expectation_term += std::exp(pz[i].logprob) * reward;
    out.kl += std::exp(qz[i].logprob) * (qz[i].logprob - pz[i].logprob);
  }
  out.j = out.expectation_term - out.kl;
  return out;
}

// ---- surrogate loss ---------------------------------------------------

SurrogateResult surrogate_loss(Tape& tape, ParamBinder& binder,
                               const EncodedExample& example,
                               const ModelTriple& models,
                               const ObjectiveOptions& options,
                               std::uint64_t seed, double baseline,
                               Rng* dropout_rng) {
  if (options.m < 1 || options.n < 1)
    throw Error("surrogate_loss: M and N must be at least 1");
  SurrogateResult res;
  const double m_count = static_cast<double>(options.m);
  const double n_count = static_cast<double>(options.n);
  const bool vi = options.objective == ObjectiveKind::kVi;

  // eval binder for the frozen summarizer path: forward only, no grads
  ParamBinder frozen(tape, /*trainable=*/false);

  Rng rng_m(derive_seed(seed, "m"));
  const Model& esampler = expectation_sampler(models, options);
  res.planning_samples = draw_samples(esampler, example, options.m,
                                      options.max_outline_len, rng_m);

  std::optional<Var> loss;
  auto add_term = [&](Var term, double factor) {
    Var scaled = scale(tape, term, factor);
    loss = loss ? add(tape, *loss, scaled) : scaled;
  };

  // expectation term: -(1/M) sum log P(y | x, z^(m))
  for (const OutlineSample& z : res.planning_samples) {
    const CondInput input = input_for(*models.generation, example.title,
                                      example.story, outline_seq(z.ids));
    Var lp_gamma = models.generation->logprob_on_tape(
        tape, binder, input, example.story, std::nullopt, dropout_rng);
    const double reward = tape.value(lp_gamma).item();
    res.rewards.push_back(reward);
    res.expectation_term += reward / m_count;
    add_term(lp_gamma, -1.0 / m_count);

    if (options.estimator == EstimatorMode::kScoreFunction) {
      // -(1/M) sg(r_m - b) log P(z^(m) | sampler inputs); in VI mode the
      // sampler is the summarizer, so the term attaches to phi instead
      const bool sampler_frozen = vi && options.freeze_summarizer;
      if (!sampler_frozen) {
        const CondInput sampler_in =
            input_for(esampler, example.title, example.story);
        Var lp_sampler = esampler.logprob_on_tape(tape, binder, sampler_in,
                                                  outline_seq(z.ids),
                                                  options.max_outline_len);
        add_term(lp_sampler, -(reward - baseline) / m_count);
      }
    }
  }

  // KL term: +(kl_weight/N) sum [ log P_phi(z^(n)) - log P_theta(z^(n)) ]
  if (options.kl_weight != 0.0) {
    Rng rng_n(derive_seed(seed, "n"));
    res.summarization_samples = draw_samples(
        *models.summarization, example, options.n, options.max_outline_len,
        rng_n);
    for (const OutlineSample& z : res.summarization_samples) {
      const CondInput phi_in =
          input_for(*models.summarization, example.title, example.story);
      const CondInput theta_in =
          input_for(*models.planning, example.title, example.story);
      ParamBinder& phi_binder = options.freeze_summarizer ? frozen : binder;
      Var lp_phi = models.summarization->logprob_on_tape(
          tape, phi_binder, phi_in, outline_seq(z.ids), options.max_outline_len,
          options.freeze_summarizer ? nullptr : dropout_rng);
      Var lp_theta = models.planning->logprob_on_tape(
          tape, binder, theta_in, outline_seq(z.ids), options.max_outline_len,
          dropout_rng);
      const double phi_value = tape.value(lp_phi).item();
      const double theta_value = tape.value(lp_theta).item();
      res.kl_term += (phi_value - theta_value) / n_count;

      add_term(lp_phi, options.kl_weight / n_count);
      add_term(lp_theta, -options.kl_weight / n_count);

      if (options.estimator == EstimatorMode::kScoreFunction &&
          !options.freeze_summarizer) {
        // + (kl_weight/N) sg(log ratio) log P_phi(z^(n))
        const double f_n = phi_value - theta_value;
        add_term(lp_phi, options.kl_weight * f_n / n_count);
      }
    }
  }

  res.loss = *loss;
  res.loss_value = tape.value(res.loss).item();
  return res;
}

// ---- pre-training --------------------------------------------------------

namespace {

struct MleTask {
  Model* model;
  bool use_outline_context = true;  // false for the -PM reduction
  // target and forced-EOS rule per example
  std::function<std::pair<const TokenSeq*, std::optional<std::size_t>>(
      const EncodedExample&)>
      target_of;

  CondInput input_of(const EncodedExample& ex) const {
    std::optional<TokenSeq> outline;
    if (use_outline_context && ex.outline) outline = *ex.outline;
    return input_for(*model, ex.title, ex.story, outline);
  }
};

double mle_example_loss(Tape& tape, ParamBinder& binder, const MleTask& task,
                        const EncodedExample& ex, const TokenSeq& target,
                        std::optional<std::size_t> forced, Rng* dropout_rng,
                        Var* loss_out) {
  Var lp = task.model->logprob_on_tape(tape, binder, task.input_of(ex), target,
                                       forced, dropout_rng);
  const double tokens = static_cast<double>(scored_token_count(target, forced));
  Var loss = scale(tape, lp, -1.0 / tokens);
  *loss_out = loss;
  return tape.value(loss).item();
}

double mle_eval_nll(const MleTask& task,
                    const std::vector<EncodedExample>& data) {
  if (data.empty()) return 0.0;
  double acc = 0.0;
  for (const EncodedExample& ex : data) {
    auto [target, forced] = task.target_of(ex);
    const double lp =
        task.model->sequence_logprob(task.input_of(ex), *target, forced);
    acc += -lp / static_cast<double>(scored_token_count(*target, forced));
  }
  return acc / static_cast<double>(data.size());
}

}  // namespace

std::vector<PretrainEpochStats> pretrain(
    ModelTriple& models, const std::vector<EncodedExample>& train,
    const std::vector<EncodedExample>& valid, const RunConfig& cfg) {
  if (train.empty()) throw Error("pretrain: empty training set");

  std::string missing;
  for (const EncodedExample& ex : train)
    if (!ex.outline) missing += missing.empty() ? ex.id : ", " + ex.id;
  if (!missing.empty())
    throw Error("pretrain: examples missing outlines: " + missing);

  const std::size_t k_max = cfg.max_outline_len;
  const bool no_pm = cfg.ablation == Ablation::kNoPm;
  const bool no_sm = cfg.ablation == Ablation::kNoSm;

  std::vector<MleTask> tasks;
  if (!no_pm)
    tasks.push_back({models.planning.get(), true,
                     [k_max](const EncodedExample& ex) {
                       return std::make_pair(&*ex.outline,
                                             std::optional<std::size_t>(k_max));
                     }});
  tasks.push_back({models.generation.get(), !no_pm,
                   [](const EncodedExample& ex) {
                     return std::make_pair(&ex.story,
                                           std::optional<std::size_t>());
                   }});
  if (!no_pm && !no_sm)
    tasks.push_back({models.summarization.get(), true,
                     [k_max](const EncodedExample& ex) {
                       return std::make_pair(&*ex.outline,
                                             std::optional<std::size_t>(k_max));
                     }});

  std::vector<PretrainEpochStats> stats;
  for (MleTask& task : tasks) {
    Adam opt(task.model->params(), cfg.learning_rate, cfg.warmup);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
      Rng shuffle_rng(derive_seed(cfg.seed, "pretrain-shuffle", epoch));
      shuffle_rng.shuffle(order);
      Rng dropout_rng(derive_seed(cfg.seed, "pretrain-dropout", epoch));
      double train_nll = 0.0;

      std::size_t done = 0;
      while (done < order.size()) {
        const std::size_t batch =
            std::min(cfg.batch_size, order.size() - done);
        task.model->params().zero_grads();
        for (std::size_t k = 0; k < batch; ++k) {
          const EncodedExample& ex = train[order[done + k]];
          auto [target, forced] = task.target_of(ex);
          Tape tape;
          ParamBinder binder(tape);
          Var loss{};
          train_nll += mle_example_loss(tape, binder, task, ex, *target,
                                        forced, cfg.model.dropout > 0.0
                                                    ? &dropout_rng
                                                    : nullptr,
                                        &loss);
          tape.backward(loss);
          binder.collect(1.0 / static_cast<double>(batch));
        }
        opt.step();
        done += batch;
      }

      // collect per-epoch stats (one block per model kind)
      if (stats.size() <= epoch) stats.resize(epoch + 1);
      PretrainEpochStats& s = stats[epoch];
      s.epoch = epoch;
      const double t_nll = train_nll / static_cast<double>(train.size());
      const double v_nll = mle_eval_nll(task, valid);
      switch (task.model->kind()) {
        case ModelKind::kPlanning:
          s.train_nll_planning = t_nll;
          s.valid_nll_planning = v_nll;
          break;
        case ModelKind::kGeneration:
        case ModelKind::kDirect:
          s.train_nll_generation = t_nll;
          s.valid_nll_generation = v_nll;
          break;
        case ModelKind::kSummarization:
          s.train_nll_summarization = t_nll;
          s.valid_nll_summarization = v_nll;
          break;
      }
      log_debug(fmt::format("pretrain {} epoch {}: train nll/token {:.4f}",
                            to_string(task.model->kind()), epoch, t_nll));
    }
  }
  return stats;
}

// ---- joint training --------------------------------------------------

namespace {

struct ParamSnapshot {
  std::vector<std::pair<Param*, Tensor>> values;

  static ParamSnapshot capture(ModelTriple& models) {
    ParamSnapshot snap;
    for (Model* m :
         {models.planning.get(), models.generation.get(),
          models.summarization.get()})
      for (Param* p : m->params().ordered())
        snap.values.emplace_back(p, p->value);
    return snap;
  }

  void restore() const {
    for (const auto& [p, v] : values) p->value = v;
  }
};

std::string render_outline(const std::vector<int>& ids,
                           const Vocabulary* vocab) {
  if (vocab == nullptr) {
    std::string out;
    for (int id : ids) out += (out.empty() ? "" : " ") + std::to_string(id);
    return out;
  }
  return decode(*vocab, TokenSeq{ids, Role::kOutline});
}

}  // namespace

static TrainResult run_training(ModelTriple& models,
                                const std::vector<EncodedExample>& train,
                                const std::vector<EncodedExample>& valid,
                                const RunConfig& cfg_in,
                                const Vocabulary* vocab,
                                const TrainCallback& on_log) {
  RunConfig cfg = cfg_in;
  if (cfg.ablation == Ablation::kNoSm) cfg.kl_weight = 0.0;  // -SM == KL off
  cfg.validate();
  if (train.empty()) throw Error("train: empty training set");

  const bool no_pm = cfg.ablation == Ablation::kNoPm;
  ObjectiveOptions options = ObjectiveOptions::from(cfg);

  const bool train_phi = !no_pm && cfg.kl_weight != 0.0 &&
                         !cfg.freeze_summarizer;
  std::optional<Adam> opt_theta, opt_gamma, opt_phi;
  opt_gamma.emplace(models.generation->params(), cfg.learning_rate, cfg.warmup);
  if (!no_pm)
    opt_theta.emplace(models.planning->params(), cfg.learning_rate, cfg.warmup);
  if (train_phi)
    opt_phi.emplace(models.summarization->params(), cfg.learning_rate,
                    cfg.warmup);

  TrainResult result;
  ParamSnapshot last_good = ParamSnapshot::capture(models);

  // reward baseline (score-function mode only); set on the first batch
  double baseline = 0.0;
  bool baseline_ready = cfg.estimator != EstimatorMode::kScoreFunction;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = 0;
  std::size_t epoch = 0;
  Rng shuffle_rng(derive_seed(cfg.seed, "joint-shuffle"));
  shuffle_rng.shuffle(order);

  const EncodedExample* probe = valid.empty() ? &train.front() : &valid.front();

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    std::vector<std::size_t> batch;
    for (std::size_t k = 0; k < cfg.batch_size; ++k) {
      if (cursor == order.size()) {
        cursor = 0;
        ++epoch;
        Rng r(derive_seed(cfg.seed, "joint-shuffle", epoch));
        r.shuffle(order);
      }
      batch.push_back(order[cursor++]);
    }

    double batch_loss = 0.0, batch_e = 0.0, batch_kl = 0.0;
    std::vector<double> batch_rewards;

    if (!baseline_ready) {
      // initialize b to the first batch's mean reward so that the first
      // score coefficients are centered
      double acc = 0.0;
      std::size_t cnt = 0;
      for (std::size_t idx : batch) {
        const EncodedExample& ex = train[idx];
        Rng rng_m(derive_seed(derive_seed(cfg.seed, "sample", step, idx), "m"));
        const Model& esampler = expectation_sampler(models, options);
        const OutlineSample z = esampler.sample_outline(
            input_for(esampler, ex.title, ex.story), options.max_outline_len,
            rng_m);
        const CondInput in = input_for(*models.generation, ex.title, ex.story,
                                       outline_seq(z.ids));
        acc += models.generation->sequence_logprob(in, ex.story);
        ++cnt;
      }
      baseline = acc / static_cast<double>(cnt);
      baseline_ready = true;
    }

    try {
      models.generation->params().zero_grads();
      if (!no_pm) models.planning->params().zero_grads();
      if (train_phi) models.summarization->params().zero_grads();
      Rng dropout_rng(derive_seed(cfg.seed, "joint-dropout", step));

      for (std::size_t idx : batch) {
        const EncodedExample& ex = train[idx];
        Tape tape;
        ParamBinder binder(tape);

        if (no_pm) {
          // -PM: plain maximum likelihood of the generation model with
          // no outline input (the single-source reduction)
          const CondInput input{ex.title, std::nullopt};
          Var lp = models.generation->logprob_on_tape(
              tape, binder, input, ex.story, std::nullopt,
              cfg.model.dropout > 0.0 ? &dropout_rng : nullptr);
          Var loss = scale(tape, lp, -1.0);
          batch_loss += tape.value(loss).item();
          tape.backward(loss);
          binder.collect(1.0 / static_cast<double>(batch.size()));
          continue;
        }

        SurrogateResult sr = surrogate_loss(
            tape, binder, ex, models, options,
            derive_seed(cfg.seed, "sample", step, idx), baseline,
            cfg.model.dropout > 0.0 ? &dropout_rng : nullptr);
        batch_loss += sr.loss_value;
        batch_e += sr.expectation_term;
        batch_kl += sr.kl_term;
        for (double r : sr.rewards) batch_rewards.push_back(r);
        tape.backward(sr.loss);
        binder.collect(1.0 / static_cast<double>(batch.size()));
      }
    } catch (const Error& e) {
      last_good.restore();
      result.diverged = true;
      result.divergence_message =
          fmt::format("step {}: {}; rolled back to last logged state", step,
                      e.what());
      result.steps_run = step - 1;
      return result;
    }

    batch_loss /= static_cast<double>(batch.size());
    batch_e /= static_cast<double>(batch.size());
    batch_kl /= static_cast<double>(batch.size());
    if (!std::isfinite(batch_loss)) {
      last_good.restore();
      result.diverged = true;
      result.divergence_message =
          fmt::format("step {}: non-finite loss; rolled back", step);
      result.steps_run = step - 1;
      return result;
    }

    if (opt_theta) opt_theta->step();
    opt_gamma->step();
    if (opt_phi) opt_phi->step();

    if (cfg.estimator == EstimatorMode::kScoreFunction &&
        !batch_rewards.empty()) {
      const double mean_r =
          std::accumulate(batch_rewards.begin(), batch_rewards.end(), 0.0) /
          static_cast<double>(batch_rewards.size());
      baseline = cfg.baseline_decay * baseline +
                 (1.0 - cfg.baseline_decay) * mean_r;
    }

    if (step % cfg.log_interval == 0 || step == cfg.steps) {
      TrainLogRecord rec;
      rec.step = step;
      rec.loss = batch_loss;
      rec.expectation_term = batch_e;
      rec.kl_term = batch_kl;

      // quick greedy perplexity on a small validation probe
      const std::vector<EncodedExample>& pool = valid.empty() ? train : valid;
      std::vector<EncodedExample> probe_set(
          pool.begin(), pool.begin() + std::min<std::size_t>(8, pool.size()));
      if (no_pm) {
        double lp = 0.0;
        std::size_t toks = 0;
        for (const EncodedExample& ex : probe_set) {
          lp += models.generation->sequence_logprob(
              CondInput{ex.title, std::nullopt}, ex.story);
          toks += ex.story.ids.size() + 1;
        }
        rec.valid_ppl = std::exp(-lp / static_cast<double>(toks));
      } else {
        rec.valid_ppl = perplexity(*models.generation, *models.planning,
                                   probe_set, 1, cfg.max_outline_len);
        const BeamResult p_out =
            beam_search(*models.planning, CondInput{probe->title, std::nullopt},
                        cfg.beam, cfg.max_outline_len);
        rec.probe_planning = render_outline(p_out.ids, vocab);
        const BeamResult s_out = beam_search(
            *models.summarization,
            input_for(*models.summarization, probe->title, probe->story),
            cfg.beam, cfg.max_outline_len);
        rec.probe_summarization = render_outline(s_out.ids, vocab);
      }
      result.records.push_back(rec);
      if (on_log) on_log(rec);
      last_good = ParamSnapshot::capture(models);
    }
  }
  result.steps_run = cfg.steps;
  return result;
}

TrainResult train_joint(ModelTriple& models,
                        const std::vector<EncodedExample>& train,
                        const std::vector<EncodedExample>& valid,
                        const RunConfig& cfg, const Vocabulary* vocab,
                        const TrainCallback& on_log) {
  return run_training(models, train, valid, cfg, vocab, on_log);
}

TrainResult train_vi(ModelTriple& models,
                     const std::vector<EncodedExample>& train,
                     const std::vector<EncodedExample>& valid,
                     const RunConfig& cfg, const Vocabulary* vocab,
                     const TrainCallback& on_log) {
  RunConfig vi_cfg = cfg;
  vi_cfg.objective = ObjectiveKind::kVi;
  return run_training(models, train, valid, vi_cfg, vocab, on_log);
}

}  // namespace latentplot
