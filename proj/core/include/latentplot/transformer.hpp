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

#include <cstdint>
#include <optional>
#include <vector>

#include "latentplot/tape.hpp"
#include "latentplot/tensor.hpp"

namespace latentplot {

/// Appendable (rows x cols) buffer for decoder key/value caches.
struct RowBuffer {
  std::size_t cols = 0;
  std::vector<double> data;

  std::size_t rows() const { return cols == 0 ? 0 : data.size() / cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  void append(const double* r) { data.insert(data.end(), r, r + cols); }
};

/// One encoder-decoder transformer with pre-layer-norm residual blocks
/// and optionally the multi-source wiring: a small self-attention-only
/// encoder over an auxiliary source, plus a zero-initialized gated
/// context-attention sublayer in every main-encoder and decoder layer.
/// Embeddings are shared between both inputs and the output projection.
class SeqTransformer {
 public:
  struct Dims {
    std::size_t vocab = 0;
    std::size_t hidden = 64;
    std::size_t ffn = 256;
    std::size_t heads = 2;
    std::size_t enc_layers = 2;
    std::size_t ctx_layers = 1;   // auxiliary-source encoder depth
    std::size_t dec_layers = 2;
    std::size_t max_pos = 128;
    double dropout = 0.0;
    bool multi_source = false;
  };

  SeqTransformer(Dims dims, std::uint64_t seed);

  SeqTransformer(const SeqTransformer&) = delete;
  SeqTransformer& operator=(const SeqTransformer&) = delete;
  SeqTransformer(SeqTransformer&&) = delete;

  const Dims& dims() const { return dims_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  // ---- tape path ---------------------------------------------------

  /// Auxiliary-source encoder. Errors on an empty source.
  Var context_encode(Tape& t, ParamBinder& b, const std::vector<int>& ctx,
                     Rng* dropout_rng = nullptr) const;

  /// Main encoder; with ctx_states every layer runs self-attention,
  /// gated context attention, then feed-forward.
  Var encode(Tape& t, ParamBinder& b, const std::vector<int>& src,
             std::optional<Var> ctx_states = std::nullopt,
             Rng* dropout_rng = nullptr) const;

  /// Decoder over a BOS-framed input; returns (len, vocab) logits where
  /// row t sees only input positions <= t.
  Var decode_teacher_forced(Tape& t, ParamBinder& b,
                            const std::vector<int>& target_in, Var main_states,
                            std::optional<Var> ctx_states = std::nullopt,
                            Rng* dropout_rng = nullptr) const;

  // ---- eval path -----------------------------------------------------

  Tensor eval_context_encode(const std::vector<int>& ctx) const;
  /// ctx_states may be empty (zero-size tensor) for single-source use.
  Tensor eval_encode(const std::vector<int>& src, const Tensor& ctx_states) const;

  /// Incremental decoder state; copyable so beam hypotheses can fork.
  struct DecodeState {
    Tensor main_states;
    Tensor ctx_states;  // empty tensor = no context
    std::vector<RowBuffer> self_k, self_v;   // per layer, grown per step
    std::vector<Tensor> cross_k, cross_v;    // per layer, precomputed
    std::vector<Tensor> ctx_k, ctx_v;        // per layer, precomputed
    std::size_t pos = 0;
  };

  DecodeState begin_decode(Tensor main_states, Tensor ctx_states) const;

  /// Feeds one token and returns the raw next-token logits (vocab,).
  /// Agrees with decode_teacher_forced at the same position to 1e-9.
  Tensor decode_step(DecodeState& state, int token) const;

 private:
  struct AttnP { Param *wq, *bq, *wk, *bk, *wv, *bv, *wo, *bo; };
  struct LnP { Param *g, *b; };
  struct FfnP { Param *w1, *b1, *w2, *b2; };
  struct CtxP { AttnP at; LnP ln; Param* gate; };
  struct EncLayerP {
    AttnP sa; LnP ln1;
    std::optional<CtxP> ctx;
    FfnP ffn; LnP ln2;
  };
  struct DecLayerP {
    AttnP sa; LnP ln1;
    AttnP cross; LnP ln_cross;
    std::optional<CtxP> ctx;
    FfnP ffn; LnP ln2;
  };

  Dims dims_;
  ParamSet params_;
  Param* embed_;
  std::vector<EncLayerP> enc_layers_;
  LnP enc_final_;
  std::vector<EncLayerP> ctx_layers_;  // never hold a ctx block themselves
  LnP ctx_final_;
  std::vector<DecLayerP> dec_layers_;
  LnP dec_final_;
  Tensor positions_;  // sinusoidal, (max_pos, hidden)

  AttnP make_attn(const std::string& prefix);
  LnP make_ln(const std::string& prefix);
  FfnP make_ffn(const std::string& prefix);
  CtxP make_ctx(const std::string& prefix);
  EncLayerP make_enc_layer(const std::string& prefix, bool with_ctx);
  DecLayerP make_dec_layer(const std::string& prefix, bool with_ctx);

  Var embed_positions(Tape& t, ParamBinder& b, const std::vector<int>& ids,
                      Rng* dropout_rng) const;
  Var attention(Tape& t, ParamBinder& b, const AttnP& p, Var queries_in,
                Var keys_in, bool causal) const;
  Var ffn_block(Tape& t, ParamBinder& b, const FfnP& p, Var x) const;
  Var encoder_stack(Tape& t, ParamBinder& b,
                    const std::vector<EncLayerP>& layers, const LnP& final_ln,
                    const std::vector<int>& src, std::optional<Var> ctx_states,
                    Rng* dropout_rng) const;

  Tensor eval_attn_row(const AttnP& p, const Tensor& q_row,
                       const RowBuffer& keys, const RowBuffer& values) const;
  Tensor eval_attn_row_pre(const Tensor& q_row, const Tensor& keys,
                           const Tensor& values, const AttnP& p) const;
};

}  // namespace latentplot
