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

#include "latentplot/transformer.hpp"

#include <cmath>
#include <cstring>

#include "latentplot/common.hpp"
#include "latentplot/linalg.hpp"

namespace latentplot {

namespace {

Tensor sinusoidal_positions(std::size_t max_pos, std::size_t hidden) {
  Tensor pe = Tensor::zeros({max_pos, hidden});
  for (std::size_t p = 0; p < max_pos; ++p) {
    for (std::size_t i = 0; i < hidden; i += 2) {
      const double angle =
          static_cast<double>(p) /
          std::pow(10000.0, static_cast<double>(i) / static_cast<double>(hidden));
      pe.at(p, i) = std::sin(angle);
      if (i + 1 < hidden) pe.at(p, i + 1) = std::cos(angle);
    }
  }
  return pe;
}

std::vector<std::uint8_t> causal_mask(std::size_t len) {
  std::vector<std::uint8_t> mask(len * len, 0);
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = i + 1; j < len; ++j) mask[i * len + j] = 1;
  return mask;
}

}  // namespace

SeqTransformer::SeqTransformer(Dims dims, std::uint64_t seed)
    : dims_(dims), params_(seed) {
  if (dims_.vocab < 2) throw Error("transformer: vocabulary too small");
  if (dims_.hidden == 0 || dims_.hidden % dims_.heads != 0)
    throw Error("transformer: hidden must be a positive multiple of heads");
  embed_ = &params_.create("embed", {dims_.vocab, dims_.hidden},
                           Init::kSmallNormal);
  for (std::size_t i = 0; i < dims_.enc_layers; ++i)
    enc_layers_.push_back(
        make_enc_layer("enc." + std::to_string(i), dims_.multi_source));
  enc_final_ = make_ln("enc.final");
  if (dims_.multi_source) {
    for (std::size_t i = 0; i < dims_.ctx_layers; ++i)
      ctx_layers_.push_back(
          make_enc_layer("ctxenc." + std::to_string(i), false));
    ctx_final_ = make_ln("ctxenc.final");
  }
  for (std::size_t i = 0; i < dims_.dec_layers; ++i)
    dec_layers_.push_back(
        make_dec_layer("dec." + std::to_string(i), dims_.multi_source));
  dec_final_ = make_ln("dec.final");
  positions_ = sinusoidal_positions(dims_.max_pos, dims_.hidden);
}

SeqTransformer::AttnP SeqTransformer::make_attn(const std::string& prefix) {
  const std::size_t h = dims_.hidden;
  return AttnP{
      &params_.create(prefix + ".wq", {h, h}, Init::kXavier),
      &params_.create(prefix + ".bq", {h}, Init::kZeros),
      &params_.create(prefix + ".wk", {h, h}, Init::kXavier),
      &params_.create(prefix + ".bk", {h}, Init::kZeros),
      &params_.create(prefix + ".wv", {h, h}, Init::kXavier),
      &params_.create(prefix + ".bv", {h}, Init::kZeros),
      &params_.create(prefix + ".wo", {h, h}, Init::kXavier),
      &params_.create(prefix + ".bo", {h}, Init::kZeros),
  };
}

SeqTransformer::LnP SeqTransformer::make_ln(const std::string& prefix) {
  return LnP{
      &params_.create(prefix + ".g", {dims_.hidden}, Init::kOnes),
      &params_.create(prefix + ".b", {dims_.hidden}, Init::kZeros),
  };
}

SeqTransformer::FfnP SeqTransformer::make_ffn(const std::string& prefix) {
  return FfnP{
      &params_.create(prefix + ".w1", {dims_.hidden, dims_.ffn}, Init::kXavier),
      &params_.create(prefix + ".b1", {dims_.ffn}, Init::kZeros),
      &params_.create(prefix + ".w2", {dims_.ffn, dims_.hidden}, Init::kXavier),
      &params_.create(prefix + ".b2", {dims_.hidden}, Init::kZeros),
  };
}

SeqTransformer::CtxP SeqTransformer::make_ctx(const std::string& prefix) {
  // gate starts at zero so a fresh multi-source stack reproduces the
  // single-source computation exactly
  return CtxP{
      make_attn(prefix),
      make_ln(prefix + ".ln"),
      &params_.create(prefix + ".gate", {1}, Init::kZeros),
  };
}

SeqTransformer::EncLayerP SeqTransformer::make_enc_layer(
    const std::string& prefix, bool with_ctx) {
  EncLayerP layer{
      make_attn(prefix + ".sa"), make_ln(prefix + ".ln1"),
      std::nullopt,
      make_ffn(prefix + ".ffn"), make_ln(prefix + ".ln2"),
  };
  if (with_ctx) layer.ctx = make_ctx(prefix + ".ctx");
  return layer;
}

SeqTransformer::DecLayerP SeqTransformer::make_dec_layer(
    const std::string& prefix, bool with_ctx) {
  DecLayerP layer{
      make_attn(prefix + ".sa"),    make_ln(prefix + ".ln1"),
      make_attn(prefix + ".cross"), make_ln(prefix + ".ln_cross"),
      std::nullopt,
      make_ffn(prefix + ".ffn"),    make_ln(prefix + ".ln2"),
  };
  if (with_ctx) layer.ctx = make_ctx(prefix + ".ctx");
  return layer;
}

// ---- tape path ------------------------------------------------------------

Var SeqTransformer::embed_positions(Tape& t, ParamBinder& b,
                                    const std::vector<int>& ids,
                                    Rng* dropout_rng) const {
  if (ids.empty()) throw Error("transformer: empty token sequence");
  if (ids.size() > dims_.max_pos)
    throw Error("transformer: sequence of " + std::to_string(ids.size()) +
                " tokens exceeds max positions " + std::to_string(dims_.max_pos));
  Var e = embedding_lookup(t, b.use(*embed_), ids);
  e = scale(t, e, std::sqrt(static_cast<double>(dims_.hidden)));
  Tensor pe = Tensor::zeros({ids.size(), dims_.hidden});
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = 0; j < dims_.hidden; ++j)
      pe.at(i, j) = positions_.at(i, j);
  e = add(t, e, t.constant(std::move(pe)));
  if (dropout_rng != nullptr && dims_.dropout > 0.0)
    e = dropout(t, e, dims_.dropout, *dropout_rng);
  return e;
}

Var SeqTransformer::attention(Tape& t, ParamBinder& b, const AttnP& p,
                              Var queries_in, Var keys_in, bool causal) const {
  const std::size_t heads = dims_.heads;
  const std::size_t dk = dims_.hidden / heads;
  Var q = add_bias(t, matmul(t, queries_in, b.use(*p.wq)), b.use(*p.bq));
  Var k = add_bias(t, matmul(t, keys_in, b.use(*p.wk)), b.use(*p.bk));
  Var v = add_bias(t, matmul(t, keys_in, b.use(*p.wv)), b.use(*p.bv));
  const std::size_t lq = t.value(q).rows();
  const std::size_t lk = t.value(k).rows();

  std::vector<std::uint8_t> mask;
  if (causal) {
    if (lq != lk) throw Error("attention: causal mask on non-square scores");
    mask = causal_mask(lq);
  }

  std::vector<Var> head_outs;
  head_outs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    Var qh = slice(t, q, 1, h * dk, (h + 1) * dk);
    Var kh = slice(t, k, 1, h * dk, (h + 1) * dk);
    Var vh = slice(t, v, 1, h * dk, (h + 1) * dk);
    Var scores = scale(t, matmul_nt(t, qh, kh),
                       1.0 / std::sqrt(static_cast<double>(dk)));
    if (causal) scores = mask_fill(t, scores, mask, linalg::kMaskValue);
    Var weights = softmax(t, scores);
    head_outs.push_back(matmul(t, weights, vh));
  }
  Var merged = concat(t, head_outs, 1);
  return add_bias(t, matmul(t, merged, b.use(*p.wo)), b.use(*p.bo));
}

Var SeqTransformer::ffn_block(Tape& t, ParamBinder& b, const FfnP& p,
                              Var x) const {
  Var h = add_bias(t, matmul(t, x, b.use(*p.w1)), b.use(*p.b1));
  h = relu(t, h);
  return add_bias(t, matmul(t, h, b.use(*p.w2)), b.use(*p.b2));
}

Var SeqTransformer::encoder_stack(Tape& t, ParamBinder& b,
                                  const std::vector<EncLayerP>& layers,
                                  const LnP& final_ln,
                                  const std::vector<int>& src,
                                  std::optional<Var> ctx_states,
                                  Rng* dropout_rng) const {
  auto drop = [&](Var v) {
    return dropout_rng != nullptr && dims_.dropout > 0.0
               ? dropout(t, v, dims_.dropout, *dropout_rng)
               : v;
  };
  Var x = embed_positions(t, b, src, dropout_rng);
  for (const EncLayerP& layer : layers) {
    Var hn = layer_norm(t, x, b.use(*layer.ln1.g), b.use(*layer.ln1.b));
    x = add(t, x, drop(attention(t, b, layer.sa, hn, hn, false)));
    if (layer.ctx && ctx_states) {
      hn = layer_norm(t, x, b.use(*layer.ctx->ln.g), b.use(*layer.ctx->ln.b));
      Var ca = drop(attention(t, b, layer.ctx->at, hn, *ctx_states, false));
      x = add(t, x, mul_scalar(t, ca, b.use(*layer.ctx->gate)));
    }
    hn = layer_norm(t, x, b.use(*layer.ln2.g), b.use(*layer.ln2.b));
    x = add(t, x, drop(ffn_block(t, b, layer.ffn, hn)));
  }
  return layer_norm(t, x, b.use(*final_ln.g), b.use(*final_ln.b));
}

Var SeqTransformer::context_encode(Tape& t, ParamBinder& b,
                                   const std::vector<int>& ctx,
                                   Rng* dropout_rng) const {
  if (!dims_.multi_source)
    throw Error("transformer: context_encode on a single-source model");
  return encoder_stack(t, b, ctx_layers_, ctx_final_, ctx, std::nullopt,
                       dropout_rng);
}

Var SeqTransformer::encode(Tape& t, ParamBinder& b, const std::vector<int>& src,
                           std::optional<Var> ctx_states,
                           Rng* dropout_rng) const {
  if (ctx_states && !dims_.multi_source)
    throw Error("transformer: context states on a single-source model");
  return encoder_stack(t, b, enc_layers_, enc_final_, src, ctx_states,
                       dropout_rng);
}

Var SeqTransformer::decode_teacher_forced(Tape& t, ParamBinder& b,
                                          const std::vector<int>& target_in,
                                          Var main_states,
                                          std::optional<Var> ctx_states,
                                          Rng* dropout_rng) const {
  if (ctx_states && !dims_.multi_source)
    throw Error("transformer: context states on a single-source model");
  auto drop = [&](Var v) {
    return dropout_rng != nullptr && dims_.dropout > 0.0
               ? dropout(t, v, dims_.dropout, *dropout_rng)
               : v;
  };
  Var x = embed_positions(t, b, target_in, dropout_rng);
  for (const DecLayerP& layer : dec_layers_) {
    Var hn = layer_norm(t, x, b.use(*layer.ln1.g), b.use(*layer.ln1.b));
    x = add(t, x, drop(attention(t, b, layer.sa, hn, hn, true)));
    hn = layer_norm(t, x, b.use(*layer.ln_cross.g), b.use(*layer.ln_cross.b));
    x = add(t, x, drop(attention(t, b, layer.cross, hn, main_states, false)));
    if (layer.ctx && ctx_states) {
      hn = layer_norm(t, x, b.use(*layer.ctx->ln.g), b.use(*layer.ctx->ln.b));
      Var ca = drop(attention(t, b, layer.ctx->at, hn, *ctx_states, false));
      x = add(t, x, mul_scalar(t, ca, b.use(*layer.ctx->gate)));
    }
    hn = layer_norm(t, x, b.use(*layer.ln2.g), b.use(*layer.ln2.b));
    x = add(t, x, drop(ffn_block(t, b, layer.ffn, hn)));
  }
  Var states = layer_norm(t, x, b.use(*dec_final_.g), b.use(*dec_final_.b));
  return matmul_nt(t, states, b.use(*embed_));  // tied output projection
}

// ---- eval path --------------------------------------------------------

Tensor SeqTransformer::eval_context_encode(const std::vector<int>& ctx) const {
  Tape tape;
  ParamBinder binder(tape, /*trainable=*/false);
  // const_cast is safe: a non-trainable binder never writes parameters
  Var v = context_encode(tape, binder, ctx, nullptr);
  return tape.value(v);
}

Tensor SeqTransformer::eval_encode(const std::vector<int>& src,
                                   const Tensor& ctx_states) const {
  Tape tape;
  ParamBinder binder(tape, /*trainable=*/false);
  std::optional<Var> ctx;
  if (!ctx_states.empty()) ctx = tape.constant(ctx_states);
  Var v = encode(tape, binder, src, ctx, nullptr);
  return tape.value(v);
}

namespace {

// x(1,n) @ w(n,m) + bias(m)
Tensor project_row(const Tensor& x, const Param& w, const Param& bias) {
  Tensor out = linalg::matmul(x, w.value);
  linalg::add_bias_inplace(out, bias.value);
  return out;
}

}  // namespace

SeqTransformer::DecodeState SeqTransformer::begin_decode(
    Tensor main_states, Tensor ctx_states) const {
  DecodeState st;
  st.main_states = std::move(main_states);
  st.ctx_states = std::move(ctx_states);
  const std::size_t n = dec_layers_.size();
  st.self_k.resize(n);
  st.self_v.resize(n);
  st.cross_k.resize(n);
  st.cross_v.resize(n);
  st.ctx_k.resize(n);
  st.ctx_v.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    st.self_k[l].cols = dims_.hidden;
    st.self_v[l].cols = dims_.hidden;
    const DecLayerP& p = dec_layers_[l];
    st.cross_k[l] = linalg::matmul(st.main_states, p.cross.wk->value);
    linalg::add_bias_inplace(st.cross_k[l], p.cross.bk->value);
    st.cross_v[l] = linalg::matmul(st.main_states, p.cross.wv->value);
    linalg::add_bias_inplace(st.cross_v[l], p.cross.bv->value);
    if (p.ctx && !st.ctx_states.empty()) {
      st.ctx_k[l] = linalg::matmul(st.ctx_states, p.ctx->at.wk->value);
      linalg::add_bias_inplace(st.ctx_k[l], p.ctx->at.bk->value);
      st.ctx_v[l] = linalg::matmul(st.ctx_states, p.ctx->at.wv->value);
      linalg::add_bias_inplace(st.ctx_v[l], p.ctx->at.bv->value);
    }
  }
  return st;
}

// Multi-head attention of one query row against t cached key/value rows.
Tensor SeqTransformer::eval_attn_row(const AttnP& p, const Tensor& q_row,
                                     const RowBuffer& keys,
                                     const RowBuffer& values) const {
  const std::size_t heads = dims_.heads;
  const std::size_t dk = dims_.hidden / heads;
  const std::size_t t = keys.rows();
  const double inv = 1.0 / std::sqrt(static_cast<double>(dk));
  Tensor out = Tensor::zeros({1, dims_.hidden});
  for (std::size_t h = 0; h < heads; ++h) {
    Tensor scores = Tensor::zeros({1, t});
    for (std::size_t i = 0; i < t; ++i) {
      const double* krow = keys.row(i) + h * dk;
      const double* qrow = q_row.data() + h * dk;
      double dot = 0.0;
      for (std::size_t j = 0; j < dk; ++j) dot += qrow[j] * krow[j];
      scores[i] = dot * inv;
    }
    Tensor w = linalg::softmax_rows(scores);
    for (std::size_t i = 0; i < t; ++i) {
      const double* vrow = values.row(i) + h * dk;
      for (std::size_t j = 0; j < dk; ++j)
        out[h * dk + j] += w[i] * vrow[j];
    }
  }
  return project_row(out, *p.wo, *p.bo);
}

Tensor SeqTransformer::eval_attn_row_pre(const Tensor& q_row, const Tensor& keys,
                                         const Tensor& values,
                                         const AttnP& p) const {
  RowBuffer kb, vb;
  kb.cols = dims_.hidden;
  vb.cols = dims_.hidden;
  kb.data.assign(keys.data(), keys.data() + keys.size());
  vb.data.assign(values.data(), values.data() + values.size());
  return eval_attn_row(p, q_row, kb, vb);
}

Tensor SeqTransformer::decode_step(DecodeState& st, int token) const {
  if (st.pos >= dims_.max_pos)
    throw Error("decode_step: position " + std::to_string(st.pos) +
                " beyond max positions " + std::to_string(dims_.max_pos));
  const std::size_t hidden = dims_.hidden;
  const Tensor& emb = embed_->value;
  if (token < 0 || static_cast<std::size_t>(token) >= dims_.vocab)
    throw Error("decode_step: token id out of range");

  Tensor h = Tensor::zeros({1, hidden});
  const double s = std::sqrt(static_cast<double>(hidden));
  for (std::size_t j = 0; j < hidden; ++j)
    h[j] = emb.at(static_cast<std::size_t>(token), j) * s + positions_.at(st.pos, j);

  for (std::size_t l = 0; l < dec_layers_.size(); ++l) {
    const DecLayerP& p = dec_layers_[l];
    // self attention; the new key/value rows join the cache first
    Tensor hn = linalg::layer_norm_rows(h, p.ln1.g->value, p.ln1.b->value,
                                        linalg::kLayerNormEps);
    Tensor q = project_row(hn, *p.sa.wq, *p.sa.bq);
    Tensor kn = project_row(hn, *p.sa.wk, *p.sa.bk);
    Tensor vn = project_row(hn, *p.sa.wv, *p.sa.bv);
    st.self_k[l].append(kn.data());
    st.self_v[l].append(vn.data());
    linalg::add_inplace(h, eval_attn_row(p.sa, q, st.self_k[l], st.self_v[l]));

    // cross attention over the encoded main source
    hn = linalg::layer_norm_rows(h, p.ln_cross.g->value, p.ln_cross.b->value,
                                 linalg::kLayerNormEps);
    q = project_row(hn, *p.cross.wq, *p.cross.bq);
    linalg::add_inplace(
        h, eval_attn_row_pre(q, st.cross_k[l], st.cross_v[l], p.cross));

    if (p.ctx && !st.ctx_states.empty()) {
      hn = linalg::layer_norm_rows(h, p.ctx->ln.g->value, p.ctx->ln.b->value,
                                   linalg::kLayerNormEps);
      q = project_row(hn, *p.ctx->at.wq, *p.ctx->at.bq);
      Tensor ca = eval_attn_row_pre(q, st.ctx_k[l], st.ctx_v[l], p.ctx->at);
      linalg::scale_inplace(ca, p.ctx->gate->value[0]);
      linalg::add_inplace(h, ca);
    }

    hn = linalg::layer_norm_rows(h, p.ln2.g->value, p.ln2.b->value,
                                 linalg::kLayerNormEps);
    Tensor f = project_row(hn, *p.ffn.w1, *p.ffn.b1);
    f = linalg::relu(f);
    linalg::add_inplace(h, project_row(f, *p.ffn.w2, *p.ffn.b2));
  }

  Tensor hn = linalg::layer_norm_rows(h, dec_final_.g->value,
                                      dec_final_.b->value, linalg::kLayerNormEps);
  Tensor logits2 = linalg::matmul(hn, emb, false, true);  // (1, vocab)
  st.pos += 1;
  Tensor logits = Tensor::zeros({dims_.vocab});
  std::memcpy(logits.data(), logits2.data(), dims_.vocab * sizeof(double));
  return logits;
}

}  // namespace latentplot
