#include <algorithm>
#include <cmath>
#include <sstream>

#include "seda/model.hpp"

namespace seda {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_grad(double x) {
  double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
  double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  return cdf + x * pdf;
}

size_t product(const std::vector<int>& shape) {
  size_t p = 1;
  for (int d : shape) p *= size_t(d);
  return p;
}

void make_param(Param& p, std::string name, std::vector<int> shape, bool encoder_group) {
  p.name = std::move(name);
  p.shape = std::move(shape);
  p.w.assign(product(p.shape), 0.0);
  p.g.assign(p.w.size(), 0.0);
  p.encoder_group = encoder_group;
}

void fill_uniform(Param& p, Rng& rng, double limit) {
  for (double& v : p.w) v = rng.uniform(-limit, limit);
}

void fill_xavier(Param& p, Rng& rng, int fan_in, int fan_out) {
  fill_uniform(p, rng, std::sqrt(6.0 / double(fan_in + fan_out)));
}

// y += W x for an out x in matrix.
void affine(const std::vector<double>& w, const std::vector<double>& b, const double* x,
            int in_dim, int out_dim, double* y) {
  for (int o = 0; o < out_dim; ++o) {
    double acc = b[size_t(o)];
    const double* row = w.data() + size_t(o) * in_dim;
    for (int i = 0; i < in_dim; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

// Accumulates the backward of y = W x + b: dW += dy x^T, db += dy, dx += W^T dy.
void affine_backward(Param& w, Param& b, const double* x, const double* dy, int in_dim,
                     int out_dim, double* dx) {
  for (int o = 0; o < out_dim; ++o) {
    const double d = dy[o];
    if (d == 0.0) continue;
    double* wrow = w.g.data() + size_t(o) * in_dim;
    const double* row = w.w.data() + size_t(o) * in_dim;
    b.g[size_t(o)] += d;
    for (int i = 0; i < in_dim; ++i) {
      wrow[i] += d * x[i];
      if (dx) dx[i] += row[i] * d;
    }
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (d_h < 1 || d_ed < 1 || d_et < 1 || d_c < 1)
    throw ConfigError("model dimensions must be >= 1");
  if (dilations.empty()) throw ConfigError("at least one dilation factor is required");
  for (int l : dilations)
    if (l < 1) throw ConfigError("dilation factors must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (none_weight <= 0.0) throw ConfigError("none_weight must be positive");
}

int distance_bucket(int d) {
  int mag = std::abs(d);
  int level;
  if (mag == 0) return 0;
  if (mag <= 3)
    level = mag;             // 1, 2, 3
  else if (mag <= 7)
    level = 4;
  else if (mag <= 15)
    level = 5;
  else if (mag <= 31)
    level = 6;
  else if (mag <= 63)
    level = 7;
  else
    level = 8;
  return d > 0 ? 2 * level - 1 : 2 * level;
}

int Vocab::add(const std::string& token) {
  auto it = token_to_id.find(token);
  if (it != token_to_id.end()) return it->second;
  int id = size();
  token_to_id.emplace(token, id);
  id_to_token.push_back(token);
  return id;
}

int Vocab::lookup(const std::string& token) const {
  auto it = token_to_id.find(token);
  return it == token_to_id.end() ? kUnk : it->second;
}

std::vector<int> Vocab::lookup_all(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(lookup(t));
  return ids;
}

GridModel::GridModel(ModelConfig config, Vocab vocab, TagScheme scheme)
    : config_(std::move(config)), vocab_(std::move(vocab)), scheme_(std::move(scheme)) {
  config_.validate();
  allocate_params();
  init_weights();
}

void GridModel::allocate_params() {
  const int d_h = config_.d_h, d_c = config_.d_c;
  const int feat = d_h + config_.d_ed + config_.d_et;
  const int L = static_cast<int>(config_.dilations.size());
  const int T = scheme_.num_tags();

  make_param(emb, "emb", {vocab_.size(), d_h}, true);
  make_param(rnn_fw_w, "rnn_fw_w", {d_h, d_h}, true);
  make_param(rnn_fw_u, "rnn_fw_u", {d_h, d_h}, true);
  make_param(rnn_fw_b, "rnn_fw_b", {d_h}, true);
  make_param(rnn_bw_w, "rnn_bw_w", {d_h, d_h}, true);
  make_param(rnn_bw_u, "rnn_bw_u", {d_h, d_h}, true);
  make_param(rnn_bw_b, "rnn_bw_b", {d_h}, true);
  make_param(proj_w, "proj_w", {d_h, 2 * d_h}, true);
  make_param(proj_b, "proj_b", {d_h}, true);
  make_param(cln_wg, "cln_wg", {d_h, d_h}, false);
  make_param(cln_bg, "cln_bg", {d_h}, false);
  make_param(cln_wl, "cln_wl", {d_h, d_h}, false);
  make_param(cln_bl, "cln_bl", {d_h}, false);
  make_param(dist_emb, "dist_emb", {kDistanceBuckets, config_.d_ed}, false);
  make_param(region_emb, "region_emb", {2, config_.d_et}, false);
  make_param(mlp1_w, "mlp1_w", {d_c, feat}, false);
  make_param(mlp1_b, "mlp1_b", {d_c}, false);
  conv_w.resize(config_.dilations.size());
  conv_b.resize(config_.dilations.size());
  for (size_t l = 0; l < config_.dilations.size(); ++l) {
    make_param(conv_w[l], "conv_w" + std::to_string(config_.dilations[l]), {d_c, d_c, 3, 3},
               false);
    make_param(conv_b[l], "conv_b" + std::to_string(config_.dilations[l]), {d_c}, false);
  }
  make_param(mlp2_w, "mlp2_w", {T, L * d_c}, false);
  make_param(mlp2_b, "mlp2_b", {T}, false);
  make_param(mlp3_w, "mlp3_w", {d_c, d_h}, false);
  make_param(mlp3_b, "mlp3_b", {d_c}, false);
  make_param(mlp4_w, "mlp4_w", {d_c, d_h}, false);
  make_param(mlp4_b, "mlp4_b", {d_c}, false);
  make_param(bi_u, "bi_u", {d_c, T, d_c}, false);
  make_param(bi_w, "bi_w", {T, 2 * d_c}, false);
  make_param(bi_b, "bi_b", {T}, false);
}

void GridModel::init_weights() {
  Rng rng(derive_seed(config_.seed, "init"));
  const int d_h = config_.d_h, d_c = config_.d_c;
  const int feat = d_h + config_.d_ed + config_.d_et;
  const int L = static_cast<int>(config_.dilations.size());
  const int T = scheme_.num_tags();

  fill_uniform(emb, rng, 0.5);
  fill_xavier(rnn_fw_w, rng, d_h, d_h);
  fill_xavier(rnn_fw_u, rng, d_h, d_h);
  fill_xavier(rnn_bw_w, rng, d_h, d_h);
  fill_xavier(rnn_bw_u, rng, d_h, d_h);
  fill_xavier(proj_w, rng, 2 * d_h, d_h);
  // Gain generator starts near identity gain, bias generator near zero.
  fill_uniform(cln_wg, rng, 0.1 / std::sqrt(double(d_h)));
  std::fill(cln_bg.w.begin(), cln_bg.w.end(), 1.0);
  fill_uniform(cln_wl, rng, 0.1 / std::sqrt(double(d_h)));
  fill_uniform(dist_emb, rng, 0.5);
  fill_uniform(region_emb, rng, 0.5);
  fill_xavier(mlp1_w, rng, feat, d_c);
  for (size_t l = 0; l < conv_w.size(); ++l) fill_xavier(conv_w[l], rng, 9 * d_c, d_c);
  fill_xavier(mlp2_w, rng, L * d_c, T);
  fill_xavier(mlp3_w, rng, d_h, d_c);
  fill_xavier(mlp4_w, rng, d_h, d_c);
  fill_uniform(bi_u, rng, 0.05);
  fill_xavier(bi_w, rng, 2 * d_c, T);
}

std::vector<Param*> GridModel::params() {
  std::vector<Param*> out{&emb,      &rnn_fw_w, &rnn_fw_u,   &rnn_fw_b, &rnn_bw_w, &rnn_bw_u,
                          &rnn_bw_b, &proj_w,   &proj_b,     &cln_wg,   &cln_bg,   &cln_wl,
                          &cln_bl,   &dist_emb, &region_emb, &mlp1_w,   &mlp1_b};
  for (size_t l = 0; l < conv_w.size(); ++l) {
    out.push_back(&conv_w[l]);
    out.push_back(&conv_b[l]);
  }
  for (Param* p : {&mlp2_w, &mlp2_b, &mlp3_w, &mlp3_b, &mlp4_w, &mlp4_b, &bi_u, &bi_w, &bi_b})
    out.push_back(p);
  return out;
}

std::vector<const Param*> GridModel::params() const {
  std::vector<Param*> mutable_params = const_cast<GridModel*>(this)->params();
  return {mutable_params.begin(), mutable_params.end()};
}

Param* GridModel::param(const std::string& name) {
  for (Param* p : params())
    if (p->name == name) return p;
  return nullptr;
}

long GridModel::parameter_count() const {
  long n = 0;
  for (const Param* p : params()) n += static_cast<long>(p->size());
  return n;
}

namespace {

void apply_dropout(std::vector<double>& values, std::vector<double>& mask, double rate,
                   bool training, Rng* rng) {
  if (!training || rate <= 0.0) return;
  mask.resize(values.size());
  const double keep_scale = 1.0 / (1.0 - rate);
  for (size_t i = 0; i < values.size(); ++i) {
    mask[i] = rng->bernoulli(rate) ? 0.0 : keep_scale;
    values[i] *= mask[i];
  }
}

void mask_backward(std::vector<double>& grad, const std::vector<double>& mask) {
  if (mask.empty()) return;
  for (size_t i = 0; i < grad.size(); ++i) grad[i] *= mask[i];
}

}  // namespace

Trace forward(const GridModel& model, const std::vector<int>& ids, bool training, Rng* rng) {
  if (ids.empty()) throw RangeError("cannot encode an empty sample");
  if (training && !rng) throw ConfigError("training-mode forward needs an rng for dropout");
  const ModelConfig& cfg = model.config();
  const int n = static_cast<int>(ids.size());
  const int d_h = cfg.d_h, d_c = cfg.d_c;
  const int d_ed = cfg.d_ed, d_et = cfg.d_et;
  const int feat_dim = d_h + d_ed + d_et;
  const int L = static_cast<int>(cfg.dilations.size());
  const int T = model.num_tags();

  Trace t;
  t.n = n;
  t.training = training;
  t.ids = ids;

  // Embedding lookup. Word-piece pooling is an identity at word level.
  t.x.assign(size_t(n) * d_h, 0.0);
  for (int i = 0; i < n; ++i) {
    int id = ids[size_t(i)];
    if (id < 0 || id >= model.vocab().size())
      throw RangeError("token id " + std::to_string(id) + " outside vocabulary");
    std::copy_n(model.emb.w.data() + size_t(id) * d_h, d_h, t.x.data() + size_t(i) * d_h);
  }

  // Bidirectional recurrent context mixer, projected back to d_h.
  t.fw_h.assign(size_t(n) * d_h, 0.0);
  t.bw_h.assign(size_t(n) * d_h, 0.0);
  std::vector<double> pre(d_h);
  for (int i = 0; i < n; ++i) {
    affine(model.rnn_fw_w.w, model.rnn_fw_b.w, t.x.data() + size_t(i) * d_h, d_h, d_h,
           pre.data());
    if (i > 0) {
      const double* prev = t.fw_h.data() + size_t(i - 1) * d_h;
      for (int k = 0; k < d_h; ++k) {
        const double* row = model.rnn_fw_u.w.data() + size_t(k) * d_h;
        double acc = 0.0;
        for (int k2 = 0; k2 < d_h; ++k2) acc += row[k2] * prev[k2];
        pre[size_t(k)] += acc;
      }
    }
    for (int k = 0; k < d_h; ++k) t.fw_h[size_t(i) * d_h + k] = std::tanh(pre[size_t(k)]);
  }
  for (int i = n - 1; i >= 0; --i) {
    affine(model.rnn_bw_w.w, model.rnn_bw_b.w, t.x.data() + size_t(i) * d_h, d_h, d_h,
           pre.data());
    if (i + 1 < n) {
      const double* prev = t.bw_h.data() + size_t(i + 1) * d_h;
      for (int k = 0; k < d_h; ++k) {
        const double* row = model.rnn_bw_u.w.data() + size_t(k) * d_h;
        double acc = 0.0;
        for (int k2 = 0; k2 < d_h; ++k2) acc += row[k2] * prev[k2];
        pre[size_t(k)] += acc;
      }
    }
    for (int k = 0; k < d_h; ++k) t.bw_h[size_t(i) * d_h + k] = std::tanh(pre[size_t(k)]);
  }

  t.h_raw.assign(size_t(n) * d_h, 0.0);
  std::vector<double> hcat(2 * d_h);
  for (int i = 0; i < n; ++i) {
    std::copy_n(t.fw_h.data() + size_t(i) * d_h, d_h, hcat.data());
    std::copy_n(t.bw_h.data() + size_t(i) * d_h, d_h, hcat.data() + d_h);
    affine(model.proj_w.w, model.proj_b.w, hcat.data(), 2 * d_h, d_h,
           t.h_raw.data() + size_t(i) * d_h);
  }
  t.H = t.h_raw;
  apply_dropout(t.H, t.drop_h, cfg.dropout, training, rng);

  // CLN: gain and bias generated from the conditioning token i, the core
  // normalizes h_j over its elements.
  t.gamma.assign(size_t(n) * d_h, 0.0);
  t.lam.assign(size_t(n) * d_h, 0.0);
  for (int i = 0; i < n; ++i) {
    affine(model.cln_wg.w, model.cln_bg.w, t.H.data() + size_t(i) * d_h, d_h, d_h,
           t.gamma.data() + size_t(i) * d_h);
    affine(model.cln_wl.w, model.cln_bl.w, t.H.data() + size_t(i) * d_h, d_h, d_h,
           t.lam.data() + size_t(i) * d_h);
  }
  t.mu.assign(size_t(n), 0.0);
  t.sigma.assign(size_t(n), 0.0);
  t.sigma_eff.assign(size_t(n), 0.0);
  t.norm.assign(size_t(n) * d_h, 0.0);
  for (int j = 0; j < n; ++j) {
    const double* h = t.H.data() + size_t(j) * d_h;
    double mu = 0.0;
    for (int k = 0; k < d_h; ++k) mu += h[k];
    mu /= d_h;
    double var = 0.0;
    for (int k = 0; k < d_h; ++k) var += (h[k] - mu) * (h[k] - mu);
    var /= d_h;
    double sigma = std::sqrt(var);
    double sigma_eff = sigma;
    if (sigma < kClnSigmaEps) {
      sigma_eff = kClnSigmaEps;
      t.diag.sigma_clamped++;
    }
    t.mu[size_t(j)] = mu;
    t.sigma[size_t(j)] = sigma;
    t.sigma_eff[size_t(j)] = sigma_eff;
    for (int k = 0; k < d_h; ++k) t.norm[size_t(j) * d_h + k] = (h[k] - mu) / sigma_eff;
  }

  // Grid features C = MLP_1([V; E^d; E^t]).
  t.c_pre.assign(size_t(n) * n * d_c, 0.0);
  std::vector<double> feat(feat_dim);
  for (int i = 0; i < n; ++i) {
    const double* gam = t.gamma.data() + size_t(i) * d_h;
    const double* lam = t.lam.data() + size_t(i) * d_h;
    for (int j = 0; j < n; ++j) {
      const double* nrm = t.norm.data() + size_t(j) * d_h;
      for (int k = 0; k < d_h; ++k) feat[size_t(k)] = gam[k] * nrm[k] + lam[k];
      const double* de = model.dist_emb.w.data() + size_t(distance_bucket(j - i)) * d_ed;
      std::copy_n(de, d_ed, feat.data() + d_h);
      int region = j > i ? kRegionUpper : kRegionLower;
      const double* re = model.region_emb.w.data() + size_t(region) * d_et;
      std::copy_n(re, d_et, feat.data() + d_h + d_ed);
      affine(model.mlp1_w.w, model.mlp1_b.w, feat.data(), feat_dim, d_c,
             t.c_pre.data() + (size_t(i) * n + j) * d_c);
    }
  }
  t.C.resize(t.c_pre.size());
  for (size_t k = 0; k < t.c_pre.size(); ++k) t.C[k] = gelu(t.c_pre[k]);
  apply_dropout(t.C, t.drop_c, cfg.dropout, training, rng);

  // Dilated convolutions, 3x3 kernels, zero padding preserving n x n.
  t.q_pre.assign(size_t(L), {});
  t.Q.assign(size_t(n) * n * L * d_c, 0.0);
  for (int l = 0; l < L; ++l) {
    const int dil = cfg.dilations[size_t(l)];
    const Param& kw = model.conv_w[size_t(l)];
    const Param& kb = model.conv_b[size_t(l)];
    std::vector<double>& qp = t.q_pre[size_t(l)];
    qp.assign(size_t(n) * n * d_c, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double* cell = qp.data() + (size_t(i) * n + j) * d_c;
        for (int o = 0; o < d_c; ++o) cell[o] = kb.w[size_t(o)];
        for (int di = 0; di < 3; ++di) {
          const int ii = i + (di - 1) * dil;
          if (ii < 0 || ii >= n) continue;
          for (int dj = 0; dj < 3; ++dj) {
            const int jj = j + (dj - 1) * dil;
            if (jj < 0 || jj >= n) continue;
            const double* src = t.C.data() + (size_t(ii) * n + jj) * d_c;
            for (int o = 0; o < d_c; ++o) {
              const double* krow = kw.w.data() + ((size_t(o) * d_c) * 9) + size_t(di) * 3 + dj;
              double acc = 0.0;
              for (int c = 0; c < d_c; ++c) acc += krow[size_t(c) * 9] * src[c];
              cell[o] += acc;
            }
          }
        }
      }
    }
    for (size_t cell = 0; cell < size_t(n) * n; ++cell)
      for (int o = 0; o < d_c; ++o)
        t.Q[cell * size_t(L) * d_c + size_t(l) * d_c + o] = gelu(qp[cell * d_c + o]);
  }
  apply_dropout(t.Q, t.drop_q, cfg.dropout, training, rng);

  // Co-predictor: per-cell MLP plus biaffine scorer.
  t.y1.assign(size_t(n) * n * T, 0.0);
  for (size_t cell = 0; cell < size_t(n) * n; ++cell)
    affine(model.mlp2_w.w, model.mlp2_b.w, t.Q.data() + cell * size_t(L) * d_c, L * d_c, T,
           t.y1.data() + cell * T);

  t.s_pre.assign(size_t(n) * d_c, 0.0);
  t.o_pre.assign(size_t(n) * d_c, 0.0);
  for (int i = 0; i < n; ++i) {
    affine(model.mlp3_w.w, model.mlp3_b.w, t.H.data() + size_t(i) * d_h, d_h, d_c,
           t.s_pre.data() + size_t(i) * d_c);
    affine(model.mlp4_w.w, model.mlp4_b.w, t.H.data() + size_t(i) * d_h, d_h, d_c,
           t.o_pre.data() + size_t(i) * d_c);
  }
  t.s.resize(t.s_pre.size());
  t.o.resize(t.o_pre.size());
  for (size_t k = 0; k < t.s_pre.size(); ++k) t.s[k] = gelu(t.s_pre[k]);
  for (size_t k = 0; k < t.o_pre.size(); ++k) t.o[k] = gelu(t.o_pre[k]);

  t.su.assign(size_t(n) * T * d_c, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* si = t.s.data() + size_t(i) * d_c;
    double* su_i = t.su.data() + size_t(i) * T * d_c;
    for (int a = 0; a < d_c; ++a) {
      const double sa = si[a];
      if (sa == 0.0) continue;
      const double* urow = model.bi_u.w.data() + size_t(a) * T * d_c;
      for (int tb = 0; tb < T * d_c; ++tb) su_i[tb] += sa * urow[tb];
    }
  }

  t.y2.assign(size_t(n) * n * T, 0.0);
  std::vector<double> ws(size_t(n) * T, 0.0), wo(size_t(n) * T, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int tt = 0; tt < T; ++tt) {
      const double* wrow = model.bi_w.w.data() + size_t(tt) * 2 * d_c;
      double acc_s = 0.0, acc_o = 0.0;
      for (int a = 0; a < d_c; ++a) {
        acc_s += wrow[a] * t.s[size_t(i) * d_c + a];
        acc_o += wrow[d_c + a] * t.o[size_t(i) * d_c + a];
      }
      ws[size_t(i) * T + tt] = acc_s;
      wo[size_t(i) * T + tt] = acc_o;
    }
  }
  for (int i = 0; i < n; ++i) {
    const double* su_i = t.su.data() + size_t(i) * T * d_c;
    for (int j = 0; j < n; ++j) {
      const double* oj = t.o.data() + size_t(j) * d_c;
      double* out = t.y2.data() + (size_t(i) * n + j) * T;
      for (int tt = 0; tt < T; ++tt) {
        const double* su_row = su_i + size_t(tt) * d_c;
        double acc = model.bi_b.w[size_t(tt)] + ws[size_t(i) * T + tt] + wo[size_t(j) * T + tt];
        for (int b = 0; b < d_c; ++b) acc += su_row[b] * oj[b];
        out[tt] = acc;
      }
    }
  }

  // Softmax over tags per cell.
  t.Y.assign(size_t(n) * n * T, 0.0);
  for (size_t cell = 0; cell < size_t(n) * n; ++cell) {
    const double* a = t.y1.data() + cell * T;
    const double* b = t.y2.data() + cell * T;
    double* y = t.Y.data() + cell * T;
    double mx = a[0] + b[0];
    for (int tt = 1; tt < T; ++tt) mx = std::max(mx, a[tt] + b[tt]);
    double z = 0.0;
    for (int tt = 0; tt < T; ++tt) {
      y[tt] = std::exp(a[tt] + b[tt] - mx);
      z += y[tt];
    }
    for (int tt = 0; tt < T; ++tt) y[tt] /= z;
  }
  return t;
}

double cell_loss(const std::vector<double>& Y, const TagGrid& gold, int num_tags,
                 double none_weight) {
  const size_t cells = gold.cells.size();
  if (Y.size() != cells * size_t(num_tags))
    throw RangeError("probability tensor does not match the gold grid");
  double loss = 0.0, wsum = 0.0;
  for (size_t cell = 0; cell < cells; ++cell) {
    int g = gold.cells[cell];
    if (g < 0 || g >= num_tags)
      throw RangeError("gold tag id " + std::to_string(g) + " out of range");
    double w = g == TagScheme::kNone ? none_weight : 1.0;
    double p = std::max(Y[cell * size_t(num_tags) + size_t(g)], 1e-300);
    loss -= w * std::log(p);
    wsum += w;
  }
  return loss / wsum;
}

double loss_and_backward(GridModel& model, const Trace& t, const TagGrid& gold) {
  const ModelConfig& cfg = model.config();
  const int n = t.n;
  if (gold.n != n) throw RangeError("gold grid size does not match the trace");
  const int d_h = cfg.d_h, d_c = cfg.d_c;
  const int d_ed = cfg.d_ed, d_et = cfg.d_et;
  const int feat_dim = d_h + d_ed + d_et;
  const int L = static_cast<int>(cfg.dilations.size());
  const int T = model.num_tags();

  // Loss and dlogits in one pass.
  double wsum = 0.0;
  for (size_t cell = 0; cell < size_t(n) * n; ++cell)
    wsum += gold.cells[cell] == TagScheme::kNone ? cfg.none_weight : 1.0;
  double loss = 0.0;
  std::vector<double> dlogits(size_t(n) * n * T, 0.0);
  for (size_t cell = 0; cell < size_t(n) * n; ++cell) {
    const int g = gold.cells[cell];
    if (g < 0 || g >= T) throw RangeError("gold tag id out of range");
    const double w = (g == TagScheme::kNone ? cfg.none_weight : 1.0) / wsum;
    const double* y = t.Y.data() + cell * T;
    loss -= w * std::log(std::max(y[g], 1e-300));
    for (int tt = 0; tt < T; ++tt)
      dlogits[cell * T + size_t(tt)] = w * (y[tt] - (tt == g ? 1.0 : 0.0));
  }

  std::vector<double> dH(size_t(n) * d_h, 0.0);

  // ---- co-predictor backward ----
  std::vector<double> dQ(size_t(n) * n * L * d_c, 0.0);
  for (size_t cell = 0; cell < size_t(n) * n; ++cell)
    affine_backward(model.mlp2_w, model.mlp2_b, t.Q.data() + cell * size_t(L) * d_c,
                    dlogits.data() + cell * T, L * d_c, T, dQ.data() + cell * size_t(L) * d_c);

  std::vector<double> ds(size_t(n) * d_c, 0.0), do_(size_t(n) * d_c, 0.0);
  std::vector<double> dsu(size_t(n) * T * d_c, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* su_i = t.su.data() + size_t(i) * T * d_c;
    double* dsu_i = dsu.data() + size_t(i) * T * d_c;
    for (int j = 0; j < n; ++j) {
      const double* dy = dlogits.data() + (size_t(i) * n + j) * T;
      const double* oj = t.o.data() + size_t(j) * d_c;
      double* doj = do_.data() + size_t(j) * d_c;
      for (int tt = 0; tt < T; ++tt) {
        const double d = dy[tt];
        if (d == 0.0) continue;
        model.bi_b.g[size_t(tt)] += d;
        const double* su_row = su_i + size_t(tt) * d_c;
        double* dsu_row = dsu_i + size_t(tt) * d_c;
        double* bw_row = model.bi_w.g.data() + size_t(tt) * 2 * d_c;
        const double* bw_w = model.bi_w.w.data() + size_t(tt) * 2 * d_c;
        for (int b = 0; b < d_c; ++b) {
          dsu_row[b] += d * oj[b];
          doj[b] += d * su_row[b];
          bw_row[d_c + b] += d * oj[b];
          doj[b] += d * bw_w[d_c + b];
        }
        for (int a = 0; a < d_c; ++a) {
          bw_row[a] += d * t.s[size_t(i) * d_c + a];
          ds[size_t(i) * d_c + a] += d * bw_w[a];
        }
      }
    }
  }
  // dsu -> dU and ds.
  for (int i = 0; i < n; ++i) {
    const double* si = t.s.data() + size_t(i) * d_c;
    const double* dsu_i = dsu.data() + size_t(i) * T * d_c;
    for (int a = 0; a < d_c; ++a) {
      const double sa = si[a];
      double* ug = model.bi_u.g.data() + size_t(a) * T * d_c;
      const double* uw = model.bi_u.w.data() + size_t(a) * T * d_c;
      double acc = 0.0;
      for (int tb = 0; tb < T * d_c; ++tb) {
        ug[tb] += sa * dsu_i[tb];
        acc += uw[tb] * dsu_i[tb];
      }
      ds[size_t(i) * d_c + a] += acc;
    }
  }
  // s/o through GELU and their projections.
  for (int i = 0; i < n; ++i) {
    std::vector<double> ds_pre(d_c), do_pre(d_c);
    for (int a = 0; a < d_c; ++a) {
      ds_pre[size_t(a)] = ds[size_t(i) * d_c + a] * gelu_grad(t.s_pre[size_t(i) * d_c + a]);
      do_pre[size_t(a)] = do_[size_t(i) * d_c + a] * gelu_grad(t.o_pre[size_t(i) * d_c + a]);
    }
    affine_backward(model.mlp3_w, model.mlp3_b, t.H.data() + size_t(i) * d_h, ds_pre.data(),
                    d_h, d_c, dH.data() + size_t(i) * d_h);
    affine_backward(model.mlp4_w, model.mlp4_b, t.H.data() + size_t(i) * d_h, do_pre.data(),
                    d_h, d_c, dH.data() + size_t(i) * d_h);
  }

  // ---- convolution backward ----
  mask_backward(dQ, t.drop_q);
  std::vector<double> dC(size_t(n) * n * d_c, 0.0);
  for (int l = 0; l < L; ++l) {
    const int dil = cfg.dilations[size_t(l)];
    Param& kw = model.conv_w[size_t(l)];
    Param& kb = model.conv_b[size_t(l)];
    const std::vector<double>& qp = t.q_pre[size_t(l)];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const size_t cell = size_t(i) * n + j;
        std::vector<double> dq(d_c);
        bool any = false;
        for (int o = 0; o < d_c; ++o) {
          double d = dQ[cell * size_t(L) * d_c + size_t(l) * d_c + o] *
                     gelu_grad(qp[cell * d_c + o]);
          dq[size_t(o)] = d;
          any = any || d != 0.0;
        }
        if (!any) continue;
        for (int o = 0; o < d_c; ++o) kb.g[size_t(o)] += dq[size_t(o)];
        for (int di = 0; di < 3; ++di) {
          const int ii = i + (di - 1) * dil;
          if (ii < 0 || ii >= n) continue;
          for (int dj = 0; dj < 3; ++dj) {
            const int jj = j + (dj - 1) * dil;
            if (jj < 0 || jj >= n) continue;
            const double* src = t.C.data() + (size_t(ii) * n + jj) * d_c;
            double* dst = dC.data() + (size_t(ii) * n + jj) * d_c;
            for (int o = 0; o < d_c; ++o) {
              const double d = dq[size_t(o)];
              if (d == 0.0) continue;
              double* kg = kw.g.data() + ((size_t(o) * d_c) * 9) + size_t(di) * 3 + dj;
              const double* kv = kw.w.data() + ((size_t(o) * d_c) * 9) + size_t(di) * 3 + dj;
              for (int c = 0; c < d_c; ++c) {
                kg[size_t(c) * 9] += d * src[c];
                dst[c] += d * kv[size_t(c) * 9];
              }
            }
          }
        }
      }
    }
  }

  // ---- grid features backward ----
  mask_backward(dC, t.drop_c);
  std::vector<double> dgamma(size_t(n) * d_h, 0.0), dlam(size_t(n) * d_h, 0.0);
  std::vector<double> dnorm(size_t(n) * d_h, 0.0);
  std::vector<double> feat(feat_dim), dfeat(feat_dim);
  for (int i = 0; i < n; ++i) {
    const double* gam = t.gamma.data() + size_t(i) * d_h;
    const double* lam = t.lam.data() + size_t(i) * d_h;
    for (int j = 0; j < n; ++j) {
      const size_t cell = size_t(i) * n + j;
      std::vector<double> dc_pre(d_c);
      bool any = false;
      for (int c = 0; c < d_c; ++c) {
        double d = dC[cell * d_c + c] * gelu_grad(t.c_pre[cell * d_c + c]);
        dc_pre[size_t(c)] = d;
        any = any || d != 0.0;
      }
      if (!any) continue;
      const double* nrm = t.norm.data() + size_t(j) * d_h;
      for (int k = 0; k < d_h; ++k) feat[size_t(k)] = gam[k] * nrm[k] + lam[k];
      const int bucket = distance_bucket(j - i);
      const double* de = model.dist_emb.w.data() + size_t(bucket) * d_ed;
      std::copy_n(de, d_ed, feat.data() + d_h);
      const int region = j > i ? kRegionUpper : kRegionLower;
      const double* re = model.region_emb.w.data() + size_t(region) * d_et;
      std::copy_n(re, d_et, feat.data() + d_h + d_ed);

      std::fill(dfeat.begin(), dfeat.end(), 0.0);
      affine_backward(model.mlp1_w, model.mlp1_b, feat.data(), dc_pre.data(), feat_dim, d_c,
                      dfeat.data());
      for (int k = 0; k < d_h; ++k) {
        const double dv = dfeat[size_t(k)];
        dgamma[size_t(i) * d_h + k] += dv * nrm[k];
        dnorm[size_t(j) * d_h + k] += dv * gam[k];
        dlam[size_t(i) * d_h + k] += dv;
      }
      double* deg = model.dist_emb.g.data() + size_t(bucket) * d_ed;
      for (int e = 0; e < d_ed; ++e) deg[e] += dfeat[size_t(d_h + e)];
      double* reg = model.region_emb.g.data() + size_t(region) * d_et;
      for (int e = 0; e < d_et; ++e) reg[e] += dfeat[size_t(d_h + d_ed + e)];
    }
  }

  // Normalization core backward (population statistics).
  for (int j = 0; j < n; ++j) {
    const double* dn = dnorm.data() + size_t(j) * d_h;
    const double* nrm = t.norm.data() + size_t(j) * d_h;
    double* dh = dH.data() + size_t(j) * d_h;
    double mean_dn = 0.0, mean_dn_n = 0.0;
    for (int k = 0; k < d_h; ++k) {
      mean_dn += dn[k];
      mean_dn_n += dn[k] * nrm[k];
    }
    mean_dn /= d_h;
    mean_dn_n /= d_h;
    const double inv_sigma = 1.0 / t.sigma_eff[size_t(j)];
    const bool clamped = t.sigma[size_t(j)] < kClnSigmaEps;
    for (int k = 0; k < d_h; ++k) {
      double g = dn[k] - mean_dn;
      if (!clamped) g -= nrm[k] * mean_dn_n;
      dh[k] += inv_sigma * g;
    }
  }

  // Gain/bias generators.
  for (int i = 0; i < n; ++i) {
    affine_backward(model.cln_wg, model.cln_bg, t.H.data() + size_t(i) * d_h,
                    dgamma.data() + size_t(i) * d_h, d_h, d_h, dH.data() + size_t(i) * d_h);
    affine_backward(model.cln_wl, model.cln_bl, t.H.data() + size_t(i) * d_h,
                    dlam.data() + size_t(i) * d_h, d_h, d_h, dH.data() + size_t(i) * d_h);
  }

  // ---- encoder backward ----
  mask_backward(dH, t.drop_h);
  std::vector<double> dfw(size_t(n) * d_h, 0.0), dbw(size_t(n) * d_h, 0.0);
  std::vector<double> hcat(2 * d_h), dhcat(2 * d_h);
  for (int i = 0; i < n; ++i) {
    std::copy_n(t.fw_h.data() + size_t(i) * d_h, d_h, hcat.data());
    std::copy_n(t.bw_h.data() + size_t(i) * d_h, d_h, hcat.data() + d_h);
    std::fill(dhcat.begin(), dhcat.end(), 0.0);
    affine_backward(model.proj_w, model.proj_b, hcat.data(), dH.data() + size_t(i) * d_h,
                    2 * d_h, d_h, dhcat.data());
    for (int k = 0; k < d_h; ++k) {
      dfw[size_t(i) * d_h + k] += dhcat[size_t(k)];
      dbw[size_t(i) * d_h + k] += dhcat[size_t(d_h + k)];
    }
  }

  std::vector<double> dx(size_t(n) * d_h, 0.0);
  std::vector<double> carry(d_h, 0.0), da(d_h);
  for (int i = n - 1; i >= 0; --i) {
    for (int k = 0; k < d_h; ++k) {
      const double h = t.fw_h[size_t(i) * d_h + k];
      da[size_t(k)] = (dfw[size_t(i) * d_h + k] + carry[size_t(k)]) * (1.0 - h * h);
    }
    affine_backward(model.rnn_fw_w, model.rnn_fw_b, t.x.data() + size_t(i) * d_h, da.data(),
                    d_h, d_h, dx.data() + size_t(i) * d_h);
    std::fill(carry.begin(), carry.end(), 0.0);
    if (i > 0) {
      const double* prev = t.fw_h.data() + size_t(i - 1) * d_h;
      for (int k = 0; k < d_h; ++k) {
        const double d = da[size_t(k)];
        if (d == 0.0) continue;
        double* ug = model.rnn_fw_u.g.data() + size_t(k) * d_h;
        const double* uw = model.rnn_fw_u.w.data() + size_t(k) * d_h;
        for (int k2 = 0; k2 < d_h; ++k2) {
          ug[k2] += d * prev[k2];
          carry[size_t(k2)] += uw[k2] * d;
        }
      }
    }
  }
  std::fill(carry.begin(), carry.end(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d_h; ++k) {
      const double h = t.bw_h[size_t(i) * d_h + k];
      da[size_t(k)] = (dbw[size_t(i) * d_h + k] + carry[size_t(k)]) * (1.0 - h * h);
    }
    affine_backward(model.rnn_bw_w, model.rnn_bw_b, t.x.data() + size_t(i) * d_h, da.data(),
                    d_h, d_h, dx.data() + size_t(i) * d_h);
    std::fill(carry.begin(), carry.end(), 0.0);
    if (i + 1 < n) {
      const double* next = t.bw_h.data() + size_t(i + 1) * d_h;
      for (int k = 0; k < d_h; ++k) {
        const double d = da[size_t(k)];
        if (d == 0.0) continue;
        double* ug = model.rnn_bw_u.g.data() + size_t(k) * d_h;
        const double* uw = model.rnn_bw_u.w.data() + size_t(k) * d_h;
        for (int k2 = 0; k2 < d_h; ++k2) {
          ug[k2] += d * next[k2];
          carry[size_t(k2)] += uw[k2] * d;
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    double* eg = model.emb.g.data() + size_t(t.ids[size_t(i)]) * d_h;
    for (int k = 0; k < d_h; ++k) eg[k] += dx[size_t(i) * d_h + k];
  }
  return loss;
}

std::vector<double> encode_tokens(const GridModel& model, const std::vector<int>& ids) {
  Trace t = forward(model, ids);
  return t.H;
}

std::vector<double> cln_core(const std::vector<double>& h, ForwardDiagnostics* diag) {
  const int d = static_cast<int>(h.size());
  double mu = 0.0;
  for (double v : h) mu += v;
  mu /= d;
  double var = 0.0;
  for (double v : h) var += (v - mu) * (v - mu);
  var /= d;
  double sigma = std::sqrt(var);
  if (sigma < kClnSigmaEps) {
    sigma = kClnSigmaEps;
    if (diag) diag->sigma_clamped++;
  }
  std::vector<double> out(h.size());
  for (size_t k = 0; k < h.size(); ++k) out[k] = (h[k] - mu) / sigma;
  return out;
}

std::vector<double> cln_pair(const GridModel& model, const std::vector<double>& h_i,
                             const std::vector<double>& h_j, ForwardDiagnostics* diag) {
  const int d_h = model.config().d_h;
  if (static_cast<int>(h_i.size()) != d_h || static_cast<int>(h_j.size()) != d_h)
    throw RangeError("cln inputs must have length d_h");
  std::vector<double> gamma(d_h), lam(d_h);
  affine(model.cln_wg.w, model.cln_bg.w, h_i.data(), d_h, d_h, gamma.data());
  affine(model.cln_wl.w, model.cln_bl.w, h_i.data(), d_h, d_h, lam.data());
  std::vector<double> core = cln_core(h_j, diag);
  std::vector<double> out(d_h);
  for (int k = 0; k < d_h; ++k) out[size_t(k)] = gamma[size_t(k)] * core[size_t(k)] + lam[size_t(k)];
  return out;
}

namespace {

// Rebuilds the CLN + MLP_1 stage from an externally supplied H (the staged
// public path shares the math with forward() but cannot reuse its trace).
std::vector<double> features_from_h(const GridModel& model, const std::vector<double>& H,
                                    int n) {
  const ModelConfig& cfg = model.config();
  const int d_h = cfg.d_h, d_c = cfg.d_c, d_ed = cfg.d_ed, d_et = cfg.d_et;
  if (H.size() != size_t(n) * d_h) throw RangeError("H has the wrong shape");
  const int feat_dim = d_h + d_ed + d_et;
  std::vector<double> gamma(size_t(n) * d_h), lam(size_t(n) * d_h), norm(size_t(n) * d_h);
  for (int i = 0; i < n; ++i) {
    affine(model.cln_wg.w, model.cln_bg.w, H.data() + size_t(i) * d_h, d_h, d_h,
           gamma.data() + size_t(i) * d_h);
    affine(model.cln_wl.w, model.cln_bl.w, H.data() + size_t(i) * d_h, d_h, d_h,
           lam.data() + size_t(i) * d_h);
    std::vector<double> h(H.begin() + size_t(i) * d_h, H.begin() + size_t(i + 1) * d_h);
    std::vector<double> core = cln_core(h);
    std::copy(core.begin(), core.end(), norm.begin() + size_t(i) * d_h);
  }
  std::vector<double> C(size_t(n) * n * d_c);
  std::vector<double> feat(feat_dim), pre(d_c);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < d_h; ++k)
        feat[size_t(k)] = gamma[size_t(i) * d_h + k] * norm[size_t(j) * d_h + k] +
                          lam[size_t(i) * d_h + k];
      const double* de = model.dist_emb.w.data() + size_t(distance_bucket(j - i)) * d_ed;
      std::copy_n(de, d_ed, feat.data() + d_h);
      const double* re =
          model.region_emb.w.data() + size_t(j > i ? kRegionUpper : kRegionLower) * d_et;
      std::copy_n(re, d_et, feat.data() + d_h + d_ed);
      affine(model.mlp1_w.w, model.mlp1_b.w, feat.data(), feat_dim, d_c, pre.data());
      for (int c = 0; c < d_c; ++c) C[(size_t(i) * n + j) * d_c + c] = gelu(pre[size_t(c)]);
    }
  }
  return C;
}

}  // namespace

std::vector<double> grid_features(const GridModel& model, const std::vector<double>& H, int n) {
  return features_from_h(model, H, n);
}

std::vector<double> conv_stack(const GridModel& model, const std::vector<double>& C, int n) {
  const ModelConfig& cfg = model.config();
  const int d_c = cfg.d_c;
  const int L = static_cast<int>(cfg.dilations.size());
  if (C.size() != size_t(n) * n * d_c) throw RangeError("C has the wrong shape");
  std::vector<double> Q(size_t(n) * n * L * d_c, 0.0);
  for (int l = 0; l < L; ++l) {
    const int dil = cfg.dilations[size_t(l)];
    const Param& kw = model.conv_w[size_t(l)];
    const Param& kb = model.conv_b[size_t(l)];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int o = 0; o < d_c; ++o) {
          double acc = kb.w[size_t(o)];
          for (int di = 0; di < 3; ++di) {
            const int ii = i + (di - 1) * dil;
            if (ii < 0 || ii >= n) continue;
            for (int dj = 0; dj < 3; ++dj) {
              const int jj = j + (dj - 1) * dil;
              if (jj < 0 || jj >= n) continue;
              const double* src = C.data() + (size_t(ii) * n + jj) * d_c;
              const double* krow = kw.w.data() + ((size_t(o) * d_c) * 9) + size_t(di) * 3 + dj;
              for (int c = 0; c < d_c; ++c) acc += krow[size_t(c) * 9] * src[c];
            }
          }
          Q[(size_t(i) * n + j) * size_t(L) * d_c + size_t(l) * d_c + o] = gelu(acc);
        }
      }
    }
  }
  return Q;
}

std::vector<double> co_predict(const GridModel& model, const std::vector<double>& Q,
                               const std::vector<double>& H, int n) {
  const ModelConfig& cfg = model.config();
  const int d_h = cfg.d_h, d_c = cfg.d_c;
  const int L = static_cast<int>(cfg.dilations.size());
  const int T = model.num_tags();
  if (Q.size() != size_t(n) * n * L * d_c) throw RangeError("Q has the wrong shape");
  if (H.size() != size_t(n) * d_h) throw RangeError("H has the wrong shape");

  std::vector<double> s(size_t(n) * d_c), o(size_t(n) * d_c), pre(d_c);
  for (int i = 0; i < n; ++i) {
    affine(model.mlp3_w.w, model.mlp3_b.w, H.data() + size_t(i) * d_h, d_h, d_c, pre.data());
    for (int a = 0; a < d_c; ++a) s[size_t(i) * d_c + a] = gelu(pre[size_t(a)]);
    affine(model.mlp4_w.w, model.mlp4_b.w, H.data() + size_t(i) * d_h, d_h, d_c, pre.data());
    for (int a = 0; a < d_c; ++a) o[size_t(i) * d_c + a] = gelu(pre[size_t(a)]);
  }
  std::vector<double> Y(size_t(n) * n * T);
  std::vector<double> y1(T), su(size_t(T) * d_c);
  for (int i = 0; i < n; ++i) {
    std::fill(su.begin(), su.end(), 0.0);
    for (int a = 0; a < d_c; ++a) {
      const double sa = s[size_t(i) * d_c + a];
      const double* urow = model.bi_u.w.data() + size_t(a) * T * d_c;
      for (int tb = 0; tb < T * d_c; ++tb) su[size_t(tb)] += sa * urow[tb];
    }
    for (int j = 0; j < n; ++j) {
      const size_t cell = size_t(i) * n + j;
      affine(model.mlp2_w.w, model.mlp2_b.w, Q.data() + cell * size_t(L) * d_c, L * d_c, T,
             y1.data());
      double* y = Y.data() + cell * T;
      double mx = -1e300;
      for (int tt = 0; tt < T; ++tt) {
        double acc = y1[size_t(tt)] + model.bi_b.w[size_t(tt)];
        const double* wrow = model.bi_w.w.data() + size_t(tt) * 2 * d_c;
        const double* su_row = su.data() + size_t(tt) * d_c;
        for (int a = 0; a < d_c; ++a) {
          acc += wrow[a] * s[size_t(i) * d_c + a];
          acc += wrow[d_c + a] * o[size_t(j) * d_c + a];
          acc += su_row[a] * o[size_t(j) * d_c + a];
        }
        y[tt] = acc;
        mx = std::max(mx, acc);
      }
      double z = 0.0;
      for (int tt = 0; tt < T; ++tt) {
        y[tt] = std::exp(y[tt] - mx);
        z += y[tt];
      }
      for (int tt = 0; tt < T; ++tt) y[tt] /= z;
    }
  }
  return Y;
}

PredictResult predict(const GridModel& model, const Sample& sample) {
  std::vector<int> ids = model.vocab().lookup_all(sample.tokens);
  Trace t = forward(model, ids);
  const int n = t.n;
  const int T = model.num_tags();
  PredictResult result;
  result.grid = TagGrid(sample.id, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double* y = t.Y.data() + (size_t(i) * n + j) * T;
      int best = 0;
      for (int tt = 1; tt < T; ++tt)
        if (y[tt] > y[best]) best = tt;
      if (best != TagScheme::kNone && !model.scheme().placement_ok(i, j, best)) {
        result.repaired_cells++;
        best = TagScheme::kNone;
      }
      result.grid.set(i, j, best);
    }
  }
  return result;
}

GradCheckReport gradient_check(GridModel& model, const std::vector<int>& ids,
                               const TagGrid& gold, double step, size_t coordinate_cap) {
  for (Param* p : model.params()) p->zero_grad();
  Trace t = forward(model, ids);
  loss_and_backward(model, t, gold);

  auto loss_at = [&]() {
    Trace tt = forward(model, ids);
    return cell_loss(tt.Y, gold, model.num_tags(), model.config().none_weight);
  };

  GradCheckReport report;
  for (Param* p : model.params()) {
    GradCheckReport::Group group;
    group.name = p->name;
    const size_t count =
        coordinate_cap == 0 ? p->size() : std::min(coordinate_cap, p->size());
    // With a cap, stride evenly through the tensor instead of prefixing.
    const size_t stride = std::max<size_t>(1, p->size() / std::max<size_t>(count, 1));
    for (size_t k = 0, seen = 0; k < p->size() && seen < count; k += stride, ++seen) {
      const double keep = p->w[k];
      p->w[k] = keep + step;
      const double up = loss_at();
      p->w[k] = keep - step;
      const double down = loss_at();
      p->w[k] = keep;
      const double fd = (up - down) / (2.0 * step);
      const double analytic = p->g[k];
      const double denom = std::max({std::abs(fd), std::abs(analytic), kGradCheckFloor});
      const double rel = std::abs(fd - analytic) / denom;
      if (rel > group.max_rel_error) {
        group.max_rel_error = rel;
        group.worst_index = k;
        group.worst_analytic = analytic;
        group.worst_fd = fd;
      }
      group.checked++;
    }
    report.max_rel_error = std::max(report.max_rel_error, group.max_rel_error);
    report.groups.push_back(std::move(group));
  }
  return report;
}

ModelConfig ModelConfig::from_key_values(const std::map<std::string, std::string>& kv) {
  ModelConfig cfg;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto to_int = [](const std::string& s, const char* key) {
    try {
      size_t pos = 0;
      int v = std::stoi(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad integer for ") + key + ": '" + s + "'");
    }
  };
  auto to_double = [](const std::string& s, const char* key) {
    try {
      size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad number for ") + key + ": '" + s + "'");
    }
  };
  if (auto* v = get("d_h")) cfg.d_h = to_int(*v, "d_h");
  if (auto* v = get("d_ed")) cfg.d_ed = to_int(*v, "d_ed");
  if (auto* v = get("d_et")) cfg.d_et = to_int(*v, "d_et");
  if (auto* v = get("d_c")) cfg.d_c = to_int(*v, "d_c");
  if (auto* v = get("dilations")) {
    cfg.dilations.clear();
    std::istringstream ss(*v);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) cfg.dilations.push_back(to_int(part, "dilations"));
  }
  if (auto* v = get("dropout")) cfg.dropout = to_double(*v, "dropout");
  if (auto* v = get("lr_encoder")) cfg.lr_encoder = to_double(*v, "lr_encoder");
  if (auto* v = get("lr_other")) cfg.lr_other = to_double(*v, "lr_other");
  if (auto* v = get("weight_decay")) cfg.weight_decay = to_double(*v, "weight_decay");
  if (auto* v = get("warm_factor")) cfg.warm_factor = to_double(*v, "warm_factor");
  if (auto* v = get("batch_size")) cfg.batch_size = to_int(*v, "batch_size");
  if (auto* v = get("epochs")) cfg.epochs = to_int(*v, "epochs");
  if (auto* v = get("seed")) {
    try {
      size_t pos = 0;
      cfg.seed = std::stoull(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument(*v);
    } catch (const std::exception&) {
      throw ConfigError("bad integer for seed: '" + *v + "'");
    }
  }
  if (auto* v = get("none_weight")) cfg.none_weight = to_double(*v, "none_weight");
  if (auto* v = get("tag_mode")) cfg.tag_mode = tag_mode_from_string(*v);
  cfg.validate();
  return cfg;
}

}  // namespace seda
