#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seda/grid.hpp"
#include "seda/rng.hpp"
#include "seda/types.hpp"

namespace seda {

// Hyperparameters. Defaults are the toy scale; the full-scale analogue
// (d_h 768, d_ed/d_et 20, d_c 80) is far beyond what a self-contained CPU
// model is meant to reach.
struct ModelConfig {
  int d_h = 32;                      // contextual vector size
  int d_ed = 8;                      // distance embedding size
  int d_et = 4;                      // region embedding size
  int d_c = 16;                      // reduced grid channel size (also the
                                     // biaffine projection size)
  std::vector<int> dilations = {1, 2, 3};
  double dropout = 0.1;
  double lr_encoder = 0.3;           // embedding + context-mixer group
  double lr_other = 0.3;             // everything else
  double weight_decay = 0.0;
  double warm_factor = 0.0;          // fraction of steps spent in linear warmup
  int batch_size = 8;
  int epochs = 40;
  std::uint64_t seed = 42;
  double none_weight = 0.5;          // loss weight of the NONE class
  TagMode tag_mode = TagMode::Base;

  void validate() const;
  static ModelConfig from_key_values(const std::map<std::string, std::string>& kv);
};

// Signed log-scale distance buckets for E^d:
// {0, +/-1, +/-2, +/-3, +/-4..7, +/-8..15, +/-16..31, +/-32..63, +/-64+}.
constexpr int kDistanceBuckets = 17;
int distance_bucket(int j_minus_i);

// Grid regions for E^t: the diagonal counts as lower because THW lives at
// tail >= head.
constexpr int kRegionLower = 0;
constexpr int kRegionUpper = 1;

struct Vocab {
  std::vector<std::string> id_to_token{"<unk>"};
  std::map<std::string, int> token_to_id;

  static constexpr int kUnk = 0;
  int size() const { return static_cast<int>(id_to_token.size()); }
  int add(const std::string& token);
  int lookup(const std::string& token) const;
  std::vector<int> lookup_all(const std::vector<std::string>& tokens) const;
};

struct Param {
  std::string name;
  std::vector<int> shape;
  std::vector<double> w;
  std::vector<double> g;
  bool encoder_group = false;  // two-group learning-rate scheme

  size_t size() const { return w.size(); }
  void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }
};

// The full parameter set of Eqs. 2-7 plus the learned-embedding encoder that
// stands in for a pretrained model at this scale.
class GridModel {
 public:
  GridModel() = default;
  GridModel(ModelConfig config, Vocab vocab, TagScheme scheme);

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  const TagScheme& scheme() const { return scheme_; }
  int num_tags() const { return scheme_.num_tags(); }

  std::vector<Param*> params();
  std::vector<const Param*> params() const;
  Param* param(const std::string& name);

  // parameters ------------------------------------------------------------
  Param emb;                                   // V x d_h
  Param rnn_fw_w, rnn_fw_u, rnn_fw_b;          // d_h x d_h, d_h x d_h, d_h
  Param rnn_bw_w, rnn_bw_u, rnn_bw_b;
  Param proj_w, proj_b;                        // d_h x 2d_h, d_h
  Param cln_wg, cln_bg, cln_wl, cln_bl;        // gain/bias generators
  Param dist_emb;                              // kDistanceBuckets x d_ed
  Param region_emb;                            // 2 x d_et
  Param mlp1_w, mlp1_b;                        // d_c x (d_h+d_ed+d_et), d_c
  std::vector<Param> conv_w, conv_b;           // per dilation: d_c x d_c x 3 x 3
  Param mlp2_w, mlp2_b;                        // T x (L*d_c), T
  Param mlp3_w, mlp3_b, mlp4_w, mlp4_b;        // d_c x d_h, d_c
  Param bi_u;                                  // d_c x T x d_c
  Param bi_w;                                  // T x 2d_c
  Param bi_b;                                  // T

  long parameter_count() const;

 private:
  ModelConfig config_;
  Vocab vocab_;
  TagScheme scheme_;

  // params() assembles the registry on demand; caching pointers to our own
  // members would dangle across copies and moves.
  void allocate_params();
  void init_weights();
};

// Sigma-clamp events and other numeric diagnostics collected per forward.
struct ForwardDiagnostics {
  long sigma_clamped = 0;
};

// All intermediate activations of one forward pass; the backward pass
// consumes them. Layouts are row-major with the documented index order.
struct Trace {
  int n = 0;
  bool training = false;
  std::vector<int> ids;
  std::vector<double> x;         // n x d_h (embedded)
  std::vector<double> fw_h;      // n x d_h (post-tanh)
  std::vector<double> bw_h;      // n x d_h
  std::vector<double> h_raw;     // n x d_h (projection output)
  std::vector<double> drop_h;    // dropout mask on H
  std::vector<double> H;         // n x d_h
  std::vector<double> gamma;     // n x d_h (per conditioning token i)
  std::vector<double> lam;       // n x d_h
  std::vector<double> mu;        // n (element mean of h_j)
  std::vector<double> sigma;     // n (element std, before clamping)
  std::vector<double> sigma_eff; // n (after clamping)
  std::vector<double> norm;      // n x d_h ((h_j - mu) / sigma_eff)
  std::vector<double> c_pre;     // n*n x d_c (MLP_1 pre-activation)
  std::vector<double> drop_c;
  std::vector<double> C;         // n*n x d_c
  std::vector<std::vector<double>> q_pre;  // per dilation, n*n x d_c
  std::vector<double> drop_q;
  std::vector<double> Q;         // n*n x (L*d_c)
  std::vector<double> y1;        // n*n x T
  std::vector<double> s_pre, s;  // n x d_c
  std::vector<double> o_pre, o;  // n x d_c
  std::vector<double> su;        // n x T x d_c (s_i^T U, cached for backward)
  std::vector<double> y2;        // n*n x T
  std::vector<double> Y;         // n*n x T (softmax probabilities)
  ForwardDiagnostics diag;
};

// Runs the full pipeline Eqs. 2-7 over token ids. With training=true,
// dropout masks are drawn from `rng` (required); in eval mode the pass is a
// deterministic function of (parameters, ids).
Trace forward(const GridModel& model, const std::vector<int>& ids, bool training = false,
              Rng* rng = nullptr);

// Weighted mean cell cross-entropy of probabilities Y against the gold grid.
double cell_loss(const std::vector<double>& Y, const TagGrid& gold, int num_tags,
                 double none_weight = 1.0);

// Loss plus gradient accumulation into every parameter's .g.
double loss_and_backward(GridModel& model, const Trace& trace, const TagGrid& gold);

// --- staged public operations (eval mode), used directly and by tests -----

// Contextual token vectors H (n x d_h, row-major). Empty input is an error.
std::vector<double> encode_tokens(const GridModel& model, const std::vector<int>& ids);

// Conditional layer normalization of h_j with gain/bias generated from h_i.
std::vector<double> cln_pair(const GridModel& model, const std::vector<double>& h_i,
                             const std::vector<double>& h_j,
                             ForwardDiagnostics* diag = nullptr);
// The normalized core (h - mu) / max(sigma, eps) alone.
std::vector<double> cln_core(const std::vector<double>& h, ForwardDiagnostics* diag = nullptr);

// Position-region-aware grid representation C (n*n x d_c).
std::vector<double> grid_features(const GridModel& model, const std::vector<double>& H, int n);

// Dilated convolution stack Q (n*n x L*d_c).
std::vector<double> conv_stack(const GridModel& model, const std::vector<double>& C, int n);

// Per-cell tag distributions Y (n*n x T).
std::vector<double> co_predict(const GridModel& model, const std::vector<double>& Q,
                               const std::vector<double>& H, int n);

constexpr double kClnSigmaEps = 1e-6;

struct PredictResult {
  TagGrid grid;
  long repaired_cells = 0;  // argmax tags outside their legal triangle
};

// Argmax tag per cell followed by invariant repair. Deterministic.
PredictResult predict(const GridModel& model, const Sample& sample);

struct GradCheckReport {
  struct Group {
    std::string name;
    double max_rel_error = 0.0;
    size_t checked = 0;
    size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_fd = 0.0;
  };
  std::vector<Group> groups;
  double max_rel_error = 0.0;
};

// Relative error compares |analytic - fd| against max(|analytic|, |fd|,
// kGradCheckFloor). The floor makes the ratio absolute below a quarter of
// the loss scale (the loss is an O(1) mean NLL): central differences at a
// fixed step carry O(step^2) truncation noise, which would otherwise
// dominate the ratio on near-zero gradients no matter how exact the
// analytic side is.
constexpr double kGradCheckFloor = 0.25;

// Central finite differences against the analytic gradients over every
// parameter group. `coordinate_cap` limits coordinates per group (0 = all).
GradCheckReport gradient_check(GridModel& model, const std::vector<int>& ids,
                               const TagGrid& gold, double step = 1e-3,
                               size_t coordinate_cap = 0);

}  // namespace seda
