#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsg/graph.hpp"
#include "hsg/splitter.hpp"

namespace hsg {

struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(size_t(r) * c, 0.0) {}

  double &at(int r, int c) { return data[size_t(r) * cols + c]; }
  double at(int r, int c) const { return data[size_t(r) * cols + c]; }
  double *row(int r) { return data.data() + size_t(r) * cols; }
  const double *row(int r) const { return data.data() + size_t(r) * cols; }
  void zero() { std::fill(data.begin(), data.end(), 0.0); }
};

/// Flat node indexing over an embedded graph for message passing: literal
/// nodes first, then alive clause nodes in id order, then community nodes.
struct GnnGraph {
  int n = 0;
  std::vector<NodeKind> kinds;
  std::vector<std::vector<int>> adj; // undirected, no self-loops
  std::vector<int> clause_row;       // clause id -> row, -1 when dead
  std::vector<int> row_clause;       // row -> clause id, -1 otherwise
};

GnnGraph make_gnn_graph(const EmbeddedGraph &g);

/// Length-4 one-hot rows: positive literal, negative literal, clause,
/// community.
Matrix node_features(const GnnGraph &g);
Matrix node_features(const EmbeddedGraph &g);

enum class Backbone { GCN, SAGE };

struct GnnLayer {
  Matrix w;               // GCN: dim x dim; SAGE: 2*dim x dim
  Matrix q;               // SAGE neighbor transform, dim x dim
  std::vector<double> qb; // SAGE neighbor bias
};

/// Two-tower-free pair scorer: one shared encoder, inner-product decoder.
struct PairScorer {
  Backbone backbone = Backbone::GCN;
  Matrix embed_w;              // 4 x dim
  std::vector<double> embed_b; // dim
  std::vector<GnnLayer> layers;

  int dim() const { return embed_w.cols; }
  int num_layers() const { return static_cast<int>(layers.size()); }
};

inline constexpr int kGnnDim = 32;
inline constexpr int kGnnLayers = 3;

/// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) init, seeded.
PairScorer init_scorer(Backbone backbone, uint64_t seed,
                       int num_layers = kGnnLayers, int dim = kGnnDim);

/// Layer activations kept for backprop.
struct ForwardCache {
  Matrix features;
  Matrix h0; // embed output
  struct LayerCache {
    Matrix hprop; // GCN: normalized-propagated input
    Matrix z, r;  // SAGE: neighbor pre/post ReLU
    Matrix nbr;   // SAGE: mean-aggregated neighbor term
    Matrix cat;   // SAGE: [h | nbr]
    Matrix s;     // pre-activation of the layer output
  };
  std::vector<LayerCache> layers;
  Matrix h_final;
};

/// Symmetric-normalized propagation with self-loops, three ReLU layers.
Matrix gcn_forward(const PairScorer &scorer, const GnnGraph &g,
                   const Matrix &features, ForwardCache *cache = nullptr);
/// Mean-aggregator GraphSAGE; isolated nodes aggregate a zero vector.
Matrix sage_forward(const PairScorer &scorer, const GnnGraph &g,
                    const Matrix &features, ForwardCache *cache = nullptr);
/// Dispatches on scorer.backbone, including the embedding layer.
Matrix scorer_forward(const PairScorer &scorer, const GnnGraph &g,
                      ForwardCache *cache = nullptr);

/// Gradients shaped like the scorer parameters.
PairScorer zeros_like(const PairScorer &scorer);

/// Backpropagates d(loss)/d(embeddings) through the cached forward pass,
/// accumulating parameter gradients into `grads`.
void scorer_backward(const PairScorer &scorer, const GnnGraph &g,
                     const ForwardCache &cache, const Matrix &d_h,
                     PairScorer &grads);

double sigmoid(double x);
/// sigma(h_u . h_v)
double pair_score(const Matrix &h, int u, int v);

/// Mean positive log-loss plus mean negative log-loss, probabilities clamped
/// to [1e-12, 1-1e-12]. Throws on an empty side.
double bce_loss(std::span<const double> pos_scores,
                std::span<const double> neg_scores);

/// Mann-Whitney AUC with tie correction.
double auc_score(std::span<const double> pos, std::span<const double> neg);
/// Accuracy at threshold 0.5 (positive prediction iff score > 0.5).
double acc_score(std::span<const double> pos, std::span<const double> neg);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.001;
  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  int batch_size = 32;
  double test_fraction = 0.1;
  bool resample_negatives = false; // redraw v_neg each epoch
  uint64_t seed = 0;
};

struct EpochStats {
  int epoch; // 1-based
  double loss;
  double train_auc, train_acc;
  double test_auc, test_acc;
};

struct TrainResult {
  PairScorer model;
  std::vector<EpochStats> curve;
};

/// Trains one stage's scorer on the tuples of that stage across the corpus.
/// Snapshots are replayed lazily from each bundle's trace.
TrainResult train_stage(std::span<const TemplateBundle> corpus,
                        SplitStage stage, Backbone backbone,
                        const TrainConfig &cfg);

/// Trains the in-community and cross-community scorers under one paradigm
/// with separately constructed data.
std::pair<TrainResult, TrainResult>
train_scorers(std::span<const TemplateBundle> corpus, Backbone backbone,
              const TrainConfig &cfg);

/// "epoch,loss,train_auc,train_acc,test_auc,test_acc" rows.
std::string curve_csv(const std::vector<EpochStats> &curve);

/// One CSV row per alive clause node: id plus its final-layer embedding.
std::string dump_clause_features(const PairScorer &scorer,
                                 const EmbeddedGraph &g);

void write_weights_file(const PairScorer &scorer, const std::string &path);
PairScorer read_weights_file(const std::string &path);

} // namespace hsg
