#include "hsg/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hsg/rng.hpp"

namespace hsg {

// ---------------------------------------------------------------------------
// Graph adapter and features

GnnGraph make_gnn_graph(const EmbeddedGraph &g) {
  GnnGraph out;
  int nl = 2 * g.num_vars;
  std::vector<int> alive = g.alive_clause_ids();
  out.n = nl + static_cast<int>(alive.size()) + g.num_communities;
  out.kinds.resize(out.n);
  out.adj.assign(out.n, {});
  out.clause_row.assign(g.clause_nodes.size(), -1);
  out.row_clause.assign(out.n, -1);

  for (int ln = 0; ln < nl; ++ln)
    out.kinds[ln] = (ln % 2) ? NodeKind::NegLit : NodeKind::PosLit;
  for (size_t i = 0; i < alive.size(); ++i) {
    int row = nl + static_cast<int>(i);
    out.kinds[row] = NodeKind::Clause;
    out.clause_row[alive[i]] = row;
    out.row_clause[row] = alive[i];
  }
  int cmty_base = nl + static_cast<int>(alive.size());
  for (int c = 0; c < g.num_communities; ++c)
    out.kinds[cmty_base + c] = NodeKind::Community;

  for (int id : alive) {
    int crow = out.clause_row[id];
    for (int l : g.clause_nodes[id].lits) {
      int ln = lit_node(l);
      out.adj[ln].push_back(crow);
      out.adj[crow].push_back(ln);
    }
  }
  for (int c = 0; c < g.num_communities; ++c)
    for (int v : g.cmty_vars[c])
      for (int ln : {lit_node(v), lit_node(-v)}) {
        out.adj[ln].push_back(cmty_base + c);
        out.adj[cmty_base + c].push_back(ln);
      }
  return out;
}

Matrix node_features(const GnnGraph &g) {
  Matrix x(g.n, 4);
  for (int i = 0; i < g.n; ++i)
    x.at(i, static_cast<int>(g.kinds[i])) = 1.0;
  return x;
}

Matrix node_features(const EmbeddedGraph &g) {
  return node_features(make_gnn_graph(g));
}

// ---------------------------------------------------------------------------
// Dense kernels

namespace {

// out = a * b
Matrix matmul(const Matrix &a, const Matrix &b) {
  if (a.cols != b.rows)
    throw std::invalid_argument("matmul: dimension mismatch");
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double *ar = a.row(i);
    double *orow = out.row(i);
    for (int k = 0; k < a.cols; ++k) {
      double av = ar[k];
      if (av == 0.0)
        continue;
      const double *br = b.row(k);
      for (int j = 0; j < b.cols; ++j)
        orow[j] += av * br[j];
    }
  }
  return out;
}

// out += a^T * b
void matmul_tn_acc(const Matrix &a, const Matrix &b, Matrix &out) {
  for (int i = 0; i < a.rows; ++i) {
    const double *ar = a.row(i);
    const double *br = b.row(i);
    for (int k = 0; k < a.cols; ++k) {
      double av = ar[k];
      if (av == 0.0)
        continue;
      double *orow = out.row(k);
      for (int j = 0; j < b.cols; ++j)
        orow[j] += av * br[j];
    }
  }
}

// out = a * b^T
Matrix matmul_nt(const Matrix &a, const Matrix &b) {
  if (a.cols != b.cols)
    throw std::invalid_argument("matmul_nt: dimension mismatch");
  Matrix out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double *ar = a.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const double *br = b.row(j);
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k)
        s += ar[k] * br[k];
      out.at(i, j) = s;
    }
  }
  return out;
}

Matrix relu(const Matrix &a) {
  Matrix out = a;
  for (double &x : out.data)
    x = x > 0.0 ? x : 0.0;
  return out;
}

// dS = dH' masked by the sign of the pre-activation S.
Matrix relu_backward(const Matrix &d_out, const Matrix &pre) {
  Matrix d = d_out;
  for (size_t i = 0; i < d.data.size(); ++i)
    if (pre.data[i] <= 0.0)
      d.data[i] = 0.0;
  return d;
}

void add_row_bias(Matrix &m, const std::vector<double> &b) {
  for (int i = 0; i < m.rows; ++i) {
    double *r = m.row(i);
    for (int j = 0; j < m.cols; ++j)
      r[j] += b[j];
  }
}

// D^-1/2 (A+I) D^-1/2 * h
Matrix gcn_propagate(const GnnGraph &g, const Matrix &h) {
  Matrix out(h.rows, h.cols);
  std::vector<double> inv_sqrt(g.n);
  for (int i = 0; i < g.n; ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(double(g.adj[i].size()) + 1.0);
  for (int u = 0; u < g.n; ++u) {
    double *orow = out.row(u);
    const double *self = h.row(u);
    double cself = inv_sqrt[u] * inv_sqrt[u];
    for (int j = 0; j < h.cols; ++j)
      orow[j] += cself * self[j];
    for (int v : g.adj[u]) {
      double c = inv_sqrt[u] * inv_sqrt[v];
      const double *hv = h.row(v);
      for (int j = 0; j < h.cols; ++j)
        orow[j] += c * hv[j];
    }
  }
  return out;
}

// Mean over neighbors; zero vector for isolated nodes.
Matrix sage_aggregate(const GnnGraph &g, const Matrix &r) {
  Matrix out(r.rows, r.cols);
  for (int u = 0; u < g.n; ++u) {
    if (g.adj[u].empty())
      continue;
    double *orow = out.row(u);
    for (int v : g.adj[u]) {
      const double *rv = r.row(v);
      for (int j = 0; j < r.cols; ++j)
        orow[j] += rv[j];
    }
    double inv = 1.0 / double(g.adj[u].size());
    for (int j = 0; j < r.cols; ++j)
      orow[j] *= inv;
  }
  return out;
}

// Transpose of sage_aggregate: d_r[v] += sum_{u adj v} d_n[u] / deg(u).
Matrix sage_aggregate_backward(const GnnGraph &g, const Matrix &d_n) {
  Matrix out(d_n.rows, d_n.cols);
  for (int u = 0; u < g.n; ++u) {
    if (g.adj[u].empty())
      continue;
    double inv = 1.0 / double(g.adj[u].size());
    const double *dn = d_n.row(u);
    for (int v : g.adj[u]) {
      double *orow = out.row(v);
      for (int j = 0; j < d_n.cols; ++j)
        orow[j] += inv * dn[j];
    }
  }
  return out;
}

Matrix concat_cols(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows, a.cols + b.cols);
  for (int i = 0; i < a.rows; ++i) {
    std::copy(a.row(i), a.row(i) + a.cols, out.row(i));
    std::copy(b.row(i), b.row(i) + b.cols, out.row(i) + a.cols);
  }
  return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Scorer init / forward / backward

PairScorer init_scorer(Backbone backbone, uint64_t seed, int num_layers,
                       int dim) {
  Rng rng(seed);
  auto fill = [&rng](std::vector<double> &v, int fan_in) {
    double bound = 1.0 / std::sqrt(double(fan_in));
    for (double &x : v)
      x = (2.0 * rng.real01() - 1.0) * bound;
  };
  PairScorer s;
  s.backbone = backbone;
  s.embed_w = Matrix(4, dim);
  fill(s.embed_w.data, 4);
  s.embed_b.assign(dim, 0.0);
  fill(s.embed_b, 4);
  s.layers.resize(num_layers);
  for (auto &l : s.layers) {
    if (backbone == Backbone::GCN) {
      l.w = Matrix(dim, dim);
      fill(l.w.data, dim);
    } else {
      l.q = Matrix(dim, dim);
      fill(l.q.data, dim);
      l.qb.assign(dim, 0.0);
      fill(l.qb, dim);
      l.w = Matrix(2 * dim, dim);
      fill(l.w.data, 2 * dim);
    }
  }
  return s;
}

Matrix gcn_forward(const PairScorer &scorer, const GnnGraph &g,
                   const Matrix &features, ForwardCache *cache) {
  Matrix h = matmul(features, scorer.embed_w);
  add_row_bias(h, scorer.embed_b);
  if (cache) {
    cache->features = features;
    cache->h0 = h;
    cache->layers.assign(scorer.layers.size(), {});
  }
  for (size_t l = 0; l < scorer.layers.size(); ++l) {
    Matrix hp = gcn_propagate(g, h);
    Matrix s = matmul(hp, scorer.layers[l].w);
    if (cache) {
      cache->layers[l].hprop = hp;
      cache->layers[l].s = s;
    }
    h = relu(s);
  }
  if (cache)
    cache->h_final = h;
  return h;
}

Matrix sage_forward(const PairScorer &scorer, const GnnGraph &g,
                    const Matrix &features, ForwardCache *cache) {
  Matrix h = matmul(features, scorer.embed_w);
  add_row_bias(h, scorer.embed_b);
  if (cache) {
    cache->features = features;
    cache->h0 = h;
    cache->layers.assign(scorer.layers.size(), {});
  }
  for (size_t l = 0; l < scorer.layers.size(); ++l) {
    const GnnLayer &ly = scorer.layers[l];
    Matrix z = matmul(h, ly.q);
    add_row_bias(z, ly.qb);
    Matrix r = relu(z);
    Matrix nbr = sage_aggregate(g, r);
    Matrix cat = concat_cols(h, nbr);
    Matrix s = matmul(cat, ly.w);
    if (cache) {
      auto &lc = cache->layers[l];
      lc.z = z;
      lc.r = r;
      lc.nbr = nbr;
      lc.cat = cat;
      lc.s = s;
    }
    h = relu(s);
  }
  if (cache)
    cache->h_final = h;
  return h;
}

Matrix scorer_forward(const PairScorer &scorer, const GnnGraph &g,
                      ForwardCache *cache) {
  Matrix x = node_features(g);
  return scorer.backbone == Backbone::GCN ? gcn_forward(scorer, g, x, cache)
                                          : sage_forward(scorer, g, x, cache);
}

PairScorer zeros_like(const PairScorer &scorer) {
  PairScorer z = scorer;
  z.embed_w.zero();
  std::fill(z.embed_b.begin(), z.embed_b.end(), 0.0);
  for (auto &l : z.layers) {
    l.w.zero();
    l.q.zero();
    std::fill(l.qb.begin(), l.qb.end(), 0.0);
  }
  return z;
}

void scorer_backward(const PairScorer &scorer, const GnnGraph &g,
                     const ForwardCache &cache, const Matrix &d_h,
                     PairScorer &grads) {
  Matrix d = d_h;
  for (int l = scorer.num_layers() - 1; l >= 0; --l) {
    const GnnLayer &ly = scorer.layers[l];
    const auto &lc = cache.layers[l];
    Matrix d_s = relu_backward(d, lc.s);
    if (scorer.backbone == Backbone::GCN) {
      matmul_tn_acc(lc.hprop, d_s, grads.layers[l].w);
      Matrix d_hp = matmul_nt(d_s, ly.w);
      d = gcn_propagate(g, d_hp); // propagation operator is symmetric
    } else {
      matmul_tn_acc(lc.cat, d_s, grads.layers[l].w);
      Matrix d_cat = matmul_nt(d_s, ly.w);
      // Split the concat gradient.
      int dim = scorer.dim();
      Matrix d_hin(d_cat.rows, dim), d_nbr(d_cat.rows, dim);
      for (int i = 0; i < d_cat.rows; ++i) {
        std::copy(d_cat.row(i), d_cat.row(i) + dim, d_hin.row(i));
        std::copy(d_cat.row(i) + dim, d_cat.row(i) + 2 * dim, d_nbr.row(i));
      }
      Matrix d_r = sage_aggregate_backward(g, d_nbr);
      Matrix d_z = relu_backward(d_r, lc.z);
      // Layer input: the embedding for l = 0, ReLU of the previous layer's
      // pre-activation otherwise.
      Matrix h_prev = l == 0 ? cache.h0 : relu(cache.layers[l - 1].s);
      matmul_tn_acc(h_prev, d_z, grads.layers[l].q);
      for (int i = 0; i < d_z.rows; ++i)
        for (int j = 0; j < d_z.cols; ++j)
          grads.layers[l].qb[j] += d_z.at(i, j);
      d = d_hin;
      Matrix d_from_q = matmul_nt(d_z, ly.q);
      for (size_t i = 0; i < d.data.size(); ++i)
        d.data[i] += d_from_q.data[i];
    }
  }
  // Embedding layer.
  matmul_tn_acc(cache.features, d, grads.embed_w);
  for (int i = 0; i < d.rows; ++i)
    for (int j = 0; j < d.cols; ++j)
      grads.embed_b[j] += d.at(i, j);
}

double sigmoid(double x) {
  if (x >= 0.0)
    return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double pair_score(const Matrix &h, int u, int v) {
  const double *a = h.row(u);
  const double *b = h.row(v);
  double s = 0.0;
  for (int j = 0; j < h.cols; ++j)
    s += a[j] * b[j];
  return sigmoid(s);
}

double bce_loss(std::span<const double> pos_scores,
                std::span<const double> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty())
    throw std::invalid_argument("bce_loss: empty pair set");
  auto clamp = [](double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); };
  double lp = 0.0, ln = 0.0;
  for (double p : pos_scores)
    lp -= std::log(clamp(p));
  for (double p : neg_scores)
    ln -= std::log(1.0 - clamp(p));
  return lp / double(pos_scores.size()) + ln / double(neg_scores.size());
}

double auc_score(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("auc_score: empty side");
  std::vector<std::pair<double, int>> all; // (score, is_pos)
  all.reserve(pos.size() + neg.size());
  for (double s : pos)
    all.push_back({s, 1});
  for (double s : neg)
    all.push_back({s, 0});
  std::sort(all.begin(), all.end(),
            [](auto &a, auto &b) { return a.first < b.first; });
  // Average ranks over ties.
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < all.size()) {
    size_t j = i;
    while (j < all.size() && all[j].first == all[i].first)
      ++j;
    double avg_rank = (double(i + 1) + double(j)) / 2.0; // 1-based
    for (size_t k = i; k < j; ++k)
      if (all[k].second)
        rank_sum_pos += avg_rank;
    i = j;
  }
  double p = double(pos.size()), n = double(neg.size());
  double u = rank_sum_pos - p * (p + 1.0) / 2.0;
  return u / (p * n);
}

double acc_score(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() && neg.empty())
    throw std::invalid_argument("acc_score: no scores");
  size_t correct = 0;
  for (double s : pos)
    correct += s > 0.5;
  for (double s : neg)
    correct += s <= 0.5;
  return double(correct) / double(pos.size() + neg.size());
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct ParamView {
  std::vector<std::vector<double> *> tensors;

  static ParamView of(PairScorer &s) {
    ParamView v;
    v.tensors.push_back(&s.embed_w.data);
    v.tensors.push_back(&s.embed_b);
    for (auto &l : s.layers) {
      if (s.backbone == Backbone::SAGE) {
        v.tensors.push_back(&l.q.data);
        v.tensors.push_back(&l.qb);
      }
      v.tensors.push_back(&l.w.data);
    }
    return v;
  }
};

class Adam {
public:
  Adam(PairScorer &model, const TrainConfig &cfg)
      : cfg_(cfg), m_(zeros_like(model)), v_(zeros_like(model)) {}

  void step(PairScorer &model, PairScorer &grads) {
    ++t_;
    auto pm = ParamView::of(model);
    auto pg = ParamView::of(grads);
    auto pmom = ParamView::of(m_);
    auto pvel = ParamView::of(v_);
    double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_));
    double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_));
    for (size_t ti = 0; ti < pm.tensors.size(); ++ti) {
      auto &p = *pm.tensors[ti];
      auto &g = *pg.tensors[ti];
      auto &m = *pmom.tensors[ti];
      auto &v = *pvel.tensors[ti];
      for (size_t i = 0; i < p.size(); ++i) {
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
        double mhat = m[i] / bc1;
        double vhat = v[i] / bc2;
        p[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
      }
    }
  }

private:
  TrainConfig cfg_;
  long t_ = 0;
  PairScorer m_, v_;
};

struct TupleRef {
  int item;  // index into corpus
  int index; // index into that bundle's tuples
};

// Scores every tuple with the current model, one forward pass per distinct
// (item, snapshot). Returns (pos_scores, neg_scores) in tuple order.
std::pair<std::vector<double>, std::vector<double>>
score_tuples(const PairScorer &model, std::span<const TemplateBundle> corpus,
             const std::vector<EmbeddedGraph> &originals,
             std::span<const TupleRef> refs) {
  std::vector<double> pos(refs.size()), neg(refs.size());
  std::map<std::pair<int, int>, std::vector<size_t>> groups;
  for (size_t i = 0; i < refs.size(); ++i) {
    const TrainTuple &t = corpus[refs[i].item].tuples[refs[i].index];
    groups[{refs[i].item, t.snapshot}].push_back(i);
  }
  for (auto &[key, members] : groups) {
    auto [item, snapshot] = key;
    EmbeddedGraph g =
        replay_forward(originals[item], corpus[item].trace, snapshot);
    GnnGraph gg = make_gnn_graph(g);
    Matrix h = scorer_forward(model, gg);
    for (size_t i : members) {
      const TrainTuple &t = corpus[refs[i].item].tuples[refs[i].index];
      pos[i] = pair_score(h, gg.clause_row[t.u_pos], gg.clause_row[t.v_pos]);
      neg[i] = pair_score(h, gg.clause_row[t.u_pos], gg.clause_row[t.v_neg]);
    }
  }
  return {pos, neg};
}

} // namespace

TrainResult train_stage(std::span<const TemplateBundle> corpus,
                        SplitStage stage, Backbone backbone,
                        const TrainConfig &cfg) {
  std::vector<TupleRef> refs;
  for (int item = 0; item < static_cast<int>(corpus.size()); ++item)
    for (int i = 0; i < static_cast<int>(corpus[item].tuples.size()); ++i)
      if (corpus[item].tuples[i].stage == stage)
        refs.push_back({item, i});
  if (refs.empty())
    throw std::invalid_argument("train_stage: no tuples for this stage");

  std::vector<EmbeddedGraph> originals;
  originals.reserve(corpus.size());
  for (const auto &bundle : corpus)
    originals.push_back(replay_inverse(bundle.graph, bundle.trace));

  Rng rng(cfg.seed);
  rng.shuffle(refs);
  size_t test_n = static_cast<size_t>(double(refs.size()) * cfg.test_fraction);
  if (test_n >= refs.size())
    test_n = refs.size() - 1;
  std::vector<TupleRef> test(refs.end() - test_n, refs.end());
  std::vector<TupleRef> train(refs.begin(), refs.end() - test_n);

  TrainResult result;
  result.model = init_scorer(backbone, rng.next_u64());
  Adam adam(result.model, cfg);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(train);
    double loss_sum = 0.0;
    size_t loss_count = 0;

    for (size_t begin = 0; begin < train.size(); begin += cfg.batch_size) {
      size_t end = std::min(train.size(), begin + cfg.batch_size);
      std::span<const TupleRef> batch(train.data() + begin, end - begin);
      double inv_p = 1.0 / double(batch.size());
      double inv_n = inv_p; // one stored negative per tuple

      PairScorer grads = zeros_like(result.model);
      double batch_loss = 0.0;
      std::map<std::pair<int, int>, std::vector<size_t>> groups;
      for (size_t i = 0; i < batch.size(); ++i) {
        const TrainTuple &t =
            corpus[batch[i].item].tuples[batch[i].index];
        groups[{batch[i].item, t.snapshot}].push_back(i);
      }
      for (auto &[key, members] : groups) {
        auto [item, snapshot] = key;
        EmbeddedGraph g =
            replay_forward(originals[item], corpus[item].trace, snapshot);
        GnnGraph gg = make_gnn_graph(g);
        ForwardCache cache;
        Matrix h = scorer_forward(result.model, gg, &cache);
        Matrix d_h(h.rows, h.cols);
        for (size_t bi : members) {
          TrainTuple t = corpus[batch[bi].item].tuples[batch[bi].index];
          if (cfg.resample_negatives) {
            Rng neg_rng(cfg.seed ^ (uint64_t(epoch) << 40) ^
                        (uint64_t(batch[bi].item) << 20) ^
                        uint64_t(batch[bi].index));
            if (auto nn =
                    sample_negative(g, t.u_pos, t.v_pos, t.stage, neg_rng))
              t.v_neg = *nn;
          }
          int u = gg.clause_row[t.u_pos];
          int vp = gg.clause_row[t.v_pos];
          int vn = gg.clause_row[t.v_neg];
          double sp = pair_score(h, u, vp);
          double sn = pair_score(h, u, vn);
          batch_loss -= std::log(std::clamp(sp, 1e-12, 1.0 - 1e-12)) * inv_p;
          batch_loss -=
              std::log(1.0 - std::clamp(sn, 1e-12, 1.0 - 1e-12)) * inv_n;
          double cp = (sp - 1.0) * inv_p;
          double cn = sn * inv_n;
          for (int j = 0; j < h.cols; ++j) {
            d_h.at(u, j) += cp * h.at(vp, j) + cn * h.at(vn, j);
            d_h.at(vp, j) += cp * h.at(u, j);
            d_h.at(vn, j) += cn * h.at(u, j);
          }
        }
        scorer_backward(result.model, gg, cache, d_h, grads);
      }
      adam.step(result.model, grads);
      loss_sum += batch_loss * double(batch.size());
      loss_count += batch.size();
    }

    auto [train_pos, train_neg] =
        score_tuples(result.model, corpus, originals, train);
    auto [test_pos, test_neg] =
        score_tuples(result.model, corpus, originals, test);
    EpochStats st;
    st.epoch = epoch;
    st.loss = loss_sum / double(loss_count);
    st.train_auc = auc_score(train_pos, train_neg);
    st.train_acc = acc_score(train_pos, train_neg);
    if (!test.empty()) {
      st.test_auc = auc_score(test_pos, test_neg);
      st.test_acc = acc_score(test_pos, test_neg);
    } else {
      st.test_auc = st.test_acc = 0.0;
    }
    result.curve.push_back(st);
  }
  return result;
}

std::pair<TrainResult, TrainResult>
train_scorers(std::span<const TemplateBundle> corpus, Backbone backbone,
              const TrainConfig &cfg) {
  TrainResult in = train_stage(corpus, SplitStage::in_cmty, backbone, cfg);
  TrainResult cross =
      train_stage(corpus, SplitStage::cross_cmty, backbone, cfg);
  return {std::move(in), std::move(cross)};
}

std::string curve_csv(const std::vector<EpochStats> &curve) {
  std::ostringstream out;
  out << "epoch,loss,train_auc,train_acc,test_auc,test_acc\n";
  char buf[200];
  for (const auto &st : curve) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g,%.9g\n", st.epoch,
                  st.loss, st.train_auc, st.train_acc, st.test_auc,
                  st.test_acc);
    out << buf;
  }
  return out.str();
}

std::string dump_clause_features(const PairScorer &scorer,
                                 const EmbeddedGraph &g) {
  GnnGraph gg = make_gnn_graph(g);
  Matrix h = scorer_forward(scorer, gg);
  std::ostringstream out;
  char buf[40];
  for (int row = 0; row < gg.n; ++row) {
    if (gg.row_clause[row] < 0)
      continue;
    out << gg.row_clause[row];
    for (int j = 0; j < h.cols; ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", h.at(row, j));
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Weights file

void write_weights_file(const PairScorer &scorer, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out << "HSG-GNN 1 " << (scorer.backbone == Backbone::GCN ? "GCN" : "SAGE")
      << ' ' << scorer.num_layers() << " 4";
  for (int l = 0; l <= scorer.num_layers(); ++l)
    out << ' ' << scorer.dim();
  out << '\n';
  char buf[32];
  auto emit_matrix = [&](const Matrix &m) {
    for (int i = 0; i < m.rows; ++i) {
      for (int j = 0; j < m.cols; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", m.at(i, j));
        out << (j ? " " : "") << buf;
      }
      out << '\n';
    }
  };
  auto emit_vector = [&](const std::vector<double> &v) {
    for (size_t j = 0; j < v.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", v[j]);
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  };
  emit_matrix(scorer.embed_w);
  emit_vector(scorer.embed_b);
  for (const auto &l : scorer.layers) {
    if (scorer.backbone == Backbone::SAGE) {
      emit_matrix(l.q);
      emit_vector(l.qb);
    }
    emit_matrix(l.w);
  }
}

PairScorer read_weights_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::string magic, version, backbone;
  in >> magic >> version >> backbone;
  if (magic != "HSG-GNN" || version != "1")
    throw std::runtime_error(path + ": bad weights header");
  int layers = 0, in_dim = 0;
  in >> layers >> in_dim;
  if (in_dim != 4)
    throw std::runtime_error(path + ": unexpected input feature size");
  std::vector<int> dims(layers + 1);
  for (auto &d : dims)
    in >> d;
  for (int d : dims)
    if (d != dims[0])
      throw std::runtime_error(path + ": non-uniform layer dims");
  int dim = dims[0];

  PairScorer s;
  if (backbone == "GCN")
    s.backbone = Backbone::GCN;
  else if (backbone == "SAGE")
    s.backbone = Backbone::SAGE;
  else
    throw std::runtime_error(path + ": unknown backbone " + backbone);

  auto read_matrix = [&](Matrix &m, int r, int c) {
    m = Matrix(r, c);
    for (double &x : m.data)
      in >> x;
  };
  auto read_vector = [&](std::vector<double> &v, int n) {
    v.assign(n, 0.0);
    for (double &x : v)
      in >> x;
  };
  read_matrix(s.embed_w, 4, dim);
  read_vector(s.embed_b, dim);
  s.layers.resize(layers);
  for (auto &l : s.layers) {
    if (s.backbone == Backbone::SAGE) {
      read_matrix(l.q, dim, dim);
      read_vector(l.qb, dim);
      read_matrix(l.w, 2 * dim, dim);
    } else {
      read_matrix(l.w, dim, dim);
    }
  }
  if (!in)
    throw std::runtime_error(path + ": truncated weights file");
  return s;
}

} // namespace hsg
