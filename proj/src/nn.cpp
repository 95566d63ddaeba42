#include "dm/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "dm/errors.hpp"
#include "dm/util.hpp"

namespace dm::nn {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  // exp() underflows to 0 below ~-745; clamp so the result stays positive.
  double e = std::exp(std::max(x, -708.0));
  return e / (1.0 + e);
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "Tanh";
    case Activation::Relu: return "Relu";
    case Activation::Linear: return "Linear";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "Tanh") return Activation::Tanh;
  if (s == "Relu") return Activation::Relu;
  if (s == "Linear") return Activation::Linear;
  throw DataError("unknown activation: " + s);
}

const char* to_string(RecurrentKind k) {
  return k == RecurrentKind::LSTM ? "LSTM" : "RNN";
}

RecurrentKind recurrent_from_string(const std::string& s) {
  if (s == "LSTM" || s == "lstm") return RecurrentKind::LSTM;
  if (s == "RNN" || s == "rnn") return RecurrentKind::RNN;
  throw DataError("unknown recurrent kind: " + s);
}

namespace {

// y (len M.cols) += x (len M.rows) * M, row-major friendly.
void add_vec_mat(const Vector& x, const Matrix& M, Vector& y) {
  for (std::size_t i = 0; i < M.rows; ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = &M.a[i * M.cols];
    for (std::size_t j = 0; j < M.cols; ++j) y[j] += xi * row[j];
  }
}

// y (len M.rows) += M * v (len M.cols).
void add_mat_vec(const Matrix& M, const Vector& v, Vector& y) {
  for (std::size_t i = 0; i < M.rows; ++i) {
    const double* row = &M.a[i * M.cols];
    double acc = 0.0;
    for (std::size_t j = 0; j < M.cols; ++j) acc += row[j] * v[j];
    y[i] += acc;
  }
}

// G += outer(x, d).
void add_outer(const Vector& x, const Vector& d, Matrix& G) {
  for (std::size_t i = 0; i < G.rows; ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;
    double* row = &G.a[i * G.cols];
    for (std::size_t j = 0; j < G.cols; ++j) row[j] += xi * d[j];
  }
}

void add_scaled(Vector& y, const Vector& d) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += d[i];
}

double activate(double x, Activation a) {
  switch (a) {
    case Activation::Tanh: return std::tanh(x);
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Linear: return x;
  }
  return x;
}

double activate_deriv(double pre, double post, Activation a) {
  switch (a) {
    case Activation::Tanh: return 1.0 - post * post;
    case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Linear: return 1.0;
  }
  return 1.0;
}

}  // namespace

LstmState zero_state(std::size_t hidden_dim) {
  return LstmState{Vector(hidden_dim, 0.0), Vector(hidden_dim, 0.0)};
}

LstmState lstm_step(const LstmParams& p, const LstmState& s, const Vector& x,
                    LstmStepCache* cache) {
  const std::size_t in = p.input_dim(), hid = p.hidden_dim();
  if (x.size() != in || s.h.size() != hid || s.c.size() != hid)
    throw DataError("lstm_step: shape mismatch");

  auto gate = [&](const Matrix& U, const Matrix& W, const Vector& b,
                  bool is_tanh) {
    Vector z(hid, 0.0);
    add_vec_mat(x, U, z);
    add_vec_mat(s.h, W, z);
    if (p.use_biases) add_scaled(z, b);
    for (double& v : z) v = is_tanh ? std::tanh(v) : sigmoid(v);
    return z;
  };

  Vector f = gate(p.U_f, p.W_f, p.b_f, false);
  Vector i = gate(p.U_i, p.W_i, p.b_i, false);
  Vector g = gate(p.U_g, p.W_g, p.b_g, true);
  Vector o = gate(p.U_o, p.W_o, p.b_o, false);

  Vector cell_arg(hid), c(hid), tanh_c(hid), h(hid);
  for (std::size_t k = 0; k < hid; ++k) {
    cell_arg[k] = f[k] * s.c[k] + i[k] * g[k];
    c[k] = p.paper_exact_cell_update ? sigmoid(cell_arg[k]) : cell_arg[k];
    tanh_c[k] = std::tanh(c[k]);
    h[k] = tanh_c[k] * o[k];
  }

  if (cache) {
    cache->x = x;
    cache->h_prev = s.h;
    cache->c_prev = s.c;
    cache->f = f;
    cache->i = i;
    cache->g = g;
    cache->o = o;
    cache->cell_arg = cell_arg;
    cache->c = c;
    cache->tanh_c = tanh_c;
    cache->h = h;
  }
  return LstmState{std::move(c), std::move(h)};
}

Vector rnn_step(const RnnParams& p, const Vector& h_prev, const Vector& x,
                RnnStepCache* cache) {
  const std::size_t in = p.input_dim(), hid = p.hidden_dim();
  if (x.size() != in || h_prev.size() != hid)
    throw DataError("rnn_step: shape mismatch");
  Vector z(hid, 0.0);
  add_vec_mat(x, p.U, z);
  add_vec_mat(h_prev, p.W, z);
  if (p.use_biases) add_scaled(z, p.b);
  for (double& v : z) v = std::tanh(v);
  if (cache) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->h = z;
  }
  return z;
}

std::size_t DeepMobilityModel::seq_dim() const {
  return recurrent_kind == RecurrentKind::LSTM ? lstm.input_dim() : rnn.input_dim();
}

std::size_t DeepMobilityModel::hidden_dim() const {
  return recurrent_kind == RecurrentKind::LSTM ? lstm.hidden_dim() : rnn.hidden_dim();
}

std::size_t DeepMobilityModel::static_dim() const {
  return head.layers.front().W.rows - hidden_dim();
}

bool DeepMobilityModel::use_biases() const {
  return recurrent_kind == RecurrentKind::LSTM ? lstm.use_biases : rnn.use_biases;
}

DeepMobilityModel init_model(const ModelConfig& cfg, std::uint64_t seed) {
  util::Rng rng(seed);
  auto init_matrix = [&](std::size_t r, std::size_t c) {
    Matrix m(r, c);
    double bound = std::sqrt(6.0 / double(r + c));
    for (double& v : m.a) v = rng.uniform(-bound, bound);
    return m;
  };

  DeepMobilityModel model;
  model.recurrent_kind = cfg.recurrent_kind;
  if (cfg.recurrent_kind == RecurrentKind::LSTM) {
    LstmParams& p = model.lstm;
    p.U_f = init_matrix(cfg.seq_dim, cfg.hidden_dim);
    p.U_i = init_matrix(cfg.seq_dim, cfg.hidden_dim);
    p.U_g = init_matrix(cfg.seq_dim, cfg.hidden_dim);
    p.U_o = init_matrix(cfg.seq_dim, cfg.hidden_dim);
    p.W_f = init_matrix(cfg.hidden_dim, cfg.hidden_dim);
    p.W_i = init_matrix(cfg.hidden_dim, cfg.hidden_dim);
    p.W_g = init_matrix(cfg.hidden_dim, cfg.hidden_dim);
    p.W_o = init_matrix(cfg.hidden_dim, cfg.hidden_dim);
    p.b_f.assign(cfg.hidden_dim, 0.0);
    p.b_i.assign(cfg.hidden_dim, 0.0);
    p.b_g.assign(cfg.hidden_dim, 0.0);
    p.b_o.assign(cfg.hidden_dim, 0.0);
    p.paper_exact_cell_update = cfg.paper_exact_cell_update;
    p.use_biases = cfg.use_biases;
  } else {
    RnnParams& p = model.rnn;
    p.U = init_matrix(cfg.seq_dim, cfg.hidden_dim);
    p.W = init_matrix(cfg.hidden_dim, cfg.hidden_dim);
    p.b.assign(cfg.hidden_dim, 0.0);
    p.use_biases = cfg.use_biases;
  }

  std::size_t in = cfg.hidden_dim + cfg.static_dim;
  for (std::size_t out : cfg.head_hidden) {
    DenseLayer layer;
    layer.W = init_matrix(in, out);
    layer.b.assign(out, 0.0);
    layer.act = cfg.head_activation;
    model.head.layers.push_back(std::move(layer));
    in = out;
  }
  DenseLayer final_layer;
  final_layer.W = init_matrix(in, kOutputDim);
  final_layer.b.assign(kOutputDim, 0.0);
  final_layer.act = Activation::Linear;
  model.head.layers.push_back(std::move(final_layer));
  return model;
}

namespace {

struct HeadCache {
  std::vector<Vector> inputs;  // per layer
  std::vector<Vector> pre;     // pre-activation per layer
  Vector output;
};

Vector head_forward(const MlpParams& head, const Vector& input, HeadCache* cache) {
  Vector cur = input;
  for (const DenseLayer& layer : head.layers) {
    if (cur.size() != layer.W.rows) throw DataError("head: shape mismatch");
    Vector z = layer.b;
    add_vec_mat(cur, layer.W, z);
    Vector a(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) a[i] = activate(z[i], layer.act);
    if (cache) {
      cache->inputs.push_back(std::move(cur));
      cache->pre.push_back(std::move(z));
    }
    cur = std::move(a);
  }
  if (cache) cache->output = cur;
  return cur;
}

// Backward through the head; returns gradient wrt the head input.
Vector head_backward(const MlpParams& head, const HeadCache& cache,
                     const Vector& d_out, MlpParams& grads) {
  Vector d = d_out;
  for (std::size_t li = head.layers.size(); li-- > 0;) {
    const DenseLayer& layer = head.layers[li];
    const Vector& input = cache.inputs[li];
    const Vector& pre = cache.pre[li];

    Vector dz(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      double post = activate(pre[i], layer.act);
      dz[i] = d[i] * activate_deriv(pre[i], post, layer.act);
    }
    add_outer(input, dz, grads.layers[li].W);
    add_scaled(grads.layers[li].b, dz);
    Vector d_in(layer.W.rows, 0.0);
    add_mat_vec(layer.W, dz, d_in);
    d = std::move(d_in);
  }
  return d;
}

}  // namespace

Vector forward(const DeepMobilityModel& model, std::span<const Vector> seq,
               const Vector& stat) {
  if (seq.empty()) throw DataError("forward: empty sequence");
  Vector h;
  if (model.recurrent_kind == RecurrentKind::LSTM) {
    LstmState s = zero_state(model.hidden_dim());
    for (const Vector& x : seq) s = lstm_step(model.lstm, s, x);
    h = s.h;
  } else {
    h.assign(model.hidden_dim(), 0.0);
    for (const Vector& x : seq) h = rnn_step(model.rnn, h, x);
  }
  Vector input = h;
  input.insert(input.end(), stat.begin(), stat.end());
  return head_forward(model.head, input, nullptr);
}

int predict_label(const Vector& scores) {
  int best = 0;
  for (int i = 1; i < int(scores.size()); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

Gradients zero_gradients(const DeepMobilityModel& model) {
  Gradients g = model;  // copy shapes and flags
  if (g.recurrent_kind == RecurrentKind::LSTM) {
    for (Matrix* m : {&g.lstm.U_f, &g.lstm.U_i, &g.lstm.U_g, &g.lstm.U_o,
                      &g.lstm.W_f, &g.lstm.W_i, &g.lstm.W_g, &g.lstm.W_o})
      std::fill(m->a.begin(), m->a.end(), 0.0);
    for (Vector* v : {&g.lstm.b_f, &g.lstm.b_i, &g.lstm.b_g, &g.lstm.b_o})
      std::fill(v->begin(), v->end(), 0.0);
  } else {
    std::fill(g.rnn.U.a.begin(), g.rnn.U.a.end(), 0.0);
    std::fill(g.rnn.W.a.begin(), g.rnn.W.a.end(), 0.0);
    std::fill(g.rnn.b.begin(), g.rnn.b.end(), 0.0);
  }
  for (DenseLayer& layer : g.head.layers) {
    std::fill(layer.W.a.begin(), layer.W.a.end(), 0.0);
    std::fill(layer.b.begin(), layer.b.end(), 0.0);
  }
  return g;
}

namespace {

double sample_loss_and_grad(const DeepMobilityModel& model, const Sample& sample,
                            double weight, Gradients& grads) {
  const std::size_t hid = model.hidden_dim();
  const std::size_t T = sample.seq.size();

  // Forward with caches.
  std::vector<LstmStepCache> lstm_caches;
  std::vector<RnnStepCache> rnn_caches;
  Vector h;
  if (model.recurrent_kind == RecurrentKind::LSTM) {
    lstm_caches.resize(T);
    LstmState s = zero_state(hid);
    for (std::size_t t = 0; t < T; ++t)
      s = lstm_step(model.lstm, s, sample.seq[t], &lstm_caches[t]);
    h = s.h;
  } else {
    rnn_caches.resize(T);
    h.assign(hid, 0.0);
    for (std::size_t t = 0; t < T; ++t)
      h = rnn_step(model.rnn, h, sample.seq[t], &rnn_caches[t]);
  }
  Vector head_input = h;
  head_input.insert(head_input.end(), sample.stat.begin(), sample.stat.end());
  HeadCache head_cache;
  Vector scores = head_forward(model.head, head_input, &head_cache);

  // ½·Σ(scores − onehot)², with d/dscores scaled by the batch weight.
  double loss = 0.0;
  Vector d_scores(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    double target = (int(k) == sample.label) ? 1.0 : 0.0;
    double diff = scores[k] - target;
    loss += 0.5 * diff * diff;
    d_scores[k] = diff * weight;
  }

  Vector d_input = head_backward(model.head, head_cache, d_scores, grads.head);
  Vector dh(d_input.begin(), d_input.begin() + hid);

  if (model.recurrent_kind == RecurrentKind::LSTM) {
    const LstmParams& p = model.lstm;
    LstmParams& gp = grads.lstm;
    Vector dc(hid, 0.0);
    for (std::size_t t = T; t-- > 0;) {
      const LstmStepCache& cc = lstm_caches[t];
      Vector dzf(hid), dzi(hid), dzg(hid), dzo(hid);
      Vector dh_prev(hid, 0.0), dc_prev(hid, 0.0);
      for (std::size_t k = 0; k < hid; ++k) {
        double d_o = dh[k] * cc.tanh_c[k];
        double d_c = dc[k] + dh[k] * cc.o[k] * (1.0 - cc.tanh_c[k] * cc.tanh_c[k]);
        double d_arg = p.paper_exact_cell_update
                           ? d_c * cc.c[k] * (1.0 - cc.c[k])
                           : d_c;
        double d_f = d_arg * cc.c_prev[k];
        double d_i = d_arg * cc.g[k];
        double d_g = d_arg * cc.i[k];
        dc_prev[k] = d_arg * cc.f[k];
        dzf[k] = d_f * cc.f[k] * (1.0 - cc.f[k]);
        dzi[k] = d_i * cc.i[k] * (1.0 - cc.i[k]);
        dzg[k] = d_g * (1.0 - cc.g[k] * cc.g[k]);
        dzo[k] = d_o * cc.o[k] * (1.0 - cc.o[k]);
      }
      add_outer(cc.x, dzf, gp.U_f);
      add_outer(cc.x, dzi, gp.U_i);
      add_outer(cc.x, dzg, gp.U_g);
      add_outer(cc.x, dzo, gp.U_o);
      add_outer(cc.h_prev, dzf, gp.W_f);
      add_outer(cc.h_prev, dzi, gp.W_i);
      add_outer(cc.h_prev, dzg, gp.W_g);
      add_outer(cc.h_prev, dzo, gp.W_o);
      if (p.use_biases) {
        add_scaled(gp.b_f, dzf);
        add_scaled(gp.b_i, dzi);
        add_scaled(gp.b_g, dzg);
        add_scaled(gp.b_o, dzo);
      }
      add_mat_vec(p.W_f, dzf, dh_prev);
      add_mat_vec(p.W_i, dzi, dh_prev);
      add_mat_vec(p.W_g, dzg, dh_prev);
      add_mat_vec(p.W_o, dzo, dh_prev);
      dh = std::move(dh_prev);
      dc = std::move(dc_prev);
    }
  } else {
    const RnnParams& p = model.rnn;
    RnnParams& gp = grads.rnn;
    for (std::size_t t = T; t-- > 0;) {
      const RnnStepCache& cc = rnn_caches[t];
      Vector dz(hid);
      for (std::size_t k = 0; k < hid; ++k)
        dz[k] = dh[k] * (1.0 - cc.h[k] * cc.h[k]);
      add_outer(cc.x, dz, gp.U);
      add_outer(cc.h_prev, dz, gp.W);
      if (p.use_biases) add_scaled(gp.b, dz);
      Vector dh_prev(hid, 0.0);
      add_mat_vec(p.W, dz, dh_prev);
      dh = std::move(dh_prev);
    }
  }
  return loss;
}

}  // namespace

double loss_and_grad(const DeepMobilityModel& model, std::span<const Sample> batch,
                     Gradients& grads) {
  if (batch.empty()) throw DataError("loss_and_grad: empty batch");
  double weight = 1.0 / double(batch.size());
  double loss = 0.0;
  for (const Sample& s : batch)
    loss += sample_loss_and_grad(model, s, weight, grads) * weight;
  return loss;
}

std::pair<double, double> evaluate(const DeepMobilityModel& model,
                                   std::span<const Sample> samples) {
  if (samples.empty()) throw DataError("evaluate: empty sample set");
  double loss = 0.0;
  std::size_t correct = 0;
  for (const Sample& s : samples) {
    Vector scores = forward(model, s.seq, s.stat);
    for (std::size_t k = 0; k < scores.size(); ++k) {
      double target = (int(k) == s.label) ? 1.0 : 0.0;
      double diff = scores[k] - target;
      loss += 0.5 * diff * diff;
    }
    if (predict_label(scores) == s.label) ++correct;
  }
  return {loss / double(samples.size()),
          double(correct) / double(samples.size())};
}

std::vector<double*> parameter_views(DeepMobilityModel& model) {
  std::vector<double*> out;
  auto add_matrix = [&](Matrix& m) {
    for (double& v : m.a) out.push_back(&v);
  };
  auto add_vector = [&](Vector& v) {
    for (double& x : v) out.push_back(&x);
  };
  if (model.recurrent_kind == RecurrentKind::LSTM) {
    LstmParams& p = model.lstm;
    for (Matrix* m : {&p.U_f, &p.U_i, &p.U_g, &p.U_o, &p.W_f, &p.W_i, &p.W_g, &p.W_o})
      add_matrix(*m);
    if (p.use_biases)
      for (Vector* v : {&p.b_f, &p.b_i, &p.b_g, &p.b_o}) add_vector(*v);
  } else {
    add_matrix(model.rnn.U);
    add_matrix(model.rnn.W);
    if (model.rnn.use_biases) add_vector(model.rnn.b);
  }
  for (DenseLayer& layer : model.head.layers) {
    add_matrix(layer.W);
    add_vector(layer.b);
  }
  return out;
}

TrainHistory train(DeepMobilityModel& model, std::span<const Sample> train_set,
                   std::span<const Sample> val_set, const TrainHyper& hp) {
  if (train_set.empty()) throw DataError("empty training set");
  if (val_set.empty()) throw DataError("empty validation set");
  if (hp.epochs < 0) throw DataError("epochs must be >= 0");

  TrainHistory history;
  if (hp.epochs == 0) return history;

  std::vector<double*> params = parameter_views(model);
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
  long long adam_t = 0;
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    util::Rng shuffle_rng(util::stream_seed(hp.seed, 0xE60C, std::uint64_t(epoch)));
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::size_t j = std::size_t(shuffle_rng.below(i + 1));
      std::swap(order[i], order[j]);
    }

    std::size_t batch_size = std::max<std::size_t>(1, hp.batch_size);
    int batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      std::size_t end = std::min(order.size(), start + batch_size);
      Gradients grads = zero_gradients(model);
      double weight = 1.0 / double(end - start);
      double loss = 0.0;
      for (std::size_t i = start; i < end; ++i)
        loss += sample_loss_and_grad(model, train_set[order[i]], weight, grads) * weight;
      if (!std::isfinite(loss))
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_no));

      std::vector<double*> grad_views = parameter_views(grads);
      if (hp.optimizer == Optimizer::SGD) {
        for (std::size_t i = 0; i < params.size(); ++i)
          *params[i] -= hp.learning_rate * *grad_views[i];
      } else {
        ++adam_t;
        double bc1 = 1.0 - std::pow(beta1, double(adam_t));
        double bc2 = 1.0 - std::pow(beta2, double(adam_t));
        for (std::size_t i = 0; i < params.size(); ++i) {
          double g = *grad_views[i];
          m[i] = beta1 * m[i] + (1.0 - beta1) * g;
          v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
          *params[i] -= hp.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
      }
      ++batch_no;
    }

    EpochStats stats;
    stats.epoch = epoch;
    auto [tl, ta] = evaluate(model, train_set);
    auto [vl, va] = evaluate(model, val_set);
    stats.train_loss = tl;
    stats.train_acc = ta;
    stats.val_loss = vl;
    stats.val_acc = va;
    if (!std::isfinite(tl) || !std::isfinite(vl))
      throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                         " evaluation");
    history.push_back(stats);
  }
  return history;
}

void write_history_csv(const TrainHistory& history, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  char buf[256];
  for (const EpochStats& e : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", e.epoch,
                  e.train_loss, e.train_acc, e.val_loss, e.val_acc);
    f << buf;
  }
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_hexfloat(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == nullptr || *end != '\0')
    throw DataError("model file: bad float '" + s + "'");
  return v;
}

json encode_values(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(hexfloat(x));
  return arr;
}

std::vector<double> decode_values(const json& arr, std::size_t expected) {
  if (!arr.is_array() || arr.size() != expected)
    throw DataError("model file: parameter block has wrong size");
  std::vector<double> v;
  v.reserve(expected);
  for (const auto& e : arr) v.push_back(parse_hexfloat(e.get<std::string>()));
  return v;
}

}  // namespace

void save_model(const DeepMobilityModel& model, const data::Scaler* scaler,
                std::size_t window_len, const std::string& path) {
  json j;
  j["format"] = "deepmobility-model";
  j["version"] = kModelFormatVersion;
  j["window_len"] = window_len;
  j["recurrent_kind"] = to_string(model.recurrent_kind);
  j["seq_dim"] = model.seq_dim();
  j["hidden_dim"] = model.hidden_dim();
  j["static_dim"] = model.static_dim();
  j["use_biases"] = model.use_biases();
  j["paper_exact_cell_update"] =
      model.recurrent_kind == RecurrentKind::LSTM && model.lstm.paper_exact_cell_update;

  json params;
  if (model.recurrent_kind == RecurrentKind::LSTM) {
    const LstmParams& p = model.lstm;
    params["U_f"] = encode_values(p.U_f.a);
    params["U_i"] = encode_values(p.U_i.a);
    params["U_g"] = encode_values(p.U_g.a);
    params["U_o"] = encode_values(p.U_o.a);
    params["W_f"] = encode_values(p.W_f.a);
    params["W_i"] = encode_values(p.W_i.a);
    params["W_g"] = encode_values(p.W_g.a);
    params["W_o"] = encode_values(p.W_o.a);
    params["b_f"] = encode_values(p.b_f);
    params["b_i"] = encode_values(p.b_i);
    params["b_g"] = encode_values(p.b_g);
    params["b_o"] = encode_values(p.b_o);
  } else {
    params["U"] = encode_values(model.rnn.U.a);
    params["W"] = encode_values(model.rnn.W.a);
    params["b"] = encode_values(model.rnn.b);
  }
  json head = json::array();
  for (std::size_t li = 0; li < model.head.layers.size(); ++li) {
    const DenseLayer& layer = model.head.layers[li];
    json jl;
    jl["in"] = layer.W.rows;
    jl["out"] = layer.W.cols;
    jl["act"] = to_string(layer.act);
    jl["W"] = encode_values(layer.W.a);
    jl["b"] = encode_values(layer.b);
    head.push_back(jl);
  }
  j["params"] = params;
  j["head"] = head;

  if (scaler && scaler->fitted) {
    json js;
    js["feature_schema_version"] = data::kSchemaVersion;
    js["min"] = encode_values(scaler->min_v);
    js["max"] = encode_values(scaler->max_v);
    j["scaler"] = js;
  } else {
    j["scaler"] = nullptr;
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << j.dump(1) << '\n';
  if (!f) throw DataError("write failed: " + path);
}

DeepMobilityModel load_model(const std::string& path, data::Scaler* scaler,
                             std::size_t* window_len) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw DataError("model file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "deepmobility-model")
      throw DataError("model file " + path + ": unknown format");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw DataError("model file " + path + ": unsupported version");

    DeepMobilityModel model;
    if (window_len) *window_len = j.value("window_len", std::size_t(10));
    model.recurrent_kind = recurrent_from_string(j.at("recurrent_kind"));
    std::size_t seq_dim = j.at("seq_dim").get<std::size_t>();
    std::size_t hidden = j.at("hidden_dim").get<std::size_t>();
    bool use_biases = j.at("use_biases").get<bool>();
    const json& params = j.at("params");

    auto matrix_of = [&](const char* key, std::size_t r, std::size_t c) {
      Matrix m(r, c);
      m.a = decode_values(params.at(key), r * c);
      return m;
    };
    auto vector_of = [&](const char* key, std::size_t n) {
      return decode_values(params.at(key), n);
    };

    if (model.recurrent_kind == RecurrentKind::LSTM) {
      LstmParams& p = model.lstm;
      p.U_f = matrix_of("U_f", seq_dim, hidden);
      p.U_i = matrix_of("U_i", seq_dim, hidden);
      p.U_g = matrix_of("U_g", seq_dim, hidden);
      p.U_o = matrix_of("U_o", seq_dim, hidden);
      p.W_f = matrix_of("W_f", hidden, hidden);
      p.W_i = matrix_of("W_i", hidden, hidden);
      p.W_g = matrix_of("W_g", hidden, hidden);
      p.W_o = matrix_of("W_o", hidden, hidden);
      p.b_f = vector_of("b_f", hidden);
      p.b_i = vector_of("b_i", hidden);
      p.b_g = vector_of("b_g", hidden);
      p.b_o = vector_of("b_o", hidden);
      p.paper_exact_cell_update = j.at("paper_exact_cell_update").get<bool>();
      p.use_biases = use_biases;
    } else {
      RnnParams& p = model.rnn;
      p.U = matrix_of("U", seq_dim, hidden);
      p.W = matrix_of("W", hidden, hidden);
      p.b = vector_of("b", hidden);
      p.use_biases = use_biases;
    }

    for (const json& jl : j.at("head")) {
      DenseLayer layer;
      std::size_t in = jl.at("in").get<std::size_t>();
      std::size_t out = jl.at("out").get<std::size_t>();
      layer.W = Matrix(in, out);
      layer.W.a = decode_values(jl.at("W"), in * out);
      layer.b = decode_values(jl.at("b"), out);
      layer.act = activation_from_string(jl.at("act"));
      model.head.layers.push_back(std::move(layer));
    }
    if (model.head.layers.empty())
      throw DataError("model file " + path + ": empty head");

    if (scaler) {
      if (!j.at("scaler").is_null()) {
        const json& js = j.at("scaler");
        std::size_t n = data::feature_count();
        if (js.at("feature_schema_version").get<int>() != data::kSchemaVersion)
          throw DataError("model file " + path + ": feature schema mismatch");
        scaler->min_v = decode_values(js.at("min"), n);
        scaler->max_v = decode_values(js.at("max"), n);
        scaler->fitted = true;
      } else {
        scaler->fitted = false;
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError("model file " + path + ": " + e.what());
  }
}

}  // namespace dm::nn
