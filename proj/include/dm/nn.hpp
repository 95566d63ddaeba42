/**
 * nn.hpp — from-scratch neural core: dense layers, RNN cell, LSTM cell,
 * mean-squared-error loss against one-hot targets, gradients via
 * backpropagation through time, mini-batch training with per-epoch
 * accuracy/loss history, and model (de)serialization.
 *
 * The LSTM supports two cell-state updates:
 *   standard:     c_t = f∘c_{t-1} + i∘g
 *   paper-exact:  c_t = σ(f∘c_{t-1} + i∘g)
 * The sigmoid-wrapped variant bounds the cell state into (0,1) and is
 * therefore non-default; both are differentiated exactly.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dm/dataset.hpp"

namespace dm::nn {

using Vector = std::vector<double>;

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

/// Numerically stable logistic sigmoid (no overflow up to |x| ~ 1e3).
double sigmoid(double x);

enum class Activation { Tanh, Relu, Linear };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Recurrent cells.
// ---------------------------------------------------------------------------

struct LstmParams {
  Matrix U_f, U_i, U_g, U_o;  // input_dim x hidden_dim
  Matrix W_f, W_i, W_g, W_o;  // hidden_dim x hidden_dim
  Vector b_f, b_i, b_g, b_o;  // hidden_dim
  bool paper_exact_cell_update = false;
  bool use_biases = true;

  std::size_t input_dim() const { return U_f.rows; }
  std::size_t hidden_dim() const { return U_f.cols; }
};

struct RnnParams {
  Matrix U;  // input_dim x hidden_dim
  Matrix W;  // hidden_dim x hidden_dim
  Vector b;  // hidden_dim
  bool use_biases = true;

  std::size_t input_dim() const { return U.rows; }
  std::size_t hidden_dim() const { return U.cols; }
};

struct LstmState {
  Vector c;  // cell state
  Vector h;  // hidden output, in (-1,1) after any step
};

LstmState zero_state(std::size_t hidden_dim);

/// Intermediate values of one step, kept for backpropagation.
struct LstmStepCache {
  Vector x, h_prev, c_prev;
  Vector f, i, g, o;
  Vector cell_arg;  // f∘c_prev + i∘g before the optional sigmoid
  Vector c, tanh_c, h;
};

struct RnnStepCache {
  Vector x, h_prev, h;
};

/// One LSTM step; h of the returned state equals the emitted output.
LstmState lstm_step(const LstmParams& p, const LstmState& s, const Vector& x,
                    LstmStepCache* cache = nullptr);

Vector rnn_step(const RnnParams& p, const Vector& h_prev, const Vector& x,
                RnnStepCache* cache = nullptr);

// ---------------------------------------------------------------------------
// Dense head and full model.
// ---------------------------------------------------------------------------

struct DenseLayer {
  Matrix W;  // in x out
  Vector b;  // out
  Activation act = Activation::Tanh;
};

struct MlpParams {
  std::vector<DenseLayer> layers;  // final layer must be Linear
};

enum class RecurrentKind { LSTM, RNN };

const char* to_string(RecurrentKind k);
RecurrentKind recurrent_from_string(const std::string& s);

inline constexpr std::size_t kOutputDim = 5;  // stay + 4 neighbor slots

struct DeepMobilityModel {
  RecurrentKind recurrent_kind = RecurrentKind::LSTM;
  LstmParams lstm;  // used when recurrent_kind == LSTM
  RnnParams rnn;    // used when recurrent_kind == RNN
  MlpParams head;   // input: concat(final h, static features)

  std::size_t seq_dim() const;
  std::size_t hidden_dim() const;
  std::size_t static_dim() const;
  bool use_biases() const;
};

struct ModelConfig {
  RecurrentKind recurrent_kind = RecurrentKind::LSTM;
  std::size_t seq_dim = 12;
  std::size_t hidden_dim = 16;
  std::size_t static_dim = 56;
  std::vector<std::size_t> head_hidden = {12, 8};
  Activation head_activation = Activation::Tanh;
  bool paper_exact_cell_update = false;
  bool use_biases = true;
};

/// Glorot-style uniform init, deterministic by seed; biases start at zero.
DeepMobilityModel init_model(const ModelConfig& cfg, std::uint64_t seed);

/// Run the recurrent core over `seq` from a zero initial state, concatenate
/// the final hidden vector with `stat`, and apply the head. Returns the raw
/// 5 scores (linear output, no softmax).
Vector forward(const DeepMobilityModel& model, std::span<const Vector> seq,
               const Vector& stat);

/// argmax with ties resolved to the lowest index.
int predict_label(const Vector& scores);

// ---------------------------------------------------------------------------
// Loss, gradients, training.
// ---------------------------------------------------------------------------

struct Sample {
  std::vector<Vector> seq;
  Vector stat;
  int label = 0;
};

/// Gradients share the model's parameter layout.
using Gradients = DeepMobilityModel;

Gradients zero_gradients(const DeepMobilityModel& model);

/// Mean over the batch of ½·Σ(scores − onehot(label))²; gradients are
/// accumulated into `grads` (which must have the model's shapes).
/// Throws DataError on an empty batch.
double loss_and_grad(const DeepMobilityModel& model, std::span<const Sample> batch,
                     Gradients& grads);

/// Loss and accuracy without gradients.
std::pair<double, double> evaluate(const DeepMobilityModel& model,
                                   std::span<const Sample> samples);

/// Enumerate trainable parameters in a fixed order (biases skipped when
/// use_biases is false). The same order is used by the optimizer, the
/// finite-difference harness and the serializer.
std::vector<double*> parameter_views(DeepMobilityModel& model);

enum class Optimizer { SGD, AdaptiveMoments };

struct TrainHyper {
  int epochs = 30;
  std::size_t batch_size = 64;
  double learning_rate = 0.001;
  std::uint64_t seed = 1;
  Optimizer optimizer = Optimizer::AdaptiveMoments;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
};

using TrainHistory = std::vector<EpochStats>;

/// Mini-batch training, deterministic by seed (fixed shuffle order, fixed
/// reduction order). History has exactly hp.epochs entries. Throws
/// DataError on empty sets and NumericError (naming epoch and batch) when
/// the loss turns non-finite.
TrainHistory train(DeepMobilityModel& model, std::span<const Sample> train_set,
                   std::span<const Sample> val_set, const TrainHyper& hp);

void write_history_csv(const TrainHistory& history, const std::string& path);

// ---------------------------------------------------------------------------
// Serialization: self-describing JSON with hexfloat payload (bit-exact).
// ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

/// `window_len` is the sequence length the model was trained with; it
/// travels with the model so inference rebuilds identical windows.
void save_model(const DeepMobilityModel& model, const data::Scaler* scaler,
                std::size_t window_len, const std::string& path);

/// Loads a model; fills `scaler`/`window_len` when non-null. Throws
/// DataError on malformed files.
DeepMobilityModel load_model(const std::string& path, data::Scaler* scaler,
                             std::size_t* window_len = nullptr);

}  // namespace dm::nn
