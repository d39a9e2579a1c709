#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <mortcast/types.hpp>

namespace mortcast {

enum class Activation { sigmoid, tanh, relu, linear };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation activation);

/// Thrown when training produces non-finite values; usually cured by a
/// smaller learning rate.
struct TrainingDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LSTMConfig {
    int hidden_units = 10;
    /// Transform of the candidate update and of the memory cell in the output
    /// equation h = o * act(c).
    Activation cell_activation = Activation::relu;
    /// Fixed to sigmoid; kept explicit so saved models are self-describing.
    Activation gate_activation = Activation::sigmoid;
    /// Gate transform actually applied; sigmoid unless deliberately overridden.
    Activation recurrent_activation = Activation::sigmoid;
    Activation output_activation = Activation::linear;
    double learning_rate = 0.01;
    int max_epochs = 2000;
    int patience = 100;
    std::uint64_t seed = 1;
    std::string scaling = "minmax[-1,1]";

    void validate() const;
};

/// Symmetric min-max scaler onto [-1, 1], fitted on the training series only.
struct MinMaxScaler {
    double center = 0.0;
    double halfwidth = 0.0;

    static MinMaxScaler fit(const Vector& series);
    double scale(double x) const { return halfwidth > 0.0 ? (x - center) / halfwidth : 0.0; }
    double unscale(double y) const { return center + y * halfwidth; }
    Vector scale(const Vector& series) const;
};

struct StateCarry {
    Vector h;
    Vector c;

    static StateCarry zeros(int hidden_units);
};

/// All trainable tensors of the single-hidden-layer cell (scalar in, scalar out).
struct LSTMWeights {
    Vector W_f, W_i, W_o, W_c; // input weights
    Matrix U_f, U_i, U_o, U_c; // recurrent weights
    Vector b_f, b_i, b_o, b_c; // biases
    Vector v_out;              // output layer weights
    double b_out = 0.0;

    static LSTMWeights zeros(int hidden_units);
    double squared_norm() const;
    void add_scaled(const LSTMWeights& other, double factor);
    void scale(double factor);
};

struct LSTMModel {
    LSTMConfig config;
    LSTMWeights weights;
    MinMaxScaler scaler;

    int hidden_units() const { return config.hidden_units; }
};

/// Glorot-uniform initialization from the config seed; forget-gate bias starts at 1.
LSTMModel init_model(const LSTMConfig& config);

/// One cell step in scaled units. Throws TrainingDivergence on non-finite output.
std::pair<double, StateCarry> lstm_step(const LSTMModel& model, double x, const StateCarry& state);

struct ForwardTrace {
    Vector outputs;                 // outputs[t] is the one-step prediction after consuming inputs[t]
    std::vector<StateCarry> states; // states[t] is the carry after step t
};

/// Runs the whole scaled input sequence from a zero state.
ForwardTrace forward_sequence(const LSTMModel& model, const Vector& inputs);

/// MSE of the model over scaled (input, target) pairs, state carried from zero.
double sequence_loss(const LSTMModel& model, const Vector& scaled_inputs, const Vector& scaled_targets);

/// Full-sequence BPTT: loss and analytic gradients of sequence_loss.
double loss_and_gradients(const LSTMModel& model, const Vector& scaled_inputs, const Vector& scaled_targets,
                          LSTMWeights& gradients);

struct LSTMTrainResult {
    LSTMModel model;
    std::vector<double> train_loss;
    std::vector<double> validation_loss; // empty when no validation split
    int best_epoch = 0;
};

/// Trains on the lag-1 pairs of `series` by batch gradient descent with
/// gradient-norm clipping. The last `validation_points` pairs are held out for
/// early stopping; with none, training runs to max_epochs or a loss plateau.
/// Deterministic for a fixed seed, data and config.
LSTMTrainResult train(const LSTMConfig& config, const Vector& series, Index validation_points = 0);

struct GridSearchResult {
    LSTMConfig best;
    std::vector<double> validation_mse; // per grid entry; NaN where training diverged
};

/// Trains every config on the sub-training split (all but the trailing
/// validation share of pairs) and returns the one with minimum validation MSE.
/// Ties break toward fewer hidden units, then lower learning rate, then grid order.
GridSearchResult grid_search(const Vector& series, const std::vector<LSTMConfig>& grid,
                             double validation_fraction = 0.2);

/// State after feeding the whole raw series through the model.
StateCarry final_training_state(const LSTMModel& model, const Vector& series);

/// One-step fitted values in raw units: prediction of series[t] from series[t-1],
/// for t = 1..n-1.
Vector fitted_one_step(const LSTMModel& model, const Vector& series);

/// Recursive multi-step forecast in raw units: each prediction is fed back as
/// the next input, starting from the given carry and last observed value.
Vector forecast_recursive(const LSTMModel& model, double last_observed, const StateCarry& state, int horizon);

/// Keyed-text serialization; load(save(m)) reproduces every tensor bit-exactly.
void save_model(const LSTMModel& model, std::ostream& out);
LSTMModel load_model(std::istream& in);

} // namespace mortcast
