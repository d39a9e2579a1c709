#include <mortcast/lstm.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <mortcast/csv.hpp>

namespace mortcast {

Activation activation_from_string(const std::string& name) {
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    if (name == "linear") return Activation::linear;
    throw std::invalid_argument("unknown activation: '" + name + "'");
}

std::string to_string(Activation activation) {
    switch (activation) {
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
        case Activation::linear: return "linear";
    }
    throw std::logic_error("unreachable");
}

void LSTMConfig::validate() const {
    if (hidden_units < 1) throw std::invalid_argument("LSTMConfig: hidden_units must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("LSTMConfig: learning_rate must be positive");
    if (max_epochs < 1) throw std::invalid_argument("LSTMConfig: max_epochs must be >= 1");
    if (patience > max_epochs) throw std::invalid_argument("LSTMConfig: patience must not exceed max_epochs");
    if (cell_activation != Activation::tanh && cell_activation != Activation::relu)
        throw std::invalid_argument("LSTMConfig: cell_activation must be tanh or relu");
    if (gate_activation != Activation::sigmoid)
        throw std::invalid_argument("LSTMConfig: gate_activation must be sigmoid");
    if (recurrent_activation != Activation::sigmoid && recurrent_activation != Activation::tanh)
        throw std::invalid_argument("LSTMConfig: recurrent_activation must be sigmoid or tanh");
    if (output_activation != Activation::linear)
        throw std::invalid_argument("LSTMConfig: output_activation must be linear");
    if (scaling != "minmax[-1,1]") throw std::invalid_argument("LSTMConfig: unsupported scaling '" + scaling + "'");
}

MinMaxScaler MinMaxScaler::fit(const Vector& series) {
    if (series.size() == 0) throw std::invalid_argument("MinMaxScaler: empty series");
    MinMaxScaler scaler;
    const double lo = series.minCoeff();
    const double hi = series.maxCoeff();
    scaler.center = 0.5 * (lo + hi);
    scaler.halfwidth = 0.5 * (hi - lo);
    return scaler;
}

Vector MinMaxScaler::scale(const Vector& series) const {
    Vector scaled(series.size());
    for (Index i = 0; i < series.size(); ++i) scaled[i] = scale(series[i]);
    return scaled;
}

StateCarry StateCarry::zeros(int hidden_units) {
    return {Vector::Zero(hidden_units), Vector::Zero(hidden_units)};
}

LSTMWeights LSTMWeights::zeros(int n) {
    LSTMWeights w;
    w.W_f = w.W_i = w.W_o = w.W_c = Vector::Zero(n);
    w.U_f = w.U_i = w.U_o = w.U_c = Matrix::Zero(n, n);
    w.b_f = w.b_i = w.b_o = w.b_c = Vector::Zero(n);
    w.v_out = Vector::Zero(n);
    w.b_out = 0.0;
    return w;
}

double LSTMWeights::squared_norm() const {
    return W_f.squaredNorm() + W_i.squaredNorm() + W_o.squaredNorm() + W_c.squaredNorm() + U_f.squaredNorm() +
           U_i.squaredNorm() + U_o.squaredNorm() + U_c.squaredNorm() + b_f.squaredNorm() + b_i.squaredNorm() +
           b_o.squaredNorm() + b_c.squaredNorm() + v_out.squaredNorm() + b_out * b_out;
}

void LSTMWeights::add_scaled(const LSTMWeights& other, double factor) {
    W_f += factor * other.W_f;
    W_i += factor * other.W_i;
    W_o += factor * other.W_o;
    W_c += factor * other.W_c;
    U_f += factor * other.U_f;
    U_i += factor * other.U_i;
    U_o += factor * other.U_o;
    U_c += factor * other.U_c;
    b_f += factor * other.b_f;
    b_i += factor * other.b_i;
    b_o += factor * other.b_o;
    b_c += factor * other.b_c;
    v_out += factor * other.v_out;
    b_out += factor * other.b_out;
}

void LSTMWeights::scale(double factor) {
    W_f *= factor;
    W_i *= factor;
    W_o *= factor;
    W_c *= factor;
    U_f *= factor;
    U_i *= factor;
    U_o *= factor;
    U_c *= factor;
    b_f *= factor;
    b_i *= factor;
    b_o *= factor;
    b_c *= factor;
    v_out *= factor;
    b_out *= factor;
}

namespace {

using Array = Eigen::ArrayXd;

Array apply_activation(Activation activation, const Array& z) {
    switch (activation) {
        case Activation::sigmoid: return 1.0 / (1.0 + (-z).exp());
        case Activation::tanh: return z.tanh();
        case Activation::relu: return z.max(0.0);
        case Activation::linear: return z;
    }
    throw std::logic_error("unreachable");
}

/// Derivative with respect to the pre-activation z, given both z and y = act(z).
Array activation_derivative(Activation activation, const Array& z, const Array& y) {
    switch (activation) {
        case Activation::sigmoid: return y * (1.0 - y);
        case Activation::tanh: return 1.0 - y.square();
        case Activation::relu: return (z > 0.0).cast<double>();
        case Activation::linear: return Array::Ones(z.size());
    }
    throw std::logic_error("unreachable");
}

constexpr double kGradientClipNorm = 5.0;

/// Per-step activations of one forward pass, kept for backpropagation.
struct SequenceTrace {
    Matrix a_f, a_i, a_o, a_c; // pre-activations
    Matrix f, i, o, g;         // gate outputs and candidate
    Matrix c, u, h;            // memory, transformed memory, hidden state
    Vector y;

    explicit SequenceTrace(int n, Index steps)
        : a_f(n, steps), a_i(n, steps), a_o(n, steps), a_c(n, steps), f(n, steps), i(n, steps), o(n, steps),
          g(n, steps), c(n, steps), u(n, steps), h(n, steps), y(steps) {}
};

void forward_pass(const LSTMModel& model, const Vector& inputs, SequenceTrace& trace) {
    const LSTMWeights& w = model.weights;
    const Activation gate = model.config.recurrent_activation;
    const Activation cell = model.config.cell_activation;
    const int n = model.hidden_units();
    Vector h_prev = Vector::Zero(n);
    Vector c_prev = Vector::Zero(n);
    for (Index t = 0; t < inputs.size(); ++t) {
        const double x = inputs[t];
        trace.a_f.col(t) = w.W_f * x + w.U_f * h_prev + w.b_f;
        trace.a_i.col(t) = w.W_i * x + w.U_i * h_prev + w.b_i;
        trace.a_o.col(t) = w.W_o * x + w.U_o * h_prev + w.b_o;
        trace.a_c.col(t) = w.W_c * x + w.U_c * h_prev + w.b_c;
        trace.f.col(t) = apply_activation(gate, trace.a_f.col(t).array());
        trace.i.col(t) = apply_activation(gate, trace.a_i.col(t).array());
        trace.o.col(t) = apply_activation(gate, trace.a_o.col(t).array());
        trace.g.col(t) = apply_activation(cell, trace.a_c.col(t).array());
        trace.c.col(t) = trace.f.col(t).array() * c_prev.array() + trace.i.col(t).array() * trace.g.col(t).array();
        trace.u.col(t) = apply_activation(cell, trace.c.col(t).array());
        trace.h.col(t) = trace.o.col(t).array() * trace.u.col(t).array();
        trace.y[t] = w.v_out.dot(trace.h.col(t)) + w.b_out;
        h_prev = trace.h.col(t);
        c_prev = trace.c.col(t);
    }
}

double mse_over(const Vector& predictions, const Vector& targets, Index from, Index count) {
    double sum = 0.0;
    for (Index t = from; t < from + count; ++t) {
        const double e = predictions[t] - targets[t];
        sum += e * e;
    }
    return sum / static_cast<double>(count);
}

/// Backpropagation through time over the first `steps` positions of the trace.
void backward_pass(const LSTMModel& model, const Vector& inputs, const Vector& targets, const SequenceTrace& trace,
                   Index steps, LSTMWeights& gradients) {
    const LSTMWeights& w = model.weights;
    const Activation gate = model.config.recurrent_activation;
    const Activation cell = model.config.cell_activation;
    const int n = model.hidden_units();
    gradients = LSTMWeights::zeros(n);

    Vector dh_next = Vector::Zero(n);
    Vector dc_next = Vector::Zero(n);
    const double loss_scale = 2.0 / static_cast<double>(steps);
    for (Index t = steps - 1; t >= 0; --t) {
        const double dy = loss_scale * (trace.y[t] - targets[t]);
        gradients.v_out += dy * trace.h.col(t);
        gradients.b_out += dy;

        const Vector dh = dy * w.v_out + dh_next;
        const Array d_o = dh.array() * trace.u.col(t).array();
        const Array da_o = d_o * activation_derivative(gate, trace.a_o.col(t).array(), trace.o.col(t).array());

        const Array du = dh.array() * trace.o.col(t).array();
        const Array dc =
            du * activation_derivative(cell, trace.c.col(t).array(), trace.u.col(t).array()) + dc_next.array();

        const Array c_prev =
            t > 0 ? Array(trace.c.col(t - 1).array()) : Array(Array::Zero(n));
        const Array d_f = dc * c_prev;
        const Array da_f = d_f * activation_derivative(gate, trace.a_f.col(t).array(), trace.f.col(t).array());
        const Array d_i = dc * trace.g.col(t).array();
        const Array da_i = d_i * activation_derivative(gate, trace.a_i.col(t).array(), trace.i.col(t).array());
        const Array d_g = dc * trace.i.col(t).array();
        const Array da_c = d_g * activation_derivative(cell, trace.a_c.col(t).array(), trace.g.col(t).array());

        const double x = inputs[t];
        const Vector h_prev = t > 0 ? Vector(trace.h.col(t - 1)) : Vector(Vector::Zero(n));
        gradients.W_f += x * da_f.matrix();
        gradients.W_i += x * da_i.matrix();
        gradients.W_o += x * da_o.matrix();
        gradients.W_c += x * da_c.matrix();
        gradients.U_f.noalias() += da_f.matrix() * h_prev.transpose();
        gradients.U_i.noalias() += da_i.matrix() * h_prev.transpose();
        gradients.U_o.noalias() += da_o.matrix() * h_prev.transpose();
        gradients.U_c.noalias() += da_c.matrix() * h_prev.transpose();
        gradients.b_f += da_f.matrix();
        gradients.b_i += da_i.matrix();
        gradients.b_o += da_o.matrix();
        gradients.b_c += da_c.matrix();

        dh_next = w.U_f.transpose() * da_f.matrix() + w.U_i.transpose() * da_i.matrix() +
                  w.U_o.transpose() * da_o.matrix() + w.U_c.transpose() * da_c.matrix();
        dc_next = (dc * trace.f.col(t).array()).matrix();
    }
}

Vector lagged_inputs(const Vector& series) { return series.head(series.size() - 1); }
Vector lagged_targets(const Vector& series) { return series.tail(series.size() - 1); }

} // namespace

LSTMModel init_model(const LSTMConfig& config) {
    config.validate();
    const int n = config.hidden_units;
    LSTMModel model;
    model.config = config;
    model.weights = LSTMWeights::zeros(n);

    std::mt19937_64 rng(config.seed);
    auto glorot_fill = [&rng](auto& tensor, double fan_in, double fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> uniform(-limit, limit);
        for (Index j = 0; j < tensor.cols(); ++j)
            for (Index i = 0; i < tensor.rows(); ++i) tensor(i, j) = uniform(rng);
    };
    LSTMWeights& w = model.weights;
    glorot_fill(w.W_f, 1, n);
    glorot_fill(w.W_i, 1, n);
    glorot_fill(w.W_o, 1, n);
    glorot_fill(w.W_c, 1, n);
    glorot_fill(w.U_f, n, n);
    glorot_fill(w.U_i, n, n);
    glorot_fill(w.U_o, n, n);
    glorot_fill(w.U_c, n, n);
    glorot_fill(w.v_out, n, 1);
    w.b_f = Vector::Ones(n); // open forget gates at the start
    return model;
}

std::pair<double, StateCarry> lstm_step(const LSTMModel& model, double x, const StateCarry& state) {
    const LSTMWeights& w = model.weights;
    const Activation gate = model.config.recurrent_activation;
    const Activation cell = model.config.cell_activation;
    if (!state.h.allFinite() || !state.c.allFinite())
        throw TrainingDivergence("lstm_step: non-finite state");

    const Array f = apply_activation(gate, (w.W_f * x + w.U_f * state.h + w.b_f).array());
    const Array i = apply_activation(gate, (w.W_i * x + w.U_i * state.h + w.b_i).array());
    const Array o = apply_activation(gate, (w.W_o * x + w.U_o * state.h + w.b_o).array());
    const Array g = apply_activation(cell, (w.W_c * x + w.U_c * state.h + w.b_c).array());

    StateCarry next;
    next.c = (f * state.c.array() + i * g).matrix();
    next.h = (o * apply_activation(cell, next.c.array())).matrix();
    const double y = w.v_out.dot(next.h) + w.b_out;
    if (!std::isfinite(y) || !next.h.allFinite() || !next.c.allFinite())
        throw TrainingDivergence("lstm_step: non-finite output; try a smaller learning rate");
    return {y, next};
}

ForwardTrace forward_sequence(const LSTMModel& model, const Vector& inputs) {
    ForwardTrace result;
    result.outputs.resize(inputs.size());
    result.states.reserve(inputs.size());
    StateCarry state = StateCarry::zeros(model.hidden_units());
    for (Index t = 0; t < inputs.size(); ++t) {
        auto [y, next] = lstm_step(model, inputs[t], state);
        result.outputs[t] = y;
        result.states.push_back(next);
        state = std::move(next);
    }
    return result;
}

double sequence_loss(const LSTMModel& model, const Vector& scaled_inputs, const Vector& scaled_targets) {
    if (scaled_inputs.size() != scaled_targets.size()) throw std::invalid_argument("sequence_loss: length mismatch");
    SequenceTrace trace(model.hidden_units(), scaled_inputs.size());
    forward_pass(model, scaled_inputs, trace);
    return mse_over(trace.y, scaled_targets, 0, scaled_targets.size());
}

double loss_and_gradients(const LSTMModel& model, const Vector& scaled_inputs, const Vector& scaled_targets,
                          LSTMWeights& gradients) {
    if (scaled_inputs.size() != scaled_targets.size())
        throw std::invalid_argument("loss_and_gradients: length mismatch");
    SequenceTrace trace(model.hidden_units(), scaled_inputs.size());
    forward_pass(model, scaled_inputs, trace);
    backward_pass(model, scaled_inputs, scaled_targets, trace, scaled_inputs.size(), gradients);
    return mse_over(trace.y, scaled_targets, 0, scaled_targets.size());
}

LSTMTrainResult train(const LSTMConfig& config, const Vector& series, Index validation_points) {
    config.validate();
    if (series.size() < 3) throw std::invalid_argument("train: series must have at least 3 points");
    const Index pairs = series.size() - 1;
    if (validation_points < 0 || validation_points >= pairs)
        throw std::invalid_argument("train: validation_points out of range");
    const Index train_pairs = pairs - validation_points;

    LSTMModel model = init_model(config);
    // Scaler fitted on the values the training pairs touch, never the validation tail.
    model.scaler = MinMaxScaler::fit(series.head(train_pairs + 1));

    const Vector inputs = model.scaler.scale(lagged_inputs(series));
    const Vector targets = model.scaler.scale(lagged_targets(series));

    LSTMTrainResult result;
    result.model = model;
    SequenceTrace trace(model.hidden_units(), pairs);
    LSTMWeights gradients = LSTMWeights::zeros(model.hidden_units());

    double best_validation = std::numeric_limits<double>::infinity();
    LSTMWeights best_weights = model.weights;
    int best_epoch = 0;
    int epochs_since_best = 0;
    int plateau_run = 0;
    double previous_train = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        forward_pass(model, inputs, trace);
        backward_pass(model, inputs, targets, trace, train_pairs, gradients);
        const double train_loss = mse_over(trace.y, targets, 0, train_pairs);
        if (!std::isfinite(train_loss))
            throw TrainingDivergence("train: loss diverged; try a smaller learning rate");
        result.train_loss.push_back(train_loss);

        if (validation_points > 0) {
            const double validation_loss = mse_over(trace.y, targets, train_pairs, validation_points);
            result.validation_loss.push_back(validation_loss);
            if (validation_loss < best_validation) {
                best_validation = validation_loss;
                best_weights = model.weights;
                best_epoch = epoch;
                epochs_since_best = 0;
            } else if (++epochs_since_best > config.patience) {
                break;
            }
        } else {
            best_weights = model.weights;
            best_epoch = epoch;
            if (std::abs(previous_train - train_loss) < 1e-12 * std::max(1.0, train_loss)) {
                if (++plateau_run >= 25) break;
            } else {
                plateau_run = 0;
            }
            previous_train = train_loss;
        }

        const double norm = std::sqrt(gradients.squared_norm());
        if (norm > kGradientClipNorm) gradients.scale(kGradientClipNorm / norm);
        model.weights.add_scaled(gradients, -config.learning_rate);
    }

    model.weights = best_weights;
    result.model = model;
    result.best_epoch = best_epoch;
    return result;
}

GridSearchResult grid_search(const Vector& series, const std::vector<LSTMConfig>& grid,
                             double validation_fraction) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
    if (series.size() < 3) throw std::invalid_argument("grid_search: series must have at least 3 points");
    const Index pairs = series.size() - 1;
    Index validation_points = static_cast<Index>(std::llround(validation_fraction * static_cast<double>(pairs)));
    validation_points = std::max<Index>(1, std::min(validation_points, pairs - 1));

    GridSearchResult result;
    result.validation_mse.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    bool any_trained = false;
    std::size_t best_index = 0;
    auto better = [&grid](std::size_t lhs, double lhs_mse, std::size_t rhs, double rhs_mse) {
        if (lhs_mse != rhs_mse) return lhs_mse < rhs_mse;
        if (grid[lhs].hidden_units != grid[rhs].hidden_units)
            return grid[lhs].hidden_units < grid[rhs].hidden_units;
        if (grid[lhs].learning_rate != grid[rhs].learning_rate)
            return grid[lhs].learning_rate < grid[rhs].learning_rate;
        return lhs < rhs;
    };

    for (std::size_t k = 0; k < grid.size(); ++k) {
        try {
            const LSTMTrainResult trained = train(grid[k], series, validation_points);
            const double score = *std::min_element(trained.validation_loss.begin(), trained.validation_loss.end());
            result.validation_mse[k] = score;
            if (!any_trained || better(k, score, best_index, result.validation_mse[best_index])) {
                best_index = k;
                any_trained = true;
            }
        } catch (const TrainingDivergence&) {
            // Recorded as NaN; the config simply cannot win.
        }
    }
    if (!any_trained) throw TrainingDivergence("grid_search: every configuration diverged");
    result.best = grid[best_index];
    return result;
}

StateCarry final_training_state(const LSTMModel& model, const Vector& series) {
    const ForwardTrace trace = forward_sequence(model, model.scaler.scale(series));
    if (trace.states.empty()) return StateCarry::zeros(model.hidden_units());
    return trace.states.back();
}

Vector fitted_one_step(const LSTMModel& model, const Vector& series) {
    if (series.size() < 2) throw std::invalid_argument("fitted_one_step: need at least 2 points");
    const ForwardTrace trace = forward_sequence(model, model.scaler.scale(lagged_inputs(series)));
    Vector fitted(trace.outputs.size());
    for (Index t = 0; t < fitted.size(); ++t) fitted[t] = model.scaler.unscale(trace.outputs[t]);
    return fitted;
}

Vector forecast_recursive(const LSTMModel& model, double last_observed, const StateCarry& state, int horizon) {
    if (horizon < 1) throw std::invalid_argument("forecast_recursive: horizon must be >= 1");
    Vector forecasts(horizon);
    StateCarry carry = state;
    double x = model.scaler.scale(last_observed);
    for (int h = 0; h < horizon; ++h) {
        auto [y, next] = lstm_step(model, x, carry);
        forecasts[h] = model.scaler.unscale(y);
        carry = std::move(next);
        x = y;
    }
    return forecasts;
}

namespace {

void write_vector(std::ostream& out, const char* key, const Vector& v) {
    out << key;
    for (Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v[i]);
    out << '\n';
}

void write_matrix(std::ostream& out, const char* key, const Matrix& m) {
    out << key;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) out << ' ' << format_double(m(i, j));
    out << '\n';
}

std::vector<std::string> expect_line(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_model: truncated file at '" + key + "'");
    std::istringstream stream(line);
    std::string token;
    std::vector<std::string> fields;
    while (stream >> token) fields.push_back(token);
    if (fields.empty() || fields[0] != key)
        throw std::runtime_error("load_model: expected key '" + key + "'");
    return fields;
}

Vector read_vector(std::istream& in, const std::string& key, Index size) {
    const auto fields = expect_line(in, key);
    if (static_cast<Index>(fields.size()) != size + 1)
        throw std::runtime_error("load_model: wrong arity for '" + key + "'");
    Vector v(size);
    for (Index i = 0; i < size; ++i) v[i] = parse_double(fields[i + 1]);
    return v;
}

Matrix read_matrix(std::istream& in, const std::string& key, Index rows, Index cols) {
    const auto fields = expect_line(in, key);
    if (static_cast<Index>(fields.size()) != rows * cols + 1)
        throw std::runtime_error("load_model: wrong arity for '" + key + "'");
    Matrix m(rows, cols);
    Index pos = 1;
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = parse_double(fields[pos++]);
    return m;
}

} // namespace

void save_model(const LSTMModel& model, std::ostream& out) {
    const LSTMConfig& cfg = model.config;
    out << "mortcast-lstm-v1\n";
    out << "hidden_units " << cfg.hidden_units << '\n';
    out << "cell_activation " << to_string(cfg.cell_activation) << '\n';
    out << "gate_activation " << to_string(cfg.gate_activation) << '\n';
    out << "recurrent_activation " << to_string(cfg.recurrent_activation) << '\n';
    out << "output_activation " << to_string(cfg.output_activation) << '\n';
    out << "learning_rate " << format_double(cfg.learning_rate) << '\n';
    out << "max_epochs " << cfg.max_epochs << '\n';
    out << "patience " << cfg.patience << '\n';
    out << "seed " << cfg.seed << '\n';
    out << "scaling " << cfg.scaling << '\n';
    out << "scaler " << format_double(model.scaler.center) << ' ' << format_double(model.scaler.halfwidth) << '\n';
    const LSTMWeights& w = model.weights;
    write_vector(out, "W_f", w.W_f);
    write_vector(out, "W_i", w.W_i);
    write_vector(out, "W_o", w.W_o);
    write_vector(out, "W_c", w.W_c);
    write_matrix(out, "U_f", w.U_f);
    write_matrix(out, "U_i", w.U_i);
    write_matrix(out, "U_o", w.U_o);
    write_matrix(out, "U_c", w.U_c);
    write_vector(out, "b_f", w.b_f);
    write_vector(out, "b_i", w.b_i);
    write_vector(out, "b_o", w.b_o);
    write_vector(out, "b_c", w.b_c);
    write_vector(out, "v_out", w.v_out);
    out << "b_out " << format_double(w.b_out) << '\n';
}

LSTMModel load_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "mortcast-lstm-v1")
        throw std::runtime_error("load_model: unrecognized format line");
    LSTMConfig cfg;
    cfg.hidden_units = static_cast<int>(parse_long(expect_line(in, "hidden_units").at(1)));
    cfg.cell_activation = activation_from_string(expect_line(in, "cell_activation").at(1));
    cfg.gate_activation = activation_from_string(expect_line(in, "gate_activation").at(1));
    cfg.recurrent_activation = activation_from_string(expect_line(in, "recurrent_activation").at(1));
    cfg.output_activation = activation_from_string(expect_line(in, "output_activation").at(1));
    cfg.learning_rate = parse_double(expect_line(in, "learning_rate").at(1));
    cfg.max_epochs = static_cast<int>(parse_long(expect_line(in, "max_epochs").at(1)));
    cfg.patience = static_cast<int>(parse_long(expect_line(in, "patience").at(1)));
    cfg.seed = static_cast<std::uint64_t>(std::stoull(expect_line(in, "seed").at(1)));
    cfg.scaling = expect_line(in, "scaling").at(1);
    cfg.validate();

    LSTMModel model;
    model.config = cfg;
    const auto scaler_fields = expect_line(in, "scaler");
    model.scaler.center = parse_double(scaler_fields.at(1));
    model.scaler.halfwidth = parse_double(scaler_fields.at(2));

    const Index n = cfg.hidden_units;
    LSTMWeights& w = model.weights;
    w.W_f = read_vector(in, "W_f", n);
    w.W_i = read_vector(in, "W_i", n);
    w.W_o = read_vector(in, "W_o", n);
    w.W_c = read_vector(in, "W_c", n);
    w.U_f = read_matrix(in, "U_f", n, n);
    w.U_i = read_matrix(in, "U_i", n, n);
    w.U_o = read_matrix(in, "U_o", n, n);
    w.U_c = read_matrix(in, "U_c", n, n);
    w.b_f = read_vector(in, "b_f", n);
    w.b_i = read_vector(in, "b_i", n);
    w.b_o = read_vector(in, "b_o", n);
    w.b_c = read_vector(in, "b_c", n);
    w.v_out = read_vector(in, "v_out", n);
    w.b_out = parse_double(expect_line(in, "b_out").at(1));
    return model;
}

} // namespace mortcast
