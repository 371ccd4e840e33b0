#ifndef BOAC_FEEL_MODEL_HPP
#define BOAC_FEEL_MODEL_HPP

#include <cmath>
#include <string>
#include <vector>

#include "boac/random.hpp"
#include "boac/types.hpp"

namespace boac
{

enum class Activation
{
    Tanh,
    Relu,
};

/// input -> hidden -> output classifier; hidden = 0 gives softmax regression.
struct MlpShape
{
    Index input = 0;
    Index hidden = 0;
    Index output = 0;
    Activation activation = Activation::Tanh;

    Index parameter_count() const
    {
        if (hidden == 0) {
            return output * input + output;
        }
        return hidden * input + hidden + output * hidden + output;
    }

    void validate() const
    {
        if (input < 1 || output < 2 || hidden < 0) {
            throw DomainError("MlpShape: need input >= 1, output >= 2, hidden >= 0");
        }
    }
};

/// Flat parameter vector. Layout: W1 (hidden x input, column-major), b1,
/// W2 (output x hidden), b2; without a hidden layer just W (output x input), b.
struct ModelParams
{
    MlpShape shape;
    RVector w;

    void validate() const
    {
        shape.validate();
        if (w.size() != shape.parameter_count()) {
            throw DomainError("ModelParams: parameter count does not match the shape");
        }
        if (!w.allFinite()) {
            throw DomainError("ModelParams: non-finite parameters");
        }
    }
};

/// Xavier-uniform weights, zero biases.
inline ModelParams init_model(const MlpShape& shape, std::uint64_t seed)
{
    shape.validate();
    ModelParams m{shape, RVector::Zero(shape.parameter_count())};
    Rng rng(seed);
    auto fill = [&](Index offset, Index rows, Index cols) {
        const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (Index j = 0; j < rows * cols; ++j) {
            m.w(offset + j) = rng.uniform(-a, a);
        }
    };
    if (shape.hidden == 0) {
        fill(0, shape.output, shape.input);
    } else {
        fill(0, shape.hidden, shape.input);
        fill(shape.hidden * shape.input + shape.hidden, shape.output, shape.hidden);
    }
    return m;
}

/// Examples as rows of `features`, labels in [0, classes).
struct Dataset
{
    RMatrix features;
    std::vector<int> labels;
    int classes = 0;

    Index size() const noexcept { return features.rows(); }
    Index dims() const noexcept { return features.cols(); }

    void validate() const
    {
        if (static_cast<Index>(labels.size()) != features.rows()) {
            throw DomainError("Dataset: label count differs from example count");
        }
        for (int y : labels) {
            if (y < 0 || y >= classes) {
                throw DomainError("Dataset: label out of class range");
            }
        }
    }

    Dataset subset(const std::vector<Index>& rows) const
    {
        Dataset d;
        d.classes = classes;
        d.features.resize(static_cast<Index>(rows.size()), dims());
        d.labels.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            d.features.row(static_cast<Index>(i)) = features.row(rows[i]);
            d.labels[i] = labels[static_cast<std::size_t>(rows[i])];
        }
        return d;
    }
};

namespace detail
{

struct LayerViews
{
    Eigen::Map<const RMatrix> w1;
    Eigen::Map<const RVector> b1;
    Eigen::Map<const RMatrix> w2;
    Eigen::Map<const RVector> b2;
};

inline LayerViews layer_views(const ModelParams& m)
{
    const auto& s = m.shape;
    const double* p = m.w.data();
    if (s.hidden == 0) {
        return {Eigen::Map<const RMatrix>(p, s.output, s.input),
                Eigen::Map<const RVector>(p + s.output * s.input, s.output),
                Eigen::Map<const RMatrix>(nullptr, 0, 0), Eigen::Map<const RVector>(nullptr, 0)};
    }
    const Index o1 = s.hidden * s.input;
    const Index o2 = o1 + s.hidden;
    const Index o3 = o2 + s.output * s.hidden;
    return {Eigen::Map<const RMatrix>(p, s.hidden, s.input),
            Eigen::Map<const RVector>(p + o1, s.hidden),
            Eigen::Map<const RMatrix>(p + o2, s.output, s.hidden),
            Eigen::Map<const RVector>(p + o3, s.output)};
}

inline double activate(double x, Activation a)
{
    return a == Activation::Tanh ? std::tanh(x) : std::max(0.0, x);
}

/// Derivative expressed through the activation output h.
inline double activate_derivative(double h, Activation a)
{
    return a == Activation::Tanh ? 1.0 - h * h : (h > 0.0 ? 1.0 : 0.0);
}

/// Row-wise log-softmax of logits (examples in columns).
inline RMatrix log_softmax_columns(const RMatrix& logits)
{
    RMatrix out(logits.rows(), logits.cols());
    for (Index j = 0; j < logits.cols(); ++j) {
        const double mx = logits.col(j).maxCoeff();
        const double lse = mx + std::log((logits.col(j).array() - mx).exp().sum());
        out.col(j) = logits.col(j).array() - lse;
    }
    return out;
}

} // namespace detail

/// Logits, one column per example.
inline RMatrix forward(const ModelParams& m, const RMatrix& features)
{
    if (features.cols() != m.shape.input) {
        throw DomainError("forward: feature dimension does not match the model input");
    }
    const auto v = detail::layer_views(m);
    const RMatrix xt = features.transpose();
    if (m.shape.hidden == 0) {
        return (v.w1 * xt).colwise() + v.b1;
    }
    RMatrix h = (v.w1 * xt).colwise() + v.b1;
    h = h.unaryExpr([a = m.shape.activation](double x) { return detail::activate(x, a); });
    return (v.w2 * h).colwise() + v.b2;
}

struct LossGradient
{
    double loss = 0.0;
    RVector gradient;
};

/// Mean cross-entropy over the examples of `data` and its gradient.
inline LossGradient loss_and_gradient(const ModelParams& m, const Dataset& data)
{
    if (data.size() == 0) {
        throw DomainError("loss_and_gradient: empty dataset");
    }
    if (data.dims() != m.shape.input || data.classes != m.shape.output) {
        throw DomainError("loss_and_gradient: dataset shape does not match the model");
    }
    const auto& s = m.shape;
    const auto v = detail::layer_views(m);
    const Index n = data.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    const RMatrix xt = data.features.transpose();

    RMatrix h;
    RMatrix logits;
    if (s.hidden == 0) {
        logits = (v.w1 * xt).colwise() + v.b1;
    } else {
        h = (v.w1 * xt).colwise() + v.b1;
        h = h.unaryExpr([a = s.activation](double x) { return detail::activate(x, a); });
        logits = (v.w2 * h).colwise() + v.b2;
    }
    const RMatrix logp = detail::log_softmax_columns(logits);

    LossGradient out;
    RMatrix delta = logp.array().exp();
    for (Index j = 0; j < n; ++j) {
        const int y = data.labels[static_cast<std::size_t>(j)];
        out.loss -= logp(y, j);
        delta(y, j) -= 1.0;
    }
    out.loss *= inv_n;
    delta *= inv_n;
    if (!std::isfinite(out.loss)) {
        throw GradientError("loss_and_gradient: non-finite loss");
    }

    out.gradient.resize(s.parameter_count());
    double* g = out.gradient.data();
    if (s.hidden == 0) {
        Eigen::Map<RMatrix>(g, s.output, s.input) = delta * data.features;
        Eigen::Map<RVector>(g + s.output * s.input, s.output) = delta.rowwise().sum();
    } else {
        const Index o1 = s.hidden * s.input;
        const Index o2 = o1 + s.hidden;
        const Index o3 = o2 + s.output * s.hidden;
        Eigen::Map<RMatrix>(g + o2, s.output, s.hidden) = delta * h.transpose();
        Eigen::Map<RVector>(g + o3, s.output) = delta.rowwise().sum();
        RMatrix back = v.w2.transpose() * delta;
        for (Index j = 0; j < back.cols(); ++j) {
            for (Index i = 0; i < back.rows(); ++i) {
                back(i, j) *= detail::activate_derivative(h(i, j), s.activation);
            }
        }
        Eigen::Map<RMatrix>(g, s.hidden, s.input) = back * data.features;
        Eigen::Map<RVector>(g + o1, s.hidden) = back.rowwise().sum();
    }
    if (!out.gradient.allFinite()) {
        throw GradientError("loss_and_gradient: non-finite gradient");
    }
    return out;
}

struct Evaluation
{
    double accuracy = 0.0;
    double loss = 0.0;
};

/// Top-1 accuracy and mean cross-entropy.
inline Evaluation evaluate(const ModelParams& m, const Dataset& test)
{
    if (test.size() == 0) {
        throw DomainError("evaluate: empty test set");
    }
    const RMatrix logits = forward(m, test.features);
    const RMatrix logp = detail::log_softmax_columns(logits);
    Evaluation e;
    Index correct = 0;
    for (Index j = 0; j < test.size(); ++j) {
        const int y = test.labels[static_cast<std::size_t>(j)];
        Index arg = 0;
        logits.col(j).maxCoeff(&arg);
        correct += arg == y ? 1 : 0;
        e.loss -= logp(y, j);
    }
    const double n = static_cast<double>(test.size());
    e.accuracy = static_cast<double>(correct) / n;
    e.loss /= n;
    return e;
}

} // namespace boac

#endif
