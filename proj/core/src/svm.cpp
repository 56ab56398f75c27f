#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <vector>

#include "ordpick/mlcore.hpp"

namespace ordpick {

double lsvm_loss_and_grad(const std::vector<double>& w, double b, double c_penalty,
                          const FeatureMatrix& x, const std::vector<int>& targets,
                          std::vector<double>* grad_w, double* grad_b) {
    if (w.size() != x.n_cols || targets.size() != x.n_rows)
        throw std::invalid_argument("lsvm_loss_and_grad: shape mismatch");
    std::vector<double> gw(w.size(), 0.0);
    double gb = 0;
    double hinge_sum = 0;
    double inv_n = 1.0 / static_cast<double>(x.n_rows);
    for (std::size_t r = 0; r < x.n_rows; ++r) {
        double f = b;
        for (std::size_t c = 0; c < x.n_cols; ++c) f += w[c] * x.at(r, c);
        double t = targets[r];
        double margin = 1.0 - t * f;
        if (margin > 0) {
            hinge_sum += margin;
            for (std::size_t c = 0; c < x.n_cols; ++c) gw[c] -= t * x.at(r, c);
            gb -= t;
        }
    }
    double loss = c_penalty * hinge_sum * inv_n;
    for (std::size_t c = 0; c < w.size(); ++c) {
        loss += 0.5 * w[c] * w[c];
        gw[c] = w[c] + c_penalty * inv_n * gw[c];
    }
    gb *= c_penalty * inv_n;
    if (grad_w) *grad_w = std::move(gw);
    if (grad_b) *grad_b = gb;
    return loss;
}

LsvmState lsvm_train(const LsvmParams& params, const FeatureMatrix& x, const std::vector<int>& y,
                     int n_labels) {
    LsvmState s;
    s.n_in = static_cast<int>(x.n_cols);
    s.n_classes = n_labels;
    auto in = static_cast<std::size_t>(s.n_in);
    s.w.assign(static_cast<std::size_t>(n_labels) * in, 0.0);
    s.b.assign(static_cast<std::size_t>(n_labels), 0.0);

    std::vector<int> targets(x.n_rows);
    std::vector<double> w(in), gw;
    double gb = 0;
    for (int label = 0; label < n_labels; ++label) {
        for (std::size_t r = 0; r < x.n_rows; ++r) targets[r] = y[r] == label ? 1 : -1;
        std::fill(w.begin(), w.end(), 0.0);
        double b = 0;
        for (int epoch = 0; epoch < params.epochs; ++epoch) {
            lsvm_loss_and_grad(w, b, params.c, x, targets, &gw, &gb);
            for (std::size_t c = 0; c < in; ++c) w[c] -= params.learning_rate * gw[c];
            b -= params.learning_rate * gb;
        }
        for (std::size_t c = 0; c < in; ++c) s.w[static_cast<std::size_t>(label) * in + c] = w[c];
        s.b[static_cast<std::size_t>(label)] = b;
    }
    return s;
}

std::vector<int> lsvm_predict(const LsvmState& state, const FeatureMatrix& x) {
    auto in = static_cast<std::size_t>(state.n_in);
    auto classes = static_cast<std::size_t>(state.n_classes);
    std::vector<int> out;
    out.reserve(x.n_rows);
    for (std::size_t r = 0; r < x.n_rows; ++r) {
        std::size_t best = 0;
        double best_score = 0;
        for (std::size_t k = 0; k < classes; ++k) {
            double f = state.b[k];
            for (std::size_t c = 0; c < in; ++c) f += state.w[k * in + c] * x.at(r, c);
            if (k == 0 || f > best_score) {
                best_score = f;
                best = k;
            }
        }
        out.push_back(static_cast<int>(best));
    }
    return out;
}

}  // namespace ordpick
