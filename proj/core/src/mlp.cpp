#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <vector>

#include "ordpick/mlcore.hpp"
#include "ordpick/util.hpp"

namespace ordpick {

namespace {

constexpr std::size_t kBatchSize = 32;

// Forward pass for one row; fills hidden activations and output
// probabilities (softmax with max subtraction).
void forward(const MlpState& s, const FeatureMatrix& x, std::size_t row, std::vector<double>& h,
             std::vector<double>& p) {
    auto in = static_cast<std::size_t>(s.n_in);
    auto hid = static_cast<std::size_t>(s.n_hidden);
    auto out = static_cast<std::size_t>(s.n_out);
    for (std::size_t j = 0; j < hid; ++j) {
        double z = s.b1[j];
        for (std::size_t i = 0; i < in; ++i) z += s.w1[j * in + i] * x.at(row, i);
        h[j] = std::tanh(z);
    }
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < out; ++k) {
        double z = s.b2[k];
        for (std::size_t j = 0; j < hid; ++j) z += s.w2[k * hid + j] * h[j];
        p[k] = z;
        zmax = std::max(zmax, z);
    }
    double sum = 0;
    for (std::size_t k = 0; k < out; ++k) {
        p[k] = std::exp(p[k] - zmax);
        sum += p[k];
    }
    for (std::size_t k = 0; k < out; ++k) p[k] /= sum;
}

// Mean cross-entropy over `rows` plus 0.5*l2*(|w1|^2+|w2|^2); gradient is
// accumulated into `grad` packed as [w1, b1, w2, b2].
double batch_loss_and_grad(const MlpState& s, double l2, const FeatureMatrix& x,
                           const std::vector<int>& y, const std::vector<std::size_t>& rows,
                           std::vector<double>& grad) {
    auto in = static_cast<std::size_t>(s.n_in);
    auto hid = static_cast<std::size_t>(s.n_hidden);
    auto out = static_cast<std::size_t>(s.n_out);
    std::size_t w1n = hid * in, w2n = out * hid;
    grad.assign(w1n + hid + w2n + out, 0.0);
    double* gw1 = grad.data();
    double* gb1 = grad.data() + w1n;
    double* gw2 = grad.data() + w1n + hid;
    double* gb2 = grad.data() + w1n + hid + w2n;

    std::vector<double> h(hid), p(out), dz2(out), dz1(hid);
    double loss = 0;
    double inv_b = 1.0 / static_cast<double>(rows.size());
    for (std::size_t row : rows) {
        forward(s, x, row, h, p);
        auto label = static_cast<std::size_t>(y[row]);
        loss -= std::log(std::max(p[label], 1e-300));
        for (std::size_t k = 0; k < out; ++k) dz2[k] = (p[k] - (k == label ? 1.0 : 0.0)) * inv_b;
        for (std::size_t k = 0; k < out; ++k) {
            for (std::size_t j = 0; j < hid; ++j) gw2[k * hid + j] += dz2[k] * h[j];
            gb2[k] += dz2[k];
        }
        for (std::size_t j = 0; j < hid; ++j) {
            double dh = 0;
            for (std::size_t k = 0; k < out; ++k) dh += s.w2[k * hid + j] * dz2[k];
            dz1[j] = dh * (1.0 - h[j] * h[j]);
        }
        for (std::size_t j = 0; j < hid; ++j) {
            if (dz1[j] == 0.0) continue;
            for (std::size_t i = 0; i < in; ++i) gw1[j * in + i] += dz1[j] * x.at(row, i);
            gb1[j] += dz1[j];
        }
    }
    loss *= inv_b;
    double reg = 0;
    for (std::size_t i = 0; i < w1n; ++i) {
        reg += s.w1[i] * s.w1[i];
        gw1[i] += l2 * s.w1[i];
    }
    for (std::size_t i = 0; i < w2n; ++i) {
        reg += s.w2[i] * s.w2[i];
        gw2[i] += l2 * s.w2[i];
    }
    return loss + 0.5 * l2 * reg;
}

void apply_update(MlpState& s, const std::vector<double>& grad, double lr) {
    std::size_t w1n = s.w1.size(), b1n = s.b1.size(), w2n = s.w2.size();
    for (std::size_t i = 0; i < w1n; ++i) s.w1[i] -= lr * grad[i];
    for (std::size_t i = 0; i < b1n; ++i) s.b1[i] -= lr * grad[w1n + i];
    for (std::size_t i = 0; i < w2n; ++i) s.w2[i] -= lr * grad[w1n + b1n + i];
    for (std::size_t i = 0; i < s.b2.size(); ++i) s.b2[i] -= lr * grad[w1n + b1n + w2n + i];
}

}  // namespace

double mlp_loss_and_grad(const MlpState& state, double l2, const FeatureMatrix& x,
                         const std::vector<int>& y, std::vector<double>* grad) {
    std::vector<std::size_t> rows(x.n_rows);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<double> g;
    double loss = batch_loss_and_grad(state, l2, x, y, rows, g);
    if (grad) *grad = std::move(g);
    return loss;
}

MlpState mlp_train(const MlpParams& params, const FeatureMatrix& x, const std::vector<int>& y,
                   int n_labels, std::uint64_t seed) {
    MlpState s;
    s.n_in = static_cast<int>(x.n_cols);
    s.n_hidden = params.hidden_size;
    s.n_out = n_labels;
    auto in = static_cast<std::size_t>(s.n_in);
    auto hid = static_cast<std::size_t>(s.n_hidden);
    auto out = static_cast<std::size_t>(s.n_out);
    s.w1.resize(hid * in);
    s.b1.assign(hid, 0.0);
    s.w2.resize(out * hid);
    s.b2.assign(out, 0.0);

    std::mt19937_64 rng(seed);
    double bound1 = in > 0 ? 1.0 / std::sqrt(static_cast<double>(in)) : 1.0;
    double bound2 = 1.0 / std::sqrt(static_cast<double>(hid));
    std::uniform_real_distribution<double> init1(-bound1, bound1), init2(-bound2, bound2);
    for (double& w : s.w1) w = init1(rng);
    for (double& w : s.w2) w = init2(rng);

    std::vector<std::size_t> order(x.n_rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> grad;
    std::vector<std::size_t> batch;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        deterministic_shuffle(order, rng);
        for (std::size_t begin = 0; begin < order.size(); begin += kBatchSize) {
            std::size_t end = std::min(begin + kBatchSize, order.size());
            batch.assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
            batch_loss_and_grad(s, params.l2, x, y, batch, grad);
            apply_update(s, grad, params.learning_rate);
        }
    }
    return s;
}

std::vector<int> mlp_predict(const MlpState& state, const FeatureMatrix& x) {
    std::vector<int> out;
    out.reserve(x.n_rows);
    std::vector<double> h(static_cast<std::size_t>(state.n_hidden));
    std::vector<double> p(static_cast<std::size_t>(state.n_out));
    for (std::size_t r = 0; r < x.n_rows; ++r) {
        forward(state, x, r, h, p);
        std::size_t best = 0;
        for (std::size_t k = 1; k < p.size(); ++k)
            if (p[k] > p[best]) best = k;
        out.push_back(static_cast<int>(best));
    }
    return out;
}

}  // namespace ordpick
