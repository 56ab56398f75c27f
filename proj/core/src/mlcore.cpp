#include "ordpick/mlcore.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ordpick/util.hpp"

namespace ordpick {

std::string family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::knn: return "KNN";
        case ModelFamily::dt: return "DT";
        case ModelFamily::mlp: return "MLP";
        case ModelFamily::lsvm: return "SVM";
    }
    return "";
}

std::optional<ModelFamily> family_from_name(std::string_view name) {
    if (name == "KNN") return ModelFamily::knn;
    if (name == "DT") return ModelFamily::dt;
    if (name == "MLP") return ModelFamily::mlp;
    if (name == "SVM" || name == "LSVM") return ModelFamily::lsvm;
    return std::nullopt;
}

std::string objective_name(CvObjective o) {
    return o == CvObjective::accuracy ? "accuracy" : "time";
}

Standardizer standardize_fit(const FeatureMatrix& x) {
    if (x.n_rows == 0) throw std::invalid_argument("standardize_fit: empty matrix");
    Standardizer st;
    st.mean.resize(x.n_cols);
    st.scale.resize(x.n_cols);
    st.zero_variance.resize(x.n_cols);
    for (std::size_t c = 0; c < x.n_cols; ++c) {
        double sum = 0;
        for (std::size_t r = 0; r < x.n_rows; ++r) sum += x.at(r, c);
        double mean = sum / static_cast<double>(x.n_rows);
        double var = 0;
        for (std::size_t r = 0; r < x.n_rows; ++r) {
            double d = x.at(r, c) - mean;
            var += d * d;
        }
        var /= static_cast<double>(x.n_rows);
        double sigma = std::sqrt(var);
        st.mean[c] = mean;
        st.zero_variance[c] = sigma == 0.0 ? 1 : 0;
        st.scale[c] = sigma == 0.0 ? 1.0 : sigma;
    }
    return st;
}

FeatureMatrix standardize_apply(const Standardizer& st, const FeatureMatrix& x) {
    if (x.n_cols != st.mean.size())
        throw std::invalid_argument("standardize_apply: column count mismatch");
    FeatureMatrix out(x.n_rows, x.n_cols);
    for (std::size_t r = 0; r < x.n_rows; ++r)
        for (std::size_t c = 0; c < x.n_cols; ++c)
            out.at(r, c) = st.zero_variance[c] ? 0.0 : (x.at(r, c) - st.mean[c]) / st.scale[c];
    return out;
}

namespace {

int majority_label(const std::vector<double>& weight_per_label) {
    std::size_t best = 0;
    for (std::size_t l = 1; l < weight_per_label.size(); ++l)
        if (weight_per_label[l] > weight_per_label[best]) best = l;
    return static_cast<int>(best);
}

std::vector<int> knn_predict(const KnnState& state, const KnnParams& params, int n_labels,
                             const FeatureMatrix& x) {
    std::size_t n_train = state.x.n_rows;
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(params.k, 1)), n_train);
    std::vector<int> out;
    out.reserve(x.n_rows);
    std::vector<std::pair<double, std::size_t>> dist(n_train);
    for (std::size_t r = 0; r < x.n_rows; ++r) {
        for (std::size_t i = 0; i < n_train; ++i) {
            double d2 = 0;
            for (std::size_t c = 0; c < x.n_cols; ++c) {
                double d = x.at(r, c) - state.x.at(i, c);
                d2 += d * d;
            }
            dist[i] = {d2, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::vector<double> votes(static_cast<std::size_t>(n_labels), 0.0);
        bool any_exact = false;
        if (params.weighting == KnnWeighting::inverse_distance)
            for (std::size_t i = 0; i < k; ++i) any_exact |= dist[i].first == 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            int label = state.y[dist[i].second];
            double w = 1.0;
            if (params.weighting == KnnWeighting::inverse_distance) {
                if (any_exact)
                    w = dist[i].first == 0.0 ? 1.0 : 0.0;  // exact matches dominate
                else
                    w = 1.0 / std::sqrt(dist[i].first);
            }
            votes[static_cast<std::size_t>(label)] += w;
        }
        out.push_back(majority_label(votes));
    }
    return out;
}

}  // namespace

// Implemented in tree.cpp / mlp.cpp / svm.cpp.
DtState dt_train(const DtParams&, const FeatureMatrix&, const std::vector<int>&, int n_labels);
std::vector<int> dt_predict(const DtState&, const FeatureMatrix&);
MlpState mlp_train(const MlpParams&, const FeatureMatrix&, const std::vector<int>&, int n_labels,
                   std::uint64_t seed);
std::vector<int> mlp_predict(const MlpState&, const FeatureMatrix&);
LsvmState lsvm_train(const LsvmParams&, const FeatureMatrix&, const std::vector<int>&,
                     int n_labels);
std::vector<int> lsvm_predict(const LsvmState&, const FeatureMatrix&);

TrainedModel train(const ModelSpec& spec, const FeatureMatrix& x_std, const std::vector<int>& y,
                   int n_labels, std::uint64_t seed) {
    if (x_std.n_rows == 0 || x_std.n_rows != y.size())
        throw std::invalid_argument("train: empty data or row/label mismatch");
    if (n_labels < 1) throw std::invalid_argument("train: empty class set");
    for (int label : y)
        if (label < 0 || label >= n_labels) throw std::invalid_argument("train: label out of range");
    for (double v : x_std.values)
        if (std::isnan(v)) throw std::invalid_argument("train: NaN in features");

    TrainedModel model;
    model.spec = spec;
    model.n_labels = n_labels;
    switch (spec.family) {
        case ModelFamily::knn: {
            KnnState state;
            state.x = x_std;
            state.y = y;
            model.state = std::move(state);
            break;
        }
        case ModelFamily::dt:
            model.state = dt_train(std::get<DtParams>(spec.params), x_std, y, n_labels);
            break;
        case ModelFamily::mlp:
            model.state = mlp_train(std::get<MlpParams>(spec.params), x_std, y, n_labels, seed);
            break;
        case ModelFamily::lsvm:
            model.state = lsvm_train(std::get<LsvmParams>(spec.params), x_std, y, n_labels);
            break;
    }
    return model;
}

TrainedModel fit_model(const ModelSpec& spec, const FeatureMatrix& x_raw,
                       const std::vector<int>& y, int n_labels, std::uint64_t seed) {
    Standardizer st = standardize_fit(x_raw);
    TrainedModel model = train(spec, standardize_apply(st, x_raw), y, n_labels, seed);
    model.standardizer = std::move(st);
    return model;
}

std::vector<int> predict(const TrainedModel& model, const FeatureMatrix& x_raw) {
    if (x_raw.n_cols != model.standardizer.mean.size())
        throw std::invalid_argument("predict: column count mismatch");
    FeatureMatrix x = standardize_apply(model.standardizer, x_raw);
    if (const auto* knn = std::get_if<KnnState>(&model.state))
        return knn_predict(*knn, std::get<KnnParams>(model.spec.params), model.n_labels, x);
    if (const auto* dt = std::get_if<DtState>(&model.state)) return dt_predict(*dt, x);
    if (const auto* mlp = std::get_if<MlpState>(&model.state)) return mlp_predict(*mlp, x);
    return lsvm_predict(std::get<LsvmState>(model.state), x);
}

std::vector<ModelSpec> sample_candidates(ModelFamily family, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform_int = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    auto log_uniform = [&rng](double lo, double hi) {
        std::uniform_real_distribution<double> dist(std::log10(lo), std::log10(hi));
        return std::pow(10.0, dist(rng));
    };
    std::vector<ModelSpec> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        ModelSpec spec;
        spec.family = family;
        switch (family) {
            case ModelFamily::knn:
                spec.params = KnnParams{uniform_int(1, 30), uniform_int(0, 1)
                                                                ? KnnWeighting::inverse_distance
                                                                : KnnWeighting::uniform};
                break;
            case ModelFamily::dt:
                spec.params = DtParams{uniform_int(2, 20), uniform_int(2, 10),
                                       uniform_int(0, 1) ? SplitCriterion::entropy
                                                         : SplitCriterion::gini};
                break;
            case ModelFamily::mlp:
                spec.params = MlpParams{uniform_int(4, 64), log_uniform(1e-4, 1e-1),
                                        uniform_int(50, 400), log_uniform(1e-6, 1e-2)};
                break;
            case ModelFamily::lsvm:
                spec.params = LsvmParams{log_uniform(1e-3, 1e3), uniform_int(50, 400),
                                         log_uniform(1e-4, 1e-1)};
                break;
        }
        out.push_back(std::move(spec));
    }
    return out;
}

namespace {

std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(derive_seed(seed, "cv-folds"));
    deterministic_shuffle(order, rng);
    std::vector<int> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    return fold_of;
}

}  // namespace

CvScores cv_evaluate(const ModelSpec& spec, const TrainingSet& data, const CVConfig& cfg) {
    std::size_t n = data.x.n_rows;
    if (cfg.folds < 2 || static_cast<std::size_t>(cfg.folds) > n)
        throw std::invalid_argument("cv_evaluate: fold count out of range");
    if (data.y.size() != n || data.timings.size() != n)
        throw std::invalid_argument("cv_evaluate: misaligned training set");
    int n_labels = static_cast<int>(data.timings.front().costs.size());

    std::vector<int> fold_of = fold_assignment(n, cfg.folds, cfg.seed);
    std::size_t correct = 0;
    double total_time = 0;
    for (int f = 0; f < cfg.folds; ++f) {
        std::vector<std::size_t> train_rows, val_rows;
        for (std::size_t i = 0; i < n; ++i)
            (fold_of[i] == f ? val_rows : train_rows).push_back(i);
        FeatureMatrix x_train(train_rows.size(), data.x.n_cols);
        FeatureMatrix x_val(val_rows.size(), data.x.n_cols);
        std::vector<int> y_train(train_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            for (std::size_t c = 0; c < data.x.n_cols; ++c)
                x_train.at(i, c) = data.x.at(train_rows[i], c);
            y_train[i] = data.y[train_rows[i]];
        }
        for (std::size_t i = 0; i < val_rows.size(); ++i)
            for (std::size_t c = 0; c < data.x.n_cols; ++c)
                x_val.at(i, c) = data.x.at(val_rows[i], c);

        TrainedModel model = fit_model(spec, x_train, y_train, n_labels,
                                       derive_seed(cfg.seed, "cv-train-fold-" + std::to_string(f)));
        std::vector<int> pred = predict(model, x_val);
        for (std::size_t i = 0; i < val_rows.size(); ++i) {
            if (pred[i] == data.y[val_rows[i]]) ++correct;
            total_time += data.timings[val_rows[i]].costs[static_cast<std::size_t>(pred[i])];
        }
    }
    return CvScores{static_cast<double>(correct) / static_cast<double>(n), total_time};
}

CvChoice cv_search(ModelFamily family, const TrainingSet& data, const CVConfig& cfg) {
    if (cfg.n_candidates < 1) throw std::invalid_argument("cv_search: need at least one candidate");
    auto candidates = sample_candidates(
        family, cfg.n_candidates, derive_seed(cfg.seed, "cv-candidates-" + family_name(family)));
    CvChoice best;
    bool have_best = false;
    for (const ModelSpec& spec : candidates) {
        CvScores scores = cv_evaluate(spec, data, cfg);
        bool better;
        if (!have_best)
            better = true;
        else if (cfg.objective == CvObjective::accuracy)
            better = scores.accuracy > best.scores.accuracy;
        else
            better = scores.total_time < best.scores.total_time;
        if (better) {
            best.spec = spec;
            best.scores = scores;
            have_best = true;
        }
    }
    best.cv_score =
        cfg.objective == CvObjective::accuracy ? best.scores.accuracy : best.scores.total_time;
    return best;
}

double metric_accuracy_within(const std::vector<int>& pred, const std::vector<TimingRecord>& t,
                              double x_percent) {
    if (pred.size() != t.size())
        throw std::invalid_argument("metric_accuracy_within: misaligned inputs");
    if (pred.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double chosen = t[i].costs[static_cast<std::size_t>(pred[i])];
        double best = *std::min_element(t[i].costs.begin(), t[i].costs.end());
        if (chosen <= (1.0 + x_percent / 100.0) * best) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double metric_total_time(const std::vector<int>& pred, const std::vector<TimingRecord>& t,
                         double prediction_seconds) {
    if (pred.size() != t.size()) throw std::invalid_argument("metric_total_time: misaligned inputs");
    double total = prediction_seconds;
    for (std::size_t i = 0; i < pred.size(); ++i)
        total += t[i].costs[static_cast<std::size_t>(pred[i])];
    return total;
}

}  // namespace ordpick
