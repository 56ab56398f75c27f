#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ordpick/mlcore.hpp"
#include "ordpick/util.hpp"
#include "test_oracles.hpp"

using namespace ordpick;

namespace {

FeatureMatrix matrix(std::initializer_list<std::initializer_list<double>> rows) {
    FeatureMatrix m(rows.size(), rows.begin()->size());
    std::size_t r = 0;
    for (const auto& row : rows) {
        std::size_t c = 0;
        for (double v : row) m.at(r, c++) = v;
        ++r;
    }
    return m;
}

FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    FeatureMatrix m(rows, cols);
    for (double& v : m.values) v = value(rng);
    return m;
}

// Synthetic learnable task: label = argmax of the first `labels` features.
TrainingSet synthetic_training_set(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                   int labels) {
    TrainingSet data;
    data.x = random_matrix(rng, rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        int best = 0;
        for (int l = 1; l < labels; ++l)
            if (data.x.at(r, static_cast<std::size_t>(l)) >
                data.x.at(r, static_cast<std::size_t>(best)))
                best = l;
        data.y.push_back(best);
        TimingRecord t;
        t.problem_id = static_cast<int>(r);
        for (int l = 0; l < labels; ++l) {
            t.costs.push_back(l == best ? 1.0 : 2.0 + l);
            t.timed_out.push_back(0);
        }
        data.timings.push_back(std::move(t));
    }
    return data;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("standardize_fit/apply") {
    FeatureMatrix x = matrix({{1, 5, 2}, {3, 5, 4}});
    Standardizer st = standardize_fit(x);
    FeatureMatrix z = standardize_apply(st, x);
    CHECK(z.at(0, 0) == -1.0);
    CHECK(z.at(1, 0) == 1.0);
    CHECK(z.at(0, 1) == 0.0);  // zero-variance column maps to zero
    CHECK(z.at(1, 1) == 0.0);
    CHECK(st.scale[1] == 1.0);
    CHECK(st.zero_variance[1] == 1);

    std::mt19937_64 rng(1);
    FeatureMatrix big = random_matrix(rng, 100, 10);
    Standardizer st2 = standardize_fit(big);
    FeatureMatrix z2 = standardize_apply(st2, big);
    for (std::size_t c = 0; c < z2.n_cols; ++c) {
        double mean = 0, var = 0;
        for (std::size_t r = 0; r < z2.n_rows; ++r) mean += z2.at(r, c);
        mean /= 100.0;
        for (std::size_t r = 0; r < z2.n_rows; ++r) {
            double d = z2.at(r, c) - mean;
            var += d * d;
        }
        var /= 100.0;
        CHECK(std::abs(mean) < 1e-12);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-12);
    }
}

TEST_CASE("knn nearest-neighbor basics") {
    FeatureMatrix x = matrix({{0, 0}, {1, 0}, {0, 1}, {5, 5}, {6, 5}, {5, 6}});
    std::vector<int> y{0, 0, 0, 1, 1, 1};

    ModelSpec k1{ModelFamily::knn, KnnParams{1, KnnWeighting::uniform}};
    TrainedModel m1 = fit_model(k1, x, y, 2, 0);
    CHECK(predict(m1, x) == y);

    ModelSpec k3{ModelFamily::knn, KnnParams{3, KnnWeighting::uniform}};
    TrainedModel m3 = fit_model(k3, x, y, 2, 0);
    FeatureMatrix probe = matrix({{0.4, 0.4}, {5.4, 5.4}});
    CHECK(predict(m3, probe) == std::vector<int>{0, 1});
    CHECK(predict(m3, probe) == predict(m3, probe));

    // Single training point: everything maps to its label.
    FeatureMatrix one = matrix({{2.0, 3.0}});
    TrainedModel single = fit_model(k3, one, {1}, 2, 0);
    CHECK(predict(single, probe) == std::vector<int>{1, 1});

    ModelSpec inv{ModelFamily::knn, KnnParams{3, KnnWeighting::inverse_distance}};
    TrainedModel m_inv = fit_model(inv, x, y, 2, 0);
    CHECK(predict(m_inv, x) == y);  // exact matches dominate the vote

    FeatureMatrix wrong(1, 3);
    CHECK_THROWS_AS(predict(m3, wrong), std::invalid_argument);
}

TEST_CASE("decision tree reaches purity on distinct rows") {
    std::mt19937_64 rng(2);
    FeatureMatrix x = random_matrix(rng, 40, 5);
    std::vector<int> y;
    for (std::size_t r = 0; r < 40; ++r) y.push_back(static_cast<int>(rng() % 3));

    ModelSpec unlimited{ModelFamily::dt, DtParams{0, 2, SplitCriterion::gini}};
    TrainedModel tree = fit_model(unlimited, x, y, 3, 0);
    CHECK(predict(tree, x) == y);

    ModelSpec entropy{ModelFamily::dt, DtParams{0, 2, SplitCriterion::entropy}};
    CHECK(predict(fit_model(entropy, x, y, 3, 0), x) == y);

    // XOR needs a zero-gain first split.
    FeatureMatrix xor_x = matrix({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    std::vector<int> xor_y{0, 1, 1, 0};
    CHECK(predict(fit_model(unlimited, xor_x, xor_y, 2, 0), xor_x) == xor_y);

    ModelSpec stump{ModelFamily::dt, DtParams{1, 2, SplitCriterion::gini}};
    TrainedModel depth1 = fit_model(stump, x, y, 3, 0);
    const auto& nodes = std::get<DtState>(depth1.state).nodes;
    for (const TreeNode& n : nodes)
        if (n.feature >= 0) {
            CHECK(std::get<DtState>(depth1.state).nodes[static_cast<std::size_t>(n.left)].feature ==
                  -1);
            CHECK(std::get<DtState>(depth1.state)
                      .nodes[static_cast<std::size_t>(n.right)]
                      .feature == -1);
        }
}

TEST_CASE("mlp gradient matches central finite differences") {
    std::mt19937_64 rng(3);
    FeatureMatrix x = random_matrix(rng, 5, 4);
    std::vector<int> y{0, 1, 2, 1, 0};

    MlpState state;
    state.n_in = 4;
    state.n_hidden = 6;
    state.n_out = 3;
    std::uniform_real_distribution<double> init(-0.7, 0.7);
    auto fill = [&](std::vector<double>& v, std::size_t n) {
        v.resize(n);
        for (double& w : v) w = init(rng);
    };
    const double l2 = 0.01;
    for (int point = 0; point < 5; ++point) {
        fill(state.w1, 6 * 4);
        fill(state.b1, 6);
        fill(state.w2, 3 * 6);
        fill(state.b2, 3);
        std::vector<double> grad;
        mlp_loss_and_grad(state, l2, x, y, &grad);

        auto param = [&state](std::size_t i) -> double& {
            std::size_t w1n = state.w1.size(), b1n = state.b1.size(), w2n = state.w2.size();
            if (i < w1n) return state.w1[i];
            if (i < w1n + b1n) return state.b1[i - w1n];
            if (i < w1n + b1n + w2n) return state.w2[i - w1n - b1n];
            return state.b2[i - w1n - b1n - w2n];
        };
        const double eps = 1e-6;
        double worst = 0;
        for (std::size_t i = 0; i < grad.size(); ++i) {
            double saved = param(i);
            param(i) = saved + eps;
            double up = mlp_loss_and_grad(state, l2, x, y, nullptr);
            param(i) = saved - eps;
            double down = mlp_loss_and_grad(state, l2, x, y, nullptr);
            param(i) = saved;
            worst = std::max(worst, relative_error(grad[i], (up - down) / (2 * eps)));
        }
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("lsvm gradient matches central finite differences") {
    std::mt19937_64 rng(5);
    FeatureMatrix x = random_matrix(rng, 6, 3);
    std::vector<int> targets{1, -1, 1, -1, 1, -1};
    std::uniform_real_distribution<double> init(-0.9, 0.9);

    for (int point = 0; point < 5; ++point) {
        std::vector<double> w{init(rng), init(rng), init(rng)};
        double b = init(rng);
        std::vector<double> grad_w;
        double grad_b = 0;
        lsvm_loss_and_grad(w, b, 2.0, x, targets, &grad_w, &grad_b);

        const double eps = 1e-6;
        double worst = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            double saved = w[i];
            w[i] = saved + eps;
            double up = lsvm_loss_and_grad(w, b, 2.0, x, targets, nullptr, nullptr);
            w[i] = saved - eps;
            double down = lsvm_loss_and_grad(w, b, 2.0, x, targets, nullptr, nullptr);
            w[i] = saved;
            worst = std::max(worst, relative_error(grad_w[i], (up - down) / (2 * eps)));
        }
        double up = lsvm_loss_and_grad(w, b + eps, 2.0, x, targets, nullptr, nullptr);
        double down = lsvm_loss_and_grad(w, b - eps, 2.0, x, targets, nullptr, nullptr);
        worst = std::max(worst, relative_error(grad_b, (up - down) / (2 * eps)));
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("mlp and lsvm learn a separable toy problem") {
    std::mt19937_64 rng(7);
    TrainingSet data = synthetic_training_set(rng, 80, 6, 3);

    ModelSpec mlp{ModelFamily::mlp, MlpParams{16, 0.05, 200, 1e-4}};
    TrainedModel mlp_model = fit_model(mlp, data.x, data.y, 3, 11);
    std::vector<int> mlp_pred = predict(mlp_model, data.x);
    std::size_t mlp_correct = 0;
    for (std::size_t i = 0; i < data.y.size(); ++i)
        mlp_correct += mlp_pred[i] == data.y[i];
    CHECK(mlp_correct >= 70);

    ModelSpec svm{ModelFamily::lsvm, LsvmParams{5.0, 300, 0.05}};
    TrainedModel svm_model = fit_model(svm, data.x, data.y, 3, 11);
    std::vector<int> svm_pred = predict(svm_model, data.x);
    std::size_t svm_correct = 0;
    for (std::size_t i = 0; i < data.y.size(); ++i)
        svm_correct += svm_pred[i] == data.y[i];
    CHECK(svm_correct >= 70);

    // Determinism: same seed, same model.
    TrainedModel again = fit_model(mlp, data.x, data.y, 3, 11);
    CHECK(std::get<MlpState>(again.state).w1 == std::get<MlpState>(mlp_model.state).w1);
    CHECK(predict(again, data.x) == mlp_pred);
}

TEST_CASE("cv_search honours the objective contract") {
    std::mt19937_64 rng(13);
    TrainingSet data = synthetic_training_set(rng, 60, 5, 3);

    CVConfig cfg;
    cfg.folds = 4;
    cfg.n_candidates = 6;
    cfg.seed = 9;

    // Identical candidate list under both objectives.
    auto list_a = sample_candidates(ModelFamily::dt, 6, 9);
    auto list_b = sample_candidates(ModelFamily::dt, 6, 9);
    for (std::size_t i = 0; i < list_a.size(); ++i)
        CHECK(spec_params_to_string(list_a[i]) == spec_params_to_string(list_b[i]));

    cfg.objective = CvObjective::accuracy;
    CvChoice by_accuracy = cv_search(ModelFamily::dt, data, cfg);
    cfg.objective = CvObjective::time;
    CvChoice by_time = cv_search(ModelFamily::dt, data, cfg);

    // The time winner can only be at least as good on the time metric.
    CHECK(by_time.scores.total_time <= by_accuracy.scores.total_time);
    CHECK(by_accuracy.cv_score == by_accuracy.scores.accuracy);
    CHECK(by_time.cv_score == by_time.scores.total_time);

    CVConfig single = cfg;
    single.n_candidates = 1;
    CvChoice only = cv_search(ModelFamily::knn, data, single);
    CHECK(spec_params_to_string(only.spec) ==
          spec_params_to_string(sample_candidates(
              ModelFamily::knn, 1, derive_seed(single.seed, "cv-candidates-KNN"))[0]));

    CVConfig bad = cfg;
    bad.folds = 100;
    CHECK_THROWS_AS(cv_search(ModelFamily::dt, data, bad), std::invalid_argument);
}

TEST_CASE("metrics") {
    std::vector<TimingRecord> t(1);
    t[0].costs = {1.0, 1.05, 2.0};
    t[0].timed_out = {0, 0, 0};

    CHECK(metric_accuracy_within({1}, t, 10.0) == 1.0);
    CHECK(metric_accuracy_within({1}, t, 0.0) == 0.0);
    CHECK(metric_accuracy_within({0}, t, 0.0) == 1.0);
    CHECK(metric_accuracy_within({2}, t, 10.0) == 0.0);

    std::vector<TimingRecord> two(1);
    two[0].costs = {2.0, 5.0};
    two[0].timed_out = {0, 0};
    CHECK(metric_total_time({1}, two, 0.5) == 5.5);
    CHECK(metric_total_time({0}, two, 0.0) == 2.0);

    std::mt19937_64 rng(21);
    std::vector<TimingRecord> many;
    std::vector<int> pred;
    std::uniform_real_distribution<double> cost(0.5, 5.0);
    for (int i = 0; i < 100; ++i) {
        TimingRecord r;
        for (int j = 0; j < 6; ++j) {
            r.costs.push_back(cost(rng));
            r.timed_out.push_back(0);
        }
        many.push_back(r);
        pred.push_back(static_cast<int>(rng() % 6));
    }
    double expected = 1.25;
    for (int i = 0; i < 100; ++i)
        expected += many[static_cast<std::size_t>(i)].costs[static_cast<std::size_t>(pred[i])];
    CHECK(metric_total_time(pred, many, 1.25) == doctest::Approx(expected).epsilon(1e-12));

    // Monotone in x, saturating at 1.
    double prev = 0;
    for (double x : {0.0, 5.0, 20.0, 100.0, 1e6}) {
        double acc = metric_accuracy_within(pred, many, x);
        CHECK(acc >= prev);
        prev = acc;
    }
    CHECK(prev == 1.0);
}

TEST_CASE("model io round-trips every family") {
    std::mt19937_64 rng(33);
    TrainingSet data = synthetic_training_set(rng, 30, 4, 3);
    FeatureMatrix probe = random_matrix(rng, 10, 4);

    std::vector<ModelSpec> specs{
        ModelSpec{ModelFamily::knn, KnnParams{3, KnnWeighting::inverse_distance}},
        ModelSpec{ModelFamily::dt, DtParams{6, 2, SplitCriterion::entropy}},
        ModelSpec{ModelFamily::mlp, MlpParams{8, 0.03, 60, 1e-5}},
        ModelSpec{ModelFamily::lsvm, LsvmParams{2.0, 80, 0.05}},
    };

    std::ostringstream out;
    std::vector<std::vector<int>> expected;
    for (const ModelSpec& spec : specs) {
        TrainedModel model = fit_model(spec, data.x, data.y, 3, 55);
        expected.push_back(predict(model, probe));
        write_model(out, model);
    }
    std::istringstream in(out.str());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        TrainedModel model = read_model(in, "par.txt");
        CHECK(model.spec.family == specs[i].family);
        CHECK(spec_params_to_string(model.spec) == spec_params_to_string(specs[i]));
        CHECK(predict(model, probe) == expected[i]);
    }

    std::istringstream junk("not a model\n");
    CHECK_THROWS(read_model(junk, "junk.txt"));
}

TEST_CASE("spec strings round-trip") {
    for (ModelFamily family :
         {ModelFamily::knn, ModelFamily::dt, ModelFamily::mlp, ModelFamily::lsvm}) {
        for (const ModelSpec& spec : sample_candidates(family, 5, 77)) {
            ModelSpec back = spec_from_strings(family, spec_params_to_string(spec));
            CHECK(spec_params_to_string(back) == spec_params_to_string(spec));
        }
    }
    CHECK(family_from_name("DT") == ModelFamily::dt);
    CHECK(family_from_name("SVM") == ModelFamily::lsvm);
    CHECK(!family_from_name("GBM").has_value());
}
