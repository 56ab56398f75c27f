#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ordpick/mlcore.hpp"
#include "ordpick/util.hpp"

namespace ordpick {

namespace {

constexpr const char* kFormatTag = "ordpick-model/1";

std::string weighting_name(KnnWeighting w) {
    return w == KnnWeighting::uniform ? "uniform" : "inverse-distance";
}

std::string criterion_name(SplitCriterion c) {
    return c == SplitCriterion::gini ? "gini" : "entropy";
}

std::map<std::string, std::string> parse_kv(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::istringstream stream{std::string(text)};
    std::string token;
    while (stream >> token) {
        std::size_t eq = token.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected key=value, found '" + token + "'");
        kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return kv;
}

int kv_int(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing parameter '" + key + "'");
    return std::stoi(it->second);
}

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing parameter '" + key + "'");
    return text_to_double(it->second);
}

std::string kv_text(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing parameter '" + key + "'");
    return it->second;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ' ';
        out << double_to_text(v[i]);
    }
    out << '\n';
}

std::vector<double> read_doubles(std::istream& in, std::size_t count, const std::string& where) {
    std::vector<double> v(count);
    std::string token;
    for (std::size_t i = 0; i < count; ++i) {
        if (!(in >> token)) throw std::runtime_error(where + ": truncated double list");
        v[i] = text_to_double(token);
    }
    return v;
}

}  // namespace

std::string spec_params_to_string(const ModelSpec& spec) {
    std::ostringstream out;
    switch (spec.family) {
        case ModelFamily::knn: {
            const auto& p = std::get<KnnParams>(spec.params);
            out << "k=" << p.k << " weighting=" << weighting_name(p.weighting);
            break;
        }
        case ModelFamily::dt: {
            const auto& p = std::get<DtParams>(spec.params);
            out << "max_depth=" << p.max_depth << " min_samples_split=" << p.min_samples_split
                << " criterion=" << criterion_name(p.criterion);
            break;
        }
        case ModelFamily::mlp: {
            const auto& p = std::get<MlpParams>(spec.params);
            out << "hidden_size=" << p.hidden_size
                << " learning_rate=" << double_to_text(p.learning_rate) << " epochs=" << p.epochs
                << " l2=" << double_to_text(p.l2);
            break;
        }
        case ModelFamily::lsvm: {
            const auto& p = std::get<LsvmParams>(spec.params);
            out << "C=" << double_to_text(p.c) << " epochs=" << p.epochs
                << " learning_rate=" << double_to_text(p.learning_rate);
            break;
        }
    }
    return out.str();
}

ModelSpec spec_from_strings(ModelFamily family, std::string_view params_text) {
    auto kv = parse_kv(params_text);
    ModelSpec spec;
    spec.family = family;
    switch (family) {
        case ModelFamily::knn: {
            KnnParams p;
            p.k = kv_int(kv, "k");
            std::string w = kv_text(kv, "weighting");
            if (w == "uniform")
                p.weighting = KnnWeighting::uniform;
            else if (w == "inverse-distance")
                p.weighting = KnnWeighting::inverse_distance;
            else
                throw std::invalid_argument("unknown weighting '" + w + "'");
            spec.params = p;
            break;
        }
        case ModelFamily::dt: {
            DtParams p;
            p.max_depth = kv_int(kv, "max_depth");
            p.min_samples_split = kv_int(kv, "min_samples_split");
            std::string c = kv_text(kv, "criterion");
            if (c == "gini")
                p.criterion = SplitCriterion::gini;
            else if (c == "entropy")
                p.criterion = SplitCriterion::entropy;
            else
                throw std::invalid_argument("unknown criterion '" + c + "'");
            spec.params = p;
            break;
        }
        case ModelFamily::mlp: {
            MlpParams p;
            p.hidden_size = kv_int(kv, "hidden_size");
            p.learning_rate = kv_double(kv, "learning_rate");
            p.epochs = kv_int(kv, "epochs");
            p.l2 = kv_double(kv, "l2");
            spec.params = p;
            break;
        }
        case ModelFamily::lsvm: {
            LsvmParams p;
            p.c = kv_double(kv, "C");
            p.epochs = kv_int(kv, "epochs");
            p.learning_rate = kv_double(kv, "learning_rate");
            spec.params = p;
            break;
        }
    }
    return spec;
}

void write_model(std::ostream& out, const TrainedModel& model) {
    out << "model " << kFormatTag << '\n';
    out << "family " << family_name(model.spec.family) << '\n';
    out << "spec " << spec_params_to_string(model.spec) << '\n';
    out << "n_labels " << model.n_labels << '\n';
    out << "standardizer " << model.standardizer.mean.size() << '\n';
    write_doubles(out, model.standardizer.mean);
    write_doubles(out, model.standardizer.scale);
    for (std::size_t i = 0; i < model.standardizer.zero_variance.size(); ++i) {
        if (i) out << ' ';
        out << int(model.standardizer.zero_variance[i]);
    }
    out << '\n';

    if (const auto* knn = std::get_if<KnnState>(&model.state)) {
        out << "state knn " << knn->x.n_rows << ' ' << knn->x.n_cols << '\n';
        for (std::size_t r = 0; r < knn->x.n_rows; ++r) {
            for (std::size_t c = 0; c < knn->x.n_cols; ++c) {
                if (c) out << ' ';
                out << double_to_text(knn->x.at(r, c));
            }
            out << '\n';
        }
        for (std::size_t i = 0; i < knn->y.size(); ++i) {
            if (i) out << ' ';
            out << knn->y[i];
        }
        out << '\n';
    } else if (const auto* dt = std::get_if<DtState>(&model.state)) {
        out << "state dt " << dt->nodes.size() << '\n';
        for (const TreeNode& n : dt->nodes)
            out << n.feature << ' ' << double_to_text(n.threshold) << ' ' << n.left << ' '
                << n.right << ' ' << n.label << '\n';
    } else if (const auto* mlp = std::get_if<MlpState>(&model.state)) {
        out << "state mlp " << mlp->n_in << ' ' << mlp->n_hidden << ' ' << mlp->n_out << '\n';
        write_doubles(out, mlp->w1);
        write_doubles(out, mlp->b1);
        write_doubles(out, mlp->w2);
        write_doubles(out, mlp->b2);
    } else {
        const auto& svm = std::get<LsvmState>(model.state);
        out << "state lsvm " << svm.n_in << ' ' << svm.n_classes << '\n';
        write_doubles(out, svm.w);
        write_doubles(out, svm.b);
    }
    out << "end\n";
}

TrainedModel read_model(std::istream& in, const std::string& where) {
    auto fail = [&where](const std::string& what) -> std::runtime_error {
        return std::runtime_error(where + ": " + what);
    };
    std::string line, word;

    // Skip blank lines between concatenated models.
    do {
        if (!std::getline(in, line)) throw fail("no model found");
    } while (trim(line).empty());
    if (trim(line) != std::string("model ") + kFormatTag)
        throw fail("unsupported model header '" + line + "'");

    TrainedModel model;
    if (!std::getline(in, line) || line.rfind("family ", 0) != 0) throw fail("missing family");
    auto family = family_from_name(trim(line.substr(7)));
    if (!family) throw fail("unknown family in '" + line + "'");

    if (!std::getline(in, line) || line.rfind("spec ", 0) != 0) throw fail("missing spec");
    model.spec = spec_from_strings(*family, line.substr(5));

    if (!std::getline(in, line) || line.rfind("n_labels ", 0) != 0) throw fail("missing n_labels");
    model.n_labels = std::stoi(line.substr(9));

    if (!std::getline(in, line) || line.rfind("standardizer ", 0) != 0)
        throw fail("missing standardizer");
    std::size_t n_features = std::stoul(line.substr(13));
    model.standardizer.mean = read_doubles(in, n_features, where);
    model.standardizer.scale = read_doubles(in, n_features, where);
    model.standardizer.zero_variance.resize(n_features);
    for (std::size_t i = 0; i < n_features; ++i) {
        int flag;
        if (!(in >> flag)) throw fail("truncated zero_variance list");
        model.standardizer.zero_variance[i] = flag ? 1 : 0;
    }

    std::string state_kind;
    if (!(in >> word) || word != "state" || !(in >> state_kind)) throw fail("missing state");
    if (state_kind == "knn") {
        std::size_t rows, cols;
        if (!(in >> rows >> cols)) throw fail("bad knn dimensions");
        KnnState state;
        state.x = FeatureMatrix(rows, cols);
        state.x.values = read_doubles(in, rows * cols, where);
        state.y.resize(rows);
        for (std::size_t i = 0; i < rows; ++i)
            if (!(in >> state.y[i])) throw fail("truncated knn labels");
        model.state = std::move(state);
    } else if (state_kind == "dt") {
        std::size_t count;
        if (!(in >> count)) throw fail("bad tree size");
        DtState state;
        state.nodes.resize(count);
        for (TreeNode& n : state.nodes) {
            std::string threshold;
            if (!(in >> n.feature >> threshold >> n.left >> n.right >> n.label))
                throw fail("truncated tree node");
            n.threshold = text_to_double(threshold);
        }
        model.state = std::move(state);
    } else if (state_kind == "mlp") {
        MlpState state;
        if (!(in >> state.n_in >> state.n_hidden >> state.n_out)) throw fail("bad mlp dimensions");
        auto hid = static_cast<std::size_t>(state.n_hidden);
        auto nin = static_cast<std::size_t>(state.n_in);
        auto nout = static_cast<std::size_t>(state.n_out);
        state.w1 = read_doubles(in, hid * nin, where);
        state.b1 = read_doubles(in, hid, where);
        state.w2 = read_doubles(in, nout * hid, where);
        state.b2 = read_doubles(in, nout, where);
        model.state = std::move(state);
    } else if (state_kind == "lsvm") {
        LsvmState state;
        if (!(in >> state.n_in >> state.n_classes)) throw fail("bad lsvm dimensions");
        state.w = read_doubles(in, static_cast<std::size_t>(state.n_in) *
                                       static_cast<std::size_t>(state.n_classes),
                               where);
        state.b = read_doubles(in, static_cast<std::size_t>(state.n_classes), where);
        model.state = std::move(state);
    } else {
        throw fail("unknown state kind '" + state_kind + "'");
    }
    if (!(in >> word) || word != "end") throw fail("missing end marker");
    std::getline(in, line);  // consume the rest of the end line
    return model;
}

}  // namespace ordpick
