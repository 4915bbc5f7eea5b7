#include <fstream>
#include <sstream>

#include "fundcast/errors.hpp"
#include "fundcast/pipeline.hpp"
#include <json.hpp>

namespace fundcast {

namespace {

using nlohmann::json;

json tree_to_json(const RegressionTree& tree) {
    json nodes = json::array();
    for (const auto& nd : tree.nodes) {
        nodes.push_back(json::array(
            {nd.feature, nd.threshold, nd.left, nd.right, nd.value, nd.gain, nd.n_samples}));
    }
    return json{{"max_depth", tree.max_depth},
                {"min_samples_leaf", tree.min_samples_leaf},
                {"nodes", nodes}};
}

RegressionTree tree_from_json(const json& j) {
    RegressionTree tree;
    tree.max_depth = j.at("max_depth").get<int>();
    tree.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    for (const auto& row : j.at("nodes")) {
        if (!row.is_array() || row.size() != 7) {
            throw ParseError("artifact: malformed tree node row");
        }
        TreeNode nd;
        nd.feature = row[0].get<int>();
        nd.threshold = row[1].get<double>();
        nd.left = row[2].get<int>();
        nd.right = row[3].get<int>();
        nd.value = row[4].get<double>();
        nd.gain = row[5].get<double>();
        nd.n_samples = row[6].get<std::uint32_t>();
        tree.nodes.push_back(nd);
    }
    return tree;
}

json gbt_to_json(const GradientBoostedTrees& m) {
    json trees = json::array();
    for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
    return json{{"initial_prediction", m.initial_prediction},
                {"learning_rate", m.learning_rate},
                {"n_features", m.n_features},
                {"params",
                 {{"n_trees", m.params.n_trees},
                  {"max_depth", m.params.max_depth},
                  {"min_samples_leaf", m.params.min_samples_leaf},
                  {"learning_rate", m.params.learning_rate},
                  {"subsample", m.params.subsample},
                  {"seed", m.params.seed}}},
                {"trees", trees}};
}

GradientBoostedTrees gbt_from_json(const json& j) {
    GradientBoostedTrees m;
    m.initial_prediction = j.at("initial_prediction").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.n_features = j.at("n_features").get<std::size_t>();
    const auto& p = j.at("params");
    m.params.n_trees = p.at("n_trees").get<int>();
    m.params.max_depth = p.at("max_depth").get<int>();
    m.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    m.params.learning_rate = p.at("learning_rate").get<double>();
    m.params.subsample = p.at("subsample").get<double>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
    m.is_fitted = true;
    return m;
}

json rf_to_json(const RandomForest& m) {
    json trees = json::array();
    for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
    return json{{"n_features", m.n_features},
                {"params",
                 {{"n_trees", m.params.n_trees},
                  {"max_depth", m.params.max_depth},
                  {"min_samples_leaf", m.params.min_samples_leaf},
                  {"max_features", m.params.max_features},
                  {"bootstrap", m.params.bootstrap},
                  {"seed", m.params.seed}}},
                {"trees", trees}};
}

RandomForest rf_from_json(const json& j) {
    RandomForest m;
    m.n_features = j.at("n_features").get<std::size_t>();
    const auto& p = j.at("params");
    m.params.n_trees = p.at("n_trees").get<int>();
    m.params.max_depth = p.at("max_depth").get<int>();
    m.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    m.params.max_features = p.at("max_features").get<double>();
    m.params.bootstrap = p.at("bootstrap").get<bool>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
    m.is_fitted = true;
    return m;
}

json linear_to_json(const LinearModel& m) {
    return json{{"intercept", m.intercept},
                {"coefficients", m.coefficients},
                {"ridge_lambda", m.ridge_lambda},
                {"input_std", m.input_std}};
}

LinearModel linear_from_json(const json& j) {
    LinearModel m;
    m.intercept = j.at("intercept").get<double>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.ridge_lambda = j.at("ridge_lambda").get<double>();
    m.input_std = j.at("input_std").get<std::vector<double>>();
    m.is_fitted = true;
    return m;
}

json logistic_to_json(const LogisticModel& m) {
    return json{{"intercept", m.intercept},
                {"coefficients", m.coefficients},
                {"ridge_lambda", m.ridge_lambda},
                {"input_mean", m.input_mean},
                {"input_std", m.input_std},
                {"newton_iterations", m.newton_iterations}};
}

LogisticModel logistic_from_json(const json& j) {
    LogisticModel m;
    m.intercept = j.at("intercept").get<double>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.ridge_lambda = j.at("ridge_lambda").get<double>();
    m.input_mean = j.at("input_mean").get<double>();
    m.input_std = j.at("input_std").get<double>();
    m.newton_iterations = j.value("newton_iterations", 0);
    m.is_fitted = true;
    return m;
}

}  // namespace

void save_pipeline(const std::string& path, const FittedPipeline& pipeline) {
    json j;
    j["format_version"] = 1;
    j["schema"] = pipeline.schema.to_json();
    j["schema_hash"] = pipeline.encoder.schema_hash;
    j["encoder"] = json::parse(pipeline.encoder.to_json());
    j["config"] = json::parse(pipeline.config.to_json());
    j["meta_channel_names"] = pipeline.meta_channel_names;
    j["base_channels"] = pipeline.base_channels;
    j["gbt"] = pipeline.config.use_gbt ? gbt_to_json(pipeline.gbt) : json(nullptr);
    j["rf"] = pipeline.config.use_rf ? rf_to_json(pipeline.rf) : json(nullptr);
    j["meta"] = linear_to_json(pipeline.meta);
    j["calibrator"] = logistic_to_json(pipeline.calibrator);
    j["fingerprint"] = {{"data", pipeline.data_fingerprint}, {"seed", pipeline.config.seed}};

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write pipeline artifact to " + path);
    out << j.dump() << "\n";
    if (!out) throw Error("failed writing pipeline artifact to " + path);
}

FittedPipeline load_pipeline(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open pipeline artifact at " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError("pipeline artifact at " + path + " is not valid JSON");
    }
    try {
        if (j.at("format_version").get<int>() != 1) {
            throw ParseError("pipeline artifact format_version " +
                             j.at("format_version").dump() + " is not supported");
        }
        FittedPipeline p;
        p.schema = FeatureSchema::from_json(j.at("schema"));
        p.encoder = EncoderState::from_json(j.at("encoder").dump());
        p.config = PipelineConfig::from_json(j.at("config").dump());
        const std::string stored_hash = j.at("schema_hash").get<std::string>();
        if (p.schema.hash() != stored_hash || p.encoder.schema_hash != stored_hash) {
            throw ParseError("pipeline artifact schema hash mismatch: stored " + stored_hash +
                             ", recomputed " + p.schema.hash());
        }
        p.meta_channel_names =
            j.at("meta_channel_names").get<std::vector<std::string>>();
        p.base_channels = j.at("base_channels").get<std::size_t>();
        if (!j.at("gbt").is_null()) p.gbt = gbt_from_json(j.at("gbt"));
        if (!j.at("rf").is_null()) p.rf = rf_from_json(j.at("rf"));
        p.meta = linear_from_json(j.at("meta"));
        p.calibrator = logistic_from_json(j.at("calibrator"));
        p.data_fingerprint = j.at("fingerprint").at("data").get<std::string>();
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("pipeline artifact: ") + e.what());
    }
}

}  // namespace fundcast
