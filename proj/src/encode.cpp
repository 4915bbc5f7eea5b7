#include "fundcast/encode.hpp"

#include <algorithm>
#include <cmath>

#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"
#include "fundcast/kernels.hpp"
#include <json.hpp>

namespace fundcast {

namespace {

using nlohmann::json;

const FeatureDecl& education_decl() {
    static const FeatureDecl kDecl{
        "education_level",
        Branch::categorical,
        Origin::deterministic,
        {{"Associate Degree or less", 0},
         {"Bachelor's Degree", 1},
         {"Master's Degree", 2},
         {"Doctoral Degree or more", 3}},
    };
    return kDecl;
}

}  // namespace

std::string EncoderState::to_json() const {
    json j;
    j["schema_hash"] = schema_hash;
    json cont = json::object();
    for (const auto& [name, st] : cont_stats) {
        cont[name] = {{"mean", st.mean}, {"std", st.stddev}};
    }
    j["cont_stats"] = cont;
    j["cat_impute"] = cat_impute;
    j["embedding_dim"] = embedding_dim;
    j["embedding_provider_id"] = embedding_provider_id;
    return j.dump(2);
}

EncoderState EncoderState::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("encoder state: invalid JSON");
    EncoderState s;
    try {
        s.schema_hash = j.at("schema_hash").get<std::string>();
        for (const auto& [name, st] : j.at("cont_stats").items()) {
            s.cont_stats[name] = {st.at("mean").get<double>(), st.at("std").get<double>()};
        }
        s.cat_impute = j.at("cat_impute").get<std::map<std::string, double>>();
        s.embedding_dim = j.at("embedding_dim").get<std::size_t>();
        s.embedding_provider_id = j.at("embedding_provider_id").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("encoder state: ") + e.what());
    }
    return s;
}

std::string EncoderState::state_hash() const { return hex64(fnv1a64(to_json())); }

int encode_education(const std::string& label) {
    return encode_categorical(education_decl(), label);
}

int encode_categorical(const FeatureDecl& feature, const std::string& label) {
    if (feature.branch != Branch::categorical) {
        throw EncodeError("encode_categorical: feature '" + feature.name +
                          "' is not categorical");
    }
    if (auto idx = feature.level_of_label(label)) return static_cast<int>(*idx);
    throw UnknownCategory("feature '" + feature.name + "': unknown level label \"" + label +
                          "\"");
}

ContStats fit_standardizer(const std::vector<double>& train_values) {
    if (train_values.empty()) throw FitError("fit_standardizer: empty input");
    for (double v : train_values) {
        if (!std::isfinite(v)) throw FitError("fit_standardizer: non-finite input");
    }
    auto [mean, var] = kernels::mean_var(train_values.data(), train_values.size());
    return {mean, std::sqrt(var)};
}

double apply_standardizer(const ContStats& state, double value) {
    if (!std::isfinite(value)) throw EncodeError("apply_standardizer: non-finite value");
    if (state.stddev == 0.0) return 0.0;
    return (value - state.mean) / state.stddev;
}

std::vector<double> embed_text(const std::string& text, const EmbeddingProvider& provider) {
    std::vector<double> v = provider.embed(text);
    if (v.size() != static_cast<std::size_t>(provider.dim())) {
        throw EmbedError("provider '" + provider.id() + "' returned vector of length " +
                         std::to_string(v.size()) + ", expected " +
                         std::to_string(provider.dim()));
    }
    return v;
}

EncoderState fit_encoder(const Dataset& train, const EmbeddingProvider& provider) {
    if (train.records.empty()) throw FitError("fit_encoder: empty training dataset");
    EncoderState state;
    state.schema_hash = train.schema.hash();
    state.embedding_dim = static_cast<std::size_t>(provider.dim());
    state.embedding_provider_id = provider.id();

    for (const auto& decl : train.schema.features) {
        if (decl.branch == Branch::continuous) {
            std::vector<double> vals;
            vals.reserve(train.records.size());
            for (const auto& rec : train.records) {
                auto it = rec.values.find(decl.name);
                if (it != rec.values.end()) vals.push_back(it->second);
            }
            if (vals.empty()) {
                state.cont_stats[decl.name] = {0.0, 0.0};
            } else {
                state.cont_stats[decl.name] = fit_standardizer(vals);
            }
        } else if (decl.branch == Branch::categorical) {
            std::vector<std::size_t> counts(decl.levels.size(), 0);
            for (const auto& rec : train.records) {
                auto it = rec.values.find(decl.name);
                if (it == rec.values.end()) continue;
                if (!decl.is_level(it->second)) {
                    throw EncodeError("record " + rec.id + ": feature '" + decl.name +
                                      "' value outside declared levels");
                }
                ++counts[static_cast<std::size_t>(it->second)];
            }
            // Training mode; ties break toward the lowest level value.
            std::size_t mode = 0;
            for (std::size_t k = 1; k < counts.size(); ++k) {
                if (counts[k] > counts[mode]) mode = k;
            }
            state.cat_impute[decl.name] = static_cast<double>(mode);
        }
    }
    return state;
}

FeatureMatrix encode_dataset(const Dataset& dataset, const EncoderState& state,
                             const EmbeddingProvider& provider) {
    if (state.schema_hash != dataset.schema.hash()) {
        throw EncodeError("encoder state schema hash " + state.schema_hash +
                          " does not match dataset schema hash " + dataset.schema.hash());
    }
    if (provider.id() != state.embedding_provider_id ||
        static_cast<std::size_t>(provider.dim()) != state.embedding_dim) {
        throw EncodeError("embedding provider '" + provider.id() + "' (dim " +
                          std::to_string(provider.dim()) + ") does not match fitted state '" +
                          state.embedding_provider_id + "' (dim " +
                          std::to_string(state.embedding_dim) + ")");
    }

    const auto categorical = dataset.schema.by_branch(Branch::categorical);
    const auto continuous = dataset.schema.by_branch(Branch::continuous);
    const auto booleans = dataset.schema.by_branch(Branch::boolean_);
    const auto textual = dataset.schema.by_branch(Branch::textual);

    FeatureMatrix fm;
    fm.tabular_width = categorical.size() + continuous.size() + booleans.size();
    fm.embedding_width = textual.size() * state.embedding_dim;
    const std::size_t n = dataset.records.size();
    fm.x = Matrix(n, fm.tabular_width + fm.embedding_width);
    fm.row_ids.reserve(n);
    for (const auto& rec : dataset.records) fm.row_ids.push_back(rec.id);

    for (const auto* d : categorical) fm.column_names.push_back(d->name);
    for (const auto* d : continuous) fm.column_names.push_back(d->name);
    for (const auto* d : booleans) fm.column_names.push_back(d->name);
    for (const auto* d : textual) {
        for (std::size_t k = 0; k < state.embedding_dim; ++k) {
            fm.column_names.push_back(d->name + "_emb_" + std::to_string(k));
        }
    }

    std::size_t j = 0;
    for (const auto* d : categorical) {
        double* out = fm.x.col(j++);
        const double impute = state.cat_impute.count(d->name) ? state.cat_impute.at(d->name)
                                                              : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& rec = dataset.records[i];
            auto it = rec.values.find(d->name);
            if (it == rec.values.end()) {
                out[i] = impute;
                continue;
            }
            if (!d->is_level(it->second)) {
                throw UnknownCategory("record " + rec.id + ": feature '" + d->name +
                                      "' value is not a declared level");
            }
            out[i] = it->second;
        }
    }
    for (const auto* d : continuous) {
        double* out = fm.x.col(j++);
        auto st = state.cont_stats.find(d->name);
        if (st == state.cont_stats.end()) {
            throw EncodeError("encoder state missing statistics for continuous feature '" +
                              d->name + "'");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& rec = dataset.records[i];
            auto it = rec.values.find(d->name);
            if (it == rec.values.end()) {
                out[i] = 0.0;  // training-mean imputation lands at z = 0
                continue;
            }
            if (!std::isfinite(it->second)) {
                throw EncodeError("record " + rec.id + ": feature '" + d->name +
                                  "' is non-finite");
            }
            out[i] = apply_standardizer(st->second, it->second);
        }
    }
    for (const auto* d : booleans) {
        double* out = fm.x.col(j++);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& rec = dataset.records[i];
            auto it = rec.values.find(d->name);
            if (it == rec.values.end()) {
                out[i] = 0.0;
                continue;
            }
            if (it->second != 0.0 && it->second != 1.0) {
                throw EncodeError("record " + rec.id + ": feature '" + d->name +
                                  "' is not boolean");
            }
            out[i] = it->second;
        }
    }
    for (const auto* d : textual) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& rec = dataset.records[i];
            auto it = rec.raw_text.find(d->name);
            std::vector<double> v = embed_text(it == rec.raw_text.end() ? "" : it->second,
                                               provider);
            for (std::size_t k = 0; k < state.embedding_dim; ++k) {
                fm.x.at(i, j + k) = v[k];
            }
        }
        j += state.embedding_dim;
    }
    return fm;
}

}  // namespace fundcast
