#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fundcast/embedding.hpp"
#include "fundcast/record.hpp"

namespace fundcast {

// Column-major dense matrix: data[j*rows + i] is row i of column j. Column
// contiguity is what the tree builders and standardizers iterate over.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double* col(std::size_t j) { return data.data() + j * rows; }
    const double* col(std::size_t j) const { return data.data() + j * rows; }
    double& at(std::size_t i, std::size_t j) { return data[j * rows + i]; }
    double at(std::size_t i, std::size_t j) const { return data[j * rows + i]; }
};

struct FeatureMatrix {
    Matrix x;
    std::vector<std::string> column_names;
    std::vector<std::string> row_ids;
    std::size_t tabular_width = 0;    // categorical + continuous + boolean columns
    std::size_t embedding_width = 0;  // trailing embedding block columns
};

struct ContStats {
    double mean = 0.0;
    double stddev = 0.0;  // population (divide by n)
};

// Train-fitted encoding state. Immutable after fit; applying it to held-out
// data never mutates it (state_hash stays constant).
struct EncoderState {
    std::string schema_hash;
    std::map<std::string, ContStats> cont_stats;   // continuous feature -> stats
    std::map<std::string, double> cat_impute;      // categorical feature -> training mode
    std::size_t embedding_dim = 0;
    std::string embedding_provider_id;

    std::string to_json() const;
    static EncoderState from_json(const std::string& text);
    std::string state_hash() const;
};

// Table 1 education mapping; a special case of encode_categorical.
int encode_education(const std::string& label);

// Declared (label -> integer) map of a categorical feature. Accepts level
// labels case-insensitively; anything undeclared raises UnknownCategory.
int encode_categorical(const FeatureDecl& feature, const std::string& label);

// mean = arithmetic mean, std = population standard deviation (divide by n).
ContStats fit_standardizer(const std::vector<double>& train_values);

// (value - mean) / std with the degenerate-column rule std == 0 -> 0.
double apply_standardizer(const ContStats& state, double value);

std::vector<double> embed_text(const std::string& text, const EmbeddingProvider& provider);

EncoderState fit_encoder(const Dataset& train, const EmbeddingProvider& provider);

// Deterministic column layout: categorical ints, z-scored continuous,
// booleans (each group in schema order), then one embedding block per
// textual feature with columns "<feature>_emb_<j>". Absent values impute as
// categorical -> training mode, continuous -> training mean (z-score 0),
// boolean -> 0.
FeatureMatrix encode_dataset(const Dataset& dataset, const EncoderState& state,
                             const EmbeddingProvider& provider);

}  // namespace fundcast
