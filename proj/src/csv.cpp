#include "fundcast/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fundcast/errors.hpp"

namespace fundcast {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& cell, std::size_t row) {
    double v = 0.0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw ParseError("row " + std::to_string(row) + ": not a number: '" + cell + "'");
    return v;
}

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\r\n") != std::string::npos;
}

void write_cell(std::ostream& out, const std::string& s) {
    if (!needs_quoting(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

// RFC 4180 parser; handles quoted fields, doubled quotes, \r\n and embedded
// newlines. Returns one row per call; false at EOF.
bool read_row(std::istream& in, std::vector<std::string>& row) {
    row.clear();
    std::string cell;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    cell += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            row.push_back(std::move(cell));
            cell.clear();
        } else if (ch == '\n') {
            row.push_back(std::move(cell));
            return true;
        } else if (ch == '\r') {
            // swallow; \n follows in \r\n files
        } else {
            cell += ch;
        }
    }
    if (!any) return false;
    row.push_back(std::move(cell));
    return true;
}

}  // namespace

Dataset load_dataset(const std::string& path, const FeatureSchema& schema) {
    schema.validate();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open dataset file: " + path);

    std::vector<std::string> header;
    if (!read_row(in, header)) throw ParseError("empty dataset file: " + path);

    std::vector<std::string> expected;
    expected.push_back("id");
    for (const auto& f : schema.features) expected.push_back(f.name);
    for (const char* extra :
         {"total_raised", "ipo_valuation", "acquisition_price", "funding_label", "success_label"})
        expected.push_back(extra);

    // Order-insensitive by-name mapping; missing and unknown columns are both
    // schema mismatches.
    std::vector<int> col_of(expected.size(), -1);
    std::vector<bool> used(header.size(), false);
    std::string missing;
    for (std::size_t e = 0; e < expected.size(); ++e) {
        for (std::size_t h = 0; h < header.size(); ++h) {
            if (!used[h] && header[h] == expected[e]) {
                col_of[e] = static_cast<int>(h);
                used[h] = true;
                break;
            }
        }
        if (col_of[e] < 0) missing += (missing.empty() ? "" : ", ") + expected[e];
    }
    if (!missing.empty()) throw SchemaError("dataset is missing columns: " + missing);
    for (std::size_t h = 0; h < header.size(); ++h)
        if (!used[h]) throw SchemaError("dataset has undeclared column: " + header[h]);

    Dataset ds;
    ds.schema = schema;
    std::vector<std::string> row;
    std::size_t row_no = 1;
    while (read_row(in, row)) {
        ++row_no;
        if (row.size() == 1 && row[0].empty()) continue;  // trailing newline
        if (row.size() != header.size())
            throw ParseError("row " + std::to_string(row_no) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(row.size()));
        FounderRecord rec;
        std::size_t e = 0;
        rec.id = row[col_of[e++]];
        if (rec.id.empty()) throw ParseError("row " + std::to_string(row_no) + ": empty id");
        for (const auto& f : schema.features) {
            const std::string& cell = row[col_of[e++]];
            if (f.branch == Branch::textual) {
                if (!cell.empty()) rec.raw_text[f.name] = cell;
            } else if (!cell.empty()) {
                rec.values[f.name] = parse_double(cell, row_no);
            }
        }
        auto currency = [&](const char* what) -> std::optional<double> {
            const std::string& cell = row[col_of[e++]];
            if (cell.empty()) return std::nullopt;
            double v = parse_double(cell, row_no);
            if (v < 0.0)
                throw ParseError("row " + std::to_string(row_no) + ": negative " + what);
            return v;
        };
        rec.total_raised = currency("total_raised");
        rec.ipo_valuation = currency("ipo_valuation");
        rec.acquisition_price = currency("acquisition_price");

        const std::string& fund_cell = row[col_of[e++]];
        const std::string& succ_cell = row[col_of[e++]];
        if (fund_cell.empty() != succ_cell.empty())
            throw ParseError("row " + std::to_string(row_no) +
                             ": funding_label and success_label must both be set or both empty");
        if (!fund_cell.empty()) {
            double funding = parse_double(fund_cell, row_no);
            if (funding < 0.0)
                throw ParseError("row " + std::to_string(row_no) + ": negative funding_label");
            if (succ_cell != "0" && succ_cell != "1")
                throw ParseError("row " + std::to_string(row_no) + ": success_label must be 0 or 1");
            if (ds.labels.count(rec.id))
                throw ParseError("row " + std::to_string(row_no) + ": duplicate id " + rec.id);
            ds.labels[rec.id] = Labels{funding, succ_cell == "1"};
        }
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write dataset file: " + path);

    out << "id";
    for (const auto& f : dataset.schema.features) out << ',' << f.name;
    out << ",total_raised,ipo_valuation,acquisition_price,funding_label,success_label\n";

    for (const auto& r : dataset.records) {
        write_cell(out, r.id);
        for (const auto& f : dataset.schema.features) {
            out << ',';
            if (f.branch == Branch::textual) {
                auto it = r.raw_text.find(f.name);
                if (it != r.raw_text.end()) write_cell(out, it->second);
            } else {
                auto it = r.values.find(f.name);
                if (it != r.values.end()) out << format_double(it->second);
            }
        }
        for (const auto& opt : {r.total_raised, r.ipo_valuation, r.acquisition_price}) {
            out << ',';
            if (opt) out << format_double(*opt);
        }
        auto lab = dataset.labels.find(r.id);
        out << ',';
        if (lab != dataset.labels.end()) out << format_double(lab->second.funding);
        out << ',';
        if (lab != dataset.labels.end()) out << (lab->second.success ? '1' : '0');
        out << '\n';
    }
}

}  // namespace fundcast
