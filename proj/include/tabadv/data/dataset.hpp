#ifndef TABADV_DATA_DATASET_HPP
#define TABADV_DATA_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tabadv/constraints/check.hpp"
#include "tabadv/constraints/parser.hpp"
#include "tabadv/data/csv.hpp"

namespace tabadv {

struct GeneratorConfig;

/// Where a synthetic dataset came from, so that fresh same-distribution
/// draws can be made later.
struct GeneratorSource {
    std::shared_ptr<const GeneratorConfig> config;
    std::uint64_t seed = 0;
};

struct Dataset;
using DatasetPtr = std::shared_ptr<const Dataset>;

/// Rows in original units with binary labels.
struct Dataset {
    SchemaPtr schema;
    ConstraintSetPtr constraints; ///< optional
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::optional<GeneratorSource> source;
    DatasetPtr reserve; ///< disjoint split kept back for same-distribution access

    std::size_t size() const { return rows.size(); }
    std::size_t count(int label) const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
    }

    /// Rows at `indices`, in that order. Provenance is not carried over.
    Dataset subset(const std::vector<std::size_t>& indices) const {
        Dataset out{schema, constraints, {}, {}, std::nullopt, nullptr};
        out.rows.reserve(indices.size());
        out.labels.reserve(indices.size());
        for (std::size_t i : indices) {
            out.rows.push_back(rows.at(i));
            out.labels.push_back(labels.at(i));
        }
        return out;
    }

    Dataset with_label(int label) const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < size(); ++i) {
            if (labels[i] == label) idx.push_back(i);
        }
        return subset(idx);
    }
};

namespace detail {

struct ParsedTable {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
};

inline ParsedTable parse_table(const std::vector<CsvRow>& csv, const Schema& schema, bool require_target,
                               const std::string& origin) {
    if (csv.empty()) {
        throw ConfigError(origin + ": missing header row");
    }
    const CsvRow& header = csv.front();
    auto column_of = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) return c;
        }
        return std::nullopt;
    };
    std::vector<std::size_t> cols;
    for (const auto& f : schema.features()) {
        auto c = column_of(f.name);
        if (!c) {
            throw ConfigError(origin + ": missing column '" + f.name + "'");
        }
        cols.push_back(*c);
    }
    auto target_col = column_of(schema.target());
    if (require_target && !target_col) {
        throw ConfigError(origin + ": missing target column '" + schema.target() + "'");
    }
    ParsedTable out;
    for (std::size_t r = 1; r < csv.size(); ++r) {
        const CsvRow& line = csv[r];
        if (line.size() == 1 && line[0].empty()) continue;
        const std::string where = origin + " row " + std::to_string(r);
        if (line.size() != header.size()) {
            throw ConfigError(where + ": expected " + std::to_string(header.size()) + " cells, got " +
                              std::to_string(line.size()));
        }
        std::vector<double> row(schema.size());
        for (std::size_t i = 0; i < schema.size(); ++i) {
            auto v = parse_double(line[cols[i]]);
            if (!v || !std::isfinite(*v)) {
                throw ConfigError(where + ", column '" + schema[i].name + "': cannot parse '" + line[cols[i]] + "'");
            }
            row[i] = *v;
        }
        if (target_col) {
            auto y = parse_double(line[*target_col]);
            if (!y || (*y != 0.0 && *y != 1.0)) {
                throw ConfigError(where + ", column '" + schema.target() + "': label '" + line[*target_col] +
                                  "' is not 0 or 1");
            }
            out.labels.push_back(static_cast<int>(*y));
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline void validate_rows(const Dataset& d, const std::string& origin) {
    const Schema& schema = *d.schema;
    ConstraintSet empty(d.schema);
    const ConstraintSet& set = d.constraints ? *d.constraints : empty;
    for (std::size_t r = 0; r < d.rows.size(); ++r) {
        auto report = check(d.rows[r], set);
        if (!report.valid) {
            std::string col;
            if (!report.out_of_bounds.empty()) col = schema[report.out_of_bounds.front()].name;
            else if (!report.type_violations.empty()) col = schema[report.type_violations.front()].name;
            throw ConfigError(origin + " row " + std::to_string(r + 1) + (col.empty() ? "" : ", column '" + col + "'") +
                              ": " + report.failures.front());
        }
    }
}

} // namespace detail

/// Reads an RFC-4180 file whose header names every schema feature and the
/// target. Every row must satisfy the schema and the attached constraints.
inline Dataset read_dataset_csv(const std::filesystem::path& path, SchemaPtr schema, ConstraintSetPtr constraints = {}) {
    auto table = detail::parse_table(read_csv_file(path.string()), *schema, true, path.filename().string());
    Dataset d{std::move(schema), std::move(constraints), std::move(table.rows), std::move(table.labels), std::nullopt,
              nullptr};
    detail::validate_rows(d, path.filename().string());
    return d;
}

/// Feature matrix only (target column optional, ignored).
inline std::vector<std::vector<double>> read_feature_csv(const std::filesystem::path& path, const Schema& schema) {
    return detail::parse_table(read_csv_file(path.string()), schema, false, path.filename().string()).rows;
}

/// Loads schema (and its constraint file, if named) and then the CSV.
inline Dataset load_dataset(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path) {
    auto schema = std::make_shared<const Schema>(load_schema(schema_path));
    ConstraintSetPtr constraints;
    if (schema->constraints_path) {
        constraints = std::make_shared<const ConstraintSet>(load_constraints(*schema->constraints_path, schema));
    }
    return read_dataset_csv(csv_path, schema, constraints);
}

/// Writes rows in shortest round-trip form; reloading yields identical doubles.
inline void write_dataset_csv(const std::filesystem::path& path, const Schema& schema,
                              const std::vector<std::vector<double>>& rows, const std::vector<int>* labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
        out << (i ? "," : "") << csv_escape(schema[i].name);
    }
    if (labels) out << "," << csv_escape(schema.target());
    out << "\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t i = 0; i < rows[r].size(); ++i) {
            out << (i ? "," : "") << format_double(rows[r][i]);
        }
        if (labels) out << "," << (*labels)[r];
        out << "\n";
    }
}

inline void write_dataset_csv(const std::filesystem::path& path, const Dataset& d) {
    write_dataset_csv(path, *d.schema, d.rows, &d.labels);
}

} // namespace tabadv

#endif
