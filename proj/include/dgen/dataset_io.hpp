#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgen/core.hpp"
#include "dgen/csv.hpp"
#include "dgen/errors.hpp"

namespace dgen {

// Schema document:
// {
//   "design_continuous": ["x1", ...],
//   "design_categorical": {"material": ["steel", "alu"], ...},
//   "performance": [{"name": "p1", "direction": "maximize"}, ...],
//   "feasibility": "feasible"
// }
// Encoded column order: continuous variables in listed order, then
// categorical variables in listed order, each expanded to its levels.
inline DataSchema parse_schema(const nlohmann::ordered_json& doc) {
    if (!doc.is_object()) throw schema_error("schema must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "design_continuous" && key != "design_categorical" &&
            key != "performance" && key != "feasibility") {
            throw schema_error("unknown schema key '" + key + "'");
        }
    }

    DataSchema schema;
    if (doc.contains("design_continuous")) {
        for (const auto& name : doc.at("design_continuous")) {
            DesignVariable v;
            v.kind = DesignVariable::Kind::continuous;
            v.name = name.get<std::string>();
            schema.design.push_back(std::move(v));
        }
    }
    if (doc.contains("design_categorical")) {
        for (const auto& [name, levels] : doc.at("design_categorical").items()) {
            DesignVariable v;
            v.kind = DesignVariable::Kind::categorical;
            v.name = name;
            for (const auto& level : levels) v.levels.push_back(level.get<std::string>());
            if (v.levels.size() < 2) {
                throw schema_error("categorical '" + name + "' needs at least 2 levels");
            }
            schema.design.push_back(std::move(v));
        }
    }
    if (schema.design.empty()) throw schema_error("schema declares no design variables");

    if (!doc.contains("performance")) throw schema_error("schema is missing 'performance'");
    for (const auto& obj : doc.at("performance")) {
        ObjectiveSpec o;
        o.name = obj.at("name").get<std::string>();
        o.direction = direction_from_string(obj.at("direction").get<std::string>());
        schema.performance.push_back(std::move(o));
    }
    if (schema.performance.empty()) throw schema_error("schema declares no objectives");

    if (!doc.contains("feasibility")) throw schema_error("schema is missing 'feasibility'");
    schema.feasibility_column = doc.at("feasibility").get<std::string>();

    // Duplicate names would make column lookup ambiguous.
    std::map<std::string, int> seen;
    for (const auto& v : schema.design) ++seen[v.name];
    for (const auto& o : schema.performance) ++seen[o.name];
    ++seen[schema.feasibility_column];
    for (const auto& [name, count] : seen) {
        if (count > 1) throw schema_error("duplicate column name '" + name + "' in schema");
    }
    return schema;
}

inline DataSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open schema file: " + path);
    nlohmann::ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("schema JSON parse failure in " + path + ": " + e.what());
    }
    return parse_schema(doc);
}

inline nlohmann::ordered_json schema_to_json(const DataSchema& schema) {
    nlohmann::ordered_json doc;
    doc["design_continuous"] = nlohmann::ordered_json::array();
    doc["design_categorical"] = nlohmann::ordered_json::object();
    for (const auto& v : schema.design) {
        if (v.kind == DesignVariable::Kind::continuous) {
            doc["design_continuous"].push_back(v.name);
        } else {
            doc["design_categorical"][v.name] = v.levels;
        }
    }
    doc["performance"] = nlohmann::ordered_json::array();
    for (const auto& o : schema.performance) {
        doc["performance"].push_back({{"name", o.name}, {"direction", to_string(o.direction)}});
    }
    doc["feasibility"] = schema.feasibility_column;
    return doc;
}

namespace detail {

inline std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw schema_error("column '" + name + "' declared in schema but missing from CSV header");
}

} // namespace detail

// Encodes raw design cells (text) into a one-hot-expanded row.
inline Vector encode_design_row(const DataSchema& schema,
                                const std::vector<std::string>& cells,
                                std::size_t row_index) {
    Vector out = Vector::Zero(schema.encoded_width());
    int at = 0;
    std::size_t cell = 0;
    for (const auto& v : schema.design) {
        if (v.kind == DesignVariable::Kind::continuous) {
            out[at++] = parse_double(cells[cell], row_index, v.name);
        } else {
            const std::string& value = cells[cell];
            auto it = std::find(v.levels.begin(), v.levels.end(), value);
            if (it == v.levels.end()) {
                throw parse_error("unknown level '" + value + "' for categorical '" + v.name +
                                  "' at data row " + std::to_string(row_index));
            }
            out[at + static_cast<int>(it - v.levels.begin())] = 1.0;
            at += v.width();
        }
        ++cell;
    }
    return out;
}

// Decodes an encoded raw row back to text cells (argmax for one-hots).
inline std::vector<std::string> decode_design_row(const DataSchema& schema,
                                                  const Eigen::Ref<const Vector>& row) {
    std::vector<std::string> cells;
    cells.reserve(schema.design.size());
    int at = 0;
    for (const auto& v : schema.design) {
        if (v.kind == DesignVariable::Kind::continuous) {
            cells.push_back(format_double(row[at++]));
        } else {
            int best = 0;
            for (int j = 1; j < v.width(); ++j) {
                if (row[at + j] > row[at + best]) best = j;
            }
            cells.push_back(v.levels[best]);
            at += v.width();
        }
    }
    return cells;
}

inline Dataset load_dataset(const std::string& path, const DataSchema& schema) {
    const CsvTable table = read_csv(path);

    std::vector<std::size_t> design_cols;
    for (const auto& v : schema.design) {
        design_cols.push_back(detail::find_column(table.header, v.name));
    }
    std::vector<std::size_t> perf_cols;
    for (const auto& o : schema.performance) {
        perf_cols.push_back(detail::find_column(table.header, o.name));
    }
    const std::size_t feas_col = detail::find_column(table.header, schema.feasibility_column);

    const int n = static_cast<int>(table.rows.size());
    Dataset data;
    data.schema = schema;
    data.designs.resize(n, schema.encoded_width());
    data.performances.resize(n, schema.objective_count());
    data.feasible.resize(n);

    std::vector<std::string> design_cells(schema.design.size());
    for (int i = 0; i < n; ++i) {
        const auto& row = table.rows[i];
        for (std::size_t v = 0; v < design_cols.size(); ++v) {
            design_cells[v] = row[design_cols[v]];
        }
        data.designs.row(i) = encode_design_row(schema, design_cells, i);
        for (std::size_t k = 0; k < perf_cols.size(); ++k) {
            data.performances(i, static_cast<int>(k)) =
                parse_double(row[perf_cols[k]], i, schema.performance[k].name);
        }
        const double f = parse_double(row[feas_col], i, schema.feasibility_column);
        if (f != 0.0 && f != 1.0) {
            throw parse_error("feasibility column must be 0 or 1, got '" + row[feas_col] +
                              "' at data row " + std::to_string(i));
        }
        data.feasible[i] = f != 0.0;
    }

    // Record observed bounds on continuous variables.
    const auto offsets = data.schema.column_offsets();
    for (std::size_t v = 0; v < data.schema.design.size(); ++v) {
        auto& var = data.schema.design[v];
        if (var.kind != DesignVariable::Kind::continuous) continue;
        var.lo = data.designs.col(offsets[v]).minCoeff();
        var.hi = data.designs.col(offsets[v]).maxCoeff();
    }

    data.validate();
    return data;
}

inline void write_dataset_csv(const Dataset& data, const std::string& path,
                              const std::string& metadata = "") {
    CsvWriter out(path);
    if (!metadata.empty()) out.comment(metadata);
    std::vector<std::string> header;
    for (const auto& v : data.schema.design) header.push_back(v.name);
    for (const auto& o : data.schema.performance) header.push_back(o.name);
    header.push_back(data.schema.feasibility_column);
    out.row(header);

    for (int i = 0; i < data.n_rows(); ++i) {
        std::vector<std::string> cells = decode_design_row(data.schema, data.designs.row(i));
        for (int k = 0; k < data.objective_count(); ++k) {
            cells.push_back(format_double(data.performances(i, k)));
        }
        cells.push_back(data.feasible[i] ? "1" : "0");
        out.row(cells);
    }
}

// Designs-only CSV (the output of `generate`, the input of `evaluate`).
inline void write_designs_csv(const DataSchema& schema, const Matrix& designs_raw,
                              const std::string& path, const std::string& metadata = "") {
    CsvWriter out(path);
    if (!metadata.empty()) out.comment(metadata);
    std::vector<std::string> header;
    for (const auto& v : schema.design) header.push_back(v.name);
    out.row(header);
    for (int i = 0; i < designs_raw.rows(); ++i) {
        out.row(decode_design_row(schema, designs_raw.row(i)));
    }
}

inline Matrix load_designs_csv(const std::string& path, const DataSchema& schema) {
    const CsvTable table = read_csv(path);
    std::vector<std::size_t> design_cols;
    for (const auto& v : schema.design) {
        design_cols.push_back(detail::find_column(table.header, v.name));
    }
    Matrix out(static_cast<int>(table.rows.size()), schema.encoded_width());
    std::vector<std::string> cells(schema.design.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t v = 0; v < design_cols.size(); ++v) {
            cells[v] = table.rows[i][design_cols[v]];
        }
        out.row(static_cast<int>(i)) = encode_design_row(schema, cells, i);
    }
    return out;
}

} // namespace dgen
