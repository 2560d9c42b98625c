#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dqpt/quench.hpp"

namespace dqpt {

enum class TableFormat { Csv, Ndjson };

struct TimeWindow {
    double t_min = 0.0;
    double t_max = 4.0;
    int samples = 401;
};

struct Tolerances {
    double critical = 1e-12;  // 1D root residual
    double contour = 1e-8;    // 2D vertex residual
    double dqpt = kCriticalOverlapTolerance;
    double limit = 1e-6;      // endpoint-limit check
};

struct RunConfig {
    nlohmann::json source;  // effective configuration, after flag overrides
    std::optional<QuenchSpec> quench;
    int grid_n = 1000;
    int grid_n1 = 512;
    int grid_n2 = 512;
    ReciprocalCell cell;  // 2D sampling cell, honeycomb unless overridden
    std::optional<bool> half_zone;
    int scan_n = 4096;
    TimeWindow time;
    Tolerances tol;
    IntRange n_range{0, 4};
    std::optional<Momentum> k;
    std::string out_path;  // empty = standard output
    TableFormat format = TableFormat::Csv;
    FisherConvention fisher = FisherConvention::Exact;

    /// FNV-1a of the canonical JSON dump, as 16 hex digits.
    std::string hash() const;
};

/// Parses and validates a configuration document. Errors carry the JSON path.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads a JSON file, applies `overrides` (merged over the file), and validates.
RunConfig load_config(const std::string& path, const nlohmann::json& overrides = nlohmann::json::object());

/// Parses one side of a quench ({"ssh": {...}}, {"xy": {...}}, {"haldane": {...}} or {"custom": {...}}).
ModelSpec parse_model(const nlohmann::json& j, const std::string& path, DzConvention default_dz);

using Cell = std::variant<std::int64_t, double, std::string>;

enum class ColumnType { Integer, Real, Text };

struct OutputTable {
    std::string command;
    std::vector<std::string> columns;
    std::vector<ColumnType> types;
    std::vector<std::vector<Cell>> rows;
    std::string config_hash;
    std::string tool_version;

    void add_column(std::string name, ColumnType type);
    /// Throws std::invalid_argument when the row width or a cell type is wrong.
    void add_row(std::vector<Cell> row);
};

std::string tool_version();

/// Shortest "%.17g" rendering; non-finite values become "nan"/"inf"/"-inf".
std::string format_real(double v);

void write_table(const OutputTable& tbl, TableFormat format, std::ostream& out);
/// Throws IoError when the destination cannot be opened or written.
void write_table(const OutputTable& tbl, TableFormat format, const std::string& path);

/// Reads back an NDJSON table produced by write_table.
OutputTable read_ndjson(std::istream& in);

}  // namespace dqpt
