#include "dqpt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/LU>

#ifndef DQPT_VERSION
#define DQPT_VERSION "0.0.0"
#endif

namespace dqpt {

using nlohmann::json;

std::string tool_version() { return DQPT_VERSION; }

// --- configuration ----------------------------------------------------------

namespace {

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
    }
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    return j;
}

double get_real(const json& j, const char* key, const std::string& path, std::optional<double> fallback = {}) {
    const std::string field = path + "." + key;
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(field, "missing required number");
    }
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field, "non-finite number");
    return d;
}

int get_int(const json& j, const char* key, const std::string& path, int fallback) {
    const std::string field = path.empty() ? key : path + "." + key;
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const char* key, const std::string& path, const std::string& fallback) {
    const std::string field = path.empty() ? key : path + "." + key;
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw ConfigError(field, "expected a string");
    return j.at(key).get<std::string>();
}

DzConvention parse_dz(const std::string& s, const std::string& path) {
    if (s == "standard_sin") return DzConvention::StandardSin;
    if (s == "paper_cos") return DzConvention::PaperCos;
    throw ConfigError(path, "expected 'standard_sin' or 'paper_cos'");
}

expr::Expression parse_field(const json& j, const char* key, const std::string& path) {
    const std::string field = path + "." + key;
    if (!j.contains(key)) throw ConfigError(field, "missing expression");
    const json& v = j.at(key);
    std::string src;
    if (v.is_string())
        src = v.get<std::string>();
    else if (v.is_number())
        src = format_real(v.get<double>());
    else
        throw ConfigError(field, "expected an expression string");
    try {
        return expr::parse_expr(src);
    } catch (const ParseError& e) {
        throw ConfigError(field, e.what());
    }
}

void merge_into(json& base, const json& patch) {
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
            merge_into(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
}

}  // namespace

ModelSpec parse_model(const json& j, const std::string& path, DzConvention default_dz) {
    require_object(j, path);
    if (j.size() != 1)
        throw ConfigError(path, "expected exactly one model definition (ssh, xy, haldane or custom)");
    const std::string kind = j.begin().key();
    const json& body = require_object(j.begin().value(), path + "." + kind);
    const std::string p = path + "." + kind;
    if (kind == "ssh") {
        reject_unknown(body, p, {"t1", "t2"});
        SshParams s{get_real(body, "t1", p), get_real(body, "t2", p)};
        if (s.t1 == 0.0 && s.t2 == 0.0) throw ConfigError(p, "t1 and t2 cannot both vanish");
        return s;
    }
    if (kind == "xy") {
        reject_unknown(body, p, {"h", "gamma"});
        return XyParams{get_real(body, "h", p), get_real(body, "gamma", p)};
    }
    if (kind == "haldane") {
        reject_unknown(body, p, {"m", "gamma1", "gamma2", "phi", "dz_convention"});
        HaldaneParams h;
        h.m = get_real(body, "m", p);
        h.gamma1 = get_real(body, "gamma1", p, 1.0);
        h.gamma2 = get_real(body, "gamma2", p, 0.3);
        h.phi = get_real(body, "phi", p, std::numbers::pi / 2);
        h.dz_convention = body.contains("dz_convention")
                              ? parse_dz(get_string(body, "dz_convention", p, ""), p + ".dz_convention")
                              : default_dz;
        if (h.gamma1 == 0.0) throw ConfigError(p + ".gamma1", "must be nonzero");
        return h;
    }
    if (kind == "custom") {
        reject_unknown(body, p, {"dx", "dy", "dz", "dimension", "params", "class"});
        const int dim = get_int(body, "dimension", p, 1);
        expr::ParamEnv env;
        if (body.contains("params")) {
            const json& params = require_object(body.at("params"), p + ".params");
            for (auto it = params.begin(); it != params.end(); ++it) {
                if (!it.value().is_number()) throw ConfigError(p + ".params." + it.key(), "expected a number");
                env[it.key()] = it.value().get<double>();
            }
        }
        const std::string cls = get_string(body, "class", p, "insulator");
        ModelClass mc;
        if (cls == "insulator")
            mc = ModelClass::Insulator;
        else if (cls == "superconductor")
            mc = ModelClass::Superconductor;
        else
            throw ConfigError(p + ".class", "expected 'insulator' or 'superconductor'");
        const auto dx = parse_field(body, "dx", p);
        const auto dy = parse_field(body, "dy", p);
        const auto dz = parse_field(body, "dz", p);
        try {
            return validate_model_def(dx, dy, dz, dim, env, mc);
        } catch (const UnboundVariable& e) {
            throw ConfigError(p, e.what());
        } catch (const DimensionMismatch& e) {
            throw ConfigError(p, e.what());
        }
    }
    throw ConfigError(path, "unknown model '" + kind + "'");
}

RunConfig parse_config(const json& doc) {
    require_object(doc, "<root>");
    reject_unknown(doc, "", {"model_i", "model_f", "grid", "scan_n", "time", "tolerances", "n_range", "k",
                             "output", "dz_convention", "fisher_convention", "half_zone", "cell"});
    RunConfig cfg;
    cfg.source = doc;
    cfg.cell = honeycomb::reciprocal_cell();
    if (doc.contains("cell")) {
        const json& c = require_object(doc.at("cell"), "cell");
        reject_unknown(c, "cell", {"g1", "g2"});
        auto vec = [&](const char* key) {
            const std::string field = std::string("cell.") + key;
            if (!c.contains(key)) throw ConfigError(field, "missing reciprocal vector");
            const json& v = c.at(key);
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                throw ConfigError(field, "expected [x, y]");
            return Vec2(v[0].get<double>(), v[1].get<double>());
        };
        cfg.cell = {vec("g1"), vec("g2")};
        try {
            build_grid_2d(cfg.cell.g1, cfg.cell.g2, 2, 2);
        } catch (const InvalidGrid& e) {
            throw ConfigError("cell", e.what());
        }
    }

    const DzConvention dz = parse_dz(get_string(doc, "dz_convention", "", "standard_sin"), "dz_convention");

    if (doc.contains("model_i") != doc.contains("model_f"))
        throw ConfigError(doc.contains("model_i") ? "model_f" : "model_i", "missing model definition");
    if (doc.contains("model_i")) {
        ModelSpec mi = parse_model(doc.at("model_i"), "model_i", dz);
        ModelSpec mf = parse_model(doc.at("model_f"), "model_f", dz);
        if (mi.dimension() != mf.dimension()) throw ConfigError("model_f", "dimension differs from model_i");
        if (mi.model_class() != mf.model_class()) throw ConfigError("model_f", "model class differs from model_i");
        if (doc.contains("half_zone")) {
            if (!doc.at("half_zone").is_boolean()) throw ConfigError("half_zone", "expected a boolean");
            cfg.half_zone = doc.at("half_zone").get<bool>();
        }
        const bool half = cfg.half_zone.value_or(mi.model_class() == ModelClass::Superconductor);
        cfg.quench.emplace(std::move(mi), std::move(mf), half);
    }

    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        if (g.is_number_integer()) {
            cfg.grid_n = cfg.grid_n1 = cfg.grid_n2 = g.get<int>();
        } else {
            require_object(g, "grid");
            reject_unknown(g, "grid", {"n", "n1", "n2"});
            cfg.grid_n = get_int(g, "n", "grid", cfg.grid_n);
            cfg.grid_n1 = get_int(g, "n1", "grid", g.contains("n") ? cfg.grid_n : cfg.grid_n1);
            cfg.grid_n2 = get_int(g, "n2", "grid", g.contains("n") ? cfg.grid_n : cfg.grid_n2);
        }
        if (cfg.grid_n < 2 || cfg.grid_n1 < 2 || cfg.grid_n2 < 2) throw ConfigError("grid", "sizes must be >= 2");
    }
    cfg.scan_n = get_int(doc, "scan_n", "", cfg.scan_n);
    if (cfg.scan_n < 64) throw ConfigError("scan_n", "must be >= 64");

    if (doc.contains("time")) {
        const json& t = require_object(doc.at("time"), "time");
        reject_unknown(t, "time", {"t_min", "t_max", "samples"});
        cfg.time.t_min = get_real(t, "t_min", "time", cfg.time.t_min);
        cfg.time.t_max = get_real(t, "t_max", "time", cfg.time.t_max);
        cfg.time.samples = get_int(t, "samples", "time", cfg.time.samples);
    }
    if (!(cfg.time.t_min < cfg.time.t_max)) throw ConfigError("time", "t_min must be below t_max");
    if (cfg.time.samples < 2) throw ConfigError("time.samples", "must be >= 2");

    if (doc.contains("tolerances")) {
        const json& t = require_object(doc.at("tolerances"), "tolerances");
        reject_unknown(t, "tolerances", {"critical", "contour", "dqpt", "limit"});
        cfg.tol.critical = get_real(t, "critical", "tolerances", cfg.tol.critical);
        cfg.tol.contour = get_real(t, "contour", "tolerances", cfg.tol.contour);
        cfg.tol.dqpt = get_real(t, "dqpt", "tolerances", cfg.tol.dqpt);
        cfg.tol.limit = get_real(t, "limit", "tolerances", cfg.tol.limit);
        for (double v : {cfg.tol.critical, cfg.tol.contour, cfg.tol.dqpt, cfg.tol.limit})
            if (!(v > 0.0)) throw ConfigError("tolerances", "tolerances must be positive");
    }

    if (doc.contains("n_range")) {
        const json& r = doc.at("n_range");
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
            throw ConfigError("n_range", "expected [first, last] integers");
        cfg.n_range = {r[0].get<int>(), r[1].get<int>()};
        if (cfg.n_range.first > cfg.n_range.last) throw ConfigError("n_range", "first exceeds last");
    }

    if (doc.contains("k")) {
        const json& k = doc.at("k");
        const int dim = cfg.quench ? cfg.quench->dimension() : (k.is_array() ? 2 : 1);
        if (dim == 1) {
            if (!k.is_number()) throw ConfigError("k", "expected a number for a 1D model");
            cfg.k = Momentum::of(k.get<double>());
        } else {
            if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
                throw ConfigError("k", "expected [kx, ky] for a 2D model");
            const Vec2 cart(k[0].get<double>(), k[1].get<double>());
            Eigen::Matrix2d basis;
            basis.col(0) = cfg.cell.g1;
            basis.col(1) = cfg.cell.g2;
            cfg.k = Momentum::of(Momentum2D{cart, basis.inverse() * cart});
        }
    }

    if (doc.contains("output")) {
        const json& o = require_object(doc.at("output"), "output");
        reject_unknown(o, "output", {"path", "format"});
        cfg.out_path = get_string(o, "path", "output", "");
        const std::string f = get_string(o, "format", "output", "csv");
        if (f == "csv")
            cfg.format = TableFormat::Csv;
        else if (f == "ndjson")
            cfg.format = TableFormat::Ndjson;
        else
            throw ConfigError("output.format", "expected 'csv' or 'ndjson'");
    }

    const std::string fc = get_string(doc, "fisher_convention", "", "exact");
    if (fc == "exact")
        cfg.fisher = FisherConvention::Exact;
    else if (fc == "paper_arctan")
        cfg.fisher = FisherConvention::PaperArctan;
    else
        throw ConfigError("fisher_convention", "expected 'exact' or 'paper_arctan'");
    return cfg;
}

RunConfig load_config(const std::string& path, const json& overrides) {
    json doc = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
        }
    }
    if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
    merge_into(doc, overrides);
    return parse_config(doc);
}

std::string RunConfig::hash() const {
    const std::string text = source.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// --- tables -------------------------------------------------------------------

void OutputTable::add_column(std::string name, ColumnType type) {
    if (!rows.empty()) throw std::invalid_argument("columns must be declared before rows");
    columns.push_back(std::move(name));
    types.push_back(type);
}

void OutputTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("row width does not match the column count");
    for (std::size_t i = 0; i < row.size(); ++i) {
        const bool ok = (types[i] == ColumnType::Integer && std::holds_alternative<std::int64_t>(row[i])) ||
                        (types[i] == ColumnType::Real && std::holds_alternative<double>(row[i])) ||
                        (types[i] == ColumnType::Text && std::holds_alternative<std::string>(row[i]));
        if (!ok) throw std::invalid_argument("cell type does not match column '" + columns[i] + "'");
    }
    rows.push_back(std::move(row));
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

const char* type_name(ColumnType t) {
    switch (t) {
        case ColumnType::Integer: return "integer";
        case ColumnType::Real: return "real";
        case ColumnType::Text: return "text";
    }
    return "text";
}

std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string json_cell(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? format_real(*d) : "null";
    return json(std::get<std::string>(c)).dump();
}

}  // namespace

void write_table(const OutputTable& tbl, TableFormat format, std::ostream& out) {
    if (format == TableFormat::Csv) {
        out << "# dqpt " << tbl.tool_version << " command=" << tbl.command << " config_hash=" << tbl.config_hash
            << '\n';
        for (std::size_t i = 0; i < tbl.columns.size(); ++i) out << (i ? "," : "") << csv_text(tbl.columns[i]);
        out << '\n';
        for (const auto& row : tbl.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ',';
                if (const auto* v = std::get_if<std::int64_t>(&row[i]))
                    out << *v;
                else if (const auto* d = std::get_if<double>(&row[i]))
                    out << format_real(*d);
                else
                    out << csv_text(std::get<std::string>(row[i]));
            }
            out << '\n';
        }
    } else {
        json meta = {{"tool", "dqpt"},
                     {"version", tbl.tool_version},
                     {"command", tbl.command},
                     {"config_hash", tbl.config_hash},
                     {"columns", tbl.columns}};
        json types = json::array();
        for (auto t : tbl.types) types.push_back(type_name(t));
        meta["types"] = types;
        out << json{{"_meta", meta}}.dump() << '\n';
        for (const auto& row : tbl.rows) {
            out << '{';
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << json(tbl.columns[i]).dump() << ':' << json_cell(row[i]);
            out << "}\n";
        }
    }
    if (!out) throw IoError("<stream>", "write failed");
}

void write_table(const OutputTable& tbl, TableFormat format, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(path, "cannot open for writing");
    write_table(tbl, format, static_cast<std::ostream&>(f));
    f.flush();
    if (!f) throw IoError(path, "write failed");
}

OutputTable read_ndjson(std::istream& in) {
    OutputTable tbl;
    std::string line;
    if (!std::getline(in, line)) throw IoError("<stream>", "missing metadata line");
    const json meta = json::parse(line).at("_meta");
    tbl.command = meta.at("command").get<std::string>();
    tbl.config_hash = meta.at("config_hash").get<std::string>();
    tbl.tool_version = meta.at("version").get<std::string>();
    const auto columns = meta.at("columns").get<std::vector<std::string>>();
    const auto types = meta.at("types").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < columns.size(); ++i)
        tbl.add_column(columns[i], types[i] == "integer" ? ColumnType::Integer
                                   : types[i] == "real"  ? ColumnType::Real
                                                         : ColumnType::Text);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json obj = json::parse(line);
        std::vector<Cell> row;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const json& v = obj.at(columns[i]);
            switch (tbl.types[i]) {
                case ColumnType::Integer: row.emplace_back(v.get<std::int64_t>()); break;
                case ColumnType::Real:
                    row.emplace_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
                    break;
                case ColumnType::Text: row.emplace_back(v.get<std::string>()); break;
            }
        }
        tbl.add_row(std::move(row));
    }
    return tbl;
}

}  // namespace dqpt
