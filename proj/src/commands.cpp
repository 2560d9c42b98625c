#include "dqpt/commands.hpp"

#include <cmath>
#include <sstream>

namespace dqpt {

namespace {

void momentum_columns(OutputTable& t, int dim) {
    if (dim == 1) {
        t.add_column("k", ColumnType::Real);
    } else {
        t.add_column("u", ColumnType::Real);
        t.add_column("v", ColumnType::Real);
        t.add_column("kx", ColumnType::Real);
        t.add_column("ky", ColumnType::Real);
    }
}

void momentum_cells(std::vector<Cell>& row, const Momentum& k) {
    if (k.dimension == 1) {
        row.emplace_back(k.k);
    } else {
        row.emplace_back(k.point.frac.x());
        row.emplace_back(k.point.frac.y());
        row.emplace_back(k.point.cart.x());
        row.emplace_back(k.point.cart.y());
    }
}

Momentum grid_momentum(const BrillouinGrid& grid, std::size_t i) {
    return grid.dimension == 1 ? Momentum::of(grid.k1d[i]) : Momentum::of(grid.k2d[i]);
}

OutputTable begin_table(const std::string& cmd, const RunConfig& cfg) {
    OutputTable t;
    t.command = cmd;
    t.config_hash = cfg.hash();
    t.tool_version = tool_version();
    return t;
}

const QuenchSpec& require_quench(const RunConfig& cfg, const std::string& cmd) {
    if (!cfg.quench) throw ConfigError("model_i", "command '" + cmd + "' needs model_i and model_f");
    return *cfg.quench;
}

std::vector<ModeData> grid_modes(const QuenchSpec& q, const BrillouinGrid& grid) {
    std::vector<ModeData> modes;
    modes.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) modes.push_back(mode_data(q, grid_momentum(grid, i)));
    return modes;
}

OutputTable cmd_modes(const RunConfig& cfg) {
    const QuenchSpec& q = require_quench(cfg, "modes");
    OutputTable t = begin_table("modes", cfg);
    momentum_columns(t, q.dimension());
    for (const char* c : {"g", "eps_f", "theta_i", "theta_f"}) t.add_column(c, ColumnType::Real);
    for (const ModeData& md : grid_modes(q, config_grid(cfg, q))) {
        std::vector<Cell> row;
        momentum_cells(row, md.momentum);
        row.insert(row.end(), {md.g, md.eps_f, md.theta_i, md.theta_f});
        t.add_row(std::move(row));
    }
    return t;
}

OutputTable cmd_entropy_sweep(const RunConfig& cfg) {
    const QuenchSpec& q = require_quench(cfg, "entropy-sweep");
    OutputTable t = begin_table("entropy-sweep", cfg);
    momentum_columns(t, q.dimension());
    for (const char* c : {"p", "one_minus_p", "S"}) t.add_column(c, ColumnType::Real);
    for (const ModeData& md : grid_modes(q, config_grid(cfg, q))) {
        const EntanglementRecord r = eigenbasis_record(md);
        std::vector<Cell> row;
        momentum_cells(row, md.momentum);
        row.insert(row.end(), {r.p, 1.0 - r.p, r.S});
        t.add_row(std::move(row));
    }
    return t;
}

OutputTable cmd_rate(const RunConfig& cfg) {
    const QuenchSpec& q = require_quench(cfg, "rate");
    OutputTable t = begin_table("rate", cfg);
    t.add_column("t", ColumnType::Real);
    t.add_column("lambda", ColumnType::Real);
    const RateSeries s =
        rate_function(q, config_grid(cfg, q), linspace(cfg.time.t_min, cfg.time.t_max, cfg.time.samples));
    for (std::size_t i = 0; i < s.t.size(); ++i) t.add_row({s.t[i], s.lambda[i]});
    return t;
}

OutputTable cmd_fisher_zeros(const RunConfig& cfg) {
    const QuenchSpec& q = require_quench(cfg, "fisher-zeros");
    OutputTable t = begin_table("fisher-zeros", cfg);
    momentum_columns(t, q.dimension());
    t.add_column("n", ColumnType::Integer);
    t.add_column("re_z", ColumnType::Real);
    t.add_column("im_z", ColumnType::Real);
    for (const ModeData& md : grid_modes(q, config_grid(cfg, q))) {
        for (const FisherZero& z : fisher_zeros(md, cfg.n_range, cfg.fisher)) {
            std::vector<Cell> row;
            momentum_cells(row, md.momentum);
            row.emplace_back(static_cast<std::int64_t>(z.n));
            row.emplace_back(z.z.real());
            row.emplace_back(z.z.imag());
            t.add_row(std::move(row));
        }
    }
    return t;
}

CriticalSet1D critical_1d(const RunConfig& cfg, const QuenchSpec& q) {
    CriticalOptions1D opts;
    opts.scan_n = cfg.scan_n;
    opts.tol = cfg.tol.critical;
    opts.limit_tol = cfg.tol.limit;
    return find_critical_momenta_1d(q, opts);
}

OutputTable cmd_critical_k(const RunConfig& cfg) {
    const QuenchSpec& q = require_quench(cfg, "critical-k");
    OutputTable t = begin_table("critical-k", cfg);
    if (q.dimension() == 1) {
        t.add_column("k", ColumnType::Real);
        t.add_column("residual", ColumnType::Real);
        t.add_column("kind", ColumnType::Text);
        const CriticalSet1D set = critical_1d(cfg, q);
        if (set.boundary_zero) t.add_row({0.0, set.limit_zero, std::string("boundary")});
        for (std::size_t i = 0; i < set.roots.size(); ++i)
            t.add_row({set.roots[i], set.residuals[i], std::string("interior")});
        if (set.boundary_pi) t.add_row({std::numbers::pi, set.limit_pi, std::string("boundary")});
        return t;
    }
    t.add_column("contour", ColumnType::Integer);
    t.add_column("vertex", ColumnType::Integer);
    momentum_columns(t, 2);
    t.add_column("residual", ColumnType::Real);
    t.add_column("closed", ColumnType::Integer);
    const CriticalContour2D set = find_critical_contours_2d(q, config_grid(cfg, q), cfg.tol.contour);
    for (std::size_t c = 0; c < set.lines.size(); ++c) {
        const Polyline& line = set.lines[c];
        for (std::size_t v = 0; v < line.vertices.size(); ++v) {
            std::vector<Cell> row{static_cast<std::int64_t>(c), static_cast<std::int64_t>(v)};
            momentum_cells(row, Momentum::of(line.vertices[v]));
            row.emplace_back(line.residuals[v]);
            row.emplace_back(static_cast<std::int64_t>(line.closed));
            t.add_row(std::move(row));
        }
    }
    return t;
}

Momentum sublattice_momentum(const RunConfig& cfg, const QuenchSpec& q) {
    if (cfg.k) {
        if (cfg.k->dimension != q.dimension()) throw ConfigError("k", "momentum arity does not match the model");
        return *cfg.k;
    }
    if (q.dimension() == 1) {
        const CriticalSet1D set = critical_1d(cfg, q);
        if (set.roots.empty()) throw ConfigError("k", "no --k given and the quench has no critical momentum");
        return Momentum::of(set.roots.front());
    }
    const CriticalContour2D set = find_critical_contours_2d(q, config_grid(cfg, q), cfg.tol.contour);
    if (set.lines.empty()) throw ConfigError("k", "no k given and the quench has no critical contour");
    return Momentum::of(set.lines.front().vertices.front());
}

OutputTable cmd_sublattice(const RunConfig& cfg) {
    const QuenchSpec& q = require_quench(cfg, "sublattice");
    if (q.is_superconductor())
        throw BasisUnavailable("sublattice basis is undefined for superconductor-class models");
    const ModeData md = mode_data(q, sublattice_momentum(cfg, q));
    OutputTable t = begin_table("sublattice", cfg);
    momentum_columns(t, q.dimension());
    for (const char* c : {"t", "a2", "S"}) t.add_column(c, ColumnType::Real);
    const SublatticeSeries s =
        sublattice_entropy_series(md, linspace(cfg.time.t_min, cfg.time.t_max, cfg.time.samples));
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        std::vector<Cell> row;
        momentum_cells(row, md.momentum);
        row.insert(row.end(), {s.t[i], s.a2[i], s.S[i]});
        t.add_row(std::move(row));
    }
    return t;
}

OutputTable cmd_check(const RunConfig& cfg) {
    OutputTable t = begin_table("check", cfg);
    t.add_column("quench", ColumnType::Text);
    t.add_column("check", ColumnType::Text);
    t.add_column("passed", ColumnType::Integer);
    t.add_column("detail", ColumnType::Text);
    std::vector<std::pair<std::string, QuenchSpec>> quenches;
    if (cfg.quench)
        quenches.emplace_back("config", *cfg.quench);
    else
        quenches = benchmark_quenches();
    for (const auto& [label, q] : quenches)
        for (const CheckResult& r : run_checks(label, q, cfg))
            t.add_row({r.quench, r.name, static_cast<std::int64_t>(r.passed), r.detail});
    return t;
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"modes",        "entropy-sweep", "rate",  "fisher-zeros",
                                                "critical-k",   "sublattice",    "check"};
    return names;
}

BrillouinGrid config_grid(const RunConfig& cfg, const QuenchSpec& q) {
    if (q.dimension() == 1) return build_grid_1d(cfg.grid_n, cfg.half_zone.value_or(q.half_zone()));
    return build_grid_2d(cfg.cell.g1, cfg.cell.g2, cfg.grid_n1, cfg.grid_n2);
}

OutputTable run_command(const std::string& cmd, const RunConfig& cfg) {
    if (cmd == "modes") return cmd_modes(cfg);
    if (cmd == "entropy-sweep") return cmd_entropy_sweep(cfg);
    if (cmd == "rate") return cmd_rate(cfg);
    if (cmd == "fisher-zeros") return cmd_fisher_zeros(cfg);
    if (cmd == "critical-k") return cmd_critical_k(cfg);
    if (cmd == "sublattice") return cmd_sublattice(cfg);
    if (cmd == "check") return cmd_check(cfg);
    throw ConfigError("<command>", "unknown subcommand '" + cmd + "'");
}

std::vector<std::pair<std::string, QuenchSpec>> benchmark_quenches() {
    HaldaneParams hi, hf;
    hi.m = 0.5;
    hf.m = 2.0;
    return {
        {"ssh t2 0.5->2.0", QuenchSpec(SshParams{1.0, 0.5}, SshParams{1.0, 2.0})},
        {"xy (0.2,0.1)->(0.8,0.1)", QuenchSpec(XyParams{0.2, 0.1}, XyParams{0.8, 0.1})},
        {"haldane m 0.5->2.0", QuenchSpec(hi, hf)},
    };
}

std::vector<CheckResult> run_checks(const std::string& label, const QuenchSpec& q, const RunConfig& cfg) {
    std::vector<CheckResult> out;
    auto record = [&](const std::string& name, bool ok, const std::string& detail) {
        out.push_back({label, name, ok, detail});
    };

    // Sampled modes: a moderate grid keeps `check` interactive in 2D.
    const BrillouinGrid grid = q.dimension() == 1
                                   ? build_grid_1d(std::min(cfg.grid_n, 2000), q.half_zone())
                                   : build_grid_2d(cfg.cell.g1, cfg.cell.g2, 64, 64);
    const std::vector<ModeData> modes = grid_modes(q, grid);

    double worst_g = 0.0;
    for (const auto& md : modes) worst_g = std::max(worst_g, std::abs(md.g));
    record("overlap_bounds", worst_g <= 1.0, "max |g| = " + format_real(worst_g));

    const std::size_t stride = std::max<std::size_t>(1, modes.size() / 257);
    double spec_err = 0.0, time_err = 0.0, purity_err = 0.0, fisher_err = 0.0;
    for (std::size_t i = 0; i < modes.size(); i += stride) {
        const ModeData& md = modes[i];
        const OracleResult a = ed_oracle(q, md.momentum, 0.37, Bipartition::FinalEigen);
        const OracleResult b = ed_oracle(q, md.momentum, 2.9, Bipartition::FinalEigen);
        const double hi = 0.5 * (1.0 + std::abs(md.g));
        spec_err = std::max({spec_err, std::abs(a.spectrum(0) - hi), std::abs(a.spectrum(1) - (1.0 - hi)),
                             std::abs(a.p - eigenbasis_record(md).p)});
        time_err = std::max(time_err, (a.spectrum - b.spectrum).cwiseAbs().maxCoeff());
        purity_err = std::max({purity_err, std::abs(a.purity - 1.0), std::abs(b.purity - 1.0)});
        for (const FisherZero& z : fisher_zeros(md, cfg.n_range, FisherConvention::Exact))
            fisher_err = std::max(fisher_err, std::abs(loschmidt_at_fisher_point(md, z.z)));
    }
    record("oracle_final_eigen_spectrum", spec_err < 1e-10, "max error " + sci(spec_err));
    record("oracle_time_independence", time_err < 1e-10, "max drift " + sci(time_err));
    record("oracle_purity", purity_err < 1e-12, "max |Tr rho^2 - 1| " + sci(purity_err));
    record("fisher_zero_substitution", fisher_err < 1e-10, "max |G(z_n)| " + sci(fisher_err));

    const RateSeries rate = rate_function(q, grid, linspace(0.0, cfg.time.t_max, 64));
    const double min_rate = *std::min_element(rate.lambda.begin(), rate.lambda.end());
    record("rate_origin", std::abs(rate.lambda.front()) < 1e-14, "lambda(0) = " + format_real(rate.lambda.front()));
    record("rate_nonnegative", min_rate >= -1e-12, "min lambda = " + format_real(min_rate));

    const double ln2 = std::log(2.0);
    double s_err = 0.0, p_err = 0.0;
    std::size_t count = 0;
    auto critical_point = [&](const Momentum& k) {
        const EntanglementRecord r = eigenbasis_record(mode_data(q, k));
        s_err = std::max(s_err, std::abs(r.S - ln2));
        p_err = std::max(p_err, std::abs(r.p - 0.5));
        ++count;
    };
    if (q.dimension() == 1) {
        for (double k : critical_1d(cfg, q).roots) critical_point(Momentum::of(k));
    } else {
        const BrillouinGrid fine = build_grid_2d(cfg.cell.g1, cfg.cell.g2, 128, 128);
        for (const auto& line : find_critical_contours_2d(q, fine, cfg.tol.contour).lines)
            for (const auto& v : line.vertices) critical_point(Momentum::of(v));
    }
    record("critical_max_entropy", s_err < 1e-6 && p_err < 1e-6,
           std::to_string(count) + " critical points, max |S - ln2| " + sci(s_err) + ", max |p - 1/2| " +
               sci(p_err));

    if (!q.is_superconductor()) {
        double norm_err = 0.0, closed_err = 0.0;
        for (std::size_t i = 0; i < modes.size(); i += stride) {
            const ModeData& md = modes[i];
            for (double t : {0.0, 0.8, 2.3}) {
                const SublatticeAmplitudes amp = sublattice_amplitudes(md, t);
                norm_err = std::max(norm_err, std::abs(std::norm(amp.a) + std::norm(amp.b) - 1.0));
                const OracleResult o = ed_oracle(q, md.momentum, t, Bipartition::Sublattice);
                closed_err = std::max(closed_err, std::abs(o.p - sublattice_occupation(md, t)));
            }
        }
        record("sublattice_normalization", norm_err < 1e-12, "max | |a|^2 + |b|^2 - 1 | " + sci(norm_err));
        record("sublattice_closed_form", closed_err < 1e-10, "max oracle deviation " + sci(closed_err));
    }
    return out;
}

}  // namespace dqpt
