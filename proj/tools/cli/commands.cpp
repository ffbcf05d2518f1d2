#include "commands.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "searcheq/errors.hpp"
#include "searcheq/format.hpp"
#include "searcheq/simulate.hpp"
#include "searcheq/welfare.hpp"

namespace searcheq::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTieTolerance = 1e-12;

const char* bool_str(bool b) { return b ? "true" : "false"; }

std::string regime_name(Regime r) { return std::string(to_string(r)); }

fs::path output_path(const RunConfig& cfg, const std::string& file) {
    fs::create_directories(cfg.out_dir);
    return fs::path(cfg.out_dir) / file;
}

void write_file(const RunConfig& cfg, const std::string& file, const std::string& content,
                std::ostream& out) {
    fs::path path = output_path(cfg, file);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << content;
    out << "wrote " << path.string() << '\n';
}

// Solved offer distribution of one regime, whatever the model.
struct Solved {
    Regime regime;
    std::optional<SequentialEquilibrium> seq;
    std::optional<NoisyEquilibrium> noisy;

    double lower() const { return seq ? seq->lower : noisy->lower; }
    double upper() const { return seq ? seq->upper : noisy->upper; }
    double reservation() const { return seq ? seq->reservation : noisy->reservation; }
    double s_bar() const { return seq ? seq->s_bar : noisy->s_bar; }
    bool boundary() const { return seq ? seq->boundary : noisy->boundary; }
    double cdf(double x) const { return seq ? seq->cdf_extended(x) : noisy->cdf_extended(x); }
    double per_firm_profit() const { return seq ? seq->per_firm_profit : kNaN; }
    double industry_profit() const { return seq ? seq->industry_profit() : noisy->industry_profit(); }
};

Solved solve_regime(const RunConfig& cfg, const SurplusMap& m, Regime regime) {
    Solved s{regime, std::nullopt, std::nullopt};
    if (cfg.model == Protocol::sequential) {
        s.seq = regime == Regime::linear ? solve_linear(*cfg.market, m, cfg.solver)
                                         : solve_two_part(*cfg.market, m, cfg.solver);
    } else {
        s.noisy = regime == Regime::linear ? solve_noisy_linear(*cfg.noisy, m, cfg.solver)
                                           : solve_noisy_two_part(*cfg.noisy, m, cfg.solver);
    }
    return s;
}

WelfareReport welfare_of(const RunConfig& cfg, const SurplusMap& m) {
    switch (cfg.model) {
    case Protocol::sequential: {
        auto fee = solve_two_part(*cfg.market, m, cfg.solver);
        auto rev = solve_linear(*cfg.market, m, cfg.solver);
        return welfare_sequential(fee, rev, *cfg.market, m);
    }
    case Protocol::noisy: {
        auto fee = solve_noisy_two_part(*cfg.noisy, m, cfg.solver);
        auto rev = solve_noisy_linear(*cfg.noisy, m, cfg.solver);
        return welfare_noisy(fee, rev, *cfg.noisy, m);
    }
    case Protocol::continuous_cost: return welfare_cont(cfg.cost_distribution(), m);
    }
    throw ConfigError("unknown model");
}

const RegimeWelfare& regime_welfare(const WelfareReport& w, Regime r) {
    return r == Regime::linear ? w.linear : w.nonlinear;
}

void report_rows(std::ostringstream& csv, const std::string& regime, const VerificationReport& report) {
    for (const auto& c : report.checks) {
        csv << regime << ',' << c.name << ',' << format_double(c.residual) << ','
            << format_double(c.location) << ',' << format_double(c.tolerance) << ',' << bool_str(c.pass)
            << '\n';
    }
}

VerificationReport certify_continuous(const RunConfig& cfg, const SurplusMap& m,
                                      const VerifyTolerances& tol) {
    auto g = cfg.cost_distribution();
    auto t_star = solve_t_star(g, m);
    auto pi_star = solve_pi_star(g, m);
    VerificationReport r;
    r.add({"t-star-argmax", t_star.argmax_gain, t_star.value, tol.deviation_gain,
           t_star.argmax_gain <= tol.deviation_gain});
    r.add({"pi-star-argmax", pi_star.argmax_gain, pi_star.value, tol.deviation_gain,
           pi_star.argmax_gain <= tol.deviation_gain});
    double condition = std::abs(pi_star.value * -m.v_prime(pi_star.value) - 1.0 / g.g0());
    double cond_tol = 1e-10 * tol.equal_profit / 1e-8;
    r.add({"pi-star-condition", condition, pi_star.value, cond_tol, condition <= cond_tol});
    r.add({"pi-star-below-t-star", pi_star.value - t_star.value, pi_star.value, 0.0,
           pi_star.value < t_star.value});
    return r;
}

double parse_number(std::string_view field, std::size_t row) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw DomainError("malformed number '" + std::string(field) + "' in CDF table row " +
                          std::to_string(row));
    }
    return value;
}

// Cartesian product of the axes, first axis slowest.
std::vector<std::vector<double>> grid_points(const std::vector<SweepAxis>& axes) {
    std::vector<std::vector<double>> points{{}};
    for (const auto& axis : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& p : points) {
            for (double v : axis.values) {
                auto q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

struct SweepRegimeRow {
    double lower = kNaN, upper = kNaN, reservation = kNaN, s_bar = kNaN;
    bool boundary = false;
    RegimeWelfare welfare{kNaN, kNaN, kNaN};
};

struct SweepPoint {
    SweepRegimeRow linear, nonlinear;
    double surplus_gap = kNaN;
    double ratio_gap = kNaN;
    bool upper_ordering = false, profit_ordering = false, cs_ordering = false, ts_ordering = false;
    std::string error;

    bool flags() const { return upper_ordering && profit_ordering && cs_ordering && ts_ordering; }
};

double axis_value(const std::vector<SweepAxis>& axes, const std::vector<double>& point,
                  const std::string& name, double fallback) {
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i].name == name) return point[i];
    }
    return fallback;
}

bool has_axis(const std::vector<SweepAxis>& axes, const std::string& name) {
    return std::any_of(axes.begin(), axes.end(), [&](const SweepAxis& a) { return a.name == name; });
}

void check_axes(const RunConfig& cfg) {
    if (!cfg.has_sweep || cfg.axes.empty()) throw ConfigError("sweep needs at least one axis in sweep.axes");
    for (const auto& a : cfg.axes) {
        if (a.values.empty()) throw ConfigError("sweep axis '" + a.name + "' has no values");
        bool ok = false;
        if (a.name == "s" || a.name == "s_rel") ok = cfg.model != Protocol::continuous_cost;
        if (a.name == "lambda" || a.name == "n") ok = cfg.model == Protocol::sequential;
        if (a.name == "mu1") ok = cfg.model == Protocol::noisy;
        if (a.name == "g0") ok = cfg.model == Protocol::continuous_cost;
        if (!ok) {
            throw ConfigError("sweep axis '" + a.name + "' does not apply to model " +
                              std::string(to_string(cfg.model)));
        }
    }
    if (has_axis(cfg.axes, "s") && has_axis(cfg.axes, "s_rel")) {
        throw ConfigError("sweep axes 's' and 's_rel' are mutually exclusive");
    }
    if (has_axis(cfg.axes, "g0") && cfg.cost_family == CostFamily::truncated_normal) {
        throw ConfigError("sweep axis 'g0' needs a uniform or exponential cost distribution");
    }
}

SweepPoint sweep_point(const RunConfig& base, const std::vector<double>& point) {
    SweepPoint out;
    try {
        RunConfig cfg = base;
        const auto& axes = base.axes;
        SurplusMap m = cfg.surplus();
        WelfareReport w;
        if (cfg.model == Protocol::sequential) {
            MarketParams p = *cfg.market;
            p.lambda = axis_value(axes, point, "lambda", p.lambda);
            p.n = static_cast<int>(std::lround(axis_value(axes, point, "n", p.n)));
            p.s = axis_value(axes, point, "s", p.s);
            if (has_axis(axes, "s_rel")) {
                p.validate();
                p.s = axis_value(axes, point, "s_rel", 1.0) * solve_two_part(p, m, cfg.solver).s_bar;
            }
            p.validate();
            auto fee = solve_two_part(p, m, cfg.solver);
            auto rev = solve_linear(p, m, cfg.solver);
            w = welfare_sequential(fee, rev, p, m);
            auto bounds = cs_bound_checks(fee, rev, p, m);
            out.surplus_gap = bounds.surplus_gap;
            out.ratio_gap = bounds.support_ratio_gap;
            out.linear = {rev.lower, rev.upper, rev.reservation, rev.s_bar, rev.boundary, w.linear};
            out.nonlinear = {fee.lower, fee.upper, fee.reservation, fee.s_bar, fee.boundary, w.nonlinear};
        } else if (cfg.model == Protocol::noisy) {
            NoisyParams p = *cfg.noisy;
            if (has_axis(axes, "mu1")) {
                double mu1 = axis_value(axes, point, "mu1", p.mu_at(1));
                double rest = 1.0 - p.mu_at(1);
                if (!(rest > 0.0)) throw InvalidParameter("mu1 axis needs mass beyond mu(1) in noisy.mu");
                for (int k = 2; k <= p.m(); ++k) p.mu[static_cast<std::size_t>(k - 1)] *= (1.0 - mu1) / rest;
                p.mu[0] = mu1;
            }
            p.s = axis_value(axes, point, "s", p.s);
            if (has_axis(axes, "s_rel")) {
                p.validate();
                p.s = axis_value(axes, point, "s_rel", 1.0) * solve_noisy_two_part(p, m, cfg.solver).s_bar;
            }
            p.validate();
            auto fee = solve_noisy_two_part(p, m, cfg.solver);
            auto rev = solve_noisy_linear(p, m, cfg.solver);
            w = welfare_noisy(fee, rev, p, m);
            out.surplus_gap = m.v(rev.upper) - (m.v0() - fee.upper);
            out.ratio_gap = std::abs(rev.upper / rev.lower - fee.upper / fee.lower);
            out.linear = {rev.lower, rev.upper, rev.reservation, rev.s_bar, rev.boundary, w.linear};
            out.nonlinear = {fee.lower, fee.upper, fee.reservation, fee.s_bar, fee.boundary, w.nonlinear};
        } else {
            if (has_axis(axes, "g0")) {
                double g0 = axis_value(axes, point, "g0", 1.0);
                if (!(g0 > 0.0)) throw InvalidParameter("g0 must be positive");
                cfg.cost_params = {*cfg.cost_family == CostFamily::uniform ? 1.0 / g0 : g0};
            }
            auto g = cfg.cost_distribution();
            auto t_star = solve_t_star(g, m);
            auto pi_star = solve_pi_star(g, m);
            w = welfare_cont(g, m);
            out.surplus_gap = m.v(pi_star.value) - (m.v0() - t_star.value);
            out.linear = {pi_star.value, pi_star.value, kNaN, kNaN, false, w.linear};
            out.nonlinear = {t_star.value, t_star.value, kNaN, kNaN, t_star.clamped, w.nonlinear};
        }
        out.upper_ordering = out.nonlinear.upper > out.linear.upper;
        out.profit_ordering = w.nonlinear.industry_profit > w.linear.industry_profit;
        out.cs_ordering = w.nonlinear.consumer_surplus < w.linear.consumer_surplus;
        out.ts_ordering = w.nonlinear.total_surplus >= w.linear.total_surplus - kTieTolerance;
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

} // namespace

TabulatedCdf read_cdf_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CDF table '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DomainError("CDF table '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,cdf") throw DomainError("CDF table header must be 'x,cdf' (got '" + line + "')");
    std::vector<double> x;
    std::vector<double> f;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw DomainError("CDF table row " + std::to_string(row) + " must have two columns");
        }
        std::string_view view(line);
        x.push_back(parse_number(view.substr(0, comma), row));
        f.push_back(parse_number(view.substr(comma + 1), row));
    }
    return TabulatedCdf(std::move(x), std::move(f));
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    SurplusMap m = cfg.surplus();
    std::ostringstream summary;
    if (cfg.model == Protocol::continuous_cost) {
        auto g = cfg.cost_distribution();
        summary << "model,regime,value,interval_high,clamped,argmax_gain,g0\n";
        for (Regime r : cfg.regimes) {
            auto eq = r == Regime::linear ? solve_pi_star(g, m) : solve_t_star(g, m);
            summary << "continuous-cost," << regime_name(r) << ',' << format_double(eq.value) << ','
                    << format_double(eq.interval_high) << ',' << bool_str(eq.clamped) << ','
                    << format_double(eq.argmax_gain) << ',' << format_double(g.g0()) << '\n';
        }
        write_file(cfg, "summary.csv", summary.str(), out);
        return exit_ok;
    }

    summary << "model,regime,lower,upper,reservation,s_bar,boundary,per_firm_profit,industry_profit\n";
    std::ostringstream plot;
    plot << "regime,x,cdf\n";
    std::vector<std::pair<std::string, std::string>> tables;
    for (Regime r : cfg.regimes) {
        Solved s = solve_regime(cfg, m, r);
        summary << to_string(cfg.model) << ',' << regime_name(r) << ',' << format_double(s.lower()) << ','
                << format_double(s.upper()) << ',' << format_double(s.reservation()) << ','
                << format_double(s.s_bar()) << ',' << bool_str(s.boundary()) << ','
                << format_double(s.per_firm_profit()) << ',' << format_double(s.industry_profit())
                << '\n';
        std::ostringstream table;
        table << "x,cdf\n";
        for (int i = 0; i < cfg.cdf_rows; ++i) {
            double x = i + 1 == cfg.cdf_rows
                           ? s.upper()
                           : s.lower() + (s.upper() - s.lower()) * i / (cfg.cdf_rows - 1);
            double f = s.cdf(x);
            table << format_double(x) << ',' << format_double(f) << '\n';
            plot << regime_name(r) << ',' << format_double(x) << ',' << format_double(f) << '\n';
        }
        tables.emplace_back("cdf_" + regime_name(r) + ".csv", table.str());
    }
    write_file(cfg, "summary.csv", summary.str(), out);
    for (const auto& [file, content] : tables) write_file(cfg, file, content, out);
    if (cfg.emit_plot_data) write_file(cfg, "plot_cdf.csv", plot.str(), out);
    return exit_ok;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    VerifyTolerances tol = VerifyTolerances{}.scaled(cfg.tolerance_scale);
    std::ostringstream csv;
    csv << "regime,check,residual,location,tolerance,pass\n";
    std::vector<std::string> failed;
    auto record = [&](const std::string& regime, const VerificationReport& report) {
        report_rows(csv, regime, report);
        for (const auto& name : report.failures()) failed.push_back(regime + ":" + name);
    };

    if (cfg.cdf_table) {
        if (cfg.model == Protocol::continuous_cost) {
            throw ConfigError("CDF tables can only be verified for sequential or noisy models");
        }
        TabulatedCdf table = read_cdf_table(*cfg.cdf_table);
        if (cfg.model == Protocol::sequential) {
            if (!cfg.market) throw ConfigError("model sequential needs a 'market' section");
            cfg.market->validate();
            record("table", certify_table(table, *cfg.market, tol));
        } else {
            if (!cfg.noisy) throw ConfigError("model noisy needs a 'noisy' section");
            cfg.noisy->validate();
            record("table", certify_table(table, *cfg.noisy, tol));
        }
    } else {
        cfg.validate();
        SurplusMap m = cfg.surplus();
        if (cfg.model == Protocol::continuous_cost) {
            record("both", certify_continuous(cfg, m, tol));
        } else {
            for (Regime r : cfg.regimes) {
                Solved s = solve_regime(cfg, m, r);
                record(regime_name(r), s.seq ? certify(*s.seq, tol) : certify(*s.noisy, tol));
            }
        }
    }
    write_file(cfg, "verify.csv", csv.str(), out);
    if (failed.empty()) return exit_ok;
    nlohmann::json line{{"error", "VerificationFailed"}, {"failed_checks", failed}, {"exit_code", exit_verify}};
    err << line.dump() << '\n';
    return exit_verify;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    cfg.validate();
    cfg.sim.validate();
    if (cfg.model == Protocol::continuous_cost) {
        throw ConfigError("simulate supports the sequential and noisy models");
    }
    if (cfg.sim.undersized()) {
        nlohmann::json line{{"warning", "replications * consumers_per_replication < 10000; "
                                        "standard errors are unreliable"}};
        err << line.dump() << '\n';
    }
    SurplusMap m = cfg.surplus();
    WelfareReport w = welfare_of(cfg, m);
    std::ostringstream csv;
    csv << "regime,metric,estimate,se,analytic,z\n";
    auto row = [&](Regime r, const char* metric, Estimate e, double analytic) {
        double z = (e.mean - analytic) / e.se;
        csv << regime_name(r) << ',' << metric << ',' << format_double(e.mean) << ',' << format_double(e.se)
            << ',' << format_double(analytic) << ',' << format_double(z) << '\n';
    };
    for (Regime r : cfg.regimes) {
        Solved s = solve_regime(cfg, m, r);
        SimResult res = s.seq ? simulate_sequential(*s.seq, cfg.sim) : simulate_noisy(*s.noisy, cfg.sim);
        const RegimeWelfare& rw = regime_welfare(w, r);
        auto cdf = [&s](double x) { return s.cdf(x); };
        row(r, "industry_profit", res.industry_profit, rw.industry_profit);
        row(r, "consumer_surplus", res.consumer_surplus, rw.consumer_surplus);
        if (s.seq) {
            row(r, "paid_shoppers", res.paid_shoppers,
                expected_min(cdf, s.lower(), s.upper(), s.seq->params.n));
            row(r, "paid_nonshoppers", res.paid_nonshoppers, expected_min(cdf, s.lower(), s.upper(), 1));
            for (std::size_t j = 0; j < res.firm_profit.size(); ++j) {
                std::string metric = "firm_profit_" + std::to_string(j + 1);
                row(r, metric.c_str(), res.firm_profit[j], s.per_firm_profit());
            }
        } else {
            row(r, "paid", res.paid_nonshoppers, s.industry_profit());
        }
        row(r, "searches", res.searches, 1.0);
        csv << regime_name(r) << ",second_round_searches," << res.second_round_searches << ",,0,\n";
        csv << regime_name(r) << ",ks_distance," << format_double(res.ks_distance) << ",,"
            << format_double(res.ks_critical) << ",\n";
        if (cfg.write_replications) {
            std::ostringstream reps;
            write_replications_csv(reps, res);
            write_file(cfg, "replications_" + regime_name(r) + ".csv", reps.str(), out);
        }
    }
    write_file(cfg, "simulation.csv", csv.str(), out);
    return exit_ok;
}

int cmd_welfare(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    SurplusMap m = cfg.surplus();
    WelfareReport w = welfare_of(cfg, m);
    std::ostringstream csv;
    csv << "regime,total_surplus,industry_profit,consumer_surplus\n";
    auto row = [&](const char* name, const RegimeWelfare& r) {
        csv << name << ',' << format_double(r.total_surplus) << ',' << format_double(r.industry_profit)
            << ',' << format_double(r.consumer_surplus) << '\n';
    };
    row("linear", w.linear);
    row("two-part", w.nonlinear);
    row("delta", w.delta());
    write_file(cfg, "welfare.csv", csv.str(), out);
    std::ostringstream params;
    params << "name,value\n";
    for (const auto& [name, value] : w.parameters) params << name << ',' << format_double(value) << '\n';
    write_file(cfg, "welfare_parameters.csv", params.str(), out);
    return exit_ok;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    check_axes(cfg);
    (void)cfg.surplus();
    if (cfg.model == Protocol::continuous_cost) (void)cfg.cost_distribution();
    auto points = grid_points(cfg.axes);
    std::vector<SweepPoint> results(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) results[i] = sweep_point(cfg, points[i]);
    };
    int threads = std::min<int>(cfg.sweep_threads, static_cast<int>(points.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::ostringstream csv;
    csv << "point";
    for (const auto& a : cfg.axes) csv << ',' << a.name;
    csv << ",regime,lower,upper,reservation,s_bar,boundary,industry_profit,consumer_surplus,total_surplus,"
           "surplus_gap,ratio_gap,upper_ordering,profit_ordering,cs_ordering,ts_ordering,error\n";
    std::ostringstream plot;
    plot << "point,regime,total_surplus,industry_profit,consumer_surplus\n";
    bool upper_all = true, profit_all = true, cs_all = true, ts_all = true;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const SweepPoint& p = results[i];
        upper_all = upper_all && p.upper_ordering;
        profit_all = profit_all && p.profit_ordering;
        cs_all = cs_all && p.cs_ordering;
        ts_all = ts_all && p.ts_ordering;
        if (!p.error.empty()) ++errors;
        for (Regime r : {Regime::linear, Regime::two_part}) {
            const SweepRegimeRow& row = r == Regime::linear ? p.linear : p.nonlinear;
            csv << i;
            for (double v : points[i]) csv << ',' << format_double(v);
            csv << ',' << regime_name(r) << ',' << format_double(row.lower) << ',' << format_double(row.upper)
                << ',' << format_double(row.reservation) << ',' << format_double(row.s_bar) << ','
                << bool_str(row.boundary) << ',' << format_double(row.welfare.industry_profit) << ','
                << format_double(row.welfare.consumer_surplus) << ','
                << format_double(row.welfare.total_surplus) << ',' << format_double(p.surplus_gap) << ','
                << format_double(p.ratio_gap) << ',' << bool_str(p.upper_ordering) << ','
                << bool_str(p.profit_ordering) << ',' << bool_str(p.cs_ordering) << ','
                << bool_str(p.ts_ordering) << ',' << csv_escape(p.error) << '\n';
            plot << i << ',' << regime_name(r) << ',' << format_double(row.welfare.total_surplus) << ','
                 << format_double(row.welfare.industry_profit) << ','
                 << format_double(row.welfare.consumer_surplus) << '\n';
        }
    }
    csv << "all";
    for (std::size_t k = 0; k < cfg.axes.size() + 12; ++k) csv << ',';
    csv << bool_str(upper_all) << ',' << bool_str(profit_all) << ',' << bool_str(cs_all) << ','
        << bool_str(ts_all) << ',' << (errors ? std::to_string(errors) + " point errors" : "") << '\n';
    write_file(cfg, "sweep.csv", csv.str(), out);
    if (cfg.emit_plot_data) write_file(cfg, "plot_welfare.csv", plot.str(), out);
    return exit_ok;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto fail = [&](const char* kind, const std::string& message, int code) {
        nlohmann::json line{{"error", kind}, {"message", message}, {"exit_code", code}};
        err << line.dump() << '\n';
        return code;
    };

    CLI::App app{"Search-market equilibrium solver"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance_scale;
    std::optional<std::string> table;
    bool emit_plot = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--seed", seed, "simulation master seed (overrides seed)");
    app.add_flag("--emit-plot-data", emit_plot, "also write plot-ready data tables");
    app.add_option("--tolerance-scale", tolerance_scale, "multiply verification tolerances");
    app.add_option("--table", table, "external x,cdf table to verify");
    const std::vector<std::pair<const char*, const char*>> commands = {
        {"solve", "solve equilibria and write summaries and CDF tables"},
        {"verify", "certify solved equilibria or an external CDF table"},
        {"simulate", "Monte Carlo market simulation against analytic values"},
        {"sweep", "welfare orderings over a parameter grid"},
        {"welfare", "welfare comparison of the two pricing regimes"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        return fail("UsageError", e.what(), exit_config);
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (out_dir) cfg.out_dir = *out_dir;
        if (seed) cfg.sim.master_seed = *seed;
        if (tolerance_scale) {
            if (!(*tolerance_scale > 0.0)) throw ConfigError("--tolerance-scale must be positive");
            cfg.tolerance_scale = *tolerance_scale;
        }
        if (table) cfg.cdf_table = *table;
        cfg.emit_plot_data = cfg.emit_plot_data || emit_plot;

        std::string name = app.get_subcommands().front()->get_name();
        if (name == "solve") return cmd_solve(cfg, out);
        if (name == "verify") return cmd_verify(cfg, out, err);
        if (name == "simulate") return cmd_simulate(cfg, out, err);
        if (name == "sweep") return cmd_sweep(cfg, out);
        return cmd_welfare(cfg, out);
    } catch (const SolveFailure& e) {
        return fail("SolveFailure", e.what(), exit_solve);
    } catch (const InvalidDemand& e) {
        return fail("InvalidDemand", e.what(), exit_config);
    } catch (const InvalidParameter& e) {
        return fail("InvalidParameter", e.what(), exit_config);
    } catch (const ParameterMismatch& e) {
        return fail("ParameterMismatch", e.what(), exit_config);
    } catch (const DomainError& e) {
        return fail("DomainError", e.what(), exit_config);
    } catch (const ConfigError& e) {
        return fail("ConfigError", e.what(), exit_config);
    } catch (const fs::filesystem_error& e) {
        return fail("ConfigError", e.what(), exit_config);
    }
}

} // namespace searcheq::cli
