#pragma once

/// @file cli.hpp
/// Command-line front end. `run` parses argv, dispatches to the library and
/// writes one artifact (stdout or --output) plus one summary line per check.
///
/// Exit codes: 0 success, 1 a check with met hypotheses was violated,
/// 2 usage or configuration error, 3 hypothesis not met.

#include "analysis.hpp"
#include "io.hpp"
#include "kernels.hpp"
#include "operators.hpp"
#include "spaces.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace expsamp::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_violation = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_hypothesis = 3;

inline const char* const output_dir_variable = "EXPSAMP_OUTPUT_DIR";

struct RunConfig {
    std::string command;
    std::string kernel = "bspline3";
    std::string function = "weight";
    double mu = 5.0;
    int r = 1;
    std::vector<double> w;
    std::vector<double> interval;
    long window = 0;
    std::string grid;
    std::string op = "MG";
    double c = 0.0;
    std::string output;
    std::string format;
    std::uint64_t seed = 1;
    std::size_t quad_points = 8;
    std::vector<double> nu;
    bool ignore_chi3 = false;
    double safety = 1.0;
    std::size_t trials = 100;

    /// Fills command-dependent defaults.
    void resolve()
    {
        if (w.empty()) {
            if (command == "reconstruct")
                w = {8};
            else if (command == "converge")
                w = {4, 8, 16, 32, 64};
            else if (command == "rate")
                w = {8, 16, 32};
            else if (command == "voronovskaja")
                w = {8, 16, 32, 64};
            else
                w = {4, 16, 64};
        }
        if (nu.empty())
            nu = {0, 1, 2};
        if (format.empty())
            format = command == "kernel-check" ? "json" : "csv";
        if (grid.empty()) {
            if (has_interval()) {
                std::ostringstream os;
                os.precision(17);
                os << std::log(interval[0]) << ':' << std::log(interval[1]) << ":257";
                grid = os.str();
            }
            else {
                grid = command == "voronovskaja" ? "-2:2:101" : "-2:2:257";
            }
        }
    }

    void validate() const
    {
        if (format != "csv" && format != "json" && format != "md")
            throw configuration_error("--format must be csv, json or md");
        if (!interval.empty() && interval.size() != 2)
            throw configuration_error("--interval takes two values a,b");
        if (has_interval() && !(interval[0] > 0.0 && interval[0] < interval[1]))
            throw configuration_error("--interval needs 0 < a < b");
        if (has_interval() && window != 0)
            throw configuration_error("--interval and --window are mutually exclusive");
        for (double v : w)
            if (!(v > 0.0))
                throw configuration_error("--w values must be positive");
        (void)LogGrid::parse(grid);
        (void)make_kernel(kernel);
        (void)make_function(function);
    }

    bool has_interval() const { return interval.size() == 2; }

    SamplingConfig sampling(double rate) const
    {
        SamplingConfig s = has_interval() ? SamplingConfig::on_interval(rate, interval[0], interval[1])
                                          : SamplingConfig::windowed(rate, window);
        s.quadrature_points = quad_points;
        s.validate();
        return s;
    }

    /// Everything that determines the output, excluding the output location.
    json to_json() const
    {
        json j;
        j["command"] = command;
        j["kernel"] = kernel;
        j["function"] = function;
        j["mu"] = mu;
        j["r"] = r;
        j["w"] = w;
        if (has_interval())
            j["interval"] = interval;
        else
            j["window"] = window;
        j["grid"] = grid;
        j["op"] = op;
        j["c"] = c;
        j["format"] = format;
        j["seed"] = seed;
        j["quad_points"] = quad_points;
        j["nu"] = nu;
        j["ignore_chi3"] = ignore_chi3;
        j["safety"] = safety;
        j["trials"] = trials;
        return j;
    }
};

struct Outcome {
    int status = exit_ok;
    std::string artifact;
    std::vector<std::string> summary;
};

namespace detail {

inline std::string summary_line(const BoundCheck& b)
{
    std::ostringstream os;
    os << b.name << ": " << b.verdict();
    if (b.hypotheses_met)
        os << " (lhs " << format_real(b.lhs) << ", rhs " << format_real(b.rhs) << ")";
    else
        os << " (" << b.note << ")";
    return os.str();
}

inline std::string render_checks(const RunConfig& cfg, const std::vector<BoundCheck>& checks, json extra = {})
{
    if (cfg.format == "csv")
        return checks_csv(checks, cfg.to_json());
    if (cfg.format == "md")
        return "config: `" + cfg.to_json().dump() + "`\n\n" + checks_markdown(checks);
    json j;
    j["config"] = cfg.to_json();
    j["checks"] = to_json(checks);
    for (auto& [k, v] : extra.items())
        j[k] = v;
    return j.dump(2) + "\n";
}

inline int checks_status(const std::vector<BoundCheck>& checks)
{
    for (const auto& b : checks)
        if (b.violated())
            return exit_violation;
    return exit_ok;
}

inline void summarize(Outcome& out, const std::vector<BoundCheck>& checks)
{
    for (const auto& b : checks)
        out.summary.push_back(summary_line(b));
    out.status = checks_status(checks);
}

inline Outcome kernel_check(const RunConfig& cfg)
{
    const auto kernel = make_kernel(cfg.kernel);
    const auto rep = check_kernel_conditions(kernel, cfg.mu, cfg.r);
    Outcome out;
    if (cfg.format == "csv")
        out.artifact = moment_report_csv(rep, cfg.to_json());
    else if (cfg.format == "md")
        out.artifact = "config: `" + cfg.to_json().dump() + "`\n\n" + moment_report_markdown(rep);
    else
        out.artifact = json{{"config", cfg.to_json()}, {"report", to_json(rep)}}.dump(2) + "\n";
    out.summary.push_back(rep.kernel_name + ": chi1 " + (rep.chi1_holds ? "holds" : "fails") + ", chi2 " +
                          (rep.chi2_holds ? "holds" : "fails") + ", chi3 " + (rep.chi3_holds ? "holds" : "fails"));
    return out;
}

inline Outcome moments(const RunConfig& cfg)
{
    const auto kernel = make_kernel(cfg.kernel);
    Outcome out;
    json rows = json::array();
    std::ostringstream csv;
    csv << config_comment(cfg.to_json()) << "kernel,nu,m,half_width,tail_bound,status,witness_log_u,witness_k\n";
    std::ostringstream md;
    md << "config: `" << cfg.to_json().dump() << "`\n\n| nu | m_nu | status |\n|---|---|---|\n";
    for (double nu : cfg.nu) {
        std::ostringstream line;
        try {
            const auto m = discrete_absolute_moment(kernel, nu);
            const std::string status = m.converged ? "finite" : "unsettled";
            rows.push_back({{"nu", nu},
                            {"m", real_json(m.value)},
                            {"half_width", m.half_width},
                            {"tail_bound", real_json(m.tail_bound)},
                            {"status", status},
                            {"witness_log_u", m.witness_log_u},
                            {"witness_k", m.witness_k}});
            csv << kernel.name << ',' << format_real(nu) << ',' << format_real(m.value) << ',' << m.half_width << ','
                << format_real(m.tail_bound) << ',' << status << ',' << format_real(m.witness_log_u) << ','
                << m.witness_k << '\n';
            md << "| " << format_real(nu) << " | " << format_real(m.value) << " | " << status << " |\n";
            line << "m_" << format_real(nu) << "(" << kernel.name << ") = " << format_real(m.value);
        }
        catch (const divergent_moment& e) {
            rows.push_back({{"nu", nu},
                            {"m", "inf"},
                            {"status", "divergent"},
                            {"witness_log_u", e.witness_log_u()},
                            {"witness_k", e.witness_k()},
                            {"message", e.what()}});
            csv << kernel.name << ',' << format_real(nu) << ",inf,,,divergent," << format_real(e.witness_log_u())
                << ',' << e.witness_k() << '\n';
            md << "| " << format_real(nu) << " | inf | divergent |\n";
            line << "m_" << format_real(nu) << "(" << kernel.name << ") diverges: " << e.what();
        }
        out.summary.push_back(line.str());
    }
    const double eta = eta_lower_bound(kernel);
    if (cfg.format == "csv")
        out.artifact = csv.str() + "# eta: " + format_real(eta) + "\n";
    else if (cfg.format == "md")
        out.artifact = md.str() + "\neta = " + format_real(eta) + "\n";
    else
        out.artifact =
            json{{"config", cfg.to_json()}, {"kernel", kernel.name}, {"moments", rows}, {"eta", real_json(eta)}}
                .dump(2) +
            "\n";
    return out;
}

inline Outcome reconstruct(const RunConfig& cfg)
{
    const auto kernel = make_kernel(cfg.kernel);
    const auto f = make_function(cfg.function);
    const auto grid = LogGrid::parse(cfg.grid);
    const auto spec = OperatorSpec{parse_operator(cfg.op), cfg.c};
    Outcome out;
    std::string body;
    json all = json::array();
    for (double w : cfg.w) {
        const auto values = evaluate_on_grid(spec, f, kernel, cfg.sampling(w), grid);
        std::size_t failed = 0;
        double worst = 0.0;
        for (const auto& g : values) {
            if (!g.ok())
                ++failed;
            else
                worst = std::max(worst, g.weighted_error);
        }
        std::ostringstream line;
        line << cfg.op << " w=" << format_real(w) << ": " << values.size() << " points, weighted sup error "
             << format_real(worst) << ", " << failed << " failed";
        out.summary.push_back(line.str());
        if (cfg.format == "csv")
            body += cfg.w.size() == 1 ? grid_csv(values, cfg.to_json())
                                      : "# w: " + format_real(w) + "\n" + grid_csv(values, cfg.to_json());
        else if (cfg.format == "md")
            body += "### w = " + format_real(w) + "\n\n" + grid_markdown(values) + "\n";
        else
            all.push_back({{"w", w}, {"values", to_json(values)}});
    }
    if (cfg.format == "json")
        body = json{{"config", cfg.to_json()}, {"runs", all}}.dump(2) + "\n";
    else if (cfg.format == "md")
        body = "config: `" + cfg.to_json().dump() + "`\n\n" + body;
    out.artifact = body;
    return out;
}

inline Outcome converge(const RunConfig& cfg)
{
    const auto kernel = make_kernel(cfg.kernel);
    const auto f = make_function(cfg.function);
    const auto grid = LogGrid::parse(cfg.grid);
    const auto table = convergence_experiment(f, kernel, cfg.w, grid, cfg.sampling(cfg.w.front()));
    Outcome out;
    if (cfg.format == "csv")
        out.artifact = error_table_csv(table, cfg.to_json());
    else if (cfg.format == "md")
        out.artifact = "config: `" + cfg.to_json().dump() + "`\n\n" + error_table_markdown(table);
    else
        out.artifact = json{{"config", cfg.to_json()}, {"table", to_json(table)}}.dump(2) + "\n";
    for (const auto& row : table.rows)
        out.summary.push_back("w=" + format_real(row.w) + ": weighted sup error " +
                              format_real(row.weighted_sup_error));
    if (table.fitted_order)
        out.summary.push_back("fitted order " + format_real(*table.fitted_order));
    return out;
}

inline Outcome rate(const RunConfig& cfg)
{
    const auto kernel = make_kernel(cfg.kernel);
    const auto f = make_function(cfg.function);
    const auto grid = LogGrid::parse(cfg.grid);
    RateOptions opts;
    opts.safety = cfg.safety;
    opts.base = cfg.sampling(cfg.w.front());
    const auto checks = verify_quantitative_rate(f, kernel, cfg.w, grid, opts);
    Outcome out;
    out.artifact = render_checks(cfg, checks);
    summarize(out, checks);
    return out;
}

inline Outcome voronovskaja(const RunConfig& cfg)
{
    const auto kernel = make_kernel(cfg.kernel);
    const auto f = make_function(cfg.function);
    const auto grid = LogGrid::parse(cfg.grid);
    VoronovskajaOptions opts;
    opts.require_chi3 = !cfg.ignore_chi3;
    const auto res = voronovskaja_check(f, kernel, cfg.r, cfg.w, grid, opts);
    Outcome out;
    out.artifact = render_checks(cfg, res.checks, json{{"voronovskaja", to_json(res)}});
    summarize(out, res.checks);
    return out;
}

inline std::vector<BoundCheck> guarded(const std::string& name, const std::function<std::vector<BoundCheck>()>& run)
{
    try {
        return run();
    }
    catch (const hypothesis_not_met& e) {
        return {unmet_check(name, e.what())};
    }
}

inline Outcome suite(const RunConfig& cfg)
{
    const auto kernel = make_kernel(cfg.kernel);
    const auto grid = LogGrid::parse(cfg.grid);
    std::vector<BoundCheck> checks = lemma_suite(kernel);
    auto append = [&](std::vector<BoundCheck> more) {
        for (auto& b : more)
            checks.push_back(std::move(b));
    };
    const std::vector<WeightedFunction> norm_set{make_function("const1"), make_function("weight"),
                                                 make_function("psi"), make_function("damped_log2"),
                                                 make_function("damped_sin_log")};
    for (double w : cfg.w) {
        const std::string tag = ".w=" + format_real(w);
        const auto config = cfg.sampling(w);
        append(guarded("weighted_image_bound" + tag, [&] {
            auto b = verify_weighted_image_bound(kernel, config, grid);
            b.name += tag;
            return std::vector<BoundCheck>{b};
        }));
        append(guarded("operator_norm" + tag, [&] {
            auto b = verify_operator_norm(kernel, config, grid, norm_set);
            b.name += tag;
            return std::vector<BoundCheck>{b};
        }));
    }
    if (eta_lower_bound(kernel) > 0.0) {
        const double w = cfg.w.front();
        const auto lattice_config =
            cfg.has_interval() ? cfg.sampling(w) : SamplingConfig::on_interval(w, 1.0, std::exp(1.0));
        const LogGrid lattice_grid{lattice_config.interval->log_a, lattice_config.interval->log_b, 65};
        append(lattice_property_suite(kernel, lattice_config, lattice_grid, cfg.trials, cfg.seed));
    }
    else {
        checks.push_back(unmet_check("mg.lattice", "(chi2) fails, denominators can vanish"));
    }
    for (const char* name : {"weight", "damped_log2", "damped_sin_log"}) {
        const auto table = convergence_experiment(make_function(name), kernel, cfg.w, grid, cfg.sampling(cfg.w.front()));
        double worst = 0.0;
        for (std::size_t i = 1; i < table.rows.size(); ++i) {
            const double prev = table.rows[i - 1].weighted_sup_error;
            const double next = table.rows[i].weighted_sup_error;
            worst = std::max(worst, prev > 0.0 ? next / prev : (next > 0.0 ? infinity : 0.0));
        }
        checks.push_back(make_check(std::string("convergence.") + name, worst, 1.0, 0.0, 0.0, std::nullopt,
                                    "largest ratio of consecutive weighted sup errors"));
    }
    Outcome out;
    out.artifact = render_checks(cfg, checks);
    summarize(out, checks);
    return out;
}

inline std::string list_registries()
{
    std::ostringstream os;
    os << "kernels:\n";
    for (const auto& k : kernel_catalog())
        os << "  " << k.name << "  " << k.description << '\n';
    os << "functions:\n";
    for (const auto& f : function_catalog())
        os << "  " << f.name << "  " << f.description << '\n';
    return os.str();
}

inline std::filesystem::path output_path(const std::string& requested)
{
    std::filesystem::path p(requested);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(output_dir_variable); dir != nullptr && *dir != '\0')
            p = std::filesystem::path(dir) / p;
    }
    return p;
}

} // namespace detail

/// Runs one resolved configuration. Library exceptions propagate.
inline Outcome execute(RunConfig cfg)
{
    cfg.resolve();
    cfg.validate();
    if (cfg.command == "kernel-check")
        return detail::kernel_check(cfg);
    if (cfg.command == "moments")
        return detail::moments(cfg);
    if (cfg.command == "reconstruct")
        return detail::reconstruct(cfg);
    if (cfg.command == "converge")
        return detail::converge(cfg);
    if (cfg.command == "rate")
        return detail::rate(cfg);
    if (cfg.command == "voronovskaja")
        return detail::voronovskaja(cfg);
    if (cfg.command == "suite")
        return detail::suite(cfg);
    throw configuration_error("unknown command '" + cfg.command + "'");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exponential and max-product sampling operators: kernel checks, reconstructions and bound "
                 "verification"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--kernel", cfg.kernel, "kernel name (see list)");
        sub->add_option("--output,-o", cfg.output, "output file; relative paths resolve against $" +
                                                       std::string(output_dir_variable));
        sub->add_option("--format", cfg.format, "csv, json or md")->check(CLI::IsMember({"csv", "json", "md"}));
    };
    auto add_sampling = [&](CLI::App* sub) {
        sub->add_option("--function", cfg.function, "function name (see list)");
        sub->add_option("--w", cfg.w, "sampling rates, comma separated")->delimiter(',');
        sub->add_option("--interval", cfg.interval, "compact domain a,b (interval mode)")->delimiter(',');
        sub->add_option("--window", cfg.window, "truncation half-width in window mode (0 = default)");
        sub->add_option("--grid", cfg.grid, "evaluation grid logmin:logmax:points");
        sub->add_option("--quad-points", cfg.quad_points, "Gauss-Legendre points per Kantorovich cell");
    };

    auto* kernel_check = app.add_subcommand("kernel-check", "check (chi1)-(chi3) and report moments");
    add_common(kernel_check);
    kernel_check->add_option("--mu", cfg.mu, "moment order for (chi1)");
    kernel_check->add_option("--r", cfg.r, "order for (chi3)");

    auto* moments = app.add_subcommand("moments", "discrete absolute moments m_nu");
    add_common(moments);
    moments->add_option("--nu", cfg.nu, "orders, comma separated")->delimiter(',');

    auto* reconstruct = app.add_subcommand("reconstruct", "evaluate an operator on a grid");
    add_common(reconstruct);
    add_sampling(reconstruct);
    reconstruct->add_option("--op", cfg.op, "S, I, MG or E")->check(CLI::IsMember({"S", "I", "MG", "E"}));
    reconstruct->add_option("--c", cfg.c, "band parameter c of E_{c,T}");

    auto* converge = app.add_subcommand("converge", "weighted error table of MG_w over w");
    add_common(converge);
    add_sampling(converge);

    auto* rate = app.add_subcommand("rate", "check the Omega(f,1/w) error bound");
    add_common(rate);
    add_sampling(rate);
    rate->add_option("--safety", cfg.safety, "factor applied to the Omega estimate");

    auto* voronovskaja = app.add_subcommand("voronovskaja", "check the quantitative Voronovskaja bound");
    add_common(voronovskaja);
    add_sampling(voronovskaja);
    voronovskaja->add_option("--r", cfg.r, "expansion order (1..6)");
    voronovskaja->add_flag("--ignore-chi3", cfg.ignore_chi3, "run even when (chi3) fails");

    auto* suite = app.add_subcommand("suite", "lemma, norm, lattice and convergence checks for one kernel");
    add_common(suite);
    add_sampling(suite);
    suite->add_option("--seed", cfg.seed, "seed for random sample vectors");
    suite->add_option("--trials", cfg.trials, "random sample vectors per lattice check");

    app.add_subcommand("list", "list kernels and functions");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    const auto* chosen = app.get_subcommands().front();
    cfg.command = chosen->get_name();
    if (cfg.command == "list") {
        out << detail::list_registries();
        return exit_ok;
    }

    try {
        Outcome result = execute(cfg);
        if (cfg.output.empty()) {
            out << result.artifact;
            for (const auto& line : result.summary)
                err << line << '\n';
        }
        else {
            const auto path = detail::output_path(cfg.output);
            atomic_write(path, result.artifact);
            for (const auto& line : result.summary)
                out << line << '\n';
            out << "wrote " << path.string() << '\n';
        }
        return result.status;
    }
    catch (const hypothesis_not_met& e) {
        err << "hypothesis not met: " << e.what() << '\n';
        return exit_hypothesis;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

} // namespace expsamp::cli
