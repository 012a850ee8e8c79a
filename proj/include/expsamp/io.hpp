#pragma once

/// @file io.hpp
/// JSON, CSV and Markdown renderings of reports, plus atomic file output.
/// CSV numbers carry 17 significant digits; every CSV starts with a
/// "# config: {...}" comment holding the resolved run configuration.

#include "analysis.hpp"
#include "kernels.hpp"
#include "operators.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace expsamp {

using json = nlohmann::ordered_json;

inline std::string format_real(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

/// Non-finite values become strings so the document stays valid JSON.
inline json real_json(double v)
{
    if (std::isfinite(v))
        return v;
    return format_real(v);
}

inline json optional_json(const std::optional<double>& v)
{
    return v ? real_json(*v) : json(nullptr);
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const MomentReport& rep)
{
    json j;
    j["kernel"] = rep.kernel_name;
    j["mu"] = rep.mu;
    j["r"] = rep.r;
    json moments = json::array();
    for (const auto& [nu, m] : rep.absolute_moments) {
        const auto tail = rep.tail_bounds.find(nu);
        moments.push_back({{"nu", nu},
                           {"m", real_json(m)},
                           {"tail_bound", tail == rep.tail_bounds.end() ? json(nullptr) : real_json(tail->second)}});
    }
    j["absolute_moments"] = moments;
    json div = json::array();
    for (const auto& d : rep.divergent)
        div.push_back({{"nu", d.order}, {"log_u", d.log_u}, {"k", d.k}, {"message", d.message}});
    j["divergent"] = div;
    j["eta"] = real_json(rep.eta);
    json alg = json::array();
    for (const auto& [order, v] : rep.algebraic_moment_variation)
        alg.push_back({{"j", order},
                       {"min", real_json(v.min)},
                       {"max", real_json(v.max)},
                       {"spread", real_json(v.spread())},
                       {"abs_min", real_json(v.abs_min)},
                       {"abs_max", real_json(v.abs_max)}});
    j["algebraic_moment_variation"] = alg;
    j["chi1_holds"] = rep.chi1_holds;
    j["chi2_holds"] = rep.chi2_holds;
    j["chi3_holds"] = rep.chi3_holds;
    j["chi1"] = rep.chi1_message;
    j["chi2"] = rep.chi2_message;
    j["chi3"] = rep.chi3_message;
    return j;
}

inline json to_json(const BoundCheck& b)
{
    return {{"name", b.name},
            {"lhs", real_json(b.lhs)},
            {"rhs", real_json(b.rhs)},
            {"holds", b.holds},
            {"slack", real_json(b.slack)},
            {"verdict", b.verdict()},
            {"hypotheses_met", b.hypotheses_met},
            {"witness_log_x", optional_json(b.witness_log_x)},
            {"note", b.note}};
}

inline json to_json(const std::vector<BoundCheck>& checks)
{
    json a = json::array();
    for (const auto& b : checks)
        a.push_back(to_json(b));
    return a;
}

inline json to_json(const ErrorTable& t)
{
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"w", r.w},
                        {"sup_abs_error", real_json(r.sup_abs_error)},
                        {"weighted_sup_error", real_json(r.weighted_sup_error)},
                        {"grid", r.grid},
                        {"failed_points", r.failed_points}});
    return {{"function", t.function_name},
            {"kernel", t.kernel_name},
            {"rows", rows},
            {"fitted_order", optional_json(t.fitted_order)}};
}

inline json to_json(const std::vector<GridValue>& values)
{
    json a = json::array();
    for (const auto& g : values)
        a.push_back({{"x", real_json(g.x)},
                     {"log_x", real_json(g.log_x)},
                     {"value", real_json(g.value)},
                     {"error_vs_f", real_json(g.error_vs_f)},
                     {"weighted_error", real_json(g.weighted_error)},
                     {"tail_bound", real_json(g.tail_bound)},
                     {"error", g.error}});
    return a;
}

inline json to_json(const VoronovskajaResult& res)
{
    json rows = json::array();
    for (const auto& r : res.rows)
        rows.push_back({{"w", r.w},
                        {"omega", real_json(r.omega)},
                        {"left_side", real_json(r.left_side)},
                        {"left_side_log_x", r.left_side_log_x},
                        {"ratio_signed", real_json(r.ratio_signed)},
                        {"ratio_absolute", real_json(r.ratio_absolute)},
                        {"ratio_literal", real_json(r.ratio_literal)},
                        {"ratio_unnormalized", real_json(r.ratio_unnormalized)},
                        {"left_side_absolute", real_json(r.left_side_absolute)},
                        {"left_side_literal", real_json(r.left_side_literal)},
                        {"left_side_unnormalized", real_json(r.left_side_unnormalized)}});
    return {{"kernel_report", to_json(res.kernel_report)}, {"rows", rows}, {"checks", to_json(res.checks)}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

inline std::string config_comment(const json& config) { return "# config: " + config.dump() + "\n"; }

inline std::string grid_csv(const std::vector<GridValue>& values, const json& config)
{
    std::ostringstream os;
    os << config_comment(config) << "x,log_x,value,error_vs_f,weighted_error,tail_bound,error\n";
    for (const auto& g : values)
        os << format_real(g.x) << ',' << format_real(g.log_x) << ',' << format_real(g.value) << ','
           << format_real(g.error_vs_f) << ',' << format_real(g.weighted_error) << ',' << format_real(g.tail_bound)
           << ',' << csv_field(g.error) << '\n';
    return os.str();
}

inline std::string error_table_csv(const ErrorTable& t, const json& config)
{
    std::ostringstream os;
    os << config_comment(config) << "# fitted_order: " << (t.fitted_order ? format_real(*t.fitted_order) : "none")
       << "\nfunction,kernel,w,sup_abs_error,weighted_sup_error,grid,failed_points\n";
    for (const auto& r : t.rows)
        os << csv_field(t.function_name) << ',' << csv_field(t.kernel_name) << ',' << format_real(r.w) << ','
           << format_real(r.sup_abs_error) << ',' << format_real(r.weighted_sup_error) << ',' << r.grid << ','
           << r.failed_points << '\n';
    return os.str();
}

inline std::string checks_csv(const std::vector<BoundCheck>& checks, const json& config)
{
    std::ostringstream os;
    os << config_comment(config) << "name,lhs,rhs,slack,holds,verdict,witness_log_x,note\n";
    for (const auto& b : checks)
        os << csv_field(b.name) << ',' << format_real(b.lhs) << ',' << format_real(b.rhs) << ','
           << format_real(b.slack) << ',' << (b.holds ? "true" : "false") << ',' << csv_field(b.verdict()) << ','
           << (b.witness_log_x ? format_real(*b.witness_log_x) : "") << ',' << csv_field(b.note) << '\n';
    return os.str();
}

inline std::string moment_report_csv(const MomentReport& rep, const json& config)
{
    std::ostringstream os;
    os << config_comment(config) << "# eta: " << format_real(rep.eta) << "\n# chi1: " << rep.chi1_message
       << "\n# chi2: " << rep.chi2_message << "\n# chi3: " << rep.chi3_message << "\nnu,m,tail_bound\n";
    for (const auto& [nu, m] : rep.absolute_moments) {
        const auto tail = rep.tail_bounds.find(nu);
        os << format_real(nu) << ',' << format_real(m) << ','
           << (tail == rep.tail_bounds.end() ? "" : format_real(tail->second)) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Markdown

inline std::string checks_markdown(const std::vector<BoundCheck>& checks)
{
    std::ostringstream os;
    os << "| check | lhs | rhs | verdict | note |\n|---|---|---|---|---|\n";
    for (const auto& b : checks)
        os << "| " << b.name << " | " << format_real(b.lhs) << " | " << format_real(b.rhs) << " | " << b.verdict()
           << " | " << b.note << " |\n";
    return os.str();
}

inline std::string error_table_markdown(const ErrorTable& t)
{
    std::ostringstream os;
    os << "**" << t.function_name << "** with **" << t.kernel_name << "**";
    if (t.fitted_order)
        os << ", fitted order " << format_real(*t.fitted_order);
    os << "\n\n| w | sup error | weighted sup error | failed points |\n|---|---|---|---|\n";
    for (const auto& r : t.rows)
        os << "| " << format_real(r.w) << " | " << format_real(r.sup_abs_error) << " | "
           << format_real(r.weighted_sup_error) << " | " << r.failed_points << " |\n";
    return os.str();
}

inline std::string moment_report_markdown(const MomentReport& rep)
{
    std::ostringstream os;
    os << "## Kernel " << rep.kernel_name << " (mu = " << format_real(rep.mu) << ", r = " << rep.r << ")\n\n"
       << "| nu | m_nu |\n|---|---|\n";
    for (const auto& [nu, m] : rep.absolute_moments)
        os << "| " << format_real(nu) << " | " << format_real(m) << " |\n";
    os << "\n- eta = " << format_real(rep.eta) << "\n- chi1: " << (rep.chi1_holds ? "holds" : "fails") << " ("
       << rep.chi1_message << ")\n- chi2: " << (rep.chi2_holds ? "holds" : "fails") << " (" << rep.chi2_message
       << ")\n- chi3: " << (rep.chi3_holds ? "holds" : "fails") << " (" << rep.chi3_message << ")\n";
    return os.str();
}

inline std::string grid_markdown(const std::vector<GridValue>& values)
{
    std::ostringstream os;
    os << "| x | log x | value | error vs f |\n|---|---|---|---|\n";
    for (const auto& g : values)
        os << "| " << format_real(g.x) << " | " << format_real(g.log_x) << " | " << format_real(g.value) << " | "
           << format_real(g.error_vs_f) << " |\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Files

/// Writes to a sibling temporary file and renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, const std::string& content)
{
    const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    if (!std::filesystem::is_directory(dir))
        throw std::runtime_error("output directory does not exist: " + dir.string());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out)
            throw std::runtime_error("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

} // namespace expsamp
