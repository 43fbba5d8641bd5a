#include "curvforge/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>

#include "strfmt.hpp"

namespace curvforge {

using detail::strfmt;

namespace {

Json optional_number(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

void dump(const Json& v, int indent, int depth, std::string& out)
{
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* sep = indent > 0 ? ": " : ":";
    switch (v.type()) {
    case Json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out += ',';
            first = false;
            out += pad;
            out += Json(it.key()).dump();
            out += sep;
            dump(it.value(), indent, depth + 1, out);
        }
        out += close;
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        // Numeric arrays stay on one line.
        const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_primitive(); });
        out += '[';
        bool first = true;
        for (const auto& e : v) {
            if (!first) out += flat ? ", " : ",";
            first = false;
            if (!flat) out += pad;
            dump(e, indent, depth + 1, out);
        }
        if (!flat) out += close;
        out += ']';
        return;
    }
    case Json::value_t::number_float: {
        const double d = v.get<double>();
        out += std::isfinite(d) ? strfmt("%.17g", d) : "null";
        return;
    }
    default:
        out += v.dump();
        return;
    }
}

} // namespace

Json to_json(const Eigen::VectorXd& values)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < values.size(); ++i) a.push_back(values[i]);
    return a;
}

Json to_json(const VerificationReport& report)
{
    Json checks = Json::array();
    for (const auto& c : report.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}});
    Json metrics = Json::object();
    for (const auto& m : report.metrics) metrics[m.name] = m.value;
    return {{"passed", report.passed()},
            {"gauss_bonnet_residual", report.gauss_bonnet_residual},
            {"pde_residual_sup", report.pde_residual_sup},
            {"boundary_residual_sup", report.boundary_residual_sup},
            {"maxprin_applicable", report.maxprin_applicable},
            {"checks", checks},
            {"metrics", metrics}};
}

Json to_json(const MaximumPrincipleReport& report)
{
    Json variants = Json::array();
    for (const auto& v : report.variants)
        variants.push_back({{"name", v.name},
                            {"trials", v.trials},
                            {"failures", v.failures},
                            {"worst_violation", v.worst_violation}});
    Json j = {{"applicable", report.applicable}, {"passed", report.passed()}, {"variants", variants}};
    if (!report.reason.empty()) j["reason"] = report.reason;
    return j;
}

Json to_json(const IterationTrace& trace)
{
    const bool all_monotone = std::all_of(trace.monotone.begin(), trace.monotone.end(), [](bool b) { return b; });
    return {{"iterations", trace.iterations},
            {"converged", trace.converged},
            {"monotone", all_monotone},
            {"lambda", trace.lambda},
            {"mu", trace.mu},
            {"first_delta", trace.deltas.empty() ? 0.0 : trace.deltas.front()},
            {"final_delta", trace.deltas.empty() ? 0.0 : trace.deltas.back()},
            {"final_residual", trace.residuals.empty() ? 0.0 : trace.residuals.back()},
            {"smallness_G_sup", trace.smallness_G_sup},
            {"smallness_G_gradient", trace.smallness_G_gradient}};
}

Json to_json(const ModelForm& model)
{
    return {{"name", model.name()},
            {"K_g", model.K_g()},
            {"sigma_g", model.sigma_g()},
            {"certified", model.certified},
            {"certification_error", model.certification_error},
            {"model_tol", model.model_tol}};
}

Json to_json(const PrescriptionResult& result)
{
    const auto& t = result.bracket.thresholds;
    return {{"pipeline", result.pipeline},
            {"model", to_json(result.model)},
            {"metric_scale", result.metric_scale},
            {"thresholds",
             {{"C0", optional_number(t.C0)},
              {"C1", optional_number(t.C1)},
              {"C2", optional_number(t.C2)},
              {"C3", optional_number(t.C3)},
              {"D", optional_number(t.D)},
              {"shift", optional_number(t.shift)},
              {"xi", optional_number(t.xi)},
              {"kappa_tilde", optional_number(t.kappa_tilde)}}},
            {"trace", to_json(result.trace)},
            {"verification", to_json(result.report)},
            {"warnings", result.warnings},
            {"u", to_json(result.u.values)},
            {"realized_K", to_json(result.realized_K.values)},
            {"realized_sigma", to_json(result.realized_sigma.values)}};
}

Json to_json(const FeasibilityReport& report)
{
    return {{"verdict", report.pass ? "pass" : "fail"},
            {"reasons", report.reasons},
            {"warnings", report.warnings},
            {"integral_K", report.integral_K},
            {"w_min", report.w_min},
            {"w", to_json(report.w.values)}};
}

std::string dump_json(const Json& value, int indent)
{
    std::string out;
    dump(value, indent, 0, out);
    out += '\n';
    return out;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace curvforge
