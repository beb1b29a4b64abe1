#include "ppimex/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ppimex {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> mode_list(const std::string& law, std::size_t n, const char* what) {
    const auto values = parse_real_list(law);
    if (values.size() != n)
        throw ConfigError(std::string(what) + " list has " + std::to_string(values.size()) +
                          " entries, expected n = " + std::to_string(n));
    return values;
}

}  // namespace

double parse_real(std::string_view text) {
    const std::string t = trim(text);
    if (const auto slash = t.find('/'); slash != std::string::npos)
        return parse_real(t.substr(0, slash)) / parse_real(t.substr(slash + 1));
    double v = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || end != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError("not a real number: '" + t + "'");
    return v;
}

std::uint64_t parse_unsigned(std::string_view text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec == std::errc{} && end == t.data() + t.size() && !t.empty()) return v;
    // Accept 1e5 style integers.
    const double d = parse_real(t);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19)
        throw ConfigError("not a nonnegative integer: '" + t + "'");
    return static_cast<std::uint64_t>(d);
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_real(item));
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

std::string format_real(double x) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_key_values(in);
}

ProblemConfig take_problem_config(KeyValues& kv, ProblemConfig cfg, bool require_dissipation) {
    auto take = [&](const char* key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    if (auto v = take("model")) {
        if (*v == "spectral")
            cfg.model = ProblemConfig::Model::spectral;
        else if (*v == "grid")
            cfg.model = ProblemConfig::Model::grid;
        else
            throw ConfigError("model must be spectral or grid, got '" + *v + "'");
    }
    if (auto v = take("n")) cfg.n = static_cast<std::size_t>(parse_unsigned(*v));
    if (auto v = take("lambda_law")) cfg.lambda_law = *v;
    if (auto v = take("q_law")) cfg.q_law = *v;
    if (auto v = take("b")) cfg.b = *v;
    if (auto v = take("sigma")) cfg.sigma = parse_real(*v);
    if (auto v = take("nonlinearity")) cfg.nonlinearity = *v;
    if (auto v = take("lipschitz")) cfg.lipschitz = parse_real(*v);
    // Validate eagerly so that errors surface as configuration errors.
    try {
        if (cfg.model == ProblemConfig::Model::spectral && !require_dissipation)
            (void)cfg.sde_system();
        else if (cfg.model == ProblemConfig::Model::spectral)
            (void)cfg.spectral().system();
        else
            (void)cfg.grid().system();
    } catch (const ProblemError& e) {
        throw ConfigError(e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

namespace {

SpectralProblem spectral_unvalidated(const ProblemConfig& c) {
    if (c.model != ProblemConfig::Model::spectral)
        throw ConfigError("config describes a grid model");
    if (c.n == 0) throw ConfigError("n must be positive");
    SpectralProblem p;
    if (c.lambda_law == "dirichlet_1d")
        p.lambda = dirichlet_1d_eigenvalues(c.n);
    else
        p.lambda = mode_list(c.lambda_law, c.n, "lambda_law");
    if (c.q_law == "one") {
        p.q.assign(c.n, 1.0);
    } else if (c.q_law.starts_with("geometric:")) {
        const double r = parse_real(std::string_view(c.q_law).substr(10));
        if (!(r > 0.0 && r < 1.0)) throw ConfigError("geometric ratio must lie in (0,1)");
        p.q.resize(c.n);
        for (std::size_t i = 0; i < c.n; ++i) p.q[i] = std::pow(r, static_cast<double>(i + 1));
    } else {
        p.q = mode_list(c.q_law, c.n, "q_law");
    }
    if (c.b) {
        const auto values = parse_real_list(*c.b);
        if (values.size() == 1)
            p.b = std::vector<double>(c.n, values[0]);
        else
            p.b = mode_list(*c.b, c.n, "b");
    }
    auto f = Nonlinearity::parse(c.nonlinearity);
    if (c.lipschitz) f.set_lipschitz(*c.lipschitz);
    if (!f.is_zero()) p.nonlinearity = f;
    p.sigma = c.sigma;
    return p;
}

}  // namespace

SemilinearSystem ProblemConfig::sde_system() const {
    const auto p = spectral_unvalidated(*this);
    if (p.b && p.nonlinearity) throw ConfigError("at most one of b and nonlinearity may be set");
    std::vector<double> scale(p.q.size());
    for (std::size_t i = 0; i < scale.size(); ++i) {
        if (!(p.q[i] >= 0.0)) throw ConfigError("noise eigenvalues must be >= 0");
        scale[i] = std::sqrt(p.q[i]);
    }
    return SemilinearSystem::diagonal(p.lambda, std::move(scale),
                                      p.nonlinearity.value_or(Nonlinearity{}), p.sigma, p.b);
}

SpectralProblem ProblemConfig::spectral() const {
    auto p = spectral_unvalidated(*this);
    p.validate();
    return p;
}

GridProblem ProblemConfig::grid() const {
    if (model != Model::grid) throw ConfigError("config describes a spectral model");
    if (n == 0) throw ConfigError("n must be positive");
    if (b) throw ConfigError("b applies to spectral models only; use nonlinearity = linear:k");
    if (lambda_law != "dirichlet_1d" || q_law != "one")
        throw ConfigError("grid models use the finite-difference operator and white noise");
    auto f = Nonlinearity::parse(nonlinearity);
    if (lipschitz) f.set_lipschitz(*lipschitz);
    auto g = GridProblem::make(n, f, sigma);
    g.validate();
    return g;
}

SemilinearSystem ProblemConfig::system() const {
    return model == Model::spectral ? spectral().system() : grid().system();
}

std::vector<std::pair<std::string, std::string>> ProblemConfig::entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("model", model == Model::spectral ? "spectral" : "grid");
    out.emplace_back("n", std::to_string(n));
    out.emplace_back("lambda_law", lambda_law);
    out.emplace_back("q_law", q_law);
    out.emplace_back("b", b.value_or("none"));
    out.emplace_back("sigma", format_real(sigma));
    out.emplace_back("nonlinearity", nonlinearity);
    out.emplace_back("lipschitz", lipschitz ? format_real(*lipschitz) : "default");
    return out;
}

}  // namespace ppimex
