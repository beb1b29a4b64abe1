#include "ppimex/nonlinearity.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <string>

namespace ppimex {

Nonlinearity Nonlinearity::linear(double k) {
    Nonlinearity n;
    n.kind_ = NonlinearityKind::linear;
    n.k_ = k;
    n.lipschitz_ = std::abs(k);
    return n;
}

Nonlinearity Nonlinearity::sine() {
    Nonlinearity n;
    n.kind_ = NonlinearityKind::sine;
    n.lipschitz_ = 2.0;
    return n;
}

Nonlinearity Nonlinearity::cubic() {
    Nonlinearity n;
    n.kind_ = NonlinearityKind::cubic;
    n.lipschitz_ = std::numeric_limits<double>::infinity();
    return n;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> f,
                                  std::function<double(double)> derivative, double lipschitz,
                                  std::string name) {
    if (!f || !derivative) throw std::invalid_argument("custom nonlinearity needs f and f'");
    if (!(lipschitz >= 0.0)) throw std::invalid_argument("Lipschitz constant must be >= 0");
    Nonlinearity n;
    n.kind_ = NonlinearityKind::custom;
    n.f_ = std::move(f);
    n.df_ = std::move(derivative);
    n.lipschitz_ = lipschitz;
    n.custom_name_ = std::move(name);
    return n;
}

Nonlinearity Nonlinearity::parse(std::string_view text) {
    if (text == "none" || text.empty()) return zero();
    if (text == "sin" || text == "sine") return sine();
    if (text == "cubic") return cubic();
    if (text.starts_with("linear:")) {
        const std::string rest(text.substr(7));
        std::size_t used = 0;
        double k = 0.0;
        try {
            k = std::stod(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != rest.size())
            throw std::invalid_argument("bad slope in nonlinearity '" + std::string(text) + "'");
        return linear(k);
    }
    throw std::invalid_argument("unknown nonlinearity '" + std::string(text) +
                                "' (expected none, linear:k, sin, cubic)");
}

std::string Nonlinearity::name() const {
    switch (kind_) {
        case NonlinearityKind::none: return "none";
        case NonlinearityKind::linear: {
            std::array<char, 32> buf{};
            auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), k_);
            return "linear:" + std::string(buf.data(), end);
        }
        case NonlinearityKind::sine: return "sin";
        case NonlinearityKind::cubic: return "cubic";
        case NonlinearityKind::custom: return custom_name_;
    }
    return "none";
}

}  // namespace ppimex
