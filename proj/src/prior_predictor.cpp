#include "memsched/prior_predictor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "memsched/errors.hpp"
#include "memsched/rng.hpp"

namespace memsched {

namespace {
constexpr double kEps = 1e-12;
constexpr double kDivSentinel = 1e12;
} // namespace

double Expr::eval(const std::array<double, 8>& x) const {
    switch (kind) {
        case Kind::Const: return value;
        case Kind::Var: return x[static_cast<std::size_t>(var)];
        case Kind::Unary: {
            double u = lhs->eval(x);
            switch (un_op) {
                case UnOp::Abs: return std::abs(u);
                case UnOp::Exp: return std::exp(u);
                case UnOp::Log: return std::log(std::abs(u) + kEps);
                case UnOp::Sqrt: return std::sqrt(std::abs(u));
                case UnOp::Log1p: return std::log(std::abs(1.0 + u) + kEps);
            }
            return 0.0;
        }
        case Kind::Binary: {
            double a = lhs->eval(x);
            double b = rhs->eval(x);
            switch (bin_op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Div:
                    if (std::abs(b) < kEps) {
                        if (a == 0.0) return 0.0;
                        bool negative = std::signbit(a) != std::signbit(b);
                        return negative ? -kDivSentinel : kDivSentinel;
                    }
                    return a / b;
            }
            return 0.0;
        }
    }
    return 0.0;
}

namespace {

const char* un_op_name(Expr::UnOp op) {
    switch (op) {
        case Expr::UnOp::Abs: return "abs";
        case Expr::UnOp::Exp: return "exp";
        case Expr::UnOp::Log: return "log";
        case Expr::UnOp::Sqrt: return "sqrt";
        case Expr::UnOp::Log1p: return "log1p";
    }
    return "?";
}

char bin_op_name(Expr::BinOp op) {
    switch (op) {
        case Expr::BinOp::Add: return '+';
        case Expr::BinOp::Sub: return '-';
        case Expr::BinOp::Mul: return '*';
        case Expr::BinOp::Div: return '/';
    }
    return '?';
}

std::string format_literal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string Expr::pretty() const {
    switch (kind) {
        case Kind::Const: return format_literal(value);
        case Kind::Var: return "x" + std::to_string(var);
        case Kind::Unary: return std::string(un_op_name(un_op)) + "(" +
                                 lhs->pretty() + ")";
        case Kind::Binary:
            return "(" + lhs->pretty() + " " + bin_op_name(bin_op) + " " +
                   rhs->pretty() + ")";
    }
    return "?";
}

bool Expr::same_tree(const Expr& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
        case Kind::Const: return value == other.value;
        case Kind::Var: return var == other.var;
        case Kind::Unary:
            return un_op == other.un_op && lhs->same_tree(*other.lhs);
        case Kind::Binary:
            return bin_op == other.bin_op && lhs->same_tree(*other.lhs) &&
                   rhs->same_tree(*other.rhs);
    }
    return false;
}

namespace {

// Recursive-descent parser. Grammar (standard precedence, left associative):
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := '-' factor | primary
//   primary := number | name '(' expr ')' | name | '(' expr ')'
// Names: x0..x7 (variables), c0..c5 (constants, substituted as literals),
// abs/exp/log/sqrt/log1p (functions).
class Parser {
public:
    Parser(const std::string& text, const std::array<double, 6>& constants)
        : text_(text), constants_(constants) {}

    ExprPtr parse() {
        ExprPtr e = parse_expr_();
        skip_ws();
        if (pos_ != text_.size())
            throw parse_error("unexpected trailing input", pos_);
        return e;
    }

private:
    ExprPtr parse_expr_() {
        ExprPtr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (peek() == '+' || peek() == '-') {
                char op = take();
                ExprPtr rhs = parse_term();
                lhs = make_binary(op == '+' ? Expr::BinOp::Add
                                            : Expr::BinOp::Sub,
                                  std::move(lhs), std::move(rhs));
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        for (;;) {
            skip_ws();
            if (peek() == '*' || peek() == '/') {
                char op = take();
                ExprPtr rhs = parse_factor();
                lhs = make_binary(op == '*' ? Expr::BinOp::Mul
                                            : Expr::BinOp::Div,
                                  std::move(lhs), std::move(rhs));
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_factor() {
        skip_ws();
        if (peek() == '-') {
            take();
            ExprPtr inner = parse_factor();
            if (inner->kind == Expr::Kind::Const) {
                inner->value = -inner->value;
                return inner;
            }
            auto zero = std::make_unique<Expr>();
            zero->kind = Expr::Kind::Const;
            zero->value = 0.0;
            return make_binary(Expr::BinOp::Sub, std::move(zero),
                               std::move(inner));
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size())
            throw parse_error("unexpected end of input", pos_);
        char ch = peek();
        if (ch == '(') {
            take();
            ExprPtr e = parse_expr_();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_')
            return parse_name();
        throw parse_error(std::string("unexpected character '") + ch + "'",
                          pos_);
    }

    ExprPtr parse_number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw parse_error("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Const;
        e->value = v;
        return e;
    }

    ExprPtr parse_name() {
        std::size_t at = pos_;
        std::string name;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_'))
            name += text_[pos_++];

        static const std::pair<const char*, Expr::UnOp> functions[] = {
            {"abs", Expr::UnOp::Abs},   {"exp", Expr::UnOp::Exp},
            {"log", Expr::UnOp::Log},   {"sqrt", Expr::UnOp::Sqrt},
            {"log1p", Expr::UnOp::Log1p},
        };
        for (const auto& [fname, op] : functions) {
            if (name != fname) continue;
            skip_ws();
            if (peek() != '(')
                throw parse_error("function '" + name + "' needs arguments",
                                  at);
            take();
            skip_ws();
            if (peek() == ')')
                throw parse_error("arity mismatch: '" + name +
                                      "' takes one argument",
                                  pos_);
            ExprPtr arg = parse_expr_();
            skip_ws();
            if (peek() == ',')
                throw parse_error("arity mismatch: '" + name +
                                      "' takes one argument",
                                  pos_);
            expect(')');
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->un_op = op;
            e->lhs = std::move(arg);
            return e;
        }

        if (name.size() == 2 && name[0] == 'x' && name[1] >= '0' &&
            name[1] <= '7') {
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Var;
            e->var = name[1] - '0';
            return e;
        }
        if (name.size() == 2 && name[0] == 'c' && name[1] >= '0' &&
            name[1] <= '5') {
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Const;
            e->value = constants_[static_cast<std::size_t>(name[1] - '0')];
            return e;
        }
        throw parse_error("unknown identifier '" + name + "'", at);
    }

    static ExprPtr make_binary(Expr::BinOp op, ExprPtr lhs, ExprPtr rhs) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Binary;
        e->bin_op = op;
        e->lhs = std::move(lhs);
        e->rhs = std::move(rhs);
        return e;
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char take() { return text_[pos_++]; }
    void expect(char ch) {
        skip_ws();
        if (peek() != ch)
            throw parse_error(std::string("expected '") + ch + "'", pos_);
        take();
    }

    const std::string& text_;
    std::array<double, 6> constants_;
    std::size_t pos_ = 0;
};

} // namespace

ExprPtr parse_expr(const std::string& text,
                   const std::array<double, 6>& constants) {
    return Parser(text, constants).parse();
}

void Standardizer::validate() const {
    for (double s : sigma_x)
        if (!(s > 0.0))
            throw input_error("standardizer: sigma_x must be positive");
    if (!(sigma_y > 0.0))
        throw input_error("standardizer: sigma_y must be positive");
}

std::array<double, 8> Standardizer::standardize(
    const std::array<double, 8>& x) const {
    std::array<double, 8> out;
    for (std::size_t i = 0; i < 8; ++i)
        out[i] = (x[i] - mu_x[i]) / sigma_x[i];
    return out;
}

void ConformalMap::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw input_error("conformal: alpha must be in (0, 1)");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].first > knots[i - 1].first))
            throw input_error("conformal: knot predictions must increase");
        if (knots[i].second < knots[i - 1].second)
            throw input_error("conformal: adjusted values must not decrease");
    }
}

double ConformalMap::apply(double y_hat) const {
    if (knots.empty()) return y_hat;
    if (knots.size() == 1) return knots[0].second;
    if (y_hat <= knots.front().first) return knots.front().second;
    if (y_hat >= knots.back().first) {
        const auto& [x1, y1] = knots[knots.size() - 2];
        const auto& [x2, y2] = knots.back();
        double slope = (y2 - y1) / (x2 - x1);
        return y2 + slope * (y_hat - x2);
    }
    auto hi = std::upper_bound(
        knots.begin(), knots.end(), y_hat,
        [](double v, const std::pair<double, double>& k) { return v < k.first; });
    auto lo = hi - 1;
    double w = (y_hat - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

ConformalMap fit_conformal(std::vector<std::pair<double, double>> pairs,
                           double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw input_error("conformal: alpha must be in (0, 1)");
    const std::size_t n = pairs.size();
    if (n < 20) throw input_error("insufficient calibration data");
    std::sort(pairs.begin(), pairs.end());

    const std::size_t bins = std::max<std::size_t>(4, n / 25);

    struct Knot {
        double x;
        double y;
        double weight;
    };
    std::vector<Knot> knots;
    knots.reserve(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        std::size_t lo = b * n / bins;
        std::size_t hi = (b + 1) * n / bins;
        if (hi <= lo) continue;
        std::size_t m = hi - lo;

        // median prediction in the bin
        double x = (m % 2 == 1)
                       ? pairs[lo + m / 2].first
                       : (pairs[lo + m / 2 - 1].first + pairs[lo + m / 2].first) /
                             2.0;

        // upper (1-alpha) quantile of actuals, conservative order statistic
        std::vector<double> ys;
        ys.reserve(m);
        for (std::size_t i = lo; i < hi; ++i) ys.push_back(pairs[i].second);
        std::sort(ys.begin(), ys.end());
        double rank = std::ceil((1.0 - alpha) * static_cast<double>(m + 1));
        std::size_t idx = static_cast<std::size_t>(
            std::clamp(rank, 1.0, static_cast<double>(m)));
        knots.push_back({x, ys[idx - 1], static_cast<double>(m)});
    }

    // pool adjacent violators: weighted means restore monotone y
    std::vector<Knot> stack;
    for (Knot k : knots) {
        stack.push_back(k);
        while (stack.size() > 1 &&
               stack[stack.size() - 2].y > stack.back().y) {
            Knot top = stack.back();
            stack.pop_back();
            Knot& prev = stack.back();
            double w = prev.weight + top.weight;
            prev.y = (prev.y * prev.weight + top.y * top.weight) / w;
            prev.weight = w;
        }
    }

    ConformalMap map;
    map.alpha = alpha;
    for (const Knot& k : stack) {
        if (!map.knots.empty() && !(k.x > map.knots.back().first)) {
            // duplicate median prediction: keep the larger adjustment
            map.knots.back().second = std::max(map.knots.back().second, k.y);
        } else {
            map.knots.emplace_back(k.x, k.y);
        }
    }
    map.validate();
    return map;
}

Formula Formula::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("formula file: ") + e.what());
    }
    try {
        Formula f;
        f.expression = j.at("expression").get<std::string>();
        const auto& jc = j.at("constants");
        for (int k = 0; k < 6; ++k)
            f.constants[static_cast<std::size_t>(k)] =
                jc.at("c" + std::to_string(k)).get<double>();
        const auto& js = j.at("standardizer");
        auto mu = js.at("mu_x").get<std::vector<double>>();
        auto sigma = js.at("sigma_x").get<std::vector<double>>();
        if (mu.size() != 8 || sigma.size() != 8)
            throw input_error("formula file: mu_x/sigma_x must have 8 entries");
        std::copy(mu.begin(), mu.end(), f.standardizer.mu_x.begin());
        std::copy(sigma.begin(), sigma.end(), f.standardizer.sigma_x.begin());
        f.standardizer.mu_y = js.at("mu_y").get<double>();
        f.standardizer.sigma_y = js.at("sigma_y").get<double>();
        f.standardizer.validate();
        const auto& jf = j.at("conformal");
        f.conformal.alpha = jf.at("alpha").get<double>();
        for (const auto& k : jf.at("knots")) {
            if (!k.is_array() || k.size() != 2)
                throw input_error("formula file: knots must be [pred, adj]");
            f.conformal.knots.emplace_back(k[0].get<double>(),
                                           k[1].get<double>());
        }
        f.conformal.validate();
        f.parsed = parse_expr(f.expression, f.constants);
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("formula file: ") + e.what());
    }
}

Formula Formula::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open formula file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string Formula::to_json_text() const {
    nlohmann::json j;
    j["expression"] = expression;
    for (int k = 0; k < 6; ++k)
        j["constants"]["c" + std::to_string(k)] =
            constants[static_cast<std::size_t>(k)];
    j["standardizer"] = {
        {"mu_x", standardizer.mu_x},
        {"sigma_x", standardizer.sigma_x},
        {"mu_y", standardizer.mu_y},
        {"sigma_y", standardizer.sigma_y},
    };
    j["conformal"]["alpha"] = conformal.alpha;
    j["conformal"]["knots"] = nlohmann::json::array();
    for (const auto& [x, y] : conformal.knots)
        j["conformal"]["knots"].push_back({x, y});
    return j.dump(2);
}

void Formula::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write formula file: " + path);
    out << to_json_text() << "\n";
}

double raw_prior(const Formula& formula, const BeagleFeatures& x) {
    if (!formula.parsed) throw input_error("formula not parsed");
    double y_std = formula.parsed->eval(
        formula.standardizer.standardize(x.to_array()));
    return formula.standardizer.inverse_label(y_std);
}

double conservative_prior(const Formula& formula, const BeagleFeatures& x) {
    return std::max(formula.conformal.apply(raw_prior(formula, x)), 1.0);
}

double synthetic_beagle_truth_mb(const BeagleFeatures& x) {
    // Smooth, monotone in data sizes; spans roughly 5 GB to 800 GB over the
    // documented feature ranges.
    return 4000.0 + 8.4e-4 * std::pow(x.variants, 0.85) * std::pow(x.samples, 0.75) +
           2200.0 * std::pow(x.ref_variants / 1e6, 0.6) *
               std::pow(x.ref_samples / 1e4, 0.5) +
           420.0 * std::sqrt(x.threads) + 25.0 * x.window +
           30.0 * (x.burnin + x.iterations);
}

std::vector<std::pair<BeagleFeatures, double>> gen_synthetic_beagle(
    int n, std::uint64_t seed) {
    if (n < 1) throw input_error("gen_synthetic_beagle: n must be >= 1");
    rng_t g(seed);
    auto log_uniform = [&](double lo, double hi) {
        return std::exp(uniform_real(g, std::log(lo), std::log(hi)));
    };

    std::vector<std::pair<BeagleFeatures, double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        BeagleFeatures x;
        x.threads = static_cast<double>(uniform_int(g, 1, 16));
        x.burnin = static_cast<double>(uniform_int(g, 3, 12));
        x.iterations = static_cast<double>(uniform_int(g, 6, 24));
        x.window = static_cast<double>(uniform_int(g, 10, 60));
        x.variants = log_uniform(1e4, 1e7);
        x.samples = log_uniform(1e3, 1e4);
        x.ref_variants = log_uniform(1e5, 1e7);
        x.ref_samples = log_uniform(1e3, 5e4);

        double noise = std::clamp(normal_unit(g), -3.0, 3.0);
        double y = synthetic_beagle_truth_mb(x) * (1.0 + 0.1 * noise);
        out.emplace_back(x, y);
    }
    return out;
}

} // namespace memsched
