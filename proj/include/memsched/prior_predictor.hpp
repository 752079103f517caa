#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace memsched {

// Arithmetic expression over variables x0..x7 with unary ops
// {abs, exp, log, sqrt, log1p} and binary {+, -, *, /}. Evaluation is total:
// log uses log(|u| + eps), sqrt uses sqrt(|u|), log1p uses log(|1+u| + eps),
// and division by |den| < eps yields a sign-preserving +-1e12 sentinel
// (eps = 1e-12). Named constants c0..c5 are resolved to literals at parse
// time. Unary minus parses as (0 - e) with literal folding.
class Expr {
public:
    enum class Kind { Const, Var, Unary, Binary };
    enum class UnOp { Abs, Exp, Log, Sqrt, Log1p };
    enum class BinOp { Add, Sub, Mul, Div };

    Kind kind = Kind::Const;
    double value = 0.0; // Const
    int var = 0;        // Var index 0..7
    UnOp un_op = UnOp::Abs;
    BinOp bin_op = BinOp::Add;
    std::unique_ptr<Expr> lhs, rhs; // Unary uses lhs only

    double eval(const std::array<double, 8>& x) const;
    std::string pretty() const; // fully parenthesized; reparses identically
    bool same_tree(const Expr& other) const;
};

using ExprPtr = std::unique_ptr<Expr>;

// Throws parse_error (with byte offset) on syntax errors, unknown
// identifiers, and wrong function arity.
ExprPtr parse_expr(const std::string& text,
                   const std::array<double, 6>& constants = {});

// Per-feature affine standardization plus the label inverse transform.
struct Standardizer {
    std::array<double, 8> mu_x{};
    std::array<double, 8> sigma_x{};
    double mu_y = 0.0;
    double sigma_y = 1.0;

    void validate() const; // all sigma > 0
    std::array<double, 8> standardize(const std::array<double, 8>& x) const;
    double inverse_label(double y_std) const { return y_std * sigma_y + mu_y; }
    double standardize_label(double y) const { return (y - mu_y) / sigma_y; }
};

// Monotone piecewise-linear adjustment from raw to conservative predictions.
// No knots = identity. Below the first knot the map is flat; above the last
// it continues with the final segment's slope.
struct ConformalMap {
    double alpha = 0.2;
    std::vector<std::pair<double, double>> knots; // (predicted, adjusted)

    void validate() const; // x strictly increasing, y non-decreasing
    double apply(double y_hat) const;
};

// Bins calibration pairs by prediction, takes the per-bin (1-alpha) upper
// quantile of actual values, then smooths knots with pool-adjacent-violators
// so the map is monotone. Needs >= 20 pairs.
ConformalMap fit_conformal(std::vector<std::pair<double, double>> pairs,
                           double alpha);

// A deployable formula bundle: expression source, constants, training-set
// statistics, and the conformal adjustment.
struct Formula {
    std::string expression;
    std::array<double, 6> constants{};
    Standardizer standardizer;
    ConformalMap conformal;
    ExprPtr parsed; // cached parse of `expression` with `constants`

    static Formula load(const std::string& path);
    void save(const std::string& path) const;
    static Formula from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// Feature vector in raw units; array order matches x0..x7.
struct BeagleFeatures {
    double threads = 1;
    double burnin = 3;
    double iterations = 12;
    double window = 40;
    double variants = 1e5;
    double samples = 1e3;
    double ref_variants = 1e6;
    double ref_samples = 1e4;

    std::array<double, 8> to_array() const {
        return {threads, burnin,      iterations,  window,
                variants, samples, ref_variants, ref_samples};
    }
};

// Full pipeline: standardize, evaluate, undo label scaling, apply the
// conformal adjustment, floor at 1 MB.
double conservative_prior(const Formula& formula, const BeagleFeatures& x);
// As above but without the conformal adjustment.
double raw_prior(const Formula& formula, const BeagleFeatures& x);

// Synthetic stand-in for real imputation runs: features drawn from
// documented ranges, true RAM from a smooth monotone ground-truth plus
// multiplicative log-normal-ish noise. Deterministic per seed.
std::vector<std::pair<BeagleFeatures, double>> gen_synthetic_beagle(
    int n, std::uint64_t seed);

// Noise-free ground truth of the synthetic generator, exposed so tests can
// assert monotonicity and range directly.
double synthetic_beagle_truth_mb(const BeagleFeatures& x);

} // namespace memsched
