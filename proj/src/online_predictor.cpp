#include "memsched/online_predictor.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "memsched/errors.hpp"

namespace memsched {

namespace {

// Householder QR least squares for the (rows x cols) Vandermonde system.
// rows >= cols is guaranteed by the caller; columns are 1, t, t^2, ...
std::vector<double> qr_solve(std::vector<std::vector<double>> a,
                             std::vector<double> b) {
    const std::size_t rows = a.size();
    const std::size_t cols = a[0].size();
    for (std::size_t k = 0; k < cols; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < rows; ++i) norm += a[i][k] * a[i][k];
        norm = std::sqrt(norm);
        if (norm == 0.0) continue; // zero column: leave weight at 0
        if (a[k][k] > 0.0) norm = -norm;

        // v = x - norm*e_k, stored in place of column k below the diagonal
        double vk = a[k][k] - norm;
        double vnorm2 = vk * vk;
        for (std::size_t i = k + 1; i < rows; ++i) vnorm2 += a[i][k] * a[i][k];
        if (vnorm2 == 0.0) continue;

        for (std::size_t j = k + 1; j < cols; ++j) {
            double dot = vk * a[k][j];
            for (std::size_t i = k + 1; i < rows; ++i) dot += a[i][k] * a[i][j];
            double f = 2.0 * dot / vnorm2;
            a[k][j] -= f * vk;
            for (std::size_t i = k + 1; i < rows; ++i) a[i][j] -= f * a[i][k];
        }
        double dot = vk * b[k];
        for (std::size_t i = k + 1; i < rows; ++i) dot += a[i][k] * b[i];
        double f = 2.0 * dot / vnorm2;
        b[k] -= f * vk;
        for (std::size_t i = k + 1; i < rows; ++i) b[i] -= f * a[i][k];
        a[k][k] = norm;
    }

    std::vector<double> w(cols, 0.0);
    for (std::size_t k = cols; k-- > 0;) {
        double sum = b[k];
        for (std::size_t j = k + 1; j < cols; ++j) sum -= a[k][j] * w[j];
        w[k] = a[k][k] != 0.0 ? sum / a[k][k] : 0.0;
    }
    return w;
}

} // namespace

OnlinePredictor::OnlinePredictor(const PredictorParams& params)
    : params_(params) {
    if (params_.degree < 0)
        throw input_error("predictor: degree must be >= 0");
    if (params_.gamma_min < 0.0 || params_.gamma_max < params_.gamma_min)
        throw input_error("predictor: need gamma_max >= gamma_min >= 0");
    if (params_.overcommit_scale < 1.0)
        throw input_error("predictor: overcommit scale must be >= 1");
    if (params_.n_total < 1)
        throw input_error("predictor: n_total must be >= 1");
}

void OnlinePredictor::observe(int task, double ram_mb, bool temporary) {
    if (!(ram_mb > 0.0))
        throw input_error("predictor: observation must be positive");
    obs_[task] = {ram_mb, temporary};
}

double OnlinePredictor::observed_value(int task) const {
    auto it = obs_.find(task);
    if (it == obs_.end())
        throw input_error("predictor: no observation for task " +
                          std::to_string(task));
    return it->second.ram_mb;
}

void OnlinePredictor::fit() {
    if (!can_fit()) throw input_error("insufficient data");
    const std::size_t rows = obs_.size();
    const std::size_t cols = static_cast<std::size_t>(params_.degree) + 1;

    std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
    std::vector<double> b(rows);
    std::size_t r = 0;
    for (const auto& [task, o] : obs_) {
        double p = 1.0;
        for (std::size_t j = 0; j < cols; ++j) {
            a[r][j] = p;
            p *= task;
        }
        b[r] = o.ram_mb;
        ++r;
    }
    weights_ = qr_solve(std::move(a), std::move(b));
}

double OnlinePredictor::raw_poly(int task) const {
    double value = 0.0;
    for (std::size_t j = weights_.size(); j-- > 0;)
        value = value * task + weights_[j];
    return value;
}

double OnlinePredictor::predict(int task) const {
    if (!fitted()) throw input_error("insufficient data");
    return std::max(raw_poly(task), params_.floor_mb);
}

double OnlinePredictor::gamma_now() const {
    double frac =
        static_cast<double>(obs_.size()) / static_cast<double>(params_.n_total);
    return params_.gamma_max - frac * (params_.gamma_max - params_.gamma_min);
}

double OnlinePredictor::bias(double gamma) const {
    if (!fitted()) throw input_error("insufficient data");
    if (obs_.empty()) throw input_error("insufficient data");

    std::vector<double> residuals;
    residuals.reserve(obs_.size());
    const std::size_t cols = static_cast<std::size_t>(params_.degree) + 1;
    for (const auto& [task, o] : obs_) {
        if (obs_.size() - 1 < cols) continue; // cannot refit without this point
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        a.reserve(obs_.size() - 1);
        b.reserve(obs_.size() - 1);
        for (const auto& [other, oo] : obs_) {
            if (other == task) continue;
            std::vector<double> row(cols);
            double p = 1.0;
            for (std::size_t j = 0; j < cols; ++j) {
                row[j] = p;
                p *= other;
            }
            a.push_back(std::move(row));
            b.push_back(oo.ram_mb);
        }
        std::vector<double> w = qr_solve(std::move(a), std::move(b));
        double value = 0.0;
        for (std::size_t j = w.size(); j-- > 0;) value = value * task + w[j];
        value = std::max(value, params_.floor_mb);
        residuals.push_back(std::abs(value - o.ram_mb));
    }
    if (residuals.empty()) return 0.0;
    std::sort(residuals.begin(), residuals.end());

    const double count = static_cast<double>(residuals.size());
    double mu = std::clamp(gamma * count, 1.0, count);
    auto at = [&](double idx) {
        return residuals[static_cast<std::size_t>(idx) - 1];
    };
    return (at(std::floor(mu)) + at(std::ceil(mu))) / 2.0;
}

double OnlinePredictor::conservative_predict(int task) const {
    return predict(task) + bias(gamma_now());
}

void OnlinePredictor::record_overcommit(int task) {
    observe(task, params_.overcommit_scale * predict(task), true);
}

std::string OnlinePredictor::to_json() const {
    nlohmann::json j;
    j["degree"] = params_.degree;
    j["weights"] = weights_;
    j["observations"] = nlohmann::json::array();
    for (const auto& [task, o] : obs_)
        j["observations"].push_back(
            {{"task", task}, {"ram", o.ram_mb}, {"temporary", o.temporary}});
    j["params"] = {{"gamma_max", params_.gamma_max},
                   {"gamma_min", params_.gamma_min},
                   {"overcommit_scale", params_.overcommit_scale},
                   {"floor_mb", params_.floor_mb},
                   {"n_total", params_.n_total}};
    return j.dump(2);
}

OnlinePredictor OnlinePredictor::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("predictor snapshot: ") + e.what());
    }
    try {
        PredictorParams params;
        params.degree = j.at("degree").get<int>();
        const auto& p = j.at("params");
        params.gamma_max = p.at("gamma_max").get<double>();
        params.gamma_min = p.at("gamma_min").get<double>();
        params.overcommit_scale = p.at("overcommit_scale").get<double>();
        params.floor_mb = p.at("floor_mb").get<double>();
        params.n_total = p.at("n_total").get<int>();

        OnlinePredictor pred(params);
        for (const auto& o : j.at("observations"))
            pred.observe(o.at("task").get<int>(), o.at("ram").get<double>(),
                         o.value("temporary", false));
        pred.weights_ = j.at("weights").get<std::vector<double>>();
        return pred;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("predictor snapshot: ") + e.what());
    }
}

} // namespace memsched
