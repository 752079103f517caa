#pragma once

#include <map>
#include <string>
#include <vector>

namespace memsched {

struct PredictorParams {
    int degree = 1;
    double gamma_max = 0.95;
    double gamma_min = 0.80;
    double overcommit_scale = 1.30; // multiplier for synthesized observations
    double floor_mb = 1.0;
    int n_total = 22; // size of the task universe, fixes the gamma schedule
};

// Online polynomial RAM model over task ids. Observations are keyed by task,
// so ids are distinct by construction; a temporary observation (synthesized
// after an overcommit) occupies the task's slot until the real measurement
// replaces it. fit() must be called after observations change; predict and
// bias use the weights from the last fit.
//
// The bias percentile is taken over leave-one-out residuals: each observation
// is scored by a model refitted without it. A fresh fit always looks accurate
// against its own training points (two points under a line have zero error),
// so in-sample residuals understate the error of the predictions the
// scheduler acts on, which are extrapolations to unseen tasks.
class OnlinePredictor {
public:
    explicit OnlinePredictor(const PredictorParams& params);

    void observe(int task, double ram_mb, bool temporary = false);
    int observation_count() const { return static_cast<int>(obs_.size()); }
    bool has_observation(int task) const { return obs_.count(task) != 0; }
    double observed_value(int task) const;

    bool can_fit() const {
        return observation_count() >= params_.degree + 1;
    }
    void fit(); // throws input_error("insufficient data") if !can_fit()
    bool fitted() const { return !weights_.empty(); }

    double predict(int task) const;       // floored at params.floor_mb
    double gamma_now() const;             // shrinking residual percentile
    double bias(double gamma) const;      // residual-percentile margin
    double conservative_predict(int task) const; // predict + bias(gamma_now)

    // Synthesizes the temporary observation scale * predict(task). The next
    // fit() picks it up; consecutive failures compound because each new
    // prediction already reflects the previous temporary observation.
    void record_overcommit(int task);

    const std::vector<double>& weights() const { return weights_; }
    const PredictorParams& params() const { return params_; }

    std::string to_json() const;
    static OnlinePredictor from_json(const std::string& text);

private:
    struct Obs {
        double ram_mb;
        bool temporary;
    };

    double raw_poly(int task) const;

    PredictorParams params_;
    std::map<int, Obs> obs_; // ordered by task id: deterministic fits
    std::vector<double> weights_;
};

} // namespace memsched
