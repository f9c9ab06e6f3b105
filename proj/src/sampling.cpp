#include "vren/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vren/rng.hpp"

namespace vren {

TransmittanceModel TransmittanceModel::fit(double t_a, double trans_a, double t_b,
                                           double trans_b) {
    if (!(t_a < t_b))
        throw std::invalid_argument("transmittance model: support must be ordered");
    TransmittanceModel m;
    m.t_a = t_a;
    m.t_b = t_b;
    m.slope = (trans_b - trans_a) / (t_b - t_a);
    m.intercept = trans_a - m.slope * t_a;
    return m;
}

void SamplerBudget::validate() const {
    if (n_coarse < 0 || n_dynamic < 0 || n_coarse + n_dynamic < 1)
        throw std::invalid_argument("sampler budget: need at least one sample");
}

std::vector<double> stratified_positions(double lo, double hi, int n,
                                         const std::vector<double>& jitters) {
    if (n < 1)
        throw std::invalid_argument("stratified_positions: n must be >= 1");
    if (static_cast<int>(jitters.size()) != n)
        throw std::invalid_argument("stratified_positions: one jitter per bin");
    std::vector<double> out(n);
    double bin = (hi - lo) / n;
    for (int k = 0; k < n; ++k)
        out[k] = lo + (k + jitters[k]) * bin;
    return out;
}

std::vector<double> stratified_samples(const Ray& ray, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> jitters(n);
    for (auto& j : jitters)
        j = rng.uniform();
    return stratified_positions(ray.t_near, ray.t_far, n, jitters);
}

SamplingInterval geometry_interval(double coarse_depth, double delta_d,
                                   double t_near, double t_far) {
    if (!(delta_d > 0.0))
        throw std::invalid_argument("geometry_interval: delta_d must be positive");
    if (is_background(coarse_depth))
        return {t_near, t_far};
    double lo = std::max(coarse_depth - delta_d, t_near);
    double hi = std::min(coarse_depth + delta_d, t_far);
    if (!(lo < hi))
        return {t_near, t_far};
    return {lo, hi};
}

double solve_t_half(const TransmittanceModel& model, const SamplingInterval& interval) {
    if (std::abs(model.slope) < 1e-9)
        return 0.5 * (interval.lo + interval.hi);
    double t = (0.5 - model.intercept) / model.slope;
    return std::clamp(t, interval.lo, interval.hi);
}

namespace {

struct Working {
    // Kept sorted by t throughout the iteration.
    std::vector<double> t;
    std::vector<double> sigma;
    std::vector<Vec3> color;

    void insert(double ti, const FieldSample& s) {
        size_t pos = std::upper_bound(t.begin(), t.end(), ti) - t.begin();
        t.insert(t.begin() + pos, ti);
        sigma.insert(sigma.begin() + pos, s.sigma);
        color.insert(color.begin() + pos, s.color);
    }
};

bool near_existing(const std::vector<double>& sorted_t, double t, double tol) {
    auto it = std::lower_bound(sorted_t.begin(), sorted_t.end(), t - tol);
    return it != sorted_t.end() && *it <= t + tol;
}

// Largest gap between adjacent samples, interval boundaries included.
SamplingInterval largest_gap(const std::vector<double>& sorted_t,
                             const SamplingInterval& interval) {
    double best_lo = interval.lo;
    double best_hi = interval.hi;
    double best = -1.0;
    double prev = interval.lo;
    for (size_t i = 0; i <= sorted_t.size(); ++i) {
        double next = (i < sorted_t.size()) ? sorted_t[i] : interval.hi;
        if (next - prev > best) {
            best = next - prev;
            best_lo = prev;
            best_hi = next;
        }
        prev = next;
    }
    return {best_lo, best_hi};
}

// Keeps new positions at least the nudge distance from existing samples so
// slab widths never collapse.
double make_unique(double t, const Working& w, const SamplingInterval& interval) {
    const double tol = 1e-9;
    if (!near_existing(w.t, t, tol))
        return t;
    double nudge = 1e-6 * interval.width();
    double up = t + nudge;
    if (up <= interval.hi && !near_existing(w.t, up, tol))
        return up;
    double down = t - nudge;
    if (down >= interval.lo && !near_existing(w.t, down, tol))
        return down;
    SamplingInterval gap = largest_gap(w.t, interval);
    return 0.5 * (gap.lo + gap.hi);
}

// Transmittance at each sample for the current sorted set.
std::vector<double> transmittance_at_samples(const Working& w, double interval_lo) {
    std::vector<double> trans(w.t.size());
    double optical_depth = 0.0;
    double prev = interval_lo;
    for (size_t j = 0; j < w.t.size(); ++j) {
        trans[j] = std::exp(-optical_depth);
        optical_depth += w.sigma[j] * (w.t[j] - prev);
        prev = w.t[j];
    }
    return trans;
}

}  // namespace

RaySamples dynamic_samples(const Field& field, const Ray& ray,
                           const SamplingInterval& interval,
                           const SamplerBudget& budget,
                           std::vector<double>* dynamic_positions) {
    budget.validate();
    if (budget.n_dynamic > 0 && budget.n_coarse + budget.n_dynamic < 3)
        throw std::invalid_argument("dynamic_samples: budget total must be >= 3");
    if (dynamic_positions)
        dynamic_positions->clear();

    Working w;
    RaySamples out;
    out.interval_lo = interval.lo;

    auto evaluate_at = [&](double t) {
        w.insert(t, field.sample(ray.point_at(t), ray.direction));
    };

    if (interval.width() < 1e-9) {
        evaluate_at(interval.lo);
        if (dynamic_positions && budget.n_dynamic > 0)
            *dynamic_positions = {interval.lo};
    } else {
        Rng rng(budget.seed);

        for (int k = 0; k < budget.n_coarse; ++k) {
            double t = interval.lo +
                       (k + rng.uniform()) * interval.width() / budget.n_coarse;
            evaluate_at(make_unique(t, w, interval));
        }

        // Three jitters are always drawn so sample sets nest across budgets
        // that differ only in n_dynamic.
        double init_jitter[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
        int n_init = std::min(3, budget.n_dynamic);
        for (int k = 0; k < n_init; ++k) {
            double t = interval.lo + (k + init_jitter[k]) * interval.width() / 3.0;
            t = make_unique(t, w, interval);
            evaluate_at(t);
            if (dynamic_positions)
                dynamic_positions->push_back(t);
        }

        for (int placed = n_init; placed < budget.n_dynamic; ++placed) {
            std::vector<double> trans = transmittance_at_samples(w, interval.lo);

            // Prefer the adjacent pair straddling T = 0.5; otherwise the pair
            // whose nearer endpoint is closest to 0.5.
            size_t pair = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i + 1 < trans.size(); ++i) {
                if (trans[i] >= 0.5 && trans[i + 1] <= 0.5 &&
                    trans[i] > trans[i + 1]) {
                    pair = i;
                    break;
                }
                double d = std::min(std::abs(trans[i] - 0.5),
                                    std::abs(trans[i + 1] - 0.5));
                if (d < best_dist) {
                    best_dist = d;
                    pair = i;
                }
            }

            double t_new;
            if (trans.size() < 2) {
                SamplingInterval gap = largest_gap(w.t, interval);
                t_new = 0.5 * (gap.lo + gap.hi);
            } else {
                TransmittanceModel model = TransmittanceModel::fit(
                    w.t[pair], trans[pair], w.t[pair + 1], trans[pair + 1]);
                if (std::abs(model.slope) < 1e-9) {
                    // Flat profile: bisect the largest unsampled gap to keep
                    // coverage when no surface lies in the interval.
                    SamplingInterval gap = largest_gap(w.t, interval);
                    t_new = solve_t_half(model, gap);
                } else {
                    t_new = solve_t_half(model, interval);
                }
            }

            t_new = make_unique(t_new, w, interval);
            evaluate_at(t_new);
            if (dynamic_positions)
                dynamic_positions->push_back(t_new);
        }
    }

    out.t = std::move(w.t);
    out.sigma = std::move(w.sigma);
    out.color = std::move(w.color);
    compute_deltas(out);
    return out;
}

}  // namespace vren
