#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "vren/fields.hpp"
#include "vren/rng.hpp"
#include "vren/sampling.hpp"

using namespace vren;

namespace {

Ray unit_ray(double t_near, double t_far) {
    Ray ray;
    ray.origin = Vec3::Zero();
    ray.direction = Vec3::UnitZ();
    ray.t_near = t_near;
    ray.t_far = t_far;
    return ray;
}

// Field defined by a 1D density profile along z; rays here travel along z.
class ProfileField final : public Field {
public:
    explicit ProfileField(std::function<double(double)> sigma)
        : sigma_(std::move(sigma)) {}
    FieldSample sample(const Vec3& x, const Vec3&) const override {
        return {std::max(0.0, sigma_(x.z())), Vec3(0.5, 0.5, 0.5)};
    }

private:
    std::function<double(double)> sigma_;
};

// Dense transmittance profile + bisection for the exact T = 0.5 crossing.
// Independent of the sampler: plain uniform quadrature of the profile.
double crossing_oracle(const std::function<double(double)>& sigma, double lo,
                       double hi, int steps = 200000) {
    double h = (hi - lo) / steps;
    double acc = 0.0;
    const double target = std::log(2.0);
    for (int i = 0; i < steps; ++i) {
        double s = sigma(lo + (i + 0.5) * h) * h;
        if (acc + s >= target) {
            // Linear inside the step.
            double frac = (target - acc) / s;
            return lo + (i + frac) * h;
        }
        acc += s;
    }
    return kBackgroundDepth;
}

}  // namespace

TEST_CASE("single stratified sample with mid jitter is the midpoint") {
    auto t = stratified_positions(0.0, 1.0, 1, {0.5});
    REQUIRE(t.size() == 1);
    CHECK(t[0] == doctest::Approx(0.5));
}

TEST_CASE("stratified samples land one per bin") {
    Ray ray = unit_ray(0.0, 4.0);
    auto t = stratified_samples(ray, 4, 99);
    REQUIRE(t.size() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(t[k] >= k);
        CHECK(t[k] < k + 1);
    }
    for (int k = 1; k < 4; ++k)
        CHECK(t[k] > t[k - 1]);
}

TEST_CASE("stratified sampling is deterministic in the seed") {
    Ray ray = unit_ray(0.5, 6.0);
    auto a = stratified_samples(ray, 32, 1234);
    auto b = stratified_samples(ray, 32, 1234);
    auto c = stratified_samples(ray, 32, 1235);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("geometry interval around the coarse depth") {
    SamplingInterval i = geometry_interval(2.0, 0.8, 0.0, 10.0);
    CHECK(i.lo == doctest::Approx(1.2));
    CHECK(i.hi == doctest::Approx(2.8));
}

TEST_CASE("geometry interval clamps to the ray bounds") {
    SamplingInterval i = geometry_interval(0.1, 0.8, 0.5, 10.0);
    CHECK(i.lo == doctest::Approx(0.5));
    CHECK(i.hi == doctest::Approx(0.9));
}

TEST_CASE("geometry interval falls back to the full range") {
    SamplingInterval i = geometry_interval(kBackgroundDepth, 0.8, 0.5, 10.0);
    CHECK(i.lo == doctest::Approx(0.5));
    CHECK(i.hi == doctest::Approx(10.0));

    // Clamped empty interval: coarse depth far outside the bounds.
    SamplingInterval j = geometry_interval(20.0, 0.5, 0.5, 10.0);
    CHECK(j.lo == doctest::Approx(0.5));
    CHECK(j.hi == doctest::Approx(10.0));
}

TEST_CASE("non-positive delta_d is rejected") {
    CHECK_THROWS_AS(geometry_interval(2.0, 0.0, 0.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(geometry_interval(2.0, -1.0, 0.0, 10.0), std::invalid_argument);
}

TEST_CASE("solve_t_half interpolates to the half crossing") {
    auto m = TransmittanceModel::fit(1.0, 0.8, 2.0, 0.2);
    CHECK(solve_t_half(m, {0.0, 10.0}) == doctest::Approx(1.5));
}

TEST_CASE("solve_t_half flat model falls back to the interval midpoint") {
    auto m = TransmittanceModel::fit(1.0, 0.9, 2.0, 0.9);
    CHECK(solve_t_half(m, {1.0, 2.0}) == doctest::Approx(1.5));
}

TEST_CASE("solve_t_half clamps to the interval") {
    auto m = TransmittanceModel::fit(1.0, 0.6, 2.0, 0.55);
    // Raw solution (0.5 - intercept)/slope = 3.0.
    CHECK(solve_t_half(m, {1.0, 2.0}) == doctest::Approx(2.0));
}

TEST_CASE("two-point fit reproduces its support exactly") {
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        double ta = rng.uniform(0.0, 5.0);
        double tb = ta + rng.uniform(0.01, 3.0);
        double va = rng.uniform(), vb = rng.uniform();
        auto m = TransmittanceModel::fit(ta, va, tb, vb);
        CHECK(m.eval(ta) == doctest::Approx(va).epsilon(1e-12));
        CHECK(m.eval(tb) == doctest::Approx(vb).epsilon(1e-12));
    }
}

TEST_CASE("dynamic sampling locks onto a hard wall") {
    // Opaque wall starting at t = 5 inside the interval [4, 6].
    auto wall = [](double t) { return t >= 5.0 ? 80.0 : 0.0; };
    ProfileField field(wall);
    Ray ray = unit_ray(0.5, 10.0);
    SamplingInterval interval{4.0, 6.0};

    double truth = crossing_oracle(wall, 4.0, 6.0);
    REQUIRE_FALSE(is_background(truth));

    SamplerBudget budget{4, 8, 2024};
    RaySamples samples = dynamic_samples(field, ray, interval, budget);
    double best = std::numeric_limits<double>::infinity();
    for (double t : samples.t)
        best = std::min(best, std::abs(t - truth));
    CHECK(best < 0.02);
}

TEST_CASE("empty field degrades to quasi-uniform coverage") {
    ProfileField field([](double) { return 0.0; });
    Ray ray = unit_ray(0.5, 10.0);
    SamplingInterval interval{2.0, 6.0};

    for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
        SamplerBudget budget{4, 8, seed};
        RaySamples samples = dynamic_samples(field, ray, interval, budget);
        REQUIRE(samples.size() == 12);

        // Oracle: simulate the documented fallback recursion directly —
        // jittered strata plus repeated bisection of the largest gap.
        Rng rng(seed);
        std::vector<double> sim;
        for (int k = 0; k < 4; ++k)
            sim.push_back(interval.lo + (k + rng.uniform()) * interval.width() / 4);
        double jit[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
        for (int k = 0; k < 3; ++k)
            sim.push_back(interval.lo + (k + jit[k]) * interval.width() / 3.0);
        std::sort(sim.begin(), sim.end());
        for (int it = 0; it < 5; ++it) {
            double prev = interval.lo, best_lo = interval.lo, best_w = -1.0;
            for (size_t i = 0; i <= sim.size(); ++i) {
                double next = i < sim.size() ? sim[i] : interval.hi;
                if (next - prev > best_w) {
                    best_w = next - prev;
                    best_lo = prev;
                }
                prev = next;
            }
            sim.push_back(best_lo + 0.5 * best_w);
            std::sort(sim.begin(), sim.end());
        }
        for (size_t i = 0; i < sim.size(); ++i)
            CHECK(samples.t[i] == doctest::Approx(sim[i]).epsilon(1e-12));

        // Quasi-uniform coverage bound, boundaries included.
        double max_gap = 0.0, prev = interval.lo;
        for (size_t i = 0; i <= samples.size(); ++i) {
            double next = i < samples.size() ? samples.t[i] : interval.hi;
            max_gap = std::max(max_gap, next - prev);
            prev = next;
        }
        CHECK(max_gap <= 2.0 * interval.width() / 12.0);
    }
}

TEST_CASE("dynamic sampling is bit-identical across runs") {
    ProfileField field([](double t) { return t >= 4.2 ? 12.0 : 0.1; });
    Ray ray = unit_ray(0.5, 10.0);
    SamplingInterval interval{3.0, 6.0};
    SamplerBudget budget{6, 10, 77};
    RaySamples a = dynamic_samples(field, ray, interval, budget);
    RaySamples b = dynamic_samples(field, ray, interval, budget);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a.t[i] == b.t[i]);
        CHECK(a.sigma[i] == b.sigma[i]);
    }
}

TEST_CASE("samples stay inside the interval, strictly increasing") {
    Rng rng(604);
    Ray ray = unit_ray(0.5, 10.0);
    for (int trial = 0; trial < 30; ++trial) {
        double wall = rng.uniform(2.0, 7.0);
        double strength = rng.uniform(0.0, 60.0);
        ProfileField field([=](double t) { return t >= wall ? strength : 0.0; });
        SamplingInterval interval{rng.uniform(1.0, 4.0), 0.0};
        interval.hi = interval.lo + rng.uniform(0.5, 5.0);
        SamplerBudget budget{static_cast<int>(rng.uniform(0.0, 6.0)),
                             3 + static_cast<int>(rng.uniform(0.0, 10.0)),
                             rng.next_u64()};
        RaySamples s = dynamic_samples(field, ray, interval, budget);
        REQUIRE(s.size() == static_cast<size_t>(budget.n_coarse + budget.n_dynamic));
        for (size_t i = 0; i < s.size(); ++i) {
            CHECK(s.t[i] >= interval.lo);
            CHECK(s.t[i] <= interval.hi);
            if (i > 0)
                CHECK(s.t[i] > s.t[i - 1] + 1e-12);
        }
    }
}

TEST_CASE("the sampler queries the field once per returned sample") {
    ProfileField inner([](double t) { return t >= 4.5 ? 25.0 : 0.0; });
    CountingField counted(inner);
    Ray ray = unit_ray(0.5, 10.0);

    const std::vector<std::pair<int, int>> budgets = {
        {4, 8}, {0, 12}, {6, 0}, {0, 3}, {5, 2}};
    for (auto [n_coarse, n_dynamic] : budgets) {
        counted.reset();
        SamplerBudget budget{n_coarse, n_dynamic, 11};
        RaySamples s = dynamic_samples(counted, ray, {4.0, 6.0}, budget);
        CHECK(counted.count() == static_cast<std::uint64_t>(n_coarse + n_dynamic));
        CHECK(s.size() == static_cast<size_t>(n_coarse + n_dynamic));
    }
}

TEST_CASE("degenerate interval produces a single sample at lo") {
    ProfileField field([](double) { return 1.0; });
    Ray ray = unit_ray(0.5, 10.0);
    SamplerBudget budget{4, 8, 3};
    RaySamples s = dynamic_samples(field, ray, {5.0, 5.0 + 1e-12}, budget);
    REQUIRE(s.size() == 1);
    CHECK(s.t[0] == doctest::Approx(5.0));
}

TEST_CASE("distance to the crossing is non-increasing in the dynamic budget") {
    // Fields whose dense transmittance profile crosses 0.5 exactly once and
    // strictly decreases through the crossing.
    Rng rng(2025);
    Ray ray = unit_ray(0.5, 10.0);
    SamplingInterval interval{3.0, 7.0};

    for (int trial = 0; trial < 40; ++trial) {
        double wall = rng.uniform(3.4, 6.6);
        double strength = rng.uniform(3.0, 120.0);
        bool soft = trial % 2 == 0;
        double width = rng.uniform(0.15, 0.5);
        auto sigma = [=](double t) {
            if (soft) {
                double d = (t - wall) / width;
                return strength * std::exp(-0.5 * d * d);
            }
            return t >= wall ? strength : 0.0;
        };
        double truth = crossing_oracle(sigma, interval.lo, interval.hi);
        if (is_background(truth))
            continue;

        ProfileField field(sigma);
        std::uint64_t seed = rng.next_u64();
        double prev_dist = std::numeric_limits<double>::infinity();
        for (int n_dynamic : {2, 4, 8, 16}) {
            SamplerBudget budget{4, n_dynamic, seed};
            std::vector<double> dynamic_ts;
            dynamic_samples(field, ray, interval, budget, &dynamic_ts);
            double best = std::numeric_limits<double>::infinity();
            for (double t : dynamic_ts)
                best = std::min(best, std::abs(t - truth));
            CHECK(best <= prev_dist + 1e-12);
            prev_dist = best;
        }
    }
}
