#include "survhc/decay_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "survhc/error.hpp"

namespace survhc {

std::int64_t default_initial_size(std::size_t T) {
    const double dT = static_cast<double>(T);
    return static_cast<std::int64_t>(std::llround(dT * std::log(dT)));
}

double DecayParams::mean_at_risk(std::size_t t) const {
    return 0.5 * static_cast<double>(x0 + y0) * std::exp(-lambda_bar * static_cast<double>(t));
}

DecayParams calibrate(std::size_t T, double beta, double r, std::optional<std::int64_t> x0,
                      std::optional<std::int64_t> y0, std::optional<double> lambda_bar) {
    if (T < 2) throw ArgumentError("T must be at least 2");
    if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("beta must lie in (0, 1)");
    if (!(r >= 0.0) || !std::isfinite(r)) throw ArgumentError("r must be non-negative");

    DecayParams p;
    p.T = T;
    p.beta = beta;
    p.r = r;
    p.x0 = x0.value_or(default_initial_size(T));
    p.y0 = y0.value_or(default_initial_size(T));
    p.lambda_bar = lambda_bar.value_or(2.0 / static_cast<double>(T));
    if (p.x0 <= 0 || p.y0 <= 0) throw ArgumentError("initial group sizes must be positive");
    if (!(p.lambda_bar >= 0.0 && p.lambda_bar <= 1.0)) throw ArgumentError("lambda_bar must lie in [0, 1]");

    const double dT = static_cast<double>(T);
    p.epsilon = std::pow(dT, -beta);
    p.delta.resize(T);
    p.lambda_prime.resize(T);
    const double root_base = std::sqrt(p.lambda_bar);
    for (std::size_t t = 1; t <= T; ++t) {
        const double d = 0.5 * r * std::log(dT) / p.mean_at_risk(t);
        const double root = root_base + std::sqrt(d);
        p.delta[t - 1] = d;
        // sqrt(l)^2 can differ from l in the last bit; keep r = 0 identical to H0
        p.lambda_prime[t - 1] = d > 0.0 ? root * root : p.lambda_bar;
    }
    return p;
}

namespace {

std::int64_t draw_events(std::int64_t at_risk, double rate, Rng& rng) {
    const double mean = static_cast<double>(at_risk) * rate;
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<std::int64_t> pois(mean);
    return std::min(pois(rng), at_risk);
}

}  // namespace

SimOutcome simulate(const DecayParams& params, Hypothesis hypothesis, Rng& rng) {
    const auto T = params.T;
    SimOutcome out;
    auto& tab = out.table;
    for (auto* v : {&tab.n_x_prev, &tab.n_y_prev, &tab.o_x, &tab.o_y, &tab.c_x, &tab.c_y}) v->assign(T, 0);

    std::vector<char> in_set(T, 0);
    std::bernoulli_distribution member(params.epsilon);
    for (std::size_t t = 0; t < T; ++t) in_set[t] = member(rng) ? 1 : 0;
    if (hypothesis == Hypothesis::H0) std::fill(in_set.begin(), in_set.end(), 0);

    std::int64_t nx = params.x0, ny = params.y0;
    for (std::size_t t = 0; t < T; ++t) {
        tab.n_x_prev[t] = nx;
        tab.n_y_prev[t] = ny;
        const double rate_y = in_set[t] ? params.lambda_prime[t] : params.lambda_bar;
        tab.o_x[t] = draw_events(nx, params.lambda_bar, rng);
        tab.o_y[t] = draw_events(ny, rate_y, rng);
        nx -= tab.o_x[t];
        ny -= tab.o_y[t];
        if (in_set[t]) out.nonnull.push_back(t + 1);
    }
    return out;
}

std::string render_nonnull(const SimOutcome& outcome) {
    std::ostringstream s;
    s << "t\n";
    for (auto t : outcome.nonnull) s << t << '\n';
    return s.str();
}

}  // namespace survhc
