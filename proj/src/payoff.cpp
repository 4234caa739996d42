#include "cubature/payoff.hpp"

#include <algorithm>
#include <cmath>

#include "cubature/error.hpp"
#include "cubature/stats.hpp"

namespace cubature {

Payoff terminal_payoff(TerminalFunction f, std::string label) {
    if (!f) throw ContractViolation("terminal payoff needs a function");
    Payoff p;
    p.kind = PayoffKind::terminal;
    p.label = std::move(label);
    p.terminal = std::move(f);
    return p;
}

Payoff call_payoff(double strike, int coordinate) {
    auto p = terminal_payoff(
        [strike, c = static_cast<std::size_t>(coordinate)](std::span<const double> x) {
            return std::max(x[c] - strike, 0.0);
        },
        "call");
    p.coordinate = coordinate;
    p.strike = strike;
    return p;
}

Payoff put_payoff(double strike, int coordinate) {
    auto p = terminal_payoff(
        [strike, c = static_cast<std::size_t>(coordinate)](std::span<const double> x) {
            return std::max(strike - x[c], 0.0);
        },
        "put");
    p.coordinate = coordinate;
    p.strike = strike;
    return p;
}

Payoff smooth_bump_payoff(double scale, int coordinate) {
    if (!(scale > 0.0)) throw ContractViolation("smooth bump payoff needs a positive scale");
    auto p = terminal_payoff(
        [scale, c = static_cast<std::size_t>(coordinate)](std::span<const double> x) {
            const double u = x[c] / scale - 1.0;
            return std::exp(-u * u);
        },
        "smooth_bump");
    p.coordinate = coordinate;
    p.strike = scale;
    return p;
}

Payoff identity_payoff(int coordinate) {
    auto p = terminal_payoff([c = static_cast<std::size_t>(coordinate)](std::span<const double> x) { return x[c]; },
                             "identity");
    p.coordinate = coordinate;
    return p;
}

Payoff asian_call_payoff(double strike, int coordinate, std::vector<double> observation_times) {
    Payoff p;
    p.kind = PayoffKind::asian;
    p.label = "asian";
    p.coordinate = coordinate;
    p.strike = strike;
    p.observation_times = std::move(observation_times);
    return p;
}

Payoff lookback_payoff(int coordinate, std::vector<double> observation_times) {
    Payoff p;
    p.kind = PayoffKind::lookback;
    p.label = "lookback";
    p.coordinate = coordinate;
    p.observation_times = std::move(observation_times);
    return p;
}

Payoff barrier_call_payoff(double strike, double level, bool up, int coordinate,
                           std::vector<double> observation_times) {
    Payoff p;
    p.kind = PayoffKind::barrier;
    p.label = "barrier";
    p.coordinate = coordinate;
    p.strike = strike;
    p.barrier = level;
    p.barrier_up = up;
    p.observation_times = std::move(observation_times);
    return p;
}

Payoff custom_payoff(PathFunctional f, std::string label) {
    if (!f) throw ContractViolation("custom payoff needs a functional");
    Payoff p;
    p.kind = PayoffKind::custom;
    p.label = std::move(label);
    p.custom = std::move(f);
    return p;
}

namespace {

/// Coordinate values at the observation times, or at the sample times from
/// index `first_sample` on.
std::vector<double> observed(const Payoff& payoff, const SolutionPath& path, std::size_t first_sample) {
    const auto c = static_cast<std::size_t>(payoff.coordinate);
    if (payoff.coordinate < 0 || payoff.coordinate >= path.state_dim) {
        throw ContractViolation("payoff coordinate out of range");
    }
    std::vector<double> out;
    if (!payoff.observation_times.empty()) {
        out.reserve(payoff.observation_times.size());
        for (double t : payoff.observation_times) out.push_back(path.state_at(t)[c]);
        return out;
    }
    for (std::size_t i = first_sample; i < path.sample_indices.size(); ++i) {
        out.push_back(path.state(path.sample_indices[i])[c]);
    }
    return out;
}

}  // namespace

double path_payoff_eval(const Payoff& payoff, const SolutionPath& path) {
    if (path.size() == 0) throw ContractViolation("payoff on an empty solution path");
    switch (payoff.kind) {
        case PayoffKind::terminal:
            return payoff.terminal(path.terminal());
        case PayoffKind::custom:
            return payoff.custom(path);
        case PayoffKind::asian: {
            const auto v = observed(payoff, path, path.sample_indices.size() > 1 ? 1 : 0);
            if (v.empty()) throw ContractViolation("asian payoff has no observation times");
            CompensatedSum sum;
            for (double x : v) sum.add(x);
            return std::max(sum.value() / static_cast<double>(v.size()) - payoff.strike, 0.0);
        }
        case PayoffKind::lookback: {
            const auto v = observed(payoff, path, 0);
            if (v.empty()) throw ContractViolation("lookback payoff has no observation times");
            return *std::max_element(v.begin(), v.end());
        }
        case PayoffKind::barrier: {
            const auto v = observed(payoff, path, 0);
            for (double x : v) {
                if (payoff.barrier_up ? x >= payoff.barrier : x <= payoff.barrier) return 0.0;
            }
            const auto c = static_cast<std::size_t>(payoff.coordinate);
            return std::max(path.terminal()[c] - payoff.strike, 0.0);
        }
    }
    return 0.0;
}

}  // namespace cubature
