#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cubature/sde.hpp"

namespace cubature {

enum class PayoffKind { terminal, asian, lookback, barrier, custom };

using TerminalFunction = std::function<double(std::span<const double>)>;
using PathFunctional = std::function<double(const SolutionPath&)>;

/// Functional of a solution path.
///
/// Path-dependent kinds read coordinate `coordinate` at the observation
/// times when given, otherwise at the solution's sample times (the mesh
/// nodes). Defaults: Asian averages over t_1..t_n, Lookback takes the max
/// over t_0..t_n, Barrier monitors t_0..t_n discretely.
struct Payoff {
    PayoffKind kind = PayoffKind::terminal;
    std::string label;
    TerminalFunction terminal;  ///< terminal kind only
    PathFunctional custom;      ///< custom kind only
    int coordinate = 0;
    double strike = 0.0;
    double barrier = 0.0;
    bool barrier_up = true;  ///< knock out when the level is reached from below
    std::vector<double> observation_times;
};

Payoff terminal_payoff(TerminalFunction f, std::string label = "terminal");
Payoff call_payoff(double strike, int coordinate = 0);
Payoff put_payoff(double strike, int coordinate = 0);
/// exp(-(x / scale - 1)^2).
Payoff smooth_bump_payoff(double scale, int coordinate = 0);
Payoff identity_payoff(int coordinate = 0);
/// max(average - strike, 0).
Payoff asian_call_payoff(double strike, int coordinate = 0, std::vector<double> observation_times = {});
/// Running maximum of the coordinate.
Payoff lookback_payoff(int coordinate = 0, std::vector<double> observation_times = {});
/// Terminal call, knocked out once a monitored value crosses `level`
/// (>= level for up barriers, <= level for down barriers).
Payoff barrier_call_payoff(double strike, double level, bool up = true, int coordinate = 0,
                           std::vector<double> observation_times = {});
Payoff custom_payoff(PathFunctional f, std::string label = "custom");

double path_payoff_eval(const Payoff& payoff, const SolutionPath& path);

}  // namespace cubature
