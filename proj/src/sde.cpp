#include "cubature/sde.hpp"

#include <algorithm>
#include <cmath>

#include "cubature/error.hpp"
#include "cubature/stats.hpp"

namespace cubature {

VectorFieldSystem::VectorFieldSystem(int state_dim, int noise_dim, std::vector<VectorField> fields,
                                     std::string name, SegmentFlow exact_flow)
    : n_(state_dim), d_(noise_dim), fields_(std::move(fields)), name_(std::move(name)), flow_(std::move(exact_flow)) {
    if (n_ < 1 || d_ < 1) throw ContractViolation("vector field system needs N >= 1 and d >= 1");
    if (fields_.size() != static_cast<std::size_t>(d_) + 1) {
        throw ContractViolation("vector field system needs fields V_0..V_d");
    }
    for (const auto& f : fields_) {
        if (!f) throw ContractViolation("vector field system has an empty field");
    }
}

void VectorFieldSystem::eval(int field, std::span<const double> x, std::span<double> out) const {
    fields_.at(static_cast<std::size_t>(field))(x, out);
}

void VectorFieldSystem::segment_rhs(std::span<const double> x, double dh, std::span<const double> dw,
                                    std::span<double> out, std::span<double> scratch) const {
    std::fill(out.begin(), out.end(), 0.0);
    auto accumulate = [&](int field, double c) {
        if (c == 0.0) return;
        fields_[static_cast<std::size_t>(field)](x, scratch);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * scratch[i];
    };
    accumulate(0, dh);
    for (int i = 0; i < d_; ++i) accumulate(i + 1, dw[static_cast<std::size_t>(i)]);
}

VectorFieldSystem black_scholes(std::vector<double> sigma, std::vector<double> ito_drift) {
    const int n = static_cast<int>(sigma.size());
    if (n < 1) throw ContractViolation("black_scholes: need at least one asset");
    if (ito_drift.empty()) ito_drift.assign(sigma.size(), 0.0);
    if (ito_drift.size() != sigma.size()) throw ContractViolation("black_scholes: drift and sigma sizes differ");
    std::vector<double> strat(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (!(sigma[i] >= 0.0)) throw ContractViolation("black_scholes: sigma must be non-negative");
        strat[i] = ito_drift[i] - 0.5 * sigma[i] * sigma[i];
    }
    std::vector<VectorField> fields;
    fields.emplace_back([strat](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = strat[i] * x[i];
    });
    for (std::size_t j = 0; j < sigma.size(); ++j) {
        fields.emplace_back([j, s = sigma[j]](std::span<const double> x, std::span<double> out) {
            std::fill(out.begin(), out.end(), 0.0);
            out[j] = s * x[j];
        });
    }
    SegmentFlow flow = [strat, sigma](std::span<double> x, double dh, std::span<const double> dw) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] *= std::exp(strat[i] * dh + sigma[i] * dw[i]);
    };
    return VectorFieldSystem(n, n, std::move(fields), "black_scholes", std::move(flow));
}

VectorFieldSystem linear_system(int state_dim, std::vector<std::vector<double>> matrices) {
    if (matrices.size() < 2) throw ContractViolation("linear_system: need A_0 and at least one A_i");
    const auto nn = static_cast<std::size_t>(state_dim) * static_cast<std::size_t>(state_dim);
    std::vector<VectorField> fields;
    for (auto& a : matrices) {
        if (a.size() != nn) throw ContractViolation("linear_system: matrices must be N x N");
        for (double v : a) {
            if (!std::isfinite(v)) throw ContractViolation("linear_system: non-finite matrix entry");
        }
        fields.emplace_back([a = std::move(a), state_dim](std::span<const double> x, std::span<double> out) {
            const auto n = static_cast<std::size_t>(state_dim);
            for (std::size_t r = 0; r < n; ++r) {
                double acc = 0.0;
                for (std::size_t c = 0; c < n; ++c) acc += a[r * n + c] * x[c];
                out[r] = acc;
            }
        });
    }
    const int d = static_cast<int>(matrices.size()) - 1;
    return VectorFieldSystem(state_dim, d, std::move(fields), "linear");
}

std::vector<double> ito_to_stratonovich_drift(int state_dim, std::span<const std::vector<double>> matrices) {
    const auto n = static_cast<std::size_t>(state_dim);
    if (matrices.empty()) throw ContractViolation("ito_to_stratonovich_drift: need A_0");
    std::vector<double> out = matrices[0];
    if (out.size() != n * n) throw ContractViolation("ito_to_stratonovich_drift: matrices must be N x N");
    for (std::size_t i = 1; i < matrices.size(); ++i) {
        const auto& a = matrices[i];
        if (a.size() != n * n) throw ContractViolation("ito_to_stratonovich_drift: matrices must be N x N");
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                double sq = 0.0;
                for (std::size_t k = 0; k < n; ++k) sq += a[r * n + k] * a[k * n + c];
                out[r * n + c] -= 0.5 * sq;
            }
        }
    }
    return out;
}

VectorFieldSystem zero_system(int state_dim, int noise_dim) {
    std::vector<VectorField> fields(static_cast<std::size_t>(noise_dim) + 1,
                                    [](std::span<const double>, std::span<double> out) {
                                        std::fill(out.begin(), out.end(), 0.0);
                                    });
    SegmentFlow flow = [](std::span<double>, double, std::span<const double>) {};
    return VectorFieldSystem(state_dim, noise_dim, std::move(fields), "zero", std::move(flow));
}

std::vector<double> SolutionPath::state_at(double t) const {
    if (times.empty()) throw ContractViolation("state_at on an empty solution path");
    const auto n = static_cast<std::size_t>(state_dim);
    if (t <= times.front()) return {state(0).begin(), state(0).end()};
    if (t >= times.back()) return {terminal().begin(), terminal().end()};
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    if (times[lo] == t) return {state(lo).begin(), state(lo).end()};
    const double u = (t - times[lo]) / (times[hi] - times[lo]);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (1.0 - u) * state(lo)[i] + u * state(hi)[i];
    return out;
}

std::vector<double> SolutionPath::sample_times() const {
    std::vector<double> out;
    out.reserve(sample_indices.size());
    for (auto i : sample_indices) out.push_back(times[i]);
    return out;
}

namespace {

/// Classical RK4 over unit time in `steps` steps of the autonomous field
/// y' = dh V_0(y) + sum dw_i V_i(y).
void rk4(const VectorFieldSystem& vf, std::span<double> y, double dh, std::span<const double> dw, int steps) {
    const auto n = y.size();
    std::vector<double> buf(6 * n);
    std::span<double> k1(buf.data(), n), k2(buf.data() + n, n), k3(buf.data() + 2 * n, n),
        k4(buf.data() + 3 * n, n), tmp(buf.data() + 4 * n, n), scratch(buf.data() + 5 * n, n);
    const double h = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
        vf.segment_rhs(y, dh, dw, k1, scratch);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        vf.segment_rhs(tmp, dh, dw, k2, scratch);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        vf.segment_rhs(tmp, dh, dw, k3, scratch);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        vf.segment_rhs(tmp, dh, dw, k4, scratch);
        for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

bool finite(std::span<const double> y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

void integrate_segment(const VectorFieldSystem& vf, std::span<double> x, double dh, std::span<const double> dw,
                       const IntegrationOptions& options, std::size_t segment) {
    if (options.substeps < 1) throw ContractViolation("integration needs substeps >= 1");
    if (!std::isfinite(dh) || !finite(dw)) throw ContractViolation("driver segment is not finite");
    const bool idle = dh == 0.0 && std::all_of(dw.begin(), dw.end(), [](double v) { return v == 0.0; });
    if (!idle) {
        if (options.use_exact_flow && vf.has_exact_flow()) {
            vf.apply_exact_flow(x, dh, dw);
        } else if (!options.adaptive) {
            rk4(vf, x, dh, dw, options.substeps);
        } else {
            int steps = options.substeps;
            std::vector<double> coarse(x.begin(), x.end());
            rk4(vf, coarse, dh, dw, steps);
            for (;;) {
                std::vector<double> fine(x.begin(), x.end());
                rk4(vf, fine, dh, dw, 2 * steps);
                steps *= 2;
                double diff = 0.0;
                double scale = 0.0;
                for (std::size_t i = 0; i < fine.size(); ++i) {
                    diff = std::max(diff, std::abs(fine[i] - coarse[i]));
                    scale = std::max(scale, std::abs(fine[i]));
                }
                coarse = std::move(fine);
                if (!std::isfinite(diff) || diff <= options.rel_tol * scale || 2 * steps > options.max_substeps) break;
            }
            std::copy(coarse.begin(), coarse.end(), x.begin());
        }
    }
    if (!finite(x)) {
        throw DivergenceError(segment, "integration diverged on driver segment " + std::to_string(segment));
    }
}

SolutionPath integrate_along_path(const VectorFieldSystem& vf, const PiecewiseLinearPath& driver,
                                  std::span<const double> x0, const IntegrationOptions& options,
                                  const Mesh* sample_mesh) {
    if (driver.dimension() != vf.noise_dimension()) throw ContractViolation("driver dimension != noise dimension");
    if (x0.size() != static_cast<std::size_t>(vf.state_dimension())) {
        throw ContractViolation("x0 dimension != state dimension");
    }
    if (options.substeps < 1) {
        throw ContractViolation("integration needs substeps >= 1");
    }
    const auto dd = static_cast<std::size_t>(driver.dimension());
    SolutionPath out;
    out.state_dim = vf.state_dimension();
    out.times.assign(driver.breakpoints().begin(), driver.breakpoints().end());
    out.states.reserve(driver.num_nodes() * x0.size());
    out.states.insert(out.states.end(), x0.begin(), x0.end());

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> dw(dd);
    for (std::size_t i = 0; i + 1 < driver.num_nodes(); ++i) {
        const auto a = driver.node(i);
        const auto b = driver.node(i + 1);
        for (std::size_t c = 0; c < dd; ++c) dw[c] = b[c] - a[c];
        const double dh = driver.time_value(i + 1) - driver.time_value(i);
        integrate_segment(vf, x, dh, dw, options, i);
        out.states.insert(out.states.end(), x.begin(), x.end());
    }

    if (sample_mesh) {
        for (double t : sample_mesh->nodes()) {
            const auto idx = driver.breakpoint_index(t);
            if (!idx) throw ContractViolation("sample time is not a driver breakpoint");
            out.sample_indices.push_back(*idx);
        }
    } else {
        out.sample_indices.resize(out.times.size());
        for (std::size_t i = 0; i < out.times.size(); ++i) out.sample_indices[i] = i;
    }
    return out;
}

SolutionPath wong_zakai_path(const VectorFieldSystem& vf, std::span<const double> x0, std::size_t fine_n, Rng& rng,
                             const IntegrationOptions& options) {
    if (fine_n < 1) throw ContractViolation("wong_zakai_path: fine_n must be >= 1");
    const Mesh mesh = uniform_mesh(fine_n);
    const auto formula = wong_zakai_formula(vf.noise_dimension());
    const auto driver = build_cubature_path(formula, mesh, rng);
    return integrate_along_path(vf, driver, x0, options, &mesh);
}

std::vector<double> wong_zakai_reference(const VectorFieldSystem& vf, std::span<const double> x0,
                                         std::size_t fine_n, Rng& rng, const IntegrationOptions& options) {
    const auto path = wong_zakai_path(vf, x0, fine_n, rng, options);
    return {path.terminal().begin(), path.terminal().end()};
}

double black_scholes_exact(double s0, double strike, double sigma, double maturity) {
    if (!(s0 > 0.0 && strike > 0.0 && sigma >= 0.0 && maturity >= 0.0)) {
        throw ContractViolation("black_scholes_exact: inputs must be positive");
    }
    const double vol = sigma * std::sqrt(maturity);
    if (vol == 0.0) return std::max(s0 - strike, 0.0);
    const double d1 = (std::log(s0 / strike) + 0.5 * vol * vol) / vol;
    const double d2 = d1 - vol;
    return s0 * normal_cdf(d1) - strike * normal_cdf(d2);
}

double lognormal_expectation(const std::function<double(double)>& f, double s0, double sigma, double ito_drift,
                             double maturity, int intervals) {
    if (intervals < 2) throw ContractViolation("lognormal_expectation: need at least 2 intervals");
    if (intervals % 2) ++intervals;
    const double lo = -12.0;
    const double hi = 12.0;
    const double step = (hi - lo) / intervals;
    const double vol = sigma * std::sqrt(maturity);
    const double mean = (ito_drift - 0.5 * sigma * sigma) * maturity;
    const double inv_sqrt_2pi = 0.3989422804014327;
    CompensatedSum acc;
    for (int i = 0; i <= intervals; ++i) {
        const double z = lo + step * i;
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc.add(w * f(s0 * std::exp(vol * z + mean)) * inv_sqrt_2pi * std::exp(-0.5 * z * z));
    }
    return acc.value() * step / 3.0;
}

}  // namespace cubature
