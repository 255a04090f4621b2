// quadrature.cpp — Gauss-Legendre panels, adaptive bisection, PV integral.
#include "oqs/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace oqs {

namespace {

constexpr int gl_order = 10;
constexpr double gl_x[gl_order] = {
    -9.73906528517171743e-01, -8.65063366688984536e-01,
    -6.79409568299024436e-01, -4.33395394129247213e-01,
    -1.48874338981631216e-01, 1.48874338981631216e-01,
    4.33395394129247213e-01,  6.79409568299024436e-01,
    8.65063366688984536e-01,  9.73906528517171743e-01};
constexpr double gl_w[gl_order] = {
    6.66713443086880686e-02, 1.49451349150580365e-01,
    2.19086362515982014e-01, 2.69266719309996516e-01,
    2.95524224714752981e-01, 2.95524224714752981e-01,
    2.69266719309996516e-01, 2.19086362515982014e-01,
    1.49451349150580365e-01, 6.66713443086880686e-02};

double gl_panel(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < gl_order; ++k)
        acc += gl_w[k] * f(mid + half * gl_x[k]);
    return half * acc;
}

struct AdaptiveState {
    const std::function<double(double)>& f;
    const QuadratureSpec& quad;
    int panels_used = 0;
};

double adaptive_rec(AdaptiveState& st, double a, double b, double whole,
                    int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gl_panel(st.f, a, mid);
    const double right = gl_panel(st.f, mid, b);
    const double refined = left + right;
    const double err = std::abs(whole - refined);
    if (err < std::max(st.quad.abs_tol, st.quad.rel_tol * std::abs(refined)) ||
        depth > 48)
        return refined;
    st.panels_used += 2;
    if (st.panels_used > st.quad.max_panels)
        throw std::runtime_error(
            "integrate_adaptive: panel budget exhausted, achieved error " +
            std::to_string(err));
    return adaptive_rec(st, a, mid, left, depth + 1) +
           adaptive_rec(st, mid, b, right, depth + 1);
}

}  // namespace

PanelNodes panel_nodes(const std::vector<double>& breakpoints) {
    if (breakpoints.size() < 2)
        throw std::invalid_argument("panel_nodes: need at least two breakpoints");
    PanelNodes nodes;
    const std::size_t panels = breakpoints.size() - 1;
    nodes.x.resize(panels * gl_order);
    nodes.w.resize(panels * gl_order);
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = breakpoints[p];
        const double b = breakpoints[p + 1];
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (int k = 0; k < gl_order; ++k) {
            nodes.x[p * gl_order + k] = mid + half * gl_x[k];
            nodes.w[p * gl_order + k] = half * gl_w[k];
        }
    }
    return nodes;
}

std::vector<double> oscillatory_breakpoints(const NormalModes& modes,
                                            double omega_c, double delta_t,
                                            const QuadratureSpec& quad) {
    quad.validate();
    if (!(delta_t > 0.0))
        throw std::invalid_argument("oscillatory_breakpoints: delta_t must be > 0");
    std::vector<double> pts = {-omega_c, 0.0, omega_c};
    const double step = M_PI / delta_t;
    for (double e : modes.epsilon) {
        const auto klo = static_cast<long>(std::ceil((-omega_c - e) / step));
        const auto khi = static_cast<long>(std::floor((omega_c - e) / step));
        if (khi - klo > quad.max_panels)
            throw std::runtime_error(
                "oscillatory_breakpoints: delta_t needs " +
                std::to_string(khi - klo) + " panels, budget is " +
                std::to_string(quad.max_panels));
        for (long k = klo; k <= khi; ++k) pts.push_back(e + step * k);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) {
                              return std::abs(a - b) < 1e-13;
                          }),
              pts.end());
    while (!pts.empty() && pts.front() < -omega_c) pts.erase(pts.begin());
    while (!pts.empty() && pts.back() > omega_c) pts.pop_back();
    if (static_cast<int>(pts.size()) > quad.max_panels)
        throw std::runtime_error(
            "oscillatory_breakpoints: delta_t needs " +
            std::to_string(pts.size()) + " panels, budget is " +
            std::to_string(quad.max_panels));
    return pts;
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, const QuadratureSpec& quad) {
    quad.validate();
    AdaptiveState st{f, quad};
    return adaptive_rec(st, a, b, gl_panel(f, a, b), 0);
}

double lamb_shift_pv(double epsilon, const ChainParams& params,
                     const QuadratureSpec& quad) {
    quad.validate();
    const double wc = params.omega_c;
    const double tail = 40.0 * wc;
    auto f = [epsilon, wc](double w) {
        return spectral_density(w, wc) / (epsilon - w);
    };
    if (epsilon <= 0.0 || epsilon >= tail)
        return integrate_adaptive(f, 0.0, tail, quad);
    const double h0 = quad.pv_excision * std::max(1.0, std::abs(epsilon));
    double excised[3];
    for (int k = 0; k < 3; ++k) {
        const double h = h0 / static_cast<double>(1 << k);
        excised[k] = integrate_adaptive(f, 0.0, epsilon - h, quad) +
                     integrate_adaptive(f, epsilon + h, tail, quad);
    }
    // leading excision error is linear in the half-width, next is cubic
    const double r1 = 2.0 * excised[1] - excised[0];
    const double r2 = 2.0 * excised[2] - excised[1];
    return (8.0 * r2 - r1) / 7.0;
}

}  // namespace oqs
