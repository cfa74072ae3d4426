#include "optostirling/engine.hpp"

#include "optostirling/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optostirling {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

constexpr int kMinStepsPerInterval = 8;

// Coefficients on one schedule interval, linear in t.
struct Interval {
    double t0, h;
    double rate0, drate;  // gamma + Gamma_m
    double nm0, dnm;
    double dm0, ddm;

    [[nodiscard]] double rate(double t) const { return rate0 + drate * (t - t0) / h; }
    [[nodiscard]] double nm(double t) const { return nm0 + dnm * (t - t0) / h; }
    [[nodiscard]] double dm(double t) const { return dm0 + ddm * (t - t0) / h; }
    [[nodiscard]] double rhs(double t, double n) const { return -rate(t) * (n - nm(t)); }
    [[nodiscard]] double heat_rate(double t, double n) const { return rate(t) * (1.0 + dm(t)) * (nm(t) - n); }
    [[nodiscard]] double dm_slope() const { return ddm / h; }
};

Interval make_interval(const Schedule& s, std::size_t k) {
    const auto& a = s.samples[k];
    const auto& b = s.samples[k + 1];
    return {a.t,
            b.t - a.t,
            s.gamma + a.Gamma_m,
            b.Gamma_m - a.Gamma_m,
            a.n_m,
            b.n_m - a.n_m,
            a.Delta_m,
            b.Delta_m - a.Delta_m};
}

void push_step(Trajectory& tr, const Interval& iv, double t_prev, double n_prev, double t, double n) {
    const TrajectorySample& last = tr.samples.back();
    double dt = t - t_prev;
    double dq = 0.5 * dt * (iv.heat_rate(t_prev, n_prev) + iv.heat_rate(t, n));
    double dwx = 0.5 * dt * iv.dm_slope() * (n_prev + n);
    TrajectorySample smp;
    smp.t = t;
    smp.n_b = n;
    smp.U = (1.0 + iv.dm(t)) * n;
    smp.Q_cum = last.Q_cum + dq;
    smp.Wx_cum = last.Wx_cum + dwx;
    smp.W_cum = smp.U - tr.samples.front().U - smp.Q_cum;
    tr.samples.push_back(smp);
}

}  // namespace

Trajectory integrate_schedule(const Schedule& s, double n_b0, double ode_tol) {
    if (s.samples.empty()) throw ConfigError("empty schedule");
    if (!(ode_tol > 0.0)) throw ConfigError("ode_tol must be > 0");
    Trajectory tr;
    TrajectorySample first;
    first.t = s.samples.front().t;
    first.n_b = n_b0;
    first.U = (1.0 + s.samples.front().Delta_m) * n_b0;
    tr.samples.push_back(first);
    tr.schedule_nodes.push_back(0);

    double n = n_b0;
    double h = 0.0;
    for (std::size_t k = 0; k + 1 < s.samples.size(); ++k) {
        if (!(s.samples[k + 1].t > s.samples[k].t)) {
            tr.schedule_nodes.push_back(tr.samples.size() - 1);
            continue;
        }
        const Interval iv = make_interval(s, k);
        const double t_end = s.samples[k + 1].t;
        // The heat and work quadratures run on this mesh, so keep a few
        // points per interval even where the solution is smooth.
        const double h_max = iv.h / kMinStepsPerInterval;
        double t = iv.t0;
        if (h <= 0.0) h = std::min(h_max, 0.1 / std::max(iv.rate(t), 1e-300));
        h = std::min(h, h_max);
        while (t < t_end) {
            bool last_step = false;
            if (t + h >= t_end || t_end - (t + h) < 1e-12 * iv.h) {
                h = t_end - t;
                last_step = true;
            }
            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw StepFailure("step size underflow at t = " + format_double(t));
            double k1 = iv.rhs(t, n);
            double k2 = iv.rhs(t + c2 * h, n + h * a21 * k1);
            double k3 = iv.rhs(t + c3 * h, n + h * (a31 * k1 + a32 * k2));
            double k4 = iv.rhs(t + c4 * h, n + h * (a41 * k1 + a42 * k2 + a43 * k3));
            double k5 = iv.rhs(t + c5 * h, n + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            double k6 = iv.rhs(t + h, n + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            double n_new = n + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            double k7 = iv.rhs(t + h, n_new);
            double err = h * std::abs(e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double scale = ode_tol * std::max({std::abs(n), std::abs(n_new), 1.0});
            double ratio = err / scale;
            double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
            if (ratio <= 1.0) {
                double t_new = last_step ? t_end : t + h;
                push_step(tr, iv, t, n, t_new, n_new);
                t = t_new;
                n = n_new;
                if (!last_step) h = std::min(h * factor, h_max);
            } else {
                h *= factor;
            }
            if (!std::isfinite(n)) throw StepFailure("non-finite excitation number at t = " + format_double(t));
        }
        tr.schedule_nodes.push_back(tr.samples.size() - 1);
    }
    return tr;
}

Trajectory run_to_limit_cycle(const Schedule& s, double conv_tol, int max_cycles, double ode_tol) {
    if (s.samples.empty()) throw ConfigError("empty schedule");
    double n0 = s.samples.front().n_m;
    if (max_cycles <= 0) {
        Trajectory tr = integrate_schedule(s, n0, ode_tol);
        tr.cycles_run = 0;
        tr.converged = false;
        return tr;
    }
    std::vector<double> prev(s.samples.size(), n0);
    Trajectory tr;
    for (int c = 1; c <= max_cycles; ++c) {
        tr = integrate_schedule(s, n0, ode_tol);
        tr.cycles_run = c;
        double diff = 0.0, top = 0.0;
        for (std::size_t i = 0; i < s.samples.size(); ++i) {
            double v = tr.samples[tr.schedule_nodes[i]].n_b;
            diff = std::max(diff, std::abs(v - prev[i]));
            top = std::max(top, std::abs(v));
            prev[i] = v;
        }
        tr.periodicity = top > 0 ? diff / top : diff;
        if (tr.periodicity < conv_tol) {
            tr.converged = true;
            return tr;
        }
        n0 = tr.samples.back().n_b;
    }
    return tr;
}

namespace {

// Linear interpolation of a cumulative column at time t within the mesh.
template <class Get>
double at_time(const Trajectory& tr, double t, Get get) {
    const auto& v = tr.samples;
    if (v.empty()) throw ConfigError("empty trajectory");
    if (t < v.front().t || t > v.back().t) throw ConfigError("time " + format_double(t) + " outside the trajectory");
    auto it = std::lower_bound(v.begin(), v.end(), t, [](const TrajectorySample& a, double x) { return a.t < x; });
    if (it->t == t || it == v.begin()) return get(*it);
    const auto& b = *it;
    const auto& a = *(it - 1);
    double w = (t - a.t) / (b.t - a.t);
    return get(a) + w * (get(b) - get(a));
}

}  // namespace

double heat(const Trajectory& traj, const Schedule&, double t_i, double t_f) {
    auto q = [](const TrajectorySample& x) { return x.Q_cum; };
    return at_time(traj, t_f, q) - at_time(traj, t_i, q);
}

double internal_energy_change(const Trajectory& traj, double t_i, double t_f) {
    auto u = [](const TrajectorySample& x) { return x.U; };
    return at_time(traj, t_f, u) - at_time(traj, t_i, u);
}

double work(const Trajectory& traj, const Schedule& s, double t_i, double t_f) {
    return internal_energy_change(traj, t_i, t_f) - heat(traj, s, t_i, t_f);
}

double work_crosscheck(const Trajectory& traj, const Schedule&, double t_i, double t_f) {
    auto w = [](const TrajectorySample& x) { return x.Wx_cum; };
    return at_time(traj, t_f, w) - at_time(traj, t_i, w);
}

EngineReport account(const Trajectory& traj, const Schedule& s) {
    EngineReport r;
    r.t_tot = s.t_tot;
    r.r_T = s.r_T;
    r.levels = s.levels;
    r.converged = traj.converged;
    r.cycles_run = traj.cycles_run;
    r.periodicity = traj.periodicity;
    for (int k = 0; k < 4; ++k) {
        const auto& a = traj.samples[traj.schedule_nodes[s.stroke_begin[k]]];
        const auto& b = traj.samples[traj.schedule_nodes[s.stroke_end[k]]];
        StrokeAccount& st = r.per_stroke[k];
        st.Q = b.Q_cum - a.Q_cum;
        st.dU = b.U - a.U;
        st.W = st.dU - st.Q;
        st.W_check = b.Wx_cum - a.Wx_cum;
        if (st.Q > 0)
            r.Q_abs += st.Q;
        else
            r.Q_rej += st.Q;
        r.W_tot += st.W;
        double denom = std::abs(st.Q) > 0 ? std::abs(st.Q) : 1.0;
        r.max_first_law_residual = std::max(r.max_first_law_residual, std::abs(st.dU - st.Q - st.W_check) / denom);
    }
    r.dU_cycle = traj.samples.back().U - traj.samples.front().U;
    r.eta = r.Q_abs > 0 ? -r.W_tot / r.Q_abs : 0.0;
    r.P = -r.W_tot / s.t_tot;
    r.eta_C = 1.0 - s.levels.T_cold / s.levels.T_hot;
    r.eta_CA = 1.0 - std::sqrt(s.levels.T_cold / s.levels.T_hot);
    return r;
}

EngineReport report(const Trajectory& traj, const Schedule& s) {
    EngineReport r = account(traj, s);
    if (r.W_tot >= 0.0)
        throw NotAnEngine("net work W_tot = " + format_double(r.W_tot) + " >= 0; the cycle extracts no work");
    return r;
}

std::string trajectory_to_csv(const Trajectory& traj, const Provenance& prov) {
    std::ostringstream out;
    out << prov.csv_header();
    out << "t,n_b,U,Q_cum,W_cum\n";
    for (const auto& m : traj.samples) {
        out << format_double(m.t) << ',' << format_double(m.n_b) << ',' << format_double(m.U) << ','
            << format_double(m.Q_cum) << ',' << format_double(m.W_cum) << '\n';
    }
    return out.str();
}

std::string report_to_json(const EngineReport& r, const Provenance& prov) {
    using nlohmann::json;
    json j;
    json pj = json::object();
    for (const auto& [k, v] : prov.entries) pj[k] = v;
    j["provenance"] = pj;
    j["eta"] = r.eta;
    j["P"] = r.P;
    j["Q_abs"] = r.Q_abs;
    j["Q_rej"] = r.Q_rej;
    j["W_tot"] = r.W_tot;
    j["dU_cycle"] = r.dU_cycle;
    j["eta_C"] = r.eta_C;
    j["eta_CA"] = r.eta_CA;
    j["t_tot"] = r.t_tot;
    j["r_T"] = r.r_T;
    j["levels"] = {{"T_hot", r.levels.T_hot},
                   {"T_cold", r.levels.T_cold},
                   {"Delta_m_h", r.levels.Dm_h},
                   {"Delta_m_l", r.levels.Dm_l}};
    j["converged"] = r.converged;
    j["cycles_run"] = r.cycles_run;
    j["periodicity"] = r.periodicity;
    j["max_first_law_residual"] = r.max_first_law_residual;
    json strokes = json::array();
    const char* names[] = {"1-2", "2-3", "3-4", "4-1"};
    for (int k = 0; k < 4; ++k) {
        const auto& s = r.per_stroke[k];
        strokes.push_back({{"stroke", names[k]}, {"Q", s.Q}, {"W", s.W}, {"W_check", s.W_check}, {"dU", s.dU}});
    }
    j["per_stroke"] = strokes;
    return j.dump(1) + "\n";
}

}  // namespace optostirling
