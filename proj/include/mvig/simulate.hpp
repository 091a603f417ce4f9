#pragma once

// Event-driven simulators for the two reinforced processes.
//
// VRJP(W, phi): from vertex i at time t the walker jumps to a neighbor j at
// rate W_ij L_j(t), where L_j(t) = phi_j + (time spent at j up to t). While
// the walker sits at i the rates toward its neighbors are constant (only L_i
// grows, and it does not drive i's own out-rates), so holding times are
// exactly exponential and no discretization is involved.
//
// The time change D(t) = sum_i (L_i(t)^2 - phi_i^2) maps the process to its
// exchangeable version Z; Z-scale local times are read off exactly via
// ell_i(D(t)) = L_i(t)^2 - phi_i^2. Appendix-style rescaling to unit initial
// local times is the deterministic clock s -> A(s) = sum_i (L_i(s)/phi_i - 1).
//
// ERRW(a): discrete-time edge-reinforced walk, crossing probability
// proportional to a_e + (number of previous crossings of e).

#include "mvig/graph.hpp"
#include "mvig/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mvig {

// Walker state in the Y time scale. local[j] = L_j(t).
struct VrjpState {
    int current = 0;
    double t = 0.0;
    std::vector<double> phi;
    std::vector<double> local;
};

inline VrjpState vrjp_start(const Network& net, const std::vector<double>& phi,
                            int i0) {
    if (static_cast<int>(phi.size()) != net.size())
        throw std::invalid_argument("vrjp: |phi| != |V|");
    for (double v : phi)
        if (!(v > 0.0)) throw std::invalid_argument("vrjp: phi must be > 0");
    if (i0 < 0 || i0 >= net.size())
        throw std::invalid_argument("vrjp: start vertex out of range");
    return {i0, 0.0, phi, phi};
}

// Current jump rates out of the walker's vertex: rate toward j is
// W_{current,j} L_j(t), constant until the next jump.
inline std::vector<std::pair<int, double>> vrjp_jump_rates(
    const VrjpState& state, const Network& net) {
    std::vector<std::pair<int, double>> rates;
    for (auto [j, w] : net.neighbors(state.current))
        rates.push_back({j, w * state.local[j]});
    return rates;
}

// One event: exponential holding time at the current vertex, then a
// categorical jump proportional to the rates above.
inline void vrjp_step(VrjpState& state, const Network& net, Rng& rng) {
    double rate = 0.0;
    for (auto [j, w] : net.neighbors(state.current))
        rate += w * state.local[j];
    const double hold = rng.exponential(rate);
    state.local[state.current] += hold;
    state.t += hold;
    double pick = rng.uniform() * rate;
    int next = -1;
    for (auto [j, w] : net.neighbors(state.current)) {
        pick -= w * state.local[j];
        if (pick <= 0.0) {
            next = j;
            break;
        }
    }
    if (next < 0) next = net.neighbors(state.current).back().first;
    state.current = next;
}

// D(t) = sum_i (L_i(t)^2 - phi_i^2), the clock of the exchangeable process.
inline double time_change_d(const VrjpState& state) {
    double d = 0.0;
    for (std::size_t i = 0; i < state.local.size(); ++i)
        d += state.local[i] * state.local[i] - state.phi[i] * state.phi[i];
    return d;
}

// Total jump rates of the quenched Markov process given a mixing field u:
// rate i -> j is (1/2) W_ij e^{u_j - u_i}; entry i sums these over j.
inline std::vector<double> quenched_jump_rates(const Network& net,
                                               const std::vector<double>& u) {
    std::vector<double> out(net.size(), 0.0);
    for (int i = 0; i < net.size(); ++i)
        for (auto [j, w] : net.neighbors(i))
            out[i] += 0.5 * w * std::exp(u[j] - u[i]);
    return out;
}

// One step of the quenched jump chain: from i, next vertex has probability
// proportional to W_ij e^{u_j} (the e^{-u_i} factor cancels).
inline int quenched_chain_step(const Network& net, const std::vector<double>& u,
                               int current, Rng& rng) {
    double total = 0.0;
    for (auto [j, w] : net.neighbors(current)) total += w * std::exp(u[j]);
    double pick = rng.uniform() * total;
    for (auto [j, w] : net.neighbors(current)) {
        pick -= w * std::exp(u[j]);
        if (pick <= 0.0) return j;
    }
    return net.neighbors(current).back().first;
}

struct JumpEvent {
    double time = 0.0; // Y-scale time at which the jump happens
    int to = 0;
};

struct VrjpTrajectory {
    int start = 0;
    std::vector<double> phi;
    std::vector<JumpEvent> jumps;
    double t_final = 0.0;

    int vertex_at(double t) const {
        int v = start;
        for (const JumpEvent& e : jumps) {
            if (e.time > t) break;
            v = e.to;
        }
        return v;
    }
};

// L_j(t) = phi_j + occupation time of j up to t (Y scale).
inline std::vector<double> local_times_at(const VrjpTrajectory& traj,
                                          double t) {
    std::vector<double> local = traj.phi;
    int v = traj.start;
    double prev = 0.0;
    for (const JumpEvent& e : traj.jumps) {
        if (e.time >= t) break;
        local[v] += e.time - prev;
        prev = e.time;
        v = e.to;
    }
    local[v] += t - prev;
    return local;
}

// D(t) = sum_i (L_i(t)^2 - phi_i^2).
inline double time_change_d(const VrjpTrajectory& traj, double t) {
    const std::vector<double> local = local_times_at(traj, t);
    double d = 0.0;
    for (std::size_t i = 0; i < local.size(); ++i)
        d += local[i] * local[i] - traj.phi[i] * traj.phi[i];
    return d;
}

// Z-scale local-time record: ell_i = L_i^2 - phi_i^2 at the time the clock
// D(t) crosses t_z. sum_i ell_i = t_z exactly.
struct ZSnapshot {
    double t_z = 0.0;
    std::vector<double> ell;
};

struct VrjpRun {
    VrjpTrajectory trajectory;
    std::vector<ZSnapshot> snapshots;
};

namespace detail {

inline void check_phi_positive(const Network& net,
                               const std::vector<double>& phi) {
    if (static_cast<int>(phi.size()) != net.size())
        throw std::invalid_argument("vrjp: |phi| != |V|");
    for (double v : phi)
        if (!(v > 0.0)) throw std::invalid_argument("vrjp: phi must be > 0");
}

} // namespace detail

// Simulate VRJP(W, phi) from i0 until the exchangeable clock D(t) reaches the
// largest entry of z_marks (sorted ascending), recording a Z-scale local-time
// snapshot at every mark. The crossing inside a holding interval is solved
// exactly: while sitting at i, D grows by (L_i + s)^2 - L_i^2.
inline VrjpRun simulate_vrjp_z(const Network& net,
                               const std::vector<double>& phi, int i0,
                               const std::vector<double>& z_marks, Rng& rng) {
    detail::check_phi_positive(net, phi);
    if (i0 < 0 || i0 >= net.size())
        throw std::invalid_argument("vrjp: start vertex out of range");
    if (z_marks.empty())
        throw std::invalid_argument("vrjp: need at least one z mark");

    VrjpRun run;
    run.trajectory.start = i0;
    run.trajectory.phi = phi;

    std::vector<double> local = phi;
    int current = i0;
    double t = 0.0;
    double d = 0.0;
    std::size_t next_mark = 0;

    while (next_mark < z_marks.size()) {
        double rate = 0.0;
        for (auto [j, w] : net.neighbors(current)) rate += w * local[j];
        const double hold = rng.exponential(rate);

        // D at the end of this holding interval if no mark intervenes.
        const double d_end =
            d + (local[current] + hold) * (local[current] + hold) -
            local[current] * local[current];
        while (next_mark < z_marks.size() && z_marks[next_mark] <= d_end) {
            const double target = z_marks[next_mark];
            // solve (L + s)^2 - L^2 = target - d for s in [0, hold]
            const double s =
                std::sqrt(local[current] * local[current] + (target - d)) -
                local[current];
            ZSnapshot snap;
            snap.t_z = target;
            snap.ell.resize(local.size());
            for (std::size_t i = 0; i < local.size(); ++i)
                snap.ell[i] = local[i] * local[i] - phi[i] * phi[i];
            snap.ell[current] = (local[current] + s) * (local[current] + s) -
                                phi[current] * phi[current];
            run.snapshots.push_back(std::move(snap));
            ++next_mark;
        }
        if (next_mark >= z_marks.size()) {
            // end the trajectory exactly at the last mark's crossing time
            const double target = z_marks.back();
            const double s =
                std::sqrt(local[current] * local[current] + (target - d)) -
                local[current];
            run.trajectory.t_final = t + s;
            break;
        }

        local[current] += hold;
        t += hold;
        d = d_end;

        double pick = rng.uniform() * rate;
        int next = -1;
        for (auto [j, w] : net.neighbors(current)) {
            pick -= w * local[j];
            if (pick <= 0.0) {
                next = j;
                break;
            }
        }
        if (next < 0) next = net.neighbors(current).back().first;
        run.trajectory.jumps.push_back({t, next});
        current = next;
    }
    return run;
}

// Simulate a fixed number of jumps (used for jump-chain comparisons).
inline VrjpTrajectory simulate_vrjp_events(const Network& net,
                                           const std::vector<double>& phi,
                                           int i0, int n_jumps, Rng& rng) {
    VrjpState state = vrjp_start(net, phi, i0);
    VrjpTrajectory traj;
    traj.start = i0;
    traj.phi = phi;
    for (int k = 0; k < n_jumps; ++k) {
        vrjp_step(state, net, rng);
        traj.jumps.push_back({state.t, state.current});
    }
    traj.t_final = state.t;
    return traj;
}

// Plug-in estimator of the mixing field from a Z-scale local-time record:
//   U_i = (1/2) [ log(ell_i + phi_i^2) - log(ell_{i0} + phi_{i0}^2) ],
// the log ratio of effective local times sqrt(phi^2 + ell). Its limit is the
// field with quenched rates (1/2) W_ij e^{U_j - U_i}, which agrees in law
// with the Green-ratio field of the potential family at theta = phi^2.
// Normalizing each term by phi_i^2 before taking logs would instead estimate
// the field of the unit-initial-condition process with weights W phi_i phi_j,
// shifted by log(phi_{i0}/phi_i) per coordinate.
inline std::vector<double> estimate_u(const std::vector<double>& ell,
                                      const std::vector<double>& phi, int i0) {
    if (ell.size() != phi.size())
        throw std::invalid_argument("estimate_u: size mismatch");
    const double base = std::log(ell[i0] + phi[i0] * phi[i0]);
    std::vector<double> u(ell.size());
    for (std::size_t i = 0; i < ell.size(); ++i)
        u[i] = 0.5 * (std::log(ell[i] + phi[i] * phi[i]) - base);
    return u;
}

// Deterministic clock of the reduction to unit initial local times:
//   A(s) = sum_i (L_i(s) / phi_i - 1),
// piecewise linear with slope 1/phi_{current}. The rescaled trajectory
// (same jump targets, times mapped through A, phi = 1) is a realization of
// VRJP(W^phi, 1) with W^phi_ij = W_ij phi_i phi_j.
inline VrjpTrajectory time_rescale_phi(const VrjpTrajectory& traj) {
    VrjpTrajectory out;
    out.start = traj.start;
    out.phi.assign(traj.phi.size(), 1.0);

    int v = traj.start;
    double prev = 0.0;
    double a = 0.0;
    for (const JumpEvent& e : traj.jumps) {
        a += (e.time - prev) / traj.phi[v];
        out.jumps.push_back({a, e.to});
        prev = e.time;
        v = e.to;
    }
    a += (traj.t_final - prev) / traj.phi[v];
    out.t_final = a;
    return out;
}

// --- Edge-reinforced random walk -------------------------------------------

struct ErrwState {
    int current = 0;
    std::vector<double> z; // a_e + crossings so far, indexed like net.edges()
};

inline ErrwState errw_start(const Network& net, const std::vector<double>& a,
                            int start) {
    if (static_cast<int>(a.size()) != static_cast<int>(net.edges().size()))
        throw std::invalid_argument("errw: |a| != |E|");
    for (double v : a)
        if (!(v > 0.0)) throw std::invalid_argument("errw: a must be > 0");
    if (start < 0 || start >= net.size())
        throw std::invalid_argument("errw: start vertex out of range");
    return {start, a};
}

inline int errw_step(const Network& net, ErrwState& state, Rng& rng) {
    double total = 0.0;
    for (auto [j, w] : net.neighbors(state.current))
        total += state.z[net.edge_index(state.current, j)];
    double pick = rng.uniform() * total;
    int next = -1;
    for (auto [j, w] : net.neighbors(state.current)) {
        pick -= state.z[net.edge_index(state.current, j)];
        if (pick <= 0.0) {
            next = j;
            break;
        }
    }
    if (next < 0) next = net.neighbors(state.current).back().first;
    state.z[net.edge_index(state.current, next)] += 1.0;
    state.current = next;
    return next;
}

inline std::vector<int> run_errw(const Network& net,
                                 const std::vector<double>& a, int start,
                                 int steps, Rng& rng) {
    ErrwState state = errw_start(net, a, start);
    std::vector<int> path;
    path.reserve(steps + 1);
    path.push_back(start);
    for (int k = 0; k < steps; ++k) path.push_back(errw_step(net, state, rng));
    return path;
}

// Probability that ERRW(a) follows exactly the given vertex path, as the
// product of one-step conditional probabilities.
inline double errw_path_probability_direct(const Network& net,
                                           const std::vector<double>& a,
                                           const std::vector<int>& path) {
    if (path.empty()) throw std::invalid_argument("errw: empty path");
    std::vector<double> z = a;
    double prob = 1.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const int i = path[k];
        const int j = path[k + 1];
        const int e = net.edge_index(i, j);
        if (e < 0) throw std::invalid_argument("errw: path uses a non-edge");
        double total = 0.0;
        for (auto [v, w] : net.neighbors(i))
            total += z[net.edge_index(i, v)];
        prob *= z[e] / total;
        z[e] += 1.0;
    }
    return prob;
}

} // namespace mvig
