// Command-line surface. One verb per run:
//
//   sample-beta    draws from the potential family nu^{W,theta}
//   sample-u       draws of the mixing field (u, gamma)
//   couple-u       coupled mixing fields u(i0, .) across base vertices
//   simulate-vrjp  event log of VRJP trajectories up to a Z-scale horizon
//   simulate-errw  discrete edge-reinforced walks
//   magic-sample   draws from the normalized edge-variable measure
//   magic-density  density of that measure at a point
//   path-prob      closed-form ERRW path probability
//   density-nu     density of nu^{W,theta} at a point
//   density-q      density of Q^{W,phi} at a field value
//   verify         acceptance suites
//
// Conventions: --seed is mandatory on every randomized verb; draw k always
// uses substream k of the master seed, so outputs are byte-identical for any
// --jobs value. Every sampling verb writes a <output>.meta.json sidecar with
// the full configuration. Exit codes: 0 success, 1 verification failure,
// 2 usage error.

#include "mvig/acceptance.hpp"
#include "mvig/beta_family.hpp"
#include "mvig/graph.hpp"
#include "mvig/io.hpp"
#include "mvig/magic_measure.hpp"
#include "mvig/mixing_field.hpp"
#include "mvig/parallel.hpp"
#include "mvig/rng.hpp"
#include "mvig/simulate.hpp"
#include "mvig/stats.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace mvig;

// A vector parameter accepted inline ("--theta 1,2,3") or from a file of
// whitespace-separated numbers; the two spellings exclude each other.
struct VectorArg {
    std::string inline_text;
    std::string file;

    bool given() const { return !inline_text.empty() || !file.empty(); }

    std::vector<double> resolve(const char* what) const {
        if (!inline_text.empty()) return parse_double_list(inline_text);
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in)
                throw std::invalid_argument(std::string("cannot open ") +
                                            what + " file: " + file);
            std::vector<double> out;
            double v;
            while (in >> v) out.push_back(v);
            if (out.empty())
                throw std::invalid_argument(std::string("empty ") + what +
                                            " file: " + file);
            return out;
        }
        throw std::invalid_argument(std::string("missing --") + what);
    }
};

void add_vector_arg(CLI::App* cmd, const std::string& name, VectorArg& arg,
                    const std::string& desc) {
    auto* inl = cmd->add_option("--" + name, arg.inline_text,
                                desc + " (comma-separated)");
    auto* fil = cmd->add_option("--" + name + "-file", arg.file,
                                desc + " (file, whitespace-separated)");
    inl->excludes(fil);
    fil->excludes(inl);
}

nlohmann::json vec_json(const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(x);
    return a;
}

nlohmann::json identity_ordering_json(int n) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < n; ++i) a.push_back(i);
    return a;
}

nlohmann::json base_meta(const std::string& command,
                         const std::string& graph_path, const Network& net,
                         std::uint64_t seed, long draws, int jobs,
                         const std::string& out_path) {
    return nlohmann::json{
        {"command", command},
        {"graph", graph_path},
        {"vertices", net.size()},
        {"edges", net.edges().size()},
        {"seed", seed},
        {"draws", draws},
        {"jobs", jobs},
        {"substream", "draw k uses Rng(seed).stream(k)"},
        {"output", out_path}};
}

std::string scalar(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// --- sampling verbs ---------------------------------------------------------

void run_sample_beta(const std::string& graph_path, const VectorArg& theta_arg,
                     long n_draws, std::uint64_t seed, int jobs,
                     const std::string& out_opt) {
    const Network net = load_network(graph_path);
    const FamilyParams params(net, theta_arg.resolve("theta"));
    const std::string out = resolve_output_path(out_opt, "beta_samples.csv");

    std::vector<std::vector<double>> draws(n_draws);
    const Rng master(seed);
    parallel_for(n_draws, jobs, [&](std::size_t k) {
        Rng rng = master.stream(k);
        draws[k] = sample_beta(params, rng);
    });

    std::vector<std::string> header;
    for (int i = 0; i < net.size(); ++i)
        header.push_back("beta_" + std::to_string(i));
    CsvWriter csv(out, header);
    for (const auto& row : draws) csv.row(row);

    nlohmann::json meta =
        base_meta("sample-beta", graph_path, net, seed, n_draws, jobs, out);
    meta["theta"] = vec_json(params.theta);
    meta["ordering"] = identity_ordering_json(net.size());
    write_metadata_sidecar(out, meta);
}

void run_sample_u(const std::string& graph_path, const VectorArg& phi_arg,
                  int base, long n_draws, std::uint64_t seed, int jobs,
                  const std::string& out_opt) {
    const Network net = load_network(graph_path);
    const std::vector<double> phi = phi_arg.resolve("phi");
    const std::string out = resolve_output_path(out_opt, "u_samples.csv");

    std::vector<std::vector<double>> draws(n_draws);
    const Rng master(seed);
    parallel_for(n_draws, jobs, [&](std::size_t k) {
        Rng rng = master.stream(k);
        const USample s = sample_u(net, phi, base, rng);
        draws[k] = s.u;
        draws[k].push_back(s.gamma);
    });

    std::vector<std::string> header;
    for (int i = 0; i < net.size(); ++i)
        header.push_back("u_" + std::to_string(i));
    header.push_back("gamma");
    CsvWriter csv(out, header);
    for (const auto& row : draws) csv.row(row);

    nlohmann::json meta =
        base_meta("sample-u", graph_path, net, seed, n_draws, jobs, out);
    meta["phi"] = vec_json(phi);
    meta["base"] = base;
    meta["ordering"] = identity_ordering_json(net.size());
    write_metadata_sidecar(out, meta);
}

void run_couple_u(const std::string& graph_path, const VectorArg& theta_arg,
                  const std::string& bases_text, long n_draws,
                  std::uint64_t seed, int jobs, const std::string& out_opt) {
    const Network net = load_network(graph_path);
    const FamilyParams params(net, theta_arg.resolve("theta"));
    std::vector<int> bases;
    if (bases_text.empty())
        for (int i = 0; i < net.size(); ++i) bases.push_back(i);
    else
        bases = parse_int_list(bases_text);
    for (int b : bases)
        if (b < 0 || b >= net.size())
            throw std::invalid_argument("couple-u: base vertex out of range");
    const std::string out = resolve_output_path(out_opt, "coupled_u.csv");

    std::vector<std::vector<double>> draws(n_draws);
    const Rng master(seed);
    parallel_for(n_draws, jobs, [&](std::size_t k) {
        Rng rng = master.stream(k);
        const std::vector<double> beta = sample_beta(params, rng);
        const auto rows = couple_u_fields(net, beta);
        for (int b : bases)
            draws[k].insert(draws[k].end(), rows[b].begin(), rows[b].end());
    });

    std::vector<std::string> header;
    for (int b : bases)
        for (int j = 0; j < net.size(); ++j)
            header.push_back("u_" + std::to_string(b) + "_" +
                             std::to_string(j));
    CsvWriter csv(out, header);
    for (const auto& row : draws) csv.row(row);

    nlohmann::json meta =
        base_meta("couple-u", graph_path, net, seed, n_draws, jobs, out);
    meta["theta"] = vec_json(params.theta);
    meta["bases"] = bases;
    meta["ordering"] = identity_ordering_json(net.size());
    write_metadata_sidecar(out, meta);
}

void run_simulate_vrjp(const std::string& graph_path, const VectorArg& phi_arg,
                       int base, double t_end, long n_traj,
                       int snapshot_every, std::uint64_t seed, int jobs,
                       const std::string& out_opt) {
    const Network net = load_network(graph_path);
    const std::vector<double> phi = phi_arg.resolve("phi");
    if (!(t_end > 0.0))
        throw std::invalid_argument("simulate-vrjp: --t-end must be > 0");
    const std::string out = resolve_output_path(out_opt, "vrjp_events.csv");

    struct TrajOut {
        std::vector<std::string> rows;
        double t_final = 0.0;
        std::vector<double> ell;
    };
    std::vector<TrajOut> results(n_traj);
    const Rng master(seed);
    const int n = net.size();

    parallel_for(n_traj, jobs, [&](std::size_t k) {
        Rng rng = master.stream(k);
        const VrjpRun run = simulate_vrjp_z(net, phi, base, {t_end}, rng);
        TrajOut& res = results[k];
        res.t_final = run.trajectory.t_final;
        res.ell = run.snapshots.back().ell;

        std::vector<double> local = phi;
        int vertex = base;
        double prev = 0.0;
        long step = 0;
        auto emit = [&](double time) {
            std::ostringstream line;
            line << k << ',' << step << ',' << format_double(time) << ','
                 << vertex;
            if (snapshot_every > 0) {
                const bool snap = step % snapshot_every == 0;
                for (int i = 0; i < n; ++i) {
                    line << ',';
                    if (snap) line << format_double(local[i]);
                }
            }
            res.rows.push_back(line.str());
        };
        emit(0.0);
        for (const JumpEvent& e : run.trajectory.jumps) {
            local[vertex] += e.time - prev;
            prev = e.time;
            vertex = e.to;
            ++step;
            emit(e.time);
        }
    });

    std::vector<std::string> header{"traj", "step", "time", "vertex"};
    if (snapshot_every > 0)
        for (int i = 0; i < n; ++i) header.push_back("L_" + std::to_string(i));
    CsvWriter csv(out, header);
    for (const TrajOut& res : results)
        for (const std::string& line : res.rows) csv.raw_row(line);

    nlohmann::json meta = base_meta("simulate-vrjp", graph_path, net, seed,
                                    n_traj, jobs, out);
    meta["phi"] = vec_json(phi);
    meta["base"] = base;
    meta["t_end"] = t_end;
    meta["snapshot_every"] = snapshot_every;
    nlohmann::json finals = nlohmann::json::array();
    for (const TrajOut& res : results)
        finals.push_back(nlohmann::json{{"t_final", res.t_final},
                                        {"ell", vec_json(res.ell)}});
    meta["trajectories"] = std::move(finals);
    write_metadata_sidecar(out, meta);
}

void run_simulate_errw(const std::string& graph_path, const VectorArg& a_arg,
                       int base, int steps, long n_walks, std::uint64_t seed,
                       int jobs, const std::string& out_opt) {
    const Network net = load_network(graph_path);
    const std::vector<double> a = a_arg.resolve("a");
    if (steps < 1)
        throw std::invalid_argument("simulate-errw: --steps must be >= 1");
    const std::string out = resolve_output_path(out_opt, "errw_walks.csv");

    std::vector<std::vector<int>> walks(n_walks);
    const Rng master(seed);
    parallel_for(n_walks, jobs, [&](std::size_t k) {
        Rng rng = master.stream(k);
        walks[k] = run_errw(net, a, base, steps, rng);
    });

    CsvWriter csv(out, {"walk", "step", "vertex"});
    for (long k = 0; k < n_walks; ++k)
        for (std::size_t s = 0; s < walks[k].size(); ++s) {
            std::ostringstream line;
            line << k << ',' << s << ',' << walks[k][s];
            csv.raw_row(line.str());
        }

    nlohmann::json meta = base_meta("simulate-errw", graph_path, net, seed,
                                    n_walks, jobs, out);
    meta["a"] = vec_json(a);
    meta["base"] = base;
    meta["steps"] = steps;
    write_metadata_sidecar(out, meta);
}

void run_magic_sample(const std::string& graph_path, const VectorArg& a_arg,
                      int base, int ref_edge, long n_draws, std::uint64_t seed,
                      int jobs, const std::string& out_opt) {
    const Network net = load_network(graph_path);
    const std::vector<double> a = a_arg.resolve("a");
    const std::string out = resolve_output_path(out_opt, "magic_samples.csv");

    std::vector<std::vector<double>> draws(n_draws);
    const Rng master(seed);
    parallel_for(n_draws, jobs, [&](std::size_t k) {
        Rng rng = master.stream(k);
        draws[k] = sample_magic_point(net, a, base, ref_edge, rng);
    });

    std::vector<std::string> header;
    for (std::size_t e = 0; e < net.edges().size(); ++e)
        header.push_back("y_" + std::to_string(e));
    CsvWriter csv(out, header);
    for (const auto& row : draws) csv.row(row);

    nlohmann::json meta = base_meta("magic-sample", graph_path, net, seed,
                                    n_draws, jobs, out);
    meta["a"] = vec_json(a);
    meta["base"] = base;
    meta["ref_edge"] = ref_edge;
    write_metadata_sidecar(out, meta);
}

// --- verify ------------------------------------------------------------------

int run_verify(const std::string& suite, std::uint64_t seed,
               const std::string& out_opt) {
    const SuiteSpec& spec = find_suite(suite);
    const std::string out = resolve_output_path(out_opt, "verify_report.json");

    std::vector<CriterionResult> results;
    bool all_ok = true;
    for (int id : spec.criteria) {
        CriterionResult c = run_criterion(id, seed);
        for (const TestReport& r : c.reports)
            std::cout << format_report_line(r) << "\n";
        std::cout.flush();
        all_ok = all_ok && c.passed();
        results.push_back(std::move(c));
    }
    std::ofstream report(out);
    if (!report)
        throw std::invalid_argument("cannot open report file: " + out);
    report << results_to_json(suite, seed, results).dump(2) << "\n";

    int tests = 0;
    for (const CriterionResult& c : results)
        tests += static_cast<int>(c.reports.size());
    std::cout << (all_ok ? "PASS" : "FAIL") << "  suite " << suite << ": "
              << results.size() << " criteria, " << tests
              << " tests, report " << out << "\n";
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reinforced-walk potential family: samplers, simulators, "
                 "densities, verification"};
    app.require_subcommand(1);

    int exit_code = 0;

    // shared option storage; each verb reads only what it registered
    std::string graph_path, out_path, bases_text, path_text, suite = "all";
    VectorArg theta, phi, a_vec, beta_point, u_point, y_point;
    std::uint64_t seed = 0;
    long n_draws = 1;
    int jobs = 1, base = 0, ref_edge = 0, steps = 100, snapshot_every = 0;
    double t_end = 1e4;

    auto add_graph = [&](CLI::App* cmd) {
        cmd->add_option("--graph", graph_path, "graph spec (JSON)")
            ->required();
    };
    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "master seed (mandatory)")
            ->required();
    };
    auto add_common_sampling = [&](CLI::App* cmd, const char* what) {
        add_graph(cmd);
        add_seed(cmd);
        cmd->add_option("--n", n_draws, what)->check(CLI::PositiveNumber);
        cmd->add_option("--jobs", jobs, "worker threads (output unchanged)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--out", out_path, "output CSV path");
    };

    auto* sb = app.add_subcommand("sample-beta",
                                  "draw from the potential family");
    add_common_sampling(sb, "number of draws");
    add_vector_arg(sb, "theta", theta, "family parameters");
    sb->callback([&] {
        run_sample_beta(graph_path, theta, n_draws, seed, jobs, out_path);
    });

    auto* su = app.add_subcommand("sample-u", "draw the mixing field");
    add_common_sampling(su, "number of draws");
    add_vector_arg(su, "phi", phi, "initial local times");
    su->add_option("--base", base, "base vertex i0");
    su->callback([&] {
        run_sample_u(graph_path, phi, base, n_draws, seed, jobs, out_path);
    });

    auto* cu = app.add_subcommand(
        "couple-u", "coupled mixing fields from one potential draw");
    add_common_sampling(cu, "number of draws");
    add_vector_arg(cu, "theta", theta, "family parameters");
    cu->add_option("--bases", bases_text,
                   "base vertices (comma-separated; default all)");
    cu->callback([&] {
        run_couple_u(graph_path, theta, bases_text, n_draws, seed, jobs,
                     out_path);
    });

    auto* sv = app.add_subcommand("simulate-vrjp",
                                  "event log of VRJP trajectories");
    add_common_sampling(sv, "number of trajectories");
    add_vector_arg(sv, "phi", phi, "initial local times");
    sv->add_option("--base", base, "start vertex");
    sv->add_option("--t-end", t_end, "Z-scale horizon (default 1e4)");
    sv->add_option("--snapshot-every", snapshot_every,
                   "emit local times every k events (0 = off)");
    sv->callback([&] {
        run_simulate_vrjp(graph_path, phi, base, t_end, n_draws,
                          snapshot_every, seed, jobs, out_path);
    });

    auto* se = app.add_subcommand("simulate-errw",
                                  "discrete edge-reinforced walks");
    add_common_sampling(se, "number of walks");
    add_vector_arg(se, "a", a_vec, "initial edge weights");
    se->add_option("--base", base, "start vertex");
    se->add_option("--steps", steps, "steps per walk");
    se->callback([&] {
        run_simulate_errw(graph_path, a_vec, base, steps, n_draws, seed, jobs,
                          out_path);
    });

    auto* ms = app.add_subcommand("magic-sample",
                                  "draw normalized edge variables");
    add_common_sampling(ms, "number of draws");
    add_vector_arg(ms, "a", a_vec, "initial edge weights");
    ms->add_option("--base", base, "base vertex i0");
    ms->add_option("--ref-edge", ref_edge, "normalizing edge index");
    ms->callback([&] {
        run_magic_sample(graph_path, a_vec, base, ref_edge, n_draws, seed,
                         jobs, out_path);
    });

    auto* md = app.add_subcommand("magic-density",
                                  "edge-variable density at a point");
    add_graph(md);
    add_vector_arg(md, "a", a_vec, "initial edge weights");
    md->add_option("--base", base, "base vertex i0");
    md->add_option("--ref-edge", ref_edge, "normalizing edge index");
    add_vector_arg(md, "y", y_point, "edge variables (y[ref-edge] = 1)");
    md->callback([&] {
        const Network net = load_network(graph_path);
        const double logf = log_density_magic(
            net, a_vec.resolve("a"), base, ref_edge, y_point.resolve("y"));
        std::cout << scalar(std::exp(logf)) << "\n";
    });

    auto* pp = app.add_subcommand("path-prob",
                                  "closed-form ERRW path probability");
    add_graph(pp);
    add_vector_arg(pp, "a", a_vec, "initial edge weights");
    pp->add_option("--path", path_text, "vertex path, e.g. 0,1,0")
        ->required();
    pp->callback([&] {
        const Network net = load_network(graph_path);
        const std::vector<int> path = parse_int_list(path_text);
        if (path.empty()) throw std::invalid_argument("path-prob: empty path");
        std::cout << scalar(path_probability_closed(net, a_vec.resolve("a"),
                                                    path.front(), path))
                  << "\n";
    });

    auto* dn = app.add_subcommand("density-nu",
                                  "potential-family density at a point");
    add_graph(dn);
    add_vector_arg(dn, "theta", theta, "family parameters");
    add_vector_arg(dn, "beta", beta_point, "potential point");
    dn->callback([&] {
        const Network net = load_network(graph_path);
        const FamilyParams params(net, theta.resolve("theta"));
        std::cout << scalar(std::exp(
                         log_density_nu(params, beta_point.resolve("beta"))))
                  << "\n";
    });

    auto* dq = app.add_subcommand("density-q",
                                  "mixing-field density at a point");
    add_graph(dq);
    add_vector_arg(dq, "phi", phi, "initial local times");
    dq->add_option("--base", base, "base vertex i0");
    add_vector_arg(dq, "u", u_point, "field value (u[base] = 0)");
    dq->callback([&] {
        const Network net = load_network(graph_path);
        const std::vector<double> u = u_point.resolve("u");
        if (base >= 0 && base < static_cast<int>(u.size()) &&
            u[static_cast<std::size_t>(base)] != 0.0)
            throw std::invalid_argument("density-q: u[base] must be 0");
        std::cout << scalar(std::exp(
                         log_density_q(net, phi.resolve("phi"), base, u)))
                  << "\n";
    });

    auto* vf = app.add_subcommand("verify", "run an acceptance suite");
    vf->add_option("suite", suite,
                   "all | beta-family | bridge | process | errw-magic | graph");
    add_seed(vf);
    vf->add_option("--out", out_path, "report JSON path");
    vf->callback([&] { exit_code = run_verify(suite, seed, out_path); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
