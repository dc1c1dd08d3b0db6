#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "r2r/acceptance.hpp"
#include "r2r/chain.hpp"
#include "r2r/coupling.hpp"
#include "r2r/io.hpp"
#include "r2r/montecarlo.hpp"
#include "r2r/tv_exact.hpp"

namespace r2r::cli {

namespace {

using nlohmann::json;

double sig(double v) { return io::round_sig(v); }

struct CommonOpts {
    std::uint64_t seed = 0;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string format;  // per-subcommand default filled at dispatch
    std::string out_path;
    std::string variant = "amended";
    std::string membership = "self-exclusive";
};

CouplingVariant make_variant(const CommonOpts& c) {
    CouplingVariant v;
    if (c.variant == "strict")
        v.good_time_rule = GoodTimeRule::strict;
    else if (c.variant == "amended")
        v.good_time_rule = GoodTimeRule::amended;
    else
        throw std::invalid_argument("unknown variant '" + c.variant + "'");
    if (c.membership == "literal")
        v.queue_membership = QueueMembership::literal;
    else if (c.membership == "self-exclusive" || c.membership == "self_exclusive")
        v.queue_membership = QueueMembership::self_exclusive;
    else
        throw std::invalid_argument("unknown membership '" + c.membership + "'");
    return v;
}

json params_echo(const std::string& subcommand, const CommonOpts& c) {
    json p;
    p["subcommand"] = subcommand;
    p["seed"] = c.seed;
    p["variant"] = c.variant;
    p["membership"] = c.membership;
    p["threads"] = c.threads;
    return p;
}

std::string params_comment(const json& params) {
    std::string line = "#";
    for (auto it = params.begin(); it != params.end(); ++it)
        line += " " + it.key() + "=" +
                (it.value().is_string() ? it.value().get<std::string>() : it.value().dump());
    return line + "\n";
}

json estimate_json(const mc::EstimateWithCI& e) {
    json j;
    j["point"] = sig(e.point);
    j["ci"] = {sig(e.lo), sig(e.hi)};
    j["samples"] = e.samples;
    j["method"] = e.method;
    return j;
}

void emit(const CommonOpts& c, std::ostream& out, const std::string& text) {
    if (c.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.out_path);
    if (!file) throw std::runtime_error("cannot open output file " + c.out_path);
    file << text;
}

void add_common(CLI::App* cmd, CommonOpts& c, bool randomized) {
    if (randomized) cmd->add_option("--seed", c.seed, "master seed (default 0)");
    cmd->add_option("--threads", c.threads, "worker threads for Monte Carlo estimators");
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", c.out_path, "write the report to a file instead of stdout");
}

void add_variant_flags(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--variant", c.variant, "good-time rule")
        ->check(CLI::IsMember({"strict", "amended"}));
    cmd->add_option("--membership", c.membership, "queue membership test for b")
        ->check(CLI::IsMember({"literal", "self-exclusive", "self_exclusive"}));
}

// ---- eig ----------------------------------------------------------------

int cmd_eig(const CommonOpts& c, std::ostream& out, bool limit, int n,
            const std::string& dump, int l2_kmax) {
    if (c.format == "csv" && dump.empty())
        throw std::invalid_argument("eig reports are JSON; csv applies to --dump");

    if (!dump.empty()) {
        chain::TransitionMatrix m =
            dump == "limit" ? chain::build_c()
            : dump == "ktilde"
                ? chain::build_ktilde(n)
                : chain::scaled_generator(n);
        emit(c, out, c.format == "json" ? io::matrix_to_json(m) + "\n" : io::matrix_to_csv(m));
        return 0;
    }

    json j;
    j["params"] = params_echo("eig", c);
    const chain::BoundConstants consts;
    if (limit) {
        const chain::EigenvalueReport rep =
            chain::second_largest_eigenvalue_report(chain::build_c());
        j["lambda"] = sig(rep.lambda);
        j["method"] = rep.method;
        j["iterations"] = rep.iterations;
        j["residual"] = sig(rep.residual);
        j["below_threshold"] = rep.lambda < -consts.decay_rate;
    } else {
        const chain::EigenvalueReport rep =
            chain::second_largest_eigenvalue_report(chain::scaled_generator(n));
        const chain::EigenvalueReport krep =
            chain::second_largest_eigenvalue_report(chain::build_ktilde(n));
        j["n"] = n;
        j["lambda_scaled_generator"] = sig(rep.lambda);
        j["lambda_ktilde"] = sig(krep.lambda);
        j["method"] = rep.method;
        j["iterations"] = rep.iterations;
        j["residual"] = sig(rep.residual);
        j["max_entry_error_vs_limit"] = sig(chain::verify_limit(n));
    }
    if (l2_kmax > 0) {
        const chain::L2Diagnostic diag =
            chain::l2_ratio_diagnostic(limit ? 100 : n, l2_kmax);
        j["l2_diagnostic"] = {{"sup_ratio", sig(diag.sup_ratio)},
                              {"argmax_k", diag.argmax_k},
                              {"cauchy_schwarz_ok", diag.cauchy_schwarz_ok}};
    }
    emit(c, out, j.dump() + "\n");
    return 0;
}

// ---- tv -----------------------------------------------------------------

int cmd_tv(const CommonOpts& c, std::ostream& out, int n, int t_max, int max_n) {
    const std::vector<double> d = tv::d_exact_curve(n, t_max, max_n);
    const std::vector<double> adj = tv::adjacent_tv_curve(n, t_max, max_n);
    json params = params_echo("tv", c);
    params.erase("seed");
    params.erase("variant");
    params.erase("membership");
    params["n"] = n;
    params["t_max"] = t_max;
    if (c.format == "json") {
        json rows = json::array();
        for (int t = 0; t <= t_max; ++t)
            rows.push_back({{"t", t},
                            {"d_exact", sig(d[static_cast<size_t>(t)])},
                            {"adjacent_tv", sig(adj[static_cast<size_t>(t)])}});
        json j;
        j["params"] = params;
        j["rows"] = rows;
        emit(c, out, j.dump() + "\n");
    } else {
        std::string text = params_comment(params);
        text += "t,d_exact,adjacent_tv\n";
        for (int t = 0; t <= t_max; ++t)
            text += std::to_string(t) + "," + io::format_double(d[static_cast<size_t>(t)]) +
                    "," + io::format_double(adj[static_cast<size_t>(t)]) + "\n";
        emit(c, out, text);
    }
    return 0;
}

// ---- couple -------------------------------------------------------------

int cmd_couple_rate(const CommonOpts& c, std::ostream& out, int n, int k,
                    std::uint64_t samples) {
    const mc::NonCoalescenceResult res = mc::estimate_noncoalescence(
        n, k, samples, SeedSpec{c.seed}, make_variant(c), c.threads);
    json j;
    j["params"] = params_echo("couple", c);
    j["params"]["n"] = n;
    j["params"]["k"] = k;
    j["params"]["samples"] = samples;
    j["overall"] = estimate_json(res.overall);
    j["t_lt_k"] = res.t_lt_k;
    j["failures_given_t_lt_k"] = res.failures_given_t_lt_k;
    if (res.conditional)
        j["conditional_given_T_lt_k"] = estimate_json(*res.conditional);
    else
        j["conditional_given_T_lt_k"] = "undefined";
    emit(c, out, j.dump() + "\n");
    return 0;
}

int cmd_couple_tail(const CommonOpts& c, std::ostream& out, int n, int k,
                    std::uint64_t samples) {
    const mc::EstimateWithCI est =
        mc::estimate_T_tail(n, k, samples, SeedSpec{c.seed}, make_variant(c), c.threads);
    json j;
    j["params"] = params_echo("couple", c);
    j["params"]["n"] = n;
    j["params"]["k"] = k;
    j["params"]["samples"] = samples;
    j["point"] = sig(est.point);
    j["ci"] = {sig(est.lo), sig(est.hi)};
    j["samples"] = est.samples;
    j["method"] = est.method;
    if (n >= 9) {
        const double lambda = chain::second_largest_eigenvalue(chain::build_ktilde(n));
        const chain::BoundConstants consts;
        const double finite =
            consts.cauchy_schwarz_factor * std::pow(lambda, static_cast<double>(k));
        const double asymptotic = chain::survival_bound(n, k);
        j["comparisons"] = {{"sqrt8_lambda_pow_k", sig(finite)},
                            {"exp_minus_ak_over_n", sig(asymptotic)},
                            {"ratio_to_finite_bound", sig(est.point / finite)},
                            {"ratio_to_asymptotic", sig(est.point / asymptotic)}};
    }
    emit(c, out, j.dump() + "\n");
    return 0;
}

int cmd_couple_curve(const CommonOpts& c, std::ostream& out, int n,
                     const std::vector<int>& k_list, std::uint64_t samples) {
    const std::vector<mc::BoundCurveRow> rows = mc::coupling_bound_curve(
        n, k_list, samples, SeedSpec{c.seed}, make_variant(c), c.threads);
    json params = params_echo("couple", c);
    params["n"] = n;
    params["samples"] = samples;
    if (c.format == "json") {
        json j;
        j["params"] = params;
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"k", r.k},
                           {"empirical", sig(r.empirical)},
                           {"analytic", sig(r.analytic)},
                           {"estimate", estimate_json(r.estimate)}});
        j["rows"] = arr;
        emit(c, out, j.dump() + "\n");
    } else {
        std::string text = params_comment(params);
        text += "k,empirical_bound,analytic_bound\n";
        for (const auto& r : rows)
            text += std::to_string(r.k) + "," + io::format_double(r.empirical) + "," +
                    io::format_double(r.analytic) + "\n";
        emit(c, out, text);
    }
    return 0;
}

int cmd_couple_run(const CommonOpts& c, std::ostream& out, const std::string& deck_text,
                   const std::string& path_text, const std::string& pair_text) {
    const Deck deck = io::parse_deck(deck_text);
    const ShufflePath path = io::parse_path(path_text);
    SpecialPair pair{1, 2};
    if (!pair_text.empty()) {
        const Shuffle parsed = io::parse_shuffle(pair_text);  // reuse "i>j" syntax
        pair = SpecialPair{parsed.a, parsed.b};
    }
    const CoupledOutcome outcome = run_coupled(deck, pair, path, make_variant(c));
    emit(c, out, io::coupled_outcome_to_json(outcome) + "\n");
    return 0;
}

// ---- queue-stats ----------------------------------------------------------

int cmd_queue_stats(const CommonOpts& c, std::ostream& out, int n, std::uint64_t steps,
                    int l_max) {
    const mc::QueueRateTable table =
        mc::queue_transition_stats(n, steps, SeedSpec{c.seed}, make_variant(c), l_max);
    json params = params_echo("queue-stats", c);
    params["n"] = n;
    params["steps"] = steps;
    if (c.format == "json") {
        json j;
        j["params"] = params;
        json rows = json::array();
        for (const auto& r : table.rows)
            rows.push_back({{"l", r.l},
                            {"visits", r.visits},
                            {"q_hat", sig(r.q_hat)},
                            {"q", sig(r.q_theory)},
                            {"p_hat", sig(r.p_hat)},
                            {"p", sig(r.p_theory)},
                            {"reset_hat", sig(r.reset_hat)},
                            {"two_over_n", sig(r.reset_theory)},
                            {"z_q", sig(r.z_q)},
                            {"z_p", sig(r.z_p)},
                            {"z_reset", sig(r.z_reset)}});
        j["rows"] = rows;
        emit(c, out, j.dump() + "\n");
    } else {
        std::string text = params_comment(params);
        text += "l,visits,q_hat,q,p_hat,p,reset_hat,two_over_n,z_q,z_p,z_reset\n";
        for (const auto& r : table.rows) {
            text += std::to_string(r.l) + "," + std::to_string(r.visits) + "," +
                    io::format_double(r.q_hat) + "," + io::format_double(r.q_theory) + "," +
                    io::format_double(r.p_hat) + "," + io::format_double(r.p_theory) + "," +
                    io::format_double(r.reset_hat) + "," +
                    io::format_double(r.reset_theory) + "," + io::format_double(r.z_q) +
                    "," + io::format_double(r.z_p) + "," + io::format_double(r.z_reset) +
                    "\n";
        }
        emit(c, out, text);
    }
    return 0;
}

// ---- dominance ------------------------------------------------------------

int cmd_dominance(const CommonOpts& c, std::ostream& out, int n, int t_max,
                  std::uint64_t samples, int grid_points) {
    const chain::DominanceResult res =
        chain::dominance_check(n, t_max, samples, SeedSpec{c.seed}, grid_points);
    json params = params_echo("dominance", c);
    params["n"] = n;
    params["t_max"] = t_max;
    params["samples"] = samples;
    if (c.format == "json") {
        json j;
        j["params"] = params;
        j["max_violation"] = sig(res.max_violation);
        j["max_z"] = sig(res.max_z);
        j["at_t"] = res.at_t;
        j["at_m"] = res.at_m;
        emit(c, out, j.dump() + "\n");
    } else {
        std::string text = params_comment(params);
        text += "t,m,empirical_tail,exact_tail,z\n";
        for (const auto& cell : res.grid)
            text += std::to_string(cell.t) + "," + std::to_string(cell.m) + "," +
                    io::format_double(cell.empirical) + "," + io::format_double(cell.exact) +
                    "," + io::format_double(cell.z) + "\n";
        emit(c, out, text);
    }
    return 0;
}

// ---- bound ----------------------------------------------------------------

int cmd_bound(const CommonOpts& c, std::ostream& out, int n, std::optional<double> eps,
              std::optional<int> k) {
    json j;
    j["params"] = params_echo("bound", c);
    j["params"].erase("seed");
    j["params"]["n"] = n;
    if (eps && k) throw std::invalid_argument("give either --eps or --k, not both");
    if (eps) {
        const std::int64_t t_star = chain::mixing_bound(n, *eps);
        j["params"]["eps"] = *eps;
        j["t_star"] = t_star;
        j["analytic_bound_at_t_star"] = sig(chain::analytic_tv_bound(n, t_star));
    } else if (k) {
        j["params"]["k"] = *k;
        j["survival_bound"] = sig(chain::survival_bound(n, *k));
    } else {
        throw std::invalid_argument("bound needs --eps (mixing) or --k (survival)");
    }
    emit(c, out, j.dump() + "\n");
    return 0;
}

// ---- verify ---------------------------------------------------------------

int cmd_verify(const CommonOpts& c, std::ostream& out, bool quick) {
    acceptance::AcceptanceOptions opts;
    opts.quick = quick;
    opts.threads = c.threads;
    const std::vector<acceptance::CriterionResult> results =
        acceptance::run_acceptance(opts, &out);
    const bool ok = acceptance::all_passed(results);
    out << (ok ? "all criteria passed" : "some criteria FAILED") << std::endl;
    return ok ? 0 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
    CLI::App app{"random-to-random insertion shuffle laboratory"};
    app.name("r2r");
    app.require_subcommand(1);

    // eig
    CommonOpts eig_opts;
    bool eig_limit = false;
    int eig_n = 0;
    std::string eig_dump;
    int eig_l2_kmax = 0;
    auto* eig = app.add_subcommand("eig", "second largest eigenvalue of the size chain");
    eig->add_flag("--limit", eig_limit, "use the entrywise limit matrix");
    eig->add_option("--n", eig_n, "deck size for the finite-n matrices");
    eig->add_option("--dump", eig_dump, "print a matrix instead (ktilde|generator|limit)")
        ->check(CLI::IsMember({"ktilde", "generator", "limit"}));
    eig->add_option("--l2-check", eig_l2_kmax,
                    "also report the l2-vs-eigenvalue ratio up to this k");
    add_common(eig, eig_opts, false);

    // tv
    CommonOpts tv_opts;
    int tv_n = 0, tv_tmax = 0, tv_cap = tv::kDefaultMaxN;
    auto* tvc = app.add_subcommand("tv", "exact total variation curves (small n)");
    tvc->add_option("--n", tv_n, "deck size")->required();
    tvc->add_option("--t-max", tv_tmax, "last step of the curve")->required();
    tvc->add_option("--max-n", tv_cap, "raise the n! resource cap (slow, lots of memory)");
    add_common(tvc, tv_opts, false);

    // couple
    CommonOpts couple_opts;
    int couple_n = 0, couple_k = 0;
    std::uint64_t couple_samples = 100000;
    bool couple_tail = false;
    std::vector<int> couple_klist;
    std::string couple_deck, couple_path, couple_pair;
    auto* couple = app.add_subcommand("couple", "coupled-run estimators");
    couple->add_option("--n", couple_n, "deck size");
    couple->add_option("--k", couple_k, "path length");
    couple->add_option("--samples", couple_samples, "trajectories");
    couple->add_flag("--tail", couple_tail, "estimate P(T >= k) with the queue process only");
    couple->add_option("--curve", couple_klist,
                       "k grid for the path-coupling bound curve")
        ->delimiter(',');
    couple->add_option("--deck", couple_deck, "single run: starting deck, e.g. 1,3,4,2");
    couple->add_option("--path", couple_path, "single run: move list, e.g. 1>1;1>4;2>3");
    couple->add_option("--pair", couple_pair, "single run: special pair, e.g. 1>2");
    add_variant_flags(couple, couple_opts);
    add_common(couple, couple_opts, true);

    // queue-stats
    CommonOpts qs_opts;
    int qs_n = 0, qs_lmax = 8;
    std::uint64_t qs_steps = 1000000;
    auto* qs = app.add_subcommand("queue-stats",
                                  "empirical vs closed-form queue transition rates");
    qs->add_option("--n", qs_n, "deck size")->required();
    qs->add_option("--steps", qs_steps, "length of the move stream");
    qs->add_option("--l-max", qs_lmax, "largest queue size to report");
    add_variant_flags(qs, qs_opts);
    add_common(qs, qs_opts, true);

    // dominance
    CommonOpts dom_opts;
    int dom_n = 0, dom_tmax = 0, dom_grid = 10;
    std::uint64_t dom_samples = 100000;
    auto* dom = app.add_subcommand(
        "dominance", "Monte Carlo size process vs exact truncated-chain CDF");
    dom->add_option("--n", dom_n, "deck size")->required();
    dom->add_option("--t-max", dom_tmax, "horizon")->required();
    dom->add_option("--samples", dom_samples, "trajectories");
    dom->add_option("--grid-points", dom_grid, "time grid resolution");
    add_common(dom, dom_opts, true);

    // bound
    CommonOpts bound_opts;
    int bound_n = 0;
    double bound_eps = -1;
    int bound_k = -1;
    auto* bound = app.add_subcommand("bound", "analytic mixing/survival bound calculator");
    bound->add_option("--n", bound_n, "deck size")->required();
    bound->add_option("--eps", bound_eps, "target total variation");
    bound->add_option("--k", bound_k, "steps for the survival bound");
    add_common(bound, bound_opts, false);

    // verify
    CommonOpts verify_opts;
    bool verify_quick = false;
    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    verify->add_flag("--quick", verify_quick, "trim Monte Carlo sample counts 10x");
    verify->add_option("--threads", verify_opts.threads, "worker threads");

    std::vector<const char*> argv;
    argv.push_back("r2r");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(eig)) {
            eig_opts.format = eig_opts.format.empty() ? "json" : eig_opts.format;
            if (eig_dump.empty() && !eig_limit && eig_n == 0)
                throw std::invalid_argument("eig needs --limit or --n");
            if ((eig_dump == "ktilde" || eig_dump == "generator") && eig_n == 0)
                throw std::invalid_argument("--dump " + eig_dump + " needs --n");
            return cmd_eig(eig_opts, out, eig_limit, eig_n, eig_dump, eig_l2_kmax);
        }
        if (app.got_subcommand(tvc)) {
            tv_opts.format = tv_opts.format.empty() ? "csv" : tv_opts.format;
            if (tv_cap > tv::kDefaultMaxN)
                err << "warning: raising the exact-evolution cap to n <= " << tv_cap
                    << "; memory grows like n!\n";
            return cmd_tv(tv_opts, out, tv_n, tv_tmax, tv_cap);
        }
        if (app.got_subcommand(couple)) {
            if (!couple_deck.empty() || !couple_path.empty()) {
                couple_opts.format = couple_opts.format.empty() ? "json" : couple_opts.format;
                if (couple_deck.empty() || couple_path.empty())
                    throw std::invalid_argument("single run needs both --deck and --path");
                return cmd_couple_run(couple_opts, out, couple_deck, couple_path,
                                      couple_pair);
            }
            if (couple_n == 0) throw std::invalid_argument("couple needs --n");
            if (!couple_klist.empty()) {
                couple_opts.format = couple_opts.format.empty() ? "csv" : couple_opts.format;
                return cmd_couple_curve(couple_opts, out, couple_n, couple_klist,
                                        couple_samples);
            }
            couple_opts.format = couple_opts.format.empty() ? "json" : couple_opts.format;
            if (couple_k == 0) throw std::invalid_argument("couple needs --k");
            if (couple_tail)
                return cmd_couple_tail(couple_opts, out, couple_n, couple_k, couple_samples);
            return cmd_couple_rate(couple_opts, out, couple_n, couple_k, couple_samples);
        }
        if (app.got_subcommand(qs)) {
            qs_opts.format = qs_opts.format.empty() ? "csv" : qs_opts.format;
            return cmd_queue_stats(qs_opts, out, qs_n, qs_steps, qs_lmax);
        }
        if (app.got_subcommand(dom)) {
            dom_opts.format = dom_opts.format.empty() ? "json" : dom_opts.format;
            return cmd_dominance(dom_opts, out, dom_n, dom_tmax, dom_samples, dom_grid);
        }
        if (app.got_subcommand(bound)) {
            bound_opts.format = bound_opts.format.empty() ? "json" : bound_opts.format;
            return cmd_bound(bound_opts, out, bound_n,
                             bound_eps >= 0 ? std::optional<double>(bound_eps) : std::nullopt,
                             bound_k >= 0 ? std::optional<int>(bound_k) : std::nullopt);
        }
        if (app.got_subcommand(verify)) return cmd_verify(verify_opts, out, verify_quick);
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        err << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand dispatched\n";
    return 2;
}

int run_command(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_command(args, std::cout, std::cerr);
}

}  // namespace r2r::cli
