// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Every check compares library output against an independent
// oracle from tests/support or against a closed-form bound.

#include <bvu/bvu.hpp>

#include "support/oracles.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace bvu;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

/// Collects the first few violations of a criterion.
class Violations {
public:
    void add(const std::string& what) {
        if (count_++ < 3) first_ += (first_.empty() ? "" : "; ") + what;
    }
    Outcome outcome(const std::string& summary) const {
        if (count_ == 0) return {true, summary};
        return {false, std::to_string(count_) + " violation(s): " + first_};
    }

private:
    std::size_t count_ = 0;
    std::string first_;
};

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

double tail_of(const std::vector<double>& pmf, long long h) {
    if (h <= 0) return 1.0;
    double s = 0.0;
    for (auto i = static_cast<std::size_t>(h); i < pmf.size(); ++i) s += pmf[i];
    return s;
}

/// Random election with m <= max_m groups, at most max_n voters, and
/// |V1| - |Vm| <= max_gap.
ElectionInstance random_election(std::mt19937_64& eng, std::size_t max_m, std::size_t max_n, std::size_t max_gap,
                                 std::uint64_t seed) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(eng); };
    const std::size_t m = pick(2, max_m);
    for (;;) {
        const std::size_t designated = pick(0, 3);
        const std::size_t v1 = designated + pick(1, max_gap);
        std::vector<std::size_t> sizes{v1};
        for (std::size_t j = 1; j + 1 < m; ++j) sizes.push_back(pick(0, v1 - 1));
        sizes.push_back(designated);
        std::size_t n = 0;
        for (auto s : sizes) n += s;
        if (n > max_n) continue;
        RandomInstanceParams p;
        p.sizes = sizes;
        p.budget_fraction = std::uniform_real_distribution<double>(0.1, 0.9)(eng);
        p.big_fraction = pick(0, 1) ? 0.3 : 0.0;
        return random_instance(p, seed);
    }
}

Outcome poisson_binomial_oracle() {
    std::mt19937_64 eng(101);
    Violations bad;
    double worst = 0.0;
    for (int rep = 0; rep < 500; ++rep) {
        const auto n = static_cast<std::size_t>(rep % 13);
        const auto probs = oracle::random_probs(eng, n);
        for (long long k = -1; k <= static_cast<long long>(n) + 1; ++k) {
            const double err = std::abs(pb_tail(probs, k) - oracle::brute_tail(probs, k));
            worst = std::max(worst, err);
            if (err > 1e-12) bad.add("vector " + std::to_string(rep) + " k=" + std::to_string(k));
        }
    }
    return bad.outcome("max error " + fmt(worst));
}

Outcome reduction_equivalence() {
    std::mt19937_64 eng(102);
    Violations bad;
    std::size_t subsets = 0;
    for (std::uint64_t inst_no = 0; inst_no < 100; ++inst_no) {
        const std::size_t v2 = eng() % 4;
        const std::size_t v1 = std::min<std::size_t>(10 - v2, v2 + 1 + eng() % 8);
        RandomInstanceParams p;
        p.sizes = {v1, v2};
        p.budget_fraction = 0.2 + 0.6 * uniform01(eng);
        const auto inst = random_instance(p, inst_no);
        const auto ku = bvu_to_ku(inst);
        const std::size_t n = ku.items.size();
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            std::vector<std::size_t> idx;
            double cost = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask >> i & 1U) {
                    idx.push_back(i);
                    cost += ku.items[i].size;
                }
            }
            if (cost > ku.capacity) continue;
            ++subsets;
            const std::vector<VoterId> voters(idx.begin(), idx.end());
            const double bvu = oracle::election_win_prob(inst, voters);
            if (std::abs(ku_value(ku, idx) - bvu) > 1e-12) bad.add("instance " + std::to_string(inst_no));
        }
    }
    return bad.outcome(std::to_string(subsets) + " feasible subsets");
}

Outcome guess_soundness() {
    std::mt19937_64 eng(103);
    Violations bad;
    for (std::uint64_t inst_no = 0; inst_no < 100; ++inst_no) {
        const auto inst = random_election(eng, 3, 10, 6, 1000 + inst_no);
        const double exact = solve_bvu_exact(inst).win_prob;
        double best = 0.0;
        for (const auto& g : enumerate_guesses(inst)) {
            if (auto s = solve_mku_exact(bvu_to_mku(inst, g))) best = std::max(best, s->win_prob);
        }
        const double brute = oracle::best_bvu_value(inst);
        if (std::abs(best - exact) > 1e-12 || std::abs(exact - brute) > 1e-12) {
            bad.add("instance " + std::to_string(inst_no) + ": exact " + fmt(exact) + " guesses " + fmt(best));
        }
    }
    return bad.outcome("100 instances");
}

Outcome additive_epsilon() {
    std::mt19937_64 eng(104);
    Violations bad;
    double max_gap = 0.0;
    std::size_t theoretical = 0;
    std::size_t truncated = 0;
    for (std::uint64_t inst_no = 0; inst_no < 200; ++inst_no) {
        const auto inst = random_election(eng, 3, 14, 4, 2000 + inst_no);
        const double exact = solve_bvu_exact(inst).win_prob;
        ApproxConfig cfg;
        cfg.epsilon = 0.25;
        cfg.theoretical_mode = true;
        BribeSolution sol;
        try {
            sol = solve_bvu_approx(inst, cfg);
            ++theoretical;
        } catch (const state_space_overflow&) {
            cfg.theoretical_mode = false;
            sol = solve_bvu_approx(inst, cfg);
        }
        truncated += sol.truncated;
        const double value = oracle::election_win_prob(inst, sol.chosen);
        const double gap = exact - value;
        max_gap = std::max(max_gap, gap);
        if (bribe_cost(inst, sol.chosen) > inst.budget()) bad.add("instance " + std::to_string(inst_no) + " over budget");
        if (std::abs(value - sol.win_prob) > 1e-12) bad.add("instance " + std::to_string(inst_no) + " misreported value");
        if (gap > 0.25) bad.add("instance " + std::to_string(inst_no) + " gap " + fmt(gap));
    }
    return bad.outcome("max gap " + fmt(max_gap) + ", theoretical mode on " + std::to_string(theoretical) +
                       "/200, truncated " + std::to_string(truncated));
}

Outcome dsum_gap() {
    std::mt19937_64 eng(105);
    Violations bad;
    std::size_t yes = 0;
    std::size_t no = 0;
    while (yes + no < 50) {
        DSumInstance ds;
        const std::size_t s = 2 + eng() % 13;
        for (std::size_t i = 0; i < s; ++i) ds.xs.push_back(1 + static_cast<long long>(eng() % 40));
        ds.d = 1 + static_cast<long long>(eng() % std::min<std::size_t>(s, 5));
        // Alternate between a realized d-subset sum and an arbitrary target.
        const bool want_yes = (yes + no) % 2 == 0;
        if (want_yes) {
            std::vector<long long> shuffled = ds.xs;
            std::shuffle(shuffled.begin(), shuffled.end(), eng);
            ds.t = 0;
            for (long long i = 0; i < ds.d; ++i) ds.t += shuffled[static_cast<std::size_t>(i)];
        } else {
            ds.t = 1 + static_cast<long long>(eng() % static_cast<std::uint64_t>(40 * ds.d));
        }
        const bool is_yes = oracle::dsum_yes(ds.xs, ds.d, ds.t);
        if (!want_yes && is_yes) continue;
        const double alpha = 1.0 + static_cast<double>(eng() % 4);
        const auto g = dsum_to_ku(ds, alpha);
        const double opt = solve_ku_exact(g.ku).win_prob;
        if (is_yes) {
            ++yes;
            if (!(opt >= g.yes_lower)) bad.add("YES gadget below 2^-wt");
        } else {
            ++no;
            if (!(opt <= g.no_upper)) bad.add("NO gadget above 2^-w(t+1)");
        }
    }
    return bad.outcome(std::to_string(yes) + " YES, " + std::to_string(no) + " NO");
}

Outcome case1_bound() {
    Violations bad;
    double worst = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Case1FriendlyParams p;
        p.k = 1 + static_cast<long long>(seed % 3);
        p.big_count = static_cast<std::size_t>(2 * p.k) + seed % 4;
        p.small_count = seed % 3;
        p.epsilon = 0.25;
        const auto inst = case1_friendly_instance(p, seed);
        ApproxConfig cfg;
        cfg.epsilon = 0.25;
        const auto sol = solve_bvu_approx(inst, cfg);
        const double value = oracle::election_win_prob(inst, sol.chosen);
        worst = std::min(worst, value);
        if (value < 0.75) bad.add("seed " + std::to_string(seed) + " value " + fmt(value));
    }
    return bad.outcome("min value " + fmt(worst));
}

Outcome big_item_rounding() {
    std::mt19937_64 eng(107);
    Violations bad;
    const double eps = 0.25;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t size = 1 + eng() % 8;
        std::vector<MkuItem> block;
        for (std::size_t i = 0; i < size; ++i) {
            const double p = 1.0 - eps * eps * (1.0 - uniform01(eng));
            block.push_back(MkuItem{static_cast<VoterId>(i), static_cast<double>(1 + eng() % 9), std::min(p, 1.0)});
        }
        std::vector<std::size_t> t;
        for (std::size_t i = 0; i < size; ++i) {
            if (eng() % 2) t.push_back(i);
        }
        const long long m = 1 + static_cast<long long>(eng() % 3);
        const long long k = static_cast<long long>(t.size() + 2) / 2;  // 2k - 1 >= |T|
        const auto grid = make_big_item_grid(eps, eps / static_cast<double>(m * k), 1'000'000);

        std::vector<std::size_t> t_counts(grid.levels.size(), 0);
        for (auto i : t) ++t_counts[grid.class_of(block[i].prob)];
        const auto sel = select_big_items(block, t.size(), grid, 1'000'000);
        const std::vector<std::size_t>* match = nullptr;
        for (const auto& cand : sel.subsets) {
            std::vector<std::size_t> c(grid.levels.size(), 0);
            for (auto i : cand) ++c[grid.class_of(block[i].prob)];
            if (c == t_counts) match = &cand;
        }
        if (!match) {
            bad.add("block " + std::to_string(rep) + " has no composition matching T");
            continue;
        }
        double cost_i = 0.0, cost_t = 0.0;
        std::vector<double> pi, pt;
        for (auto i : *match) {
            pi.push_back(block[i].prob);
            cost_i += block[i].size;
        }
        for (auto i : t) {
            pt.push_back(block[i].prob);
            cost_t += block[i].size;
        }
        if (cost_i > cost_t) bad.add("block " + std::to_string(rep) + " costs more than T");
        const auto pmf_i = oracle::brute_pmf(pi);
        const auto pmf_t = oracle::brute_pmf(pt);
        const double factor = 1.0 - 2.0 * eps / static_cast<double>(m);
        for (long long h = 0; h <= static_cast<long long>(t.size()); ++h) {
            const double lhs = tail_of(pmf_i, h);
            const double rhs = tail_of(pmf_t, h);
            if (rhs > 0.0) worst_ratio = std::min(worst_ratio, lhs / rhs);
            if (lhs < factor * rhs - 1e-15) bad.add("block " + std::to_string(rep) + " h=" + std::to_string(h));
        }
    }
    return bad.outcome("min tail ratio " + fmt(worst_ratio));
}

Outcome berry_esseen_and_cdf_shift() {
    std::mt19937_64 eng(108);
    Violations bad;
    std::size_t checks = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 20 + eng() % 181;
        const auto probs = oracle::random_probs(eng, n, 0.1, 0.9);
        const double bound = berry_esseen_bound(probs);
        for (long long h = 0; h <= static_cast<long long>(n); ++h) {
            const double normal = 1.0 - normal_cdf(standardized_threshold(probs, static_cast<double>(h)));
            ++checks;
            if (std::abs(pb_tail(probs, h) - normal) > bound) {
                bad.add("vector " + std::to_string(rep) + " h=" + std::to_string(h));
            }
        }
    }
    for (double delta : {0.001, 0.01, 0.1}) {
        for (int i = 0; i <= 4000; ++i) {
            const double x = -10.0 + 0.005 * i;
            for (double sign : {-1.0, 1.0}) {
                ++checks;
                const double shift = std::abs(normal_cdf((1.0 + delta) * x + sign * delta) - normal_cdf(x));
                if (shift > 2.0 * delta) bad.add("delta=" + fmt(delta) + " x=" + fmt(x));
            }
        }
    }
    return bad.outcome(std::to_string(checks) + " inequalities");
}

Outcome composition_bound() {
    std::mt19937_64 eng(109);
    Violations bad;
    std::size_t checks = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        const std::size_t m = 1 + eng() % 3;
        std::vector<std::vector<double>> y(m), z(m);
        for (std::size_t j = 0; j < m; ++j) {
            const auto base = oracle::random_probs(eng, 1 + eng() % 6);
            // Y_j perturbs Z_j so the premise holds with a small delta.
            std::vector<double> perturbed;
            for (double p : base) {
                perturbed.push_back(std::clamp(p + (uniform01(eng) - 0.5) * 0.2 * (rep % 5), 0.0, 1.0));
            }
            if (eng() % 4 == 0) perturbed.pop_back();
            z[j] = oracle::brute_pmf(base);
            y[j] = oracle::brute_pmf(perturbed);
        }
        std::vector<double> sum_y{1.0}, sum_z{1.0};
        for (std::size_t j = 0; j < m; ++j) {
            sum_y = convolve(sum_y, y[j]);
            sum_z = convolve(sum_z, z[j]);
        }
        for (long long ell = 0; ell < static_cast<long long>(sum_z.size()); ++ell) {
            // smallest delta with Pr(Y_j >= h) >= (1 - delta) Pr(Z_j >= h) - delta for all h <= ell
            double delta = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                for (long long h = 0; h <= ell; ++h) {
                    const double zt = tail_of(z[j], h);
                    delta = std::max(delta, (zt - tail_of(y[j], h)) / (1.0 + zt));
                }
            }
            const double md = static_cast<double>(m);
            const double rhs = std::pow(1.0 - delta, md) * tail_of(sum_z, ell) - md * delta;
            ++checks;
            if (tail_of(sum_y, ell) < rhs - 1e-12) bad.add("tuple " + std::to_string(rep) + " ell=" + std::to_string(ell));
        }
    }
    return bad.outcome(std::to_string(checks) + " (tuple, threshold) pairs");
}

int shell(const std::string& args, std::string& out) {
    const std::string cmd = std::string(BVU_CLI_PATH) + " " + args;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return -1;
    out.clear();
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    const int status = ::pclose(p);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism_and_round_trip() {
    namespace fs = std::filesystem;
    Violations bad;
    const fs::path dir = fs::temp_directory_path() / ("bvu-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string inst = (dir / "inst.json").string();
    const std::vector<std::string> generators = {
        "generate random --sizes 7,3,2",
        "generate dsum-gadget --xs 3,5,7,9 --t 12 --d 2",
        "generate case1-friendly --k 2 --big 5 --small 2",
    };
    std::size_t runs = 0;
    for (const auto& gen : generators) {
        std::string a, b;
        const std::string cmd = "--seed 17 --no-timing -q " + gen;
        if (shell(cmd, a) != 0 || shell(cmd, b) != 0 || a != b) bad.add("'" + gen + "' not reproducible");
        std::ofstream(inst) << a;
        const auto parsed = parse_instance(a);
        if (instance_to_json(parsed.instance, parsed.metadata).dump(2) + "\n" != a) bad.add("'" + gen + "' round trip");
        for (const char* method : {"exact", "approx"}) {
            std::string s1, s2;
            const std::string solve = "--seed 17 --no-timing -q solve " + inst + " --method " + method;
            if (shell(solve, s1) != 0 || shell(solve, s2) != 0 || s1 != s2) {
                bad.add("'" + gen + "' solve " + method + " not reproducible");
                continue;
            }
            const auto sol = parse_solution(s1);
            if (solution_to_json(sol).dump(2) + "\n" != s1) bad.add("solution round trip");
            if (parse_solution(solution_to_json(sol).dump()) != sol) bad.add("solution compact round trip");
            runs += 2;
        }
    }
    fs::remove_all(dir);
    return bad.outcome(std::to_string(runs) + " byte-identical solve reruns");
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1 poisson-binomial tail vs enumeration", 10, poisson_binomial_oracle},
        {"2 KU objective equals BVU win probability", 60, reduction_equivalence},
        {"3 exact optimum equals best guess", 120, guess_soundness},
        {"4 approx within 0.25 of exact", 600, additive_epsilon},
        {"5 d-sum gadget gap", 120, dsum_gap},
        {"6 case-1 instances reach 0.75", 30, case1_bound},
        {"7 big-item rounding keeps tails", 30, big_item_rounding},
        {"8 Berry-Esseen and normal CDF shift", 60, berry_esseen_and_cdf_shift},
        {"9 tail bounds compose across blocks", 60, composition_bound},
        {"10 determinism and round trips", 10, determinism_and_round_trip},
    };
    bool all = true;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.ok && secs >= c.limit_seconds) o = {false, "took " + fmt(secs) + " s, limit " + fmt(c.limit_seconds) + " s"};
        all = all && o.ok;
        std::cout << (o.ok ? "PASS" : "FAIL") << "  " << c.name << "  (" << o.detail << ", " << fmt(secs) << " s)"
                  << std::endl;
    }
    return all ? 0 : 1;
}
